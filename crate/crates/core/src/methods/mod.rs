//! The sixteen classification methods and the dispatcher over them.
//!
//! Every method maps a [`FeatureSeries`] to a [`BinningResult`] whose
//! `method` field echoes the parameters actually used, so calling a method
//! directly and through [`run_method`] gives identical results.

mod catalog;
mod head_tail;
mod interval;
mod optimal;
mod resiliency;
mod statistical;

use rayon::prelude::*;

pub use catalog::{
    catalog, custom_descriptor, descriptor, Category, MethodDescriptor, ParameterSpec,
};
pub use head_tail::head_tail_breaks;
pub use interval::{
    defined_interval, equal_interval, exponential_bin_sizes, geometric_interval, largest_remainder,
    manual_interval, nice_step, pretty_breaks, unclassed, NiceStep,
};
pub use optimal::{ckmeans, maximum_breaks, natural_breaks, MAX_DISTINCT_FOR_DP};
pub use resiliency::{default_members, resiliency, SIX_BIN_MEMBERS};
pub use statistical::{box_plot, percentile, quantile, quantile_of_sorted, std_deviation};

use crate::error::{Error, Result};
use crate::reclassify::CustomMethodStore;
use crate::result::{degenerate_extents, BinningResult, DEGENERATE_NOTE};
use crate::series::FeatureSeries;
use crate::spec::{MethodId, MethodSpec, MAX_BIN_COUNT};

/// Sorted valid values and their range.
pub(crate) struct Prepared {
    pub sorted: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl Prepared {
    pub fn new(series: &FeatureSeries) -> Result<Self> {
        let sorted = series.sorted_valid();
        let (Some(&min), Some(&max)) = (sorted.first(), sorted.last()) else {
            return Err(Error::EmptySeries);
        };
        Ok(Prepared { sorted, min, max })
    }

    pub fn is_constant(&self) -> bool {
        self.min == self.max
    }

    /// Smallest data value strictly above `x`.
    pub fn next_above(&self, x: f64) -> Option<f64> {
        self.sorted
            .get(self.sorted.partition_point(|&v| v <= x))
            .copied()
    }

    /// Largest data value strictly below `x`.
    pub fn next_below(&self, x: f64) -> Option<f64> {
        let i = self.sorted.partition_point(|&v| v < x);
        i.checked_sub(1).map(|i| self.sorted[i])
    }

    pub fn extents_with(&self, breaks: Vec<f64>) -> Vec<f64> {
        let mut extents = Vec::with_capacity(breaks.len() + 2);
        extents.push(self.min);
        extents.extend(breaks);
        extents.push(self.max);
        extents
    }
}

pub(crate) fn check_bin_count(k: usize) -> Result<()> {
    if k == 0 || k > MAX_BIN_COUNT {
        return Err(Error::InvalidBinCount(k));
    }
    Ok(())
}

pub(crate) fn degenerate(
    spec: MethodSpec,
    series: &FeatureSeries,
    p: &Prepared,
) -> Result<BinningResult> {
    BinningResult::from_extents(
        spec,
        series,
        degenerate_extents(p.min),
        vec![DEGENERATE_NOTE.to_string()],
    )
}

/// Interval size used by `defined_interval` when none is given: the nice
/// step closest to a fifth of the range. It does not follow the bin count.
pub fn default_interval_size(series: &FeatureSeries) -> Result<f64> {
    let (min, max) = series.range()?;
    if max > min {
        Ok(nice_step((max - min) / 5.0).value())
    } else {
        Ok(1.0)
    }
}

/// Runs any built-in or saved custom method.
pub fn run_method(
    series: &FeatureSeries,
    spec: &MethodSpec,
    customs: &CustomMethodStore,
) -> Result<BinningResult> {
    let k = spec.bin_count();
    match &spec.method_id {
        MethodId::Unclassed => unclassed(series),
        MethodId::DefinedInterval => {
            let size = match spec.defined_interval_size {
                Some(size) => size,
                None => default_interval_size(series)?,
            };
            defined_interval(series, size)
        }
        MethodId::EqualInterval => equal_interval(series, k),
        MethodId::PrettyBreaks => pretty_breaks(series, k),
        MethodId::GeometricInterval => geometric_interval(series, k),
        MethodId::ExponentialBinSizes => exponential_bin_sizes(series, k, spec.exp_growth()),
        MethodId::ManualInterval => match &spec.manual_breaks {
            Some(breaks) => manual_interval(series, breaks),
            None => {
                let seed = equal_interval(series, k)?;
                let mut result = manual_interval(series, seed.breaks())?;
                result.notes.push(format!(
                    "Seeded: no manual breaks given; started from equal interval with {k} bins"
                ));
                Ok(result)
            }
        },
        MethodId::Quantile => quantile(series, k),
        MethodId::Percentile => percentile(series),
        MethodId::BoxPlot => box_plot(series, spec.iqr_factor()),
        MethodId::StdDeviation => std_deviation(series, k, spec.std_dev_step()),
        MethodId::MaximumBreaks => maximum_breaks(series, k),
        MethodId::NaturalBreaks => natural_breaks(series, k),
        MethodId::Ckmeans => ckmeans(series, k),
        MethodId::HeadTailBreaks => head_tail_breaks(series, spec.head_tail_threshold()),
        MethodId::Resiliency => {
            let members = spec
                .member_methods
                .clone()
                .unwrap_or_else(|| default_members(k));
            resiliency(series, &members, k, customs)
        }
        MethodId::Custom(name) => {
            let method = customs
                .get(name)
                .ok_or_else(|| Error::UnknownMethod(spec.method_id.to_string()))?;
            BinningResult::from_extents(
                MethodSpec::new(spec.method_id.clone()),
                series,
                method.extents,
                vec![],
            )
        }
    }
}

/// Runs all sixteen built-in methods in parallel, in catalog order. `base`
/// supplies the shared parameters; its method id is ignored.
pub fn run_all(
    series: &FeatureSeries,
    base: &MethodSpec,
    customs: &CustomMethodStore,
) -> Vec<(MethodId, Result<BinningResult>)> {
    MethodId::BUILTIN
        .par_iter()
        .map(|id| {
            let spec = MethodSpec {
                method_id: id.clone(),
                ..base.clone()
            };
            (id.clone(), run_method(series, &spec, customs))
        })
        .collect()
}

/// Sum of squared deviations from class means of `result` over `series`.
pub fn sdcm(series: &FeatureSeries, result: &BinningResult) -> f64 {
    let k = result.bin_count();
    let mut sums = vec![(0.0, 0usize); k];
    for (i, v) in series.valid() {
        if let Some(b) = result.assignments[i] {
            sums[b - 1].0 += v;
            sums[b - 1].1 += 1;
        }
    }
    let means: Vec<f64> = sums
        .iter()
        .map(|&(s, n)| if n > 0 { s / n as f64 } else { 0.0 })
        .collect();
    series
        .valid()
        .filter_map(|(i, v)| result.assignments[i].map(|b| (v - means[b - 1]).powi(2)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::StdDevStep;

    fn sample() -> FeatureSeries {
        FeatureSeries::from_values(&[3.0, 7.5, 1.0, 9.0, 4.4, 12.0, 2.2, 8.1, 5.0, 6.6])
    }

    #[test]
    fn dispatcher_matches_direct_calls() {
        let s = sample();
        let store = CustomMethodStore::new();
        let via = run_method(
            &s,
            &MethodSpec::with_bins(MethodId::EqualInterval, 5),
            &store,
        )
        .unwrap();
        assert_eq!(via, equal_interval(&s, 5).unwrap());
        let via = run_method(&s, &MethodSpec::new(MethodId::BoxPlot), &store).unwrap();
        assert_eq!(via, box_plot(&s, 1.5).unwrap());
    }

    #[test]
    fn irrelevant_parameters_do_not_change_results() {
        let s = sample();
        let store = CustomMethodStore::new();
        for id in MethodId::BUILTIN {
            let clean = MethodSpec::with_bins(id.clone(), 4).relevant();
            let mut noisy = clean.clone();
            noisy.bin_count.get_or_insert(11);
            if id != MethodId::DefinedInterval {
                noisy.defined_interval_size.get_or_insert(0.01);
            }
            noisy.std_dev_step.get_or_insert(StdDevStep::Half);
            noisy.iqr_factor.get_or_insert(0.1);
            noisy.head_tail_threshold.get_or_insert(0.9);
            noisy.exp_growth.get_or_insert(7.0);
            if id != MethodId::ManualInterval {
                noisy.manual_breaks.get_or_insert(vec![5.0]);
            }
            if id != MethodId::Resiliency {
                noisy.member_methods.get_or_insert(vec![MethodId::Quantile]);
            }
            let a = run_method(&s, &clean, &store).unwrap();
            let b = run_method(&s, &noisy, &store).unwrap();
            assert_eq!(a, b, "{id}");
        }
    }

    #[test]
    fn degenerate_series_gives_one_bin_everywhere() {
        let s = FeatureSeries::from_values(&[4.0, 4.0, 4.0]);
        let store = CustomMethodStore::new();
        for id in MethodId::BUILTIN {
            let r = run_method(&s, &MethodSpec::with_bins(id.clone(), 3), &store).unwrap();
            assert_eq!(r.extents, vec![4.0, 4.0 + 4.0 * 1e-9], "{id}");
            assert_eq!(r.bin_sizes, vec![3]);
        }
    }

    #[test]
    fn unknown_custom_method() {
        let s = sample();
        let err = run_method(
            &s,
            &MethodSpec::new(MethodId::Custom("nope".into())),
            &CustomMethodStore::new(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownMethod(m) if m == "custom:nope"));
    }

    #[test]
    fn run_all_covers_the_catalog_in_order() {
        let s = sample();
        let results = run_all(
            &s,
            &MethodSpec::with_bins(MethodId::EqualInterval, 3),
            &CustomMethodStore::new(),
        );
        assert_eq!(results.len(), 16);
        for ((id, r), expected) in results.iter().zip(MethodId::BUILTIN.iter()) {
            assert_eq!(id, expected);
            let r = r.as_ref().unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(r.bin_sizes.iter().sum::<usize>(), 10);
        }
    }

    #[test]
    fn empty_series_is_rejected_by_every_method() {
        let s = FeatureSeries::new(vec!["a".into()], vec![None], "x").unwrap();
        let store = CustomMethodStore::new();
        for id in MethodId::BUILTIN {
            let err = run_method(&s, &MethodSpec::new(id.clone()), &store).unwrap_err();
            assert!(matches!(err, Error::EmptySeries), "{id}: {err}");
        }
    }
}
