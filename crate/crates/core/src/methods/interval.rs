//! Arithmetically generated breaks, plus the human-centered manual and
//! pretty methods and the unclassed ramp.

use super::{check_bin_count, degenerate, Prepared};
use crate::error::{Error, Result};
use crate::result::{midpoint, BinningResult};
use crate::series::FeatureSeries;
use crate::spec::{MethodId, MethodSpec, MAX_BIN_COUNT};

pub fn equal_interval(series: &FeatureSeries, k: usize) -> Result<BinningResult> {
    check_bin_count(k)?;
    let spec = MethodSpec::with_bins(MethodId::EqualInterval, k);
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    BinningResult::from_extents(spec, series, equal_extents(p.min, p.max, k), vec![])
}

pub(crate) fn equal_extents(min: f64, max: f64, k: usize) -> Vec<f64> {
    let width = (max - min) / k as f64;
    let mut extents: Vec<f64> = (0..k).map(|i| min + i as f64 * width).collect();
    extents.push(max);
    extents
}

/// Breaks every `size` units from the minimum; the last bin may be narrower.
pub fn defined_interval(series: &FeatureSeries, size: f64) -> Result<BinningResult> {
    if !(size.is_finite() && size > 0.0) {
        return Err(Error::InvalidIntervalSize(size));
    }
    let spec = MethodSpec {
        defined_interval_size: Some(size),
        ..MethodSpec::new(MethodId::DefinedInterval)
    };
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let range = p.max - p.min;
    let estimate = (range / size).ceil();
    if estimate > MAX_BIN_COUNT as f64 {
        return Err(Error::TooManyBins(estimate.min(usize::MAX as f64) as usize));
    }
    // a break within rounding distance of the maximum would leave a sliver bin
    let tol = range * 1e-12;
    let mut extents = vec![p.min];
    for i in 1.. {
        let b = p.min + i as f64 * size;
        if b >= p.max - tol {
            break;
        }
        extents.push(b);
    }
    extents.push(p.max);
    BinningResult::from_extents(spec, series, extents, vec![])
}

/// The `{1, 2, 5} * 10^n` step nearest `target`; ties go to the smaller step.
pub fn nice_step(target: f64) -> NiceStep {
    debug_assert!(target.is_finite() && target > 0.0);
    let mut exp = target.log10().floor() as i32;
    while (NiceStep {
        mantissa: 1,
        exponent: exp,
    })
    .value()
        > target
    {
        exp -= 1;
    }
    while (NiceStep {
        mantissa: 1,
        exponent: exp + 1,
    })
    .value()
        <= target
    {
        exp += 1;
    }
    let candidates = [
        NiceStep {
            mantissa: 1,
            exponent: exp,
        },
        NiceStep {
            mantissa: 2,
            exponent: exp,
        },
        NiceStep {
            mantissa: 5,
            exponent: exp,
        },
        NiceStep {
            mantissa: 1,
            exponent: exp + 1,
        },
    ];
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if (c.value() - target).abs() < (best.value() - target).abs() {
            best = *c;
        }
    }
    best
}

/// A step of the form `mantissa * 10^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NiceStep {
    pub mantissa: i64,
    pub exponent: i32,
}

impl NiceStep {
    pub fn value(self) -> f64 {
        self.multiple(1)
    }

    /// `j * step`, rounded once from the exact decimal.
    pub fn multiple(self, j: i64) -> f64 {
        let units = (j * self.mantissa) as f64;
        if self.exponent >= 0 {
            units * 10f64.powi(self.exponent)
        } else {
            units / 10f64.powi(-self.exponent)
        }
    }
}

pub fn pretty_breaks(series: &FeatureSeries, k: usize) -> Result<BinningResult> {
    check_bin_count(k)?;
    let spec = MethodSpec::with_bins(MethodId::PrettyBreaks, k);
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let step = nice_step((p.max - p.min) / k as f64);
    let mut j = (p.min / step.value()).floor() as i64;
    while step.multiple(j) > p.min {
        j -= 1;
    }
    while step.multiple(j + 1) <= p.min {
        j += 1;
    }
    let mut extents = vec![step.multiple(j)];
    while *extents.last().unwrap() < p.max {
        j += 1;
        extents.push(step.multiple(j));
    }
    let mut notes = vec![];
    if extents.len() - 1 != k {
        notes.push(format!(
            "Pretty step {} yields {} bins instead of the requested {k}",
            step.value(),
            extents.len() - 1
        ));
    }
    BinningResult::from_extents(spec, series, extents, notes)
}

/// Extents form a geometric progression from the minimum to the maximum.
/// Series with a non-positive minimum are shifted by `1 - min` first.
pub fn geometric_interval(series: &FeatureSeries, k: usize) -> Result<BinningResult> {
    check_bin_count(k)?;
    let spec = MethodSpec::with_bins(MethodId::GeometricInterval, k);
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let mut notes = vec![];
    let shift = if p.min <= 0.0 {
        let s = 1.0 - p.min;
        notes.push(format!(
            "Shifted: minimum {} is not positive; progression computed on values + {s}",
            p.min
        ));
        s
    } else {
        0.0
    };
    let (lo, hi) = (p.min + shift, p.max + shift);
    let ratio = (hi / lo).powf(1.0 / k as f64);
    let mut extents = vec![p.min];
    extents.extend((1..k).map(|i| lo * ratio.powi(i as i32) - shift));
    extents.push(p.max);
    BinningResult::from_extents(spec, series, extents, notes)
}

/// Bin populations grow by `growth` from one bin to the next.
pub fn exponential_bin_sizes(
    series: &FeatureSeries,
    k: usize,
    growth: f64,
) -> Result<BinningResult> {
    check_bin_count(k)?;
    if !(growth.is_finite() && growth > 1.0) {
        return Err(Error::InvalidGrowth(growth));
    }
    let spec = MethodSpec {
        exp_growth: Some(growth),
        ..MethodSpec::with_bins(MethodId::ExponentialBinSizes, k)
    };
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let weights: Vec<f64> = (0..k).map(|j| growth.powi(j as i32)).collect();
    let targets = largest_remainder(&weights, p.sorted.len());
    let cuts: Vec<usize> = targets
        .iter()
        .scan(0, |acc, &t| {
            *acc += t;
            Some(*acc)
        })
        .take(k - 1)
        .collect();
    let mut notes = vec![];
    let breaks = cuts_to_breaks(&p.sorted, &cuts, &mut notes);
    BinningResult::from_extents(spec, series, p.extents_with(breaks), notes)
}

/// Apportions `total` items proportionally to `weights` by the largest
/// remainder rule; remainder ties go to the lowest index.
pub fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        sizes[i] += 1;
    }
    sizes
}

/// Turns cut positions in sorted data into break values. Cut `c` separates
/// `sorted[c - 1]` from `sorted[c]`; a cut inside a run of equal values is
/// moved past the run (or before it when the run reaches the top), and cuts
/// that collapse onto a neighbour are dropped with a note.
pub(crate) fn cuts_to_breaks(sorted: &[f64], cuts: &[usize], notes: &mut Vec<String>) -> Vec<f64> {
    let n = sorted.len();
    let mut breaks: Vec<f64> = Vec::with_capacity(cuts.len());
    let mut last_cut = 0;
    for &cut in cuts {
        let mut c = cut;
        if c > 0 && c < n && sorted[c - 1] == sorted[c] {
            let up = (c..n).find(|&i| sorted[i - 1] < sorted[i]);
            let down = (1..c).rev().find(|&i| sorted[i - 1] < sorted[i]);
            c = up.or(down).unwrap_or(0);
            if c != cut {
                notes.push(format!(
                    "Adjusted: cut at position {cut} moved to {c} to keep equal values together"
                ));
            }
        }
        if c == 0 || c >= n || c <= last_cut {
            notes.push(format!(
                "Dropped: cut at position {cut} would leave an empty bin"
            ));
            continue;
        }
        last_cut = c;
        breaks.push(midpoint(sorted[c - 1], sorted[c]));
    }
    breaks
}

/// Interior breaks are taken as given; the outer extents stretch to cover
/// the data.
pub fn manual_interval(series: &FeatureSeries, breaks: &[f64]) -> Result<BinningResult> {
    if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NonMonotoneBreaks);
    }
    let spec = MethodSpec {
        manual_breaks: Some(breaks.to_vec()),
        ..MethodSpec::new(MethodId::ManualInterval)
    };
    let p = Prepared::new(series)?;
    let lower = breaks.first().map_or(p.min, |b| b.min(p.min));
    let upper = breaks.last().map_or(p.max, |b| b.max(p.max));
    if lower == upper {
        return degenerate(spec, series, &p);
    }
    let mut extents = vec![lower];
    extents.extend(breaks.iter().copied().filter(|&b| b > lower && b < upper));
    extents.push(upper);
    BinningResult::from_extents(spec, series, extents, vec![])
}

/// Continuous mapping: every value gets its normalized position in the range.
pub fn unclassed(series: &FeatureSeries) -> Result<BinningResult> {
    let spec = MethodSpec::new(MethodId::Unclassed);
    let p = Prepared::new(series)?;
    let mut result = if p.is_constant() {
        degenerate(spec, series, &p)?
    } else {
        BinningResult::from_extents(spec, series, vec![p.min, p.max], vec![])?
    };
    let span = p.max - p.min;
    result.unclassed_positions = Some(
        (0..series.len())
            .map(|i| {
                series
                    .value(i)
                    .map(|v| if span > 0.0 { (v - p.min) / span } else { 0.0 })
            })
            .collect(),
    );
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: i32, hi: i32) -> FeatureSeries {
        FeatureSeries::from_values(&(lo..=hi).map(f64::from).collect::<Vec<_>>())
    }

    #[test]
    fn equal_interval_on_zero_to_ten() {
        let r = equal_interval(&grid(0, 10), 5).unwrap();
        assert_eq!(r.extents, vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        let one = equal_interval(&grid(0, 10), 1).unwrap();
        assert_eq!(one.extents, vec![0.0, 10.0]);
        assert!(matches!(
            equal_interval(&grid(0, 10), 0),
            Err(Error::InvalidBinCount(0))
        ));
    }

    #[test]
    fn defined_interval_examples() {
        let s = FeatureSeries::from_values(&[0.0, 4.0, 10.0]);
        let r = defined_interval(&s, 3.0).unwrap();
        assert_eq!(r.extents, vec![0.0, 3.0, 6.0, 9.0, 10.0]);
        assert_eq!(defined_interval(&s, 10.0).unwrap().bin_count(), 1);
        assert_eq!(defined_interval(&s, 25.0).unwrap().bin_count(), 1);
        assert!(matches!(
            defined_interval(&s, 0.0),
            Err(Error::InvalidIntervalSize(_))
        ));
        assert!(matches!(
            defined_interval(&s, -1.0),
            Err(Error::InvalidIntervalSize(_))
        ));
        assert!(matches!(
            defined_interval(&s, 0.001),
            Err(Error::TooManyBins(10000))
        ));
    }

    #[test]
    fn defined_interval_half_unit_on_life_expectancy_range() {
        let s = FeatureSeries::from_values(&[62.44, 70.0, 80.85]);
        let r = defined_interval(&s, 0.5).unwrap();
        // ceil(18.41 / 0.5) = 37
        assert_eq!(r.bin_count(), 37);
        let widths = r.intervals();
        for w in &widths[..36] {
            assert!((w - 0.5).abs() < 1e-9);
        }
        assert!(widths[36] < 0.5);
    }

    #[test]
    fn nice_step_picks_closest_with_low_ties() {
        assert_eq!(nice_step(18.8).value(), 20.0);
        assert_eq!(nice_step(0.2).value(), 0.2);
        assert_eq!(nice_step(3.682).value(), 5.0);
        // 1.5 is equidistant from 1 and 2
        assert_eq!(nice_step(1.5).value(), 1.0);
        assert_eq!(nice_step(1000.0).value(), 1000.0);
        assert_eq!(nice_step(7.6).value(), 10.0);
    }

    #[test]
    fn pretty_breaks_examples() {
        let s = FeatureSeries::from_values(&[3.0, 50.0, 97.0]);
        let r = pretty_breaks(&s, 5).unwrap();
        assert_eq!(r.extents, vec![0.0, 20.0, 40.0, 60.0, 80.0, 100.0]);

        let s = FeatureSeries::from_values(&[0.0, 0.5, 1.0]);
        let r = pretty_breaks(&s, 5).unwrap();
        assert_eq!(r.extents, vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);

        let s = FeatureSeries::from_values(&[62.44, 70.1, 80.85]);
        let r = pretty_breaks(&s, 5).unwrap();
        assert_eq!(r.extents, vec![60.0, 65.0, 70.0, 75.0, 80.0, 85.0]);
    }

    #[test]
    fn geometric_interval_examples() {
        let s = FeatureSeries::from_values(&[1.0, 3.0, 16.0]);
        let r = geometric_interval(&s, 4).unwrap();
        let expected = [1.0, 2.0, 4.0, 8.0, 16.0];
        for (e, x) in r.extents.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12, "{:?}", r.extents);
        }
        assert_eq!(geometric_interval(&s, 1).unwrap().extents, vec![1.0, 16.0]);
    }

    #[test]
    fn geometric_interval_equal_log_spacing() {
        let s = FeatureSeries::from_values(&[5.0, 50.0, 500.0]);
        let r = geometric_interval(&s, 3).unwrap();
        let logs: Vec<f64> = r.extents.iter().map(|e| e.ln()).collect();
        let step = (500f64.ln() - 5f64.ln()) / 3.0;
        for w in logs.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_interval_shifts_non_positive_data() {
        let s = FeatureSeries::from_values(&[-3.0, 0.0, 12.0]);
        let r = geometric_interval(&s, 2).unwrap();
        assert_eq!(r.extents[0], -3.0);
        assert_eq!(r.extents[2], 12.0);
        // shifted range [1, 16] splits at 4, i.e. 0 after shifting back
        assert!((r.extents[1] - 0.0).abs() < 1e-12);
        assert!(r.notes.iter().any(|n| n.starts_with("Shifted")));
    }

    #[test]
    fn largest_remainder_rounding() {
        assert_eq!(largest_remainder(&[1.0, 2.0, 4.0], 15), vec![2, 4, 9]);
        assert_eq!(largest_remainder(&[1.0, 2.0, 4.0], 14), vec![2, 4, 8]);
        assert_eq!(largest_remainder(&[1.0, 1.0], 3), vec![2, 1]);
    }

    #[test]
    fn exponential_bin_sizes_examples() {
        let r = exponential_bin_sizes(&grid(1, 15), 3, 2.0).unwrap();
        assert_eq!(r.bin_sizes, vec![2, 4, 9]);
        let r = exponential_bin_sizes(&grid(1, 14), 3, 2.0).unwrap();
        assert_eq!(r.bin_sizes, vec![2, 4, 8]);
        assert_eq!(r.breaks(), &[2.5, 6.5]);
        let r = exponential_bin_sizes(&grid(1, 14), 1, 2.0).unwrap();
        assert_eq!(r.bin_sizes, vec![14]);
        assert!(matches!(
            exponential_bin_sizes(&grid(1, 14), 3, 1.0),
            Err(Error::InvalidGrowth(_))
        ));
    }

    #[test]
    fn cuts_inside_ties_move_past_the_run() {
        let sorted = [1.0, 2.0, 2.0, 2.0, 3.0];
        let mut notes = vec![];
        assert_eq!(cuts_to_breaks(&sorted, &[2], &mut notes), vec![2.5]);
        assert_eq!(notes.len(), 1);
        let sorted = [1.0, 3.0, 3.0];
        let mut notes = vec![];
        assert_eq!(cuts_to_breaks(&sorted, &[2], &mut notes), vec![2.0]);
        let mut notes = vec![];
        assert_eq!(cuts_to_breaks(&sorted, &[0, 1, 1], &mut notes), vec![2.0]);
        assert_eq!(notes.len(), 2);
    }

    #[test]
    fn manual_interval_examples() {
        let r = manual_interval(&grid(0, 10), &[5.0]).unwrap();
        assert_eq!(r.extents, vec![0.0, 5.0, 10.0]);
        assert_eq!(r.bin_sizes, vec![5, 6]);

        let manual = manual_interval(&grid(0, 10), &[2.0, 4.0, 6.0, 8.0]).unwrap();
        let equal = equal_interval(&grid(0, 10), 5).unwrap();
        assert_eq!(manual.extents, equal.extents);
        assert_eq!(manual.assignments, equal.assignments);

        // full extents re-imported keep their outer values
        let r = manual_interval(&grid(1, 9), &[0.0, 5.0, 10.0]).unwrap();
        assert_eq!(r.extents, vec![0.0, 5.0, 10.0]);

        assert!(matches!(
            manual_interval(&grid(0, 10), &[5.0, 5.0]),
            Err(Error::NonMonotoneBreaks)
        ));
        assert!(matches!(
            manual_interval(&grid(0, 10), &[6.0, 5.0]),
            Err(Error::NonMonotoneBreaks)
        ));
    }

    #[test]
    fn unclassed_positions() {
        let s = FeatureSeries::from_values(&[2.0, 4.0, 6.0]);
        let r = unclassed(&s).unwrap();
        assert_eq!(r.extents, vec![2.0, 6.0]);
        assert_eq!(
            r.unclassed_positions,
            Some(vec![Some(0.0), Some(0.5), Some(1.0)])
        );

        let affine = unclassed(&s.map_values(|v| 2.0 * v + 3.0)).unwrap();
        assert_eq!(affine.unclassed_positions, r.unclassed_positions);
    }
}
