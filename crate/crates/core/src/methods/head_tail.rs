use super::{degenerate, Prepared};
use crate::error::{Error, Result};
use crate::result::BinningResult;
use crate::series::FeatureSeries;
use crate::spec::{MethodId, MethodSpec};

/// Recursive mean splits for heavy-tailed data.
///
/// Each round takes the mean of the current subset as a break and recurses
/// into the values above it, as long as that head stays a minority (its
/// share of the subset below `threshold`). The bin count emerges from the
/// data.
pub fn head_tail_breaks(series: &FeatureSeries, threshold: f64) -> Result<BinningResult> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let spec = MethodSpec {
        head_tail_threshold: Some(threshold),
        ..MethodSpec::new(MethodId::HeadTailBreaks)
    };
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let mut breaks = Vec::new();
    let mut subset: &[f64] = &p.sorted;
    loop {
        let mean = subset.iter().sum::<f64>() / subset.len() as f64;
        let head_start = subset.partition_point(|&v| v <= mean);
        let head = &subset[head_start..];
        if head.is_empty() || (head.len() as f64) >= threshold * subset.len() as f64 {
            break;
        }
        breaks.push(mean);
        if head.len() <= 1 {
            break;
        }
        subset = head;
    }
    BinningResult::from_extents(spec, series, p.extents_with(breaks), vec![])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_outlier_stops_after_one_split() {
        let s = FeatureSeries::from_values(&[1.0, 1.0, 1.0, 1.0, 10.0]);
        let r = head_tail_breaks(&s, 0.4).unwrap();
        assert_eq!(r.breaks(), &[2.8]);
        assert_eq!(r.bin_sizes, vec![4, 1]);
    }

    #[test]
    fn uniform_data_halts_before_first_split() {
        let s = FeatureSeries::from_values(&(1..=10).map(f64::from).collect::<Vec<_>>());
        let r = head_tail_breaks(&s, 0.4).unwrap();
        assert!(r.breaks().is_empty());
        assert_eq!(r.bin_count(), 1);
    }

    #[test]
    fn power_law_ranks_give_decreasing_bins() {
        let v: Vec<f64> = (1..=200).map(|i| (i as f64).powi(-2)).collect();
        let r = head_tail_breaks(&FeatureSeries::from_values(&v), 0.4).unwrap();
        assert!(r.bin_count() >= 3, "{:?}", r.extents);
        assert!(
            r.bin_sizes.windows(2).all(|w| w[0] > w[1]),
            "{:?}",
            r.bin_sizes
        );
    }

    #[test]
    fn threshold_must_be_open_unit_interval() {
        let s = FeatureSeries::from_values(&[1.0, 2.0]);
        assert!(matches!(
            head_tail_breaks(&s, 0.0),
            Err(Error::InvalidThreshold(_))
        ));
        assert!(matches!(
            head_tail_breaks(&s, 1.0),
            Err(Error::InvalidThreshold(_))
        ));
    }
}
