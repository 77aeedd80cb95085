//! Methods driven by summary statistics: quantiles, percentiles, box-plot
//! hinges and standard-deviation offsets.

use super::{check_bin_count, degenerate, Prepared};
use crate::error::{Error, Result};
use crate::result::{midpoint, BinningResult};
use crate::series::FeatureSeries;
use crate::spec::{MethodId, MethodSpec, StdDevStep};

/// Quantile of sorted data at `p = num / den` by inclusive linear
/// interpolation (`h = (n - 1) p + 1`). The position is computed in
/// integers so `p = i / k` never suffers rounding.
pub fn quantile_of_sorted(sorted: &[f64], num: usize, den: usize) -> f64 {
    debug_assert!(!sorted.is_empty() && num <= den && den > 0);
    let pos = (sorted.len() - 1) * num;
    let (lo, rem) = (pos / den, pos % den);
    if rem == 0 {
        sorted[lo]
    } else {
        let frac = rem as f64 / den as f64;
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Candidate {
    /// An order-statistic break; on collision it moves up past tied values.
    OrderStatistic(f64),
    /// A fence value; dropped when it leaves the open data range or collides.
    Fence(f64),
}

/// Makes candidate breaks strictly increasing inside `(min, max)`.
///
/// An order-statistic break that lands on or below the previous extent sits
/// on a run of tied values; it is moved to the midpoint between that extent
/// and the next larger data value, keeping the tie together in the lower bin.
/// One landing on the maximum moves below the top value instead.
fn normalize(p: &Prepared, candidates: &[Candidate], notes: &mut Vec<String>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(candidates.len());
    for &cand in candidates {
        let prev = out.last().copied().unwrap_or(p.min);
        match cand {
            Candidate::Fence(b) => {
                if b <= p.min || b >= p.max {
                    notes.push(format!(
                        "Clamped: break {b} lies outside the data range and was removed"
                    ));
                } else if b <= prev {
                    notes.push(format!(
                        "Deduplicated: break {b} coincides with a lower break and was removed"
                    ));
                } else {
                    out.push(b);
                }
            }
            Candidate::OrderStatistic(b) => {
                let placed = if b <= prev {
                    p.next_above(prev).map(|next| midpoint(prev, next))
                } else if b >= p.max {
                    p.next_below(p.max)
                        .map(|below| midpoint(below.max(prev), p.max))
                } else {
                    Some(b)
                };
                match placed {
                    Some(v) if v > prev && v < p.max => {
                        if v != b {
                            notes.push(format!(
                                "Adjusted: break {b} moved to {v} to keep tied values together"
                            ));
                        }
                        out.push(v);
                    }
                    _ => notes.push(format!(
                        "Deduplicated: break {b} collapses onto tied values and was removed"
                    )),
                }
            }
        }
    }
    out
}

pub fn quantile(series: &FeatureSeries, k: usize) -> Result<BinningResult> {
    check_bin_count(k)?;
    let spec = MethodSpec::with_bins(MethodId::Quantile, k);
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let candidates: Vec<Candidate> = (1..k)
        .map(|i| Candidate::OrderStatistic(quantile_of_sorted(&p.sorted, i, k)))
        .collect();
    let mut notes = vec![];
    let breaks = normalize(&p, &candidates, &mut notes);
    BinningResult::from_extents(spec, series, p.extents_with(breaks), notes)
}

/// Six bins split at the 1st, 10th, 50th, 90th and 99th percentiles.
pub fn percentile(series: &FeatureSeries) -> Result<BinningResult> {
    let spec = MethodSpec::new(MethodId::Percentile);
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let candidates: Vec<Candidate> = [1, 10, 50, 90, 99]
        .iter()
        .map(|&pct| Candidate::OrderStatistic(quantile_of_sorted(&p.sorted, pct, 100)))
        .collect();
    let mut notes = vec![];
    let breaks = normalize(&p, &candidates, &mut notes);
    BinningResult::from_extents(spec, series, p.extents_with(breaks), notes)
}

/// Six bins split at the lower fence, the three quartiles and the upper
/// fence, with fences at `factor * IQR` beyond the outer quartiles.
pub fn box_plot(series: &FeatureSeries, iqr_factor: f64) -> Result<BinningResult> {
    if !(iqr_factor.is_finite() && iqr_factor > 0.0) {
        return Err(Error::InvalidIqrFactor(iqr_factor));
    }
    let spec = MethodSpec {
        iqr_factor: Some(iqr_factor),
        ..MethodSpec::new(MethodId::BoxPlot)
    };
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let q1 = quantile_of_sorted(&p.sorted, 1, 4);
    let q2 = quantile_of_sorted(&p.sorted, 2, 4);
    let q3 = quantile_of_sorted(&p.sorted, 3, 4);
    let iqr = q3 - q1;
    let candidates = [
        Candidate::Fence(q1 - iqr_factor * iqr),
        Candidate::OrderStatistic(q1),
        Candidate::OrderStatistic(q2),
        Candidate::OrderStatistic(q3),
        Candidate::Fence(q3 + iqr_factor * iqr),
    ];
    let mut notes = vec![];
    let breaks = normalize(&p, &candidates, &mut notes);
    BinningResult::from_extents(spec, series, p.extents_with(breaks), notes)
}

/// Breaks at fixed multiples of the (population) standard deviation around
/// the mean. Even `k` puts a break on the mean; odd `k` centers a bin on it.
pub fn std_deviation(series: &FeatureSeries, k: usize, step: StdDevStep) -> Result<BinningResult> {
    if k < 2 {
        return Err(Error::InvalidBinCount(k));
    }
    check_bin_count(k)?;
    let spec = MethodSpec {
        std_dev_step: Some(step),
        ..MethodSpec::with_bins(MethodId::StdDeviation, k)
    };
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let n = p.sorted.len() as f64;
    let mean = p.sorted.iter().sum::<f64>() / n;
    let sigma = (p.sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let s = step.multiplier();
    let offsets: Vec<f64> = if k.is_multiple_of(2) {
        let half = (k / 2 - 1) as i64;
        (-half..=half).map(|m| m as f64).collect()
    } else {
        let half = ((k - 1) / 2) as i64;
        (-half..half).map(|m| m as f64 + 0.5).collect()
    };
    let candidates: Vec<Candidate> = offsets
        .iter()
        .map(|m| Candidate::Fence(mean + m * s * sigma))
        .collect();
    let mut notes = vec![];
    let breaks = normalize(&p, &candidates, &mut notes);
    BinningResult::from_extents(spec, series, p.extents_with(breaks), notes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: i32, hi: i32) -> FeatureSeries {
        FeatureSeries::from_values(&(lo..=hi).map(f64::from).collect::<Vec<_>>())
    }

    fn approx_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn quantile_one_to_ten() {
        let r = quantile(&grid(1, 10), 5).unwrap();
        assert!(
            approx_eq(r.breaks(), &[2.8, 4.6, 6.4, 8.2], 1e-12),
            "{:?}",
            r.breaks()
        );
        assert_eq!(r.bin_sizes, vec![2, 2, 2, 2, 2]);
        assert_eq!(quantile(&grid(1, 10), 1).unwrap().extents, vec![1.0, 10.0]);
    }

    #[test]
    fn quantile_with_duplicate_dominated_break() {
        let s = FeatureSeries::from_values(&[1.0, 1.0, 1.0, 1.0, 2.0]);
        let r = quantile(&s, 2).unwrap();
        // h = 3 lands on the tied value 1, which is also the minimum
        assert_eq!(r.extents, vec![1.0, 1.5, 2.0]);
        assert_eq!(r.bin_sizes, vec![4, 1]);
        assert!(r.notes.iter().any(|n| n.starts_with("Adjusted")));
    }

    #[test]
    fn quantile_break_on_the_maximum_moves_below_it() {
        let s = FeatureSeries::from_values(&[1.0, 2.0, 2.0, 2.0, 2.0]);
        let r = quantile(&s, 2).unwrap();
        assert_eq!(r.extents, vec![1.0, 1.5, 2.0]);
        assert_eq!(r.bin_sizes, vec![1, 4]);
    }

    #[test]
    fn percentile_on_uniform_grid() {
        let r = percentile(&grid(0, 999)).unwrap();
        assert_eq!(r.bin_count(), 6);
        assert!(
            approx_eq(r.breaks(), &[9.99, 99.9, 499.5, 899.1, 989.01], 1e-9),
            "{:?}",
            r.breaks()
        );
    }

    #[test]
    fn percentile_constant_series_is_degenerate() {
        let r = percentile(&FeatureSeries::from_values(&[3.0, 3.0])).unwrap();
        assert_eq!(r.bin_count(), 1);
    }

    #[test]
    fn box_plot_one_to_eight_drops_both_fences() {
        let r = box_plot(&grid(1, 8), 1.5).unwrap();
        assert_eq!(r.breaks(), &[2.75, 4.5, 6.25]);
        assert_eq!(r.bin_count(), 4);
        assert_eq!(
            r.notes.iter().filter(|n| n.starts_with("Clamped")).count(),
            2
        );
    }

    #[test]
    fn box_plot_with_outliers_has_six_bins() {
        let mut v: Vec<f64> = (0..40).map(|i| 10.0 + i as f64 * 0.25).collect();
        v.extend([-50.0, 80.0]);
        let r = box_plot(&FeatureSeries::from_values(&v), 1.5).unwrap();
        assert_eq!(r.bin_count(), 6);
        assert!(r.notes.is_empty());
    }

    #[test]
    fn box_plot_fences_approach_quartiles() {
        let mut v: Vec<f64> = (0..21).map(f64::from).collect();
        v.extend([-100.0, 120.0]);
        let r = box_plot(&FeatureSeries::from_values(&v), 1e-6).unwrap();
        let b = r.breaks();
        assert!((b[1] - b[0]) < 1e-4 && (b[4] - b[3]) < 1e-4);
        assert!(matches!(
            box_plot(&grid(1, 8), 0.0),
            Err(Error::InvalidIqrFactor(_))
        ));
    }

    #[test]
    fn std_deviation_symmetric_breaks() {
        // mean 0, population sigma 1
        let s = FeatureSeries::from_values(&[-3.0, -1.0, -1.0, -1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 3.0]);
        let sigma = (s.sorted_valid().iter().map(|v| v * v).sum::<f64>() / 10.0).sqrt();
        assert!((sigma - 1.5491933384829668).abs() < 1e-12);
        let scaled = s.map_values(|v| v / sigma);
        let r = std_deviation(&scaled, 4, StdDevStep::Whole).unwrap();
        assert!(
            approx_eq(r.breaks(), &[-1.0, 0.0, 1.0], 1e-12),
            "{:?}",
            r.breaks()
        );
        let r = std_deviation(&scaled, 4, StdDevStep::Half).unwrap();
        assert!(approx_eq(r.breaks(), &[-0.5, 0.0, 0.5], 1e-12));
        let r = std_deviation(&scaled, 3, StdDevStep::Whole).unwrap();
        assert!(approx_eq(r.breaks(), &[-0.5, 0.5], 1e-12));
        assert!(matches!(
            std_deviation(&scaled, 1, StdDevStep::Whole),
            Err(Error::InvalidBinCount(1))
        ));
    }

    #[test]
    fn std_deviation_drops_breaks_outside_range() {
        let s = FeatureSeries::from_values(&[0.0, 1.0, 2.0]);
        // sigma = 0.816..; k = 8 asks for mean +- 3 sigma
        let r = std_deviation(&s, 8, StdDevStep::Whole).unwrap();
        assert_eq!(r.bin_count(), 4);
        assert_eq!(r.notes.len(), 4);
    }
}
