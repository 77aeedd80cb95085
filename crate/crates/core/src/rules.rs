//! Jenks and Coulson's rules for class intervals, as a lint pass over a result.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::result::bin_of;
use crate::series::FeatureSeries;
use crate::spec::MethodId;
use crate::BinningResult;

/// Largest ratio between the fullest and the emptiest non-empty bin that is
/// still considered balanced.
pub const DEFAULT_BALANCE_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule")]
pub enum RuleViolation {
    /// Some valid value lies outside the outer extents.
    RangeNotCovered {
        min: f64,
        max: f64,
        lower: f64,
        upper: f64,
    },
    /// Bin `bin` (1-based) holds no feature.
    VacantBin { bin: usize },
    /// Extents are not strictly increasing.
    OverlappingExtents,
    /// Non-empty bin sizes differ by more than the threshold ratio.
    UnbalancedBins { ratio: f64, threshold: f64 },
    /// Breaks were chosen by hand rather than derived from the data.
    ArbitraryBreaks,
}

impl RuleViolation {
    pub fn name(&self) -> &'static str {
        match self {
            RuleViolation::RangeNotCovered { .. } => "RangeNotCovered",
            RuleViolation::VacantBin { .. } => "VacantBin",
            RuleViolation::OverlappingExtents => "OverlappingExtents",
            RuleViolation::UnbalancedBins { .. } => "UnbalancedBins",
            RuleViolation::ArbitraryBreaks => "ArbitraryBreaks",
        }
    }
}

/// Checks `result` against the rules with the default balance threshold.
pub fn validate_rules(
    result: &BinningResult,
    series: &FeatureSeries,
) -> Result<Vec<RuleViolation>> {
    validate_rules_with(result, series, DEFAULT_BALANCE_THRESHOLD)
}

pub fn validate_rules_with(
    result: &BinningResult,
    series: &FeatureSeries,
    balance_threshold: f64,
) -> Result<Vec<RuleViolation>> {
    check_derived(result, series)?;
    let mut out = Vec::new();
    let e = &result.extents;
    let (lower, upper) = (e[0], e[e.len() - 1]);
    let (min, max) = series.range()?;
    if min < lower || max > upper {
        out.push(RuleViolation::RangeNotCovered {
            min,
            max,
            lower,
            upper,
        });
    }
    if e.windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        out.push(RuleViolation::OverlappingExtents);
    }
    let classed = result.method.method_id != MethodId::Unclassed;
    if classed {
        for (j, &n) in result.bin_sizes.iter().enumerate() {
            if n == 0 {
                out.push(RuleViolation::VacantBin { bin: j + 1 });
            }
        }
        let filled = result.bin_sizes.iter().copied().filter(|&n| n > 0);
        let (lo, hi) = filled.fold((usize::MAX, 0), |(lo, hi), n| (lo.min(n), hi.max(n)));
        if hi > 0 {
            let ratio = hi as f64 / lo as f64;
            if ratio > balance_threshold {
                out.push(RuleViolation::UnbalancedBins {
                    ratio,
                    threshold: balance_threshold,
                });
            }
        }
    }
    if matches!(
        result.method.method_id,
        MethodId::ManualInterval | MethodId::Custom(_)
    ) {
        out.push(RuleViolation::ArbitraryBreaks);
    }
    Ok(out)
}

/// The result must cover the same features, leave exactly the missing ones
/// unassigned and have bin sizes matching its assignments.
fn check_derived(result: &BinningResult, series: &FeatureSeries) -> Result<()> {
    let mismatch = |why: &str| Err(Error::MismatchedInputs(why.to_string()));
    if result.feature_ids.as_slice() != series.feature_ids() {
        return mismatch("feature ids differ");
    }
    if result.extents.len() < 2 || result.bin_sizes.len() != result.extents.len() - 1 {
        return mismatch("bin sizes do not match the extents");
    }
    let mut sizes = vec![0usize; result.bin_sizes.len()];
    for (i, a) in result.assignments.iter().enumerate() {
        match (series.value(i), a) {
            (Some(_), Some(b)) if (1..=sizes.len()).contains(b) => sizes[b - 1] += 1,
            (None, None) => {}
            _ => return mismatch("assignments do not follow the series' missing values"),
        }
    }
    if sizes != result.bin_sizes {
        return mismatch("bin sizes do not match the assignments");
    }
    let ordered = result.extents.windows(2).all(|w| w[0] < w[1]);
    if ordered {
        for (i, v) in series.valid() {
            if result.assignments[i] != Some(bin_of(&result.extents, v)) {
                return mismatch("assignments do not follow the extents");
            }
        }
    }
    Ok(())
}
