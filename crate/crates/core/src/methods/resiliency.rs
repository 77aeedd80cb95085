use super::{degenerate, Prepared};
use crate::consensus::{build_matrix, member_specs};
use crate::error::{Error, Result};
use crate::reclassify::CustomMethodStore;
use crate::result::{midpoint, BinningResult};
use crate::series::FeatureSeries;
use crate::spec::{MethodId, MethodSpec};

/// The eight members of the Combine view; all of them have six bins at k = 6.
pub const SIX_BIN_MEMBERS: [MethodId; 8] = [
    MethodId::EqualInterval,
    MethodId::Quantile,
    MethodId::MaximumBreaks,
    MethodId::NaturalBreaks,
    MethodId::Ckmeans,
    MethodId::GeometricInterval,
    MethodId::BoxPlot,
    MethodId::Percentile,
];

/// Default members for bin count `k`: the eight Combine-view methods at
/// k = 6, otherwise the six of them whose bin count is configurable.
pub fn default_members(k: usize) -> Vec<MethodId> {
    SIX_BIN_MEMBERS
        .iter()
        .filter(|m| k == 6 || m.fixed_bin_count().is_none())
        .cloned()
        .collect()
}

/// Consensus binning: every feature takes its majority bin across the
/// members, and breaks are placed where that majority bin steps up along
/// the sorted values. A step over several bins leaves the skipped ones
/// empty. A majority bin lower than one already seen is merged into the
/// current run.
pub fn resiliency(
    series: &FeatureSeries,
    members: &[MethodId],
    k: usize,
    customs: &CustomMethodStore,
) -> Result<BinningResult> {
    if members.len() < 2 {
        return Err(Error::TooFewMethods(members.len()));
    }
    let spec = MethodSpec {
        member_methods: Some(members.to_vec()),
        ..MethodSpec::with_bins(MethodId::Resiliency, k)
    };
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let matrix = build_matrix(series, &member_specs(members, k), k, customs)?;

    let mut order: Vec<usize> = (0..matrix.values.len()).collect();
    order.sort_by(|&a, &b| matrix.values[a].total_cmp(&matrix.values[b]));

    let mut breaks = Vec::new();
    let mut merged = 0usize;
    let mut label = matrix.majority_bin[order[0]];
    for pair in order.windows(2) {
        let (prev, cur) = (pair[0], pair[1]);
        let m = matrix.majority_bin[cur];
        if m > label {
            // a jump over bins nobody voted for keeps them as empty bins
            let (lo, hi) = (matrix.values[prev], matrix.values[cur]);
            let mid = midpoint(lo, hi);
            let steps = m - label;
            for j in 0..steps {
                breaks.push(mid + (hi - mid) * j as f64 / steps as f64);
            }
            label = m;
        } else if m < label {
            merged += 1;
        }
    }
    let mut notes = vec![];
    if merged > 0 {
        notes.push(format!(
            "Merged: {merged} feature(s) whose majority bin falls below an earlier run were kept in that run"
        ));
    }
    BinningResult::from_extents(spec, series, p.extents_with(breaks), notes)
}
