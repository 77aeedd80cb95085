//! Exact optimal 1-D partitions minimizing the sum of squared deviations
//! from class means (SDCM).
//!
//! Both solvers run on the distinct sorted values weighted by multiplicity,
//! so equal values never straddle a break. They share the segment cost but
//! fill the dynamic program differently:
//!
//! * [`natural_breaks`] evaluates every split point, `O(k m^2)` time.
//! * [`ckmeans`] exploits the monotonicity of optimal split points with a
//!   divide-and-conquer fill, `O(k m log m)` time.
//!
//! Both pick the lowest optimal split on ties, so their outputs coincide.

use super::{check_bin_count, degenerate, Prepared};
use crate::error::{Error, Result};
use crate::result::{midpoint, BinningResult};
use crate::series::FeatureSeries;
use crate::spec::{MethodId, MethodSpec};

/// Upper bound on distinct values for the quadratic solver. The backtrack
/// table holds `k * m` `u32`s (at most 400 MB for k = 1000, m = 100 000).
pub const MAX_DISTINCT_FOR_DP: usize = 100_000;

/// Distinct values with multiplicities and prefix sums for O(1) segment SSE.
struct Segments {
    values: Vec<f64>,
    weight: Vec<f64>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Segments {
    fn new(sorted: &[f64]) -> Self {
        let mut values: Vec<f64> = Vec::new();
        let mut counts: Vec<f64> = Vec::new();
        for &v in sorted {
            match values.last() {
                Some(&last) if last == v => *counts.last_mut().unwrap() += 1.0,
                _ => {
                    values.push(v);
                    counts.push(1.0);
                }
            }
        }
        // centering keeps the prefix sums small
        let shift = values[values.len() / 2];
        let m = values.len();
        let mut weight = vec![0.0; m + 1];
        let mut sum = vec![0.0; m + 1];
        let mut sum_sq = vec![0.0; m + 1];
        for i in 0..m {
            let x = values[i] - shift;
            weight[i + 1] = weight[i] + counts[i];
            sum[i + 1] = sum[i] + counts[i] * x;
            sum_sq[i + 1] = sum_sq[i] + counts[i] * x * x;
        }
        Segments {
            values,
            weight,
            sum,
            sum_sq,
        }
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    /// SSE of distinct values `j..i` (end exclusive).
    fn cost(&self, j: usize, i: usize) -> f64 {
        let w = self.weight[i] - self.weight[j];
        let s = self.sum[i] - self.sum[j];
        let q = self.sum_sq[i] - self.sum_sq[j];
        (q - s * s / w).max(0.0)
    }

    /// Breaks between groups given the start index of each group after the first.
    fn breaks(&self, starts: &[usize]) -> Vec<f64> {
        starts
            .iter()
            .map(|&s| midpoint(self.values[s - 1], self.values[s]))
            .collect()
    }
}

/// Split table: `split[c][i]` is the start of the last of `c + 1` groups
/// covering the first `i` distinct values.
fn backtrack(split: &[Vec<u32>], m: usize) -> Vec<usize> {
    let k = split.len();
    let mut starts = vec![0; k - 1];
    let mut end = m;
    for c in (1..k).rev() {
        let s = split[c][end] as usize;
        starts[c - 1] = s;
        end = s;
    }
    starts
}

fn prepare(
    series: &FeatureSeries,
    k: usize,
    method: MethodId,
) -> Result<(MethodSpec, Prepared, Option<Segments>)> {
    check_bin_count(k)?;
    let spec = MethodSpec::with_bins(method, k);
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return Ok((spec, p, None));
    }
    let seg = Segments::new(&p.sorted);
    if k > seg.len() {
        return Err(Error::KExceedsDistinct {
            k,
            distinct: seg.len(),
        });
    }
    Ok((spec, p, Some(seg)))
}

pub fn natural_breaks(series: &FeatureSeries, k: usize) -> Result<BinningResult> {
    let (spec, p, seg) = prepare(series, k, MethodId::NaturalBreaks)?;
    let Some(seg) = seg else {
        return degenerate(spec, series, &p);
    };
    let m = seg.len();
    if m > MAX_DISTINCT_FOR_DP {
        return Err(Error::InvalidSeries(format!(
            "natural breaks supports at most {MAX_DISTINCT_FOR_DP} distinct values, got {m}"
        )));
    }
    let mut prev: Vec<f64> = (0..=m)
        .map(|i| if i == 0 { 0.0 } else { seg.cost(0, i) })
        .collect();
    let mut split = vec![vec![0u32; m + 1]];
    for c in 1..k {
        let mut cur = vec![f64::INFINITY; m + 1];
        let mut row = vec![0u32; m + 1];
        for i in (c + 1)..=m {
            let mut best = f64::INFINITY;
            let mut arg = c;
            for (j, &p) in prev.iter().enumerate().take(i).skip(c) {
                let v = p + seg.cost(j, i);
                if v < best {
                    best = v;
                    arg = j;
                }
            }
            cur[i] = best;
            row[i] = arg as u32;
        }
        prev = cur;
        split.push(row);
    }
    let breaks = seg.breaks(&backtrack(&split, m));
    BinningResult::from_extents(spec, series, p.extents_with(breaks), vec![])
}

pub fn ckmeans(series: &FeatureSeries, k: usize) -> Result<BinningResult> {
    let (spec, p, seg) = prepare(series, k, MethodId::Ckmeans)?;
    let Some(seg) = seg else {
        return degenerate(spec, series, &p);
    };
    let m = seg.len();
    let mut prev: Vec<f64> = (0..=m)
        .map(|i| if i == 0 { 0.0 } else { seg.cost(0, i) })
        .collect();
    let mut split = vec![vec![0u32; m + 1]];
    for c in 1..k {
        let mut cur = vec![f64::INFINITY; m + 1];
        let mut row = vec![0u32; m + 1];
        let mut fill = Fill {
            seg: &seg,
            prev: &prev,
            cur: &mut cur,
            row: &mut row,
            min_start: c,
        };
        fill.solve(c + 1, m, c, m - 1);
        prev = cur;
        split.push(row);
    }
    let breaks = seg.breaks(&backtrack(&split, m));
    BinningResult::from_extents(spec, series, p.extents_with(breaks), vec![])
}

struct Fill<'a> {
    seg: &'a Segments,
    prev: &'a [f64],
    cur: &'a mut [f64],
    row: &'a mut [u32],
    min_start: usize,
}

impl Fill<'_> {
    /// Fills ends `lo..=hi` knowing their optimal starts lie in `opt_lo..=opt_hi`.
    fn solve(&mut self, lo: usize, hi: usize, opt_lo: usize, opt_hi: usize) {
        if lo > hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let first = opt_lo.max(self.min_start);
        let last = opt_hi.min(mid - 1);
        let mut best = f64::INFINITY;
        let mut arg = first;
        for j in first..=last {
            let v = self.prev[j] + self.seg.cost(j, mid);
            if v < best {
                best = v;
                arg = j;
            }
        }
        self.cur[mid] = best;
        self.row[mid] = arg as u32;
        if mid > lo {
            self.solve(lo, mid - 1, opt_lo, arg);
        }
        self.solve(mid + 1, hi, arg, opt_hi);
    }
}

/// Breaks at the midpoints of the `k - 1` widest gaps between consecutive
/// distinct values; equal gaps resolve to the leftmost.
pub fn maximum_breaks(series: &FeatureSeries, k: usize) -> Result<BinningResult> {
    if k < 2 {
        return Err(Error::InvalidBinCount(k));
    }
    check_bin_count(k)?;
    let spec = MethodSpec::with_bins(MethodId::MaximumBreaks, k);
    let p = Prepared::new(series)?;
    if p.is_constant() {
        return degenerate(spec, series, &p);
    }
    let mut distinct = p.sorted.clone();
    distinct.dedup();
    if distinct.len() < k {
        return Err(Error::NotEnoughDistinctValues {
            needed: k,
            found: distinct.len(),
        });
    }
    let mut gaps: Vec<usize> = (0..distinct.len() - 1).collect();
    let width = |i: usize| distinct[i + 1] - distinct[i];
    gaps.sort_by(|&a, &b| width(b).total_cmp(&width(a)).then(a.cmp(&b)));
    let mut chosen: Vec<usize> = gaps[..k - 1].to_vec();
    chosen.sort_unstable();
    let breaks = chosen
        .iter()
        .map(|&i| midpoint(distinct[i], distinct[i + 1]))
        .collect();
    BinningResult::from_extents(spec, series, p.extents_with(breaks), vec![])
}
