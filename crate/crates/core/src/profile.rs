//! Summary statistics, histogram and kernel density estimate of a series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::methods::quantile_of_sorted;
use crate::result::bin_of;
use crate::series::FeatureSeries;

/// Number of points at which the density is evaluated.
pub const KDE_POINTS: usize = 512;
/// Bandwidths below this fraction of the range are raised to it.
pub const KDE_BANDWIDTH_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kde {
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    pub densities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Profile {
    pub attribute: String,
    pub count: usize,
    pub valid_count: usize,
    pub missing_count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Population standard deviation.
    pub std_dev: f64,
    /// Population skewness; zero when the values are constant.
    pub skewness: f64,
    pub histogram: Histogram,
    pub kde: Kde,
}

/// Profiles the valid values of `series`. `include_missing` only changes the
/// reported counts.
pub fn profile(
    series: &FeatureSeries,
    histogram_bins: usize,
    include_missing: bool,
) -> Result<Profile> {
    if histogram_bins == 0 {
        return Err(Error::InvalidBinCount(0));
    }
    let sorted = series.sorted_valid();
    if sorted.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = sorted.len() as f64;
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let mean = sorted.iter().sum::<f64>() / n;
    let (m2, m3) = sorted.iter().fold((0.0, 0.0), |(a, b), &v| {
        let d = v - mean;
        (a + d * d, b + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    let std_dev = m2.sqrt();
    let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
    let missing = if include_missing {
        series.missing_count()
    } else {
        0
    };
    Ok(Profile {
        attribute: series.attribute_name().to_string(),
        count: sorted.len() + missing,
        valid_count: sorted.len(),
        missing_count: missing,
        min,
        max,
        mean,
        median: quantile_of_sorted(&sorted, 1, 2),
        std_dev,
        skewness,
        histogram: histogram(&sorted, histogram_bins),
        kde: kde(&sorted, std_dev),
    })
}

fn histogram(sorted: &[f64], bins: usize) -> Histogram {
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let width = if max > min {
        (max - min) / bins as f64
    } else {
        1.0 / bins as f64
    };
    let mut edges: Vec<f64> = (0..bins).map(|j| min + width * j as f64).collect();
    edges.push(if max > min { max } else { min + 1.0 });
    let mut counts = vec![0; bins];
    for &v in sorted {
        counts[bin_of(&edges, v) - 1] += 1;
    }
    Histogram { edges, counts }
}

/// Gaussian kernel with Silverman's rule-of-thumb bandwidth on a grid that
/// reaches four bandwidths beyond the data.
fn kde(sorted: &[f64], std_dev: f64) -> Kde {
    let n = sorted.len() as f64;
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let iqr = quantile_of_sorted(sorted, 3, 4) - quantile_of_sorted(sorted, 1, 4);
    let spread = if iqr > 0.0 {
        std_dev.min(iqr / 1.34)
    } else {
        std_dev
    };
    let floor = KDE_BANDWIDTH_FLOOR * (max - min).max(min.abs()).max(1.0);
    let bandwidth = (0.9 * spread * n.powf(-0.2)).max(floor);
    let (lo, hi) = (min - 4.0 * bandwidth, max + 4.0 * bandwidth);
    let step = (hi - lo) / (KDE_POINTS - 1) as f64;
    let norm = 1.0 / (n * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let grid: Vec<f64> = (0..KDE_POINTS).map(|i| lo + step * i as f64).collect();
    let densities = grid
        .iter()
        .map(|&x| {
            // only values within 8 bandwidths contribute measurably
            let from = sorted.partition_point(|&v| v < x - 8.0 * bandwidth);
            let to = sorted.partition_point(|&v| v <= x + 8.0 * bandwidth);
            sorted[from..to]
                .iter()
                .map(|&v| {
                    let z = (x - v) / bandwidth;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect();
    Kde {
        bandwidth,
        grid,
        densities,
    }
}
