//! Per-feature bin vectors across several methods and their majority vote.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::methods::run_method;
use crate::reclassify::CustomMethodStore;
use crate::result::BinningResult;
use crate::series::FeatureSeries;
use crate::spec::{MethodId, MethodSpec};

/// Bin ids of every valid feature under every member method.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusMatrix {
    pub feature_ids: Vec<String>,
    /// Value of each row's feature, kept for the resiliency run scan.
    pub values: Vec<f64>,
    pub member_method_ids: Vec<MethodId>,
    /// `bin_matrix[feature][method]`, 1-based.
    pub bin_matrix: Vec<Vec<usize>>,
    pub majority_bin: Vec<usize>,
    pub majority_frequency: Vec<usize>,
}

/// Most frequent entry of `row` and its count; ties go to the lowest bin id.
pub fn majority(row: &[usize]) -> (usize, usize) {
    let top = row.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; top + 1];
    for &b in row {
        counts[b] += 1;
    }
    let mut best = (0, 0);
    for (bin, &count) in counts.iter().enumerate() {
        if count > best.1 {
            best = (bin, count);
        }
    }
    best
}

impl ConsensusMatrix {
    /// Assembles a matrix from member results over the same series. Every
    /// member must have exactly `k` bins.
    pub fn from_results(
        series: &FeatureSeries,
        members: &[BinningResult],
        k: usize,
    ) -> Result<Self> {
        for r in members {
            if r.bin_count() != k {
                return Err(Error::BinCountMismatch {
                    method: r.method.method_id.to_string(),
                    expected: k,
                    actual: r.bin_count(),
                });
            }
            if r.feature_ids.as_slice() != series.feature_ids() {
                return Err(Error::MismatchedInputs(format!(
                    "{} was computed over a different series",
                    r.method.method_id
                )));
            }
        }
        let mut feature_ids = Vec::new();
        let mut values = Vec::new();
        let mut bin_matrix = Vec::new();
        for (i, v) in series.valid() {
            feature_ids.push(series.feature_ids()[i].clone());
            values.push(v);
            bin_matrix.push(
                members
                    .iter()
                    .map(|r| r.assignments[i].expect("valid values are always assigned"))
                    .collect::<Vec<_>>(),
            );
        }
        let (majority_bin, majority_frequency) = bin_matrix.iter().map(|row| majority(row)).unzip();
        Ok(ConsensusMatrix {
            feature_ids,
            values,
            member_method_ids: members.iter().map(|r| r.method.method_id.clone()).collect(),
            bin_matrix,
            majority_bin,
            majority_frequency,
        })
    }

    pub fn method_count(&self) -> usize {
        self.member_method_ids.len()
    }

    pub fn row(&self, feature_id: &str) -> Option<usize> {
        self.feature_ids.iter().position(|id| id == feature_id)
    }
}

/// Member specs with the shared bin count filled in where unset.
pub fn member_specs(members: &[MethodId], k: usize) -> Vec<MethodSpec> {
    members
        .iter()
        .map(|id| MethodSpec::with_bins(id.clone(), k))
        .collect()
}

/// Runs every member over `series` and collects their bin ids.
pub fn build_matrix(
    series: &FeatureSeries,
    members: &[MethodSpec],
    k: usize,
    customs: &CustomMethodStore,
) -> Result<ConsensusMatrix> {
    use rayon::prelude::*;
    let results = members
        .par_iter()
        .map(|spec| {
            let mut spec = spec.clone();
            spec.bin_count.get_or_insert(k);
            run_method(series, &spec, customs)
        })
        .collect::<Result<Vec<_>>>()?;
    ConsensusMatrix::from_results(series, &results, k)
}

/// Hue and opacity of one feature in the value-by-alpha map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaColor {
    pub color: String,
    pub alpha: f64,
}

/// Colors each feature by its majority bin with opacity equal to the share
/// of methods that agree on it.
pub fn value_by_alpha(
    matrix: &ConsensusMatrix,
    palette: &[String],
    k: usize,
) -> Result<Vec<AlphaColor>> {
    if palette.len() < k {
        return Err(Error::PaletteTooSmall {
            needed: k,
            available: palette.len(),
        });
    }
    let n = matrix.method_count() as f64;
    Ok(matrix
        .majority_bin
        .iter()
        .zip(&matrix.majority_frequency)
        .map(|(&bin, &freq)| AlphaColor {
            color: palette[bin - 1].clone(),
            alpha: freq as f64 / n,
        })
        .collect())
}

impl Serialize for ConsensusMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Row<'a> {
            bins: &'a [usize],
            majority_bin: usize,
            majority_frequency: usize,
        }
        struct Features<'a>(&'a ConsensusMatrix);
        impl Serialize for Features<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let m = self.0;
                let mut map = s.serialize_map(Some(m.feature_ids.len()))?;
                for (i, id) in m.feature_ids.iter().enumerate() {
                    map.serialize_entry(
                        id,
                        &Row {
                            bins: &m.bin_matrix[i],
                            majority_bin: m.majority_bin[i],
                            majority_frequency: m.majority_frequency[i],
                        },
                    )?;
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("methods", &self.member_method_ids)?;
        map.serialize_entry("features", &Features(self))?;
        map.end()
    }
}
