//! Bin extents, assignment semantics and the universal result type.
//!
//! Bins are right-open, `[e(j-1), e(j))`, except the top bin which also
//! holds values equal to the upper extent.

use indexmap::IndexMap;
use serde::de::Deserializer;
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::FeatureSeries;
use crate::spec::MethodSpec;

/// Relative width given to the single bin of a constant series.
pub const DEGENERATE_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BinningResult {
    pub method: MethodSpec,
    pub feature_ids: Vec<String>,
    pub extents: Vec<f64>,
    pub bin_sizes: Vec<usize>,
    /// 1-based bin per feature; `None` for missing values.
    pub assignments: Vec<Option<usize>>,
    /// Normalized positions in `[0, 1]`, only for the unclassed method.
    pub unclassed_positions: Option<Vec<Option<f64>>>,
    pub notes: Vec<String>,
}

impl BinningResult {
    /// Assigns every feature of `series` against `extents`.
    pub fn from_extents(
        method: MethodSpec,
        series: &FeatureSeries,
        extents: Vec<f64>,
        mut notes: Vec<String>,
    ) -> Result<Self> {
        let assigned = assign(series, &extents)?;
        if assigned.out_of_range > 0 {
            notes.push(format!(
                "OutOfRange: {} value(s) outside [{}, {}] clamped to the nearest extreme bin",
                assigned.out_of_range,
                extents[0],
                extents[extents.len() - 1]
            ));
        }
        Ok(BinningResult {
            method,
            feature_ids: series.feature_ids().to_vec(),
            extents,
            bin_sizes: assigned.bin_sizes,
            assignments: assigned.assignments,
            unclassed_positions: None,
            notes,
        })
    }

    pub fn bin_count(&self) -> usize {
        self.extents.len() - 1
    }

    /// Interior breaks, without the outer extents.
    pub fn breaks(&self) -> &[f64] {
        &self.extents[1..self.extents.len() - 1]
    }

    /// Width of every bin.
    pub fn intervals(&self) -> Vec<f64> {
        self.extents.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn valid_count(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_some()).count()
    }

    pub fn assignment_of(&self, feature_id: &str) -> Option<usize> {
        self.feature_ids
            .iter()
            .position(|id| id == feature_id)
            .and_then(|i| self.assignments[i])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub assignments: Vec<Option<usize>>,
    pub bin_sizes: Vec<usize>,
    /// Values that fell outside the extents and were clamped.
    pub out_of_range: usize,
}

pub fn check_extents(extents: &[f64]) -> Result<()> {
    if extents.len() < 2
        || extents.iter().any(|e| !e.is_finite())
        || extents.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::NonMonotoneExtents);
    }
    Ok(())
}

/// Bin index (1-based) of `v`, clamped into `1..=k`.
pub fn bin_of(extents: &[f64], v: f64) -> usize {
    let k = extents.len() - 1;
    extents.partition_point(|&e| e <= v).clamp(1, k)
}

pub fn assign(series: &FeatureSeries, extents: &[f64]) -> Result<Assignment> {
    check_extents(extents)?;
    if series.valid_count() == 0 {
        return Err(Error::EmptySeries);
    }
    let k = extents.len() - 1;
    let (lo, hi) = (extents[0], extents[k]);
    let mut bin_sizes = vec![0; k];
    let mut out_of_range = 0;
    let assignments = (0..series.len())
        .map(|i| {
            series.value(i).map(|v| {
                if v < lo || v > hi {
                    out_of_range += 1;
                }
                let b = bin_of(extents, v);
                bin_sizes[b - 1] += 1;
                b
            })
        })
        .collect();
    Ok(Assignment {
        assignments,
        bin_sizes,
        out_of_range,
    })
}

/// A point strictly between `a < b` such that `a` falls below it and `b`
/// at or above it under right-open assignment.
pub fn midpoint(a: f64, b: f64) -> f64 {
    debug_assert!(a < b);
    let m = a + (b - a) / 2.0;
    if m > a {
        m
    } else {
        b
    }
}

/// Extents of the single bin used for a constant series.
pub fn degenerate_extents(v: f64) -> Vec<f64> {
    vec![v, v + v.abs().max(1.0) * DEGENERATE_WIDTH]
}

pub(crate) const DEGENERATE_NOTE: &str =
    "Degenerate: all valid values are equal; a single bin is used";

impl Serialize for BinningResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct ById<'a, T: Serialize>(&'a [String], &'a [T]);
        impl<T: Serialize> Serialize for ById<'_, T> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (id, v) in self.0.iter().zip(self.1) {
                    map.serialize_entry(id, v)?;
                }
                map.end()
            }
        }

        let len = if self.unclassed_positions.is_some() {
            6
        } else {
            5
        };
        let mut map = s.serialize_map(Some(len))?;
        map.serialize_entry("method", &self.method)?;
        map.serialize_entry("extents", &self.extents)?;
        map.serialize_entry("binSizes", &self.bin_sizes)?;
        map.serialize_entry("assignments", &ById(&self.feature_ids, &self.assignments))?;
        if let Some(pos) = &self.unclassed_positions {
            map.serialize_entry("unclassedPositions", &ById(&self.feature_ids, pos))?;
        }
        map.serialize_entry("notes", &self.notes)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for BinningResult {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(rename_all = "camelCase")]
        struct Raw {
            method: MethodSpec,
            extents: Vec<f64>,
            bin_sizes: Vec<usize>,
            assignments: IndexMap<String, Option<usize>>,
            #[serde(default)]
            unclassed_positions: Option<IndexMap<String, Option<f64>>>,
            #[serde(default)]
            notes: Vec<String>,
        }
        let raw = Raw::deserialize(d)?;
        let (feature_ids, assignments): (Vec<_>, Vec<_>) = raw.assignments.into_iter().unzip();
        let unclassed_positions = match raw.unclassed_positions {
            Some(pos) => {
                if pos.keys().ne(feature_ids.iter()) {
                    return Err(serde::de::Error::custom(
                        "unclassedPositions keys differ from assignments keys",
                    ));
                }
                Some(pos.into_values().collect())
            }
            None => None,
        };
        Ok(BinningResult {
            method: raw.method,
            feature_ids,
            extents: raw.extents,
            bin_sizes: raw.bin_sizes,
            assignments,
            unclassed_positions,
            notes: raw.notes,
        })
    }
}
