//! The joined attribute vector every method consumes.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Region identifiers aligned with one numeric attribute.
///
/// Missing values are kept in place (so ids stay aligned) and flagged in the
/// mask; their slot in `values` holds `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSeries {
    feature_ids: Vec<String>,
    values: Vec<f64>,
    missing_mask: Vec<bool>,
    attribute_name: String,
    units: Option<String>,
}

impl FeatureSeries {
    /// Builds a series; `None` and non-finite entries are treated as missing.
    pub fn new(
        feature_ids: Vec<String>,
        values: Vec<Option<f64>>,
        attribute_name: impl Into<String>,
    ) -> Result<Self> {
        if feature_ids.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} ids but {} values",
                feature_ids.len(),
                values.len()
            )));
        }
        let mut seen = HashSet::with_capacity(feature_ids.len());
        for id in &feature_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let missing_mask: Vec<bool> = values
            .iter()
            .map(|v| !matches!(v, Some(x) if x.is_finite()))
            .collect();
        let values = values
            .into_iter()
            .zip(&missing_mask)
            .map(|(v, &m)| if m { f64::NAN } else { v.unwrap_or(f64::NAN) })
            .collect();
        Ok(FeatureSeries {
            feature_ids,
            values,
            missing_mask,
            attribute_name: attribute_name.into(),
            units: None,
        })
    }

    /// Convenience constructor with ids `"0"`, `"1"`, ...
    pub fn from_values(values: &[f64]) -> Self {
        let ids = (0..values.len()).map(|i| i.to_string()).collect();
        let vals = values.iter().map(|&v| Some(v)).collect();
        FeatureSeries::new(ids, vals, "value").expect("generated ids are unique")
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = Some(units.into());
        self
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    /// Raw values; missing entries are `NaN`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn missing_mask(&self) -> &[bool] {
        &self.missing_mask
    }

    pub fn attribute_name(&self) -> &str {
        &self.attribute_name
    }

    pub fn units(&self) -> Option<&str> {
        self.units.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, i: usize) -> Option<f64> {
        if self.missing_mask[i] {
            None
        } else {
            Some(self.values[i])
        }
    }

    pub fn valid_count(&self) -> usize {
        self.missing_mask.iter().filter(|m| !**m).count()
    }

    pub fn missing_count(&self) -> usize {
        self.len() - self.valid_count()
    }

    pub fn position(&self, feature_id: &str) -> Option<usize> {
        self.feature_ids.iter().position(|id| id == feature_id)
    }

    /// Iterator over `(position, value)` for non-missing entries.
    pub fn valid(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.missing_mask)
            .enumerate()
            .filter(|(_, (_, m))| !**m)
            .map(|(i, (v, _))| (i, *v))
    }

    /// Non-missing values in ascending order.
    pub fn sorted_valid(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.valid().map(|(_, v)| v).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `(min, max)` over valid values.
    pub fn range(&self) -> Result<(f64, f64)> {
        let mut it = self.valid().map(|(_, v)| v);
        let first = it.next().ok_or(Error::EmptySeries)?;
        Ok(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// Returns a copy with every valid value mapped through `f`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> FeatureSeries {
        let mut out = self.clone();
        for (v, m) in out.values.iter_mut().zip(&out.missing_mask) {
            if !*m {
                *v = f(*v);
            }
        }
        out
    }
}
