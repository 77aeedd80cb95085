//! CSV attributes, GeoJSON geometry and the join between them.

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::series::FeatureSeries;

/// Cell contents read as missing, compared case-insensitively after trimming.
pub const MISSING_TOKENS: [&str; 4] = ["", "na", "nan", "null"];

fn parse_cell(cell: &str) -> std::result::Result<Option<f64>, String> {
    let t = cell.trim();
    if MISSING_TOKENS.iter().any(|m| t.eq_ignore_ascii_case(m)) {
        return Ok(None);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Ok(None),
        Err(_) => Err(format!("'{t}' is not a number")),
    }
}

/// Numeric columns of a CSV keyed by the id column, in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeTable {
    pub id_column: String,
    pub ids: Vec<String>,
    pub columns: IndexMap<String, Vec<Option<f64>>>,
}

impl AttributeTable {
    pub fn column(&self, name: &str) -> Result<&[Option<f64>]> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn attribute_names(&self) -> Vec<&str> {
        self.columns.keys().map(String::as_str).collect()
    }

    /// The column as a series over the table's own rows.
    pub fn series(&self, name: &str) -> Result<FeatureSeries> {
        FeatureSeries::new(self.ids.clone(), self.column(name)?.to_vec(), name)
    }
}

/// Reads a CSV with a header row. `value_column`, when given, must exist and
/// every cell of it must be numeric or a missing token; other columns are
/// kept only when they are entirely numeric.
pub fn parse_attributes(
    bytes: &[u8],
    id_column: &str,
    value_column: Option<&str>,
) -> Result<AttributeTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| Error::UnparseableRow {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let position = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let id_at = position(id_column)?;
    let value_at = value_column.map(position).transpose()?;

    let mut ids = Vec::new();
    let mut seen = IndexSet::new();
    let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::new(); headers.len()];
    let mut numeric = vec![true; headers.len()];
    for record in reader.records() {
        let record = record.map_err(|e| Error::UnparseableRow {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let id = record[id_at].trim().to_string();
        if id.is_empty() {
            return Err(Error::UnparseableRow {
                line,
                message: format!("empty '{id_column}'"),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        ids.push(id);
        for (c, cell) in record.iter().enumerate() {
            if c == id_at || !numeric[c] {
                continue;
            }
            match parse_cell(cell) {
                Ok(v) => cells[c].push(v),
                Err(message) if Some(c) == value_at => {
                    return Err(Error::UnparseableRow {
                        line,
                        message: format!("column '{}': {message}", &headers[c]),
                    })
                }
                Err(_) => numeric[c] = false,
            }
        }
    }
    let columns = headers
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != id_at && numeric[c])
        .map(|(c, h)| (h.trim().to_string(), std::mem::take(&mut cells[c])))
        .collect();
    Ok(AttributeTable {
        id_column: id_column.to_string(),
        ids,
        columns,
    })
}

/// Polygon features of a GeoJSON FeatureCollection with their ids.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryCollection {
    pub id_property: String,
    pub ids: Vec<String>,
    /// The original feature objects, untouched.
    pub features: Vec<Value>,
}

impl GeometryCollection {
    pub fn to_feature_collection(&self) -> Value {
        serde_json::json!({"type": "FeatureCollection", "features": self.features})
    }
}

fn id_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Parses a FeatureCollection of Polygon or MultiPolygon features, each
/// carrying its id in `properties[id_property]`.
pub fn parse_geometry(bytes: &[u8], id_property: &str) -> Result<GeometryCollection> {
    let doc: Value =
        serde_json::from_slice(bytes).map_err(|e| Error::InvalidGeoJson(e.to_string()))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::InvalidGeoJson(
            "top-level object must be a FeatureCollection".into(),
        ));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidGeoJson("'features' must be an array".into()))?;
    let mut ids = Vec::with_capacity(features.len());
    let mut seen = IndexSet::new();
    for (index, f) in features.iter().enumerate() {
        if f.get("type").and_then(Value::as_str) != Some("Feature") {
            return Err(Error::InvalidGeoJson(format!(
                "feature {index} is not a Feature"
            )));
        }
        let kind = f.pointer("/geometry/type").and_then(Value::as_str);
        if !matches!(kind, Some("Polygon" | "MultiPolygon")) {
            return Err(Error::InvalidGeoJson(format!(
                "feature {index} must have Polygon or MultiPolygon geometry"
            )));
        }
        if f.pointer("/geometry/coordinates")
            .and_then(Value::as_array)
            .is_none()
        {
            return Err(Error::InvalidGeoJson(format!(
                "feature {index} has no coordinates"
            )));
        }
        let id = f
            .get("properties")
            .and_then(|p| p.get(id_property))
            .and_then(id_text)
            .ok_or_else(|| Error::MissingIdProperty {
                index,
                property: id_property.to_string(),
            })?;
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        ids.push(id);
    }
    Ok(GeometryCollection {
        id_property: id_property.to_string(),
        ids,
        features: features.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JoinReport {
    pub matched: usize,
    pub unmatched_geometry_ids: Vec<String>,
    pub unmatched_attribute_ids: Vec<String>,
}

/// Attributes joined to geometry. Without geometry the attribute rows are
/// the features.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub id: String,
    pub geometry: Option<GeometryCollection>,
    pub attributes: AttributeTable,
    pub join_report: JoinReport,
}

/// Joins on feature id. Geometry without attributes stays on the map with
/// missing values; attribute rows without geometry are reported and dropped.
pub fn join(
    id: impl Into<String>,
    geometry: GeometryCollection,
    attributes: AttributeTable,
) -> Result<Dataset> {
    let rows: IndexSet<&str> = attributes.ids.iter().map(String::as_str).collect();
    let shapes: IndexSet<&str> = geometry.ids.iter().map(String::as_str).collect();
    let matched = geometry
        .ids
        .iter()
        .filter(|g| rows.contains(g.as_str()))
        .count();
    if matched == 0 {
        return Err(Error::EmptyJoin);
    }
    let join_report = JoinReport {
        matched,
        unmatched_geometry_ids: geometry
            .ids
            .iter()
            .filter(|g| !rows.contains(g.as_str()))
            .cloned()
            .collect(),
        unmatched_attribute_ids: attributes
            .ids
            .iter()
            .filter(|a| !shapes.contains(a.as_str()))
            .cloned()
            .collect(),
    };
    Ok(Dataset {
        id: id.into(),
        geometry: Some(geometry),
        attributes,
        join_report,
    })
}

impl Dataset {
    pub fn from_attributes(id: impl Into<String>, attributes: AttributeTable) -> Self {
        let join_report = JoinReport {
            matched: attributes.ids.len(),
            unmatched_geometry_ids: vec![],
            unmatched_attribute_ids: vec![],
        };
        Dataset {
            id: id.into(),
            geometry: None,
            attributes,
            join_report,
        }
    }

    /// One attribute over the dataset's features: the geometry ids when
    /// geometry is present, the attribute rows otherwise.
    pub fn series(&self, attribute: &str) -> Result<FeatureSeries> {
        let column = self.attributes.column(attribute)?;
        let Some(geometry) = &self.geometry else {
            return self.attributes.series(attribute);
        };
        let rows: IndexMap<&str, usize> = self
            .attributes
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let values = geometry
            .ids
            .iter()
            .map(|g| rows.get(g.as_str()).and_then(|&i| column[i]))
            .collect();
        FeatureSeries::new(geometry.ids.clone(), values, attribute)
    }
}
