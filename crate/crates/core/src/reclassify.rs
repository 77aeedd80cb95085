//! Manual break editing, paint-mode pins and the custom-method store.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::{DateTime, Utc};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::result::{assign, check_extents};
use crate::series::FeatureSeries;
use crate::spec::MethodId;

/// Shown wherever paint mode is offered.
pub const MISUSE_WARNING: &str = "We recommend using this feature only for educational purposes.";

pub fn misuse_warning() -> &'static str {
    MISUSE_WARNING
}

/// One change to a list of extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum BreakEdit {
    Add { value: f64 },
    Remove { index: usize },
    Set { index: usize, value: f64 },
}

/// Applies `edit` and returns the new extents. Outer extents can be moved
/// with `Set` but never removed.
pub fn edit_breaks(extents: &[f64], edit: BreakEdit) -> Result<Vec<f64>> {
    check_extents(extents)?;
    let k = extents.len() - 1;
    let mut out = extents.to_vec();
    match edit {
        BreakEdit::Add { value } => {
            if !value.is_finite() {
                return Err(Error::NonMonotoneResult);
            }
            let at = extents.partition_point(|&e| e < value);
            if at == 0 || at > k || extents[at] == value {
                return Err(Error::NonMonotoneResult);
            }
            out.insert(at, value);
        }
        BreakEdit::Remove { index } => {
            if index > k {
                return Err(Error::IndexOutOfRange(index));
            }
            if index == 0 || index == k {
                return Err(Error::CannotRemoveOuterExtent);
            }
            out.remove(index);
        }
        BreakEdit::Set { index, value } => {
            if index > k {
                return Err(Error::IndexOutOfRange(index));
            }
            out[index] = value;
            if check_extents(&out).is_err() {
                return Err(Error::NonMonotoneResult);
            }
        }
    }
    Ok(out)
}

/// Forces a feature (by id) or a raw value into `target_bin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PinConstraint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub target_bin: usize,
}

impl PinConstraint {
    pub fn value(value: f64, target_bin: usize) -> Self {
        PinConstraint {
            feature_id: None,
            value: Some(value),
            target_bin,
        }
    }

    pub fn feature(id: impl Into<String>, target_bin: usize) -> Self {
        PinConstraint {
            feature_id: Some(id.into()),
            value: None,
            target_bin,
        }
    }

    /// The value this pin refers to. A feature id takes precedence over a
    /// raw value.
    pub fn resolve(&self, series: &FeatureSeries) -> Result<f64> {
        match (&self.feature_id, self.value) {
            (Some(id), _) => {
                let i = series
                    .position(id)
                    .ok_or_else(|| Error::UnknownFeature(id.clone()))?;
                series.value(i).ok_or_else(|| {
                    Error::InvalidRequest(format!("feature '{id}' has a missing value"))
                })
            }
            (None, Some(v)) if v.is_finite() => Ok(v),
            (None, Some(v)) => Err(Error::InvalidRequest(format!(
                "pin value {v} is not finite"
            ))),
            (None, None) => Err(Error::InvalidRequest(
                "a pin needs a featureId or a value".into(),
            )),
        }
    }
}

/// Extents after painting plus notes about bins left empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaintOutcome {
    pub extents: Vec<f64>,
    pub notes: Vec<String>,
}

/// Relative gap kept between neighbouring breaks after repair.
pub const PIN_SEPARATION: f64 = 1e-9;

/// Moves interior breaks so that every pinned value lands in its target bin.
///
/// The bin count and the outer extents stay fixed. Break `i` must end up in
/// the window `(L, U]`, where `L` is the largest pinned value targeting a bin
/// at or below `i` and `U` the smallest one targeting a bin above it. Breaks
/// already inside their window are left alone; the others go halfway from
/// the lower bound to the nearer of `U` and the next original break.
pub fn apply_pins(
    extents: &[f64],
    constraints: &[PinConstraint],
    series: &FeatureSeries,
) -> Result<PaintOutcome> {
    check_extents(extents)?;
    let k = extents.len() - 1;
    let (e0, ek) = (extents[0], extents[k]);

    let mut pins = Vec::with_capacity(constraints.len());
    for c in constraints {
        if c.target_bin == 0 || c.target_bin > k {
            return Err(Error::TargetOutOfRange {
                target: c.target_bin,
                bins: k,
            });
        }
        pins.push((c.resolve(series)?, c.target_bin));
    }
    pins.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for w in pins.windows(2) {
        let ((v1, t1), (v2, t2)) = (w[0], w[1]);
        if v1 == v2 && t1 != t2 {
            return Err(Error::InfeasibleConstraints(format!(
                "value {v1} is pinned to bins {t1} and {t2}"
            )));
        }
        if t2 < t1 {
            return Err(Error::InfeasibleConstraints(format!(
                "value {v1} is pinned to bin {t1} but the larger value {v2} to bin {t2}"
            )));
        }
    }

    let window = |i: usize| {
        let lower = pins
            .iter()
            .filter(|p| p.1 <= i)
            .map(|p| p.0)
            .fold(e0, f64::max);
        let upper = pins
            .iter()
            .filter(|p| p.1 > i)
            .map(|p| p.0)
            .fold(ek, f64::min);
        (lower, upper)
    };
    let windows: Vec<(f64, f64)> = (1..k).map(window).collect();
    for (i, &(lower, upper)) in (1..k).zip(&windows) {
        if lower >= upper {
            return Err(Error::InfeasibleConstraints(format!(
                "break {i} would need to lie in ({lower}, {upper}] inside extents [{e0}, {ek}]"
            )));
        }
    }

    let mut out = extents.to_vec();
    for (i, &(lower, upper)) in (1..k).zip(&windows) {
        let e = extents[i];
        if lower < e && e <= upper {
            continue;
        }
        let base = lower.max(out[i - 1]);
        let next = extents[extents.partition_point(|&x| x <= lower).min(k)];
        let hi = upper.min(next);
        out[i] = base + (hi - base) / 2.0;
    }

    let sep = PIN_SEPARATION * (ek - e0);
    for (i, &(lower, upper)) in (1..k).zip(&windows) {
        if out[i] < out[i - 1] + sep {
            out[i] = out[i - 1] + sep;
        }
        if !(lower < out[i] && out[i] <= upper) || out[i] >= ek {
            return Err(Error::ConflictingConstraints(format!(
                "break {i} cannot stay inside ({lower}, {upper}] while keeping the breaks increasing"
            )));
        }
    }

    let sizes = assign(series, &out)?.bin_sizes;
    let notes = sizes
        .iter()
        .enumerate()
        .filter(|(_, &n)| n == 0)
        .map(|(j, _)| format!("EmptyBin: bin {} has no features after painting", j + 1))
        .collect();
    Ok(PaintOutcome {
        extents: out,
        notes,
    })
}

/// Where a custom method came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_method_id: Option<MethodId>,
    #[serde(default)]
    pub constraint_log: Vec<PinConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CustomMethod {
    pub name: String,
    pub extents: Vec<f64>,
    pub provenance: Provenance,
    pub created_at: DateTime<Utc>,
}

#[derive(Serialize, Deserialize)]
struct StoreFile {
    methods: Vec<CustomMethod>,
}

/// Saved custom methods, optionally backed by a JSON file that is replaced
/// atomically on every write.
#[derive(Debug, Default)]
pub struct CustomMethodStore {
    methods: RwLock<IndexMap<String, CustomMethod>>,
    path: Option<PathBuf>,
}

impl CustomMethodStore {
    /// An empty in-memory store.
    pub fn new() -> Self {
        Self::default()
    }

    /// Opens the store at `path`, loading it if the file exists.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut methods = IndexMap::new();
        if path.exists() {
            let file: StoreFile = serde_json::from_slice(&std::fs::read(&path)?)?;
            for m in file.methods {
                methods.insert(m.name.clone(), m);
            }
        }
        Ok(CustomMethodStore {
            methods: RwLock::new(methods),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, name: &str) -> Option<CustomMethod> {
        self.methods.read().unwrap().get(name).cloned()
    }

    pub fn list(&self) -> Vec<CustomMethod> {
        self.methods.read().unwrap().values().cloned().collect()
    }

    pub fn save(
        &self,
        name: &str,
        extents: Vec<f64>,
        provenance: Provenance,
    ) -> Result<CustomMethod> {
        self.save_at(name, extents, provenance, Utc::now())
    }

    /// Like [`save`](Self::save) with an explicit timestamp.
    pub fn save_at(
        &self,
        name: &str,
        extents: Vec<f64>,
        provenance: Provenance,
        created_at: DateTime<Utc>,
    ) -> Result<CustomMethod> {
        if name.trim().is_empty() {
            return Err(Error::InvalidName("name must not be empty".into()));
        }
        if check_extents(&extents).is_err() {
            return Err(Error::InvalidExtents(
                "need at least two finite, strictly increasing extents".into(),
            ));
        }
        let mut methods = self.methods.write().unwrap();
        if methods.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        let method = CustomMethod {
            name: name.to_string(),
            extents,
            provenance,
            // millisecond precision so the stored document reloads unchanged
            created_at: DateTime::from_timestamp_millis(created_at.timestamp_millis())
                .unwrap_or(created_at),
        };
        methods.insert(name.to_string(), method.clone());
        if let Err(e) = self.persist(&methods) {
            methods.shift_remove(name);
            return Err(e);
        }
        Ok(method)
    }

    pub fn delete(&self, name: &str) -> Result<CustomMethod> {
        let mut methods = self.methods.write().unwrap();
        let removed = methods
            .shift_remove(name)
            .ok_or_else(|| Error::UnknownMethod(MethodId::Custom(name.to_string()).to_string()))?;
        if let Err(e) = self.persist(&methods) {
            methods.insert(name.to_string(), removed);
            return Err(e);
        }
        Ok(removed)
    }

    fn persist(&self, methods: &IndexMap<String, CustomMethod>) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let doc = StoreFile {
            methods: methods.values().cloned().collect(),
        };
        write_atomic(path, &serde_json::to_vec_pretty(&doc)?)
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it over.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
