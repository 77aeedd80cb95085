//! Request and response bodies shared by the command line and the HTTP
//! service. Both front-ends call these functions and write the returned
//! text unchanged, so the same request gives the same bytes everywhere.

use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::consensus::{build_matrix, member_specs, ConsensusMatrix};
use crate::data::{join, parse_attributes, parse_geometry, Dataset, JoinReport};
use crate::error::{Error, ErrorKind, Result};
use crate::export::{export_result, ExportContext, ExportOptions, ExportTarget};
use crate::methods::{
    catalog, custom_descriptor, default_members, resiliency, run_all, run_method, MethodDescriptor,
};
use crate::palette::{Flags, Palette, PaletteFilter, PaletteStore, ScaleType};
use crate::profile::{profile, Profile};
use crate::reclassify::{
    apply_pins, misuse_warning, write_atomic, CustomMethod, CustomMethodStore, PinConstraint,
    Provenance,
};
use crate::result::BinningResult;
use crate::series::FeatureSeries;
use crate::spec::{MethodId, MethodSpec};

/// Bin count used by combine requests that give none; every default member
/// method has six bins at this count.
pub const DEFAULT_COMBINE_BINS: usize = 6;
pub const DEFAULT_HISTOGRAM_BINS: usize = 20;

/// Pretty-printed JSON with a trailing newline.
pub fn to_body<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// A response body and its media type.
#[derive(Debug, Clone, PartialEq)]
pub struct Payload {
    pub content_type: &'static str,
    pub body: String,
}

impl Payload {
    fn json(body: String) -> Self {
        Payload {
            content_type: "application/json",
            body,
        }
    }
}

/// Error body: `{code, message, details}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    pub details: Value,
}

impl ApiError {
    pub fn status(kind: ErrorKind) -> u16 {
        match kind {
            ErrorKind::Input => 400,
            ErrorKind::Conflict => 409,
            ErrorKind::Infeasible => 422,
            ErrorKind::Internal => 500,
        }
    }
}

impl From<&Error> for ApiError {
    fn from(e: &Error) -> Self {
        let details = match e {
            Error::UnparseableRow { line, .. } => json!({"line": line}),
            Error::BinCountMismatch {
                method,
                expected,
                actual,
            } => json!({"method": method, "expected": expected, "actual": actual}),
            Error::TargetOutOfRange { target, bins } => json!({"target": target, "bins": bins}),
            Error::MissingIdProperty { index, property } => {
                json!({"index": index, "property": property})
            }
            Error::BinCountExceedsPalette {
                palette,
                requested,
                capacity,
            } => json!({"palette": palette, "requested": requested, "capacity": capacity}),
            Error::NotEnoughDistinctValues { needed, found } => {
                json!({"needed": needed, "found": found})
            }
            Error::KExceedsDistinct { k, distinct } => json!({"k": k, "distinct": distinct}),
            _ => Value::Null,
        };
        ApiError {
            code: e.code().to_string(),
            message: e.to_string(),
            details,
        }
    }
}

/// How an uploaded dataset is read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UploadConfig {
    #[serde(default)]
    pub dataset_id: Option<String>,
    pub id_column: String,
    #[serde(default)]
    pub value_column: Option<String>,
    /// GeoJSON property holding the feature id; defaults to `id_column`.
    #[serde(default)]
    pub id_property: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetUpload {
    pub config: UploadConfig,
    pub attributes: Vec<u8>,
    pub geometry: Option<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UploadResponse {
    pub dataset_id: String,
    pub attributes: Vec<String>,
    pub join_report: JoinReport,
    pub profile: Profile,
}

fn check_dataset_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidName(format!(
            "dataset id '{id}' may only use letters, digits, '-', '_' and '.'"
        )))
    }
}

fn content_id(upload: &DatasetUpload) -> String {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    upload.attributes.hash(&mut h);
    upload.geometry.hash(&mut h);
    upload.config.id_column.hash(&mut h);
    format!("ds-{:016x}", h.finish())
}

/// Uploaded datasets by id. Uploads replace entries whole, so readers always
/// see either the old or the new dataset.
#[derive(Debug, Default)]
pub struct DatasetRegistry {
    entries: RwLock<IndexMap<String, Arc<Dataset>>>,
    dir: Option<PathBuf>,
}

const CONFIG_FILE: &str = "config.json";
const ATTRIBUTES_FILE: &str = "attributes.csv";
const GEOMETRY_FILE: &str = "geometry.geojson";

impl DatasetRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Opens a directory-backed registry and reloads every stored upload.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        let registry = DatasetRegistry {
            entries: RwLock::default(),
            dir: Some(dir.clone()),
        };
        let mut subdirs: Vec<PathBuf> = std::fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join(CONFIG_FILE).is_file())
            .collect();
        subdirs.sort();
        for sub in subdirs {
            let config: UploadConfig =
                serde_json::from_slice(&std::fs::read(sub.join(CONFIG_FILE))?)?;
            let geometry_path = sub.join(GEOMETRY_FILE);
            let upload = DatasetUpload {
                config,
                attributes: std::fs::read(sub.join(ATTRIBUTES_FILE))?,
                geometry: if geometry_path.is_file() {
                    Some(std::fs::read(geometry_path)?)
                } else {
                    None
                },
            };
            let (dataset, _) = Self::build(&upload)?;
            registry
                .entries
                .write()
                .unwrap()
                .insert(dataset.id.clone(), Arc::new(dataset));
        }
        Ok(registry)
    }

    fn build(upload: &DatasetUpload) -> Result<(Dataset, String)> {
        let c = &upload.config;
        let id = match &c.dataset_id {
            Some(id) => id.clone(),
            None => content_id(upload),
        };
        check_dataset_id(&id)?;
        let table = parse_attributes(&upload.attributes, &c.id_column, c.value_column.as_deref())?;
        let attribute = match &c.value_column {
            Some(v) => v.clone(),
            None => table
                .attribute_names()
                .first()
                .map(|s| s.to_string())
                .ok_or_else(|| {
                    Error::InvalidRequest("the attribute table has no numeric column".into())
                })?,
        };
        let dataset = match &upload.geometry {
            Some(bytes) => {
                let property = c.id_property.as_deref().unwrap_or(&c.id_column);
                join(id, parse_geometry(bytes, property)?, table)?
            }
            None => Dataset::from_attributes(id, table),
        };
        Ok((dataset, attribute))
    }

    /// Parses, joins, stores and profiles an upload.
    pub fn upload(&self, upload: &DatasetUpload) -> Result<UploadResponse> {
        let (dataset, attribute) = Self::build(upload)?;
        let profile = profile(&dataset.series(&attribute)?, DEFAULT_HISTOGRAM_BINS, true)?;
        if let Some(dir) = &self.dir {
            let sub = dir.join(&dataset.id);
            std::fs::create_dir_all(&sub)?;
            let config = UploadConfig {
                dataset_id: Some(dataset.id.clone()),
                ..upload.config.clone()
            };
            write_atomic(&sub.join(ATTRIBUTES_FILE), &upload.attributes)?;
            match &upload.geometry {
                Some(g) => write_atomic(&sub.join(GEOMETRY_FILE), g)?,
                None => {
                    let _ = std::fs::remove_file(sub.join(GEOMETRY_FILE));
                }
            }
            write_atomic(&sub.join(CONFIG_FILE), &serde_json::to_vec_pretty(&config)?)?;
        }
        let response = UploadResponse {
            dataset_id: dataset.id.clone(),
            attributes: dataset
                .attributes
                .attribute_names()
                .iter()
                .map(|s| s.to_string())
                .collect(),
            join_report: dataset.join_report.clone(),
            profile,
        };
        self.insert(dataset);
        Ok(response)
    }

    pub fn insert(&self, dataset: Dataset) {
        self.entries
            .write()
            .unwrap()
            .insert(dataset.id.clone(), Arc::new(dataset));
    }

    pub fn get(&self, id: &str) -> Result<Arc<Dataset>> {
        self.entries
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownDataset(id.to_string()))
    }

    pub fn ids(&self) -> Vec<String> {
        self.entries.read().unwrap().keys().cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BinRequest {
    pub dataset_id: String,
    pub attribute: String,
    pub spec: MethodSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BinAllRequest {
    pub dataset_id: String,
    pub attribute: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defined_interval_size: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompareRequest {
    pub dataset_id: String,
    pub attribute: String,
    pub methods: Vec<MethodSpec>,
    /// Applied to every method spec that has no bin count of its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_count: Option<usize>,
}

/// Bin count, widths and sizes of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompareRow {
    pub method: MethodId,
    pub bin_count: usize,
    pub extents: Vec<f64>,
    pub intervals: Vec<f64>,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompareTable {
    pub attribute: String,
    pub valid_count: usize,
    pub rows: Vec<CompareRow>,
}

impl CompareTable {
    pub fn from_results(series: &FeatureSeries, results: &[BinningResult]) -> Self {
        CompareTable {
            attribute: series.attribute_name().to_string(),
            valid_count: series.valid_count(),
            rows: results
                .iter()
                .map(|r| CompareRow {
                    method: r.method.method_id.clone(),
                    bin_count: r.bin_count(),
                    extents: r.extents.clone(),
                    intervals: r.intervals(),
                    sizes: r.bin_sizes.clone(),
                })
                .collect(),
        }
    }

    /// One line per bin: `method,bin,lower,upper,interval,size`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,bin,lower,upper,interval,size\n");
        for row in &self.rows {
            for j in 0..row.bin_count {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.method,
                    j + 1,
                    row.extents[j],
                    row.extents[j + 1],
                    row.intervals[j],
                    row.sizes[j]
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CombineRequest {
    pub dataset_id: String,
    pub attribute: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<MethodId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombineResponse {
    pub matrix: ConsensusMatrix,
    pub resiliency: BinningResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PaintRequest {
    pub dataset_id: String,
    pub attribute: String,
    pub extents: Vec<f64>,
    pub constraints: Vec<PinConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaintResponse {
    pub extents: Vec<f64>,
    pub warning: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExportRequest {
    pub dataset_id: String,
    pub attribute: String,
    pub spec: MethodSpec,
    pub target: ExportTarget,
    #[serde(default)]
    pub options: ExportOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SaveCustomRequest {
    pub name: String,
    pub extents: Vec<f64>,
    #[serde(default)]
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AddPaletteRequest {
    pub name: String,
    pub colors: Vec<String>,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default = "default_scale_type")]
    pub scale_type: ScaleType,
}

fn default_scale_type() -> ScaleType {
    ScaleType::Categorical
}

/// Datasets, saved custom methods and palettes, plus every operation the
/// front-ends expose.
#[derive(Debug, Default)]
pub struct Workbench {
    pub datasets: DatasetRegistry,
    pub customs: CustomMethodStore,
    pub palettes: PaletteStore,
}

impl Workbench {
    /// Everything in memory.
    pub fn new() -> Self {
        Self::default()
    }

    /// Everything persisted below `dir` and reloaded from it.
    pub fn open(dir: &Path) -> Result<Self> {
        Ok(Workbench {
            datasets: DatasetRegistry::open(dir.join("datasets"))?,
            customs: CustomMethodStore::open(dir.join("custom_methods.json"))?,
            palettes: PaletteStore::open(dir.join("palettes.json"))?,
        })
    }

    pub fn series(&self, dataset_id: &str, attribute: &str) -> Result<FeatureSeries> {
        self.datasets.get(dataset_id)?.series(attribute)
    }

    pub fn upload(&self, upload: &DatasetUpload) -> Result<String> {
        to_body(&self.datasets.upload(upload)?)
    }

    pub fn profile(
        &self,
        dataset_id: &str,
        attribute: &str,
        bins: usize,
        include_missing: bool,
    ) -> Result<String> {
        to_body(&profile(
            &self.series(dataset_id, attribute)?,
            bins,
            include_missing,
        )?)
    }

    /// Built-in descriptors followed by saved custom methods.
    pub fn methods(&self) -> Result<String> {
        let mut all: Vec<MethodDescriptor> = catalog();
        all.extend(
            self.customs
                .list()
                .iter()
                .map(|m| custom_descriptor(&m.name)),
        );
        to_body(&all)
    }

    pub fn bin_result(&self, req: &BinRequest) -> Result<BinningResult> {
        run_method(
            &self.series(&req.dataset_id, &req.attribute)?,
            &req.spec,
            &self.customs,
        )
    }

    pub fn bin(&self, req: &BinRequest) -> Result<String> {
        to_body(&self.bin_result(req)?)
    }

    /// All sixteen built-in methods keyed by method id; a method that fails
    /// on this data gets an error body in its slot.
    pub fn bin_all(&self, req: &BinAllRequest) -> Result<String> {
        let series = self.series(&req.dataset_id, &req.attribute)?;
        let base = MethodSpec {
            bin_count: req.bin_count,
            defined_interval_size: req.defined_interval_size,
            ..MethodSpec::new(MethodId::EqualInterval)
        };
        let mut out = serde_json::Map::new();
        for (id, result) in run_all(&series, &base, &self.customs) {
            let value = match result {
                Ok(r) => serde_json::to_value(&r)?,
                Err(e) => json!({"error": ApiError::from(&e)}),
            };
            out.insert(id.to_string(), value);
        }
        to_body(&out)
    }

    pub fn compare_table(&self, req: &CompareRequest) -> Result<CompareTable> {
        let series = self.series(&req.dataset_id, &req.attribute)?;
        let results = req
            .methods
            .iter()
            .map(|spec| {
                let mut spec = spec.clone();
                if spec.bin_count.is_none() {
                    spec.bin_count = req.bin_count;
                }
                run_method(&series, &spec, &self.customs)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompareTable::from_results(&series, &results))
    }

    pub fn compare(&self, req: &CompareRequest, format: TableFormat) -> Result<Payload> {
        let table = self.compare_table(req)?;
        Ok(match format {
            TableFormat::Json => Payload::json(to_body(&table)?),
            TableFormat::Csv => Payload {
                content_type: "text/csv; charset=utf-8",
                body: table.to_csv(),
            },
        })
    }

    pub fn combine_response(&self, req: &CombineRequest) -> Result<CombineResponse> {
        let series = self.series(&req.dataset_id, &req.attribute)?;
        let k = req.k.unwrap_or(DEFAULT_COMBINE_BINS);
        let members = req.members.clone().unwrap_or_else(|| default_members(k));
        let matrix = build_matrix(&series, &member_specs(&members, k), k, &self.customs)?;
        let resiliency = resiliency(&series, &members, k, &self.customs)?;
        Ok(CombineResponse { matrix, resiliency })
    }

    pub fn combine(&self, req: &CombineRequest) -> Result<String> {
        to_body(&self.combine_response(req)?)
    }

    pub fn paint(&self, req: &PaintRequest) -> Result<String> {
        let series = self.series(&req.dataset_id, &req.attribute)?;
        let outcome = apply_pins(&req.extents, &req.constraints, &series)?;
        to_body(&PaintResponse {
            extents: outcome.extents,
            warning: misuse_warning().to_string(),
            notes: outcome.notes,
        })
    }

    pub fn export(&self, req: &ExportRequest) -> Result<Payload> {
        let dataset = self.datasets.get(&req.dataset_id)?;
        let series = dataset.series(&req.attribute)?;
        let result = run_method(&series, &req.spec, &self.customs)?;
        let palette = self.palettes.get(&req.options.palette)?;
        let ctx = ExportContext {
            series: &series,
            geometry: dataset.geometry.as_ref(),
            palette: &palette,
        };
        Ok(Payload {
            content_type: req.target.content_type(),
            body: export_result(&result, req.target, &ctx, &req.options)?,
        })
    }

    pub fn list_custom(&self) -> Result<String> {
        to_body(&self.customs.list())
    }

    pub fn save_custom(&self, req: &SaveCustomRequest) -> Result<CustomMethod> {
        self.customs
            .save(&req.name, req.extents.clone(), req.provenance.clone())
    }

    pub fn delete_custom(&self, name: &str) -> Result<CustomMethod> {
        self.customs.delete(name)
    }

    pub fn palettes(&self, filter: &PaletteFilter) -> Result<String> {
        to_body(&self.palettes.list(filter))
    }

    pub fn add_palette(&self, req: &AddPaletteRequest) -> Result<Palette> {
        self.palettes
            .add_custom(&req.name, &req.colors, req.flags, req.scale_type)
    }
}
