//! HTTP front-end over the binning workbench.
//!
//! Every handler parses its request, runs the engine off the async runtime
//! and returns the body produced by [`binx_core::api`], the same text the
//! command line writes to files.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::Router;
use binx_core::api::{
    to_body, AddPaletteRequest, ApiError, BinAllRequest, BinRequest, CombineRequest,
    CompareRequest, DatasetUpload, ExportRequest, PaintRequest, Payload, SaveCustomRequest,
    TableFormat, UploadConfig, Workbench, DEFAULT_HISTOGRAM_BINS,
};
use binx_core::palette::{PaletteFilter, ScaleType};
use binx_core::Error;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::limit::RequestBodyLimitLayer;

/// Largest accepted request body.
pub const MAX_BODY_BYTES: usize = 50 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Origins allowed by CORS; empty allows any origin.
    pub cors_origins: Vec<String>,
    pub max_body_bytes: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            cors_origins: vec![],
            max_body_bytes: MAX_BODY_BYTES,
        }
    }
}

type AppState = Arc<Workbench>;

/// An engine error rendered as `{code, message, details}`.
#[derive(Debug)]
pub struct AppError(pub Error);

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        AppError(e)
    }
}

impl IntoResponse for AppError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(ApiError::status(self.0.kind()))
            .unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = to_body(&ApiError::from(&self.0)).unwrap_or_else(|_| "{}\n".to_string());
        (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

type Reply = Result<Response, AppError>;

fn payload(status: StatusCode, p: Payload) -> Response {
    (status, [(header::CONTENT_TYPE, p.content_type)], p.body).into_response()
}

fn json_reply(status: StatusCode, body: String) -> Response {
    payload(
        status,
        Payload {
            content_type: "application/json",
            body,
        },
    )
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, AppError> {
    serde_json::from_slice(body).map_err(|e| AppError(Error::InvalidRequest(e.to_string())))
}

/// Runs engine work on the blocking pool.
async fn blocking<T, F>(f: F) -> Result<T, AppError>
where
    F: FnOnce() -> Result<T, Error> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| AppError(Error::Io(std::io::Error::other(e.to_string()))))?
        .map_err(AppError)
}

async fn healthz() -> Response {
    json_reply(StatusCode::OK, "{\"status\":\"ok\"}\n".to_string())
}

async fn methods(State(wb): State<AppState>) -> Reply {
    Ok(json_reply(StatusCode::OK, wb.methods()?))
}

async fn list_datasets(State(wb): State<AppState>) -> Reply {
    Ok(json_reply(StatusCode::OK, to_body(&wb.datasets.ids())?))
}

fn text_field(name: &str, bytes: &[u8]) -> Result<String, AppError> {
    String::from_utf8(bytes.to_vec())
        .map(|s| s.trim().to_string())
        .map_err(|_| {
            AppError(Error::InvalidRequest(format!(
                "field '{name}' is not UTF-8 text"
            )))
        })
}

/// Multipart upload: `attributes` (CSV) and optional `geometry` (GeoJSON)
/// files, with the column setup either as a JSON `config` field or as the
/// separate text fields `datasetId`, `idColumn`, `valueColumn`, `idProperty`.
async fn upload_dataset(State(wb): State<AppState>, mut form: Multipart) -> Reply {
    let bad = |e: axum::extract::multipart::MultipartError| {
        AppError(Error::InvalidRequest(e.body_text()))
    };
    let mut attributes = None;
    let mut geometry = None;
    let mut config: Option<UploadConfig> = None;
    let mut fields = std::collections::HashMap::new();
    while let Some(field) = form.next_field().await.map_err(bad)? {
        let name = field.name().unwrap_or_default().to_string();
        let bytes = field.bytes().await.map_err(bad)?;
        match name.as_str() {
            "attributes" => attributes = Some(bytes.to_vec()),
            "geometry" => geometry = Some(bytes.to_vec()),
            "config" => config = Some(parse(&bytes)?),
            "datasetId" | "idColumn" | "valueColumn" | "idProperty" => {
                fields.insert(name.clone(), text_field(&name, &bytes)?);
            }
            other => {
                return Err(AppError(Error::InvalidRequest(format!(
                    "unexpected form field '{other}'"
                ))));
            }
        }
    }
    let mut config = match config {
        Some(c) => c,
        None => UploadConfig {
            dataset_id: None,
            id_column: fields.get("idColumn").cloned().ok_or_else(|| {
                AppError(Error::InvalidRequest(
                    "missing 'idColumn' or 'config'".into(),
                ))
            })?,
            value_column: None,
            id_property: None,
        },
    };
    if let Some(v) = fields.remove("datasetId") {
        config.dataset_id = Some(v);
    }
    if let Some(v) = fields.remove("valueColumn") {
        config.value_column = Some(v);
    }
    if let Some(v) = fields.remove("idProperty") {
        config.id_property = Some(v);
    }
    let upload = DatasetUpload {
        config,
        attributes: attributes
            .ok_or_else(|| AppError(Error::InvalidRequest("missing 'attributes' file".into())))?,
        geometry,
    };
    let body = blocking(move || wb.upload(&upload)).await?;
    Ok(json_reply(StatusCode::OK, body))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ProfileQuery {
    attribute: String,
    bins: Option<usize>,
    include_missing: Option<bool>,
}

async fn dataset_profile(
    State(wb): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<ProfileQuery>,
) -> Reply {
    let body = blocking(move || {
        wb.profile(
            &id,
            &q.attribute,
            q.bins.unwrap_or(DEFAULT_HISTOGRAM_BINS),
            q.include_missing.unwrap_or(true),
        )
    })
    .await?;
    Ok(json_reply(StatusCode::OK, body))
}

async fn bin(State(wb): State<AppState>, body: Bytes) -> Reply {
    let req: BinRequest = parse(&body)?;
    Ok(json_reply(
        StatusCode::OK,
        blocking(move || wb.bin(&req)).await?,
    ))
}

async fn bin_all(State(wb): State<AppState>, body: Bytes) -> Reply {
    let req: BinAllRequest = parse(&body)?;
    Ok(json_reply(
        StatusCode::OK,
        blocking(move || wb.bin_all(&req)).await?,
    ))
}

#[derive(Deserialize)]
struct FormatQuery {
    format: Option<TableFormat>,
}

async fn compare(State(wb): State<AppState>, Query(q): Query<FormatQuery>, body: Bytes) -> Reply {
    let req: CompareRequest = parse(&body)?;
    let format = q.format.unwrap_or_default();
    Ok(payload(
        StatusCode::OK,
        blocking(move || wb.compare(&req, format)).await?,
    ))
}

async fn combine(State(wb): State<AppState>, body: Bytes) -> Reply {
    let req: CombineRequest = parse(&body)?;
    Ok(json_reply(
        StatusCode::OK,
        blocking(move || wb.combine(&req)).await?,
    ))
}

async fn paint(State(wb): State<AppState>, body: Bytes) -> Reply {
    let req: PaintRequest = parse(&body)?;
    Ok(json_reply(
        StatusCode::OK,
        blocking(move || wb.paint(&req)).await?,
    ))
}

async fn export(State(wb): State<AppState>, body: Bytes) -> Reply {
    let req: ExportRequest = parse(&body)?;
    Ok(payload(
        StatusCode::OK,
        blocking(move || wb.export(&req)).await?,
    ))
}

async fn list_custom(State(wb): State<AppState>) -> Reply {
    Ok(json_reply(StatusCode::OK, wb.list_custom()?))
}

async fn save_custom(State(wb): State<AppState>, body: Bytes) -> Reply {
    let req: SaveCustomRequest = parse(&body)?;
    let saved = blocking(move || wb.save_custom(&req)).await?;
    Ok(json_reply(StatusCode::CREATED, to_body(&saved)?))
}

async fn delete_custom(State(wb): State<AppState>, Path(name): Path<String>) -> Reply {
    let removed = blocking(move || wb.delete_custom(&name)).await?;
    Ok(json_reply(StatusCode::OK, to_body(&removed)?))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct PaletteQuery {
    flags: Option<String>,
    scale_type: Option<String>,
}

async fn palettes(State(wb): State<AppState>, Query(q): Query<PaletteQuery>) -> Reply {
    let filter = PaletteFilter {
        flags: PaletteFilter::parse_flags(q.flags.as_deref().unwrap_or(""))?,
        scale_type: q
            .scale_type
            .as_deref()
            .map(str::parse::<ScaleType>)
            .transpose()?,
    };
    Ok(json_reply(StatusCode::OK, wb.palettes(&filter)?))
}

async fn add_palette(State(wb): State<AppState>, body: Bytes) -> Reply {
    let req: AddPaletteRequest = parse(&body)?;
    let added = blocking(move || wb.add_palette(&req)).await?;
    Ok(json_reply(StatusCode::CREATED, to_body(&added)?))
}

fn cors(config: &ServiceConfig) -> CorsLayer {
    let layer = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE]);
    if config.cors_origins.is_empty() {
        layer.allow_origin(Any)
    } else {
        let origins: Vec<HeaderValue> = config
            .cors_origins
            .iter()
            .filter_map(|o| HeaderValue::from_str(o).ok())
            .collect();
        layer.allow_origin(AllowOrigin::list(origins))
    }
}

pub fn router(workbench: Arc<Workbench>, config: &ServiceConfig) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/api/methods", get(methods))
        .route("/api/datasets", get(list_datasets).post(upload_dataset))
        .route("/api/datasets/{id}/profile", get(dataset_profile))
        .route("/api/bin", post(bin))
        .route("/api/bin/all", post(bin_all))
        .route("/api/compare", post(compare))
        .route("/api/combine", post(combine))
        .route("/api/paint", post(paint))
        .route("/api/export", post(export))
        .route("/api/custom-methods", get(list_custom).post(save_custom))
        .route("/api/custom-methods/{name}", delete(delete_custom))
        .route("/api/palettes", get(palettes).post(add_palette))
        .layer(DefaultBodyLimit::max(config.max_body_bytes))
        .layer(RequestBodyLimitLayer::new(config.max_body_bytes))
        .layer(cors(config))
        .with_state(workbench)
}
