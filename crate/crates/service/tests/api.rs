use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use binx_core::api::Workbench;
use binx_service::{router, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

const CSV: &[u8] = include_bytes!("../../core/data/life_expectancy.csv");
const GEOJSON: &[u8] = include_bytes!("../../core/data/us_counties_sample.geojson");
const BOUNDARY: &str = "binx-test-boundary";

struct Reply {
    status: StatusCode,
    content_type: String,
    body: String,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }
}

async fn send(app: &Router, req: Request<Body>) -> Reply {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let content_type = res
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        content_type,
        body: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn post(app: &Router, uri: &str, body: Value) -> Reply {
    let req = Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    send(app, req).await
}

fn multipart(parts: &[(&str, Option<&str>, &[u8])]) -> Request<Body> {
    let mut body = Vec::new();
    for (name, file, data) in parts {
        body.extend_from_slice(format!("--{BOUNDARY}\r\n").as_bytes());
        match file {
            Some(f) => body.extend_from_slice(
                format!(
                    "Content-Disposition: form-data; name=\"{name}\"; filename=\"{f}\"\r\n\r\n"
                )
                .as_bytes(),
            ),
            None => body.extend_from_slice(
                format!("Content-Disposition: form-data; name=\"{name}\"\r\n\r\n").as_bytes(),
            ),
        }
        body.extend_from_slice(data);
        body.extend_from_slice(b"\r\n");
    }
    body.extend_from_slice(format!("--{BOUNDARY}--\r\n").as_bytes());
    Request::post("/api/datasets")
        .header(
            header::CONTENT_TYPE,
            format!("multipart/form-data; boundary={BOUNDARY}"),
        )
        .body(Body::from(body))
        .unwrap()
}

async fn app_with_sample(workbench: Workbench) -> Router {
    let app = router(Arc::new(workbench), &ServiceConfig::default());
    let r = send(
        &app,
        multipart(&[
            ("attributes", Some("le.csv"), CSV),
            ("geometry", Some("counties.geojson"), GEOJSON),
            ("datasetId", None, b"counties"),
            ("idColumn", None, b"fips"),
            ("valueColumn", None, b"life_expectancy"),
            ("idProperty", None, b"GEOID"),
        ]),
    )
    .await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    app
}

fn bin_request(method: &str, k: usize) -> Value {
    json!({"datasetId": "counties", "attribute": "life_expectancy", "spec": {"methodId": method, "binCount": k}})
}

#[tokio::test]
async fn health_and_method_catalog() {
    let app = router(Arc::new(Workbench::new()), &ServiceConfig::default());
    let r = get(&app, "/healthz").await;
    assert_eq!(
        (r.status, r.body.as_str()),
        (StatusCode::OK, "{\"status\":\"ok\"}\n")
    );
    let r = get(&app, "/api/methods").await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json().as_array().unwrap().len(), 16);
}

#[tokio::test]
async fn upload_reports_the_join_and_profile() {
    let app = router(Arc::new(Workbench::new()), &ServiceConfig::default());
    let config = json!({"datasetId": "c2", "idColumn": "fips", "valueColumn": "life_expectancy", "idProperty": "GEOID"});
    let r = send(
        &app,
        multipart(&[
            ("config", None, config.to_string().as_bytes()),
            ("attributes", Some("a.csv"), CSV),
            ("geometry", Some("g.geojson"), GEOJSON),
        ]),
    )
    .await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let v = r.json();
    assert_eq!(v["datasetId"], "c2");
    assert!(v["joinReport"]["matched"].as_u64().unwrap() > 3000);
    assert_eq!(v["profile"]["count"], 3142);
    assert_eq!(get(&app, "/api/datasets").await.json(), json!(["c2"]));
    let p = get(
        &app,
        "/api/datasets/c2/profile?attribute=life_expectancy&bins=5",
    )
    .await;
    assert_eq!(p.json()["histogram"]["counts"].as_array().unwrap().len(), 5);
}

#[tokio::test]
async fn bad_uploads_are_input_errors() {
    let app = router(Arc::new(Workbench::new()), &ServiceConfig::default());
    let r = send(&app, multipart(&[("idColumn", None, b"fips")])).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = send(
        &app,
        multipart(&[
            ("attributes", Some("a.csv"), b"id,v\na,1\na,2\n"),
            ("idColumn", None, b"id"),
        ]),
    )
    .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "DuplicateId");
}

#[tokio::test]
async fn binning_endpoints() {
    let app = app_with_sample(Workbench::new()).await;
    let r = post(&app, "/api/bin", bin_request("quantile", 5)).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let v = r.json();
    assert_eq!(v["extents"].as_array().unwrap().len(), 6);
    assert!(r.body.ends_with('\n'));

    let r = post(
        &app,
        "/api/bin/all",
        json!({"datasetId": "counties", "attribute": "life_expectancy", "binCount": 5}),
    )
    .await;
    assert_eq!(r.json().as_object().unwrap().len(), 16);

    let req = json!({"datasetId": "counties", "attribute": "life_expectancy",
        "methods": [{"methodId": "quantile"}, {"methodId": "equal_interval"}], "binCount": 4});
    let r = post(&app, "/api/compare", req.clone()).await;
    assert_eq!(r.json()["rows"].as_array().unwrap().len(), 2);
    let r = post(&app, "/api/compare?format=csv", req).await;
    assert!(r.content_type.starts_with("text/csv"), "{}", r.content_type);
    assert_eq!(r.body.lines().count(), 1 + 2 * 4);
    assert!(r.body.starts_with("method,bin,lower,upper,interval,size\n"));

    let r = post(
        &app,
        "/api/combine",
        json!({"datasetId": "counties", "attribute": "life_expectancy"}),
    )
    .await;
    let v = r.json();
    assert_eq!(v["matrix"]["methods"].as_array().unwrap().len(), 8);
    assert_eq!(v["resiliency"]["extents"].as_array().unwrap().len(), 7);
}

#[tokio::test]
async fn error_statuses() {
    let app = app_with_sample(Workbench::new()).await;
    let r = post(&app, "/api/bin", bin_request("nonsense", 5)).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = post(
        &app,
        "/api/bin",
        json!({"datasetId": "nope", "attribute": "x", "spec": {"methodId": "quantile"}}),
    )
    .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "UnknownDataset");
    let r = post(
        &app,
        "/api/combine",
        json!({"datasetId": "counties", "attribute": "life_expectancy", "members": ["quantile"]}),
    )
    .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let paint = json!({"datasetId": "counties", "attribute": "life_expectancy", "extents": [60.0, 70.0, 80.0, 90.0],
        "constraints": [{"value": 75.0, "targetBin": 1}, {"value": 65.0, "targetBin": 3}]});
    let r = post(&app, "/api/paint", paint).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["code"], "InfeasibleConstraints");
    let bad = Request::post("/api/bin")
        .body(Body::from("{not json"))
        .unwrap();
    let r = send(&app, bad).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let keys: Vec<String> = r.json().as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, vec!["code", "message", "details"]);
}

#[tokio::test]
async fn paint_returns_the_warning_verbatim() {
    let app = app_with_sample(Workbench::new()).await;
    let paint = json!({"datasetId": "counties", "attribute": "life_expectancy", "extents": [62.0, 70.0, 74.0, 78.0, 87.0],
        "constraints": [{"featureId": "13089", "targetBin": 1}, {"featureId": "37113", "targetBin": 1}]});
    let r = post(&app, "/api/paint", paint).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let v = r.json();
    assert_eq!(
        v["warning"],
        "We recommend using this feature only for educational purposes."
    );
    assert!(v["extents"][1].as_f64().unwrap() > 74.93);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["extents", "warning", "notes"]);
}

#[tokio::test]
async fn exports_carry_their_content_type() {
    let app = app_with_sample(Workbench::new()).await;
    for (target, ct) in [
        ("breaks", "application/json"),
        ("legend_svg", "image/svg+xml"),
        ("mapspec", "application/json"),
    ] {
        let mut req = bin_request("natural_breaks", 5);
        req["target"] = json!(target);
        req["options"] = json!({"geometryUrl": "counties.geojson"});
        let r = post(&app, "/api/export", req).await;
        assert_eq!(r.status, StatusCode::OK, "{target}: {}", r.body);
        assert!(
            r.content_type.starts_with(ct),
            "{target}: {}",
            r.content_type
        );
    }
}

#[tokio::test]
async fn custom_methods_and_palettes() {
    let app = app_with_sample(Workbench::new()).await;
    let r = post(
        &app,
        "/api/custom-methods",
        json!({"name": "south", "extents": [60.0, 75.0, 90.0]}),
    )
    .await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    let r = post(&app, "/api/bin", json!({"datasetId": "counties", "attribute": "life_expectancy", "spec": {"methodId": "custom:south"}})).await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    assert_eq!(r.json()["extents"], json!([60.0, 75.0, 90.0]));
    assert_eq!(
        get(&app, "/api/custom-methods")
            .await
            .json()
            .as_array()
            .unwrap()
            .len(),
        1
    );
    let r = send(
        &app,
        Request::delete("/api/custom-methods/south")
            .body(Body::empty())
            .unwrap(),
    )
    .await;
    assert_eq!(r.status, StatusCode::OK);
    let r = send(
        &app,
        Request::delete("/api/custom-methods/south")
            .body(Body::empty())
            .unwrap(),
    )
    .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);

    let r = post(
        &app,
        "/api/palettes",
        json!({"name": "mine", "colors": ["#112233", "#445566"]}),
    )
    .await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    let all = get(&app, "/api/palettes").await.json();
    assert!(all.as_array().unwrap().iter().any(|p| p["name"] == "mine"));
    let cb = get(&app, "/api/palettes?flags=colorblind&scaleType=diverging")
        .await
        .json();
    assert!(cb
        .as_array()
        .unwrap()
        .iter()
        .all(|p| p["scaleType"] == "diverging"));
    assert_eq!(
        get(&app, "/api/palettes?flags=glitter").await.status,
        StatusCode::BAD_REQUEST
    );
}

#[tokio::test]
async fn state_survives_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    {
        let app = app_with_sample(Workbench::open(dir.path()).unwrap()).await;
        post(
            &app,
            "/api/custom-methods",
            json!({"name": "kept", "extents": [60.0, 75.0, 90.0]}),
        )
        .await;
        post(
            &app,
            "/api/palettes",
            json!({"name": "kept", "colors": ["#000000", "#ffffff"]}),
        )
        .await;
    }
    let app = router(
        Arc::new(Workbench::open(dir.path()).unwrap()),
        &ServiceConfig::default(),
    );
    assert_eq!(get(&app, "/api/datasets").await.json(), json!(["counties"]));
    assert_eq!(
        post(&app, "/api/bin", bin_request("quantile", 5))
            .await
            .status,
        StatusCode::OK
    );
    assert_eq!(
        get(&app, "/api/custom-methods").await.json()[0]["name"],
        "kept"
    );
    assert!(get(&app, "/api/palettes").await.body.contains("\"kept\""));
}

#[tokio::test]
async fn concurrent_requests_agree() {
    let app = app_with_sample(Workbench::new()).await;
    let expected = post(&app, "/api/bin", bin_request("ckmeans", 6)).await.body;
    let mut tasks = Vec::new();
    for i in 0..16 {
        let app = app.clone();
        tasks.push(tokio::spawn(async move {
            if i % 2 == 0 {
                post(&app, "/api/bin", bin_request("ckmeans", 6)).await.body
            } else {
                post(
                    &app,
                    "/api/custom-methods",
                    json!({"name": format!("c{i}"), "extents": [60.0, 90.0]}),
                )
                .await;
                post(&app, "/api/bin", bin_request("ckmeans", 6)).await.body
            }
        }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), expected);
    }
    assert_eq!(
        get(&app, "/api/custom-methods")
            .await
            .json()
            .as_array()
            .unwrap()
            .len(),
        8
    );
}

#[tokio::test]
async fn oversized_bodies_are_refused() {
    let config = ServiceConfig {
        max_body_bytes: 1024,
        ..ServiceConfig::default()
    };
    let app = router(Arc::new(Workbench::new()), &config);
    let r = post(&app, "/api/bin", json!({"pad": "x".repeat(4096)})).await;
    assert_eq!(r.status, StatusCode::PAYLOAD_TOO_LARGE);
}

#[tokio::test]
async fn cors_preflight_is_answered() {
    let config = ServiceConfig {
        cors_origins: vec!["http://localhost:5173".into()],
        ..ServiceConfig::default()
    };
    let app = router(Arc::new(Workbench::new()), &config);
    let req = Request::options("/api/bin")
        .header(header::ORIGIN, "http://localhost:5173")
        .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
        .body(Body::empty())
        .unwrap();
    let res = app.oneshot(req).await.unwrap();
    assert_eq!(
        res.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN],
        "http://localhost:5173"
    );
}

#[tokio::test]
async fn documented_error_codes() {
    let app = app_with_sample(Workbench::new()).await;
    let r = post(
        &app,
        "/api/combine",
        json!({"datasetId": "counties", "attribute": "life_expectancy", "members": ["quantile", "box_plot"], "k": 5}),
    )
    .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "BinCountMismatch");

    let saved = json!({"name": "dup", "extents": [60.0, 75.0, 90.0]});
    assert_eq!(
        post(&app, "/api/custom-methods", saved.clone())
            .await
            .status,
        StatusCode::CREATED
    );
    let r = post(&app, "/api/custom-methods", saved).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    assert_eq!(r.json()["code"], "DuplicateName");

    let r = post(
        &app,
        "/api/palettes",
        json!({"name": "bad", "colors": ["#12345g"]}),
    )
    .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "InvalidHex");

    let r = send(
        &app,
        multipart(&[
            ("attributes", Some("a.csv"), b"id,v\na,1\nb,oops\n"),
            ("idColumn", None, b"id"),
            ("valueColumn", None, b"v"),
        ]),
    )
    .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "UnparseableRow");
}

#[tokio::test]
async fn saved_methods_join_the_catalog_until_deleted() {
    let app = app_with_sample(Workbench::new()).await;
    post(
        &app,
        "/api/custom-methods",
        json!({"name": "south", "extents": [60.0, 75.0, 90.0]}),
    )
    .await;
    let catalog = get(&app, "/api/methods").await.json();
    let ids: Vec<&str> = catalog
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["methodId"].as_str().unwrap())
        .collect();
    assert_eq!(ids.len(), 17);
    assert_eq!(ids[16], "custom:south");

    send(
        &app,
        Request::delete("/api/custom-methods/south")
            .body(Body::empty())
            .unwrap(),
    )
    .await;
    let r = post(
        &app,
        "/api/bin",
        json!({"datasetId": "counties", "attribute": "life_expectancy", "spec": {"methodId": "custom:south"}}),
    )
    .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "UnknownMethod");
}

#[tokio::test]
async fn re_upload_replaces_the_dataset() {
    let app = app_with_sample(Workbench::new()).await;
    let r = send(
        &app,
        multipart(&[
            (
                "attributes",
                Some("a.csv"),
                b"fips,life_expectancy\n01001,70\n01003,80\n",
            ),
            ("datasetId", None, b"counties"),
            ("idColumn", None, b"fips"),
        ]),
    )
    .await;
    assert_eq!(r.status, StatusCode::OK, "{}", r.body);
    let v = post(&app, "/api/bin", bin_request("equal_interval", 2))
        .await
        .json();
    assert_eq!(v["binSizes"], json!([1, 1]));
    assert_eq!(get(&app, "/api/datasets").await.json(), json!(["counties"]));
}
