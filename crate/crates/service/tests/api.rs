use std::collections::BTreeSet;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use symbill_service::{router, Config};
use tower::ServiceExt;

async fn call(config: Config, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = router(config).oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn post(uri: &str, body: Value) -> (StatusCode, Value) {
    let (status, bytes) = call(Config::default(), "POST", uri, Some(body)).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn triangle() -> Value {
    json!({ "vertices": [[0, 0], [1, 0], [0, 1]] })
}

fn periods(legend: &Value) -> BTreeSet<String> {
    legend.as_object().unwrap().keys().filter(|k| k.parse::<usize>().is_ok()).cloned().collect()
}

#[tokio::test]
async fn families_lists_the_catalog() {
    let (status, bytes) = call(Config::default(), "GET", "/api/families", None).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    let names: Vec<_> = v.as_array().unwrap().iter().map(|f| f["family"].as_str().unwrap().to_string()).collect();
    for f in ["quad", "penthouse", "trapezoid", "lattice_hexagon", "hexhouse", "special_octagon"] {
        assert!(names.iter().any(|n| n == f), "{f}");
    }
}

#[tokio::test]
async fn validate_reverses_clockwise_input() {
    let (status, v) = post("/api/validate", json!({ "vertices": [[0, 0], [0, 1], ["1", 1.0], [1, 0]] })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["report"]["reversed"], true);
    assert_eq!(v["report"]["vertex_count"], 4);

    let (status, v) = post("/api/validate", json!({ "vertices": [[0, 0], [1, 0]] })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("3 vertices"));
}

#[tokio::test]
async fn triangle_midpoint_orbit_has_three_chords() {
    let (status, v) = post("/api/orbit", json!({ "polygon": triangle(), "phase": "0,1/2,1,1/2", "maxSteps": 20 })).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["period"], 3);
    assert_eq!(v["status"]["kind"], "periodic");
    let chords = v["chords"].as_array().unwrap();
    assert_eq!(chords.len(), 3);
    assert_eq!(chords[0], json!([["1/2", "0"], ["1/2", "1/2"]]));
}

#[tokio::test]
async fn float_orbit_uses_numbers() {
    let phase = json!({ "tail_side": 0, "tail": "1/2", "head_side": 1, "head": "1/2" });
    let (_, v) = post("/api/orbit", json!({ "polygon": triangle(), "phase": phase, "mode": "float" })).await;
    assert_eq!(v["period"], 3);
    assert_eq!(v["chords"][0], json!([[0.5, 0.0], [0.5, 0.5]]));
}

#[tokio::test]
async fn orbit_rejects_bad_phase() {
    let (status, _) = post("/api/orbit", json!({ "polygon": triangle(), "phase": "0,1,1,1/2" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = post("/api/orbit", json!({ "phase": "0,1/2,1,1/2" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn quad_portrait_legend() {
    let (status, v) = post("/api/portrait", json!({ "family": { "family": "quad" }, "resolution": [128, 128], "maxSteps": 200 })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["status"], "complete");
    assert_eq!(periods(&v["legend"]), BTreeSet::from(["20".to_string(), "36".to_string()]));
    assert_eq!(v["cells"].as_array().unwrap().len(), 128 * 128);
}

#[tokio::test]
async fn streamed_portrait_matches_plain_one() {
    let body = json!({ "family": { "family": "quad" }, "resolution": 64, "stream": true });
    let (status, bytes) = call(Config::default(), "POST", "/api/portrait", Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    let lines: Vec<Value> = String::from_utf8(bytes).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let (last, chunks) = lines.split_last().unwrap();
    assert!(chunks.len() > 1);
    let mut cells = Vec::new();
    let mut next_row = 0;
    for c in chunks {
        assert_eq!(c["type"], "rows");
        assert_eq!(c["rows"][0], next_row);
        next_row = c["rows"][1].as_u64().unwrap();
        cells.extend(c["cells"].as_array().unwrap().iter().cloned());
    }
    assert_eq!(next_row, 64);
    assert_eq!(last["type"], "portrait");
    assert_eq!(last["cells"], Value::Array(cells));

    let (_, plain) = post("/api/portrait", json!({ "family": { "family": "quad" }, "resolution": 64 })).await;
    assert_eq!(last["cells"], plain["cells"]);
    assert_eq!(last["legend"], plain["legend"]);
}

#[tokio::test]
async fn tall_penthouse_certificate() {
    let fam = json!({ "family": "penthouse", "params": { "a": "2", "b": "3/5" } });
    let (status, v) = post("/api/certify", json!({ "family": fam })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["status"], "complete");
    assert_eq!(v["certificate"]["verdict"]["kind"], "fully_periodic");
    assert_eq!(v["periods"], json!([12, 20, 28]));
    assert_eq!(v["certificate"]["total_phase_area"], v["certificate"]["covered_area"]);
}

#[tokio::test]
async fn identical_requests_give_identical_bytes() {
    let body = json!({ "family": { "family": "quad" } });
    let a = call(Config::default(), "POST", "/api/certify", Some(body.clone())).await;
    let b = call(Config::default(), "POST", "/api/certify", Some(body)).await;
    assert_eq!(a, b);
}

#[tokio::test]
async fn time_limit_caps_long_work() {
    let config = Config { time_limit: Duration::ZERO, ..Config::default() };
    let (_, bytes) = call(config.clone(), "POST", "/api/certify", Some(json!({ "family": { "family": "quad" } }))).await;
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["status"], "capped");
    assert_eq!(v["certificate"]["verdict"]["kind"], "inconclusive");

    let (_, bytes) = call(config, "POST", "/api/portrait", Some(json!({ "family": { "family": "quad" }, "resolution": 8 }))).await;
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["status"], "capped");
    assert!(v["cells"].as_array().unwrap().iter().all(|c| c == "capped"));
}

#[tokio::test]
async fn perturb_is_seeded() {
    let body = json!({ "family": { "family": "quad" }, "eps": "1/100", "seed": 4 });
    let (status, a) = post("/api/perturb", body.clone()).await;
    let (_, b) = post("/api/perturb", body).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(a, b);
    assert_eq!(a["polygon"]["vertices"].as_array().unwrap().len(), 4);
    let (_, same) = post("/api/perturb", json!({ "family": { "family": "quad" }, "eps": 0 })).await;
    assert_eq!(same["polygon"]["vertices"], json!([["0", "1"], ["0", "0"], ["1", "0"], ["3", "4"]]));
}

#[tokio::test]
async fn cors_allows_the_frontend() {
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/api/orbit")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .body(Body::empty())
        .unwrap();
    let resp = router(Config::default()).oneshot(req).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "*");
}
