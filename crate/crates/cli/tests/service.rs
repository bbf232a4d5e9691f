use std::path::Path;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use qlattice_cli::service::{router, AppState, ServiceConfig};

fn fixture(name: &str, file: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).join(file);
    std::fs::read_to_string(path).unwrap()
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, value)
}

async fn session(app: &Router) -> String {
    let (status, body) = call(app, Method::POST, "/api/session", None).await;
    assert_eq!(status, StatusCode::OK);
    body["session_id"].as_str().unwrap().to_string()
}

fn app() -> Router {
    router(AppState::new(ServiceConfig::default()))
}

#[tokio::test]
async fn case2_end_to_end() {
    let app = app();
    let id = session(&app).await;
    let base = format!("/api/session/{id}");
    let (s, _) = call(&app, Method::POST, &format!("{base}/graph"), Some(fixture("lmcn-case2-unconstrained", "graph.json"))).await;
    assert_eq!(s, StatusCode::OK);
    let (s, body) = call(&app, Method::PUT, &format!("{base}/query"), Some(fixture("lmcn-case2-unconstrained", "query.gq"))).await;
    assert_eq!(s, StatusCode::OK, "{body}");
    assert_eq!(body["lattice"]["layer_sizes"], json!([1]));
    let version = body["version"].as_u64().unwrap();

    let (s, body) = call(&app, Method::POST, &format!("{base}/execute"), Some(json!({"step": "final", "limit": 1, "version": version}).to_string())).await;
    assert_eq!(s, StatusCode::OK, "{body}");
    for k in 0..4 {
        assert_eq!(body["statuses"][format!("L1C0I{k}")]["status"], "found");
    }

    let (s, overview) = call(&app, Method::GET, &format!("{base}/overview"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(overview["node_freq"]["Valjean"], 4);
    assert_eq!(overview["over"].as_array().unwrap().len(), 4);

    let (s, group) = call(&app, Method::GET, &format!("{base}/results/L1C0I1"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(group["embeddings"].as_array().unwrap().len(), 1);
    assert_eq!(group["structure"]["nodes"].as_array().unwrap().len(), 11);

    let (s, t) = call(&app, Method::GET, &format!("{base}/translate/L1C0I0?limit=3"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(t["text"].as_str().unwrap().ends_with("LIMIT 3"));

    let (s, _) = call(&app, Method::GET, &format!("{base}/results/fs-final"), None).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn three_rules_give_binomial_layers() {
    let app = app();
    let id = session(&app).await;
    let q = "query \"t\" { node a; node b; node c; rule repeat a : count=0..1; rule repeat b : count=0..1; rule repeat c : count=0..1; }";
    let (s, _) = call(&app, Method::PUT, &format!("/api/session/{id}/query"), Some(q.into())).await;
    assert_eq!(s, StatusCode::OK);
    let (s, lattice) = call(&app, Method::GET, &format!("/api/session/{id}/lattice"), None).await;
    assert_eq!(s, StatusCode::OK);
    let sizes: Vec<usize> = lattice["layers"].as_array().unwrap().iter().map(|l| l.as_array().unwrap().len()).collect();
    assert_eq!(sizes, [3, 3, 1]);
}

#[tokio::test]
async fn query_forms_and_validation() {
    let app = app();
    let id = session(&app).await;
    let uri = format!("/api/session/{id}/query");
    let conflict = "query \"c\" { node a; rule repeat a : count=0..1; rule repeat a : count=1..2; }";
    let (s, body) = call(&app, Method::PUT, &uri, Some(conflict.into())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{body}");
    assert!(body["subjects"].as_array().unwrap().iter().any(|r| r == "r1" || r == "r0"), "{body}");

    let (s, _) = call(&app, Method::PUT, &uri, Some(json!({"dsl": "query \"d\" { node a; }"}).to_string())).await;
    assert_eq!(s, StatusCode::OK);
    let repr = qlattice::testkit::case2_query(None).to_json();
    let (s, body) = call(&app, Method::PUT, &uri, Some(repr)).await;
    assert_eq!(s, StatusCode::OK, "{body}");
    assert_eq!(body["lattice"]["final_instances"].as_array().unwrap().len(), 4);

    let (s, body) = call(&app, Method::PUT, &uri, Some("query \"x\" { node a; rule repeat a : count=0..20000; }".into())).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
}

#[tokio::test]
async fn stale_versions_and_unknown_ids() {
    let app = app();
    let (s, _) = call(&app, Method::GET, "/api/session/not-a-session/lattice", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let id = session(&app).await;
    let base = format!("/api/session/{id}");
    let graph = fixture("synthetic-mln-chain", "graph.json");
    call(&app, Method::POST, &format!("{base}/graph"), Some(graph)).await;
    let (_, first) = call(&app, Method::PUT, &format!("{base}/query"), Some(fixture("synthetic-mln-chain", "query.gq"))).await;
    let v1 = first["version"].as_u64().unwrap();
    let (s, body) = call(&app, Method::POST, &format!("{base}/execute"), Some(json!({"step": "final", "version": v1}).to_string())).await;
    assert_eq!(s, StatusCode::OK, "{body}");
    assert_eq!(body["statuses"]["L1C0I3"]["status"], "pruned_empty");

    let (_, second) = call(&app, Method::PUT, &format!("{base}/query"), Some(fixture("synthetic-mln-chain", "query.gq"))).await;
    assert!(second["version"].as_u64().unwrap() > v1);
    let (s, _) = call(&app, Method::POST, &format!("{base}/execute"), Some(json!({"step": "final", "version": v1}).to_string())).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, _) = call(&app, Method::GET, &format!("{base}/results/L1C0I0?version={v1}"), None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    // the rebuilt lattice starts from scratch
    let (_, info) = call(&app, Method::GET, &base, None).await;
    assert_eq!(info["statuses"]["L1C0I0"]["status"], "not_run");

    let (s, _) = call(&app, Method::POST, &format!("{base}/execute"), Some(json!({"step": "cell:nope"}).to_string())).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, Method::GET, &format!("{base}/translate/nope"), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn graph_upload_switches_lattice_mode() {
    let app = app();
    let id = session(&app).await;
    let base = format!("/api/session/{id}");
    let (_, body) = call(&app, Method::PUT, &format!("{base}/query"), Some("query \"m\" { node a; node b; edge e = a -> b; }".into())).await;
    assert_eq!(body["lattice"]["directed"], true);
    let (s, body) = call(&app, Method::POST, &format!("{base}/graph"), Some(fixture("lmcn-case2-unconstrained", "graph.json"))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(body["lattice"]["directed"], false);
    let (s, body) = call(&app, Method::POST, &format!("{base}/graph"), Some("{\"nodes\": 3}".into())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{body}");
}

#[tokio::test]
async fn idle_sessions_are_evicted() {
    let state = AppState::new(ServiceConfig {
        idle_timeout: Duration::from_millis(20),
        ..Default::default()
    });
    let app = router(state.clone());
    session(&app).await;
    session(&app).await;
    assert_eq!(state.session_count(), 2);
    tokio::time::sleep(Duration::from_millis(40)).await;
    assert_eq!(state.evict_idle(), 2);
    assert_eq!(state.session_count(), 0);
}

#[tokio::test]
async fn ui_directory_is_served() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>ui</p>").unwrap();
    let app = router(AppState::new(ServiceConfig {
        ui_dir: Some(dir.path().into()),
        ..Default::default()
    }));
    let (s, body) = call(&app, Method::GET, "/index.html", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(body, "<p>ui</p>");
}
