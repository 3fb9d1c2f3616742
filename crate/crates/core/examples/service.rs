//! Drives the HTTP API in process: query, reassign and read back.
//!
//! `cargo run --example service`. Use `archrecover serve` for a real listener.

use std::path::PathBuf;

use archrecover::service::{router, ServiceState};
use archrecover::{run_pipeline, RunConfig};
use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use tower::ServiceExt;

async fn send(app: &axum::Router, method: &str, uri: &str, body: &str) -> anyhow::Result<String> {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))?;
    let resp = app.clone().oneshot(req).await?;
    let status = resp.status();
    let bytes = resp.into_body().collect().await?.to_bytes();
    let text = String::from_utf8_lossy(&bytes);
    let cut = text.char_indices().nth(240).map_or(text.len(), |(i, _)| i);
    Ok(format!("{status} {}", &text[..cut]))
}

fn main() -> anyhow::Result<()> {
    let out = tempfile::tempdir()?;
    let cfg = RunConfig {
        corpus: Some(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/shop")),
        output: out.path().to_path_buf(),
        ..RunConfig::default()
    };
    let run = run_pipeline(&cfg)?;
    let app = router(ServiceState::new(run.analysis, run.snapshot, None));

    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build()?;
    rt.block_on(async {
        println!("{}", send(&app, "GET", "/clusters", "").await?);
        println!(
            "{}",
            send(&app, "POST", "/query", r#"{"text":"invoice payment"}"#).await?
        );
        println!(
            "{}",
            send(&app, "POST", "/reassign", r#"{"moves":[{"entity":5,"target":"new"}]}"#).await?
        );
        println!(
            "{}",
            send(&app, "POST", "/reassign", r#"{"moves":[{"entity":"x"}]}"#).await?
        );
        anyhow::Ok(())
    })
}
