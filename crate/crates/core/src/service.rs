//! HTTP+JSON API over one analysis.
//!
//! Reads clone an `Arc` of the current snapshot and never block each other.
//! Reassignments are serialized by a writer lock and publish a complete new
//! snapshot with a single pointer swap.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::architecture::{
    ClassMove, ClusterInterface, ClusterLabel, ClusterSummary, ClusterView, CrossLayerUsage, RejectedMove,
};
use crate::clustering::QualityReport;
use crate::error::{Error, Result};
use crate::pipeline::{Analysis, ArchitectureSnapshot};
use crate::retrieval::{EntityMapping, QueryResult};

pub struct ServiceState {
    analysis: Analysis,
    snapshot: RwLock<Arc<ArchitectureSnapshot>>,
    writer: tokio::sync::Mutex<()>,
    /// Snapshot file rewritten after each reassignment.
    persist: Option<PathBuf>,
}

impl ServiceState {
    pub fn new(analysis: Analysis, snapshot: ArchitectureSnapshot, persist: Option<PathBuf>) -> Arc<Self> {
        Arc::new(ServiceState {
            analysis,
            snapshot: RwLock::new(Arc::new(snapshot)),
            writer: tokio::sync::Mutex::new(()),
            persist,
        })
    }

    pub fn current(&self) -> Arc<ArchitectureSnapshot> {
        self.snapshot.read().expect("snapshot lock poisoned").clone()
    }

    pub fn analysis(&self) -> &Analysis {
        &self.analysis
    }
}

type Shared = Arc<ServiceState>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: serde_json::Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnanswerableQuery => StatusCode::UNPROCESSABLE_ENTITY,
            Error::Config(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

/// Parses a JSON body, reporting the failing field path on 400.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> std::result::Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": e.inner().to_string(), "field": path }),
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterDetail {
    #[serde(flatten)]
    pub summary: ClusterSummary,
    pub label: ClusterLabel,
    pub interface: ClusterInterface,
    pub view: ClusterView,
    pub cross_layer: CrossLayerUsage,
}

fn detail(s: &ArchitectureSnapshot, id: usize) -> Option<ClusterDetail> {
    let a = &s.architecture;
    Some(ClusterDetail {
        summary: a.clusters.get(id)?.clone(),
        label: a.labels[id].clone(),
        interface: a.interfaces[id].clone(),
        view: a.views[id].clone(),
        cross_layer: a.cross_layer[id].clone(),
    })
}

async fn get_snapshot(State(st): State<Shared>) -> Response {
    Json(&*st.current()).into_response()
}

async fn get_clusters(State(st): State<Shared>) -> Json<Vec<ClusterDetail>> {
    let s = st.current();
    Json(
        (0..s.architecture.clusters.len())
            .filter_map(|i| detail(&s, i))
            .collect(),
    )
}

async fn get_cluster(State(st): State<Shared>, Path(id): Path<String>) -> std::result::Result<Response, ApiError> {
    let s = st.current();
    id.parse::<usize>()
        .ok()
        .and_then(|i| detail(&s, i))
        .map(|d| Json(d).into_response())
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown cluster {id}")))
}

async fn get_interactions(State(st): State<Shared>) -> Response {
    Json(&st.current().architecture.interactions).into_response()
}

async fn get_borderline(State(st): State<Shared>) -> Response {
    Json(&st.current().architecture.borderline).into_response()
}

async fn get_hierarchy(State(st): State<Shared>) -> Response {
    Json(&st.current().architecture.hierarchy).into_response()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReassignRequest {
    moves: Vec<ClassMove>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReassignResponse {
    pub revision: u64,
    pub rejected: Vec<RejectedMove>,
    pub previous_quality: QualityReport,
    pub quality: QualityReport,
    pub mqc_delta: f64,
    pub clusters: Vec<ClusterSummary>,
    pub interfaces: Vec<ClusterInterface>,
    pub interactions: crate::architecture::InteractionGraph,
    pub labels: Vec<ClusterLabel>,
    pub borderline: crate::architecture::BorderlineReport,
}

async fn post_reassign(State(st): State<Shared>, body: Bytes) -> std::result::Result<Json<ReassignResponse>, ApiError> {
    let req: ReassignRequest = parse_body(&body)?;
    let _guard = st.writer.lock().await;
    let cur = st.current();
    let (next, rejected) = cur.reassign(&st.analysis, &req.moves)?;
    if let Some(path) = &st.persist {
        next.save(path)?;
    }
    let a = &next.architecture;
    let resp = ReassignResponse {
        revision: next.meta.revision,
        rejected,
        previous_quality: cur.architecture.quality,
        quality: a.quality,
        mqc_delta: a.quality.mqc - cur.architecture.quality.mqc,
        clusters: a.clusters.clone(),
        interfaces: a.interfaces.clone(),
        interactions: a.interactions.clone(),
        labels: a.labels.clone(),
        borderline: a.borderline.clone(),
    };
    *st.snapshot.write().expect("snapshot lock poisoned") = Arc::new(next);
    Ok(Json(resp))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryRequest {
    text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NamedRank {
    pub class_id: usize,
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryResponse {
    pub top: Vec<NamedRank>,
    pub result: QueryResult,
}

async fn post_query(State(st): State<Shared>, body: Bytes) -> std::result::Result<Json<QueryResponse>, ApiError> {
    let req: QueryRequest = parse_body(&body)?;
    let result = st.analysis.query(&req.text)?;
    let top = result
        .top
        .iter()
        .map(|r| NamedRank {
            class_id: r.class_id,
            name: st.analysis.corpus.entities[r.class_id].name.clone(),
            score: r.score,
        })
        .collect();
    Ok(Json(QueryResponse { top, result }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapRequest {
    descriptions: Vec<String>,
}

async fn post_map_entities(
    State(st): State<Shared>,
    body: Bytes,
) -> std::result::Result<Json<EntityMapping>, ApiError> {
    let req: MapRequest = parse_body(&body)?;
    let s = st.current();
    Ok(Json(
        st.analysis
            .map_entities(&s.architecture.partition_clusters(), &req.descriptions),
    ))
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/snapshot", get(get_snapshot))
        .route("/clusters", get(get_clusters))
        .route("/clusters/{id}", get(get_cluster))
        .route("/interactions", get(get_interactions))
        .route("/borderline", get(get_borderline))
        .route("/hierarchy", get(get_hierarchy))
        .route("/reassign", post(post_reassign))
        .route("/query", post(post_query))
        .route("/map-entities", post(post_map_entities))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(state: Shared, addr: SocketAddr) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| Error::Io {
        path: PathBuf::from(addr.to_string()),
        source: e,
    })?;
    log::info!(
        "listening on http://{}",
        listener.local_addr().map(|a| a.to_string()).unwrap_or_default()
    );
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::Internal(format!("server stopped: {e}")))
}
