//! JSON-over-HTTP adapter around [`SessionStore`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chomp_core::{Error, FamilySpec, VertexId};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::CliError;
use crate::input::Instance;
use crate::nim::{nim, Method, NimReport};
use crate::session::{CreateRequest, CreateResponse, MoveResponse, SessionError, SessionStore, SessionView};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }
}

fn core_status(e: &Error) -> StatusCode {
    match e {
        Error::FaceNotPresent(_) => StatusCode::CONFLICT,
        Error::ResourceExceeded(_) => StatusCode::SERVICE_UNAVAILABLE,
        Error::DisciplineBroken(_) | Error::NotValidated => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::NotFound(_) => StatusCode::NOT_FOUND,
            SessionError::Conflict(_) => StatusCode::CONFLICT,
            SessionError::Core(c) => core_status(c),
            SessionError::Snapshot(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        let status = match &e {
            CliError::Core(c) => core_status(c),
            CliError::Usage(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

/// Engine work runs off the async workers.
async fn blocking<T: Send + 'static, E: Into<ApiError> + Send + 'static>(
    f: impl FnOnce() -> std::result::Result<T, E> + Send + 'static,
) -> ApiResult<T> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map(Json).map_err(Into::into),
        Err(e) => Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())),
    }
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    pub face: Vec<VertexId>,
}

#[derive(Debug, Deserialize)]
pub struct NimQuery {
    pub spec: String,
    #[serde(default)]
    pub method: Option<Method>,
}

#[derive(Debug, Serialize)]
struct Families {
    grammar: &'static [&'static str],
    families: [&'static str; 6],
}

async fn create(State(store): State<Arc<SessionStore>>, Json(req): Json<CreateRequest>) -> ApiResult<CreateResponse> {
    blocking(move || store.create(req)).await
}

async fn play(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    Json(req): Json<MoveRequest>,
) -> ApiResult<MoveResponse> {
    blocking(move || store.play(&id, &req.face)).await
}

async fn show(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<SessionView> {
    Ok(Json(store.get(&id)?))
}

async fn remove(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    store.delete(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn nim_value(State(store): State<Arc<SessionStore>>, Query(q): Query<NimQuery>) -> ApiResult<NimReport> {
    blocking(move || {
        let spec: FamilySpec = q.spec.parse().map_err(CliError::from)?;
        nim(&Instance::from_spec(spec)?, q.method.unwrap_or(Method::Auto), store.config())
    })
    .await
}

async fn families() -> Json<Families> {
    Json(Families {
        grammar: FamilySpec::grammar(),
        families: ["kneser", "johnson", "multipartite", "threshold", "complete", "skeleton"],
    })
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show).delete(remove))
        .route("/sessions/{id}/moves", post(play))
        .route("/nim", get(nim_value))
        .route("/families", get(families))
        .with_state(store)
}

/// Binds `addr` and serves until the process ends.
pub async fn serve(addr: SocketAddr, store: Arc<SessionStore>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}
