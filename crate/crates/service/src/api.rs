//! HTTP routes over an [`Engine`]. Bodies are JSON; every response carries the scenario digest.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use campaign_core::solution::OrderSpec;
use campaign_core::Player;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::engine::{Engine, EngineError, Session};

pub struct AppState {
    engine: Engine,
    sessions: RwLock<HashMap<String, Arc<tokio::sync::Mutex<Session>>>>,
    log: Option<Mutex<File>>,
}

impl AppState {
    pub fn new(engine: Engine) -> Self {
        AppState { engine, sessions: RwLock::new(HashMap::new()), log: None }
    }

    /// Append one JSON line per session event to `path`.
    pub fn with_log(mut self, path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        self.log = Some(Mutex::new(file));
        Ok(self)
    }

    fn record(&self, event: serde_json::Value) {
        if let Some(log) = &self.log {
            let mut file = log.lock().expect("log lock");
            if let Err(e) = writeln!(file, "{event}") {
                tracing::warn!("session log write failed: {e}");
            }
        }
    }

    fn session(&self, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| self.error(EngineError::UnknownSession(id.to_string())))
    }

    fn error(&self, e: EngineError) -> ApiError {
        ApiError { digest: self.engine.digest().to_string(), error: e }
    }
}

pub struct ApiError {
    digest: String,
    error: EngineError,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.error {
            EngineError::MalformedState(..) | EngineError::BadRequest(_) => StatusCode::BAD_REQUEST,
            EngineError::Unachievable { .. } | EngineError::UnknownSession(_) => StatusCode::NOT_FOUND,
            EngineError::Infeasible(_) => StatusCode::UNPROCESSABLE_ENTITY,
            EngineError::ScenarioMismatch { .. } => StatusCode::CONFLICT,
        };
        let body = json!({
            "scenario_digest": self.digest,
            "code": self.error.code(),
            "message": self.error.to_string(),
            "constraint": self.error.constraint(),
        });
        (status, Json(body)).into_response()
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Deserialize)]
struct ScenarioQuery {
    scenario: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewSession {
    pub scenario: Option<String>,
    pub human_player: Player,
    pub state: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ActionRequest {
    pub orders: Vec<OrderSpec>,
}

async fn scenario_summary(State(app): State<Shared>, Query(q): Query<ScenarioQuery>) -> ApiResult<crate::engine::ScenarioSummary> {
    app.engine.check_scenario(q.scenario.as_deref()).map_err(|e| app.error(e))?;
    Ok(Json(app.engine.summary()))
}

async fn value(State(app): State<Shared>, UrlPath(state): UrlPath<String>) -> ApiResult<crate::engine::ValueView> {
    app.engine.value_view(&state).map(Json).map_err(|e| app.error(e))
}

async fn create_session(State(app): State<Shared>, Json(req): Json<NewSession>) -> ApiResult<crate::engine::SessionView> {
    app.engine.check_scenario(req.scenario.as_deref()).map_err(|e| app.error(e))?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = app
        .engine
        .start_session(id.clone(), req.human_player, req.state.as_deref(), req.seed)
        .map_err(|e| app.error(e))?;
    let view = app.engine.session_view(&session);
    app.record(json!({"event": "session", "id": id, "human_player": req.human_player, "seed": session.seed, "state": view.current_state}));
    app.sessions.write().expect("session table lock").insert(id, Arc::new(tokio::sync::Mutex::new(session)));
    Ok(Json(view))
}

async fn get_session(State(app): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<crate::engine::SessionView> {
    let session = app.session(&id)?;
    let session = session.lock().await;
    Ok(Json(app.engine.session_view(&session)))
}

async fn act(State(app): State<Shared>, UrlPath(id): UrlPath<String>, Json(req): Json<ActionRequest>) -> ApiResult<crate::engine::StageView> {
    let session = app.session(&id)?;
    let mut session = session.lock().await;
    let outcome = app.engine.play(&mut session, &req.orders).map_err(|e| app.error(e))?;
    app.record(json!({"event": "action", "id": id, "orders": req.orders, "outcome": outcome}));
    Ok(Json(outcome))
}

async fn hint(State(app): State<Shared>, UrlPath(id): UrlPath<String>) -> ApiResult<crate::engine::HintView> {
    let session = app.session(&id)?;
    let session = session.lock().await;
    Ok(Json(app.engine.hint(&session)))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/state", get(scenario_summary))
        .route("/value/{state}", get(value))
        .route("/session", post(create_session))
        .route("/session/{id}", get(get_session))
        .route("/session/{id}/action", post(act))
        .route("/session/{id}/hint", post(hint))
        .with_state(Arc::new(state))
}

/// Bind `addr` and serve until the process is stopped.
pub async fn serve(state: AppState, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
