//! HTTP front end for enrollment, authentication and pairwise analysis.
//!
//! Every endpoint takes and returns JSON. Failures carry
//! `{"error": code, "message": text}` with a matching status.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use gesturekit_core::evaluation::align_fingers_to;
use gesturekit_core::infocap::{group_mean_mi, mutual_information};
use gesturekit_core::recognizer::{decide, match_trace, DEFAULT_POINTS, MAX_TEMPLATES};
use gesturekit_core::resample::{resample, DEFAULT_RATE_HZ};
use gesturekit_core::{PairOutcome, ResampledTrace, TemplateSet};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use uuid::Uuid;

use crate::config::Config;
use crate::format::{MiDoc, TraceDoc};
use crate::store::{check_gesture_id, TemplateStore};
use crate::Result;

/// Enrollment length when the client does not ask for one.
pub const DEFAULT_REQUIRED_REPS: usize = 10;

/// Below this mean Generate MI a gesture is reported as weak.
pub const WEAK_BELOW_BITS: f64 = 15.0;
/// Above this it is reported as strong.
pub const STRONG_ABOVE_BITS: f64 = 30.0;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn unprocessable(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Collecting,
    Complete,
}

#[derive(Debug)]
struct EnrollmentSession {
    gesture_id: String,
    overwrite: bool,
    required_reps: usize,
    collected: Vec<ResampledTrace>,
    state: SessionState,
}

pub struct AppState {
    config: Config,
    store: TemplateStore,
    sessions: Mutex<HashMap<Uuid, EnrollmentSession>>,
}

impl AppState {
    /// Opens the template store under `config.data_dir`.
    pub fn new(config: Config) -> Result<Self> {
        config.validate()?;
        let store = TemplateStore::open(&config.data_dir)?;
        Ok(Self {
            config,
            store,
            sessions: Mutex::new(HashMap::new()),
        })
    }

    pub fn store(&self) -> &TemplateStore {
        &self.store
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/enroll/start", post(enroll_start))
        .route("/enroll/{session_id}/trace", post(enroll_trace))
        .route("/auth", post(auth))
        .route("/analyze/mi", post(analyze_mi))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint") })
        .with_state(state)
}

/// Serves until interrupted.
pub async fn serve(config: Config, addr: SocketAddr) -> Result<()> {
    let state = Arc::new(AppState::new(config)?);
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(crate::Error::io(addr.to_string()))?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(crate::Error::io(addr.to_string()))
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> std::result::Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::unprocessable("invalid_request", e.to_string()))
}

fn prepare_trace(doc: TraceDoc) -> std::result::Result<ResampledTrace, ApiError> {
    let trace = doc
        .into_trace()
        .map_err(|e| ApiError::unprocessable("invalid_trace", e.to_string()))?;
    resample(&trace, DEFAULT_RATE_HZ).map_err(|e| ApiError::unprocessable("invalid_trace", e.to_string()))
}

#[derive(Deserialize)]
struct StartRequest {
    gesture_id: String,
    required_reps: Option<usize>,
}

#[derive(Serialize)]
struct StartResponse {
    session_id: Uuid,
    required_reps: usize,
}

fn overwrite_flag(query: Option<&str>) -> bool {
    query
        .into_iter()
        .flat_map(|q| q.split('&'))
        .any(|kv| matches!(kv, "overwrite" | "overwrite=true" | "overwrite=1"))
}

async fn enroll_start(
    State(state): State<Arc<AppState>>,
    RawQuery(query): RawQuery,
    body: Bytes,
) -> ApiResult<StartResponse> {
    let req: StartRequest = parse_body(&body)?;
    check_gesture_id(&req.gesture_id).map_err(|e| ApiError::unprocessable("invalid_request", e.to_string()))?;
    let required_reps = req.required_reps.unwrap_or(DEFAULT_REQUIRED_REPS);
    if !(1..=MAX_TEMPLATES).contains(&required_reps) {
        return Err(ApiError::unprocessable(
            "invalid_request",
            format!("required_reps {required_reps} is outside 1..={MAX_TEMPLATES}"),
        ));
    }
    let overwrite = overwrite_flag(query.as_deref());
    if !overwrite && state.store.contains(&req.gesture_id) {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "already_enrolled",
            format!(
                "gesture {} is already enrolled; pass ?overwrite=true to replace it",
                req.gesture_id
            ),
        ));
    }
    let session_id = Uuid::new_v4();
    state.sessions.lock().expect("sessions").insert(
        session_id,
        EnrollmentSession {
            gesture_id: req.gesture_id,
            overwrite,
            required_reps,
            collected: Vec::new(),
            state: SessionState::Collecting,
        },
    );
    Ok(Json(StartResponse {
        session_id,
        required_reps,
    }))
}

#[derive(Debug, Clone, Serialize)]
struct SecurityIndicator {
    mean_mi_bits: f64,
    band: &'static str,
    note: &'static str,
}

fn band(bits: f64) -> &'static str {
    if bits < WEAK_BELOW_BITS {
        "weak"
    } else if bits > STRONG_ABOVE_BITS {
        "strong"
    } else {
        "moderate"
    }
}

#[derive(Serialize)]
struct TraceResponse {
    accepted: bool,
    remaining: usize,
    state: SessionState,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    security: Option<SecurityIndicator>,
}

async fn enroll_trace(
    State(state): State<Arc<AppState>>,
    Path(session_id): Path<String>,
    body: Bytes,
) -> ApiResult<TraceResponse> {
    let unknown = || {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "unknown_session",
            format!("no enrollment session {session_id}"),
        )
    };
    let id = Uuid::parse_str(&session_id).map_err(|_| unknown())?;
    let mut sessions = state.sessions.lock().expect("sessions");
    let session = sessions.get_mut(&id).ok_or_else(unknown)?;
    if session.state == SessionState::Complete {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "session_complete",
            "enrollment already finished",
        ));
    }
    let trace = prepare_trace(parse_body(&body)?)?;
    let mut warnings = Vec::new();
    if let Some(first) = session.collected.first() {
        if first.finger_count() != trace.finger_count() {
            return Err(ApiError::unprocessable(
                "finger_count_mismatch",
                format!(
                    "trace has {} fingers but this enrollment uses {}; every repetition must use the same fingers",
                    trace.finger_count(),
                    first.finger_count()
                ),
            ));
        }
    }
    if trace.meta.gesture_id != session.gesture_id {
        warnings.push(format!(
            "trace names gesture {:?}; it is enrolled as {:?}",
            trace.meta.gesture_id, session.gesture_id
        ));
    }
    session.collected.push(trace);
    let remaining = session.required_reps - session.collected.len();
    if remaining > 0 {
        return Ok(Json(TraceResponse {
            accepted: true,
            remaining,
            state: SessionState::Collecting,
            warnings,
            security: None,
        }));
    }

    if !session.overwrite && state.store.contains(&session.gesture_id) {
        session.collected.pop();
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "already_enrolled",
            format!("gesture {} was enrolled by another session", session.gesture_id),
        ));
    }
    let ordered = align_fingers_to(&session.collected[0], &session.collected).map_err(ApiError::internal)?;
    let set = TemplateSet::from_traces(session.gesture_id.clone(), &ordered, DEFAULT_POINTS)
        .map_err(|e| ApiError::unprocessable("invalid_trace", e.to_string()))?;
    let security = if ordered.len() < 2 {
        warnings.push("a single repetition gives one template and no security estimate".into());
        None
    } else {
        match group_mean_mi(&ordered, &state.config.mi_config()) {
            Ok(g) => Some(SecurityIndicator {
                mean_mi_bits: g.mean_bits,
                band: band(g.mean_bits),
                note: "heuristic bands: below 15 bits weak, above 30 bits strong",
            }),
            Err(e) => {
                warnings.push(format!("no security estimate: {e}"));
                None
            }
        }
    };
    state.store.put(set).map_err(ApiError::internal)?;
    session.state = SessionState::Complete;
    tracing::info!(gesture = %session.gesture_id, reps = ordered.len(), "enrolled");
    Ok(Json(TraceResponse {
        accepted: true,
        remaining: 0,
        state: SessionState::Complete,
        warnings,
        security,
    }))
}

#[derive(Deserialize)]
struct AuthRequest {
    gesture_id: String,
    trace: TraceDoc,
    threshold: Option<f64>,
}

#[derive(Serialize)]
struct AuthResponse {
    accepted: bool,
    score: f64,
    threshold: f64,
    finger_count_mismatch: bool,
}

async fn auth(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<AuthResponse> {
    let req: AuthRequest = parse_body(&body)?;
    let set = state.store.get(&req.gesture_id).ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "unknown_gesture",
            format!("gesture {} is not enrolled", req.gesture_id),
        )
    })?;
    let threshold = req.threshold.unwrap_or(state.config.default_threshold);
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(ApiError::unprocessable(
            "invalid_request",
            format!("threshold {threshold} must be positive"),
        ));
    }
    let candidate = prepare_trace(req.trace)?;
    let m = match_trace(&candidate, &set, state.config.rotation_invariant)
        .map_err(|e| ApiError::unprocessable("invalid_trace", e.to_string()))?;
    let decision = decide(m.score, threshold);
    Ok(Json(AuthResponse {
        accepted: decision.accepted,
        score: decision.score,
        threshold,
        finger_count_mismatch: m.gate_failed,
    }))
}

#[derive(Deserialize)]
struct MiRequest {
    traces: Vec<TraceDoc>,
}

async fn analyze_mi(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<MiDoc> {
    let req: MiRequest = parse_body(&body)?;
    let [a, b]: [TraceDoc; 2] = req.traces.try_into().map_err(|v: Vec<TraceDoc>| {
        ApiError::unprocessable("invalid_request", format!("expected exactly 2 traces, got {}", v.len()))
    })?;
    let (a, b) = (prepare_trace(a)?, prepare_trace(b)?);
    match mutual_information(&a, &b, &state.config.mi_config()) {
        Ok(PairOutcome::Estimated(r)) => Ok(Json(MiDoc::from(&r))),
        Ok(PairOutcome::Incomparable { fingers_a, fingers_b }) => Err(ApiError::unprocessable(
            "incomparable",
            format!("incomparable traces: {fingers_a} fingers vs {fingers_b}"),
        )),
        Err(e) => Err(ApiError::unprocessable("incomparable", e.to_string())),
    }
}
