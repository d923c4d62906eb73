//! JSON-over-HTTP API for the billiards engine.
//!
//! Every endpoint is a pure function of its request body. Rationals cross
//! the wire as `"p/q"` strings; plain numbers appear only in float-mode
//! orbit responses. Long computations stop at a wall-clock limit and return
//! what they have with `"status": "capped"`, and they stop early when the
//! client goes away.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::{Body, Bytes};
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use symbill_core::billiard::{FloatMap, FloatPhasePoint, OrbitMode, OrbitReport};
use symbill_core::families::{self, FamilySpec};
use symbill_core::geometry::ValidationReport;
use symbill_core::portrait::{self, Cell, Marker, Portrait, PortraitSpec};
use symbill_core::rational::{self, RatText};
use symbill_core::tiling::{certify_until, Budget, PeriodicityCertificate};
use symbill_core::{BilliardMap, OrbitOptions, PhasePoint, Polygon, PolygonSpec};
use tokio::sync::mpsc;
use tokio_stream::wrappers::ReceiverStream;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(30);
pub const MAX_ORBIT_STEPS: usize = 1_000_000;
pub const MAX_RESOLUTION: usize = 2048;
/// Cells per streamed portrait chunk, roughly.
const CHUNK_CELLS: usize = 1024;

#[derive(Clone, Debug)]
pub struct Config {
    /// Wall-clock limit for portraits and certificates.
    pub time_limit: Duration,
    /// Origin allowed by CORS; `None` allows any.
    pub allowed_origin: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config { time_limit: DEFAULT_TIME_LIMIT, allowed_origin: None }
    }
}

pub fn router(config: Config) -> Router {
    let origin = match &config.allowed_origin {
        Some(o) => AllowOrigin::exact(HeaderValue::from_str(o).expect("valid origin header")),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new().allow_origin(origin).allow_methods([Method::GET, Method::POST]).allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/api/families", get(families_handler))
        .route("/api/validate", post(validate_handler))
        .route("/api/orbit", post(orbit_handler))
        .route("/api/portrait", post(portrait_handler))
        .route("/api/certify", post(certify_handler))
        .route("/api/perturb", post(perturb_handler))
        .layer(cors)
        .with_state(Arc::new(config))
}

pub async fn serve(addr: SocketAddr, config: Config) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}

type AppState = State<Arc<Config>>;

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl ApiError {
    fn bad(msg: impl ToString) -> Self {
        ApiError(StatusCode::BAD_REQUEST, msg.to_string())
    }

    fn internal(msg: impl ToString) -> Self {
        ApiError(StatusCode::INTERNAL_SERVER_ERROR, msg.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad(format!("invalid request: {e}")))
}

/// Either raw vertices or a family member.
#[derive(Debug, Deserialize)]
struct Target {
    #[serde(default)]
    polygon: Option<PolygonSpec>,
    #[serde(default)]
    family: Option<FamilySpec>,
}

impl Target {
    fn build(&self) -> Result<Polygon, ApiError> {
        match (&self.polygon, &self.family) {
            (Some(spec), None) => spec.validate().map(|(p, _)| p).map_err(ApiError::bad),
            (None, Some(fam)) => fam.build().map_err(ApiError::bad),
            _ => Err(ApiError::bad("give exactly one of \"polygon\" and \"family\"")),
        }
    }
}

/// Set when the request future is dropped, i.e. the client disconnected.
struct CancelOnDrop(Arc<AtomicBool>);

impl Drop for CancelOnDrop {
    fn drop(&mut self) {
        self.0.store(true, Ordering::Relaxed);
    }
}

fn cancel_flag() -> (CancelOnDrop, Arc<AtomicBool>) {
    let flag = Arc::new(AtomicBool::new(false));
    (CancelOnDrop(flag.clone()), flag)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(ApiError::internal)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    Capped,
}

async fn families_handler() -> Json<Vec<families::FamilyInfo>> {
    Json(families::catalog())
}

#[derive(Serialize)]
struct ValidateResponse {
    polygon: Polygon,
    report: ValidationReport,
}

async fn validate_handler(body: Bytes) -> ApiResult<ValidateResponse> {
    let spec: PolygonSpec = parse(&body)?;
    let (polygon, report) = spec.validate().map_err(ApiError::bad)?;
    Ok(Json(ValidateResponse { polygon, report }))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PhaseInput {
    Text(String),
    Point(PhasePoint),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct OrbitRequest {
    #[serde(flatten)]
    target: Target,
    phase: PhaseInput,
    #[serde(default = "default_orbit_steps")]
    max_steps: usize,
    #[serde(default)]
    mode: Option<OrbitMode>,
}

fn default_orbit_steps() -> usize {
    1000
}

/// A chord drawn in the plane: exact endpoints as text, float endpoints as
/// numbers.
#[derive(Serialize)]
#[serde(untagged)]
enum Chord {
    Exact(Box<[[RatText; 2]; 2]>),
    Float([[f64; 2]; 2]),
}

#[derive(Serialize)]
struct OrbitResponse {
    #[serde(flatten)]
    report: OrbitReport,
    period: Option<usize>,
    chords: Vec<Chord>,
}

fn exact_chord(map: &BilliardMap, pp: &PhasePoint) -> Chord {
    let (a, b) = map.chord(pp);
    Chord::Exact(Box::new([[RatText(a.x), RatText(a.y)], [RatText(b.x), RatText(b.y)]]))
}

fn float_chord(vertices: &[[f64; 2]], pp: &FloatPhasePoint) -> Chord {
    let n = vertices.len();
    let at = |side: usize, t: f64| {
        let (p, q) = (vertices[side], vertices[(side + 1) % n]);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    };
    Chord::Float([at(pp.tail_side, pp.tail), at(pp.head_side, pp.head)])
}

async fn orbit_handler(body: Bytes) -> ApiResult<OrbitResponse> {
    let req: OrbitRequest = parse(&body)?;
    if req.max_steps == 0 || req.max_steps > MAX_ORBIT_STEPS {
        return Err(ApiError::bad(format!("maxSteps must be in 1..={MAX_ORBIT_STEPS}")));
    }
    let polygon = req.target.build()?;
    let start = match &req.phase {
        PhaseInput::Text(t) => PhasePoint::parse(&polygon, t).map_err(ApiError::bad)?,
        PhaseInput::Point(p) => PhasePoint::new(&polygon, p.tail_side, p.tail.clone(), p.head_side, p.head.clone()).map_err(ApiError::bad)?,
    };
    let mode = req.mode.unwrap_or(OrbitMode::Exact);
    let max_steps = req.max_steps;
    let resp = blocking(move || {
        let map = BilliardMap::new(polygon);
        match mode {
            OrbitMode::Exact => {
                let report = map.orbit(&start, OrbitOptions::new(max_steps).collecting());
                let chords = report.points.iter().flatten().map(|p| exact_chord(&map, p)).collect();
                OrbitResponse { period: report.status.period(), report, chords }
            }
            OrbitMode::Float => {
                let report = FloatMap::new(&map).orbit(&FloatPhasePoint::from(&start), max_steps, true);
                let vertices = map.polygon().to_f64();
                let chords = report.float_points.iter().flatten().map(|p| float_chord(&vertices, p)).collect();
                OrbitResponse { period: report.status.period(), report, chords }
            }
        }
    })
    .await?;
    Ok(Json(resp))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Resolution {
    Square(usize),
    Rect([usize; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct PortraitRequest {
    #[serde(flatten)]
    target: Target,
    resolution: Resolution,
    #[serde(default = "default_portrait_steps")]
    max_steps: usize,
    #[serde(default)]
    mode: Option<OrbitMode>,
    /// Answer with NDJSON: one line per finished chunk of rows, then the
    /// portrait.
    #[serde(default)]
    stream: bool,
}

fn default_portrait_steps() -> usize {
    200
}

#[derive(Serialize)]
struct PortraitResponse {
    status: Status,
    #[serde(flatten)]
    portrait: Portrait,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum PortraitEvent<'a> {
    /// Cells of rows `rows[0]..rows[1]`, row-major.
    Rows { rows: [usize; 2], cells: &'a [Cell] },
    Portrait(&'a PortraitResponse),
}

/// Computes the portrait chunk by chunk, handing every chunk to `emit`.
/// Stops when `emit` returns false or the deadline passes; rows never
/// reached are filled with the capped marker.
fn portrait_in_chunks(map: &BilliardMap, spec: PortraitSpec, deadline: Instant, mut emit: impl FnMut([usize; 2], &[Cell]) -> bool) -> PortraitResponse {
    let [nx, ny] = spec.resolution;
    let step = (CHUNK_CELLS / nx).max(1);
    let mut cells = Vec::with_capacity(nx * ny);
    let mut status = Status::Complete;
    let mut row = 0;
    while row < ny {
        if Instant::now() >= deadline {
            status = Status::Capped;
            break;
        }
        let end = (row + step).min(ny);
        let chunk = portrait::compute_rows(map, &spec, row..end);
        let keep_going = emit([row, end], &chunk);
        cells.extend(chunk);
        row = end;
        if !keep_going {
            status = Status::Capped;
            break;
        }
    }
    cells.resize(nx * ny, Cell::Marker(Marker::Capped));
    PortraitResponse { status, portrait: portrait::assemble(map.polygon(), spec, cells) }
}

fn ndjson_line(value: &impl Serialize) -> Bytes {
    let mut line = serde_json::to_vec(value).expect("serializable");
    line.push(b'\n');
    Bytes::from(line)
}

async fn portrait_handler(State(config): AppState, body: Bytes) -> Result<Response, ApiError> {
    let req: PortraitRequest = parse(&body)?;
    let [nx, ny] = match req.resolution {
        Resolution::Square(n) => [n, n],
        Resolution::Rect(r) => r,
    };
    if !(2..=MAX_RESOLUTION).contains(&nx) || !(2..=MAX_RESOLUTION).contains(&ny) {
        return Err(ApiError::bad(format!("resolution must be between 2 and {MAX_RESOLUTION}")));
    }
    if req.max_steps == 0 || req.max_steps > MAX_ORBIT_STEPS {
        return Err(ApiError::bad(format!("maxSteps must be in 1..={MAX_ORBIT_STEPS}")));
    }
    let polygon = req.target.build()?;
    let mut spec = PortraitSpec::new(nx, ny, req.max_steps);
    if let Some(mode) = req.mode {
        spec = spec.with_mode(mode);
    }
    let deadline = Instant::now() + config.time_limit;

    if req.stream {
        // A closed channel means the client is gone.
        let (tx, rx) = mpsc::channel::<Result<Bytes, std::io::Error>>(4);
        tokio::task::spawn_blocking(move || {
            let map = BilliardMap::new(polygon);
            let done = portrait_in_chunks(&map, spec, deadline, |rows, cells| tx.blocking_send(Ok(ndjson_line(&PortraitEvent::Rows { rows, cells }))).is_ok());
            let _ = tx.blocking_send(Ok(ndjson_line(&PortraitEvent::Portrait(&done))));
        });
        return Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], Body::from_stream(ReceiverStream::new(rx))).into_response());
    }

    let (_guard, cancelled) = cancel_flag();
    let resp = blocking(move || {
        let map = BilliardMap::new(polygon);
        portrait_in_chunks(&map, spec, deadline, |_, _| !cancelled.load(Ordering::Relaxed))
    })
    .await?;
    Ok(Json(resp).into_response())
}

#[derive(Debug, Deserialize)]
struct CertifyRequest {
    #[serde(flatten)]
    target: Target,
    #[serde(default)]
    budget: Option<Budget>,
}

#[derive(Serialize)]
struct CertifyResponse {
    status: Status,
    /// Periods of generic points, over all tile orbits.
    periods: Vec<usize>,
    certificate: PeriodicityCertificate,
}

async fn certify_handler(State(config): AppState, body: Bytes) -> ApiResult<CertifyResponse> {
    let req: CertifyRequest = parse(&body)?;
    let polygon = req.target.build()?;
    let budget = req.budget.unwrap_or_default();
    let deadline = Instant::now() + config.time_limit;
    let (_guard, cancelled) = cancel_flag();
    let resp = blocking(move || {
        let map = BilliardMap::new(polygon);
        let stopped = AtomicBool::new(false);
        let stop = || {
            let s = cancelled.load(Ordering::Relaxed) || Instant::now() >= deadline;
            if s {
                stopped.store(true, Ordering::Relaxed);
            }
            s
        };
        let certificate = certify_until(&map, budget, &stop).map_err(ApiError::internal)?;
        let status = if stopped.load(Ordering::Relaxed) { Status::Capped } else { Status::Complete };
        Ok::<_, ApiError>(CertifyResponse { status, periods: certificate.point_periods().into_iter().collect(), certificate })
    })
    .await??;
    Ok(Json(resp))
}

#[derive(Debug, Deserialize)]
struct PerturbRequest {
    #[serde(flatten)]
    target: Target,
    eps: RatText,
    #[serde(default)]
    seed: u64,
}

#[derive(Serialize)]
struct PerturbResponse {
    polygon: Polygon,
    eps: RatText,
    seed: u64,
}

async fn perturb_handler(body: Bytes) -> ApiResult<PerturbResponse> {
    let req: PerturbRequest = parse(&body)?;
    if req.eps.0 < rational::int(0) {
        return Err(ApiError::bad("eps must be non-negative"));
    }
    let polygon = families::perturb(&req.target.build()?, &req.eps.0, req.seed).map_err(ApiError::bad)?;
    Ok(Json(PerturbResponse { polygon, eps: req.eps, seed: req.seed }))
}
