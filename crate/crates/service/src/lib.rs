//! HTTP service for the modelling workbench.
//!
//! JSON over HTTP: `/api/check`, `/api/solve` and `/api/diagnose` run the
//! engine on a [`Submission`](api::Submission); `/api/puzzles` serves the
//! corpus; `/api/saves` keeps named work per anonymous cookie session. Every
//! accepted check, solve or diagnose request is appended to the usage log.
//! Field names are documented in `docs/api.md`.

pub mod api;
pub mod pool;
pub mod saves;
pub mod usage;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{DefaultBodyLimit, Request};
use axum::http::{header, HeaderValue};
use axum::middleware::{self, Next};
use axum::response::Response;
use axum::routing::{get, post};
use axum::Router;
use lff_core::corpus::Corpus;

use crate::pool::Pool;
use crate::saves::SaveStore;
use crate::usage::UsageLog;

/// Largest accepted request body.
pub const BODY_LIMIT: usize = 256 * 1024;
pub const QUEUE_DEPTH: usize = 32;
pub const SESSION_COOKIE: &str = "lff_session";

#[derive(Clone, Debug)]
pub struct Config {
    pub port: u16,
    pub log_path: Option<PathBuf>,
    /// Where saves are kept; in memory only when unset.
    pub data_dir: Option<PathBuf>,
    pub max_deadline: Duration,
    pub workers: usize,
    pub queue_depth: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            port: 8080,
            log_path: None,
            data_dir: None,
            max_deadline: Duration::from_secs(30),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            queue_depth: QUEUE_DEPTH,
        }
    }
}

impl Config {
    /// Reads `LFF_PORT`, `LFF_LOG_PATH`, `LFF_DATA_DIR` and
    /// `LFF_MAX_DEADLINE_SECS` over the defaults.
    pub fn from_env() -> Result<Config, String> {
        let mut c = Config::default();
        let var = |k: &str| std::env::var(k).ok().filter(|v| !v.is_empty());
        if let Some(p) = var("LFF_PORT") {
            c.port = p.parse().map_err(|_| format!("LFF_PORT: `{p}` is not a port"))?;
        }
        c.log_path = var("LFF_LOG_PATH").map(PathBuf::from);
        c.data_dir = var("LFF_DATA_DIR").map(PathBuf::from);
        if let Some(s) = var("LFF_MAX_DEADLINE_SECS") {
            let secs: u64 = s.parse().map_err(|_| format!("LFF_MAX_DEADLINE_SECS: `{s}` is not a number"))?;
            if secs == 0 {
                return Err("LFF_MAX_DEADLINE_SECS must be positive".into());
            }
            c.max_deadline = Duration::from_secs(secs);
        }
        Ok(c)
    }
}

pub struct AppState {
    pub corpus: Corpus,
    pub saves: SaveStore,
    pub log: UsageLog,
    pub pool: Pool,
    pub max_deadline: Duration,
}

impl AppState {
    pub fn new(config: &Config) -> std::io::Result<AppState> {
        let saves = match &config.data_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                SaveStore::persistent(dir.join("saves.json"))?
            }
            None => SaveStore::in_memory(),
        };
        let log = match &config.log_path {
            Some(p) => UsageLog::open(p)?,
            None => UsageLog::disabled(),
        };
        Ok(AppState {
            corpus: Corpus::builtin(),
            saves,
            log,
            pool: Pool::new(config.workers, config.queue_depth),
            max_deadline: config.max_deadline,
        })
    }
}

/// The anonymous session of a request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Session(pub String);

fn cookie_session(req: &Request) -> Option<String> {
    req.headers()
        .get_all(header::COOKIE)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .flat_map(|v| v.split(';'))
        .filter_map(|kv| kv.trim().split_once('='))
        .find(|(k, v)| *k == SESSION_COOKIE && !v.is_empty() && v.len() <= 64)
        .map(|(_, v)| v.to_string())
}

/// Attaches a [`Session`], issuing a cookie on first contact.
async fn sessions(mut req: Request, next: Next) -> Response {
    let (id, fresh) = match cookie_session(&req) {
        Some(id) => (id, false),
        None => (uuid::Uuid::new_v4().to_string(), true),
    };
    req.extensions_mut().insert(Session(id.clone()));
    let mut res = next.run(req).await;
    if fresh {
        let cookie = format!("{SESSION_COOKIE}={id}; Path=/; HttpOnly; SameSite=Lax; Max-Age=31536000");
        if let Ok(v) = HeaderValue::from_str(&cookie) {
            res.headers_mut().append(header::SET_COOKIE, v);
        }
    }
    res
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/check", post(api::check))
        .route("/api/solve", post(api::solve))
        .route("/api/diagnose", post(api::diagnose_handler))
        .route("/api/puzzles", get(api::list_puzzles))
        .route("/api/puzzles/{id}", get(api::get_puzzle))
        .route("/api/saves", get(api::list_saves).post(api::create_save))
        .route("/api/saves/{id}", get(api::get_save).put(api::update_save).delete(api::delete_save))
        .layer(middleware::from_fn(sessions))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

/// Binds `0.0.0.0:port` and serves until interrupted.
pub async fn serve(config: Config) -> std::io::Result<()> {
    let state = Arc::new(AppState::new(&config)?);
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([0, 0, 0, 0], config.port))).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
