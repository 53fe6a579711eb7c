//! HTTP service behind the annotation UI.
//!
//! | method | path | response |
//! |--------|------|----------|
//! | GET | `/api/items/next?annotator=<id>` | 200 next blinded item, 204 when done |
//! | POST | `/api/ratings` | 201, 409 duplicate, 422 out of range |
//! | GET | `/api/progress?annotator=<id>` | `{"done","total"}` |
//! | GET | `/api/export` | JSON Lines of unblinded records |
//!
//! Unknown annotators get 404 and items outside an annotator's plan get 403.
//! Annotator-facing responses never carry system names.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use simpkit_core::human_eval::{AnnotationRecord, AssignmentPlan, Criterion, EvalItem, Slot};

use crate::store::{AppendError, RatingStore};

pub struct AppState {
    items: BTreeMap<String, EvalItem>,
    plan: AssignmentPlan,
    store: Mutex<RatingStore>,
}

impl AppState {
    /// Checks that every planned item exists.
    pub fn new(items: Vec<EvalItem>, plan: AssignmentPlan, store: RatingStore) -> crate::Result<Self> {
        let items: BTreeMap<String, EvalItem> =
            items.into_iter().map(|i| (i.item_id.clone(), i)).collect();
        if let Some(missing) = plan.assignments.iter().find(|p| !items.contains_key(&p.item_id)) {
            return Err(simpkit_core::Error::InvalidInput(format!(
                "plan assigns unknown item `{}`",
                missing.item_id
            ))
            .into());
        }
        Ok(Self {
            items,
            plan,
            store: Mutex::new(store),
        })
    }

    fn store(&self) -> MutexGuard<'_, RatingStore> {
        self.store.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn is_done(store: &RatingStore, item_id: &str, annotator: &str) -> bool {
        Slot::BOTH.iter().all(|&s| store.contains(item_id, annotator, s))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputView {
    pub slot: Slot,
    pub text: String,
}

/// What an annotator sees of an item.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ItemView {
    pub item_id: String,
    pub source: String,
    pub outputs: Vec<OutputView>,
    pub criteria: Vec<Criterion>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SlotRating {
    pub meaning: u8,
    pub simplicity: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatingSubmission {
    pub item_id: String,
    pub annotator: String,
    pub ratings: BTreeMap<Slot, SlotRating>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub done: usize,
    pub total: usize,
}

/// A rating with the system it was given to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportRecord {
    #[serde(flatten)]
    pub record: AnnotationRecord,
    pub system: String,
}

/// Attaches system names to records; records for unknown items are skipped.
pub fn unblind(items: &[EvalItem], records: &[AnnotationRecord]) -> Vec<ExportRecord> {
    let by_id: BTreeMap<&str, &EvalItem> = items.iter().map(|i| (i.item_id.as_str(), i)).collect();
    records
        .iter()
        .filter_map(|r| {
            by_id.get(r.item_id.as_str()).map(|item| ExportRecord {
                record: r.clone(),
                system: item.system(r.slot).to_string(),
            })
        })
        .collect()
}

#[derive(Deserialize)]
struct AnnotatorQuery {
    annotator: Option<String>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    #[derive(Serialize)]
    struct Body {
        error: String,
    }
    (status, Json(Body { error: message.into() })).into_response()
}

fn unknown_annotator(id: &str) -> Response {
    error(StatusCode::NOT_FOUND, format!("unknown annotator `{id}`"))
}

async fn next_item(State(state): State<Arc<AppState>>, Query(q): Query<AnnotatorQuery>) -> Response {
    let Some(annotator) = q.annotator else {
        return error(StatusCode::BAD_REQUEST, "missing `annotator` parameter");
    };
    if !state.plan.knows(&annotator) {
        return unknown_annotator(&annotator);
    }
    let store = state.store();
    let next = state
        .plan
        .queue(&annotator)
        .into_iter()
        .find(|id| !AppState::is_done(&store, id, &annotator));
    drop(store);
    let Some(id) = next else {
        return StatusCode::NO_CONTENT.into_response();
    };
    let item = &state.items[id];
    Json(ItemView {
        item_id: item.item_id.clone(),
        source: item.source.clone(),
        outputs: Slot::BOTH
            .iter()
            .map(|&slot| OutputView {
                slot,
                text: item.outputs.get(slot).clone(),
            })
            .collect(),
        criteria: Criterion::BOTH.to_vec(),
    })
    .into_response()
}

async fn post_ratings(State(state): State<Arc<AppState>>, Json(body): Json<RatingSubmission>) -> Response {
    if !state.plan.knows(&body.annotator) {
        return unknown_annotator(&body.annotator);
    }
    if !state.items.contains_key(&body.item_id) {
        return error(StatusCode::NOT_FOUND, format!("unknown item `{}`", body.item_id));
    }
    if !state.plan.is_assigned(&body.item_id, &body.annotator) {
        return error(
            StatusCode::FORBIDDEN,
            format!("item `{}` is not assigned to `{}`", body.item_id, body.annotator),
        );
    }
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64);
    let mut records = Vec::with_capacity(2);
    for slot in Slot::BOTH {
        let Some(r) = body.ratings.get(&slot) else {
            return error(
                StatusCode::UNPROCESSABLE_ENTITY,
                format!("missing ratings for slot {}", slot.as_char()),
            );
        };
        records.push(AnnotationRecord {
            item_id: body.item_id.clone(),
            annotator_id: body.annotator.clone(),
            slot,
            meaning: r.meaning,
            simplicity: r.simplicity,
            timestamp,
        });
    }
    match state.store().append(&records) {
        Ok(()) => (StatusCode::CREATED, Json(&records)).into_response(),
        Err(e @ AppendError::Duplicate { .. }) => error(StatusCode::CONFLICT, e.to_string()),
        Err(e @ AppendError::Invalid(_)) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        Err(AppendError::Io(e)) => {
            log::error!("{e}");
            error(StatusCode::INTERNAL_SERVER_ERROR, "could not store rating")
        }
    }
}

async fn progress(State(state): State<Arc<AppState>>, Query(q): Query<AnnotatorQuery>) -> Response {
    let store = state.store();
    let tasks: Vec<(&str, &str)> = match &q.annotator {
        Some(a) if !state.plan.knows(a) => return unknown_annotator(a),
        Some(a) => state.plan.queue(a).into_iter().map(|id| (id, a.as_str())).collect(),
        None => state
            .plan
            .assignments
            .iter()
            .flat_map(|p| [(p.item_id.as_str(), p.annotators.0.as_str()), (p.item_id.as_str(), p.annotators.1.as_str())])
            .collect(),
    };
    let done = tasks.iter().filter(|(i, a)| AppState::is_done(&store, i, a)).count();
    Json(Progress {
        done,
        total: tasks.len(),
    })
    .into_response()
}

async fn export(State(state): State<Arc<AppState>>) -> Response {
    let items: Vec<EvalItem> = state.items.values().cloned().collect();
    let records = state.store().records().to_vec();
    let mut body = String::new();
    for r in unblind(&items, &records) {
        body.push_str(&serde_json::to_string(&r).expect("records serialize"));
        body.push('\n');
    }
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response()
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/items/next", get(next_item))
        .route("/api/ratings", post(post_ratings))
        .route("/api/progress", get(progress))
        .route("/api/export", get(export))
        .with_state(state)
}

/// Binds `addr`, prints the bound address on stdout and serves until Ctrl-C.
pub async fn serve(state: AppState, addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    let local: SocketAddr = listener.local_addr()?;
    println!("listening on http://{local}");
    log::info!("serving annotation API on {local}");
    axum::serve(listener, router(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
