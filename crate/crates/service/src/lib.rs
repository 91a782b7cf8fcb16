//! HTTP navigation service: sessions that walk a class model by ear, cue
//! audio, the model tree and full walkthroughs.

mod error;
mod routes;
mod state;

pub use error::ApiError;
pub use routes::router;
pub use state::{AppState, ServiceConfig};

use std::sync::Arc;

use tokio::net::TcpListener;

/// Serves `state` on `listener` until the process is stopped, sweeping idle
/// sessions in the background.
pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    let reaper = state::spawn_reaper(state.clone());
    let result = axum::serve(listener, router(state)).await;
    reaper.abort();
    result
}
