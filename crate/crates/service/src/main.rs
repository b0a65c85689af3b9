use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;
use fairbandit_core::DEFAULT_SCORE_NORMALIZER;
use fairbandit_service::{router, SessionStore, StoreConfig};

#[derive(Parser)]
#[command(name = "fairbandit-serve", version, about = "Turn allocation session service")]
struct Args {
    #[arg(long, env = "FAIRBANDIT_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Score normalizer M for sessions that do not set one.
    #[arg(long, env = "FAIRBANDIT_NORMALIZER", default_value_t = DEFAULT_SCORE_NORMALIZER)]
    normalizer: f64,
    #[arg(long, env = "FAIRBANDIT_SNAPSHOT_DIR")]
    snapshot_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    if !(args.normalizer > 0.0 && args.normalizer.is_finite()) {
        eprintln!("error: --normalizer must be positive");
        std::process::exit(2);
    }
    let store = Arc::new(SessionStore::new(StoreConfig {
        default_normalizer: args.normalizer,
        snapshot_dir: args.snapshot_dir,
    }));
    let listener = tokio::net::TcpListener::bind(args.listen).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store)).await
}
