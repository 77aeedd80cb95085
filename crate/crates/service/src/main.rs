use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use binx_core::api::Workbench;
use binx_service::{router, ServiceConfig, MAX_BODY_BYTES};
use clap::Parser;
use tracing_subscriber::EnvFilter;

/// HTTP API for the binx choropleth binning workbench.
#[derive(Debug, Parser)]
#[command(name = "binx-service", version)]
struct Args {
    /// Address to listen on.
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directory for datasets, custom methods and palettes; reloaded on
    /// start. Without it everything stays in memory.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Origin allowed to call the API from a browser (repeatable). Any
    /// origin is allowed when none is given.
    #[arg(long = "cors-origin")]
    cors_origins: Vec<String>,
    /// Largest accepted request body in bytes.
    #[arg(long, default_value_t = MAX_BODY_BYTES)]
    max_body_bytes: usize,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")),
        )
        .init();
    let args = Args::parse();
    let workbench = match &args.data_dir {
        Some(dir) => Workbench::open(dir)?,
        None => Workbench::new(),
    };
    let config = ServiceConfig {
        cors_origins: args.cors_origins,
        max_body_bytes: args.max_body_bytes,
    };
    let app = router(Arc::new(workbench), &config);
    let listener = tokio::net::TcpListener::bind(args.addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
