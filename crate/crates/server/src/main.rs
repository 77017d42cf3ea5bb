use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use regel_core::nlp::{Grammar, Model};
use regel_server::{app, AppState, Config};

#[derive(Parser)]
#[command(name = "regel-server", version, about = "HTTP/JSON service for regel")]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: String,
    /// Session time-to-live in seconds
    #[arg(long, default_value_t = 1800)]
    ttl: u64,
    /// Ceiling on one synthesis request in seconds
    #[arg(long, default_value_t = 60)]
    ceiling: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// Allowed CORS origin (any when unset)
    #[arg(long)]
    origin: Option<String>,
    #[arg(long)]
    grammar: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let grammar = match &args.grammar {
        Some(p) => Grammar::parse(&std::fs::read_to_string(p)?)?,
        None => Grammar::demo(),
    };
    let model: Model = match &args.model {
        Some(p) => std::fs::read_to_string(p)?.parse()?,
        None => Model::default(),
    };
    let mut cfg = Config { ttl: Duration::from_secs(args.ttl), ceiling: Duration::from_secs(args.ceiling), origin: args.origin, ..Config::default() };
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    let state = AppState::new(cfg, grammar, model);
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_expired();
        }
    });
    let listener = tokio::net::TcpListener::bind(&args.bind).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app(state)).await?;
    Ok(())
}
