use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use srmap_cli::batch::{evaluate_files, read_stoplist, run_files, summarize_file, synth_files};
use srmap_cli::server::{router, AppState};
use srmap_core::graphs::DEFAULT_K;
use srmap_core::pipeline::PipelineConfig;
use srmap_core::projection::ProjectionConfig;
use srmap_core::synthetic::DatasetShape;

#[derive(Parser)]
#[command(name = "srmap", version, about = "Content-map screening for systematic review updates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse a previous review plus a new search and write the artifacts.
    Run(RunArgs),
    /// Score decisions against oracle labels.
    Evaluate {
        decisions: PathBuf,
        oracle: PathBuf,
        #[arg(long, default_value = "1")]
        subject: String,
        #[arg(long, default_value_t = 0.0)]
        minutes: f64,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Summarize per-subject rows (group,subject,minutes,ci,ce,ii,ie).
    Summarize { results: PathBuf },
    /// Write a synthetic review (previous.bib, new.bib, oracle.json).
    Synth {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 63)]
        included: usize,
        #[arg(long, default_value_t = 34)]
        excluded: usize,
        #[arg(long, default_value_t = 13)]
        new: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, default_value = "sessions")]
        data_dir: PathBuf,
        #[arg(long)]
        stoplist: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    previous: PathBuf,
    new: PathBuf,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = ProjectionConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = ProjectionConfig::default().max_iterations)]
    iterations: usize,
    #[arg(long, default_value_t = ProjectionConfig::default().tolerance)]
    tolerance: f64,
    /// One stop word per line; defaults to the bundled English list.
    #[arg(long)]
    stoplist: Option<PathBuf>,
    #[arg(long, default_value = "srmap-out")]
    out: PathBuf,
    /// Also write the tf-idf matrix.
    #[arg(long)]
    matrix: bool,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run(a) => {
            let stoplist = read_stoplist(a.stoplist.as_deref())?;
            let config = PipelineConfig { k: a.k, seed: a.seed, max_iterations: a.iterations, tolerance: a.tolerance };
            let out = run_files(&a.previous, &a.new, &stoplist, config, &a.out, a.matrix)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", out.report);
            for p in &out.written {
                println!("wrote {}", p.display());
            }
        }
        Command::Evaluate { decisions, oracle, subject, minutes, json } => {
            let r = evaluate_files(&decisions, &oracle, &subject, minutes)?;
            if json {
                let mut v = serde_json::to_value(&r)?;
                v["schema"] = "srmap.evaluation/v1".into();
                v["correct"] = r.counts.correct().into();
                v["incorrect"] = r.counts.incorrect().into();
                v["percent_correct"] = (100.0 * r.percent_correct()).into();
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                let c = r.counts;
                println!(
                    "correct {} ({:.1}%): {} included, {} excluded; incorrect {}: {} included, {} excluded",
                    c.correct(),
                    100.0 * r.percent_correct(),
                    c.correctly_included,
                    c.correctly_excluded,
                    c.incorrect(),
                    c.incorrectly_included,
                    c.incorrectly_excluded
                );
            }
        }
        Command::Summarize { results } => print!("{}", summarize_file(&results)?),
        Command::Synth { seed, included, excluded, new, out } => {
            let shape = DatasetShape { included, excluded, to_evaluate: new };
            for p in synth_files(seed, shape, &out)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Serve { addr, data_dir, stoplist } => {
            std::fs::create_dir_all(&data_dir)?;
            let state = Arc::new(AppState::new(data_dir, read_stoplist(stoplist.as_deref())?));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(&addr).await?;
                println!("listening on http://{}", listener.local_addr()?);
                axum::serve(listener, router(state)).await?;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(())
}
