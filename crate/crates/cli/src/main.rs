//! `specsel`: simulate candidate network models, compute Laplacian spectra,
//! select a model for an observed graph and run the simulation studies.
//!
//! Exit codes: 0 on success, 2 for invalid configuration or input, 3 for
//! failures during computation.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use specsel::harness::{emit_outputs, run_study, StudyConfig};
use specsel::io::write_atomic;
use specsel::pipeline::{select_model, SelectOptions};
use specsel::spectra::{spectra_csv, spectrum, SpectrumRow};
use specsel::{edgelist, rng, Error, Result};

use config::{load, resolve, SelectConfig, SimulateConfig, SpectrumConfig};

#[derive(Parser)]
#[command(name = "specsel", version, about = "Spectral model selection for network data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration for the command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Master seed; overrides the config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "SPECSEL_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw K graphs from one model and write them as edge lists.
    Simulate,
    /// Compute Laplacian spectra of edge-list files.
    Spectrum,
    /// Select the best-fitting candidate model for an observed graph.
    Select,
    /// Run one of the simulation studies.
    Study,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    }
    let config = cli.config.as_deref().ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    std::fs::create_dir_all(&cli.out).map_err(|e| Error::Io { path: cli.out.clone(), source: e })?;
    match cli.command {
        Command::Simulate => simulate(config, &cli.out, cli.seed),
        Command::Spectrum => spectrum_cmd(config, &cli.out),
        Command::Select => select(config, &cli.out, cli.seed),
        Command::Study => study(config, &cli.out, cli.seed),
    }
}

fn simulate(config: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let cfg: SimulateConfig = load(config, seed)?;
    cfg.model.validate()?;
    if cfg.k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if cfg.label.is_empty() || cfg.label.contains(['/', '\\']) {
        return Err(Error::Config(format!("invalid label {:?}", cfg.label)));
    }
    let width = cfg.k.to_string().len();
    let mut files = Vec::with_capacity(cfg.k);
    for i in 0..cfg.k {
        let child = rng::split(cfg.seed, i as u64);
        let g = cfg.model.sample_seeded(child)?;
        let name = format!("{}_{:0width$}.edges", cfg.label, i + 1);
        write_atomic(&out.join(&name), edgelist::to_string(&g).as_bytes())?;
        files.push(json!({ "file": name, "seed": child }));
    }
    let manifest = json!({
        "seed": cfg.seed,
        "k": cfg.k,
        "model": cfg.model,
        "files": files,
    });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomic(&out.join("manifest.json"), text.as_bytes())?;
    println!("wrote {} edge lists and manifest.json to {}", cfg.k, out.display());
    Ok(())
}

fn spectrum_cmd(config: &Path, out: &Path) -> Result<()> {
    let cfg: SpectrumConfig = load(config, None)?;
    let mut rows = Vec::new();
    for input in &cfg.inputs {
        for (i, file) in input.files.iter().enumerate() {
            let g = edgelist::read(&resolve(config, file))?;
            rows.push(SpectrumRow {
                model_label: input.label.clone(),
                replicate_id: i + 1,
                spectrum: spectrum(&g)?,
            });
        }
    }
    if rows.is_empty() {
        return Err(Error::Config("no input files listed".into()));
    }
    let path = out.join(&cfg.output);
    write_atomic(&path, spectra_csv(&rows)?.as_bytes())?;
    println!("wrote {} spectra to {}", rows.len(), path.display());
    Ok(())
}

fn select(config: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let cfg: SelectConfig = load(config, seed)?;
    let observed = edgelist::read(&resolve(config, &cfg.observed))?;
    let candidates: Vec<_> = cfg.candidates.into_iter().map(|c| (c.name, c.model)).collect();
    let opts = SelectOptions {
        k: cfg.k,
        seed: cfg.seed,
        features: cfg.features,
        classifier: cfg.classifier,
        params: cfg.params,
    };
    let report = select_model(&observed, &candidates, &opts)?;
    write_atomic(&out.join("report.json"), report.to_json().as_bytes())?;
    print!("{}", report.summary());
    for w in &report.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "selected {} (in-sample accuracy {:.3}, {:.1} s)",
        report.predicted_name(),
        report.diagnostics.in_sample_accuracy,
        report.wall_time.as_secs_f64()
    );
    Ok(())
}

fn study(config: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let cfg: StudyConfig = load(config, seed)?;
    cfg.validate()?;
    let table = run_study(&cfg)?;
    let stem = format!("study{}", cfg.study);
    let csv = out.join(format!("{stem}.csv"));
    let svg = out.join(format!("{stem}.svg"));
    emit_outputs(&table, &csv, Some(&svg))?;
    for r in &table {
        println!(
            "n={:<4} {:<28} {:<14} {:>4}/{:<4} rate {:.3} [{:.3}, {:.3}]",
            r.n, r.setting, r.classifier, r.successes, r.trials, r.rate, r.ci_low, r.ci_high
        );
    }
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}
