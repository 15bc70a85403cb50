use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use fppchaos::experiments::{self, ExperimentConfig, ExperimentKind};

/// Run a dynamical first-passage percolation experiment.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// scan, transition, valleys, var-scaling, oracle or lemmas
    experiment: ExperimentKind,
    /// Flat `key = value` config file; defaults apply without one.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Target vertex, e.g. `64,0`.
    #[arg(long)]
    v: Option<String>,
    /// Weight law, e.g. `uniform:0,1`, `exp:rate=1`, `atomic:1=0.5,2=0.5`.
    #[arg(long)]
    dist: Option<String>,
    /// `a:b:n` or a comma-separated list.
    #[arg(long = "t-grid")]
    t_grid: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    /// Output stem; `.csv`, `.json` and `.gp` are appended.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
}

fn load(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path, Some(cli.experiment))
            .with_context(|| format!("reading config {}", path.display()))?,
        None => ExperimentConfig::defaults(cli.experiment),
    };
    let overrides = [
        ("seed", "seed", cli.seed.map(|s| s.to_string())),
        ("v", "v", cli.v.clone()),
        ("dist", "dist", cli.dist.clone()),
        ("t-grid", "t_grid", cli.t_grid.clone()),
        ("samples", "n_samples", cli.samples.map(|s| s.to_string())),
        ("workers", "workers", cli.workers.map(|s| s.to_string())),
    ];
    for (flag, key, value) in overrides {
        if let Some(value) = value {
            cfg.set(key, &value).with_context(|| format!("--{flag}"))?;
        }
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors exit with 1; clap's default of 2 is reserved for failed checks.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match load(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    if let Some(warning) = cfg.dist.percolation_warning(cfg.d, None) {
        log::warn!("{warning}");
    }
    let result = experiments::run(&cfg);
    let code = experiments::exit_code(&result);
    match result {
        Ok(output) => {
            let written = match &cfg.out {
                Some(stem) => output.write_files(stem, cfg.plot).map(|paths| {
                    for p in paths {
                        log::info!("wrote {}", p.display());
                    }
                }),
                None => output
                    .table
                    .to_csv_string()
                    .and_then(|csv| std::io::stdout().write_all(csv.as_bytes()).map_err(Into::into)),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if output.failed {
                eprintln!("one or more checks failed; see the summary");
                if cfg.out.is_none() {
                    eprint!("{}", output.summary_string());
                }
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
