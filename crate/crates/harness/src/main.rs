use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nearbest_harness::config::ExperimentConfig;
use nearbest_harness::export::{geometry_csv, geometry_samples};
use nearbest_harness::rates::{fit_rate, read_csv_column, RateModel};
use nearbest_harness::run::{build_scenario, polynomial_json, rows_to_csv, rows_to_json, run_entable, run_scenario, entable_to_csv};
use nearbest_harness::verify::verify_suite;
use nearbest_harness::RunOptions;

const EXIT_INVARIANT: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "nearbest", version, about = "Near-best polynomial approximation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides the config's `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Minimax relative-change tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Gauss–Legendre nodes per quadrature panel.
    #[arg(long, global = true)]
    panels: Option<usize>,
    /// Worker threads for the degree sweep.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Record wall-clock times in `wall_ms`.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full sweep: E_n, construction, errors; writes CSV and JSON.
    Run { config: PathBuf },
    /// E_n table only.
    Entable { config: PathBuf },
    /// One polynomial as JSON.
    Construct {
        config: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Rate fit of one CSV column.
    Rates {
        csv: PathBuf,
        /// geometric, powerlaw, stretched or stretched:<σ>.
        #[arg(long)]
        model: String,
        #[arg(long)]
        column: String,
    },
    /// Invariant report; exit status 1 when a hard check fails.
    Verify { config: PathBuf },
    /// Arc, level lines and Γ-rays as CSV.
    ExportGeometry {
        config: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

struct Failure(u8, String);

fn config_error(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_CONFIG, msg.to_string())
}

fn load(cli: &Cli, path: &Path) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::load(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(config_error("--tol must be positive"));
        }
        cfg.tol = t;
    }
    if let Some(p) = cli.panels {
        if p == 0 {
            return Err(config_error("--panels must be positive"));
        }
        cfg.order = p;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> Result<PathBuf, Failure> {
    let dir = cli.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("results"));
    std::fs::create_dir_all(&dir).map_err(|e| Failure(EXIT_CONFIG, format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(EXIT_CONFIG, format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn scenario(cfg: &ExperimentConfig) -> Result<nearbest::Scenario, Failure> {
    build_scenario(cfg).map_err(|e| match e {
        nearbest::Error::InadmissibleLemniscate(_) => Failure(EXIT_INVARIANT, format!("scenario: {e}")),
        _ => config_error(format!("scenario: {e}")),
    })
}

fn execute(cli: &Cli) -> Result<u8, Failure> {
    let options = RunOptions { timings: cli.timings };
    match &cli.command {
        Command::Run { config } => {
            let cfg = load(cli, config)?;
            let s = scenario(&cfg)?;
            let rows = run_scenario(&cfg, &s, options);
            let dir = out_dir(cli, &cfg)?;
            let csv = rows_to_csv(&cfg.compact, &rows);
            print!("{csv}");
            write(&dir.join(format!("{}.csv", cfg.name)), &csv)?;
            write(&dir.join(format!("{}.json", cfg.name)), &rows_to_json(&cfg, &s, &rows))?;
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                eprintln!("{failed} row(s) failed");
                return Ok(EXIT_INVARIANT);
            }
            Ok(0)
        }
        Command::Entable { config } => {
            let cfg = load(cli, config)?;
            let s = scenario(&cfg)?;
            let rows = run_entable(&cfg, &s, options);
            let csv = entable_to_csv(&rows);
            print!("{csv}");
            write(&out_dir(cli, &cfg)?.join(format!("{}_entable.csv", cfg.name)), &csv)?;
            Ok(if rows.iter().all(|r| r.is_ok()) { 0 } else { EXIT_INVARIANT })
        }
        Command::Construct { config, n } => {
            let cfg = load(cli, config)?;
            let s = scenario(&cfg)?;
            let p = s.construct(*n).map_err(|e| Failure(EXIT_INVARIANT, format!("construction: {e}")))?;
            write(&out_dir(cli, &cfg)?.join(format!("{}_n{n}.json", cfg.name)), &polynomial_json(&cfg, &s, &p))?;
            Ok(0)
        }
        Command::Rates { csv, model, column } => {
            let model = RateModel::parse(model).map_err(config_error)?;
            let text = std::fs::read_to_string(csv).map_err(|e| config_error(format!("{}: {e}", csv.display())))?;
            let points = read_csv_column(&text, column).map_err(config_error)?;
            let fit = fit_rate(&points, model).map_err(|e| Failure(EXIT_INVARIANT, e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&fit).expect("serializable"));
            if fit.no_decay {
                eprintln!("no decay: b = {}", fit.b);
            }
            Ok(0)
        }
        Command::Verify { config } => {
            let cfg = load(cli, config)?;
            let report = verify_suite(&cfg, options);
            print!("{}", report.render());
            Ok(if report.hard_failures() > 0 { EXIT_INVARIANT } else { 0 })
        }
        Command::ExportGeometry { config, samples } => {
            let cfg = load(cli, config)?;
            let s = scenario(&cfg)?;
            let pts = geometry_samples(&cfg, &s, (*samples).max(2)).map_err(|e| Failure(EXIT_INVARIANT, format!("geometry: {e}")))?;
            write(&out_dir(cli, &cfg)?.join(format!("{}_geometry.csv", cfg.name)), &geometry_csv(&pts))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
