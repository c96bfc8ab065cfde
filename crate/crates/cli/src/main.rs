use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vbm_core::bench::{self, CaseId, CaseReport, GainAxis, Verdict};
use vbm_core::config::{parse_config, RunConfig};
use vbm_core::ns::SchemeKind;
use vbm_core::output::{write_table, RunWriter};
use vbm_core::stability::{self, C_MAX_2D};

#[derive(Parser)]
#[command(name = "vbm", version, about = "Virtual boundary method solver and benchmark harness")]
struct Cli {
    /// Worker threads for independent runs (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `dotted.key=value`, applied after the file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory, replacing `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured case.
    Run(ConfigArgs),
    /// Run benchmark presets and check them against their reference data.
    Bench {
        /// Cases to run (default: all).
        #[arg(long = "case")]
        cases: Vec<CaseId>,
        /// `dotted.key=value` applied to every case; repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Stability region of the feedback-forced model problem.
    Stability {
        #[arg(long, value_enum, default_value = "bdf1")]
        scheme: Scheme,
        /// Derivative gain gamma (non-positive).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        gamma: f64,
        /// Sweep extent in -alpha dt^2.
        #[arg(long, default_value_t = 20.0)]
        x_max: f64,
        /// Sweep extent in -beta dt.
        #[arg(long, default_value_t = 10.0)]
        y_max: f64,
        /// Points per axis.
        #[arg(long, default_value_t = 400)]
        n: usize,
        /// Classify by short flow runs of the transverse-oscillation case
        /// instead of the Jury test; `n` is then best kept small.
        #[arg(long)]
        flow: bool,
        /// Steps per flow run.
        #[arg(long, default_value_t = 600)]
        steps: usize,
        #[arg(long, default_value = "runs/stability")]
        out: PathBuf,
    },
    /// Vary one gain of a configured cylinder case.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        axis: GainAxis,
        /// Comma-separated values along the axis.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Bdf1,
    Bdf2,
}

impl From<Scheme> for SchemeKind {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Bdf1 => SchemeKind::Bdf1,
            Scheme::Bdf2 => SchemeKind::Bdf2,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::error!("cannot set worker count: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(v) => ExitCode::from(v.exit_code() as u8),
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<Verdict> {
    match command {
        Command::Run(args) => {
            let config = load(&args)?;
            run_one(&config)
        }
        Command::Bench { cases, overrides, out } => bench_cases(cases, &overrides, &out),
        Command::Stability { scheme, gamma, x_max, y_max, n, flow, steps, out } => {
            stability_sweep(scheme.into(), gamma, x_max, y_max, n, flow.then_some(steps), &out)
        }
        Command::Sweep { config, axis, values } => {
            let cfg = load(&config)?;
            sweep(&cfg, axis, &values)
        }
    }
}

fn load(args: &ConfigArgs) -> Result<RunConfig> {
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None if args.overrides.iter().any(|o| o.trim_start().starts_with("case")) => String::new(),
        None => bail!("--config is required unless --override case=<name> is given"),
    };
    let parsed = parse_config(&text, &args.overrides)?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    let mut config = parsed.config;
    if let Some(out) = &args.out {
        config.output.dir = out.to_string_lossy().into_owned();
    }
    Ok(config)
}

fn run_one(config: &RunConfig) -> Result<Verdict> {
    let mut writer = RunWriter::create(&config.output.dir, config)?;
    let case = config.benchmark();
    let mut last_pct = 0;
    let report = bench::run_case_observed(&case, |view| {
        let pct = 100 * view.step / view.steps.max(1);
        if pct >= last_pct + 10 {
            last_pct = pct;
            log::info!("{}: step {}/{}", case.id.name(), view.step, view.steps);
        }
        writer.observe(view);
    })?;
    let dir = writer.finish(&report)?;
    print_report(&report);
    log::info!("outputs in {}", dir.display());
    Ok(report.verdict())
}

fn print_report(report: &CaseReport) {
    println!("{}", report.id.name());
    for (k, v) in &report.metrics {
        println!("  {k:<22} {v}");
    }
    for c in &report.checks {
        let value = c.value.map_or("missing".to_string(), |v| v.to_string());
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("  {status} {} = {value} in [{}, {}] ({})", c.metric, c.min, c.max, c.reference);
    }
    if let Some(f) = &report.failure {
        println!("  solver failure: {f}");
    }
    println!("  verdict: {:?}", report.verdict());
}

fn bench_cases(cases: Vec<CaseId>, overrides: &[String], out: &Path) -> Result<Verdict> {
    use rayon::prelude::*;
    let cases = if cases.is_empty() { CaseId::ALL.to_vec() } else { cases };
    let configs = cases
        .iter()
        .map(|id| {
            let text = format!("case = \"{}\"\n", id.name());
            let mut cfg = parse_config(&text, overrides)?.config;
            cfg.output.dir = out.join(id.name()).to_string_lossy().into_owned();
            Ok(cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let verdicts: Vec<Verdict> = configs.par_iter().map(|c| run_one(c).unwrap_or(Verdict::SolverError)).collect();
    Ok(verdicts.into_iter().max_by_key(|v| v.exit_code()).unwrap_or(Verdict::Pass))
}

#[derive(Serialize)]
struct MapRow {
    neg_alpha_dt2: f64,
    neg_beta_dt: f64,
    verdict: String,
}

fn stability_sweep(
    scheme: SchemeKind,
    gamma: f64,
    x_max: f64,
    y_max: f64,
    n: usize,
    flow_steps: Option<usize>,
    out: &Path,
) -> Result<Verdict> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let region = stability::analytic_region(scheme, gamma, C_MAX_2D);
    let rows: Vec<MapRow> = match flow_steps {
        None => stability::numeric_region(scheme, gamma, C_MAX_2D, x_max, y_max, n)
            .into_iter()
            .map(|(x, y, v)| MapRow { neg_alpha_dt2: x, neg_beta_dt: y, verdict: format!("{v:?}").to_lowercase() })
            .collect(),
        Some(steps) => {
            let case = bench::BenchmarkCase::transverse_oscillation(0.9);
            let points: Vec<(f64, f64)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let d = (n.max(2) - 1) as f64;
                    (x_max * i as f64 / d, y_max * j as f64 / d)
                })
                .collect();
            let map = bench::stability_map_experiment(&case, scheme, -gamma, &points, steps)?;
            map.points
                .into_iter()
                .map(|p| MapRow {
                    neg_alpha_dt2: p.x,
                    neg_beta_dt: p.y,
                    verdict: if p.stable { "stable" } else { "unstable" }.into(),
                })
                .collect()
        }
    };
    let csv = out.join("stability.csv");
    write_table(&csv, &rows)?;
    let json = out.join("analytic_region.json");
    std::fs::write(&json, serde_json::to_string_pretty(&region)?)
        .with_context(|| format!("writing {}", json.display()))?;
    match &region {
        stability::Region::Polygon { constraints, .. } => {
            println!("analytic region ({} lines):", constraints.len());
            for c in constraints {
                println!("  {}", c.describe());
            }
        }
        other => println!("analytic region: {other:?}"),
    }
    log::info!("wrote {} and {}", csv.display(), json.display());
    Ok(Verdict::Pass)
}

fn sweep(config: &RunConfig, axis: GainAxis, values: &[f64]) -> Result<Verdict> {
    let rows = bench::gain_sensitivity_sweep(&config.benchmark(), axis, values)?;
    let dir = PathBuf::from(&config.output.dir);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join("sweep.csv");
    write_table(&path, &rows)?;
    for r in &rows {
        println!(
            "{axis:?} = {:<8} Cd {:.4} Cl' {:.4} St {:.4} Ex {:.3e}{}",
            r.value,
            r.mean_drag,
            r.lift_amplitude,
            r.strouhal,
            r.terminal_slip,
            r.diverged.as_ref().map_or(String::new(), |d| format!(" diverged: {d}"))
        );
    }
    log::info!("wrote {}", path.display());
    Ok(if rows.iter().any(|r| r.diverged.is_some()) { Verdict::Fail } else { Verdict::Pass })
}
