use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use synstdp_core::analysis::{select_domain, window_summary};
use synstdp_core::output::{write_json, write_states, FITS_JSON};
use synstdp_core::{
    closed_form_report, expected_point, fit_exponential, fit_linear, fit_quadratic, load_config,
    read_mean_csv, read_window_dir, run_validation, run_window, table1, write_svg_scatter,
    write_window_csv, AppendixParams, EnergyScenario, FitRecord, FitSide, RunConfig, SpikeMode,
    SpikeWaveform, SvgOptions, ValidationOptions, DEFAULT_GPU_BASELINE,
};

const RUN_JSON: &str = "run.json";
const WINDOW_SVG: &str = "window.svg";

#[derive(Parser)]
#[command(
    name = "synstdp",
    version,
    about = "Stochastic STDP windows for compound RRAM synapses"
)]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "SYNSTDP_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a learning window and write CSV, JSON and SVG outputs.
    Window {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the switched-device count distribution as CSV.
    Statedist {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Δt values; the configured grid when omitted.
        #[arg(long = "delta-t", allow_hyphen_values = true, value_delimiter = ',')]
        delta_t: Vec<f64>,
    },
    /// Fit one side of a written window and update fits.json.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long, value_enum, default_value = "exp")]
        model: ModelArg,
        #[arg(long, value_enum, default_value = "analytic")]
        source: SourceArg,
        /// `lo,hi`; defaults to the decaying part of the waveform.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        domain: Option<Vec<f64>>,
    },
    /// Redraw window.svg from a written window.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form average conductance report as JSON.
    Closedform {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.4])]
        interval: Vec<f64>,
        #[arg(long, default_value_t = 36)]
        samples: usize,
    },
    /// Energy per image and throughput per watt.
    Energy {
        #[arg(long, value_enum, default_value = "all")]
        scenario: ScenarioArg,
        /// Scenario JSON for `--scenario custom`.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "head")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_GPU_BASELINE)]
        baseline: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run the self-check suite.
    Validate {
        /// Coarser grid and fewer epochs.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Pos,
    Neg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Exp,
    Linear,
    Quadratic,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Analytic,
    Mc,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ScenarioArg {
    All,
    Conservative,
    Medium,
    Aggressive,
    Custom,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Head,
    Full,
}

fn config_or_default(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_window(config: Option<&Path>, out: &Path, seed: Option<u64>) -> Result<()> {
    let mut cfg = config_or_default(config)?;
    if let Some(s) = seed {
        cfg.simulation.seed = s;
    }
    let wc = cfg.build()?;
    let started = Instant::now();
    let w = run_window(&wc)?;
    let elapsed = started.elapsed();
    write_window_csv(&w, out)?;
    write_json(&cfg, &out.join(RUN_JSON))?;
    if cfg.output.svg {
        let svg = write_svg_scatter(
            &w,
            &SvgOptions {
                level_bin: cfg.output.svg_level_bin,
                ..SvgOptions::default()
            },
        );
        let path = out.join(WINDOW_SVG);
        std::fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    let levels = window_summary(&w)
        .iter()
        .map(|s| s.distinct_levels)
        .max()
        .unwrap_or(0);
    println!(
        "{} points x {} epochs in {:.2?}; up to {levels} distinct levels; wrote {}",
        w.points.len(),
        cfg.simulation.epochs,
        elapsed,
        out.display()
    );
    Ok(())
}

fn cmd_statedist(config: Option<&Path>, delta_t: &[f64]) -> Result<()> {
    let cfg = config_or_default(config)?;
    let wc = cfg.build()?;
    let grid = if delta_t.is_empty() {
        wc.window.grid()
    } else {
        delta_t.to_vec()
    };
    let rows: Vec<(f64, Vec<f64>)> = grid
        .into_iter()
        .map(|dt| (dt, expected_point(&wc.geometry, &wc.window, dt).1))
        .collect();
    let result = write_states(
        std::io::stdout().lock(),
        rows.iter().map(|(dt, s)| (*dt, s.as_slice())),
    );
    match result {
        Err(e) if matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) => {
            Ok(())
        }
        other => Ok(other?),
    }
}

fn cmd_fit(
    dir: &Path,
    side: SideArg,
    model: ModelArg,
    source: SourceArg,
    domain: Option<&[f64]>,
) -> Result<()> {
    let rows = read_mean_csv(dir)?;
    let side = match side {
        SideArg::Pos => FitSide::Pos,
        SideArg::Neg => FitSide::Neg,
    };
    let domain = match domain {
        Some([lo, hi]) => (*lo, *hi),
        Some(_) => bail!("--domain takes exactly two values"),
        None => {
            let run = dir.join(RUN_JSON);
            let cfg = if run.exists() {
                load_config(&run)?
            } else {
                RunConfig::default()
            };
            side.default_domain(&SpikeWaveform::new(cfg.waveform)?)
        }
    };
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| match source {
            SourceArg::Analytic => (r.delta_t, r.analytic),
            SourceArg::Mc => (r.delta_t, r.mc_mean),
        })
        .collect();
    let points = select_domain(&points, domain);
    let fit = match model {
        ModelArg::Exp => fit_exponential(&points)?,
        ModelArg::Linear => fit_linear(&points)?,
        ModelArg::Quadratic => fit_quadratic(&points)?,
    };
    let record = FitRecord::new(side, &fit);

    let path = dir.join(FITS_JSON);
    let mut records: Vec<serde_json::Value> = if path.exists() {
        read_json(&path)?
    } else {
        Vec::new()
    };
    let value = serde_json::to_value(&record)?;
    records.retain(|r| !(r["side"] == value["side"] && r["model"] == value["model"]));
    records.push(value.clone());
    records.sort_by_key(|r| (r["side"].to_string(), r["model"].to_string()));
    write_json(&records, &path)?;
    println!("{}", serde_json::to_string_pretty(&value)?);
    if !fit.converged {
        eprintln!("warning: fit did not converge");
    }
    Ok(())
}

fn cmd_plot(dir: &Path, out: Option<&Path>) -> Result<()> {
    let w = read_window_dir(dir)?;
    if w.points.is_empty() {
        bail!("{} holds an empty window", dir.display());
    }
    let run = dir.join(RUN_JSON);
    let level_bin = if run.exists() {
        load_config(&run)?.output.svg_level_bin
    } else {
        SvgOptions::default().level_bin
    };
    let svg = write_svg_scatter(
        &w,
        &SvgOptions {
            level_bin,
            ..SvgOptions::default()
        },
    );
    let path = out.map_or_else(|| dir.join(WINDOW_SVG), Path::to_path_buf);
    std::fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_closedform(params: Option<&Path>, interval: &[f64], samples: usize) -> Result<()> {
    let p: AppendixParams = match params {
        Some(path) => read_json(path)?,
        None => AppendixParams::default(),
    };
    p.validate()?;
    let [lo, hi] = interval else {
        bail!("--interval takes exactly two values");
    };
    let report = closed_form_report(&p, (*lo, *hi), samples)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_energy(
    scenario: ScenarioArg,
    params: Option<&Path>,
    mode: ModeArg,
    baseline: f64,
    json: bool,
) -> Result<()> {
    let mode = match mode {
        ModeArg::Head => SpikeMode::Head,
        ModeArg::Full => SpikeMode::Full,
    };
    if params.is_some() && scenario != ScenarioArg::Custom {
        bail!("--params requires --scenario custom");
    }
    let named = |n: &str| (n.to_string(), EnergyScenario::preset(n).expect("preset"));
    let scenarios = match scenario {
        ScenarioArg::All => vec![named("conservative"), named("medium"), named("aggressive")],
        ScenarioArg::Conservative => vec![named("conservative")],
        ScenarioArg::Medium => vec![named("medium")],
        ScenarioArg::Aggressive => vec![named("aggressive")],
        ScenarioArg::Custom => {
            let Some(path) = params else {
                bail!("--scenario custom requires --params");
            };
            vec![("custom".to_string(), read_json(path)?)]
        }
    };
    let table = table1(&scenarios, mode, baseline)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&table)?);
    } else {
        print!("{}", table.render());
    }
    Ok(())
}

fn cmd_validate(quick: bool) -> Result<bool> {
    let opts = if quick {
        ValidationOptions {
            epochs: 1000,
            delta_t_step: 0.5,
            ..ValidationOptions::default()
        }
    } else {
        ValidationOptions::default()
    };
    let report = run_validation(&opts)?;
    print!("{report}");
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<bool> {
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .context("configuring worker pool")?;
    }
    match cli.command {
        Command::Window { config, out, seed } => cmd_window(config.as_deref(), &out, seed)?,
        Command::Statedist { config, delta_t } => cmd_statedist(config.as_deref(), &delta_t)?,
        Command::Fit {
            input,
            side,
            model,
            source,
            domain,
        } => cmd_fit(&input, side, model, source, domain.as_deref())?,
        Command::Plot { input, out } => cmd_plot(&input, out.as_deref())?,
        Command::Closedform {
            params,
            interval,
            samples,
        } => cmd_closedform(params.as_deref(), &interval, samples)?,
        Command::Energy {
            scenario,
            params,
            mode,
            baseline,
            json,
        } => cmd_energy(scenario, params.as_deref(), mode, baseline, json)?,
        Command::Validate { quick } => return cmd_validate(quick),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
