//! `opshare` — analytic evaluation, Monte-Carlo runs, parameter sweeps,
//! and cross-validation reports for the channel-sharing model.
//!
//! Exit codes: 0 on success, 1 when `validate` finds the simulation and
//! the analytic model in disagreement, 2 for configuration or usage
//! errors (the clap convention).

use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use opshare_core::sim::{default_warmup, mean_se};
use opshare_core::{
    analyze_mode, run_simulation, AnalyticResult, Config, FormulaMode, RunConfig, RunOptions,
    ANALYTIC_CSV_HEADER, RUN_CSV_HEADER,
};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "opshare",
    version,
    about = "Analytic model and slot-level simulator for opportunistic channel sharing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the analytic pipeline at one operating point (one CSV row per mode).
    Analyze {
        #[command(flatten)]
        io: IoArgs,
        /// Formula mode: paper, corrected, or both. Defaults to the
        /// config's own `formula_mode`.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Run the Monte-Carlo slot simulation and report estimator summaries.
    Simulate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Evaluate a family of operating points, one CSV row per point and mode.
    ///
    /// Points that fall outside the model's load-balance regime produce a
    /// row of `nan` metrics and a warning on stderr; the sweep continues.
    Sweep {
        #[command(flatten)]
        io: IoArgs,
        /// Formula mode for the analytic columns (default: both).
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Built-in grid: `fig2`/`fig3` vary AP density at request rates
        /// {0.03, 0.1, 1}; `fig4` varies the suppression radius 50–600 m.
        #[arg(long, value_enum, conflicts_with_all = ["axis", "values"])]
        preset: Option<PresetArg>,
        /// Any numeric config key to vary (e.g. `ap_density`).
        #[arg(long, requires = "values", conflicts_with = "preset")]
        axis: Option<String>,
        /// Comma-separated axis values, emitted in the order given.
        #[arg(long, requires = "axis")]
        values: Option<String>,
        /// Also simulate each point and append estimator columns.
        #[arg(long)]
        simulate: bool,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Compare both analytic modes against a simulation of the same setup.
    ///
    /// Prints one table row per metric with the z-score of the simulated
    /// estimate against the corrected-mode prediction; exits 1 if any
    /// defined metric misses by more than 3 standard errors.
    Validate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
}

#[derive(Args)]
struct IoArgs {
    /// Path to a `key = value` configuration file (defaults otherwise).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Omit the `# generated …` timestamp comment (byte-stable output).
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct SimArgs {
    /// Slots per replication, including warmup.
    #[arg(long, default_value_t = 10_000)]
    slots: u32,
    /// Warmup slots excluded from measurement (default: slots/10, min 500).
    #[arg(long)]
    warmup: Option<u32>,
    /// Independent replications (fresh deployment each).
    #[arg(long, default_value_t = 8)]
    reps: u32,
    /// Master seed; everything downstream is derived deterministically.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl SimArgs {
    fn options(&self) -> RunOptions {
        let warmup = self.warmup.unwrap_or_else(|| default_warmup(self.slots));
        RunOptions::new(self.slots, warmup, self.reps, self.seed)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Corrected,
    Both,
}

impl ModeArg {
    fn list(self) -> Vec<FormulaMode> {
        match self {
            ModeArg::Paper => vec![FormulaMode::Paper],
            ModeArg::Corrected => vec![FormulaMode::Corrected],
            ModeArg::Both => vec![FormulaMode::Paper, FormulaMode::Corrected],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig2,
    Fig3,
    Fig4,
}

/// AP densities (per km²) of the density presets.
const DENSITY_GRID: [f64; 16] = [
    10.0, 20.0, 40.0, 60.0, 80.0, 100.0, 130.0, 160.0, 200.0, 250.0, 300.0, 400.0, 500.0, 650.0,
    800.0, 1000.0,
];
/// Request rates of the density presets, ascending.
const RATE_GRID: [f64; 3] = [0.03, 0.1, 1.0];

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Analyze { io, mode } => cmd_analyze(&io, mode),
        Command::Simulate { io, sim } => cmd_simulate(&io, &sim),
        Command::Sweep {
            io,
            mode,
            preset,
            axis,
            values,
            simulate,
            sim,
        } => cmd_sweep(&io, mode, preset, axis, values, simulate, &sim),
        Command::Validate { io, sim } => cmd_validate(&io, &sim),
    }
}

fn load_base(io: &IoArgs) -> Result<Config, String> {
    match &io.config {
        None => Ok(Config::default()),
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Config::from_key_values(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
    }
}

fn open_sink(io: &IoArgs) -> Result<Box<dyn Write>, String> {
    let mut out: Box<dyn Write> = match &io.output {
        None => Box::new(BufWriter::new(io::stdout())),
        Some(path) => Box::new(BufWriter::new(
            fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
    };
    if !io.no_timestamp {
        writeln!(
            out,
            "# generated {}",
            Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
        )
        .map_err(|e| e.to_string())?;
    }
    Ok(out)
}

fn validate_cfg(base: &Config) -> Result<RunConfig, String> {
    base.clone().validate().map_err(|e| e.to_string())
}

fn cmd_analyze(io: &IoArgs, mode: Option<ModeArg>) -> Result<ExitCode, String> {
    let base = load_base(io)?;
    let cfg = validate_cfg(&base)?;
    let modes = mode.map(ModeArg::list).unwrap_or_else(|| vec![cfg.mode]);
    let mut out = open_sink(io)?;
    writeln!(out, "{ANALYTIC_CSV_HEADER}").map_err(|e| e.to_string())?;
    for m in modes {
        let row = analyze_mode(&cfg, m).map_err(|e| e.to_string())?;
        writeln!(out, "{}", row.csv_row()).map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(io: &IoArgs, sim: &SimArgs) -> Result<ExitCode, String> {
    let base = load_base(io)?;
    let cfg = validate_cfg(&base)?;
    let metrics = run_simulation(&cfg, &sim.options()).map_err(|e| e.to_string())?;
    let mut out = open_sink(io)?;
    writeln!(out, "{RUN_CSV_HEADER}").map_err(|e| e.to_string())?;
    writeln!(out, "{}", metrics.csv_row()).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

/// Assigns a numeric config field by its file-syntax key name.
fn set_field(cfg: &mut Config, key: &str, value: f64) -> Result<(), String> {
    match key {
        "user_density" => cfg.user_density = value,
        "ap_density" => cfg.ap_density = value,
        "request_rate" => cfg.request_rate = value,
        "suppression_radius" => cfg.suppression_radius = value,
        "slot_duration" => cfg.slot_duration = value,
        "bandwidth" => cfg.bandwidth = value,
        "packet_size" => cfg.packet_size = value,
        "tx_power" => cfg.tx_power = value,
        "pathloss_exponent" => cfg.pathloss_exponent = value,
        "noise_power" => cfg.noise_power = value,
        "voronoi_shape" => cfg.voronoi_shape = value,
        "region_side" => cfg.region_side = value,
        other => return Err(format!("`{other}` is not a numeric config key")),
    }
    Ok(())
}

/// One sweep point before mode expansion.
struct SweepPoint {
    /// Request-rate override (density presets sweep it as an outer axis).
    rate: Option<f64>,
    key: &'static str,
    value: f64,
}

fn sweep_points(
    preset: Option<PresetArg>,
    axis: Option<String>,
    values: Option<String>,
) -> Result<(Vec<SweepPoint>, String), String> {
    match (preset, axis, values) {
        (Some(PresetArg::Fig2 | PresetArg::Fig3), _, _) => {
            let mut pts = Vec::new();
            for &rate in &RATE_GRID {
                for &d in &DENSITY_GRID {
                    pts.push(SweepPoint {
                        rate: Some(rate),
                        key: "ap_density",
                        value: d,
                    });
                }
            }
            Ok((pts, "ap_density".into()))
        }
        (Some(PresetArg::Fig4), _, _) => {
            let pts = (0..=22)
                .map(|i| SweepPoint {
                    rate: None,
                    key: "suppression_radius",
                    value: 50.0 + 25.0 * i as f64,
                })
                .collect();
            Ok((pts, "suppression_radius".into()))
        }
        (None, Some(axis), Some(values)) => {
            // Leak the axis name to get a uniform &'static str; a sweep
            // parses exactly one.
            let key: &'static str = Box::leak(axis.clone().into_boxed_str());
            let mut pts = Vec::new();
            for item in values.split(',') {
                let v = item
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| format!("axis value `{item}`: {e}"))?;
                pts.push(SweepPoint {
                    rate: None,
                    key,
                    value: v,
                });
            }
            if pts.is_empty() {
                return Err("no axis values given".into());
            }
            Ok((pts, axis))
        }
        _ => Err("sweep needs either --preset or --axis with --values".into()),
    }
}

fn nan_row(mode: FormulaMode, cfg: &RunConfig) -> String {
    format!(
        "{},{},{},{},{},nan,nan,nan,nan,nan,nan",
        mode,
        cfg.source.user_density,
        cfg.source.ap_density,
        cfg.lambda,
        cfg.radius
    )
}

fn cmd_sweep(
    io: &IoArgs,
    mode: Option<ModeArg>,
    preset: Option<PresetArg>,
    axis: Option<String>,
    values: Option<String>,
    simulate: bool,
    sim: &SimArgs,
) -> Result<ExitCode, String> {
    let base = load_base(io)?;
    let (points, axis_name) = sweep_points(preset, axis, values)?;
    let modes = mode.unwrap_or(ModeArg::Both).list();
    let mut out = open_sink(io)?;
    let sim_columns = ",pi0_hat,pi0_se,P_ai_hat,P_ai_se,plr_hat,plr_se";
    writeln!(
        out,
        "{ANALYTIC_CSV_HEADER}{}",
        if simulate { sim_columns } else { "" }
    )
    .map_err(|e| e.to_string())?;

    for (idx, point) in points.iter().enumerate() {
        let mut raw = base.clone();
        if let Some(rate) = point.rate {
            raw.request_rate = rate;
        }
        set_field(&mut raw, point.key, point.value)?;
        let cfg = raw
            .validate()
            .map_err(|e| format!("{} = {}: {e}", point.key, point.value))?;

        // The simulation does not depend on the formula mode, so one run
        // serves every mode row of this point.
        let sim_suffix = if simulate {
            let mut opts = sim.options();
            opts.seed = sim.seed.wrapping_add(idx as u64);
            let m = run_simulation(&cfg, &opts).map_err(|e| e.to_string())?;
            format!(
                ",{},{},{},{},{},{}",
                m.pi0_hat, m.pi0_se, m.p_ai_hat, m.p_ai_se, m.plr_total, m.plr_total_se
            )
        } else {
            String::new()
        };

        for &m in &modes {
            let row = match analyze_mode(&cfg, m) {
                Ok(r) => r.csv_row(),
                Err(e) => {
                    eprintln!(
                        "warning: {axis_name} = {}, lambda = {}, mode = {m}: {e}",
                        point.value, cfg.lambda
                    );
                    nan_row(m, &cfg)
                }
            };
            writeln!(out, "{row}{sim_suffix}").map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

struct MetricRow {
    name: &'static str,
    paper: f64,
    corrected: f64,
    simulated: f64,
    se: f64,
}

fn z_score(diff: f64, se: f64) -> f64 {
    if diff.abs() < 1e-12 {
        0.0 // exact agreement, even when the spread collapsed to zero
    } else {
        diff.abs() / se
    }
}

fn cmd_validate(io: &IoArgs, sim: &SimArgs) -> Result<ExitCode, String> {
    let base = load_base(io)?;
    let cfg = validate_cfg(&base)?;
    let paper = analyze_mode(&cfg, FormulaMode::Paper).map_err(|e| e.to_string())?;
    let corrected = analyze_mode(&cfg, FormulaMode::Corrected).map_err(|e| e.to_string())?;
    let m = run_simulation(&cfg, &sim.options()).map_err(|e| e.to_string())?;

    let row = |name, f: &dyn Fn(&AnalyticResult<f64>) -> f64, s: f64, se: f64| MetricRow {
        name,
        paper: f(&paper),
        corrected: f(&corrected),
        simulated: s,
        se,
    };
    // The CSV's `plr_buffer` counts every buffer-occupied drop; the
    // analytic overflow column is the disjoint remainder, so recompute it
    // from the per-replication books.
    let overflow: Vec<f64> = m.per_rep.iter().map(|r| r.plr_overflow()).collect();
    let (over_hat, over_se) = mean_se(&overflow);
    let rows = [
        row("pi0", &|r| r.pi0, m.pi0_hat, m.pi0_se),
        row("P_ai", &|r| r.p_ai, m.p_ai_hat, m.p_ai_se),
        row("mu", &|r| r.mu, m.mu_hat, m.mu_se),
        row(
            "active_density",
            &|r| r.active_density,
            m.active_density_hat,
            m.active_density_se,
        ),
        row("plr_total", &|r| r.plr.total, m.plr_total, m.plr_total_se),
        row("plr_access", &|r| r.plr.access, m.plr_access, m.plr_access_se),
        row("plr_sinr", &|r| r.plr.sinr, m.plr_sinr, m.plr_sinr_se),
        row("plr_overflow", &|r| r.plr.overflow, over_hat, over_se),
    ];

    let mut out = open_sink(io)?;
    let mut all_within = true;
    writeln!(
        out,
        "{:<16}{:>16}{:>16}{:>16}{:>13}{:>9}",
        "metric", "paper", "corrected", "simulated", "std_error", "z"
    )
    .map_err(|e| e.to_string())?;
    for r in rows {
        let z = z_score(r.simulated - r.corrected, r.se);
        if r.simulated.is_nan() {
            writeln!(
                out,
                "{:<16}{:>16.6}{:>16.6}{:>16}{:>13}{:>9}",
                r.name, r.paper, r.corrected, "nan", "nan", "-"
            )
            .map_err(|e| e.to_string())?;
        } else {
            writeln!(
                out,
                "{:<16}{:>16.6}{:>16.6}{:>16.6}{:>13.6}{:>9.2}",
                r.name, r.paper, r.corrected, r.simulated, r.se, z
            )
            .map_err(|e| e.to_string())?;
            all_within &= z <= 3.0;
        }
    }
    if m.arrived_total == 0 {
        writeln!(out, "note: no packet arrivals; loss-rate estimators are undefined")
            .map_err(|e| e.to_string())?;
    }
    writeln!(
        out,
        "{}: simulated estimates {} within 3 standard errors of the corrected model",
        if all_within { "agreement" } else { "disagreement" },
        if all_within { "are" } else { "are NOT" }
    )
    .map_err(|e| e.to_string())?;
    Ok(if all_within {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
