mod svg;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sweepline::classify::{classify_csv, classify_point, ExteriorIndex, SlabIndex};
use sweepline::curve::{load_curve, ClosedPolyline, CurveSpec};
use sweepline::engine::{
    drive_with, exterior_sweep, find_root_point, EnginePolicy, Order, RunStatus, SweepState,
};

#[derive(Parser, Debug)]
#[command(name = "sweepline", version, about = "Sweep the interior of a simple closed polyline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a maximal sweep and write report.json (and optional SVG frames).
    Sweep(RunConfig),
    /// Classify the points of a CSV file against the swept interior.
    Classify {
        #[command(flatten)]
        config: RunConfig,
        /// CSV of `x,y` rows, no header.
        #[arg(long)]
        points: PathBuf,
    },
    /// Print the swept area with 12 significant digits.
    Area(RunConfig),
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Curve description (JSON).
    #[arg(long)]
    curve: PathBuf,
    /// Queue order: fifo, lifo or largest.
    #[arg(long, default_value = "largest")]
    policy: Order,
    /// Minimum actionable frontier length (default 1e-7 of the bbox diagonal).
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
    /// Recorded for reproducibility; the sweep itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (`sweep` defaults to the current directory,
    /// `classify` to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG frame every K steps (0 = off).
    #[arg(long, default_value_t = 0)]
    svg_every: usize,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if let Some(e) = self.eps_min {
            if !(e.is_finite() && e > 0.0) {
                bail!("--eps-min must be a positive number, got {e}");
            }
        }
        if self.max_steps == 0 {
            bail!("--max-steps must be at least 1");
        }
        Ok(())
    }

    fn policy(&self) -> EnginePolicy {
        EnginePolicy {
            eps_min: self.eps_min,
            max_steps: self.max_steps,
            ..EnginePolicy::with_order(self.policy)
        }
    }

    fn load(&self) -> Result<ClosedPolyline> {
        let text = fs::read_to_string(&self.curve)
            .with_context(|| format!("reading {}", self.curve.display()))?;
        let spec = CurveSpec::from_json(&text)
            .with_context(|| format!("parsing {}", self.curve.display()))?;
        Ok(load_curve(&spec)?)
    }
}

/// Runs the interior sweep, calling `frame` on the initial state, after each
/// extension, and once at the end.
fn run(config: &RunConfig, mut frame: impl FnMut(&SweepState, bool) -> Result<()>) -> Result<SweepState> {
    config.validate()?;
    let curve = config.load()?;
    let root = find_root_point(&curve)?;
    let mut state = SweepState::start(&curve, root.p, &config.policy())?;
    frame(&state, false)?;
    let mut failed = None;
    drive_with(&mut state, |s, _| {
        if failed.is_none() {
            failed = frame(s, false).err();
        }
    })?;
    if let Some(e) = failed {
        return Err(e);
    }
    frame(&state, true)?;
    Ok(state)
}

fn exit_for(state: &SweepState) -> ExitCode {
    match state.status {
        RunStatus::StepLimit => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    }
}

fn cmd_sweep(config: &RunConfig) -> Result<ExitCode> {
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let every = config.svg_every;
    let mut frames = 0usize;
    let mut write_frame = |state: &SweepState, last: bool| -> Result<()> {
        let due = every > 0 && (last || (state.step_count - 1).is_multiple_of(every));
        if !due {
            return Ok(());
        }
        frames += 1;
        let current = (!last).then(|| &state.tree[state.tree.len() - 1].t);
        let path = out.join(format!("frame_{frames:04}.svg"));
        fs::write(&path, svg::frame(state, current))
            .with_context(|| format!("writing {}", path.display()))
    };
    let state = run(config, &mut write_frame)?;
    write_report(&state, config.seed, &out.join("report.json"))?;
    Ok(exit_for(&state))
}

fn write_report(state: &SweepState, seed: u64, path: &Path) -> Result<()> {
    let mut report = serde_json::to_value(state.report())?;
    report["seed"] = seed.into();
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_classify(config: &RunConfig, points: &Path) -> Result<ExitCode> {
    let input = File::open(points).with_context(|| format!("opening {}", points.display()))?;
    let state = run(config, |_, _| Ok(()))?;
    let index = SlabIndex::build(&state)?;
    // Without an exterior sweep, points off the swept set fall back to the complement.
    let exterior = find_root_point(&state.curve)
        .ok()
        .and_then(|r| exterior_sweep(&state.curve, r.p, &config.policy()).ok())
        .and_then(|ext| ExteriorIndex::new(&ext).ok());
    let out: Box<dyn Write> = match &config.out {
        None => Box::new(io::stdout().lock()),
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Box::new(File::create(dir.join("classify.csv"))?)
        }
    };
    classify_csv(BufReader::new(input), BufWriter::new(out), |q| {
        classify_point(&index, &state.curve, q, exterior.as_ref())
    })
    .with_context(|| format!("classifying {}", points.display()))?;
    Ok(exit_for(&state))
}

/// `value` with 12 significant digits in plain decimal notation.
fn significant12(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value:.11}");
    }
    // The exponent after rounding to 12 digits, so 0.99999999999995 gives "1.00000000000".
    let sci = format!("{value:.11e}");
    let magnitude: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

fn cmd_area(config: &RunConfig) -> Result<ExitCode> {
    let state = run(config, |_, _| Ok(()))?;
    println!("{}", significant12(state.total_area));
    Ok(exit_for(&state))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(config) => cmd_sweep(config),
        Command::Classify { config, points } => cmd_classify(config, points),
        Command::Area(config) => cmd_area(config),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
