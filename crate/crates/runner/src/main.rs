use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sgdec_core::diagnostics::EnergyFormula;
use sgdec_core::reference::{profile_runtimes, scaling_slope, Method, ProfileCase};
use sgdec_core::SimError;
use sgdec_runner::compare::compare;
use sgdec_runner::config::{load_layered, ConfigError, ConfigIssue};
use sgdec_runner::output::{read_sgf1, write_diagnostics_csv, DiagnosticsTracker};
use sgdec_runner::presets;
use sgdec_runner::run::{execute, RunError};
use sgdec_runner::sweep::{find_sweep, SweepError, SweepSpec, SWEEP_PRESETS};

/// stdout writes that tolerate a closed pipe
macro_rules! say {
    ($($a:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($a)*);
    }};
}

macro_rules! say_raw {
    ($($a:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($a)*);
    }};
}

/// Space-time discrete exterior calculus simulator for sine-Gordon type fields.
#[derive(Parser)]
#[command(name = "sgdec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory.
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
    },
    /// Run a parameter sweep.
    Sweep {
        /// Sweep specification file.
        spec: Option<PathBuf>,
        /// Built-in sweep instead of a file.
        #[arg(long, conflicts_with = "spec")]
        preset: Option<String>,
        #[arg(long, short, default_value = "sweep")]
        out: PathBuf,
        /// Overrides the number of simultaneous runs.
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// List built-in presets, or print one.
    Presets {
        #[arg(long)]
        show: Option<String>,
    },
    /// Recompute per-snapshot diagnostics from an SGF1 file.
    Diagnose {
        file: PathBuf,
        /// Write the table here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Energy series of the same configuration under several schemes.
    Compare {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', default_value = "dec,euler,cn")]
        methods: Vec<Method>,
        /// Steps between energy samples.
        #[arg(long, default_value_t = 1)]
        every: u64,
        /// Energy formula for the edge stepper: centered or continuum.
        #[arg(long, default_value = "centered")]
        formula: String,
        #[arg(long, short, default_value = "compare")]
        out: PathBuf,
    },
    /// Time the schemes on a bouncing fluxon over a range of spacings.
    Profile {
        #[arg(long, value_delimiter = ',', default_value = "dec,euler,cn")]
        methods: Vec<Method>,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.4")]
        dx: Vec<f64>,
        #[arg(long, default_value_t = 200.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// CSV of the timings.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// Configuration file, layered over the preset.
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// `path=value` overrides applied last, e.g. `ic.u=0.3`.
    #[arg(long = "override", short = 's', num_args = 1..)]
    overrides: Vec<String>,
}

impl Source {
    fn load(&self) -> Result<sgdec_runner::config::SimulationConfig, ConfigError> {
        if self.config.is_none() && self.preset.is_none() {
            return Err(usage("give a configuration file or --preset"));
        }
        load_layered(self.preset.as_deref(), self.config.as_deref(), &self.overrides)
    }
}

fn usage(msg: &str) -> ConfigError {
    ConfigError::new("command line", vec![ConfigIssue::new("", msg.to_string())])
}

/// Error with its exit code: 1 configuration, 2 numerical, 3 I/O.
struct Failure(i32, String);

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure(1, e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure(e.exit_code(), e.to_string())
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        Failure(e.exit_code(), e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        Failure::from(RunError::from(e))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run { source, out } => {
            let cfg = source.load()?;
            let r = execute(&cfg, &out)?;
            let m = &r.manifest;
            say!("{}: {} steps to t={}, {} snapshots in {}", m.name, m.steps, m.t_end, m.snapshots, out.display());
            if let Some(res) = m.max_face_residual {
                say!("max face residual {res:.3e}");
            }
            for w in &m.warnings {
                say!("warning: {w}");
            }
            Ok(())
        }
        Command::Sweep { spec, preset, out, parallel } => {
            let mut s = match (spec, preset) {
                (Some(p), None) => SweepSpec::load(&p)?,
                (None, Some(name)) => find_sweep(&name)
                    .ok_or_else(|| usage(&format!("unknown sweep preset `{name}`")))?
                    .spec(),
                _ => return Err(usage("give a sweep file or --preset").into()),
            };
            if let Some(n) = parallel {
                s.parallel = n.max(1);
            }
            let r = s.run(&out)?;
            say!(
                "{} points ({} reused, {} failed), report in {}",
                r.rows.len(),
                r.reused,
                r.failed,
                out.join("report.csv").display()
            );
            Ok(())
        }
        Command::Presets { show } => {
            match show {
                Some(name) => {
                    if let Some(p) = presets::find(&name) {
                        say_raw!("{}", p.toml.trim_start());
                    } else if let Some(p) = find_sweep(&name) {
                        say_raw!("{}", p.toml.trim_start());
                    } else {
                        return Err(usage(&format!("unknown preset `{name}`")).into());
                    }
                }
                None => {
                    say!("runs:");
                    for p in presets::all() {
                        say!("  {:<28} {}", p.name, p.summary);
                    }
                    say!("sweeps:");
                    for p in SWEEP_PRESETS {
                        say!("  {:<28} {}", p.name, p.summary);
                    }
                }
            }
            Ok(())
        }
        Command::Diagnose { file, out } => diagnose(&file, out.as_deref()),
        Command::Compare { source, methods, every, formula, out } => {
            let cfg = source.load()?;
            let formula = match formula.as_str() {
                "centered" | "centred" => EnergyFormula::Centered,
                "continuum" => EnergyFormula::Continuum,
                other => return Err(usage(&format!("unknown energy formula `{other}`")).into()),
            };
            let rows = compare(&cfg, &methods, every, formula, &out)?;
            say!("{:<6} {:>8} {:>16} {:>12} {:>12} {:>9}", "method", "samples", "mean", "std", "max drift", "seconds");
            for r in rows {
                match r {
                    Ok(s) => say!(
                        "{:<6} {:>8} {:>16.9e} {:>12.3e} {:>12.3e} {:>9.3}",
                        s.method, s.samples, s.mean, s.std, s.max_drift, s.seconds
                    ),
                    Err((m, e)) => say!("{:<6} skipped: {e}", m.name()),
                }
            }
            Ok(())
        }
        Command::Profile { methods, dx, t_max, repeats, out } => {
            let cfg = presets::find("bare_fluxon").expect("bare_fluxon preset").config()?;
            let case = ProfileCase {
                ic: cfg.ic.clone(),
                model: cfg.model.to_model(),
                bc: cfg.boundaries.clone(),
                length: cfg.grid.length,
                x_min: cfg.grid.x_min(),
                courant: cfg.grid.dt / cfg.grid.dx,
                t_max,
            };
            let mut rows = Vec::new();
            let mut ok = Vec::new();
            for &m in &methods {
                match profile_runtimes(&case, &[m], &dx, repeats) {
                    Ok(r) => {
                        rows.extend(r);
                        ok.push(m);
                    }
                    Err(e) => say!("{}: skipped: {e}", m.name()),
                }
            }
            say!("{:<6} {:>7} {:>7} {:>7} {:>14} {:>10}", "method", "dx", "nx", "steps", "gridpoints", "seconds");
            for r in &rows {
                say!(
                    "{:<6} {:>7} {:>7} {:>7} {:>14.3e} {:>10.4}",
                    r.method.name(), r.dx, r.nx, r.steps, r.gridpoints, r.seconds
                );
            }
            for &m in &ok {
                match scaling_slope(&rows, m) {
                    Ok(f) => say!("{}: seconds ~ gridpoints^{:.3} (r2 {:.3})", m.name(), f.slope, f.r2),
                    Err(e) => say!("{}: no slope ({e})", m.name()),
                }
            }
            if let Some(path) = out {
                let io = |e: csv::Error| Failure(3, format!("{}: {e}", path.display()));
                let mut w = csv::Writer::from_path(&path).map_err(io)?;
                w.write_record(["method", "dx", "dt", "nx", "steps", "gridpoints", "seconds"]).map_err(io)?;
                for r in &rows {
                    w.write_record([
                        r.method.name().to_string(),
                        r.dx.to_string(),
                        r.dt.to_string(),
                        r.nx.to_string(),
                        r.steps.to_string(),
                        r.gridpoints.to_string(),
                        r.seconds.to_string(),
                    ])
                    .map_err(io)?;
                }
                w.flush().map_err(|e| Failure(3, e.to_string()))?;
            }
            Ok(())
        }
    }
}

fn diagnose(file: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let f = read_sgf1(file).map_err(|e| Failure(3, e.to_string()))?;
    let grid = f.grid()?;
    let mut tracker = DiagnosticsTracker::new(&grid);
    for s in &f.snapshots {
        tracker.push(&grid, s.t, &s.state);
    }
    match out {
        Some(p) => {
            write_diagnostics_csv(p, &tracker.rows)?;
            say!("{} snapshots, table in {}", tracker.rows.len(), p.display());
        }
        None => {
            say!("{:>12} {:>7} {:>5} {:>5} {:>5} {:>12} {:>10} {:>10}", "t", "winding", "K", "A", "lumps", "kink_x", "compat", "collisions");
            for d in &tracker.rows {
                let kx = d.kink_x.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
                say!(
                    "{:>12.4} {:>7} {:>5} {:>5} {:>5} {:>12} {:>10.2e} {:>10}",
                    d.t, d.winding, d.kinks, d.antikinks, d.lumps, kx, d.compatibility, d.collisions
                );
            }
        }
    }
    Ok(())
}
