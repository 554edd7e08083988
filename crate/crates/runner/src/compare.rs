//! Side-by-side runs of the edge stepper and the two reference schemes.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sgdec_core::diagnostics::{std_dev, EnergyBreakdown};
use sgdec_core::reference::{CrankNicolson, EulerSolver, Method};
use sgdec_core::{EnergyFormula, SimError, Simulation, SpacetimeGrid};

use crate::config::SimulationConfig;
use crate::output::fmt_f64;

/// Energy series of `cfg` computed with `method`, sampled every `every`
/// steps. The edge stepper uses `formula`; the reference schemes use
/// centred vertex differences.
pub fn energy_series(cfg: &SimulationConfig, method: Method, every: u64, formula: EnergyFormula) -> Result<Vec<EnergyBreakdown>, SimError> {
    let model = cfg.model.to_model();
    let every = every.max(1);
    let g = &cfg.grid;
    let grid = match method {
        Method::CrankNicolson => {
            let nx = (g.length / g.dx).round() as usize + 1;
            SpacetimeGrid::implicit(nx, g.dx, g.dt, g.x_min())?
        }
        _ => g.build()?,
    };
    let total = (cfg.t_max / grid.dt() + 1e-9).floor() as u64;
    let mut out = Vec::new();
    match method {
        Method::Dec => {
            let mut sim = Simulation::new(&cfg.ic, grid, &model, &cfg.boundaries)?;
            for k in 0..total {
                if k % every == 0 {
                    out.push(sim.step_with_energy(formula, None)?);
                } else {
                    sim.step()?;
                }
            }
            sim.check_finite()?;
        }
        Method::Euler => {
            let mut sim = EulerSolver::new(&cfg.ic, grid, &model, &cfg.boundaries)?;
            // the start-up already holds slices 0 and 1
            for k in 0..total.saturating_sub(1) {
                if k % every == 0 {
                    out.push(sim.step_with_energy()?);
                } else {
                    sim.step()?;
                }
            }
        }
        Method::CrankNicolson => {
            let mut sim = CrankNicolson::new(&cfg.ic, grid, &model, &cfg.boundaries)?;
            for k in 0..total.saturating_sub(1) {
                if k % every == 0 {
                    out.push(sim.step_with_energy()?);
                } else {
                    sim.step()?;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub method: &'static str,
    pub samples: usize,
    pub first: f64,
    pub last: f64,
    pub mean: f64,
    pub std: f64,
    /// Largest `|E - E_0| / |E_0|`.
    pub max_drift: f64,
    pub seconds: f64,
}

pub fn summarise(method: Method, e: &[EnergyBreakdown], seconds: f64) -> SeriesSummary {
    let tot: Vec<f64> = e.iter().map(|b| b.total).collect();
    let first = tot.first().copied().unwrap_or(f64::NAN);
    SeriesSummary {
        method: method.name(),
        samples: tot.len(),
        first,
        last: tot.last().copied().unwrap_or(f64::NAN),
        mean: tot.iter().sum::<f64>() / tot.len().max(1) as f64,
        std: std_dev(&tot),
        max_drift: tot.iter().map(|v| ((v - first) / first).abs()).fold(0.0, f64::max),
        seconds,
    }
}

/// Run every method, write `energy_<method>.csv` and `compare.csv` into
/// `dir`, and return the summaries. A method that cannot handle the
/// configuration is reported with its error and skipped.
pub fn compare(
    cfg: &SimulationConfig,
    methods: &[Method],
    every: u64,
    formula: EnergyFormula,
    dir: &Path,
) -> Result<Vec<Result<SeriesSummary, (Method, SimError)>>, SimError> {
    std::fs::create_dir_all(dir).map_err(|e| SimError::Io(format!("{}: {e}", dir.display())))?;
    let io = |p: &Path, e: csv::Error| SimError::Io(format!("{}: {e}", p.display()));
    let mut out = Vec::new();
    for &m in methods {
        let start = Instant::now();
        match energy_series(cfg, m, every, formula) {
            Ok(e) => {
                let secs = start.elapsed().as_secs_f64();
                let path = dir.join(format!("energy_{}.csv", m.name()));
                let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
                w.write_record(["t", "gradient", "kinetic", "potential", "field", "total"])
                    .map_err(|e| io(&path, e))?;
                for b in &e {
                    w.write_record([b.t, b.gradient, b.kinetic, b.potential, b.field, b.total].map(fmt_f64))
                        .map_err(|e| io(&path, e))?;
                }
                w.flush().map_err(|e| SimError::Io(e.to_string()))?;
                out.push(Ok(summarise(m, &e, secs)));
            }
            Err(e @ SimError::Io(_)) => return Err(e),
            Err(e) => out.push(Err((m, e))),
        }
    }
    let path = dir.join("compare.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
    w.write_record(["method", "samples", "first", "last", "mean", "std", "max_drift", "seconds", "error"])
        .map_err(|e| io(&path, e))?;
    for r in &out {
        let rec = match r {
            Ok(s) => vec![
                s.method.to_string(),
                s.samples.to_string(),
                fmt_f64(s.first),
                fmt_f64(s.last),
                fmt_f64(s.mean),
                fmt_f64(s.std),
                fmt_f64(s.max_drift),
                fmt_f64(s.seconds),
                String::new(),
            ],
            Err((m, e)) => {
                let mut v = vec![m.name().to_string()];
                v.extend(std::iter::repeat_n(String::new(), 7));
                v.push(e.to_string());
                v
            }
        };
        w.write_record(&rec).map_err(|e| io(&path, e))?;
    }
    w.flush().map_err(|e| SimError::Io(e.to_string()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const CAP: &str = r#"
schema_version = 1
t_max = 20.0
grid = { length = 40.0, dx = 0.25, dt = 0.2 }
ic = { kind = "zero" }

[model]
kind = "massless_schwinger"
g = 1.2
sources = [{ kind = "capacitor", q = 1.0, separation = 10.0 }]
"#;

    #[test]
    fn all_three_methods_produce_series() {
        let cfg = parse_config(CAP, "cap").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let r = compare(&cfg, &[Method::Dec, Method::Euler, Method::CrankNicolson], 1, EnergyFormula::Centered, dir.path()).unwrap();
        let s: Vec<SeriesSummary> = r.into_iter().map(Result::unwrap).collect();
        assert_eq!(s[0].samples, 100);
        assert_eq!(s[1].samples, 99);
        assert!(s[0].max_drift < 1e-12, "{:?}", s[0]);
        // all three start from the same static energy
        assert!((s[0].first - s[1].first).abs() < 1e-2 * s[0].first);
        assert!((s[0].first - s[2].first).abs() < 1e-2 * s[0].first);
        for m in ["dec", "euler", "cn"] {
            assert!(dir.path().join(format!("energy_{m}.csv")).exists());
        }
    }

    #[test]
    fn unsupported_method_is_reported_not_fatal() {
        let text = CAP.replace("ic = { kind = \"zero\" }", "ic = { kind = \"zero\" }\nboundaries.left = { kind = \"outgoing\" }\nboundaries.right = { kind = \"outgoing\" }");
        let cfg = parse_config(&text, "cap").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let r = compare(&cfg, &[Method::Dec, Method::CrankNicolson], 5, EnergyFormula::Centered, dir.path()).unwrap();
        assert!(r[0].is_ok());
        assert!(r[1].is_err());
        let text = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
        assert_eq!(text.lines().count(), 3);
    }
}
