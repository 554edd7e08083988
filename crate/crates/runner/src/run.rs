//! Running one configuration into an output directory.

use std::path::{Path, PathBuf};

use sgdec_core::stepper::run_simulation;
use sgdec_core::{SimError, Simulation};
use thiserror::Error;

use crate::config::{ConfigError, SimulationConfig};
use crate::output::{Manifest, OutputSink, SnapshotDiagnostics};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(SimError),
    #[error("{0}")]
    Io(SimError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical(_) => 2,
            RunError::Io(_) => 3,
        }
    }
}

impl From<SimError> for RunError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Io(_) => RunError::Io(e),
            SimError::BlowUp { .. } => RunError::Numerical(e),
            other => RunError::Config(ConfigError::new(
                "config",
                vec![crate::config::ConfigIssue::new("", other.to_string())],
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub diagnostics: Vec<SnapshotDiagnostics>,
}

/// Run `cfg` and write the selected outputs to `dir`. A manifest is written
/// in every case; after a failure it lists the files produced so far.
pub fn execute(cfg: &SimulationConfig, dir: &Path) -> Result<RunOutcome, RunError> {
    let plan = cfg.plan()?;
    let mut manifest = Manifest {
        name: cfg.name.clone().unwrap_or_else(|| "run".into()),
        status: "running".into(),
        ..Default::default()
    };
    let names: Vec<String> = plan.options.probes.iter().map(|p| p.name.clone()).collect();
    let mut sink = OutputSink::create(
        dir,
        &plan.grid,
        &cfg.outputs,
        &names,
        plan.options.energy_every.is_some(),
        plan.options.audit_every.is_some(),
    )
    .map_err(RunError::Io)?;
    let config_path = dir.join("config.toml");
    std::fs::write(&config_path, cfg.to_toml()).map_err(|e| RunError::Io(SimError::Io(format!("{}: {e}", config_path.display()))))?;
    sink.files.insert(0, "config.toml".into());

    let result = Simulation::new(&plan.ic, plan.grid, &plan.model, &plan.boundaries)
        .and_then(|mut sim| run_simulation(&mut sim, &plan.options, &mut sink).map(|s| (s, sim)));
    let finished = sink.finish();
    manifest.files = sink.files.clone();
    let diagnostics = sink.diagnostics().map(<[_]>::to_vec).unwrap_or_default();
    match result.and_then(|r| finished.map(|_| r)) {
        Ok((summary, sim)) => {
            manifest.status = "complete".into();
            manifest.steps = summary.steps;
            manifest.t_end = summary.t_end;
            manifest.max_face_residual = summary.max_face_residual;
            manifest.snapshots = summary.snapshots;
            manifest.warnings = summary.warnings;
            debug_assert_eq!(sim.t(), summary.t_end);
            manifest.files.push("manifest.toml".into());
            manifest
                .write(dir)
                .map_err(|e| RunError::Io(SimError::Io(format!("{}: {e}", dir.display()))))?;
            Ok(RunOutcome {
                dir: dir.to_path_buf(),
                manifest,
                diagnostics,
            })
        }
        Err(e) => {
            manifest.status = "failed".into();
            manifest.error = Some(e.to_string());
            if let SimError::BlowUp { step, t, .. } = e {
                manifest.steps = step;
                manifest.t_end = t;
            }
            manifest.files.push("manifest.toml".into());
            // the original error matters more than a failed manifest write
            let _ = manifest.write(dir);
            Err(e.into())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::output::{read_probe_csv, read_sgf1};

    const SMALL: &str = r#"
schema_version = 1
name = "small"
t_max = 4.0
grid = { length = 20.0, dx = 0.1, dt = 0.08 }
ic = { kind = "kink", x0 = -2.0, u = 0.5 }
probes = [{ name = "phi_0", x = 0.0, quantity = "phi" }]
dump = { kind = "count", count = 10 }
energy = { every = 5 }
audit_every = 1
"#;

    #[test]
    fn run_writes_every_format() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = parse_config(SMALL, "small").unwrap();
        let out = execute(&cfg, dir.path()).unwrap();
        assert_eq!(out.manifest.status, "complete");
        assert_eq!(out.manifest.steps, 50);
        assert!(out.manifest.max_face_residual.unwrap() <= 5e-13);
        for f in &out.manifest.files {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let (header, cols) = read_probe_csv(&dir.path().join("probes.csv")).unwrap();
        assert_eq!(header, ["t", "phi_0"]);
        assert_eq!(cols[0].len(), 51);
        let snaps = read_sgf1(&dir.path().join("snapshots.sgf1")).unwrap();
        assert_eq!(snaps.snapshots.len(), out.manifest.snapshots);
        assert_eq!(out.diagnostics.len(), snaps.snapshots.len());
        assert!(out.diagnostics.iter().all(|d| d.winding == 1));
    }

    #[test]
    fn identical_configs_give_identical_snapshots() {
        let cfg = parse_config(SMALL, "small").unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        execute(&cfg, a.path()).unwrap();
        execute(&cfg, b.path()).unwrap();
        let read = |d: &Path| std::fs::read(d.join("snapshots.sgf1")).unwrap();
        assert_eq!(read(a.path()), read(b.path()));
    }

    #[test]
    fn blow_up_leaves_a_partial_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let text = SMALL.replace("t_max = 4.0", "t_max = 400.0").replace(
            "ic = {",
            "model = { kind = \"massive_schwinger\", g = 0.3, mass2 = 1e10 }\nic = {",
        );
        let cfg = parse_config(&text, "x").unwrap();
        let err = execute(&cfg, dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{err}");
        let m = std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
        assert!(m.contains("status = \"failed\""), "{m}");
        assert!(m.contains("snapshots.sgf1"));
    }
}
