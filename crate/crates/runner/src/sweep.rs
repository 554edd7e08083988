//! Parameter sweeps: cartesian products of config values, run in parallel
//! across simulations, reduced to one report row per point.
//!
//! Every finished point is stored as `points/<hash>.toml`, where the hash
//! covers the full point configuration and the reducers. Re-running a sweep
//! into the same directory reuses those files, so an interrupted sweep
//! resumes where it stopped.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sgdec_core::diagnostics::{soliton_census, winding_number};
use sgdec_core::{EnergyFormula, SimError, Simulation};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{apply_override, from_table, merge, ConfigError, ConfigIssue, SimulationConfig};
use crate::output::{fmt_f64, LUMP_MIN_WIDTH, LUMP_THRESHOLD};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Preset the base configuration starts from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Config keys merged over the preset.
    #[serde(default)]
    pub base: toml::Table,
    pub axes: Vec<Axis>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub linked: Vec<Linked>,
    pub reducers: Vec<Reducer>,
    /// Simulations run at the same time.
    #[serde(default = "one")]
    pub parallel: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    /// Dotted config path, e.g. `ic.u`.
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<toml::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<Range>,
}

/// Inclusive range `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as i64;
        // rounding keeps 0.1 + 0.2 style noise out of configs and hashes
        (0..=n.max(-1))
            .map(|k| {
                let v = self.start + k as f64 * self.step;
                (v * 1e9).round() / 1e9
            })
            .collect()
    }
}

/// A parameter set from another: `path = scale * from + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linked {
    pub path: String,
    pub from: String,
    #[serde(default = "unit")]
    pub scale: f64,
    #[serde(default)]
    pub offset: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Reducer {
    /// Kinks, antikinks, neutral lumps and winding of the final slice.
    Census,
    /// Net winding of the final slice.
    Winding,
    /// Bound if the energy left in `window` at the end exceeds `threshold`
    /// times the initial total energy.
    BoundScatter { window: [f64; 2], threshold: f64 },
}

impl Reducer {
    fn columns(&self) -> &'static [&'static str] {
        match self {
            Reducer::Census => &["kinks", "antikinks", "lumps", "winding"],
            Reducer::Winding => &["winding"],
            Reducer::BoundScatter { .. } => &["energy_fraction", "outcome"],
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(String),
}

impl SweepError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SweepError::Config(_) => 1,
            SweepError::Io(_) => 3,
        }
    }
}

/// One point of the sweep before it is run.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub coords: Vec<(String, toml::Value)>,
    pub config: Result<SimulationConfig, String>,
    pub hash: String,
}

/// Result of one point as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default)]
    pub values: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub reused: usize,
    pub failed: usize,
}

impl SweepSpec {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let doc = crate::config::Document::parse(text, origin)?;
        let spec: SweepSpec = serde_path_to_error::deserialize(toml::Value::Table(doc.table.clone())).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(
                origin,
                vec![ConfigIssue {
                    location: doc.locate(&path),
                    path,
                    message: e.inner().to_string().trim().to_string(),
                }],
            )
        })?;
        spec.check(origin)?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(&origin, vec![ConfigIssue::new("", format!("cannot read file: {e}"))]))?;
        Self::parse(&text, &origin)
    }

    fn check(&self, origin: &str) -> Result<(), ConfigError> {
        let mut issues = Vec::new();
        if self.schema_version != crate::config::SCHEMA_VERSION {
            issues.push(ConfigIssue::new("schema_version", format!("unsupported version {}", self.schema_version)));
        }
        if self.parallel == 0 {
            issues.push(ConfigIssue::new("parallel", "must be >= 1".into()));
        }
        if self.reducers.iter().filter(|r| matches!(r, Reducer::BoundScatter { .. })).count() > 1 {
            issues.push(ConfigIssue::new("reducers", "at most one bound_scatter reducer per sweep".into()));
        }
        if self.reducers.is_empty() {
            issues.push(ConfigIssue::new("reducers", "need at least one reducer".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            match (&a.values, &a.range) {
                (Some(v), None) if !v.is_empty() => {}
                (None, Some(r)) if r.step > 0.0 && r.stop >= r.start => {}
                _ => issues.push(ConfigIssue::new(
                    &format!("axes[{i}]"),
                    "give either a non-empty `values` list or a `range` with step > 0 and stop >= start".into(),
                )),
            }
        }
        for (i, l) in self.linked.iter().enumerate() {
            if !self.axes.iter().any(|a| a.path == l.from) {
                issues.push(ConfigIssue::new(&format!("linked[{i}].from"), format!("`{}` is not an axis", l.from)));
            }
        }
        if let Some(p) = &self.preset {
            if crate::presets::find(p).is_none() {
                issues.push(ConfigIssue::new("preset", format!("unknown preset `{p}`")));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::new(origin, issues))
        }
    }

    pub fn axis_values(&self) -> Vec<Vec<toml::Value>> {
        self.axes
            .iter()
            .map(|a| match (&a.values, &a.range) {
                (Some(v), _) => v.clone(),
                (None, Some(r)) => r.values().into_iter().map(toml::Value::Float).collect(),
                (None, None) => Vec::new(),
            })
            .collect()
    }

    /// Number of points: the product of the axis lengths.
    pub fn size(&self) -> usize {
        self.axis_values().iter().map(Vec::len).product()
    }

    fn base_table(&self) -> toml::Table {
        let mut t = self
            .preset
            .as_deref()
            .and_then(crate::presets::find)
            .map(|p| p.table())
            .unwrap_or_default();
        merge(&mut t, self.base.clone());
        t
    }

    /// All points in row-major order (the last axis varies fastest).
    pub fn points(&self) -> Vec<SweepPoint> {
        let axes = self.axis_values();
        let base = self.base_table();
        let reducers = toml::to_string(&ReducerList { reducers: self.reducers.clone() }).expect("reducers serialise");
        let n = self.size();
        (0..n)
            .map(|index| {
                let mut rem = index;
                let mut coords = vec![(String::new(), toml::Value::Integer(0)); axes.len()];
                for (k, vals) in axes.iter().enumerate().rev() {
                    coords[k] = (self.axes[k].path.clone(), vals[rem % vals.len()].clone());
                    rem /= vals.len();
                }
                let config = self.point_config(&base, &coords);
                let hash = point_hash(&config, &reducers);
                SweepPoint {
                    index,
                    coords,
                    config,
                    hash,
                }
            })
            .collect()
    }

    fn point_config(&self, base: &toml::Table, coords: &[(String, toml::Value)]) -> Result<SimulationConfig, String> {
        let mut t = base.clone();
        let mut sets: Vec<(String, toml::Value)> = coords.to_vec();
        for l in &self.linked {
            let (_, v) = coords.iter().find(|(p, _)| *p == l.from).expect("checked");
            let x = match v {
                toml::Value::Float(f) => *f,
                toml::Value::Integer(i) => *i as f64,
                other => return Err(format!("linked parameter `{}` needs a number, got {other}", l.path)),
            };
            let y = (l.scale * x + l.offset) * 1e9;
            sets.push((l.path.clone(), toml::Value::Float(y.round() / 1e9)));
        }
        for (p, v) in sets {
            let spec = format!("{p}={}", toml_value_text(&v));
            apply_override(&mut t, &spec).map_err(|i| format!("{}: {}", i.path, i.message))?;
        }
        from_table(t, None).map_err(|e| e.to_string())
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["index".to_string()];
        h.extend(self.axes.iter().map(|a| a.path.clone()));
        h.extend(self.linked.iter().map(|l| l.path.clone()));
        h.push("status".into());
        for r in &self.reducers {
            h.extend(r.columns().iter().map(|c| c.to_string()));
        }
        h.push("error".into());
        h
    }

    /// Run every point not already stored in `dir/points`, then write
    /// `dir/report.csv`.
    pub fn run(&self, dir: &Path) -> Result<SweepReport, SweepError> {
        let points_dir = dir.join("points");
        std::fs::create_dir_all(&points_dir).map_err(|e| SweepError::Io(format!("{}: {e}", points_dir.display())))?;
        let points = self.points();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.parallel)
            .build()
            .map_err(|e| SweepError::Io(e.to_string()))?;
        let results: Vec<Result<(PointResult, bool), SweepError>> = pool.install(|| {
            points
                .par_iter()
                .map(|p| {
                    let file = points_dir.join(format!("{}.toml", p.hash));
                    if let Some(r) = read_point(&file) {
                        return Ok((r, true));
                    }
                    let r = match &p.config {
                        Ok(cfg) => evaluate(cfg, &self.reducers),
                        Err(e) => failed(e.clone()),
                    };
                    write_point(&file, &r)?;
                    Ok((r, false))
                })
                .collect()
        });
        let header = self.header();
        let mut rows = Vec::with_capacity(points.len());
        let (mut reused, mut nfailed) = (0, 0);
        for (p, r) in points.iter().zip(results) {
            let (r, was_reused) = r?;
            reused += was_reused as usize;
            nfailed += (r.status != "ok") as usize;
            let mut row = vec![p.index.to_string()];
            row.extend(p.coords.iter().map(|(_, v)| toml_value_text(v)));
            for l in &self.linked {
                let v = p
                    .config
                    .as_ref()
                    .ok()
                    .and_then(|c| lookup(&toml::Value::try_from(c).ok()?, &l.path))
                    .map(|v| toml_value_text(&v))
                    .unwrap_or_default();
                row.push(v);
            }
            row.push(r.status.clone());
            for r2 in &self.reducers {
                for c in r2.columns() {
                    row.push(r.values.get(*c).cloned().unwrap_or_default());
                }
            }
            row.push(r.error.clone().unwrap_or_default());
            rows.push(row);
        }
        let report = dir.join("report.csv");
        let mut w = csv::Writer::from_path(&report).map_err(|e| SweepError::Io(format!("{}: {e}", report.display())))?;
        let io = |e: csv::Error| SweepError::Io(format!("{}: {e}", report.display()));
        w.write_record(&header).map_err(io)?;
        for row in &rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush().map_err(|e| SweepError::Io(e.to_string()))?;
        Ok(SweepReport {
            header,
            rows,
            reused,
            failed: nfailed,
        })
    }
}

#[derive(Serialize)]
struct ReducerList {
    reducers: Vec<Reducer>,
}

fn toml_value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => format!("{s:?}"),
        toml::Value::Float(f) => fmt_f64(*f),
        other => other.to_string(),
    }
}

fn lookup(v: &toml::Value, path: &str) -> Option<toml::Value> {
    let mut cur = v;
    for seg in path.split('.') {
        cur = match cur {
            toml::Value::Table(t) => t.get(seg)?,
            toml::Value::Array(a) => a.get(seg.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(cur.clone())
}

fn point_hash(config: &Result<SimulationConfig, String>, reducers: &str) -> String {
    let mut h = Sha256::new();
    match config {
        Ok(c) => h.update(c.to_toml().as_bytes()),
        Err(e) => h.update(format!("invalid: {e}").as_bytes()),
    }
    h.update(reducers.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn read_point(path: &Path) -> Option<PointResult> {
    let text = std::fs::read_to_string(path).ok()?;
    toml::from_str(&text).ok()
}

fn write_point(path: &Path, r: &PointResult) -> Result<(), SweepError> {
    let text = toml::to_string(r).map_err(|e| SweepError::Io(e.to_string()))?;
    // write-then-rename so an interrupted write never leaves a bad record
    let tmp: PathBuf = path.with_extension("tmp");
    std::fs::write(&tmp, text).map_err(|e| SweepError::Io(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| SweepError::Io(format!("{}: {e}", path.display())))
}

fn failed(error: String) -> PointResult {
    PointResult {
        status: "failed".into(),
        error: Some(error),
        values: BTreeMap::new(),
    }
}

/// Run one configuration and apply the reducers to it. Failures become a
/// failed row rather than an error.
pub fn evaluate(cfg: &SimulationConfig, reducers: &[Reducer]) -> PointResult {
    match simulate(cfg, reducers) {
        Ok(values) => PointResult {
            status: "ok".into(),
            error: None,
            values,
        },
        Err(e) => failed(e.to_string()),
    }
}

fn simulate(cfg: &SimulationConfig, reducers: &[Reducer]) -> Result<BTreeMap<String, String>, SimError> {
    let plan = cfg.plan().map_err(|e| SimError::Unsupported(e.to_string()))?;
    let mut sim = Simulation::new(&plan.ic, plan.grid, &plan.model, &plan.boundaries)?;
    let total = (cfg.t_max / plan.grid.dt() + 1e-9).floor() as u64;
    let windows: Vec<(f64, f64)> = reducers
        .iter()
        .filter_map(|r| match r {
            Reducer::BoundScatter { window, .. } => Some((window[0], window[1])),
            _ => None,
        })
        .collect();
    let formula = EnergyFormula::default();
    let mut e0 = None;
    let mut e_end = Vec::new();
    if total > 0 {
        if !windows.is_empty() {
            e0 = Some(sim.step_with_energy(formula, None)?.total);
        } else {
            sim.step()?;
        }
        sim.steps(total.saturating_sub(2))?;
        if total > 1 {
            match windows.first() {
                None => sim.step()?,
                Some(&w) => e_end.push(sim.step_with_energy(formula, Some(w))?.total),
            }
        }
    }
    sim.check_finite()?;
    let grid = sim.grid();
    let varphi = &sim.state().varphi;
    let mut out = BTreeMap::new();
    for r in reducers {
        match r {
            Reducer::Census => {
                let c = soliton_census(grid, varphi, LUMP_THRESHOLD, LUMP_MIN_WIDTH);
                out.insert("kinks".into(), c.kinks.to_string());
                out.insert("antikinks".into(), c.antikinks.to_string());
                out.insert("lumps".into(), c.lumps.to_string());
                out.insert("winding".into(), c.winding.to_string());
            }
            Reducer::Winding => {
                out.insert("winding".into(), winding_number(varphi).to_string());
            }
            Reducer::BoundScatter { threshold, .. } => {
                let (Some(e0), Some(&e)) = (e0, e_end.first()) else {
                    return Err(SimError::InsufficientData("bound/scatter needs at least two steps".into()));
                };
                let frac = e / e0;
                out.insert("energy_fraction".into(), fmt_f64(frac));
                out.insert("outcome".into(), if frac > *threshold { "bound" } else { "scattered" }.into());
            }
        }
    }
    Ok(out)
}

/// Number of changes between consecutive distinct outcomes, in row order.
pub fn alternations(outcomes: &[&str]) -> usize {
    outcomes.windows(2).filter(|w| w[0] != w[1]).count()
}

#[derive(Debug, Clone, Copy)]
pub struct SweepPreset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

impl SweepPreset {
    pub fn spec(&self) -> SweepSpec {
        SweepSpec::parse(self.toml, self.name).unwrap_or_else(|e| panic!("sweep preset {}: {e}", self.name))
    }
}

pub fn find_sweep(name: &str) -> Option<&'static SweepPreset> {
    SWEEP_PRESETS.iter().find(|p| p.name == name)
}

pub static SWEEP_PRESETS: &[SweepPreset] = &[
    SweepPreset {
        name: "positronium_fractal",
        summary: "bound or scattered pair versus initial speed, g=0.32, d=20u, u=0.05..0.70, T=1500",
        toml: r#"
schema_version = 1
name = "positronium_fractal"
preset = "positronium"
parallel = 1

[base]
name = "positronium_fractal"
t_max = 1500.0
grid = { length = 2800.0, dx = 0.2, dt = 0.16 }
model = { kind = "massive_schwinger", g = 0.32 }
probes = []
dump = { kind = "none" }
outputs = { formats = [] }

[[axes]]
path = "ic.u"
range = { start = 0.05, stop = 0.70, step = 0.01 }

[[linked]]
path = "ic.d"
from = "ic.u"
scale = 20.0

[[reducers]]
kind = "bound_scatter"
window = [-16.0, 16.0]
threshold = 0.1
"#,
    },
    SweepPreset {
        name: "pulse_sweep",
        summary: "boundary pulses over A=1..2, sigma=5..15, omega=0.5..0.9, T_p=40..80 searching for one fluxon, one antifluxon and one breather",
        toml: r#"
schema_version = 1
name = "pulse_sweep"
preset = "pulse_tuned"
parallel = 1

[base]
name = "pulse_sweep"
probes = []
dump = { kind = "none" }
outputs = { formats = [] }

[[axes]]
path = "boundaries.left.amplitude"
range = { start = 1.0, stop = 2.0, step = 0.1 }

[[axes]]
path = "boundaries.left.sigma_rise"
range = { start = 5.0, stop = 15.0, step = 1.0 }

[[axes]]
path = "boundaries.left.omega"
range = { start = 0.5, stop = 0.9, step = 0.1 }

[[axes]]
path = "boundaries.left.duration"
range = { start = 40.0, stop = 80.0, step = 2.0 }

[[linked]]
path = "boundaries.left.sigma_fall"
from = "boundaries.left.sigma_rise"

[[reducers]]
kind = "census"
"#,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"
schema_version = 1
name = "tiny"
parallel = 2

[base]
schema_version = 1
t_max = 2.0
grid = { length = 20.0, dx = 0.1, dt = 0.08 }
ic = { kind = "kink", x0 = 0.0, u = 0.1 }
outputs = { formats = [] }

[[axes]]
path = "ic.u"
values = [0.1, 0.2, 0.3]

[[axes]]
path = "ic.x0"
range = { start = -1.0, stop = 1.0, step = 1.0 }

[[reducers]]
kind = "census"
"#;

    #[test]
    fn ranges_include_both_ends() {
        let r = Range { start: 0.05, stop: 0.70, step: 0.01 };
        let v = r.values();
        assert_eq!(v.len(), 66);
        assert_eq!((v[0], v[65]), (0.05, 0.7));
        assert_eq!(v[25], 0.3);
    }

    #[test]
    fn size_is_the_product_of_axes() {
        let s = SweepSpec::parse(TINY, "tiny").unwrap();
        assert_eq!(s.size(), 9);
        let p = s.points();
        assert_eq!(p.len(), 9);
        // last axis fastest
        assert_eq!(p[1].coords[0].1, toml::Value::Float(0.1));
        assert_eq!(p[1].coords[1].1, toml::Value::Float(0.0));
        assert!(p.iter().all(|p| p.config.is_ok()));
        let hashes: std::collections::HashSet<_> = p.iter().map(|p| p.hash.clone()).collect();
        assert_eq!(hashes.len(), 9);
    }

    #[test]
    fn pulse_sweep_has_12705_points() {
        let s = find_sweep("pulse_sweep").unwrap().spec();
        let lens: Vec<usize> = s.axis_values().iter().map(Vec::len).collect();
        assert_eq!(lens, [11, 11, 5, 21]);
        assert_eq!(s.size(), 12705);
        let p = &s.points()[12704];
        let cfg = p.config.as_ref().unwrap();
        match &cfg.boundaries.left {
            sgdec_core::BoundaryCondition::Pulse(ps) => {
                assert_eq!((ps.amplitude, ps.sigma_rise, ps.sigma_fall, ps.omega, ps.duration), (2.0, 15.0, 15.0, 0.9, 80.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fractal_sweep_links_separation_to_speed() {
        let s = find_sweep("positronium_fractal").unwrap().spec();
        assert_eq!(s.size(), 66);
        for p in s.points() {
            let cfg = p.config.unwrap();
            match cfg.ic {
                sgdec_core::InitialCondition::KinkAntikinkPair { u, d, .. } => assert!((d - 20.0 * u).abs() < 1e-9),
                other => panic!("{other:?}"),
            }
            assert_eq!(cfg.model.g, 0.32);
        }
    }

    #[test]
    fn single_point_sweep_matches_a_plain_run() {
        let text = TINY.replace("values = [0.1, 0.2, 0.3]", "values = [0.2]").replace(
            "range = { start = -1.0, stop = 1.0, step = 1.0 }",
            "values = [0.5]",
        );
        let s = SweepSpec::parse(&text, "one").unwrap();
        assert_eq!(s.size(), 1);
        let cfg = s.points()[0].config.clone().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = s.run(dir.path()).unwrap();
        let mut sim = Simulation::new(&cfg.ic, cfg.grid.build().unwrap(), &cfg.model.to_model(), &cfg.boundaries).unwrap();
        sim.run_until(cfg.t_max).unwrap();
        let c = soliton_census(sim.grid(), &sim.state().varphi, LUMP_THRESHOLD, LUMP_MIN_WIDTH);
        let row = &report.rows[0];
        assert_eq!(row[3], "ok");
        assert_eq!(row[4..8], [c.kinks, c.antikinks, c.lumps, c.winding as usize].map(|v| v.to_string()));
    }

    #[test]
    fn failures_are_recorded_and_the_sweep_continues() {
        let text = TINY.replace("values = [0.1, 0.2, 0.3]", "values = [0.1, 1.5]");
        let s = SweepSpec::parse(&text, "f").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let r = s.run(dir.path()).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert_eq!(r.failed, 3);
        assert!(r.rows[3..].iter().all(|row| row[3] == "failed" && !row.last().unwrap().is_empty()));
    }

    #[test]
    fn resumed_sweep_matches_uninterrupted_one() {
        let s = SweepSpec::parse(TINY, "tiny").unwrap();
        let full = tempfile::tempdir().unwrap();
        let a = s.run(full.path()).unwrap();

        let part = tempfile::tempdir().unwrap();
        s.run(part.path()).unwrap();
        // forget some points, as if the run had been interrupted
        let mut files: Vec<_> = std::fs::read_dir(part.path().join("points")).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        for f in &files[..4] {
            std::fs::remove_file(f).unwrap();
        }
        let b = s.run(part.path()).unwrap();
        assert_eq!(b.reused, 5);
        assert_eq!(a.rows, b.rows);
        let read = |d: &Path| std::fs::read(d.join("report.csv")).unwrap();
        assert_eq!(read(full.path()), read(part.path()));
    }

    #[test]
    fn results_do_not_depend_on_parallelism() {
        let mut s = SweepSpec::parse(TINY, "tiny").unwrap();
        let a = s.run(tempfile::tempdir().unwrap().path()).unwrap();
        s.parallel = 1;
        let b = s.run(tempfile::tempdir().unwrap().path()).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn alternation_count() {
        assert_eq!(alternations(&["bound", "bound", "scattered", "bound", "scattered", "scattered"]), 3);
        assert_eq!(alternations(&["bound"]), 0);
    }
}
