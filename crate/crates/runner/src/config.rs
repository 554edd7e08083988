//! Run configuration: schema, layered loading (preset, file, overrides) and
//! validation.
//!
//! Every problem found is reported with the dotted path of the offending
//! parameter and, when it came from a file, its line and column.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgdec_core::diagnostics::EnergyFormula;
use sgdec_core::model::{Microshort, MuProfile, Source};
use sgdec_core::stepper::{DumpSchedule, Probe};
use sgdec_core::{BoundarySpec, InitialCondition, PhysicsModel, RunOptions, SimError, SpacetimeGrid};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub grid: GridConfig,
    #[serde(default)]
    pub model: ModelConfig,
    pub ic: InitialCondition,
    #[serde(default = "BoundarySpec::closed")]
    pub boundaries: BoundarySpec,
    pub t_max: f64,
    #[serde(default)]
    pub probes: Vec<Probe>,
    /// Probe sampling stride in steps.
    #[serde(default = "one")]
    pub probe_every: u64,
    #[serde(default)]
    pub dump: DumpSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyConfig>,
    /// Face-residual audit stride in steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_every: Option<u64>,
    #[serde(default)]
    pub outputs: OutputConfig,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub dx: f64,
    pub dt: f64,
    /// Left end of the domain; the domain is centred on 0 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
}

impl GridConfig {
    pub fn x_min(&self) -> f64 {
        self.x_min.unwrap_or(-0.5 * self.length)
    }

    pub fn build(&self) -> Result<SpacetimeGrid, SimError> {
        SpacetimeGrid::build(self.length, self.dx, self.dt, self.x_min())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Sg,
    MasslessSchwinger,
    MassiveSchwinger,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub kind: ModelKind,
    #[serde(default)]
    pub alpha: f64,
    /// Uniform bias current.
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub g: f64,
    /// Overrides the `g^2` mass term of the Schwinger models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<MuProfile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub microshorts: Vec<Microshort>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<Source>,
}

impl ModelConfig {
    pub fn to_model(&self) -> PhysicsModel {
        let mut m = match self.kind {
            ModelKind::Sg => PhysicsModel::sine_gordon(),
            ModelKind::MasslessSchwinger => PhysicsModel::massless_schwinger(self.g),
            ModelKind::MassiveSchwinger => PhysicsModel::massive_schwinger(self.g),
        };
        if self.kind == ModelKind::Sg {
            m.g = self.g;
        }
        m.alpha = self.alpha;
        if self.beta != 0.0 {
            m.sources.push(Source::Bias { beta: self.beta });
        }
        if let Some(m2) = self.mass2 {
            m.mass2 = m2;
        }
        if let Some(mu) = &self.mu {
            m.mu = mu.clone();
        }
        m.microshorts = self.microshorts.clone();
        m.sources.extend(self.sources.iter().cloned());
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    /// Sampling stride in steps.
    pub every: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub formula: EnergyFormula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// Probe series.
    Csv,
    /// Field snapshots.
    Sgf1,
    /// Space-time heatmap.
    Ppm,
    /// Per-snapshot diagnostics and the energy series.
    Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatmapField {
    Phi,
    #[default]
    PhiX,
    PhiT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
    #[serde(default)]
    pub heatmap: HeatmapField,
    /// Maximum heatmap width in pixels; columns are averaged down to it.
    #[serde(default = "default_width")]
    pub heatmap_width: usize,
}

fn default_formats() -> Vec<OutputFormat> {
    vec![
        OutputFormat::Csv,
        OutputFormat::Sgf1,
        OutputFormat::Ppm,
        OutputFormat::Diagnostics,
    ]
}

fn default_width() -> usize {
    800
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            formats: default_formats(),
            heatmap: HeatmapField::default(),
            heatmap_width: default_width(),
        }
    }
}

/// Everything needed to start a run.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub ic: InitialCondition,
    pub grid: SpacetimeGrid,
    pub model: PhysicsModel,
    pub boundaries: BoundarySpec,
    pub options: RunOptions,
}

impl SimulationConfig {
    /// Semantic checks on the scalar parameters. Nothing is allocated.
    pub fn validate(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut err = |path: &str, msg: String| out.push(ConfigIssue::new(path, msg));

        if self.schema_version != SCHEMA_VERSION {
            err(
                "schema_version",
                format!("unsupported schema version {}; this build reads version {SCHEMA_VERSION}", self.schema_version),
            );
        }

        let g = &self.grid;
        let mut grid_ok = true;
        for (name, v) in [("grid.length", g.length), ("grid.dx", g.dx), ("grid.dt", g.dt)] {
            if !(v.is_finite() && v > 0.0) {
                err(name, format!("must be finite and > 0, got {v}"));
                grid_ok = false;
            }
        }
        if !g.x_min().is_finite() {
            err("grid.x_min", format!("must be finite, got {}", g.x_min()));
            grid_ok = false;
        }
        if grid_ok {
            if g.dt >= g.dx {
                err(
                    "grid.dt",
                    format!("violates the stability rule dt < dx (dt = {}, dx = {})", g.dt, g.dx),
                );
            }
            if g.length < 2.0 * g.dx * (1.0 - 1e-9) {
                err(
                    "grid.length",
                    format!("must be at least 2 dx = {} to hold three vertices, got {}", 2.0 * g.dx, g.length),
                );
            }
        }
        let (lo, hi) = (g.x_min(), g.x_min() + g.length);
        let inside = |x: f64| grid_ok && x >= lo - 1e-9 && x <= hi + 1e-9;

        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            err("t_max", format!("must be finite and > 0, got {}", self.t_max));
        }

        let m = &self.model;
        if !(m.alpha.is_finite() && m.alpha >= 0.0) {
            err("model.alpha", format!("must be finite and >= 0, got {}", m.alpha));
        }
        if !m.beta.is_finite() {
            err("model.beta", format!("must be finite, got {}", m.beta));
        }
        if !m.g.is_finite() {
            err("model.g", format!("must be finite, got {}", m.g));
        } else if m.kind != ModelKind::Sg && m.g <= 0.0 {
            err("model.g", format!("Schwinger models need g > 0, got {}", m.g));
        }
        if let Some(m2) = m.mass2 {
            if !(m2.is_finite() && m2 >= 0.0) {
                err("model.mass2", format!("must be finite and >= 0, got {m2}"));
            }
        }
        for (i, s) in m.microshorts.iter().enumerate() {
            if !inside(s.x) {
                err(
                    &format!("model.microshorts[{i}].x"),
                    format!("microshort at x = {} lies outside [{lo}, {hi}]", s.x),
                );
            }
            if !(s.mu.is_finite() && s.mu >= 0.0) {
                err(&format!("model.microshorts[{i}].mu"), format!("must be >= 0, got {}", s.mu));
            }
        }
        for (i, s) in m.sources.iter().enumerate() {
            if !matches!(s, Source::Bias { .. }) && m.g == 0.0 {
                err(
                    &format!("model.sources[{i}]"),
                    "background-field sources enter as -g F and need g != 0".into(),
                );
            }
        }
        if let Err(e) = m.to_model().validate() {
            err(&prefixed("model", &e), message(&e));
        }

        if let Err(e) = self.ic.validate() {
            err(&prefixed("ic", &e), message(&e));
        }
        if matches!(self.ic, InitialCondition::Custom(_)) {
            err("ic", "custom initial data cannot be given in a file".into());
        }
        if let Err(e) = self.boundaries.left.validate() {
            err("boundaries.left", message(&e));
        }
        if let Err(e) = self.boundaries.right.validate() {
            err("boundaries.right", message(&e));
        }

        let mut seen = HashMap::new();
        for (i, p) in self.probes.iter().enumerate() {
            if p.name.is_empty() || p.name == "t" {
                err(&format!("probes[{i}].name"), format!("`{}` is not a usable column name", p.name));
            } else if let Some(j) = seen.insert(p.name.as_str(), i) {
                err(&format!("probes[{i}].name"), format!("duplicates the name of probes[{j}]"));
            }
            if !inside(p.x) {
                err(
                    &format!("probes[{i}].x"),
                    format!("probe at x = {} lies outside [{lo}, {hi}]", p.x),
                );
            }
        }
        if self.probe_every == 0 {
            err("probe_every", "must be >= 1".into());
        }
        match &self.dump {
            DumpSchedule::Stride { steps: 0 } => err("dump.steps", "must be >= 1".into()),
            DumpSchedule::Times { times } => {
                for (i, t) in times.iter().enumerate() {
                    if !(t.is_finite() && *t >= 0.0 && *t <= self.t_max) {
                        err(&format!("dump.times[{i}]"), format!("must lie in [0, t_max], got {t}"));
                    }
                }
            }
            _ => {}
        }
        if let Some(e) = &self.energy {
            if e.every == 0 {
                err("energy.every", "must be >= 1".into());
            }
            if let Some([a, b]) = e.window {
                if !(a < b) || !inside(a) || !inside(b) {
                    err(
                        "energy.window",
                        format!("window [{a}, {b}] must be increasing and inside [{lo}, {hi}]"),
                    );
                }
            }
        }
        if self.audit_every == Some(0) {
            err("audit_every", "must be >= 1".into());
        }
        if self.outputs.heatmap_width < 2 {
            err("outputs.heatmap_width", "must be >= 2".into());
        }
        out
    }

    /// Validate and assemble the solver inputs.
    pub fn plan(&self) -> Result<RunPlan, ConfigError> {
        let issues = self.validate();
        if !issues.is_empty() {
            return Err(ConfigError::new("config", issues));
        }
        let grid = self
            .grid
            .build()
            .map_err(|e| ConfigError::new("config", vec![ConfigIssue::new("grid", message(&e))]))?;
        let mut options = RunOptions::new(self.t_max);
        options.probes = self.probes.clone();
        options.probe_every = self.probe_every;
        options.dump = self.dump.clone();
        if let Some(e) = &self.energy {
            options.energy_every = Some(e.every);
            options.energy_window = e.window.map(|[a, b]| (a, b));
            options.energy_formula = e.formula;
        }
        options.audit_every = self.audit_every;
        Ok(RunPlan {
            ic: self.ic.clone(),
            grid,
            model: self.model.to_model(),
            boundaries: self.boundaries.clone(),
            options,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialise")
    }
}

fn message(e: &SimError) -> String {
    match e {
        SimError::InvalidParameter { reason, .. } => reason.clone(),
        other => other.to_string(),
    }
}

/// Dotted path for a core validation error, rooted at `root`.
fn prefixed(root: &str, e: &SimError) -> String {
    match e {
        SimError::InvalidParameter { name, .. } => {
            let name = name.strip_prefix(root).map(|n| n.trim_start_matches('.')).unwrap_or(name);
            if name.is_empty() {
                root.to_string()
            } else {
                format!("{root}.{name}")
            }
        }
        _ => root.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
    pub location: Option<Location>,
}

impl ConfigIssue {
    pub fn new(path: &str, message: String) -> Self {
        Self {
            path: path.to_string(),
            message,
            location: None,
        }
    }
}

/// All problems found in one configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    /// File name or other description of where the text came from.
    pub origin: String,
    pub issues: Vec<ConfigIssue>,
}

impl ConfigError {
    pub fn new(origin: &str, issues: Vec<ConfigIssue>) -> Self {
        Self {
            origin: origin.to_string(),
            issues,
        }
    }

    fn single(origin: &str, path: &str, message: String) -> Self {
        Self::new(origin, vec![ConfigIssue::new(path, message)])
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.issues.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            match i.location {
                Some(l) => write!(f, "{}:{}:{}: ", self.origin, l.line, l.column)?,
                None => write!(f, "{}: ", self.origin)?,
            }
            if i.path.is_empty() {
                write!(f, "{}", i.message)?;
            } else {
                write!(f, "{}: {}", i.path, i.message)?;
            }
        }
        Ok(())
    }
}

/// A parsed TOML document with the position of every key.
#[derive(Debug, Clone)]
pub struct Document {
    pub origin: String,
    pub table: toml::Table,
    spans: HashMap<String, Location>,
}

impl Document {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let doc = toml_edit::Document::parse(text.to_string()).map_err(|e| {
            let location = e.span().map(|s| line_col(text, s.start));
            ConfigError::new(
                origin,
                vec![ConfigIssue {
                    path: String::new(),
                    message: format!("syntax error: {}", e.message()),
                    location,
                }],
            )
        })?;
        let mut spans = HashMap::new();
        index_table(text, doc.as_table(), "", &mut spans);
        let table: toml::Table = toml::from_str(text).map_err(|e| {
            ConfigError::new(
                origin,
                vec![ConfigIssue {
                    path: String::new(),
                    message: format!("syntax error: {}", e.message()),
                    location: e.span().map(|s| line_col(text, s.start)),
                }],
            )
        })?;
        Ok(Self {
            origin: origin.to_string(),
            table,
            spans,
        })
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::single(&origin, "", format!("cannot read file: {e}")))?;
        Self::parse(&text, &origin)
    }

    /// Position of `path` or of its nearest ancestor present in the file.
    pub fn locate(&self, path: &str) -> Option<Location> {
        let mut p = path.to_string();
        loop {
            if let Some(l) = self.spans.get(&p) {
                return Some(*l);
            }
            let cut = p.rfind(['.', '['])?;
            p.truncate(cut);
        }
    }
}

fn line_col(text: &str, offset: usize) -> Location {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |i| offset - i - 1) + 1;
    Location { line, column }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn index_table(text: &str, t: &toml_edit::Table, prefix: &str, out: &mut HashMap<String, Location>) {
    for (key, item) in t.iter() {
        let path = join(prefix, key);
        let span = t.key(key).and_then(|k| k.span()).or_else(|| item.span());
        if let Some(s) = span {
            out.insert(path.clone(), line_col(text, s.start));
        }
        index_item(text, item, &path, out);
    }
}

fn index_item(text: &str, item: &toml_edit::Item, path: &str, out: &mut HashMap<String, Location>) {
    match item {
        toml_edit::Item::Table(t) => index_table(text, t, path, out),
        toml_edit::Item::ArrayOfTables(a) => {
            for (i, t) in a.iter().enumerate() {
                let p = format!("{path}[{i}]");
                if let Some(s) = t.span() {
                    out.insert(p.clone(), line_col(text, s.start));
                }
                index_table(text, t, &p, out);
            }
        }
        toml_edit::Item::Value(v) => index_value(text, v, path, out),
        toml_edit::Item::None => {}
    }
}

fn index_value(text: &str, v: &toml_edit::Value, path: &str, out: &mut HashMap<String, Location>) {
    match v {
        toml_edit::Value::InlineTable(t) => {
            for (key, val) in t.iter() {
                let p = join(path, key);
                let span = t.key(key).and_then(|k| k.span()).or_else(|| val.span());
                if let Some(s) = span {
                    out.insert(p.clone(), line_col(text, s.start));
                }
                index_value(text, val, &p, out);
            }
        }
        toml_edit::Value::Array(a) => {
            for (i, val) in a.iter().enumerate() {
                let p = format!("{path}[{i}]");
                if let Some(s) = val.span() {
                    out.insert(p.clone(), line_col(text, s.start));
                }
                index_value(text, val, &p, out);
            }
        }
        _ => {}
    }
}

/// Deep merge: tables merge key by key, everything else is replaced.
pub fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Apply one `path=value` override. The value is read as a TOML value and
/// falls back to a plain string. Numeric path segments index arrays.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), ConfigIssue> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| ConfigIssue::new(spec, "override must have the form path=value".into()))?;
    let path = path.trim();
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let segs: Vec<&str> = path.split('.').collect();
    if path.is_empty() || segs.iter().any(|s| s.is_empty()) {
        return Err(ConfigIssue::new(path, "empty path segment in override".into()));
    }
    set_path(table, &segs, value).map_err(|m| ConfigIssue::new(path, m))
}

fn set_path(table: &mut toml::Table, segs: &[&str], value: toml::Value) -> Result<(), String> {
    let (head, rest) = segs.split_first().expect("non-empty path");
    if rest.is_empty() {
        table.insert(head.to_string(), value);
        return Ok(());
    }
    let next = table
        .entry(head.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    set_value(next, rest, value)
}

fn set_value(node: &mut toml::Value, segs: &[&str], value: toml::Value) -> Result<(), String> {
    match node {
        toml::Value::Table(t) => set_path(t, segs, value),
        toml::Value::Array(a) => {
            let (head, rest) = segs.split_first().expect("non-empty path");
            let i: usize = head.parse().map_err(|_| format!("`{head}` is not an array index"))?;
            let len = a.len();
            let slot = a.get_mut(i).ok_or_else(|| format!("index {i} out of range (array has {len} elements)"))?;
            if rest.is_empty() {
                *slot = value;
                Ok(())
            } else {
                set_value(slot, rest, value)
            }
        }
        _ => Err(format!("`{}` is not a table", segs[0])),
    }
}

/// Deserialize and validate a merged table. `doc` supplies positions for
/// error messages.
pub fn from_table(table: toml::Table, doc: Option<&Document>) -> Result<SimulationConfig, ConfigError> {
    let origin = doc.map_or("config", |d| d.origin.as_str());
    let locate = |path: &str| doc.and_then(|d| d.locate(path));
    let de = toml::Value::Table(table);
    let cfg: SimulationConfig = match serde_path_to_error::deserialize(de) {
        Ok(c) => c,
        Err(e) => {
            let mut path = e.path().to_string();
            if path == "." {
                path.clear();
            }
            let message = e.inner().to_string().trim().to_string();
            let mut location = locate(&path);
            if let Some(field) = unknown_field(&message) {
                if !path.ends_with(&field) {
                    location = locate(&join(&path, &field)).or(location);
                }
            }
            return Err(ConfigError::new(
                origin,
                vec![ConfigIssue {
                    path,
                    message,
                    location,
                }],
            ));
        }
    };
    let mut issues = cfg.validate();
    if !issues.is_empty() {
        for i in &mut issues {
            i.location = locate(&i.path);
        }
        return Err(ConfigError::new(origin, issues));
    }
    Ok(cfg)
}

fn unknown_field(msg: &str) -> Option<String> {
    let rest = msg.split("unknown field `").nth(1)?;
    Some(rest.split('`').next()?.to_string())
}

/// Parse and validate one configuration text.
pub fn parse_config(text: &str, origin: &str) -> Result<SimulationConfig, ConfigError> {
    let doc = Document::parse(text, origin)?;
    from_table(doc.table.clone(), Some(&doc))
}

/// Load a configuration file.
pub fn load_config(path: &Path) -> Result<SimulationConfig, ConfigError> {
    let doc = Document::read(path)?;
    from_table(doc.table.clone(), Some(&doc))
}

/// Layered loading: preset, then file, then `path=value` overrides.
pub fn load_layered(preset: Option<&str>, file: Option<&Path>, overrides: &[String]) -> Result<SimulationConfig, ConfigError> {
    let mut table = toml::Table::new();
    if let Some(name) = preset {
        let p = crate::presets::find(name).ok_or_else(|| {
            ConfigError::single(
                "preset",
                "",
                format!("unknown preset `{name}`; run `sgdec presets` for the list"),
            )
        })?;
        table = p.table();
    }
    let doc = match file {
        Some(f) => Some(Document::read(f)?),
        None => None,
    };
    if let Some(d) = &doc {
        merge(&mut table, d.table.clone());
    }
    if preset.is_none() && doc.is_none() {
        return Err(ConfigError::single("config", "", "need a config file or --preset".into()));
    }
    let mut issues = Vec::new();
    for o in overrides {
        if let Err(i) = apply_override(&mut table, o) {
            issues.push(i);
        }
    }
    if !issues.is_empty() {
        return Err(ConfigError::new("--override", issues));
    }
    from_table(table, doc.as_ref())
}
