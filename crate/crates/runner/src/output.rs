//! File outputs of a run: probe CSV, SGF1 snapshots, PPM heatmaps,
//! diagnostics CSV and the run manifest.
//!
//! SGF1 layout (all little-endian):
//!
//! ```text
//! "SGF1"  u32 nx  u32 n_snapshots  f64 dx  f64 dt  f64 x_min
//! n_snapshots x ( f64 t, nx f64 phi, (nx-1) f64 phi_x, nx f64 phi_t )
//! ```
//!
//! `phi_x` and `phi_t` are the raw edge values (line integrals of the
//! derivatives along one grid edge); `phi_t` holds the temporal edges that
//! end on the snapshot slice.
//!
//! Heatmaps use a fixed diverging map: values are scaled to `[-lim, lim]`
//! with `lim = max(|min|, |max|)` and coloured blue (59, 76, 192) at `-lim`,
//! light grey (221, 221, 221) at zero and red (180, 4, 38) at `+lim`,
//! linearly in between. Each `.ppm` has a `.ppm.txt` sidecar giving the
//! field, the data range and `lim`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sgdec_core::diagnostics::{
    primary_kink, soliton_census, total_charge, CollisionCounter, EnergyBreakdown, KinkTracker, KINK_MERGE_DISTANCE,
};
use sgdec_core::stepper::{FieldState, TrajectorySink};
use sgdec_core::{SimError, SpacetimeGrid};

use crate::config::{HeatmapField, OutputConfig, OutputFormat};

pub const SGF1_MAGIC: &[u8; 4] = b"SGF1";
const SGF1_HEADER: u64 = 4 + 4 + 4 + 8 * 3;

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> SimError {
    SimError::Io(format!("{}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// SGF1

pub struct Sgf1Writer {
    path: PathBuf,
    out: BufWriter<File>,
    nx: usize,
    count: u32,
}

impl Sgf1Writer {
    pub fn create(path: &Path, grid: &SpacetimeGrid) -> io::Result<Self> {
        let nx = u32::try_from(grid.nx()).map_err(|_| io::Error::other("grid too large for SGF1"))?;
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(SGF1_MAGIC)?;
        out.write_all(&nx.to_le_bytes())?;
        out.write_all(&0u32.to_le_bytes())?;
        for v in [grid.dx(), grid.dt(), grid.x_min()] {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(Self {
            path: path.to_path_buf(),
            out,
            nx: grid.nx(),
            count: 0,
        })
    }

    pub fn push(&mut self, t: f64, s: &FieldState) -> io::Result<()> {
        if s.nx() != self.nx {
            return Err(io::Error::other("snapshot size does not match the header"));
        }
        let mut buf = Vec::with_capacity(8 * (3 * self.nx));
        buf.extend_from_slice(&t.to_le_bytes());
        for v in s.varphi.iter().chain(&s.phi_x).chain(&s.phi_t_prev) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        self.out.write_all(&buf)?;
        self.count += 1;
        Ok(())
    }

    /// Patch the snapshot count into the header and flush.
    pub fn finish(mut self) -> io::Result<PathBuf> {
        self.out.flush()?;
        let f = self.out.get_mut();
        f.seek(SeekFrom::Start(8))?;
        f.write_all(&self.count.to_le_bytes())?;
        f.sync_all()?;
        Ok(self.path)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sgf1Snapshot {
    pub t: f64,
    pub state: FieldState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sgf1File {
    pub nx: usize,
    pub dx: f64,
    pub dt: f64,
    pub x_min: f64,
    pub snapshots: Vec<Sgf1Snapshot>,
}

impl Sgf1File {
    pub fn grid(&self) -> Result<SpacetimeGrid, SimError> {
        SpacetimeGrid::new(self.nx, self.dx, self.dt, self.x_min)
    }
}

pub fn sgf1_size(nx: usize, snapshots: usize) -> u64 {
    SGF1_HEADER + snapshots as u64 * 8 * (1 + 3 * nx as u64 - 1)
}

pub fn read_sgf1(path: &Path) -> Result<Sgf1File, SimError> {
    let mut r = BufReader::new(File::open(path).map_err(|e| io_err(path, e))?);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| io_err(path, e))?;
    let bad = |m: &str| SimError::Io(format!("{}: not a valid SGF1 file: {m}", path.display()));
    if bytes.len() < SGF1_HEADER as usize || &bytes[..4] != SGF1_MAGIC {
        return Err(bad("missing magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let nx = u32_at(4) as usize;
    let n = u32_at(8) as usize;
    if nx < 3 {
        return Err(bad("fewer than three vertices"));
    }
    if bytes.len() as u64 != sgf1_size(nx, n) {
        return Err(bad(&format!(
            "size {} does not match {n} snapshots of {nx} vertices",
            bytes.len()
        )));
    }
    let (dx, dt, x_min) = (f64_at(12), f64_at(20), f64_at(28));
    let mut o = SGF1_HEADER as usize;
    let mut take = |k: usize| -> Vec<f64> {
        let v = (0..k).map(|i| f64_at(o + 8 * i)).collect();
        o += 8 * k;
        v
    };
    let mut snapshots = Vec::with_capacity(n);
    for _ in 0..n {
        let t = take(1)[0];
        let varphi = take(nx);
        let phi_x = take(nx - 1);
        let phi_t_prev = take(nx);
        let j = (t / dt).round() as u64;
        snapshots.push(Sgf1Snapshot {
            t,
            state: FieldState {
                j,
                varphi,
                phi_x,
                phi_t_prev,
            },
        });
    }
    Ok(Sgf1File {
        nx,
        dx,
        dt,
        x_min,
        snapshots,
    })
}

// ---------------------------------------------------------------------------
// heatmap

const COLD: [f64; 3] = [59.0, 76.0, 192.0];
const MID: [f64; 3] = [221.0, 221.0, 221.0];
const HOT: [f64; 3] = [180.0, 4.0, 38.0];

/// Colour of `v` on the diverging map with half-range `lim`.
pub fn diverging(v: f64, lim: f64) -> [u8; 3] {
    let s = if lim > 0.0 { (v / lim).clamp(-1.0, 1.0) } else { 0.0 };
    let (a, b, w) = if s < 0.0 { (MID, COLD, -s) } else { (MID, HOT, s) };
    [0, 1, 2].map(|k| (a[k] + (b[k] - a[k]) * w).round() as u8)
}

/// Rows of a space-time heatmap, one per snapshot, columns averaged down to
/// at most `width` pixels.
pub struct Heatmap {
    field: HeatmapField,
    width: usize,
    rows: Vec<Vec<f64>>,
}

impl Heatmap {
    pub fn new(field: HeatmapField, width: usize) -> Self {
        Self {
            field,
            width: width.max(2),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, s: &FieldState) {
        let src: &[f64] = match self.field {
            HeatmapField::Phi => &s.varphi,
            HeatmapField::PhiX => &s.phi_x,
            HeatmapField::PhiT => &s.phi_t_prev,
        };
        let w = self.width.min(src.len());
        let row = (0..w)
            .map(|c| {
                let a = c * src.len() / w;
                let b = ((c + 1) * src.len() / w).max(a + 1);
                src[a..b].iter().sum::<f64>() / (b - a) as f64
            })
            .collect();
        self.rows.push(row);
    }

    pub fn range(&self) -> (f64, f64) {
        self.rows
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Binary PPM with time running downwards, plus the sidecar.
    pub fn write(&self, path: &Path) -> io::Result<()> {
        let h = self.rows.len();
        let w = self.rows.first().map_or(0, Vec::len);
        let (lo, hi) = self.range();
        let lim = if h == 0 { 0.0 } else { lo.abs().max(hi.abs()) };
        let mut out = BufWriter::new(File::create(path)?);
        write!(out, "P6\n{w} {h}\n255\n")?;
        for row in &self.rows {
            for &v in row {
                out.write_all(&diverging(v, lim))?;
            }
        }
        out.flush()?;
        let field = match self.field {
            HeatmapField::Phi => "phi",
            HeatmapField::PhiX => "phi_x",
            HeatmapField::PhiT => "phi_t",
        };
        let mut side = File::create(sidecar(path))?;
        let (lo, hi) = if h == 0 { (0.0, 0.0) } else { (lo, hi) };
        writeln!(side, "field {field}")?;
        writeln!(side, "min {}", fmt_f64(lo))?;
        writeln!(side, "max {}", fmt_f64(hi))?;
        writeln!(side, "lim {}", fmt_f64(lim))?;
        writeln!(side, "rows {h} columns {w}")?;
        Ok(())
    }
}

pub fn sidecar(ppm: &Path) -> PathBuf {
    let mut s = ppm.as_os_str().to_owned();
    s.push(".txt");
    PathBuf::from(s)
}

// ---------------------------------------------------------------------------
// per-snapshot diagnostics

/// Observables recomputed from one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnapshotDiagnostics {
    pub t: f64,
    pub winding: i64,
    pub kinks: usize,
    pub antikinks: usize,
    pub lumps: usize,
    /// Position of the kink nearest the domain centre.
    pub kink_x: Option<f64>,
    pub kink_v: Option<f64>,
    /// `-(phi(right) - phi(left))`; multiply by `g` for the charge.
    pub flux: f64,
    /// Largest `|phi_x - diff(phi)|`.
    pub compatibility: f64,
    pub collisions: u64,
}

/// Lump threshold and minimum width used by the census.
pub const LUMP_THRESHOLD: f64 = 0.5;
pub const LUMP_MIN_WIDTH: f64 = 1.0;

pub struct DiagnosticsTracker {
    tracker: KinkTracker,
    collisions: CollisionCounter,
    pub rows: Vec<SnapshotDiagnostics>,
}

impl DiagnosticsTracker {
    pub fn new(grid: &SpacetimeGrid) -> Self {
        Self {
            tracker: KinkTracker::new(KINK_MERGE_DISTANCE),
            collisions: CollisionCounter::for_grid(grid),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, grid: &SpacetimeGrid, t: f64, s: &FieldState) -> SnapshotDiagnostics {
        let census = soliton_census(grid, &s.varphi, LUMP_THRESHOLD, LUMP_MIN_WIDTH);
        let tracks = self.tracker.update(grid, t, &s.varphi);
        let kink_x = primary_kink(grid, &s.varphi);
        self.collisions.push(kink_x);
        let kink_v = kink_x.and_then(|x| {
            tracks
                .iter()
                .min_by(|a, b| (a.position - x).abs().total_cmp(&(b.position - x).abs()))
                .filter(|k| k.velocity.is_finite())
                .map(|k| k.velocity)
        });
        let row = SnapshotDiagnostics {
            t,
            winding: census.winding,
            kinks: census.kinks,
            antikinks: census.antikinks,
            lumps: census.lumps,
            kink_x,
            kink_v,
            flux: total_charge(1.0, &s.varphi),
            compatibility: s.compatibility_defect(),
            collisions: self.collisions.count(),
        };
        self.rows.push(row);
        row
    }
}

pub fn write_diagnostics_csv(path: &Path, rows: &[SnapshotDiagnostics]) -> Result<(), SimError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    w.write_record([
        "t",
        "winding",
        "kinks",
        "antikinks",
        "lumps",
        "kink_x",
        "kink_v",
        "flux",
        "compatibility",
        "collisions",
    ])
    .map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record([
            fmt_f64(r.t),
            r.winding.to_string(),
            r.kinks.to_string(),
            r.antikinks.to_string(),
            r.lumps.to_string(),
            opt(r.kink_x),
            opt(r.kink_v),
            fmt_f64(r.flux),
            fmt_f64(r.compatibility),
            r.collisions.to_string(),
        ])
        .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

// ---------------------------------------------------------------------------
// sink

/// Which files a finished or aborted run produced.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Manifest {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub steps: u64,
    pub t_end: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_face_residual: Option<f64>,
    pub snapshots: usize,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = dir.join("manifest.toml");
        let text = toml::to_string(self).map_err(io::Error::other)?;
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// Streams a run into the files selected by an [`OutputConfig`].
pub struct OutputSink {
    dir: PathBuf,
    grid: SpacetimeGrid,
    probes: Option<csv::Writer<BufWriter<File>>>,
    sgf1: Option<Sgf1Writer>,
    heatmap: Option<Heatmap>,
    diagnostics: Option<DiagnosticsTracker>,
    energy: Option<csv::Writer<BufWriter<File>>>,
    audit: Option<csv::Writer<BufWriter<File>>>,
    pub files: Vec<String>,
    pub energies: Vec<EnergyBreakdown>,
    pub residuals: Vec<(f64, f64)>,
}

impl OutputSink {
    pub fn create(dir: &Path, grid: &SpacetimeGrid, cfg: &OutputConfig, probe_names: &[String], energy: bool, audit: bool) -> Result<Self, SimError> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let has = |f: OutputFormat| cfg.formats.contains(&f);
        let mut files = Vec::new();
        let mut csv_at = |name: &str, header: &[&str]| -> Result<csv::Writer<BufWriter<File>>, SimError> {
            let path = dir.join(name);
            let f = File::create(&path).map_err(|e| io_err(&path, e))?;
            let mut w = csv::Writer::from_writer(BufWriter::new(f));
            w.write_record(header).map_err(|e| io_err(&path, e))?;
            files.push(name.to_string());
            Ok(w)
        };
        let probes = if has(OutputFormat::Csv) && !probe_names.is_empty() {
            let mut header = vec!["t"];
            header.extend(probe_names.iter().map(String::as_str));
            Some(csv_at("probes.csv", &header)?)
        } else {
            None
        };
        let diag = has(OutputFormat::Diagnostics);
        let energy = if diag && energy {
            Some(csv_at("energy.csv", &["t", "gradient", "kinetic", "potential", "field", "total"])?)
        } else {
            None
        };
        let audit = if diag && audit {
            Some(csv_at("audit.csv", &["t", "max_face_residual"])?)
        } else {
            None
        };
        let sgf1 = if has(OutputFormat::Sgf1) {
            let path = dir.join("snapshots.sgf1");
            files.push("snapshots.sgf1".into());
            Some(Sgf1Writer::create(&path, grid).map_err(|e| io_err(&path, e))?)
        } else {
            None
        };
        Ok(Self {
            dir: dir.to_path_buf(),
            grid: *grid,
            probes,
            sgf1,
            heatmap: has(OutputFormat::Ppm).then(|| Heatmap::new(cfg.heatmap, cfg.heatmap_width)),
            diagnostics: diag.then(|| DiagnosticsTracker::new(grid)),
            energy,
            audit,
            files,
            energies: Vec::new(),
            residuals: Vec::new(),
        })
    }

    /// Flush everything and write the files that are only known at the end.
    pub fn finish(&mut self) -> Result<(), SimError> {
        let dir = self.dir.clone();
        for w in [&mut self.probes, &mut self.energy, &mut self.audit].into_iter().flatten() {
            w.flush().map_err(|e| io_err(&dir, e))?;
        }
        if let Some(w) = self.sgf1.take() {
            w.finish().map_err(|e| io_err(&dir.join("snapshots.sgf1"), e))?;
        }
        if let Some(h) = &self.heatmap {
            let path = dir.join("heatmap.ppm");
            h.write(&path).map_err(|e| io_err(&path, e))?;
            self.files.push("heatmap.ppm".into());
            self.files.push("heatmap.ppm.txt".into());
        }
        if let Some(d) = &self.diagnostics {
            write_diagnostics_csv(&dir.join("diagnostics.csv"), &d.rows)?;
            self.files.push("diagnostics.csv".into());
        }
        Ok(())
    }

    pub fn diagnostics(&self) -> Option<&[SnapshotDiagnostics]> {
        self.diagnostics.as_ref().map(|d| d.rows.as_slice())
    }
}

impl TrajectorySink for OutputSink {
    fn on_probe(&mut self, t: f64, values: &[f64]) -> sgdec_core::Result<()> {
        if let Some(w) = &mut self.probes {
            let mut rec = Vec::with_capacity(values.len() + 1);
            rec.push(fmt_f64(t));
            rec.extend(values.iter().map(|v| fmt_f64(*v)));
            w.write_record(&rec).map_err(|e| io_err(&self.dir.join("probes.csv"), e))?;
        }
        Ok(())
    }

    fn on_snapshot(&mut self, t: f64, s: &FieldState) -> sgdec_core::Result<()> {
        if let Some(w) = &mut self.sgf1 {
            w.push(t, s).map_err(|e| io_err(&self.dir.join("snapshots.sgf1"), e))?;
        }
        if let Some(h) = &mut self.heatmap {
            h.push(s);
        }
        if let Some(d) = &mut self.diagnostics {
            d.push(&self.grid, t, s);
        }
        Ok(())
    }

    fn on_energy(&mut self, e: &EnergyBreakdown) -> sgdec_core::Result<()> {
        self.energies.push(*e);
        if let Some(w) = &mut self.energy {
            w.write_record([e.t, e.gradient, e.kinetic, e.potential, e.field, e.total].map(fmt_f64))
                .map_err(|err| io_err(&self.dir.join("energy.csv"), err))?;
        }
        Ok(())
    }

    fn on_audit(&mut self, t: f64, r: f64) -> sgdec_core::Result<()> {
        self.residuals.push((t, r));
        if let Some(w) = &mut self.audit {
            w.write_record([fmt_f64(t), fmt_f64(r)])
                .map_err(|e| io_err(&self.dir.join("audit.csv"), e))?;
        }
        Ok(())
    }
}

/// Read a probe CSV back into its header and columns.
pub fn read_probe_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), SimError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| io_err(path, e))?.iter().map(str::to_string).collect();
    let mut cols = vec![Vec::new(); header.len()];
    for rec in r.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        for (c, field) in cols.iter_mut().zip(rec.iter()) {
            c.push(field.parse::<f64>().map_err(|e| io_err(path, e))?);
        }
    }
    Ok((header, cols))
}
