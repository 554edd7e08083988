//! Measurements on simulation output: discrete energies, face residuals,
//! Schwinger observables, kink tracking, collision counting and
//! frequency/envelope extraction from probe series.

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SimError};
use crate::mesh::SpacetimeGrid;
use crate::model::Coefficients;

// ---------------------------------------------------------------------------
// energy

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub t: f64,
    /// `(d_x phi)^2 / 2`
    pub gradient: f64,
    /// `(d_t phi)^2 / 2`
    pub kinetic: f64,
    /// `mu (1 - cos phi)`, microshorts included.
    pub potential: f64,
    /// `m2 phi^2 / 2 - s phi + F^2 / 2`, i.e. `(g phi + F)^2 / 2` for Schwinger models.
    pub field: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(t: f64, gradient: f64, kinetic: f64, potential: f64, field: f64) -> Self {
        Self {
            t,
            gradient,
            kinetic,
            potential,
            field,
            total: gradient + kinetic + potential + field,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyFormula {
    /// Mean of the energies of the two time strips that meet at slice `j`.
    /// Kinetic `dx (a^2 + b^2) / (4 dt^2)`, gradient and mass terms as
    /// products of slice `j` with its neighbours `j-1` and `j+1`. The linear
    /// part of the update conserves this exactly.
    #[default]
    Centered,
    /// Squared average of the two temporal edges, `dx (a + b)^2 / (8 dt^2)`,
    /// and squares of the slice-`j` fields.
    Continuum,
    /// Kinetic term transcribed as printed, `dx (a + b) / (4 dt^2)` without
    /// the square, and full `dx` weights everywhere. Kept for comparison only.
    Literal,
}

/// Slice `j` with the temporal edges on both sides of it.
#[derive(Debug, Clone, Copy)]
pub struct EnergyLayer<'a> {
    pub t: f64,
    pub varphi: &'a [f64],
    pub phi_x: &'a [f64],
    /// Edges `(i, j-1) -> (i, j)`.
    pub phi_t_prev: &'a [f64],
    /// Edges `(i, j) -> (i, j+1)`.
    pub phi_t_next: &'a [f64],
}

fn energy_sums(
    grid: &SpacetimeGrid,
    c: &Coefficients,
    l: &EnergyLayer<'_>,
    formula: EnergyFormula,
    vertex_w: impl Fn(usize) -> f64,
    edge_w: impl Fn(usize) -> f64,
) -> EnergyBreakdown {
    let (dx, dt) = (grid.dx(), grid.dt());
    let n = l.varphi.len();
    let (a, b) = (l.phi_t_prev, l.phi_t_next);
    let mut gradient = 0.0;
    for (i, e) in l.phi_x.iter().enumerate() {
        let w = edge_w(i);
        if w == 0.0 {
            continue;
        }
        gradient += match formula {
            EnergyFormula::Centered => {
                let next = e + (b[i + 1] - b[i]);
                let prev = e - (a[i + 1] - a[i]);
                0.5 * w * e * (next + prev)
            }
            _ => w * e * e,
        };
    }
    gradient /= 2.0 * dx;
    let (mut kinetic, mut potential, mut field) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let w = vertex_w(i);
        if w == 0.0 {
            continue;
        }
        let p = l.varphi[i];
        let s = a[i] + b[i];
        kinetic += match formula {
            EnergyFormula::Centered => w * (a[i] * a[i] + b[i] * b[i]) / (4.0 * dt * dt),
            EnergyFormula::Continuum => w * s * s / (8.0 * dt * dt),
            EnergyFormula::Literal => w * s / (4.0 * dt * dt),
        };
        potential += w * c.sine_potential(i, p);
        field += w * match formula {
            EnergyFormula::Centered => {
                // phi^{j+1} + phi^{j-1} = 2 phi + b - a
                let pair = 2.0 * p + b[i] - a[i];
                0.25 * c.m2[i] * p * pair - 0.25 * c.source[i] * (2.0 * p + pair) + 0.5 * c.field[i] * c.field[i]
            }
            _ => c.field_potential(i, p),
        };
    }
    EnergyBreakdown::new(l.t, gradient, kinetic, potential, field)
}

/// Discrete Hamiltonian of one slice.
pub fn total_energy(grid: &SpacetimeGrid, c: &Coefficients, layer: &EnergyLayer<'_>, formula: EnergyFormula) -> EnergyBreakdown {
    match formula {
        EnergyFormula::Literal => energy_sums(grid, c, layer, formula, |_| grid.dx(), |_| 1.0),
        _ => energy_sums(grid, c, layer, formula, |i| grid.dual_width(i), |_| 1.0),
    }
}

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

/// Energy inside `[a, b]`. Vertex terms are weighted by the overlap of the
/// window with the vertex's dual cell, edge terms by the covered fraction
/// of the edge.
pub fn windowed_energy(
    grid: &SpacetimeGrid,
    c: &Coefficients,
    layer: &EnergyLayer<'_>,
    a: f64,
    b: f64,
    formula: EnergyFormula,
) -> Result<EnergyBreakdown> {
    let (lo, hi) = (a.max(grid.x_min()), b.min(grid.x_max()));
    if !(a < b) || !(lo < hi) {
        return Err(invalid("window", format!("[{a}, {b}] does not overlap the domain")));
    }
    if a <= grid.x_min() && b >= grid.x_max() {
        return Ok(total_energy(grid, c, layer, formula));
    }
    let dx = grid.dx();
    let n = grid.nx();
    let vertex_w = |i: usize| {
        let x = grid.x(i);
        let (c0, c1) = (
            if i == 0 { x } else { x - 0.5 * dx },
            if i + 1 == n { x } else { x + 0.5 * dx },
        );
        let w = overlap(c0, c1, a, b);
        match formula {
            EnergyFormula::Centered | EnergyFormula::Continuum => w,
            EnergyFormula::Literal => {
                if x >= a && x <= b {
                    dx
                } else {
                    0.0
                }
            }
        }
    };
    let edge_w = |i: usize| overlap(grid.x(i), grid.x(i + 1), a, b) / dx;
    Ok(energy_sums(grid, c, layer, formula, vertex_w, edge_w))
}

/// Energy of a vertex-only history `phi^{n-1}, phi^n, phi^{n+1}` using
/// centred differences at the vertices, as a second-order scheme would.
pub fn central_difference_energy(
    grid: &SpacetimeGrid,
    c: &Coefficients,
    t: f64,
    prev: &[f64],
    curr: &[f64],
    next: &[f64],
) -> EnergyBreakdown {
    let (dx, dt) = (grid.dx(), grid.dt());
    let n = curr.len();
    let (mut gradient, mut kinetic, mut potential, mut field) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let w = grid.dual_width(i);
        // mirrored ghosts give a vanishing gradient at closed ends
        let l = if i == 0 { curr[1] } else { curr[i - 1] };
        let r = if i + 1 == n { curr[n - 2] } else { curr[i + 1] };
        let px = (r - l) / (2.0 * dx);
        let pt = (next[i] - prev[i]) / (2.0 * dt);
        gradient += 0.5 * w * px * px;
        kinetic += 0.5 * w * pt * pt;
        potential += w * c.sine_potential(i, curr[i]);
        field += w * c.field_potential(i, curr[i]);
    }
    EnergyBreakdown::new(t, gradient, kinetic, potential, field)
}

// ---------------------------------------------------------------------------
// face residuals

/// Oriented edge sums of the faces between two slices:
/// `old_phi_x[i] + phi_t[i+1] - new_phi_x[i] - phi_t[i]`.
pub fn face_residuals<T>(old_phi_x: &[T], phi_t: &[T], new_phi_x: &[T]) -> Vec<T>
where
    T: Clone + Add<Output = T> + Sub<Output = T>,
{
    assert!(old_phi_x.len() == new_phi_x.len() && phi_t.len() == old_phi_x.len() + 1);
    (0..old_phi_x.len())
        .map(|i| {
            crate::mesh::face_circulation(
                old_phi_x[i].clone(),
                phi_t[i + 1].clone(),
                new_phi_x[i].clone(),
                phi_t[i].clone(),
            )
        })
        .collect()
}

/// Largest `|oriented edge sum|` over the faces completed by one step.
pub fn face_residual_max(old_phi_x: &[f64], phi_t: &[f64], new_phi_x: &[f64]) -> f64 {
    assert!(old_phi_x.len() == new_phi_x.len() && phi_t.len() == old_phi_x.len() + 1);
    let mut m = 0.0f64;
    for i in 0..old_phi_x.len() {
        let r = old_phi_x[i] + phi_t[i + 1] - new_phi_x[i] - phi_t[i];
        m = m.max(r.abs());
    }
    m
}

// ---------------------------------------------------------------------------
// Schwinger observables

#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    /// Charge density `-g phi_x / dx` on the spatial edges.
    pub rho: Vec<f64>,
    /// Current `g phi_t / dt` on the last temporal edges.
    pub current: Vec<f64>,
    /// Electric field `g phi + F` at the vertices.
    pub efield: Vec<f64>,
    /// Total charge `-g (phi(right) - phi(left))`.
    pub charge: f64,
}

pub fn observables(grid: &SpacetimeGrid, c: &Coefficients, varphi: &[f64], phi_x: &[f64], phi_t: &[f64]) -> Result<Observables> {
    if c.g == 0.0 {
        return Err(invalid(
            "g",
            "charge observables need g > 0; use the flux picture (phi_x, phi_t) instead",
        ));
    }
    let g = c.g;
    Ok(Observables {
        rho: phi_x.iter().map(|e| -g * e / grid.dx()).collect(),
        current: phi_t.iter().map(|e| g * e / grid.dt()).collect(),
        efield: varphi.iter().zip(&c.field).map(|(p, f)| g * p + f).collect(),
        charge: total_charge(g, varphi),
    })
}

pub fn total_charge(g: f64, varphi: &[f64]) -> f64 {
    -g * (varphi[varphi.len() - 1] - varphi[0])
}

// ---------------------------------------------------------------------------
// kinks

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkPosition {
    pub x: f64,
    /// `+1` for a kink (phi rises by `2 pi`), `-1` for an antikink.
    pub polarity: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkTrack {
    pub t: f64,
    pub position: f64,
    pub velocity: f64,
    pub polarity: i8,
}

/// Default merge distance for opposite crossings, about two kink widths.
pub const KINK_MERGE_DISTANCE: f64 = 2.0;

pub const MAX_CROSSINGS_PER_EDGE: u64 = 1024;

/// Kink centres as interpolated crossings of the levels `(2n+1) pi`.
/// Adjacent crossings of opposite polarity closer than `merge` cancel,
/// so breathers and overlapping pairs are not reported. Edges with
/// non-finite values or more than [`MAX_CROSSINGS_PER_EDGE`] crossings are
/// unresolved and skipped.
pub fn locate_kinks(grid: &SpacetimeGrid, varphi: &[f64], merge: f64) -> Vec<KinkPosition> {
    let level = |p: f64| ((p - PI) / (2.0 * PI)).floor() as i64;
    let mut out: Vec<KinkPosition> = Vec::new();
    for i in 0..varphi.len().saturating_sub(1) {
        let (a, b) = (varphi[i], varphi[i + 1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        let (la, lb) = (level(a), level(b));
        if la == lb || la.abs_diff(lb) > MAX_CROSSINGS_PER_EDGE {
            continue;
        }
        let (pol, range): (i8, Vec<i64>) = if lb > la {
            (1, (la + 1..=lb).collect())
        } else {
            (-1, (lb + 1..=la).rev().collect())
        };
        for k in range {
            let target = PI + 2.0 * PI * k as f64;
            let s = (target - a) / (b - a);
            let x = grid.x(i) + s * grid.dx();
            match out.last() {
                Some(top) if top.polarity != pol && x - top.x < merge => {
                    out.pop();
                }
                _ => out.push(KinkPosition { x, polarity: pol }),
            }
        }
    }
    out
}

/// Follows kinks across snapshots, matching each one to the nearest
/// kink of the same polarity seen last time.
#[derive(Debug, Clone, Default)]
pub struct KinkTracker {
    merge: f64,
    last: Option<(f64, Vec<KinkPosition>)>,
}

impl KinkTracker {
    pub fn new(merge: f64) -> Self {
        Self { merge, last: None }
    }

    pub fn update(&mut self, grid: &SpacetimeGrid, t: f64, varphi: &[f64]) -> Vec<KinkTrack> {
        let now = locate_kinks(grid, varphi, self.merge);
        let tracks = now
            .iter()
            .map(|k| {
                let velocity = match &self.last {
                    Some((t0, prev)) if t > *t0 => prev
                        .iter()
                        .filter(|p| p.polarity == k.polarity)
                        .map(|p| k.x - p.x)
                        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
                        .map_or(f64::NAN, |d| d / (t - t0)),
                    _ => f64::NAN,
                };
                KinkTrack {
                    t,
                    position: k.x,
                    velocity,
                    polarity: k.polarity,
                }
            })
            .collect();
        self.last = Some((t, now));
        tracks
    }
}

/// Single-snapshot tracking; velocities are `NaN`.
pub fn track_kinks(grid: &SpacetimeGrid, t: f64, varphi: &[f64]) -> Vec<KinkTrack> {
    KinkTracker::new(KINK_MERGE_DISTANCE).update(grid, t, varphi)
}

/// Counts reversals of a tracked position that happen near either end of
/// the domain. A reversal needs the position to retreat by more than
/// `hysteresis` from its extremum; gaps (no kink found) are skipped.
#[derive(Debug, Clone)]
pub struct CollisionCounter {
    x_min: f64,
    x_max: f64,
    near: f64,
    hysteresis: f64,
    dir: i8,
    extremum: Option<f64>,
    count: u64,
    reversals: Vec<f64>,
}

impl CollisionCounter {
    pub fn new(x_min: f64, x_max: f64, near: f64, hysteresis: f64) -> Self {
        Self {
            x_min,
            x_max,
            near,
            hysteresis,
            dir: 0,
            extremum: None,
            count: 0,
            reversals: Vec::new(),
        }
    }

    /// Five kink widths from the boundary, two units of hysteresis.
    pub fn for_grid(grid: &SpacetimeGrid) -> Self {
        Self::new(grid.x_min(), grid.x_max(), 5.0, 2.0)
    }

    pub fn push(&mut self, x: Option<f64>) {
        let Some(x) = x else { return };
        let Some(ext) = self.extremum else {
            self.extremum = Some(x);
            return;
        };
        match self.dir {
            0 => {
                if (x - ext).abs() > self.hysteresis {
                    self.dir = if x > ext { 1 } else { -1 };
                    self.extremum = Some(x);
                }
            }
            1 => {
                if x > ext {
                    self.extremum = Some(x);
                } else if ext - x > self.hysteresis {
                    self.reverse(ext, -1, x);
                }
            }
            _ => {
                if x < ext {
                    self.extremum = Some(x);
                } else if x - ext > self.hysteresis {
                    self.reverse(ext, 1, x);
                }
            }
        }
    }

    fn reverse(&mut self, ext: f64, dir: i8, x: f64) {
        if ext - self.x_min <= self.near || self.x_max - ext <= self.near {
            self.count += 1;
            self.reversals.push(ext);
        }
        self.dir = dir;
        self.extremum = Some(x);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Turning points counted as collisions.
    pub fn reversals(&self) -> &[f64] {
        &self.reversals
    }
}

/// Collision count of a position history.
pub fn count_boundary_collisions(grid: &SpacetimeGrid, history: &[Option<f64>]) -> u64 {
    let mut c = CollisionCounter::for_grid(grid);
    for &x in history {
        c.push(x);
    }
    c.count()
}

/// Position of the single dominant soliton, for runs with one kink in play.
pub fn primary_kink(grid: &SpacetimeGrid, varphi: &[f64]) -> Option<f64> {
    let k = locate_kinks(grid, varphi, KINK_MERGE_DISTANCE);
    match k.len() {
        0 => None,
        1 => Some(k[0].x),
        _ => {
            // the soliton, not nearby radiation, carries the steepest slope
            let steepest = k.iter().max_by(|a, b| {
                slope_at(grid, varphi, a.x).total_cmp(&slope_at(grid, varphi, b.x))
            })?;
            Some(steepest.x)
        }
    }
}

fn slope_at(grid: &SpacetimeGrid, varphi: &[f64], x: f64) -> f64 {
    let i = grid.nearest_vertex(x).unwrap_or(0).min(varphi.len() - 2);
    (varphi[i + 1] - varphi[i]).abs()
}

/// Net winding `(phi(right) - phi(left)) / 2 pi`, rounded.
pub fn winding_number(varphi: &[f64]) -> i64 {
    ((varphi[varphi.len() - 1] - varphi[0]) / (2.0 * PI)).round() as i64
}

/// Solitons present in one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolitonCensus {
    pub kinks: usize,
    pub antikinks: usize,
    /// Localised lumps away from any vacuum `2 pi n` that carry no winding.
    pub lumps: usize,
    pub winding: i64,
}

/// Counts kinks, antikinks and neutral lumps (breather candidates). A lump
/// is a run of vertices deviating from the nearest vacuum by more than
/// `threshold` without a level crossing; runs shorter than `min_width`
/// are treated as radiation.
pub fn soliton_census(grid: &SpacetimeGrid, varphi: &[f64], threshold: f64, min_width: f64) -> SolitonCensus {
    let kinks = locate_kinks(grid, varphi, KINK_MERGE_DISTANCE);
    let mut census = SolitonCensus {
        kinks: kinks.iter().filter(|k| k.polarity > 0).count(),
        antikinks: kinks.iter().filter(|k| k.polarity < 0).count(),
        lumps: 0,
        winding: winding_number(varphi),
    };
    let dev = |p: f64| (p - 2.0 * PI * (p / (2.0 * PI)).round()).abs();
    let near_kink = |x0: f64, x1: f64| kinks.iter().any(|k| k.x >= x0 - 1.0 && k.x <= x1 + 1.0);
    let mut start: Option<usize> = None;
    for i in 0..=varphi.len() {
        let inside = i < varphi.len() && dev(varphi[i]) > threshold;
        match (inside, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                let (x0, x1) = (grid.x(s), grid.x(i - 1));
                if x1 - x0 >= min_width && !near_kink(x0, x1) {
                    census.lumps += 1;
                }
                start = None;
            }
            _ => {}
        }
    }
    census
}

// ---------------------------------------------------------------------------
// series analysis

/// Least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(SimError::InsufficientData(format!(
            "linear fit needs at least two paired samples, got {} / {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(SimError::InsufficientData("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Times of upward zero crossings, linearly interpolated.
pub fn upward_crossings(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..t.len().min(y.len()) {
        let (a, b) = (y[k - 1], y[k]);
        if a < 0.0 && b >= 0.0 {
            let s = -a / (b - a);
            out.push(t[k - 1] + s * (t[k] - t[k - 1]));
        }
    }
    out
}

/// Angular frequency `2 pi / T` of every period between successive upward
/// zero crossings, as `(period midpoint, omega)`.
pub fn oscillation_frequency(t: &[f64], y: &[f64]) -> Result<Vec<(f64, f64)>> {
    let c = upward_crossings(t, y);
    if c.len() < 3 {
        return Err(SimError::InsufficientData(format!(
            "need at least 3 upward zero crossings, found {}",
            c.len()
        )));
    }
    Ok(c.windows(2)
        .map(|w| (0.5 * (w[0] + w[1]), 2.0 * PI / (w[1] - w[0])))
        .collect())
}

/// Local maxima of `|y|`, refined by a parabola through three samples.
pub fn envelope_peaks(t: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let a: Vec<f64> = y.iter().map(|v| v.abs()).collect();
    let mut out = Vec::new();
    for k in 1..a.len().saturating_sub(1) {
        if a[k] > a[k - 1] && a[k] >= a[k + 1] {
            let (l, c, r) = (a[k - 1], a[k], a[k + 1]);
            let den = l - 2.0 * c + r;
            let (dk, peak) = if den < 0.0 {
                let d = 0.5 * (l - r) / den;
                (d, c - 0.25 * (l - r) * d)
            } else {
                (0.0, c)
            };
            let h = 0.5 * (t[k + 1] - t[k - 1]);
            out.push((t[k] + dk * h, peak));
        }
    }
    out
}

/// Exponents at or above this are reported as non-decaying.
pub const NON_DECAY_THRESHOLD: f64 = -0.02;

/// Power-law exponent of the envelope of `y` inside `[t0, t1]`, from a
/// log-log fit of the peaks of `|y|`.
pub fn envelope_decay_exponent(t: &[f64], y: &[f64], t0: f64, t1: f64) -> Result<f64> {
    let peaks: Vec<(f64, f64)> = envelope_peaks(t, y)
        .into_iter()
        .filter(|&(tp, a)| tp >= t0 && tp <= t1 && tp > 0.0 && a > 0.0)
        .collect();
    if peaks.len() < 4 {
        return Err(SimError::InsufficientData(format!(
            "only {} envelope peaks in [{t0}, {t1}]",
            peaks.len()
        )));
    }
    let lx: Vec<f64> = peaks.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = peaks.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&lx, &ly)?;
    if fit.slope >= NON_DECAY_THRESHOLD {
        return Err(SimError::InsufficientData(format!(
            "envelope does not decay (fitted exponent {:.4})",
            fit.slope
        )));
    }
    Ok(fit.slope)
}

/// Standard deviation of a series about its mean.
pub fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

// ---------------------------------------------------------------------------
// report

/// Accumulated time series of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub energies: Vec<EnergyBreakdown>,
    pub face_residuals: Vec<(f64, f64)>,
    pub kinks: Vec<KinkTrack>,
    pub collisions: u64,
    pub frequencies: Vec<(f64, f64)>,
}

impl DiagnosticsReport {
    pub fn max_face_residual(&self) -> Option<f64> {
        self.face_residuals.iter().map(|r| r.1).reduce(f64::max)
    }

    /// Largest relative deviation of the total energy from its first value.
    pub fn relative_energy_drift(&self) -> Option<f64> {
        let e0 = self.energies.first()?.total;
        self.energies
            .iter()
            .map(|e| ((e.total - e0) / e0).abs())
            .reduce(f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::kink;
    use crate::model::{evaluate_coefficients, PhysicsModel};
    use proptest::prelude::*;

    fn sg(len: f64, dx: f64) -> (SpacetimeGrid, Coefficients) {
        let g = SpacetimeGrid::build(len, dx, 0.8 * dx, -0.5 * len).unwrap();
        let c = evaluate_coefficients(&PhysicsModel::sine_gordon(), &g).unwrap();
        (g, c)
    }

    fn kink_layer(g: &SpacetimeGrid, u: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let dt = g.dt();
        let at = |t: f64| -> Vec<f64> { (0..g.nx()).map(|i| kink(g.x(i), t, 0.0, u, 0, 1).unwrap()).collect() };
        let (p0, p1, p2) = (at(-dt), at(0.0), at(dt));
        let px = p1.windows(2).map(|w| w[1] - w[0]).collect();
        let a = p1.iter().zip(&p0).map(|(a, b)| a - b).collect();
        let b = p2.iter().zip(&p1).map(|(a, b)| a - b).collect();
        (p1, px, a, b)
    }

    fn energy_of_kink(u: f64, formula: EnergyFormula) -> f64 {
        let (g, c) = sg(100.0, 0.05);
        let (p, px, a, b) = kink_layer(&g, u);
        let l = EnergyLayer {
            t: 0.0,
            varphi: &p,
            phi_x: &px,
            phi_t_prev: &a,
            phi_t_next: &b,
        };
        total_energy(&g, &c, &l, formula).total
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let (g, c) = sg(10.0, 0.1);
        let z = vec![0.0; g.nx()];
        let zx = vec![0.0; g.nx() - 1];
        let l = EnergyLayer {
            t: 0.0,
            varphi: &z,
            phi_x: &zx,
            phi_t_prev: &z,
            phi_t_next: &z,
        };
        assert_eq!(total_energy(&g, &c, &l, EnergyFormula::Continuum), EnergyBreakdown::default());
    }

    #[test]
    fn kink_energy_matches_rest_mass() {
        for f in [EnergyFormula::Centered, EnergyFormula::Continuum] {
            let e = energy_of_kink(0.0, f);
            assert!((e - 8.0).abs() < 0.005 * 8.0, "{e}");
            let u: f64 = 0.55;
            let want = 8.0 / (1.0 - u * u).sqrt();
            let e = energy_of_kink(u, f);
            assert!((e - want).abs() < 0.005 * want, "{e} vs {want}");
        }
    }

    #[test]
    fn full_window_equals_total() {
        let (g, c) = sg(100.0, 0.05);
        let (p, px, a, b) = kink_layer(&g, 0.3);
        let l = EnergyLayer {
            t: 0.0,
            varphi: &p,
            phi_x: &px,
            phi_t_prev: &a,
            phi_t_next: &b,
        };
        let tot = total_energy(&g, &c, &l, EnergyFormula::Continuum);
        let w = windowed_energy(&g, &c, &l, -60.0, 60.0, EnergyFormula::Continuum).unwrap();
        assert_eq!(tot, w);
        // half windows add up to the whole
        let lft = windowed_energy(&g, &c, &l, -50.0, 0.013, EnergyFormula::Continuum).unwrap();
        let rgt = windowed_energy(&g, &c, &l, 0.013, 50.0, EnergyFormula::Continuum).unwrap();
        assert!((lft.total + rgt.total - tot.total).abs() < 1e-10 * tot.total);
        assert!(windowed_energy(&g, &c, &l, 5.0, 5.0, EnergyFormula::Continuum).is_err());
        assert!(windowed_energy(&g, &c, &l, 60.0, 70.0, EnergyFormula::Continuum).is_err());
    }

    #[test]
    fn corrupted_edge_is_detected() {
        let old = vec![0.1, 0.2, -0.3];
        let t = vec![0.01, 0.02, 0.03, 0.04];
        let mut new: Vec<f64> = (0..3).map(|i| old[i] + t[i + 1] - t[i]).collect();
        assert!(face_residual_max(&old, &t, &new) < 1e-16);
        new[1] += 1e-6;
        let r = face_residual_max(&old, &t, &new);
        assert!((r - 1e-6).abs() < 1e-12);
    }

    #[test]
    fn single_kink_charge() {
        let (g, mut c) = sg(60.0, 0.05);
        c.g = 0.3;
        let p: Vec<f64> = (0..g.nx()).map(|i| kink(g.x(i), 0.0, 0.0, 0.0, 0, 1).unwrap()).collect();
        let px: Vec<f64> = p.windows(2).map(|w| w[1] - w[0]).collect();
        let obs = observables(&g, &c, &p, &px, &vec![0.0; g.nx()]).unwrap();
        // oracle: the integral of rho over the domain
        let integral: f64 = obs.rho.iter().map(|r| r * g.dx()).sum();
        assert!((obs.charge - integral).abs() < 1e-12);
        assert!((obs.charge + 2.0 * PI * 0.3).abs() < 1e-6);
        c.g = 0.0;
        assert!(observables(&g, &c, &p, &px, &p).is_err());
    }

    #[test]
    fn kink_located_within_half_cell() {
        let (g, _) = sg(40.0, 0.05);
        for x0 in [-3.0, 0.0, 0.0123, 7.77] {
            let p: Vec<f64> = (0..g.nx()).map(|i| kink(g.x(i), 0.0, x0, 0.0, 0, 1).unwrap()).collect();
            let k = locate_kinks(&g, &p, KINK_MERGE_DISTANCE);
            assert_eq!(k.len(), 1);
            assert_eq!(k[0].polarity, 1);
            assert!((k[0].x - x0).abs() < 0.5 * g.dx());
        }
        let vac = vec![2.0 * PI; g.nx()];
        assert!(locate_kinks(&g, &vac, KINK_MERGE_DISTANCE).is_empty());
        let mut wild = vac;
        wild[10] = 1e300;
        wild[20] = f64::NAN;
        assert!(locate_kinks(&g, &wild, KINK_MERGE_DISTANCE).is_empty());
    }

    #[test]
    fn tracked_velocity_of_moving_kink() {
        let (g, _) = sg(60.0, 0.05);
        let u = 0.55;
        let mut tr = KinkTracker::new(KINK_MERGE_DISTANCE);
        let (mut ts, mut xs) = (Vec::new(), Vec::new());
        for j in 0..100 {
            let t = j as f64 * g.dt();
            let p: Vec<f64> = (0..g.nx()).map(|i| kink(g.x(i), t, -10.0, u, 0, 1).unwrap()).collect();
            let k = tr.update(&g, t, &p);
            assert_eq!(k.len(), 1);
            ts.push(t);
            xs.push(k[0].position);
        }
        let fit = linear_fit(&ts, &xs).unwrap();
        assert!((fit.slope - u).abs() < 0.01 * u, "{}", fit.slope);
    }

    #[test]
    fn breather_core_is_not_a_kink() {
        let (g, _) = sg(40.0, 0.05);
        let nu: f64 = 1.2;
        let t = (0.5 * PI) / nu.cos();
        let p: Vec<f64> = (0..g.nx())
            .map(|i| crate::analytic::breather(g.x(i), t, nu, 0.0, 0.0).unwrap())
            .collect();
        assert!(p.iter().any(|&v| v > PI));
        assert!(locate_kinks(&g, &p, 2.0 * 4.0).is_empty());
    }

    #[test]
    fn collision_counter_counts_turns_at_walls() {
        let g = SpacetimeGrid::build(100.0, 0.5, 0.4, -50.0).unwrap();
        // triangle wave between the walls, three turns at the walls, one in the middle
        let mut h = Vec::new();
        let mut x = 0.0;
        let mut v = 0.5;
        for _ in 0..500 {
            x += v;
            if x >= 48.0 || x <= -48.0 {
                v = -v;
            }
            h.push(Some(x));
        }
        assert_eq!(count_boundary_collisions(&g, &h), 3);
        let mut h2: Vec<Option<f64>> = (0..20).map(|k| Some(k as f64)).collect();
        h2.extend((0..20).map(|k| Some(20.0 - k as f64)));
        h2.push(None);
        assert_eq!(count_boundary_collisions(&g, &h2), 0);
    }

    #[test]
    fn frequency_of_pure_sine() {
        let t: Vec<f64> = (0..100_000).map(|k| k as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|t| (1.2 * t).sin()).collect();
        let f = oscillation_frequency(&t, &y).unwrap();
        assert!(f.iter().all(|(_, w)| (w - 1.2).abs() < 1e-3));
        assert!(oscillation_frequency(&t[..100], &y[..100]).is_err());
    }

    #[test]
    fn chirp_frequency_increases() {
        let t: Vec<f64> = (0..200_000).map(|k| k as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|t| (t * t / 200.0).sin()).collect();
        let f = oscillation_frequency(&t, &y).unwrap();
        assert!(f.windows(2).all(|w| w[1].1 > w[0].1));
        // instantaneous angular frequency t / 100
        for &(tm, w) in &f[5..] {
            assert!((w - tm / 100.0).abs() < 0.02 * w);
        }
    }

    #[test]
    fn envelope_of_inverse_sqrt() {
        let t: Vec<f64> = (1..400_000).map(|k| k as f64 * 0.01).collect();
        let y: Vec<f64> = t.iter().map(|t| (1.2 * t).sin() / t.sqrt()).collect();
        let e = envelope_decay_exponent(&t, &y, 100.0, 4000.0).unwrap();
        assert!((e + 0.5).abs() < 0.05, "{e}");
        let flat: Vec<f64> = t.iter().map(|t| (1.2 * t).sin()).collect();
        assert!(envelope_decay_exponent(&t, &flat, 100.0, 4000.0).is_err());
    }

    #[test]
    fn census_of_pair_and_breather() {
        let g = SpacetimeGrid::build(160.0, 0.1, 0.08, -80.0).unwrap();
        let p: Vec<f64> = (0..g.nx())
            .map(|i| {
                let x = g.x(i);
                kink(x, 0.0, -40.0, 0.0, 0, 1).unwrap() - kink(x, 0.0, 40.0, 0.0, 0, 1).unwrap()
                    + crate::analytic::breather(x, 2.0, 0.8, 0.0, 0.0).unwrap()
            })
            .collect();
        let c = soliton_census(&g, &p, 1.0, 1.0);
        assert_eq!(c.kinks, 1);
        assert_eq!(c.antikinks, 1);
        assert_eq!(c.lumps, 1);
        assert_eq!(c.winding, 0);
    }

    proptest! {
        #[test]
        fn energy_parts_sum_to_total(seed in prop::collection::vec(-4.0f64..4.0, 16),
                                     a in prop::collection::vec(-0.1f64..0.1, 16),
                                     b in prop::collection::vec(-0.1f64..0.1, 16)) {
            let g = SpacetimeGrid::new(16, 0.1, 0.08, 0.0).unwrap();
            let c = evaluate_coefficients(&PhysicsModel::massive_schwinger(0.7), &g).unwrap();
            let px: Vec<f64> = seed.windows(2).map(|w| w[1] - w[0]).collect();
            let l = EnergyLayer { t: 0.0, varphi: &seed, phi_x: &px, phi_t_prev: &a, phi_t_next: &b };
            for f in [EnergyFormula::Centered, EnergyFormula::Continuum, EnergyFormula::Literal] {
                let e = total_energy(&g, &c, &l, f);
                prop_assert_eq!(e.total, e.gradient + e.kinetic + e.potential + e.field);
            }
            let e = total_energy(&g, &c, &l, EnergyFormula::Continuum);
            prop_assert!(e.gradient >= 0.0 && e.kinetic >= 0.0 && e.potential >= 0.0 && e.field >= 0.0);
        }

        #[test]
        fn kinks_alternate_or_repeat_consistently(x0 in -10.0f64..10.0, gap in 6.0f64..15.0) {
            let g = SpacetimeGrid::build(60.0, 0.1, 0.08, -30.0).unwrap();
            let p: Vec<f64> = (0..g.nx()).map(|i| {
                let x = g.x(i);
                kink(x, 0.0, x0, 0.0, 0, 1).unwrap() - kink(x, 0.0, x0 + gap, 0.0, 0, 1).unwrap()
            }).collect();
            let k = locate_kinks(&g, &p, KINK_MERGE_DISTANCE);
            prop_assert_eq!(k.len(), 2);
            prop_assert!(k[0].polarity == 1 && k[1].polarity == -1);
            prop_assert!((k[1].x - k[0].x - gap).abs() < 0.2);
        }
    }
}
