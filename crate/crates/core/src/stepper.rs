//! Explicit space-time integrator for the edge fields.
//!
//! Each step integrates the equation of motion over the dual cell of every
//! vertex of slice `j`, which yields the new temporal edge
//!
//! ```text
//! phi_t_next = c_lap (phi_x[i] - phi_x[i-1]) + c_prev phi_t_prev[i] + c_force f_i(phi)
//! ```
//!
//! and then telescopes `phi += phi_t_next`, `phi_x = diff(phi)`.

use std::ops::{Add, Mul, Sub};

use crate::analytic::InitialCondition;
use crate::boundary::{BoundaryContext, BoundarySpec, BoundaryUpdate, ResolvedBoundary, Side};
use crate::diagnostics::{total_energy, EnergyBreakdown, EnergyFormula, EnergyLayer};
use crate::error::{invalid, Result, SimError};
use crate::mesh::SpacetimeGrid;
use crate::model::{evaluate_coefficients, Coefficients, PhysicsModel};

/// One slice of the simulation together with the temporal edges that end on it.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub j: u64,
    pub varphi: Vec<f64>,
    pub phi_x: Vec<f64>,
    /// Temporal edges `(i, j-1) -> (i, j)`.
    pub phi_t_prev: Vec<f64>,
}

impl FieldState {
    pub fn zero(nx: usize) -> Self {
        Self {
            j: 0,
            varphi: vec![0.0; nx],
            phi_x: vec![0.0; nx - 1],
            phi_t_prev: vec![0.0; nx],
        }
    }

    /// Slice with `phi_x` assigned from the vertex values.
    pub fn from_vertices(j: u64, varphi: Vec<f64>, phi_t_prev: Vec<f64>) -> Result<Self> {
        if varphi.len() < 3 || phi_t_prev.len() != varphi.len() {
            return Err(SimError::InvalidGrid(format!(
                "inconsistent layer lengths {} / {}",
                varphi.len(),
                phi_t_prev.len()
            )));
        }
        let phi_x = varphi.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self {
            j,
            varphi,
            phi_x,
            phi_t_prev,
        })
    }

    pub fn nx(&self) -> usize {
        self.varphi.len()
    }

    /// Largest `|phi_x[i] - (phi[i+1] - phi[i])|`; zero for every state the
    /// stepper produces.
    pub fn compatibility_defect(&self) -> f64 {
        self.phi_x
            .iter()
            .zip(self.varphi.windows(2))
            .map(|(px, w)| (px - (w[1] - w[0])).abs())
            .fold(0.0, f64::max)
    }

    /// True when `phi_x` equals the vertex differences bit for bit.
    pub fn is_compatible(&self) -> bool {
        self.phi_x
            .iter()
            .zip(self.varphi.windows(2))
            .all(|(px, w)| px.to_bits() == (w[1] - w[0]).to_bits())
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.varphi
            .iter()
            .zip(&self.phi_t_prev)
            .position(|(a, b)| !a.is_finite() || !b.is_finite())
    }
}

/// Coefficients of the explicit update, all divided by `1 + alpha dt / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilConsts<T> {
    /// `dt^2 / dx^2`
    pub lap: T,
    /// `(1 - alpha dt / 2)`
    pub prev: T,
    /// `dt^2`
    pub force: T,
}

pub fn stencil_consts(dx: f64, dt: f64, alpha: f64) -> StencilConsts<f64> {
    let d = 1.0 + 0.5 * alpha * dt;
    StencilConsts {
        lap: dt * dt / (dx * dx) / d,
        prev: (1.0 - 0.5 * alpha * dt) / d,
        force: dt * dt / d,
    }
}

/// Advance one layer in place.
///
/// `force(i, phi)` returns `-m2 phi - mu sin(phi) + s` at vertex `i`. The
/// loop updates `phi_x[i-1]` one vertex behind, so every stencil still reads
/// the old spatial edges.
pub fn advance_layer<T, F>(
    varphi: &mut [T],
    phi_x: &mut [T],
    phi_t: &mut [T],
    k: &StencilConsts<T>,
    left: BoundaryUpdate<T>,
    right: BoundaryUpdate<T>,
    mut force: F,
) where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
    F: FnMut(usize, T) -> T,
{
    let n = varphi.len();
    assert!(n >= 3 && phi_x.len() == n - 1 && phi_t.len() == n);
    let two = |v: T| v.clone() + v;

    let t0 = match left {
        BoundaryUpdate::Temporal(v) => v,
        BoundaryUpdate::Edge(e) => {
            k.lap.clone() * two(phi_x[0].clone() - e)
                + k.prev.clone() * phi_t[0].clone()
                + k.force.clone() * force(0, varphi[0].clone())
        }
    };
    phi_t[0] = t0.clone();
    varphi[0] = varphi[0].clone() + t0;

    for i in 1..n - 1 {
        let lap = phi_x[i].clone() - phi_x[i - 1].clone();
        let tn = k.lap.clone() * lap
            + k.prev.clone() * phi_t[i].clone()
            + k.force.clone() * force(i, varphi[i].clone());
        phi_t[i] = tn.clone();
        varphi[i] = varphi[i].clone() + tn;
        phi_x[i - 1] = varphi[i].clone() - varphi[i - 1].clone();
    }

    let tr = match right {
        BoundaryUpdate::Temporal(v) => v,
        BoundaryUpdate::Edge(e) => {
            k.lap.clone() * two(e - phi_x[n - 2].clone())
                + k.prev.clone() * phi_t[n - 1].clone()
                + k.force.clone() * force(n - 1, varphi[n - 1].clone())
        }
    };
    phi_t[n - 1] = tr.clone();
    varphi[n - 1] = varphi[n - 1].clone() + tr;
    phi_x[n - 2] = varphi[n - 1].clone() - varphi[n - 2].clone();
}

/// f64 specialisation of [`advance_layer`] with the sine skipped for
/// linear models.
fn advance_f64(state: &mut FieldState, k: &StencilConsts<f64>, c: &Coefficients, l: BoundaryUpdate<f64>, r: BoundaryUpdate<f64>) {
    let (m2, mu, s) = (&c.m2[..], &c.mu[..], &c.source[..]);
    let n = state.varphi.len();
    assert!(m2.len() == n && mu.len() == n && s.len() == n);
    if c.has_sine {
        advance_layer(&mut state.varphi, &mut state.phi_x, &mut state.phi_t_prev, k, l, r, |i, p| {
            s[i] - m2[i] * p - mu[i] * p.sin()
        });
    } else {
        advance_layer(&mut state.varphi, &mut state.phi_x, &mut state.phi_t_prev, k, l, r, |i, p| {
            s[i] - m2[i] * p
        });
    }
}

/// Initial slice `j = 0`.
///
/// Exact solutions seed the temporal edge `(i,-1) -> (i,0)` with
/// `phi(x, 0) - phi(x, -dt)`. Other data use the backward Taylor expansion
/// `dt v0 - dt^2/2 a0` with `a0` from the equation of motion.
pub fn seed_initial_layer(ic: &InitialCondition, grid: &SpacetimeGrid, coeffs: &Coefficients) -> Result<FieldState> {
    ic.validate()?;
    let n = grid.nx();
    let dt = grid.dt();
    let varphi: Vec<f64> = (0..n).map(|i| ic.phi(grid.x(i), 0.0)).collect();
    let phi_t_prev: Vec<f64> = if ic.is_exact() {
        (0..n)
            .map(|i| {
                let x = grid.x(i);
                varphi[i] - ic.phi(x, -dt)
            })
            .collect()
    } else {
        let v0: Vec<f64> = (0..n).map(|i| ic.velocity(grid.x(i))).collect();
        let a0 = initial_acceleration(grid, coeffs, &varphi, &v0);
        (0..n).map(|i| dt * v0[i] - 0.5 * dt * dt * a0[i]).collect()
    };
    let state = FieldState::from_vertices(0, varphi, phi_t_prev)?;
    if let Some(i) = state.first_non_finite() {
        return Err(invalid("ic", format!("initial data is not finite at vertex {i}")));
    }
    Ok(state)
}

/// `phi_tt` at `t = 0` from the equation of motion, with mirrored
/// neighbours at the ends.
pub(crate) fn initial_acceleration(grid: &SpacetimeGrid, c: &Coefficients, phi: &[f64], v0: &[f64]) -> Vec<f64> {
    let n = phi.len();
    let dx2 = grid.dx() * grid.dx();
    (0..n)
        .map(|i| {
            let left = if i == 0 { phi[1] } else { phi[i - 1] };
            let right = if i + 1 == n { phi[n - 2] } else { phi[i + 1] };
            let lap = (left - 2.0 * phi[i] + right) / dx2;
            lap - c.alpha * v0[i] + c.force(i, phi[i])
        })
        .collect()
}

/// How often the full slice is scanned for non-finite values.
const FINITE_CHECK_STRIDE: u64 = 32;

/// A running simulation: grid, sampled coefficients, boundaries and the
/// current slice.
#[derive(Debug, Clone)]
pub struct Simulation {
    grid: SpacetimeGrid,
    coeffs: Coefficients,
    consts: StencilConsts<f64>,
    left: ResolvedBoundary,
    right: ResolvedBoundary,
    state: FieldState,
    scratch_phi: Vec<f64>,
    scratch_phi_x: Vec<f64>,
    scratch_phi_t: Vec<f64>,
    /// Accumulated `phi_t` through the left and right boundary vertices.
    boundary_flux: (f64, f64),
}

impl Simulation {
    pub fn new(ic: &InitialCondition, grid: SpacetimeGrid, model: &PhysicsModel, bc: &BoundarySpec) -> Result<Self> {
        let coeffs = evaluate_coefficients(model, &grid)?;
        let state = seed_initial_layer(ic, &grid, &coeffs)?;
        Self::from_parts(grid, coeffs, bc, state)
    }

    pub fn from_parts(grid: SpacetimeGrid, coeffs: Coefficients, bc: &BoundarySpec, state: FieldState) -> Result<Self> {
        bc.validate()?;
        if !grid.is_explicit_stable() {
            return Err(SimError::Unstable {
                dx: grid.dx(),
                dt: grid.dt(),
            });
        }
        let n = grid.nx();
        if state.nx() != n || coeffs.mu.len() != n {
            return Err(SimError::InvalidGrid(format!(
                "state has {} vertices, grid has {n}",
                state.nx()
            )));
        }
        let left = ResolvedBoundary::new(Side::Left, &bc.left, &coeffs, state.varphi[0])?;
        let right = ResolvedBoundary::new(Side::Right, &bc.right, &coeffs, state.varphi[n - 1])?;
        let consts = stencil_consts(grid.dx(), grid.dt(), coeffs.alpha);
        Ok(Self {
            grid,
            coeffs,
            consts,
            left,
            right,
            state,
            scratch_phi: vec![0.0; n],
            scratch_phi_x: vec![0.0; n - 1],
            scratch_phi_t: vec![0.0; n],
            boundary_flux: (0.0, 0.0),
        })
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }
    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }
    pub fn state(&self) -> &FieldState {
        &self.state
    }
    pub fn state_mut(&mut self) -> &mut FieldState {
        &mut self.state
    }
    pub fn t(&self) -> f64 {
        self.grid.t(self.state.j)
    }
    pub fn boundaries(&self) -> (&ResolvedBoundary, &ResolvedBoundary) {
        (&self.left, &self.right)
    }

    /// Sum over all completed steps of the boundary temporal edges
    /// `(left, right)`; the charge balance is `Q(t) - Q(0) = -g (right - left)`.
    pub fn boundary_flux(&self) -> (f64, f64) {
        self.boundary_flux
    }

    fn boundary_updates(&self) -> (BoundaryUpdate<f64>, BoundaryUpdate<f64>) {
        let s = &self.state;
        let n = s.nx();
        let t = self.t();
        let (dt, dx) = (self.grid.dt(), self.grid.dx());
        // previous spatial edges follow from the face identity
        let lctx = BoundaryContext {
            t,
            dt,
            dx,
            phi: s.varphi[0],
            phi_x: s.phi_x[0],
            phi_x_prev: s.phi_x[0] - (s.phi_t_prev[1] - s.phi_t_prev[0]),
            phi_t_prev: s.phi_t_prev[0],
        };
        let rctx = BoundaryContext {
            t,
            dt,
            dx,
            phi: s.varphi[n - 1],
            phi_x: s.phi_x[n - 2],
            phi_x_prev: s.phi_x[n - 2] - (s.phi_t_prev[n - 1] - s.phi_t_prev[n - 2]),
            phi_t_prev: s.phi_t_prev[n - 1],
        };
        (self.left.update(&lctx), self.right.update(&rctx))
    }

    fn advance(&mut self) {
        let (l, r) = self.boundary_updates();
        advance_f64(&mut self.state, &self.consts, &self.coeffs, l, r);
        let n = self.state.nx();
        self.boundary_flux.0 += self.state.phi_t_prev[0];
        self.boundary_flux.1 += self.state.phi_t_prev[n - 1];
        self.state.j += 1;
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.state.first_non_finite() {
            None => Ok(()),
            Some(vertex) => Err(SimError::BlowUp {
                step: self.state.j,
                t: self.t(),
                vertex,
            }),
        }
    }

    /// One step `j -> j+1`.
    pub fn step(&mut self) -> Result<()> {
        self.advance();
        if self.state.j % FINITE_CHECK_STRIDE == 0 {
            self.check_finite()?;
        }
        Ok(())
    }

    /// Step `n` times.
    pub fn steps(&mut self, n: u64) -> Result<()> {
        for _ in 0..n {
            self.step()?;
        }
        self.check_finite()
    }

    /// Step until `t >= t_end` (rounded down to whole steps).
    pub fn run_until(&mut self, t_end: f64) -> Result<()> {
        let target = (t_end / self.grid.dt() + 1e-9).floor() as u64;
        if target > self.state.j {
            self.steps(target - self.state.j)?;
        }
        Ok(())
    }

    fn save_layer(&mut self) {
        self.scratch_phi.copy_from_slice(&self.state.varphi);
        self.scratch_phi_x.copy_from_slice(&self.state.phi_x);
        self.scratch_phi_t.copy_from_slice(&self.state.phi_t_prev);
    }

    /// Step and return the largest oriented edge sum over the faces just
    /// completed between slices `j` and `j+1`.
    pub fn step_audited(&mut self) -> Result<f64> {
        self.save_layer();
        self.advance();
        self.check_finite()?;
        Ok(crate::diagnostics::face_residual_max(
            &self.scratch_phi_x,
            &self.state.phi_t_prev,
            &self.state.phi_x,
        ))
    }

    /// Step and return the discrete energy of the slice that was just left,
    /// which needs the temporal edges on both of its sides.
    pub fn step_with_energy(&mut self, formula: EnergyFormula, window: Option<(f64, f64)>) -> Result<EnergyBreakdown> {
        let t = self.t();
        self.save_layer();
        self.advance();
        self.check_finite()?;
        let layer = EnergyLayer {
            t,
            varphi: &self.scratch_phi,
            phi_x: &self.scratch_phi_x,
            phi_t_prev: &self.scratch_phi_t,
            phi_t_next: &self.state.phi_t_prev,
        };
        match window {
            None => Ok(total_energy(&self.grid, &self.coeffs, &layer, formula)),
            Some((a, b)) => crate::diagnostics::windowed_energy(&self.grid, &self.coeffs, &layer, a, b, formula),
        }
    }

    /// Reverse the direction of time: the slice moves back to `j-1` and the
    /// temporal edge into it changes orientation. For `alpha = 0` and a
    /// time-independent closure, stepping afterwards retraces the trajectory.
    pub fn reverse_time(&mut self) -> Result<()> {
        if self.coeffs.alpha != 0.0 {
            return Err(SimError::Unsupported("time reversal requires alpha = 0".into()));
        }
        let s = &mut self.state;
        for (p, t) in s.varphi.iter_mut().zip(s.phi_t_prev.iter_mut()) {
            *p -= *t;
            *t = -*t;
        }
        for (px, w) in s.phi_x.iter_mut().zip(s.varphi.windows(2)) {
            *px = w[1] - w[0];
        }
        s.j = s.j.saturating_sub(1);
        Ok(())
    }
}

/// Field quantity sampled by a probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeQuantity {
    Phi,
    /// `d_x phi` from the mean of the adjacent spatial edges.
    PhiX,
    /// `d_t phi` from the last temporal edge.
    PhiT,
    /// Charge density `-g d_x phi`.
    Rho,
    /// Current `g d_t phi`; flux-picture voltage `d_t phi` when `g = 0`.
    Current,
    /// Electric field `g phi + F`.
    Efield,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    pub name: String,
    pub x: f64,
    pub quantity: ProbeQuantity,
}

impl Probe {
    pub fn new(name: impl Into<String>, x: f64, quantity: ProbeQuantity) -> Self {
        Self {
            name: name.into(),
            x,
            quantity,
        }
    }
}

pub(crate) fn sample(grid: &SpacetimeGrid, c: &Coefficients, s: &FieldState, i: usize, q: ProbeQuantity) -> f64 {
    let n = s.nx();
    let dx_phi = || {
        let (a, b) = (i.saturating_sub(1), i.min(n - 2));
        if a == b {
            s.phi_x[a] / grid.dx()
        } else {
            0.5 * (s.phi_x[a] + s.phi_x[b]) / grid.dx()
        }
    };
    let dt_phi = || s.phi_t_prev[i] / grid.dt();
    match q {
        ProbeQuantity::Phi => s.varphi[i],
        ProbeQuantity::PhiX => dx_phi(),
        ProbeQuantity::PhiT => dt_phi(),
        ProbeQuantity::Rho => -c.g * dx_phi(),
        ProbeQuantity::Current => {
            if c.g == 0.0 {
                dt_phi()
            } else {
                c.g * dt_phi()
            }
        }
        ProbeQuantity::Efield => c.g * s.varphi[i] + c.field[i],
    }
}

/// When field snapshots are taken.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DumpSchedule {
    None,
    /// About `count` snapshots evenly spread over the run (including `t=0`).
    Count { count: u64 },
    Stride { steps: u64 },
    Times { times: Vec<f64> },
}

impl Default for DumpSchedule {
    fn default() -> Self {
        DumpSchedule::Count { count: 500 }
    }
}

impl DumpSchedule {
    fn steps(&self, total: u64, dt: f64) -> Vec<u64> {
        let mut v: Vec<u64> = match self {
            DumpSchedule::None => Vec::new(),
            DumpSchedule::Count { count } => {
                if *count == 0 {
                    Vec::new()
                } else {
                    let stride = (total / (*count).max(1)).max(1);
                    (0..=total).step_by(stride as usize).collect()
                }
            }
            DumpSchedule::Stride { steps } => (0..=total).step_by((*steps).max(1) as usize).collect(),
            DumpSchedule::Times { times } => times
                .iter()
                .filter(|t| **t >= 0.0)
                .map(|t| (t / dt).round() as u64)
                .filter(|&j| j <= total)
                .collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Receives streamed outputs from [`run`].
pub trait TrajectorySink {
    fn on_probe(&mut self, _t: f64, _values: &[f64]) -> Result<()> {
        Ok(())
    }
    fn on_snapshot(&mut self, _t: f64, _state: &FieldState) -> Result<()> {
        Ok(())
    }
    fn on_energy(&mut self, _e: &EnergyBreakdown) -> Result<()> {
        Ok(())
    }
    /// Largest face residual of the faces completed in the step ending at `t`.
    fn on_audit(&mut self, _t: f64, _residual: f64) -> Result<()> {
        Ok(())
    }
}

/// Sink that discards everything.
pub struct NullSink;
impl TrajectorySink for NullSink {}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub t_max: f64,
    pub probes: Vec<Probe>,
    /// Probe sampling stride in steps.
    pub probe_every: u64,
    pub dump: DumpSchedule,
    /// Energy sampling stride in steps.
    pub energy_every: Option<u64>,
    pub energy_window: Option<(f64, f64)>,
    pub energy_formula: EnergyFormula,
    /// Face-residual audit stride in steps.
    pub audit_every: Option<u64>,
}

impl RunOptions {
    pub fn new(t_max: f64) -> Self {
        Self {
            t_max,
            probes: Vec::new(),
            probe_every: 1,
            dump: DumpSchedule::None,
            energy_every: None,
            energy_window: None,
            energy_formula: EnergyFormula::Centered,
            audit_every: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: u64,
    pub t_end: f64,
    pub max_face_residual: Option<f64>,
    pub snapshots: usize,
    pub warnings: Vec<String>,
}

/// Stream a run of `sim` to `sink`. Memory stays `O(Nx)`.
pub fn run_simulation(sim: &mut Simulation, opts: &RunOptions, sink: &mut dyn TrajectorySink) -> Result<RunSummary> {
    let dt = sim.grid().dt();
    let mut warnings = Vec::new();
    let exact = opts.t_max / dt;
    let total = (exact + 1e-9).floor() as u64;
    if (exact - total as f64).abs() > 1e-6 {
        warnings.push(format!(
            "T_max = {} is not a multiple of dt = {dt}; running {total} steps to t = {}",
            opts.t_max,
            total as f64 * dt
        ));
    }
    let mut probe_idx = Vec::with_capacity(opts.probes.len());
    for p in &opts.probes {
        let i = sim
            .grid()
            .nearest_vertex(p.x)
            .ok_or_else(|| invalid("probes", format!("probe `{}` at x = {} is outside the grid", p.name, p.x)))?;
        probe_idx.push((i, p.quantity));
    }
    let dumps = opts.dump.steps(total, dt);
    let mut next_dump = dumps.iter().peekable();
    let mut values = vec![0.0; probe_idx.len()];
    let mut max_res: Option<f64> = None;
    let mut snapshots = 0usize;
    let start = sim.state().j;
    let probe_every = opts.probe_every.max(1);

    let emit = |sim: &Simulation, sink: &mut dyn TrajectorySink, values: &mut Vec<f64>, k: u64| -> Result<()> {
        if !probe_idx.is_empty() && k % probe_every == 0 {
            for (v, &(i, q)) in values.iter_mut().zip(&probe_idx) {
                *v = sample(sim.grid(), sim.coefficients(), sim.state(), i, q);
            }
            sink.on_probe(sim.t(), values)?;
        }
        Ok(())
    };

    emit(sim, sink, &mut values, 0)?;
    for k in 0..=total {
        if next_dump.peek().is_some_and(|&&d| d == k) {
            sink.on_snapshot(sim.t(), sim.state())?;
            snapshots += 1;
            next_dump.next();
        }
        if k == total {
            break;
        }
        let want_energy = opts.energy_every.is_some_and(|e| k % e.max(1) == 0);
        let want_audit = opts.audit_every.is_some_and(|e| k % e.max(1) == 0);
        if want_energy {
            let e = sim.step_with_energy(opts.energy_formula, opts.energy_window)?;
            sink.on_energy(&e)?;
        } else if want_audit {
            let r = sim.step_audited()?;
            max_res = Some(max_res.map_or(r, |m: f64| m.max(r)));
            sink.on_audit(sim.t(), r)?;
        } else {
            sim.step()?;
        }
        emit(sim, sink, &mut values, k + 1)?;
    }
    sim.check_finite()?;
    Ok(RunSummary {
        steps: sim.state().j - start,
        t_end: sim.t(),
        max_face_residual: max_res,
        snapshots,
        warnings,
    })
}

/// Build a simulation from its ingredients and stream it to `sink`.
pub fn run(
    ic: &InitialCondition,
    grid: SpacetimeGrid,
    model: &PhysicsModel,
    bc: &BoundarySpec,
    opts: &RunOptions,
    sink: &mut dyn TrajectorySink,
) -> Result<(RunSummary, Simulation)> {
    let mut sim = Simulation::new(ic, grid, model, bc)?;
    let summary = run_simulation(&mut sim, opts, sink)?;
    Ok((summary, sim))
}
