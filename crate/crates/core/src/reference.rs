//! Baseline integrators for comparisons with the edge-field stepper.
//!
//! [`EulerSolver`] is the textbook explicit central-difference scheme for
//! the second-order equation in `phi` alone. [`CrankNicolson`] handles the
//! linear massless model implicitly, one tridiagonal solve per step.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytic::InitialCondition;
use crate::boundary::{BoundaryCondition, BoundaryContext, BoundarySpec, BoundaryUpdate, ResolvedBoundary, Side};
use crate::diagnostics::{central_difference_energy, linear_fit, EnergyBreakdown, LinearFit};
use crate::error::{Result, SimError};
use crate::mesh::SpacetimeGrid;
use crate::model::{evaluate_coefficients, Coefficients, PhysicsModel};
use crate::stepper::{initial_acceleration, Simulation};

/// Two consecutive vertex slices.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderState {
    pub j: u64,
    pub varphi_prev: Vec<f64>,
    pub varphi_curr: Vec<f64>,
}

/// Slices 0 and 1 from the Taylor start `phi1 = phi0 + dt v0 + dt^2/2 a0`.
fn taylor_start(ic: &InitialCondition, grid: &SpacetimeGrid, c: &Coefficients) -> Result<SecondOrderState> {
    ic.validate()?;
    let dt = grid.dt();
    let n = grid.nx();
    let phi0: Vec<f64> = (0..n).map(|i| ic.phi(grid.x(i), 0.0)).collect();
    let v0: Vec<f64> = (0..n).map(|i| ic.velocity(grid.x(i))).collect();
    let a0 = initial_acceleration(grid, c, &phi0, &v0);
    let phi1 = (0..n).map(|i| phi0[i] + dt * v0[i] + 0.5 * dt * dt * a0[i]).collect();
    Ok(SecondOrderState {
        j: 1,
        varphi_prev: phi0,
        varphi_curr: phi1,
    })
}

fn vertex_context(t: f64, grid: &SpacetimeGrid, prev: &[f64], curr: &[f64], side: Side) -> BoundaryContext {
    let n = curr.len();
    let (b, inner) = match side {
        Side::Left => (0, 1),
        Side::Right => (n - 1, n - 2),
    };
    let (phi_x, phi_x_prev) = match side {
        Side::Left => (curr[inner] - curr[b], prev[inner] - prev[b]),
        Side::Right => (curr[b] - curr[inner], prev[b] - prev[inner]),
    };
    BoundaryContext {
        t,
        dt: grid.dt(),
        dx: grid.dx(),
        phi: curr[b],
        phi_x,
        phi_x_prev,
        phi_t_prev: curr[b] - prev[b],
    }
}

/// Explicit leapfrog on `phi` with ghost-vertex boundary closures.
#[derive(Debug, Clone)]
pub struct EulerSolver {
    grid: SpacetimeGrid,
    coeffs: Coefficients,
    left: ResolvedBoundary,
    right: ResolvedBoundary,
    state: SecondOrderState,
    next: Vec<f64>,
}

impl EulerSolver {
    pub fn new(ic: &InitialCondition, grid: SpacetimeGrid, model: &PhysicsModel, bc: &BoundarySpec) -> Result<Self> {
        bc.validate()?;
        if !grid.is_explicit_stable() {
            return Err(SimError::Unstable {
                dx: grid.dx(),
                dt: grid.dt(),
            });
        }
        let coeffs = evaluate_coefficients(model, &grid)?;
        let state = taylor_start(ic, &grid, &coeffs)?;
        let n = grid.nx();
        let left = ResolvedBoundary::new(Side::Left, &bc.left, &coeffs, state.varphi_prev[0])?;
        let right = ResolvedBoundary::new(Side::Right, &bc.right, &coeffs, state.varphi_prev[n - 1])?;
        Ok(Self {
            grid,
            coeffs,
            left,
            right,
            state,
            next: vec![0.0; n],
        })
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }
    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }
    pub fn state(&self) -> &SecondOrderState {
        &self.state
    }
    pub fn t(&self) -> f64 {
        self.grid.t(self.state.j)
    }
    /// Field on the current slice.
    pub fn varphi(&self) -> &[f64] {
        &self.state.varphi_curr
    }

    fn advance(&mut self) {
        let (dx, dt) = (self.grid.dx(), self.grid.dt());
        let h = 0.5 * self.coeffs.alpha * dt;
        let (inv_d, keep) = (1.0 / (1.0 + h), 1.0 - h);
        let (r2, dt2) = (1.0 / (dx * dx), dt * dt);
        let t = self.t();
        let c = &self.coeffs;
        let p = &self.state.varphi_prev;
        let q = &self.state.varphi_curr;
        let n = q.len();
        let lu = self.left.update(&vertex_context(t, &self.grid, p, q, Side::Left));
        let ru = self.right.update(&vertex_context(t, &self.grid, p, q, Side::Right));
        let next = &mut self.next;

        next[0] = match lu {
            BoundaryUpdate::Temporal(v) => q[0] + v,
            BoundaryUpdate::Edge(e) => {
                let ghost = q[1] - 2.0 * e;
                let lap = (ghost - 2.0 * q[0] + q[1]) * r2;
                (2.0 * q[0] - keep * p[0] + dt2 * (lap + c.force(0, q[0]))) * inv_d
            }
        };
        for i in 1..n - 1 {
            let lap = (q[i - 1] - 2.0 * q[i] + q[i + 1]) * r2;
            next[i] = (2.0 * q[i] - keep * p[i] + dt2 * (lap + c.force(i, q[i]))) * inv_d;
        }
        next[n - 1] = match ru {
            BoundaryUpdate::Temporal(v) => q[n - 1] + v,
            BoundaryUpdate::Edge(e) => {
                let ghost = q[n - 2] + 2.0 * e;
                let lap = (q[n - 2] - 2.0 * q[n - 1] + ghost) * r2;
                (2.0 * q[n - 1] - keep * p[n - 1] + dt2 * (lap + c.force(n - 1, q[n - 1]))) * inv_d
            }
        };
        // rotate prev <- curr <- next
        std::mem::swap(&mut self.state.varphi_prev, &mut self.state.varphi_curr);
        std::mem::swap(&mut self.state.varphi_curr, &mut self.next);
        self.state.j += 1;
    }

    fn check_finite(&self) -> Result<()> {
        match self.state.varphi_curr.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(vertex) => Err(SimError::BlowUp {
                step: self.state.j,
                t: self.t(),
                vertex,
            }),
        }
    }

    pub fn step(&mut self) -> Result<()> {
        self.advance();
        if self.state.j % 32 == 0 {
            self.check_finite()?;
        }
        Ok(())
    }

    pub fn steps(&mut self, n: u64) -> Result<()> {
        for _ in 0..n {
            self.advance();
            if self.state.j % 32 == 0 {
                self.check_finite()?;
            }
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

    /// Step, then return the centred-difference energy of the slice just left.
    pub fn step_with_energy(&mut self) -> Result<EnergyBreakdown> {
        let t = self.t();
        let before = self.state.varphi_prev.clone();
        self.advance();
        self.check_finite()?;
        Ok(central_difference_energy(
            &self.grid,
            &self.coeffs,
            t,
            &before,
            &self.state.varphi_prev,
            &self.state.varphi_curr,
        ))
    }
}

/// Solve a tridiagonal system. `sub[0]` and `sup[n-1]` are ignored.
pub fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n || n == 0 {
        return Err(SimError::InvalidGrid("tridiagonal bands have inconsistent lengths".into()));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let singular = |i: usize| SimError::Unsupported(format!("zero pivot in tridiagonal solve at row {i}"));
    if diag[0] == 0.0 {
        return Err(singular(0));
    }
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        if m == 0.0 {
            return Err(singular(i));
        }
        c[i] = if i + 1 < n { sup[i] / m } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Tridiagonal system of one implicit step.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// Implicit scheme for the linear model,
///
/// ```text
/// (phi+ - 2 phi + phi-)/dt^2 + alpha (phi+ - phi-)/(2 dt) = A (phi+ + phi)/2 + s,
/// A = d_xx - m2,
/// ```
///
/// with the spatial operator averaged over the new and current slices.
/// Unconditionally stable and dissipative.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    grid: SpacetimeGrid,
    coeffs: Coefficients,
    bc: BoundarySpec,
    state: SecondOrderState,
}

impl CrankNicolson {
    pub fn new(ic: &InitialCondition, grid: SpacetimeGrid, model: &PhysicsModel, bc: &BoundarySpec) -> Result<Self> {
        if !model.is_linear() {
            return Err(SimError::Unsupported(
                "Crank-Nicolson is limited to linear models (mu = 0, no microshorts)".into(),
            ));
        }
        bc.validate()?;
        for c in [&bc.left, &bc.right] {
            if matches!(c, BoundaryCondition::Outgoing { .. }) {
                return Err(SimError::Unsupported(
                    "Crank-Nicolson supports Dirichlet, Neumann and pulse boundaries only".into(),
                ));
            }
        }
        let coeffs = evaluate_coefficients(model, &grid)?;
        let state = taylor_start(ic, &grid, &coeffs)?;
        Ok(Self {
            grid,
            coeffs,
            bc: bc.clone(),
            state,
        })
    }

    pub fn grid(&self) -> &SpacetimeGrid {
        &self.grid
    }
    pub fn state(&self) -> &SecondOrderState {
        &self.state
    }
    pub fn t(&self) -> f64 {
        self.grid.t(self.state.j)
    }

    /// Prescribed spatial edge (`dx d_x phi`) averaged over the step, or the
    /// Dirichlet value at the new slice.
    fn closure(&self, side: Side, t: f64) -> Closure {
        let dt = self.grid.dt();
        let dx = self.grid.dx();
        match self.bc.side(side) {
            BoundaryCondition::Dirichlet {
                value,
                amplitude,
                omega,
            } => Closure::Value(value + amplitude * (omega * (t + dt)).sin()),
            BoundaryCondition::NeumannBias { eta, xi } => {
                Closure::Edge(crate::boundary::neumann_bias_edge(dx, *eta, *xi, side))
            }
            BoundaryCondition::Pulse(p) => Closure::Edge(
                0.5 * (crate::boundary::pulse_edge(dx, p, t) + crate::boundary::pulse_edge(dx, p, t + dt)),
            ),
            BoundaryCondition::Outgoing { .. } => unreachable!("rejected in new"),
        }
    }

    /// The linear system whose solution is the next slice.
    pub fn system(&self) -> TridiagonalSystem {
        let (dx, dt) = (self.grid.dx(), self.grid.dt());
        let n = self.grid.nx();
        let c = &self.coeffs;
        let (p, q) = (&self.state.varphi_prev, &self.state.varphi_curr);
        let r2 = 1.0 / (dx * dx);
        let damp = 0.5 * c.alpha / dt;
        let lead = 1.0 / (dt * dt) + damp;
        let trail = 1.0 / (dt * dt) - damp;
        let mut sys = TridiagonalSystem {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
            rhs: vec![0.0; n],
        };
        // d_xx with the end rows written as 2 (inner - outer) / dx^2
        let lap = |i: usize| -> f64 {
            if i == 0 {
                2.0 * (q[1] - q[0]) * r2
            } else if i + 1 == n {
                2.0 * (q[n - 2] - q[n - 1]) * r2
            } else {
                (q[i - 1] - 2.0 * q[i] + q[i + 1]) * r2
            }
        };
        for i in 0..n {
            let (lo, hi) = if i == 0 {
                (0.0, 2.0 * r2)
            } else if i + 1 == n {
                (2.0 * r2, 0.0)
            } else {
                (r2, r2)
            };
            sys.sub[i] = -0.5 * lo;
            sys.sup[i] = -0.5 * hi;
            sys.diag[i] = lead + 0.5 * (lo + hi + c.m2[i]);
            sys.rhs[i] = 2.0 * q[i] / (dt * dt) - trail * p[i] + 0.5 * (lap(i) - c.m2[i] * q[i]) + c.source[i];
        }
        let t = self.t();
        for (side, i) in [(Side::Left, 0), (Side::Right, n - 1)] {
            match self.closure(side, t) {
                Closure::Value(v) => {
                    sys.sub[i] = 0.0;
                    sys.sup[i] = 0.0;
                    sys.diag[i] = 1.0;
                    sys.rhs[i] = v;
                }
                Closure::Edge(e) => {
                    let sign = if side == Side::Left { -1.0 } else { 1.0 };
                    sys.rhs[i] += sign * 2.0 * e * r2;
                }
            }
        }
        sys
    }

    pub fn step(&mut self) -> Result<()> {
        let sys = self.system();
        let next = thomas(&sys.sub, &sys.diag, &sys.sup, &sys.rhs)?;
        if let Some(vertex) = next.iter().position(|v| !v.is_finite()) {
            return Err(SimError::BlowUp {
                step: self.state.j + 1,
                t: self.t() + self.grid.dt(),
                vertex,
            });
        }
        let curr = std::mem::replace(&mut self.state.varphi_curr, next);
        self.state.varphi_prev = curr;
        self.state.j += 1;
        Ok(())
    }

    pub fn step_with_energy(&mut self) -> Result<EnergyBreakdown> {
        let t = self.t();
        let before = self.state.varphi_prev.clone();
        self.step()?;
        Ok(central_difference_energy(
            &self.grid,
            &self.coeffs,
            t,
            &before,
            &self.state.varphi_prev,
            &self.state.varphi_curr,
        ))
    }
}

enum Closure {
    Value(f64),
    Edge(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnTrajectory {
    pub energies: Vec<EnergyBreakdown>,
    pub varphi: Vec<f64>,
    pub steps: u64,
}

/// Run the implicit scheme to `t_max`, sampling the energy every
/// `energy_every` steps (never when zero).
pub fn crank_nicolson_run(
    ic: &InitialCondition,
    grid: SpacetimeGrid,
    model: &PhysicsModel,
    bc: &BoundarySpec,
    t_max: f64,
    energy_every: u64,
) -> Result<CnTrajectory> {
    let mut cn = CrankNicolson::new(ic, grid, model, bc)?;
    let total = (t_max / grid.dt() + 1e-9).floor() as u64;
    let mut energies = Vec::new();
    while cn.state.j < total {
        if energy_every > 0 && cn.state.j % energy_every == 0 {
            energies.push(cn.step_with_energy()?);
        } else {
            cn.step()?;
        }
    }
    Ok(CnTrajectory {
        energies,
        steps: cn.state.j,
        varphi: cn.state.varphi_curr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dec,
    Euler,
    #[serde(rename = "cn")]
    CrankNicolson,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Dec => "dec",
            Method::Euler => "euler",
            Method::CrankNicolson => "cn",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dec" => Ok(Method::Dec),
            "euler" => Ok(Method::Euler),
            "cn" | "crank_nicolson" | "crank-nicolson" => Ok(Method::CrankNicolson),
            other => Err(crate::error::invalid("method", format!("unknown method `{other}`"))),
        }
    }
}

/// Problem timed by [`profile_runtimes`].
#[derive(Debug, Clone)]
pub struct ProfileCase {
    pub ic: InitialCondition,
    pub model: PhysicsModel,
    pub bc: BoundarySpec,
    pub length: f64,
    pub x_min: f64,
    /// `dt / dx`
    pub courant: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub method: Method,
    pub dx: f64,
    pub dt: f64,
    pub nx: usize,
    pub steps: u64,
    /// `nx * steps`
    pub gridpoints: f64,
    /// Best wall-clock over the repeats.
    pub seconds: f64,
}

/// Wall-clock of each method at each spacing on identical grids and durations.
pub fn profile_runtimes(case: &ProfileCase, methods: &[Method], dxs: &[f64], repeats: usize) -> Result<Vec<RuntimeRow>> {
    let mut rows = Vec::new();
    for &dx in dxs {
        let grid = SpacetimeGrid::build(case.length, dx, case.courant * dx, case.x_min)?;
        let steps = (case.t_max / grid.dt() + 1e-9).floor() as u64;
        for &method in methods {
            let mut best = f64::INFINITY;
            for _ in 0..repeats.max(1) {
                let secs = match method {
                    Method::Dec => {
                        let mut sim = Simulation::new(&case.ic, grid, &case.model, &case.bc)?;
                        let start = Instant::now();
                        sim.steps(steps)?;
                        start.elapsed().as_secs_f64()
                    }
                    Method::Euler => {
                        let mut sim = EulerSolver::new(&case.ic, grid, &case.model, &case.bc)?;
                        let start = Instant::now();
                        // the Taylor start already supplies slice 1
                        sim.steps(steps.saturating_sub(1))?;
                        start.elapsed().as_secs_f64()
                    }
                    Method::CrankNicolson => {
                        let mut sim = CrankNicolson::new(&case.ic, grid, &case.model, &case.bc)?;
                        let start = Instant::now();
                        for _ in 1..steps {
                            sim.step()?;
                        }
                        start.elapsed().as_secs_f64()
                    }
                };
                best = best.min(secs);
            }
            rows.push(RuntimeRow {
                method,
                dx,
                dt: grid.dt(),
                nx: grid.nx(),
                steps,
                gridpoints: grid.nx() as f64 * steps as f64,
                seconds: best,
            });
        }
    }
    Ok(rows)
}

/// Log-log regression of wall-clock against gridpoint count for one method.
pub fn scaling_slope(rows: &[RuntimeRow], method: Method) -> Result<LinearFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.method == method && r.seconds > 0.0)
        .map(|r| (r.gridpoints.ln(), r.seconds.ln()))
        .unzip();
    linear_fit(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CapacitorSource, Source};

    fn small(dx: f64, len: f64) -> SpacetimeGrid {
        SpacetimeGrid::build(len, dx, 0.8 * dx, -0.5 * len).unwrap()
    }

    #[test]
    fn euler_zero_stays_zero() {
        let mut e = EulerSolver::new(&InitialCondition::Zero, small(0.1, 10.0), &PhysicsModel::sine_gordon(), &BoundarySpec::closed()).unwrap();
        e.steps(100).unwrap();
        assert!(e.varphi().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn euler_tracks_the_edge_stepper() {
        let ic = InitialCondition::Kink { x0: 0.0, u: 0.55, n: 0, polarity: 1 };
        let g = small(0.05, 40.0);
        let mut e = EulerSolver::new(&ic, g, &PhysicsModel::sine_gordon(), &BoundarySpec::closed()).unwrap();
        let mut d = Simulation::new(&ic, g, &PhysicsModel::sine_gordon(), &BoundarySpec::closed()).unwrap();
        e.run_until(10.0).unwrap();
        d.run_until(10.0).unwrap();
        let diff = e
            .varphi()
            .iter()
            .zip(&d.state().varphi)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-3, "{diff}");
    }

    #[test]
    fn thomas_matches_known_solution() {
        let sub = [0.0, -1.0, -1.0, -1.0];
        let diag = [2.0, 2.0, 2.0, 2.0];
        let sup = [-1.0, -1.0, -1.0, 0.0];
        let x = [1.0, -2.0, 3.5, 0.25];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                diag[i] * x[i]
                    + if i > 0 { sub[i] * x[i - 1] } else { 0.0 }
                    + if i < 3 { sup[i] * x[i + 1] } else { 0.0 }
            })
            .collect();
        let got = thomas(&sub, &diag, &sup, &rhs).unwrap();
        for i in 0..4 {
            assert!((got[i] - x[i]).abs() < 1e-14);
        }
        assert!(thomas(&[0.0], &[0.0], &[0.0], &[1.0]).is_err());
    }

    #[test]
    fn cn_refuses_nonlinear_and_outgoing() {
        let g = small(0.1, 10.0);
        assert!(CrankNicolson::new(&InitialCondition::Zero, g, &PhysicsModel::sine_gordon(), &BoundarySpec::closed()).is_err());
        assert!(CrankNicolson::new(&InitialCondition::Zero, g, &PhysicsModel::massless_schwinger(1.0), &BoundarySpec::outgoing(1)).is_err());
    }

    #[test]
    fn cn_zero_stays_zero_and_is_stable_at_large_dt() {
        let g = SpacetimeGrid::implicit(101, 0.1, 0.2, -5.0).unwrap();
        let model = PhysicsModel::massless_schwinger(1.2);
        let run = crank_nicolson_run(&InitialCondition::Zero, g, &model, &BoundarySpec::closed(), 20.0, 0).unwrap();
        assert!(run.varphi.iter().all(|&v| v == 0.0));

        let ic = InitialCondition::Gaussian { x0: 0.0, width: 0.5, amplitude: 1.0, direction: 1 };
        let run = crank_nicolson_run(&ic, g, &model, &BoundarySpec::closed(), 200.0, 0).unwrap();
        let max = run.varphi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max.is_finite() && max < 1.0);
    }

    #[test]
    fn cn_energy_decays_on_capacitor() {
        let model = PhysicsModel::massless_schwinger(1.2).with_source(Source::Capacitor(CapacitorSource {
            q: 4.0,
            separation: 10.0,
            center: 0.0,
        }));
        let g = SpacetimeGrid::build(40.0, 0.2, 0.16, -20.0).unwrap();
        let run = crank_nicolson_run(&InitialCondition::Zero, g, &model, &BoundarySpec::closed(), 100.0, 10).unwrap();
        let first = run.energies[5].total;
        let last = run.energies.last().unwrap().total;
        assert!(last < first);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Dec, Method::Euler, Method::CrankNicolson] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("rk4".parse::<Method>().is_err());
    }
}
