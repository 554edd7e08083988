//! Coefficients of the generalised equation of motion
//!
//! ```text
//! phi_tt - phi_xx + alpha phi_t + m2(x) phi + mu(x) sin(phi) = s(x)
//! ```
//!
//! Bias currents enter as `s = -beta`; classical background fields `F(x)`
//! enter as `s = -g F(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SimError};
use crate::mesh::SpacetimeGrid;

/// Critical-current profile `mu(x)` without microshorts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MuProfile {
    Uniform { value: f64 },
    Constrictions { background: f64, regions: Vec<Constriction> },
}

impl Default for MuProfile {
    fn default() -> Self {
        MuProfile::Uniform { value: 1.0 }
    }
}

impl MuProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            MuProfile::Uniform { value } => *value,
            MuProfile::Constrictions {
                background,
                regions,
            } => {
                background
                    + regions
                        .iter()
                        .map(|r| r.excess(x, *background))
                        .sum::<f64>()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            MuProfile::Uniform { value } => *value == 0.0,
            MuProfile::Constrictions {
                background,
                regions,
            } => *background == 0.0 && regions.iter().all(|r| r.mu == 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            MuProfile::Uniform { value } => {
                if !(*value >= 0.0 && value.is_finite()) {
                    return Err(invalid("mu", format!("must be finite and >= 0, got {value}")));
                }
            }
            MuProfile::Constrictions {
                background,
                regions,
            } => {
                if !(*background >= 0.0 && background.is_finite()) {
                    return Err(invalid("mu.background", format!("must be >= 0, got {background}")));
                }
                for r in regions {
                    if !(r.length > 0.0 && r.taper >= 0.0 && r.mu >= 0.0 && r.center.is_finite()) {
                        return Err(invalid(
                            "mu.regions",
                            format!("constriction needs length > 0, taper >= 0, mu >= 0: {r:?}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Region of modified critical current: `mu` on `|x - center| < length/2`,
/// linear taper of width `taper` to the background on either side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constriction {
    pub center: f64,
    pub length: f64,
    pub taper: f64,
    pub mu: f64,
}

impl Constriction {
    fn excess(&self, x: f64, background: f64) -> f64 {
        let d = (x - self.center).abs();
        let half = 0.5 * self.length;
        let w = if d <= half {
            1.0
        } else if self.taper > 0.0 && d < half + self.taper {
            1.0 - (d - half) / self.taper
        } else {
            0.0
        };
        w * (self.mu - background)
    }
}

/// Point-like enhancement `mu_s * delta(x - x_s)` of the critical current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Microshort {
    pub x: f64,
    pub mu: f64,
}

/// Parallel-plate capacitor: `F = Q [Theta(x + Lc/2) - Theta(x - Lc/2)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitorSource {
    pub q: f64,
    pub separation: f64,
    #[serde(default)]
    pub center: f64,
}

impl CapacitorSource {
    pub fn field(&self, x: f64) -> f64 {
        let h = 0.5 * self.separation;
        self.q * (heaviside(x - self.center + h) - heaviside(x - self.center - h))
    }
}

/// Fixed charge at `x_c`: `F = Q Theta(x - x_c)`.
///
/// With `Q = -2 pi g` the step cancels the field of a `0 -> 2 pi` kink
/// sitting on top of the charge, so the combined configuration is neutral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointChargeSource {
    pub q: f64,
    #[serde(default)]
    pub x: f64,
}

impl PointChargeSource {
    /// Charge that neutralises one kink at coupling `g`.
    pub fn neutralising(g: f64, x: f64) -> Self {
        Self {
            q: -2.0 * std::f64::consts::PI * g,
            x,
        }
    }

    pub fn field(&self, x: f64) -> f64 {
        self.q * heaviside(x - self.x)
    }
}

/// Right-hand side contributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    /// Uniform bias current, `s = -beta`.
    Bias { beta: f64 },
    /// `s = -g F` with the capacitor field.
    Capacitor(CapacitorSource),
    /// `s = -g F` with the point-charge field.
    PointCharge(PointChargeSource),
}

impl Source {
    /// Background field `F(x)` carried by this source (zero for a bias).
    pub fn field(&self, x: f64) -> f64 {
        match self {
            Source::Bias { .. } => 0.0,
            Source::Capacitor(c) => c.field(x),
            Source::PointCharge(p) => p.field(x),
        }
    }

    pub fn value(&self, x: f64, g: f64) -> f64 {
        match self {
            Source::Bias { beta } => -beta,
            _ => -g * self.field(x),
        }
    }
}

/// Heaviside step with the midpoint value at the jump.
#[inline]
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicsModel {
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub mass2: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub mu: MuProfile,
    #[serde(default)]
    pub microshorts: Vec<Microshort>,
    #[serde(default)]
    pub sources: Vec<Source>,
}

impl Default for PhysicsModel {
    fn default() -> Self {
        Self::sine_gordon()
    }
}

impl PhysicsModel {
    /// Unperturbed sine-Gordon equation.
    pub fn sine_gordon() -> Self {
        Self {
            alpha: 0.0,
            mass2: 0.0,
            g: 0.0,
            mu: MuProfile::default(),
            microshorts: Vec::new(),
            sources: Vec::new(),
        }
    }

    /// Josephson junction with loss `alpha` and bias `beta`.
    pub fn perturbed(alpha: f64, beta: f64) -> Self {
        let mut m = Self::sine_gordon();
        m.alpha = alpha;
        if beta != 0.0 {
            m.sources.push(Source::Bias { beta });
        }
        m
    }

    /// Massless bosonised Schwinger model (Klein-Gordon with mass `g`).
    pub fn massless_schwinger(g: f64) -> Self {
        Self {
            alpha: 0.0,
            mass2: g * g,
            g,
            mu: MuProfile::Uniform { value: 0.0 },
            microshorts: Vec::new(),
            sources: Vec::new(),
        }
    }

    /// Normalised massive Schwinger model.
    pub fn massive_schwinger(g: f64) -> Self {
        Self {
            alpha: 0.0,
            mass2: g * g,
            g,
            mu: MuProfile::default(),
            microshorts: Vec::new(),
            sources: Vec::new(),
        }
    }

    pub fn with_source(mut self, s: Source) -> Self {
        self.sources.push(s);
        self
    }

    pub fn with_microshort(mut self, x: f64, mu: f64) -> Self {
        self.microshorts.push(Microshort { x, mu });
        self
    }

    pub fn is_linear(&self) -> bool {
        self.mu.is_zero() && self.microshorts.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and >= 0, got {v}")))
            }
        };
        finite_nonneg("alpha", self.alpha)?;
        finite_nonneg("mass2", self.mass2)?;
        finite_nonneg("g", self.g)?;
        self.mu.validate()?;
        for s in &self.microshorts {
            if !(s.mu > 0.0 && s.mu.is_finite() && s.x.is_finite()) {
                return Err(invalid("microshorts", format!("mu_s must be > 0: {s:?}")));
            }
        }
        for s in &self.sources {
            let ok = match s {
                Source::Bias { beta } => beta.is_finite(),
                Source::Capacitor(c) => c.q.is_finite() && c.separation > 0.0,
                Source::PointCharge(p) => p.q.is_finite() && p.x.is_finite(),
            };
            if !ok {
                return Err(invalid("sources", format!("malformed source {s:?}")));
            }
        }
        Ok(())
    }
}

/// Per-vertex coefficient arrays sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub alpha: f64,
    pub g: f64,
    pub m2: Vec<f64>,
    pub mu: Vec<f64>,
    pub source: Vec<f64>,
    /// Background field `F` at each vertex (zero without Schwinger sources).
    pub field: Vec<f64>,
    /// False when `mu` vanishes identically, letting the stepper skip `sin`.
    pub has_sine: bool,
}

impl Coefficients {
    #[inline]
    pub fn force(&self, i: usize, phi: f64) -> f64 {
        let mut f = self.source[i] - self.m2[i] * phi;
        if self.has_sine {
            f -= self.mu[i] * phi.sin();
        }
        f
    }

    /// Potential `mu (1 - cos phi)` at vertex `i`.
    #[inline]
    pub fn sine_potential(&self, i: usize, phi: f64) -> f64 {
        if self.has_sine {
            self.mu[i] * (1.0 - phi.cos())
        } else {
            0.0
        }
    }

    /// Quadratic part `m2 phi^2 / 2 - s phi + F^2 / 2`; equals
    /// `(g phi + F)^2 / 2` when `m2 = g^2` and `s = -g F`.
    #[inline]
    pub fn field_potential(&self, i: usize, phi: f64) -> f64 {
        0.5 * self.m2[i] * phi * phi - self.source[i] * phi + 0.5 * self.field[i] * self.field[i]
    }

    /// Linearisation about the vacuum near `phi0`: finds the local minimum
    /// of the potential reached downhill from `phi0` (roots of
    /// `m2 phi + mu sin(phi) = s` with positive curvature) and returns
    /// `(phi_ref, U)` with `U = m2 + mu cos(phi_ref)`. Falls back to
    /// `(phi0, m2 + mu)` if no stable vacuum is found.
    pub fn vacuum_near(&self, i: usize, phi0: f64) -> (f64, f64) {
        let (m2, mu, s) = (self.m2[i], if self.has_sine { self.mu[i] } else { 0.0 }, self.source[i]);
        let mut phi = phi0;
        let mut converged = false;
        for _ in 0..200 {
            let f = m2 * phi + mu * phi.sin() - s;
            let df = m2 + mu * phi.cos();
            // Newton inside a convex region, otherwise a bounded downhill step.
            let step = if df > 1e-8 { (f / df).clamp(-0.5, 0.5) } else { 0.5 * f.signum() };
            phi -= step;
            if df > 0.0 && step.abs() <= 1e-14 * (1.0 + phi.abs()) {
                converged = true;
                break;
            }
            if !phi.is_finite() {
                break;
            }
        }
        let u = m2 + mu * phi.cos();
        if !converged || !u.is_finite() || u <= 0.0 {
            return (phi0, m2 + mu);
        }
        (phi, u)
    }
}

/// Sample the model on the grid vertices.
pub fn evaluate_coefficients(model: &PhysicsModel, grid: &SpacetimeGrid) -> Result<Coefficients> {
    model.validate()?;
    let n = grid.nx();
    let xs: Vec<f64> = (0..n).map(|i| grid.x(i)).collect();
    let mut mu: Vec<f64> = xs.iter().map(|&x| model.mu.eval(x)).collect();
    for s in &model.microshorts {
        let i = grid.nearest_vertex(s.x).filter(|_| grid.contains(s.x)).ok_or_else(|| {
            SimError::InvalidParameter {
                name: "microshorts",
                reason: format!(
                    "microshort at x = {} lies outside [{}, {}]",
                    s.x,
                    grid.x_min(),
                    grid.x_max()
                ),
            }
        })?;
        mu[i] += s.mu / grid.dual_width(i);
    }
    let field: Vec<f64> = xs
        .iter()
        .map(|&x| model.sources.iter().map(|s| s.field(x)).sum())
        .collect();
    let source: Vec<f64> = xs
        .iter()
        .map(|&x| model.sources.iter().map(|s| s.value(x, model.g)).sum())
        .collect();
    let has_sine = mu.iter().any(|&m| m != 0.0);
    Ok(Coefficients {
        alpha: model.alpha,
        g: model.g,
        m2: vec![model.mass2; n],
        mu,
        source,
        field,
        has_sine,
    })
}

/// Scale factors of the massive-Schwinger rescaling
/// `phi -> 2 sqrt(pi) phi`, `x,t -> lambda x,t`, `g -> g / lambda`
/// with `lambda = sqrt(2 pi kappa)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwingerScaling {
    pub kappa: f64,
    pub lambda: f64,
    pub field_scale: f64,
    pub g_physical: f64,
    pub g_normalized: f64,
}

impl SchwingerScaling {
    pub fn to_normalized_length(&self, x: f64) -> f64 {
        self.lambda * x
    }
    pub fn to_physical_length(&self, x: f64) -> f64 {
        x / self.lambda
    }
    pub fn to_normalized_field(&self, phi: f64) -> f64 {
        self.field_scale * phi
    }
    pub fn to_physical_field(&self, phi: f64) -> f64 {
        phi / self.field_scale
    }
}

pub fn normalize_schwinger(kappa: f64, g_physical: f64) -> Result<SchwingerScaling> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    if !(g_physical >= 0.0 && g_physical.is_finite()) {
        return Err(invalid("g", format!("must be >= 0, got {g_physical}")));
    }
    let lambda = (2.0 * std::f64::consts::PI * kappa).sqrt();
    Ok(SchwingerScaling {
        kappa,
        lambda,
        field_scale: 2.0 * std::f64::consts::PI.sqrt(),
        g_physical,
        g_normalized: g_physical / lambda,
    })
}

/// Inverse of [`normalize_schwinger`]: recovers `(kappa, g_physical)`.
pub fn denormalize_schwinger(s: &SchwingerScaling) -> (f64, f64) {
    let kappa = s.lambda * s.lambda / (2.0 * std::f64::consts::PI);
    (kappa, s.g_normalized * s.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(dx: f64, x_min: f64, len: f64) -> SpacetimeGrid {
        SpacetimeGrid::build(len, dx, 0.8 * dx, x_min).unwrap()
    }

    #[test]
    fn pure_sine_gordon_coefficients() {
        let g = grid(0.05, -50.0, 100.0);
        let c = evaluate_coefficients(&PhysicsModel::sine_gordon(), &g).unwrap();
        assert!(c.mu.iter().all(|&m| m == 1.0));
        assert!(c.m2.iter().all(|&m| m == 0.0));
        assert!(c.source.iter().all(|&s| s == 0.0));
        assert!(c.has_sine);
    }

    #[test]
    fn microshort_spike_has_unit_weight() {
        let g = grid(0.05, -20.0, 40.0);
        let m = PhysicsModel::sine_gordon().with_microshort(-10.0, 1.0);
        let c = evaluate_coefficients(&m, &g).unwrap();
        let i = g.nearest_vertex(-10.0).unwrap();
        assert!((c.mu[i] - 21.0).abs() < 1e-9);
        let excess: f64 = (0..g.nx()).map(|k| (c.mu[k] - 1.0) * g.dual_width(k)).sum();
        assert!((excess - 1.0).abs() < 1e-12);
        assert_eq!(c.mu.iter().filter(|&&m| m != 1.0).count(), 1);
    }

    #[test]
    fn microshort_outside_domain_is_rejected() {
        let g = grid(0.05, -20.0, 40.0);
        let m = PhysicsModel::sine_gordon().with_microshort(25.0, 1.0);
        assert!(evaluate_coefficients(&m, &g).is_err());
    }

    #[test]
    fn constriction_profile() {
        let p = MuProfile::Constrictions {
            background: 1.0,
            regions: vec![Constriction {
                center: 0.0,
                length: 40.0,
                taper: 10.0,
                mu: 10.0,
            }],
        };
        assert_eq!(p.eval(0.0), 10.0);
        assert_eq!(p.eval(19.9), 10.0);
        assert!((p.eval(25.0) - 5.5).abs() < 1e-12);
        assert_eq!(p.eval(30.0), 1.0);
        assert_eq!(p.eval(-45.0), 1.0);
    }

    #[test]
    fn capacitor_field_and_midpoint() {
        let c = CapacitorSource {
            q: 4.0,
            separation: 40.0,
            center: 0.0,
        };
        assert_eq!(c.field(0.0), 4.0);
        assert_eq!(c.field(25.0), 0.0);
        assert_eq!(c.field(-20.0), 2.0);
        assert_eq!(c.field(20.0), 2.0);
    }

    #[test]
    fn point_charge_sources() {
        let g = 0.3;
        let p = PointChargeSource::neutralising(g, 0.0);
        assert!((p.q + 2.0 * PI * g).abs() < 1e-15);
        let s = Source::PointCharge(p);
        assert_eq!(s.value(-1.0, g), 0.0);
        assert!((s.value(1.0, g) - 2.0 * PI * g * g).abs() < 1e-15);
    }

    #[test]
    fn bias_source_value() {
        let m = PhysicsModel::perturbed(0.005, 0.002);
        let c = evaluate_coefficients(&m, &grid(0.1, 0.0, 10.0)).unwrap();
        assert!(c.source.iter().all(|&s| s == -0.002));
    }

    #[test]
    fn schwinger_field_potential_is_square() {
        let g = 1.2;
        let m = PhysicsModel::massless_schwinger(g).with_source(Source::Capacitor(CapacitorSource {
            q: 4.0,
            separation: 40.0,
            center: 0.0,
        }));
        let gr = grid(0.333, -60.0, 120.0);
        let c = evaluate_coefficients(&m, &gr).unwrap();
        assert!(!c.has_sine);
        for (i, phi) in [(0usize, 0.3), (gr.nx() / 2, -1.7)] {
            let want = 0.5 * (g * phi + c.field[i]).powi(2);
            assert!((c.field_potential(i, phi) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_linearisation() {
        let m = PhysicsModel::massive_schwinger(0.3)
            .with_source(Source::PointCharge(PointChargeSource::neutralising(0.3, 0.0)));
        let gr = grid(0.1, -50.0, 100.0);
        let c = evaluate_coefficients(&m, &gr).unwrap();
        let (phi_l, u_l) = c.vacuum_near(0, 0.01);
        assert!(phi_l.abs() < 1e-12);
        assert!((u_l - 1.09).abs() < 1e-12);
        let (phi_r, u_r) = c.vacuum_near(gr.nx() - 1, 6.2);
        assert!((phi_r - 2.0 * PI).abs() < 1e-12);
        assert!((u_r - 1.09).abs() < 1e-12);
    }

    #[test]
    fn vacuum_search_from_concave_start() {
        let c = evaluate_coefficients(&PhysicsModel::massive_schwinger(0.4), &grid(0.1, 0.0, 2.0)).unwrap();
        let (phi, u) = c.vacuum_near(0, -1.9226);
        assert!(phi.abs() < 1e-12);
        assert!((u - 1.16).abs() < 1e-12);
    }

    #[test]
    fn normalization_examples() {
        let s = normalize_schwinger(1.0 / (2.0 * PI), 1.2).unwrap();
        assert!((s.lambda - 1.0).abs() < 1e-15);
        assert!((s.g_normalized - 1.2).abs() < 1e-15);
        assert!((s.field_scale - 2.0 * PI.sqrt()).abs() < 1e-15);
        assert!(normalize_schwinger(0.0, 1.0).is_err());
        assert!(normalize_schwinger(-1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn normalization_round_trip(kappa in 1e-3f64..1e3, g in 0.0f64..10.0) {
            let s = normalize_schwinger(kappa, g).unwrap();
            let (k2, g2) = denormalize_schwinger(&s);
            prop_assert!((k2 - kappa).abs() <= 4.0 * f64::EPSILON * kappa);
            prop_assert!((g2 - g).abs() <= 4.0 * f64::EPSILON * g.max(1e-300));
            let x = 3.7;
            prop_assert!((s.to_physical_length(s.to_normalized_length(x)) - x).abs() < 1e-12);
        }

        #[test]
        fn mu_is_nonnegative(center in -50.0f64..50.0, len in 0.1f64..50.0, taper in 0.0f64..20.0,
                             mu in 0.0f64..20.0, x in -100.0f64..100.0) {
            let p = MuProfile::Constrictions {
                background: 1.0,
                regions: vec![Constriction { center, length: len, taper, mu }],
            };
            let v = p.eval(x);
            prop_assert!(v >= 0.0);
            prop_assert!(v <= mu.max(1.0) + 1e-12);
        }
    }
}
