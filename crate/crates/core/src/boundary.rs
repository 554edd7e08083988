//! Boundary conditions, expressed as the value of the boundary spatial edge
//! (Neumann-type data) or of the boundary temporal edge (Dirichlet and
//! outgoing conditions).
//!
//! A prescribed `phi_x` edge `e` on the left enters the half dual cell of
//! vertex 0 as `2 (phi_x[0] - e) / dx^2`, which is the same arithmetic as a
//! ghost vertex `phi(-1) = phi(1) - 2 e`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::Coefficients;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Magnetic pulse `d_x phi = H(t) sin(omega t)` with a flat-top envelope
/// and Gaussian edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub amplitude: f64,
    pub omega: f64,
    pub sigma_rise: f64,
    pub sigma_fall: f64,
    /// Total pulse duration `T_p`.
    pub duration: f64,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_rise > 0.0) || !(self.sigma_fall > 0.0) {
            return Err(invalid(
                "pulse.sigma",
                format!(
                    "rise and fall widths must be > 0 (got {}, {})",
                    self.sigma_rise, self.sigma_fall
                ),
            ));
        }
        if !self.amplitude.is_finite() || !self.omega.is_finite() || !self.duration.is_finite() {
            return Err(invalid("pulse", "parameters must be finite"));
        }
        Ok(())
    }

    /// `H(t)`: Gaussian rise centred at `3 sigma_rise`, flat top, Gaussian
    /// fall starting at `T_p - 3 sigma_fall`, zero after `T_p + 3 sigma_fall`.
    pub fn envelope(&self, t: f64) -> f64 {
        if self.amplitude == 0.0 || t < 0.0 {
            return 0.0;
        }
        let t_r = 3.0 * self.sigma_rise;
        let t_f = 3.0 * self.sigma_fall;
        if t > self.duration + t_f {
            return 0.0;
        }
        let mut h = self.amplitude;
        if t < t_r {
            let z = (t - t_r) / self.sigma_rise;
            h *= (-0.5 * z * z).exp();
        }
        let fall_start = self.duration - t_f;
        if t > fall_start {
            let z = (t - fall_start) / self.sigma_fall;
            h *= (-0.5 * z * z).exp();
        }
        h
    }

    pub fn value(&self, t: f64) -> f64 {
        let h = self.envelope(t);
        if h == 0.0 {
            0.0
        } else {
            h * (self.omega * t).sin()
        }
    }
}

fn default_order() -> u8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryCondition {
    /// `phi = value + amplitude sin(omega t)` on the boundary vertex.
    Dirichlet {
        value: f64,
        #[serde(default)]
        amplitude: f64,
        #[serde(default)]
        omega: f64,
    },
    /// `d_x phi = eta + xi` on the left, `eta - xi` on the right.
    NeumannBias { eta: f64, xi: f64 },
    Pulse(PulseSpec),
    /// Radiating condition of order 0 or 1. `potential` overrides the
    /// linearised `U`; when absent `U` is taken from the vacuum nearest
    /// to the initial boundary value.
    Outgoing {
        #[serde(default = "default_order")]
        order: u8,
        #[serde(default)]
        potential: Option<f64>,
    },
}

impl BoundaryCondition {
    pub fn closed() -> Self {
        BoundaryCondition::NeumannBias { eta: 0.0, xi: 0.0 }
    }

    pub fn outgoing(order: u8) -> Self {
        BoundaryCondition::Outgoing {
            order,
            potential: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BoundaryCondition::Dirichlet {
                value,
                amplitude,
                omega,
            } => {
                if !(value.is_finite() && amplitude.is_finite() && omega.is_finite()) {
                    return Err(invalid("boundary.dirichlet", "values must be finite"));
                }
            }
            BoundaryCondition::NeumannBias { eta, xi } => {
                if !(eta.is_finite() && xi.is_finite()) {
                    return Err(invalid("boundary.neumann_bias", "eta and xi must be finite"));
                }
            }
            BoundaryCondition::Pulse(p) => p.validate()?,
            BoundaryCondition::Outgoing { order, potential } => {
                if *order > 1 {
                    return Err(invalid(
                        "boundary.outgoing.order",
                        format!("only orders 0 and 1 are implemented, got {order}"),
                    ));
                }
                if let Some(u) = potential {
                    if !(*u >= 0.0 && u.is_finite()) {
                        return Err(invalid("boundary.outgoing.potential", format!("U must be >= 0, got {u}")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl BoundarySpec {
    pub fn closed() -> Self {
        Self {
            left: BoundaryCondition::closed(),
            right: BoundaryCondition::closed(),
        }
    }

    pub fn neumann_bias(eta: f64, xi: f64) -> Self {
        Self {
            left: BoundaryCondition::NeumannBias { eta, xi },
            right: BoundaryCondition::NeumannBias { eta, xi },
        }
    }

    pub fn outgoing(order: u8) -> Self {
        Self {
            left: BoundaryCondition::outgoing(order),
            right: BoundaryCondition::outgoing(order),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.left.validate()?;
        self.right.validate()
    }

    pub fn side(&self, side: Side) -> &BoundaryCondition {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

/// How the stepper closes one end of the slice.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryUpdate<T> {
    /// Value of the outermost spatial edge (`dx * d_x phi`).
    Edge(T),
    /// Value of the new boundary temporal edge.
    Temporal(T),
}

/// Boundary data available at the start of step `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryContext {
    pub t: f64,
    pub dt: f64,
    pub dx: f64,
    /// Field at the boundary vertex at slice `j`.
    pub phi: f64,
    /// Spatial edge adjacent to the boundary at slices `j` and `j-1`.
    pub phi_x: f64,
    pub phi_x_prev: f64,
    /// Temporal edge into the boundary vertex, `(j-1) -> j`.
    pub phi_t_prev: f64,
}

/// `dx * (eta + xi)` on the left, `dx * (eta - xi)` on the right.
pub fn neumann_bias_edge(dx: f64, eta: f64, xi: f64, side: Side) -> f64 {
    match side {
        Side::Left => dx * (eta + xi),
        Side::Right => dx * (eta - xi),
    }
}

pub fn pulse_edge(dx: f64, pulse: &PulseSpec, t: f64) -> f64 {
    let v = pulse.value(t);
    if v == 0.0 {
        0.0
    } else {
        dx * v
    }
}

/// Temporal boundary edge of the outgoing condition. `u` and `phi_ref`
/// define the linearised restoring term `U (phi - phi_ref)`.
pub fn outgoing_edge(ctx: &BoundaryContext, order: u8, u: f64, phi_ref: f64, side: Side) -> f64 {
    let r = ctx.dt / ctx.dx;
    let sign = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    if order == 0 {
        return sign * r * ctx.phi_x;
    }
    ctx.phi_t_prev + sign * r * (ctx.phi_x - ctx.phi_x_prev)
        - 0.5 * ctx.dt * ctx.dt * u * (ctx.phi - phi_ref)
}

/// A boundary condition with its model-dependent constants fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedBoundary {
    pub side: Side,
    pub condition: BoundaryCondition,
    /// `(U, phi_ref)` for outgoing conditions.
    pub linearisation: (f64, f64),
}

impl ResolvedBoundary {
    /// `phi0` is the boundary value at `t = 0`; it selects the vacuum used
    /// by the order-1 outgoing condition.
    pub fn new(side: Side, condition: &BoundaryCondition, coeffs: &Coefficients, phi0: f64) -> Result<Self> {
        condition.validate()?;
        let i = match side {
            Side::Left => 0,
            Side::Right => coeffs.mu.len() - 1,
        };
        let linearisation = match condition {
            BoundaryCondition::Outgoing {
                potential: Some(u), ..
            } => (*u, 0.0),
            BoundaryCondition::Outgoing { potential: None, .. } => {
                let (phi_ref, u) = coeffs.vacuum_near(i, phi0);
                (u, phi_ref)
            }
            _ => (0.0, 0.0),
        };
        Ok(Self {
            side,
            condition: condition.clone(),
            linearisation,
        })
    }

    pub fn update(&self, ctx: &BoundaryContext) -> BoundaryUpdate<f64> {
        match &self.condition {
            BoundaryCondition::Dirichlet {
                value,
                amplitude,
                omega,
            } => {
                let t1 = ctx.t + ctx.dt;
                let target = if *amplitude == 0.0 {
                    *value
                } else {
                    value + amplitude * (omega * t1).sin()
                };
                BoundaryUpdate::Temporal(target - ctx.phi)
            }
            BoundaryCondition::NeumannBias { eta, xi } => {
                BoundaryUpdate::Edge(neumann_bias_edge(ctx.dx, *eta, *xi, self.side))
            }
            BoundaryCondition::Pulse(p) => BoundaryUpdate::Edge(pulse_edge(ctx.dx, p, ctx.t)),
            BoundaryCondition::Outgoing { order, .. } => {
                let (u, phi_ref) = self.linearisation;
                BoundaryUpdate::Temporal(outgoing_edge(ctx, *order, u, phi_ref, self.side))
            }
        }
    }
}
