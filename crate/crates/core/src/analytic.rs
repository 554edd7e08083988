//! Closed-form sine-Gordon solutions used as initial data and oracles.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

fn check_velocity(u: f64) -> Result<()> {
    if !(u.abs() < 1.0) {
        return Err(invalid("u", format!("|u| must be < 1, got {u}")));
    }
    Ok(())
}

/// Travelling `2 pi` kink, `polarity * 4 atan(exp((x - x0 - u t)/sqrt(1-u^2))) + 2 pi n`.
pub fn kink(x: f64, t: f64, x0: f64, u: f64, n: i32, polarity: i8) -> Result<f64> {
    check_velocity(u)?;
    Ok(kink_unchecked(x, t, x0, u, n, polarity))
}

#[inline]
fn kink_unchecked(x: f64, t: f64, x0: f64, u: f64, n: i32, polarity: i8) -> f64 {
    let xi = (x - x0 - u * t) / (1.0 - u * u).sqrt();
    polarity as f64 * 4.0 * xi.exp().atan() + 2.0 * PI * n as f64
}

/// Kink-antikink pair centred on `x0`; the kink sits on the left and
/// the pair annihilates into `phi = 0` at `t = d / (2u)`.
pub fn kink_antikink(x: f64, t: f64, x0: f64, u: f64, d: f64) -> Result<f64> {
    check_velocity(u)?;
    if u == 0.0 {
        return Err(invalid("u", "the pair formula divides by u; u must be nonzero"));
    }
    Ok(kink_antikink_unchecked(x, t, x0, u, d))
}

#[inline]
fn kink_antikink_unchecked(x: f64, t: f64, x0: f64, u: f64, d: f64) -> f64 {
    let s = (1.0 - u * u).sqrt();
    let num = ((u * t - 0.5 * d) / s).sinh();
    let den = u * ((x - x0) / s).cosh();
    -4.0 * (num / den).atan()
}

/// Breather at rest with internal frequency `cos(nu)`.
pub fn breather(x: f64, t: f64, nu: f64, x0: f64, t0: f64) -> Result<f64> {
    check_nu(nu)?;
    Ok(breather_unchecked(x, t, nu, x0, t0))
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0 && nu < 0.5 * PI) {
        return Err(invalid("nu", format!("must lie in (0, pi/2), got {nu}")));
    }
    Ok(())
}

#[inline]
fn breather_unchecked(x: f64, t: f64, nu: f64, x0: f64, t0: f64) -> f64 {
    let num = nu.tan() * (nu.cos() * (t - t0)).sin();
    let den = (nu.sin() * (x - x0)).cosh();
    4.0 * (num / den).atan()
}

/// Breather moving with velocity `u` (Lorentz boost of the rest breather).
pub fn boosted_breather(x: f64, t: f64, nu: f64, x0: f64, t0: f64, u: f64) -> Result<f64> {
    check_nu(nu)?;
    check_velocity(u)?;
    let (xb, tb) = lorentz(x, t, u);
    Ok(breather_unchecked(xb, tb, nu, x0, t0))
}

/// `(x, t) -> ((x - u t), (t - u x)) / sqrt(1 - u^2)`.
#[inline]
pub fn lorentz(x: f64, t: f64, u: f64) -> (f64, f64) {
    let gamma = 1.0 / (1.0 - u * u).sqrt();
    ((x - u * t) * gamma, (t - u * x) * gamma)
}

/// User-supplied initial field and velocity.
#[derive(Clone)]
pub struct CustomIc {
    pub phi0: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub v0: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomIc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomIc { .. }")
    }
}

impl CustomIc {
    pub fn new(
        phi0: impl Fn(f64) -> f64 + Send + Sync + 'static,
        v0: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            phi0: Arc::new(phi0),
            v0: Arc::new(v0),
        }
    }
}

impl PartialEq for CustomIc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.phi0, &other.phi0) && Arc::ptr_eq(&self.v0, &other.v0)
    }
}

fn default_polarity() -> i8 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Zero,
    Kink {
        x0: f64,
        u: f64,
        #[serde(default)]
        n: i32,
        #[serde(default = "default_polarity")]
        polarity: i8,
    },
    KinkAntikinkPair {
        x0: f64,
        u: f64,
        d: f64,
    },
    Breather {
        nu: f64,
        x0: f64,
        #[serde(default)]
        t0: f64,
        #[serde(default)]
        u: f64,
    },
    /// Gaussian lump `A exp(-(x-x0)^2 / (2 w^2))` launched as a one-way
    /// wave in `direction` (+1 right, -1 left). Not an exact solution.
    Gaussian {
        x0: f64,
        width: f64,
        amplitude: f64,
        #[serde(default = "default_polarity")]
        direction: i8,
    },
    #[serde(skip)]
    Custom(CustomIc),
}

impl InitialCondition {
    pub fn validate(&self) -> Result<()> {
        match self {
            InitialCondition::Zero | InitialCondition::Custom(_) => Ok(()),
            InitialCondition::Kink { u, polarity, x0, .. } => {
                check_velocity(*u)?;
                if !x0.is_finite() {
                    return Err(invalid("ic.x0", "must be finite"));
                }
                if *polarity != 1 && *polarity != -1 {
                    return Err(invalid("ic.polarity", format!("must be +1 or -1, got {polarity}")));
                }
                Ok(())
            }
            InitialCondition::KinkAntikinkPair { u, d, .. } => {
                check_velocity(*u)?;
                if *u == 0.0 {
                    return Err(invalid("ic.u", "pair velocity must be nonzero"));
                }
                if !(*d > 0.0) {
                    return Err(invalid("ic.d", format!("must be > 0, got {d}")));
                }
                Ok(())
            }
            InitialCondition::Breather { nu, u, .. } => {
                check_nu(*nu)?;
                check_velocity(*u)
            }
            InitialCondition::Gaussian {
                width, direction, ..
            } => {
                if !(*width > 0.0) {
                    return Err(invalid("ic.width", format!("must be > 0, got {width}")));
                }
                if *direction != 1 && *direction != -1 {
                    return Err(invalid("ic.direction", "must be +1 or -1"));
                }
                Ok(())
            }
        }
    }

    /// True for closed-form space-time solutions of the unperturbed equation,
    /// which can be evaluated at negative times.
    pub fn is_exact(&self) -> bool {
        matches!(
            self,
            InitialCondition::Zero
                | InitialCondition::Kink { .. }
                | InitialCondition::KinkAntikinkPair { .. }
                | InitialCondition::Breather { .. }
        )
    }

    /// Field at `(x, t)`. Non-exact variants are only meaningful at `t = 0`.
    pub fn phi(&self, x: f64, t: f64) -> f64 {
        match self {
            InitialCondition::Zero => 0.0,
            InitialCondition::Kink {
                x0, u, n, polarity, ..
            } => kink_unchecked(x, t, *x0, *u, *n, *polarity),
            InitialCondition::KinkAntikinkPair { x0, u, d } => {
                kink_antikink_unchecked(x, t, *x0, *u, *d)
            }
            InitialCondition::Breather { nu, x0, t0, u } => {
                let (xb, tb) = if *u == 0.0 { (x, t) } else { lorentz(x, t, *u) };
                breather_unchecked(xb, tb, *nu, *x0, *t0)
            }
            InitialCondition::Gaussian {
                x0,
                width,
                amplitude,
                direction,
            } => {
                let z = x - x0 - *direction as f64 * t;
                amplitude * (-0.5 * z * z / (width * width)).exp()
            }
            InitialCondition::Custom(c) => (c.phi0)(x),
        }
    }

    /// Time derivative at `t = 0`.
    pub fn velocity(&self, x: f64) -> f64 {
        match self {
            InitialCondition::Custom(c) => (c.v0)(x),
            InitialCondition::Zero => 0.0,
            InitialCondition::Kink { x0, u, polarity, .. } => {
                let s = (1.0 - u * u).sqrt();
                let xi = (x - x0) / s;
                // d/dt 4 atan(e^xi) = 2 sech(xi) * dxi/dt
                -(*polarity as f64) * 2.0 / xi.cosh() * u / s
            }
            _ => {
                let h = 1e-5;
                (self.phi(x, h) - self.phi(x, -h)) / (2.0 * h)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Central-difference residual of the unperturbed equation.
    fn sg_residual(f: impl Fn(f64, f64) -> f64, x: f64, t: f64, h: f64, k: f64) -> f64 {
        let phi = f(x, t);
        let tt = (f(x, t + k) - 2.0 * phi + f(x, t - k)) / (k * k);
        let xx = (f(x + h, t) - 2.0 * phi + f(x - h, t)) / (h * h);
        tt - xx + phi.sin()
    }

    fn max_residual(f: &dyn Fn(f64, f64) -> f64, h: f64) -> f64 {
        let k = 0.8 * h;
        let mut worst: f64 = 0.0;
        let mut x = -10.0;
        while x <= 10.0 {
            for t in [0.0, 0.7, 2.3] {
                worst = worst.max(sg_residual(f, x, t, h, k).abs());
            }
            x += 0.05;
        }
        worst
    }

    #[test]
    fn kink_examples() {
        assert_relative_eq!(kink(3.0, 0.0, 3.0, 0.55, 0, 1).unwrap(), PI, epsilon = 1e-15);
        assert_relative_eq!(kink(60.0, 0.0, 0.0, 0.55, 0, 1).unwrap(), 2.0 * PI, epsilon = 1e-12);
        assert!(kink(-60.0, 0.0, 0.0, 0.55, 0, 1).unwrap().abs() < 1e-12);
        let s = (1.0f64 - 0.55 * 0.55).sqrt();
        let v = kink(s, 0.0, 0.0, 0.55, 0, 1).unwrap();
        // 4 atan(e) evaluated independently from its series-free closed form
        let want = 2.0 * PI - 4.0 * (1.0 / std::f64::consts::E).atan();
        assert_relative_eq!(v, want, epsilon = 1e-14);
        assert_relative_eq!(v, 4.873_131_620_069_111, epsilon = 1e-12);
        assert!(kink(0.0, 0.0, 0.0, 1.0, 0, 1).is_err());
    }

    #[test]
    fn pair_examples() {
        let (u, d) = (0.55, 22.0);
        let t = d / (2.0 * u);
        for x in [-30.0, -1.0, 0.0, 4.0, 17.0] {
            assert_eq!(kink_antikink(x, t, 0.0, u, d).unwrap(), 0.0);
        }
        assert!(kink_antikink(200.0, 0.0, 0.0, u, d).unwrap().abs() < 1e-12);
        assert!(kink_antikink(-200.0, 0.0, 0.0, u, d).unwrap().abs() < 1e-12);
        assert!(kink_antikink(0.0, 0.0, 0.0, 0.0, d).is_err());
        // the kink of the pair is on the left
        let phi_mid = kink_antikink(0.0, 0.0, 0.0, u, d).unwrap();
        assert!(phi_mid > 1.9 * PI);
    }

    #[test]
    fn breather_examples() {
        let nu = 0.7;
        for x in [-3.0, 0.0, 5.0] {
            assert_eq!(breather(x, 2.0, nu, 0.0, 2.0).unwrap(), 0.0);
        }
        let tpk = 0.5 * PI / nu.cos();
        assert_relative_eq!(breather(0.0, tpk, nu, 0.0, 0.0).unwrap(), 4.0 * nu, epsilon = 1e-14);
        assert!(breather(0.0, 0.0, 1.6, 0.0, 0.0).is_err());
        assert!(breather(0.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn breather_frequency_is_cos_nu() {
        let nu = 0.9;
        let mut ups = Vec::new();
        let dt = 1e-3;
        let mut prev = breather(0.0, 0.05, nu, 0.0, 0.0).unwrap();
        let mut t = 0.05;
        while t < 60.0 {
            let cur = breather(0.0, t + dt, nu, 0.0, 0.0).unwrap();
            if prev < 0.0 && cur >= 0.0 {
                ups.push(t + dt * (-prev) / (cur - prev));
            }
            prev = cur;
            t += dt;
        }
        let period = (ups[ups.len() - 1] - ups[0]) / (ups.len() - 1) as f64;
        assert_relative_eq!(2.0 * PI / period, nu.cos(), epsilon = 1e-5);
    }

    #[test]
    fn families_solve_sine_gordon_at_second_order() {
        let fams: Vec<Box<dyn Fn(f64, f64) -> f64>> = vec![
            Box::new(|x, t| kink(x, t, 0.5, 0.55, 0, 1).unwrap()),
            Box::new(|x, t| kink_antikink(x, t, 0.0, 0.55, 6.0).unwrap()),
            Box::new(|x, t| boosted_breather(x, t, 0.8, 0.0, 0.0, 0.3).unwrap()),
        ];
        for f in &fams {
            let r1 = max_residual(f.as_ref(), 0.04);
            let r2 = max_residual(f.as_ref(), 0.02);
            let c1 = r1 / 0.04f64.powi(2);
            let c2 = r2 / 0.02f64.powi(2);
            assert!(r2 < r1, "{r1} {r2}");
            assert!((c1 / c2 - 1.0).abs() < 0.1, "C not stable: {c1} vs {c2}");
        }
    }

    #[test]
    fn kink_energy_quadrature() {
        for u in [0.0, 0.55] {
            let ic = InitialCondition::Kink {
                x0: 0.0,
                u,
                n: 0,
                polarity: 1,
            };
            let h = 1e-3;
            let mut e = 0.0;
            let mut x = -40.0;
            while x < 40.0 {
                let px = (ic.phi(x + 1e-6, 0.0) - ic.phi(x - 1e-6, 0.0)) / 2e-6;
                let pt = ic.velocity(x);
                e += h * (0.5 * px * px + 0.5 * pt * pt + 1.0 - ic.phi(x, 0.0).cos());
                x += h;
            }
            assert_relative_eq!(e, 8.0 / (1.0 - u * u).sqrt(), max_relative = 1e-6);
        }
    }

    #[test]
    fn winding_and_neutrality() {
        let k = InitialCondition::Kink {
            x0: 0.0,
            u: 0.3,
            n: 0,
            polarity: -1,
        };
        assert_relative_eq!(k.phi(80.0, 0.0) - k.phi(-80.0, 0.0), -2.0 * PI, epsilon = 1e-12);
        let p = InitialCondition::KinkAntikinkPair {
            x0: 0.0,
            u: 0.55,
            d: 22.0,
        };
        assert!((p.phi(150.0, 0.0) - p.phi(-150.0, 0.0)).abs() < 1e-12);
        let b = InitialCondition::Breather {
            nu: 0.6,
            x0: 0.0,
            t0: -1.0,
            u: 0.0,
        };
        assert!((b.phi(80.0, 0.0) - b.phi(-80.0, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn analytic_velocity_matches_numeric() {
        let ic = InitialCondition::Kink {
            x0: 1.0,
            u: -0.7,
            n: 2,
            polarity: -1,
        };
        for x in [-2.0, 0.5, 1.0, 3.0] {
            let num = (ic.phi(x, 1e-6) - ic.phi(x, -1e-6)) / 2e-6;
            assert_relative_eq!(ic.velocity(x), num, epsilon = 1e-7);
        }
    }

    #[test]
    fn validation() {
        assert!(InitialCondition::Kink { x0: 0.0, u: 1.0, n: 0, polarity: 1 }.validate().is_err());
        assert!(InitialCondition::Kink { x0: 0.0, u: 0.2, n: 0, polarity: 2 }.validate().is_err());
        assert!(InitialCondition::KinkAntikinkPair { x0: 0.0, u: 0.0, d: 1.0 }.validate().is_err());
        assert!(InitialCondition::Breather { nu: 2.0, x0: 0.0, t0: 0.0, u: 0.0 }.validate().is_err());
        assert!(InitialCondition::Zero.validate().is_ok());
    }

    proptest! {
        #[test]
        fn boost_is_composition(x in -20.0f64..20.0, t in -10.0f64..10.0,
                                u in -0.9f64..0.9, nu in 0.1f64..1.5) {
            let (xb, tb) = lorentz(x, t, u);
            let direct = boosted_breather(x, t, nu, 0.0, 0.0, u).unwrap();
            let composed = breather(xb, tb, nu, 0.0, 0.0).unwrap();
            prop_assert_eq!(direct, composed);
        }

        #[test]
        fn kink_is_monotone_with_polarity(u in -0.95f64..0.95, a in -30.0f64..30.0, b in -30.0f64..30.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let k1 = kink(lo, 0.0, 0.0, u, 0, 1).unwrap();
            let k2 = kink(hi, 0.0, 0.0, u, 0, 1).unwrap();
            prop_assert!(k2 >= k1);
            prop_assert!((0.0..=2.0 * PI).contains(&k1));
        }
    }
}
