//! User-centric strategy: a typical user at the origin joins its nearest
//! UAV, which already serves a fixed user at horizontal distance `r_k`.

use std::f64::consts::PI;

use crate::analytic::exclusion::DiscExclusionExponent;
use crate::analytic::{
    conditional_coverage, integrate_fallible, integrate_nearest_distance, DesiredLink, InterferenceExponent,
};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::scenario::{thresholds, Access, NetworkConfig, NomaLink, PairCase, Strategy, ThresholdSet};
use crate::specfun::{binomial, gauss_2f1_negz, incomplete_beta_neg, rising_pochhammer};

/// Largest `z` at which the power series is attempted before going
/// straight to quadrature.
pub const SERIES_Z_LIMIT: f64 = 0.75;
pub const SERIES_MAX_TERMS: usize = 200;
const SERIES_REL_TOL: f64 = 1e-12;
const KERNEL_TOL: Tolerance = Tolerance::new(1e-300, 1e-12);
const ANGLE_TOL: Tolerance = Tolerance::new(1e-9, 1e-9);

/// Interference model for the fixed user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FixedUserInterference {
    /// The fixed user sees the typical user's field: Poisson interferers
    /// beyond the typical user's serving distance, measured from itself.
    SharedExclusion,
    /// The interferer-free disc stays centred on the typical user, so the
    /// fixed user sits off-centre; averaged over its bearing.
    #[default]
    ExactGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentMethod {
    Series,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEval {
    /// `[η, η′, …]`.
    pub derivs: Vec<f64>,
    pub method: ExponentMethod,
}

/// Exponent of a Poisson field of Nakagami-`m_I` interferers whose 3-D
/// distances exceed `lower`:
///
/// `η(s) = 2πλ ∫_lower^∞ (1 − (1 + s P u^{−α_I} / m_I)^{−m_I}) u du`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceExponent {
    pub density: f64,
    pub tx_power: f64,
    pub alpha_interf: f64,
    pub m_interf: u32,
    pub lower: f64,
    /// Forces one evaluation route; `None` picks automatically.
    pub method: Option<ExponentMethod>,
}

impl LaplaceExponent {
    pub fn new(cfg: &NetworkConfig, lower: f64) -> Self {
        LaplaceExponent {
            density: cfg.uav_density,
            tx_power: cfg.tx_power,
            alpha_interf: cfg.alpha_interf,
            m_interf: cfg.m_interf,
            lower,
            method: None,
        }
    }

    pub fn with_method(self, method: ExponentMethod) -> Self {
        LaplaceExponent {
            method: Some(method),
            ..self
        }
    }

    fn delta(&self) -> f64 {
        2.0 / self.alpha_interf
    }

    /// `κ = P / (m_I lower^{α_I})`.
    fn kappa(&self) -> f64 {
        self.tx_power / (self.m_interf as f64 * self.lower.powf(self.alpha_interf))
    }

    /// Series argument `z = κ s`; the series converges for `z < 1`.
    pub fn series_argument(&self, s: f64) -> f64 {
        self.kappa() * s
    }

    fn check(&self, s: f64) -> Result<()> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("Laplace argument must be finite and >= 0, got {s}")));
        }
        if !(self.lower > 0.0) {
            return Err(Error::domain(format!("exclusion distance must be > 0, got {}", self.lower)));
        }
        Ok(())
    }

    pub fn evaluate(&self, s: f64, order: usize) -> Result<ExponentEval> {
        self.check(s)?;
        let method = self.method.unwrap_or(if self.series_argument(s) < SERIES_Z_LIMIT {
            ExponentMethod::Series
        } else {
            ExponentMethod::Quadrature
        });
        match method {
            ExponentMethod::Series => match self.series(s, order) {
                Ok(derivs) => Ok(ExponentEval { derivs, method }),
                Err(Error::Numerical { .. }) if self.method.is_none() => Ok(ExponentEval {
                    derivs: self.quadrature(s, order)?,
                    method: ExponentMethod::Quadrature,
                }),
                Err(e) => Err(e),
            },
            ExponentMethod::Quadrature => Ok(ExponentEval {
                derivs: self.quadrature(s, order)?,
                method,
            }),
        }
    }

    /// Term-wise differentiated Pochhammer series
    /// `η = (2πλ lower²/α_I) Σ_{j≥1} (−1)^{j+1} (m_I)_j z^j / (j! (j − δ))`.
    pub fn series(&self, s: f64, order: usize) -> Result<Vec<f64>> {
        self.check(s)?;
        let z = self.series_argument(s);
        if z >= 1.0 {
            return Err(Error::Numerical {
                what: "interference exponent series (outside convergence disc)",
                estimate: z,
            });
        }
        let m = self.m_interf as f64;
        let delta = self.delta();
        let base = 2.0 * PI * self.density * self.lower * self.lower / self.alpha_interf;
        let kappa = self.kappa();
        (0..=order)
            .map(|k| {
                let j0 = k.max(1);
                // (m)_j / (j − k)!
                let mut coeff = rising_pochhammer(m, j0) / crate::specfun::factorial(j0 - k);
                let mut zpow = z.powi((j0 - k) as i32);
                let mut sum = 0.0;
                for j in j0..j0 + SERIES_MAX_TERMS {
                    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                    let term = sign * coeff * zpow / (j as f64 - delta);
                    sum += term;
                    let jf = j as f64;
                    coeff *= (m + jf) / (jf + 1.0 - k as f64);
                    zpow *= z;
                    let next = coeff * zpow / (jf + 1.0 - delta);
                    if next.abs() <= SERIES_REL_TOL * sum.abs() || zpow == 0.0 {
                        return Ok(base * kappa.powi(k as i32) * sum);
                    }
                }
                Err(Error::Numerical {
                    what: "interference exponent series (term cap)",
                    estimate: (coeff * zpow).abs(),
                })
            })
            .collect()
    }

    /// Differentiates under the integral. With `x = (lower/u)^{α_I}` and
    /// `y = x^{1−δ}` the range becomes `y ∈ (0, 1]` and the integrand is
    /// bounded.
    pub fn quadrature(&self, s: f64, order: usize) -> Result<Vec<f64>> {
        self.check(s)?;
        let m = self.m_interf as f64;
        let delta = self.delta();
        let expo = 1.0 / (1.0 - delta);
        let z = self.series_argument(s);
        let kappa = self.kappa();
        let base = 2.0 * PI * self.density * self.lower * self.lower / (self.alpha_interf * (1.0 - delta));
        (0..=order)
            .map(|k| {
                let q = if k == 0 {
                    integrate(
                        |y: f64| {
                            let x = y.powf(expo);
                            if x == 0.0 {
                                return m * z;
                            }
                            -(-m * (z * x).ln_1p()).exp_m1() / x
                        },
                        0.0,
                        1.0,
                        KERNEL_TOL,
                    )?
                } else {
                    let ki = k as i32;
                    integrate(
                        |y: f64| {
                            let x = y.powf(expo);
                            x.powi(ki - 1) * (1.0 + z * x).powf(-m - k as f64)
                        },
                        0.0,
                        1.0,
                        KERNEL_TOL,
                    )?
                };
                let scale = if k == 0 {
                    1.0
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign * rising_pochhammer(m, k) * kappa.powi(k as i32)
                };
                Ok(base * scale * q.value)
            })
            .collect()
    }

    /// `η(s)` through lower incomplete Beta integrals:
    /// `(2πλ/α_I) (sP/m_I)^δ Σ_{i=1}^{m_I} C(m_I, i) ∫_0^z τ^{i−δ−1} (1+τ)^{−m_I} dτ`.
    pub fn incomplete_beta_form(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        if s == 0.0 {
            return Ok(0.0);
        }
        let mi = self.m_interf as usize;
        let delta = self.delta();
        let z = self.series_argument(s);
        let a = s * self.tx_power / self.m_interf as f64;
        let mut sum = 0.0;
        for i in 1..=mi {
            let j = -incomplete_beta_neg(-z, i as f64 - delta, 1.0 - mi as f64)?;
            sum += binomial(mi, i) * j;
        }
        Ok(2.0 * PI * self.density / self.alpha_interf * a.powf(delta) * sum)
    }
}

impl InterferenceExponent for LaplaceExponent {
    fn derivatives(&self, s: f64, order: usize) -> Result<Vec<f64>> {
        Ok(self.evaluate(s, order)?.derivs)
    }
}

/// Rayleigh interferers with `α_I = 4`: `η(s) = πλ √(sP) arctan(√(sP) / r_t²)`.
pub fn arctan_exponent(s: f64, tx_power: f64, density: f64, r_t: f64) -> f64 {
    let q = (s * tx_power).sqrt();
    PI * density * q * (q / (r_t * r_t)).atan()
}

/// Rayleigh interferers, any `α_I > 2`:
/// `η(s) = 2πλ sP r_t^{2−α_I} / (α_I (1−δ)) · ₂F₁(1, 1−δ; 2−δ; −sP r_t^{−α_I})`.
pub fn hypergeometric_exponent(s: f64, tx_power: f64, density: f64, alpha_interf: f64, r_t: f64) -> Result<f64> {
    let delta = 2.0 / alpha_interf;
    let sp = s * tx_power;
    let f = gauss_2f1_negz(1.0, 1.0 - delta, 2.0 - delta, -sp * r_t.powf(-alpha_interf))?;
    Ok(2.0 * PI * density * sp * r_t.powf(2.0 - alpha_interf) / (alpha_interf * (1.0 - delta)) * f)
}

fn serving_dist3d(r: f64, cfg: &NetworkConfig) -> f64 {
    r.hypot(cfg.uav_height)
}

/// Typical-user coverage with its serving UAV at horizontal distance `r`.
/// `case` selects the near or far SIC role; OMA ignores it.
pub fn coverage_cond(r: f64, case: PairCase, cfg: &NetworkConfig, thr: &ThresholdSet) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("serving distance must be >= 0, got {r}")));
    }
    let r_t = serving_dist3d(r, cfg);
    let link = DesiredLink {
        m: cfg.m_desired,
        coeff: thr.typical(case),
        dist3d: r_t,
        alpha: cfg.alpha_desired,
        noise: cfg.noise_power,
    };
    conditional_coverage(&link, &LaplaceExponent::new(cfg, r_t))
}

/// Fixed-user coverage given the typical user's serving distance `r`.
/// The fixed user is the far user when `r < r_k`.
pub fn coverage_cond_fixed(
    r: f64,
    cfg: &NetworkConfig,
    link: &NomaLink,
    thr: &ThresholdSet,
    model: FixedUserInterference,
) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("serving distance must be >= 0, got {r}")));
    }
    let r_k = link.fixed_user_horiz_dist;
    let desired = DesiredLink {
        m: cfg.m_desired,
        coeff: thr.fixed(role_of_typical(r, link)),
        dist3d: serving_dist3d(r_k, cfg),
        alpha: cfg.alpha_desired,
        noise: cfg.noise_power,
    };
    if !desired.coeff.is_feasible() {
        return Ok(0.0);
    }
    match model {
        FixedUserInterference::SharedExclusion => {
            conditional_coverage(&desired, &LaplaceExponent::new(cfg, serving_dist3d(r, cfg)))
        }
        FixedUserInterference::ExactGeometry => {
            let total = integrate_fallible(
                |theta: f64| {
                    let offset = (r * r + r_k * r_k + 2.0 * r * r_k * theta.cos()).max(0.0).sqrt();
                    conditional_coverage(&desired, &DiscExclusionExponent::new(cfg, offset, r)?)
                },
                0.0,
                PI,
                ANGLE_TOL,
            )?;
            Ok(total / PI)
        }
    }
}

/// Role of the typical user for serving distance `r`.
pub fn role_of_typical(r: f64, link: &NomaLink) -> PairCase {
    if r < link.fixed_user_horiz_dist {
        PairCase::Near
    } else {
        PairCase::Far
    }
}

/// Typical-user coverage averaged over the nearest-UAV distance.
pub fn coverage_typical(cfg: &NetworkConfig, link: &NomaLink, access: Access) -> Result<f64> {
    cfg.validate()?;
    link.validate()?;
    let thr = thresholds(link, cfg, Strategy::UserCentric, access);
    if !thr.any_feasible() {
        return Ok(0.0);
    }
    integrate_nearest_distance(cfg.uav_density, link.fixed_user_horiz_dist, |r| {
        coverage_cond(r, role_of_typical(r, link), cfg, &thr)
    })
}

/// Fixed-user coverage averaged over the typical user's serving distance.
pub fn coverage_fixed(cfg: &NetworkConfig, link: &NomaLink, access: Access) -> Result<f64> {
    coverage_fixed_with(cfg, link, access, FixedUserInterference::default())
}

pub fn coverage_fixed_with(
    cfg: &NetworkConfig,
    link: &NomaLink,
    access: Access,
    model: FixedUserInterference,
) -> Result<f64> {
    cfg.validate()?;
    link.validate()?;
    let thr = thresholds(link, cfg, Strategy::UserCentric, access);
    if !thr.any_feasible() {
        return Ok(0.0);
    }
    integrate_nearest_distance(cfg.uav_density, link.fixed_user_horiz_dist, |r| {
        coverage_cond_fixed(r, cfg, link, &thr, model)
    })
}
