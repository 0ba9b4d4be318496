//! Closed-form coverage evaluation.
//!
//! Every conditional coverage probability in both strategies has the same
//! shape. With Nakagami-m desired fading, unit-mean power gain `g`, and a
//! decoding coefficient `M`, success means `g > M (σ² + I) d^α`. Writing
//! `s = m M d^α` and `L_I(s) = exp(−η(s))`,
//!
//! ```text
//! P = Σ_{n<m} (−s)^n / n! · dⁿ/dsⁿ exp(−φ(s)),   φ(s) = s σ² + η(s)
//! ```
//!
//! so the only model-specific ingredient is the interference exponent `η`
//! and its first `m − 1` derivatives, supplied through
//! [`InterferenceExponent`].

pub mod exclusion;
pub mod uav_centric;
pub mod user_centric;

use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::scenario::Coeff;
use crate::specfun::{exp_composition_derivatives, factorial};

/// The exponent `η(s) = −ln E[e^{−sI}]` of an interference field.
pub trait InterferenceExponent {
    /// `[η(s), η′(s), …, η^{(order)}(s)]`.
    fn derivatives(&self, s: f64, order: usize) -> Result<Vec<f64>>;

    fn value(&self, s: f64) -> Result<f64> {
        Ok(self.derivatives(s, 0)?[0])
    }

    /// `L_I(s) = exp(−η(s))`.
    fn laplace(&self, s: f64) -> Result<f64> {
        Ok((-self.value(s)?).exp())
    }
}

/// Desired-link quantities for one conditional coverage evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredLink {
    pub m: u32,
    pub coeff: Coeff,
    pub dist3d: f64,
    pub alpha: f64,
    pub noise: f64,
}

/// `P(g > M (σ² + I) d^α)` for `g ~ Gamma(m, 1/m)`. Exactly 0 when the
/// coefficient is infeasible.
pub fn conditional_coverage<E: InterferenceExponent + ?Sized>(link: &DesiredLink, exponent: &E) -> Result<f64> {
    let Some(s) = laplace_argument(link)? else {
        return Ok(0.0);
    };
    let eta = exponent.derivatives(s, (link.m - 1) as usize)?;
    coverage_from_exponent(link, s, &eta)
}

/// `s = m M d^α`, or `None` for an infeasible coefficient.
pub fn laplace_argument(link: &DesiredLink) -> Result<Option<f64>> {
    if link.m == 0 {
        return Err(Error::domain("fading parameter m must be >= 1"));
    }
    Ok(match link.coeff {
        Coeff::Feasible(big_m) => Some(link.m as f64 * big_m * link.dist3d.powf(link.alpha)),
        Coeff::Infeasible => None,
    })
}

/// Coverage from `[η(s), …, η^{(m−1)}(s)]` already evaluated at
/// `s = m M d^α`.
pub fn coverage_from_exponent(link: &DesiredLink, s: f64, eta: &[f64]) -> Result<f64> {
    let order = (link.m - 1) as usize;
    if eta.len() <= order {
        return Err(Error::domain(format!("need {} exponent derivatives, got {}", order + 1, eta.len())));
    }
    let mut phi = eta[..=order].to_vec();
    phi[0] += s * link.noise;
    if order >= 1 {
        phi[1] += link.noise;
    }
    if phi[0] > 745.0 {
        // e^{−φ} underflows and the polynomial factor cannot rescue it.
        return Ok(0.0);
    }
    let d = exp_composition_derivatives(&phi, order)?;
    let mut p = 0.0;
    let mut pow = 1.0;
    for (n, dn) in d.iter().enumerate() {
        p += pow / factorial(n) * dn;
        pow *= -s;
    }
    if !p.is_finite() {
        return Err(Error::Numerical {
            what: "conditional coverage (non-finite sum)",
            estimate: p,
        });
    }
    Ok(p.clamp(0.0, 1.0))
}

pub(crate) const OUTER_TOL: Tolerance = Tolerance::new(1e-7, 1e-9);

/// [`integrate`] for an integrand that can fail; the first error wins.
pub(crate) fn integrate_fallible<G>(g: G, a: f64, b: f64, tol: Tolerance) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let failure = std::cell::Cell::new(None);
    let q = integrate(
        |x| match g(x) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        },
        a,
        b,
        tol,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(q?.value)
}

/// `∫_0^∞ g(r) f_r(r) dr` for the nearest-UAV distance density
/// `f_r(r) = 2πλ r e^{−πλ r²}`, split at `split` where `g` may jump.
///
/// `v = e^{−πλ r²}` maps the half-line onto `(0, 1]` with unit weight.
pub(crate) fn integrate_nearest_distance<G>(density: f64, split: f64, g: G) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let pl = std::f64::consts::PI * density;
    let v_split = (-pl * split * split).exp();
    let mut total = 0.0;
    for (lo, hi) in [(0.0, v_split), (v_split, 1.0)] {
        if hi > lo {
            total += integrate_fallible(|v: f64| g((-v.ln() / pl).sqrt()), lo, hi, OUTER_TOL)?;
        }
    }
    Ok(total)
}
