//! Interference exponents for receivers that are not at the centre of the
//! interferer-free region.
//!
//! The closed forms assume the receiver sits where the exclusion disc is
//! centred. Here the disc of radius `a` is centred at horizontal distance
//! `ρ` from the receiver, which is the exact geometry seen by a fixed user
//! (disc around the typical user) and by a UAV-centric user (disc around
//! its own UAV).

use std::f64::consts::PI;

use crate::analytic::user_centric::LaplaceExponent;
use crate::analytic::InterferenceExponent;
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::scenario::NetworkConfig;
use crate::specfun::{factorial, rising_pochhammer};

const RING_REL_TOL: f64 = 1e-10;

/// `d^k/ds^k [1 − (1 + c s)^{−m}]` with `c = P / (m u^{α_I})`.
fn kernel(k: usize, s: f64, c: f64, m: f64) -> f64 {
    if k == 0 {
        -(-m * (c * s).ln_1p()).exp_m1()
    } else {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sign * rising_pochhammer(m, k) * c.powi(k as i32) * (1.0 + c * s).powf(-m - k as f64)
    }
}

/// Poisson interferers outside a horizontal disc of radius `radius`
/// centred `offset` metres from the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscExclusionExponent {
    pub density: f64,
    pub tx_power: f64,
    pub alpha_interf: f64,
    pub m_interf: u32,
    pub height: f64,
    pub offset: f64,
    pub radius: f64,
}

impl DiscExclusionExponent {
    pub fn new(cfg: &NetworkConfig, offset: f64, radius: f64) -> Result<Self> {
        if !(offset >= 0.0 && radius >= 0.0) || !offset.is_finite() || !radius.is_finite() {
            return Err(Error::domain(format!(
                "disc offset and radius must be finite and >= 0, got {offset} and {radius}"
            )));
        }
        Ok(DiscExclusionExponent {
            density: cfg.uav_density,
            tx_power: cfg.tx_power,
            alpha_interf: cfg.alpha_interf,
            m_interf: cfg.m_interf,
            height: cfg.uav_height,
            offset,
            radius,
        })
    }

    fn coeff(&self, t: f64) -> f64 {
        let u_sq = t * t + self.height * self.height;
        self.tx_power / (self.m_interf as f64 * u_sq.powf(0.5 * self.alpha_interf))
    }

    /// Angle of the circle of radius `t` around the receiver that lies
    /// outside the disc.
    fn outside_angle(&self, t: f64) -> f64 {
        let (rho, a) = (self.offset, self.radius);
        let cos = ((t * t + rho * rho - a * a) / (2.0 * t * rho)).clamp(-1.0, 1.0);
        2.0 * PI - 2.0 * cos.acos()
    }

    fn ring(&self, s: f64, k: usize, tol: Tolerance) -> Result<f64> {
        let lo = (self.offset - self.radius).abs();
        let hi = self.offset + self.radius;
        if hi <= lo || self.offset == 0.0 {
            return Ok(0.0);
        }
        let m = self.m_interf as f64;
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        // t = mid − half cos ψ removes the square-root edges of the angle.
        let q = integrate(
            |psi: f64| {
                let t = mid - half * psi.cos();
                kernel(k, s, self.coeff(t), m) * self.outside_angle(t) * t * half * psi.sin()
            },
            0.0,
            PI,
            tol,
        )?;
        Ok(self.density * q.value)
    }

    fn inner(&self, s: f64, k: usize, tol: Tolerance) -> Result<f64> {
        let hi = self.offset - self.radius;
        if hi <= 0.0 {
            return Ok(0.0);
        }
        let m = self.m_interf as f64;
        let q = integrate(|t: f64| kernel(k, s, self.coeff(t), m) * t, 0.0, hi, tol)?;
        Ok(2.0 * PI * self.density * q.value)
    }
}

impl InterferenceExponent for DiscExclusionExponent {
    fn derivatives(&self, s: f64, order: usize) -> Result<Vec<f64>> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("Laplace argument must be finite and >= 0, got {s}")));
        }
        let far = (self.offset + self.radius).hypot(self.height);
        let tail = LaplaceExponent {
            density: self.density,
            tx_power: self.tx_power,
            alpha_interf: self.alpha_interf,
            m_interf: self.m_interf,
            lower: far,
            method: None,
        };
        let mut d = tail.derivatives(s, order)?;
        for (k, v) in d.iter_mut().enumerate() {
            // Scale the absolute target by the tail term, which bounds the
            // magnitude of the whole exponent from below.
            let tol = Tolerance::new(1e-12 * v.abs() / self.density + 1e-300, RING_REL_TOL);
            *v += self.ring(s, k, tol)? + self.inner(s, k, tol)?;
        }
        Ok(d)
    }
}

/// A single Nakagami-`m_I` interferer at 3-D distance `dist3d`:
/// `η(s) = m_I ln(1 + c s)`, `c = P / (m_I d^{α_I})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointInterferer {
    pub tx_power: f64,
    pub alpha_interf: f64,
    pub m_interf: u32,
    pub dist3d: f64,
}

impl InterferenceExponent for PointInterferer {
    fn derivatives(&self, s: f64, order: usize) -> Result<Vec<f64>> {
        let m = self.m_interf as f64;
        let c = self.tx_power / (m * self.dist3d.powf(self.alpha_interf));
        Ok((0..=order)
            .map(|k| {
                if k == 0 {
                    m * (c * s).ln_1p()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    m * sign * factorial(k - 1) * (c / (1.0 + c * s)).powi(k as i32)
                }
            })
            .collect())
    }
}
