//! UAV-centric strategy: a UAV at the origin serves a near user within
//! `R/4` and a far user in `[R/4, R/2]`, where `R` is the distance to the
//! nearest other UAV.

use std::f64::consts::PI;

use crate::analytic::exclusion::{DiscExclusionExponent, PointInterferer};
use crate::analytic::user_centric::LaplaceExponent;
use crate::analytic::{
    conditional_coverage, coverage_from_exponent, integrate_fallible, integrate_nearest_distance, laplace_argument,
    DesiredLink, InterferenceExponent,
};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::scenario::{thresholds, Access, Coeff, NetworkConfig, NomaLink, Strategy, ThresholdSet};
use crate::specfun::{binomial, rising_pochhammer};

const INNER_TOL: Tolerance = Tolerance::new(1e-8, 1e-8);
const ANGLE_TOL: Tolerance = Tolerance::new(1e-9, 1e-9);

/// How the interference seen by a UAV-centric user is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighbourModel {
    /// Distances measured from the serving UAV, with the nearest neighbour
    /// folded into the closed hole factor.
    #[default]
    ClosedForm,
    /// Distances measured from the user: the Poisson field outside the
    /// `R` disc around the UAV, plus one neighbour on the circle of radius
    /// `R` at a uniform bearing.
    ExactGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairUser {
    /// Near user `w`, `r ≤ R/4`.
    Near,
    /// Far user `v`, `R/4 ≤ r ≤ R/2`.
    Far,
}

impl PairUser {
    pub fn as_str(self) -> &'static str {
        match self {
            PairUser::Near => "near",
            PairUser::Far => "far",
        }
    }

    /// Allowed horizontal distance range given neighbour distance `R`.
    pub fn range(self, big_r: f64) -> (f64, f64) {
        match self {
            PairUser::Near => (0.0, 0.25 * big_r),
            PairUser::Far => (0.25 * big_r, 0.5 * big_r),
        }
    }

    fn coeff(self, thr: &ThresholdSet) -> Coeff {
        match self {
            PairUser::Near => thr.near(),
            PairUser::Far => thr.far(),
        }
    }
}

/// Interference exponent given the nearest other UAV at horizontal
/// distance `R`: a Poisson tail beyond `l_I = √(R² + h²)` plus a hole term
/// for the neighbour itself,
/// `η_hole(s) = (l_I/R) (1 − (1 + s P / (m_I l_I^{α_I}))^{−m_I})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleLaplaceExponent {
    pub tail: LaplaceExponent,
    pub big_r: f64,
    pub l_i: f64,
    pub include_hole: bool,
}

impl HoleLaplaceExponent {
    pub fn new(cfg: &NetworkConfig, big_r: f64) -> Result<Self> {
        if !(big_r > 0.0) || !big_r.is_finite() {
            return Err(Error::domain(format!("neighbour distance must be finite and > 0, got {big_r}")));
        }
        let l_i = big_r.hypot(cfg.uav_height);
        Ok(HoleLaplaceExponent {
            tail: LaplaceExponent::new(cfg, l_i),
            big_r,
            l_i,
            include_hole: true,
        })
    }

    /// The same field with the neighbour removed.
    pub fn without_hole(self) -> Self {
        HoleLaplaceExponent {
            include_hole: false,
            ..self
        }
    }

    fn hole_c(&self) -> f64 {
        self.tail.tx_power / (self.tail.m_interf as f64 * self.l_i.powf(self.tail.alpha_interf))
    }

    fn weight(&self) -> f64 {
        self.l_i / self.big_r
    }

    /// Hole exponent and its derivatives, from the closed form.
    pub fn hole_derivatives(&self, s: f64, order: usize) -> Vec<f64> {
        let m = self.tail.m_interf as f64;
        let c = self.hole_c();
        let w = self.weight();
        (0..=order)
            .map(|k| {
                if k == 0 {
                    -w * (-m * (c * s).ln_1p()).exp_m1()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    w * sign * rising_pochhammer(m, k) * c.powi(k as i32) * (1.0 + c * s).powf(-m - k as f64)
                }
            })
            .collect()
    }

    /// `exp(−η_hole(s))`.
    pub fn hole_factor(&self, s: f64) -> f64 {
        (-self.hole_derivatives(s, 0)[0]).exp()
    }

    /// Hole exponent from the annulus `[l_I − ε, l_I + ε]` with the kernel
    /// evaluated at each radius, normalised by the annulus area
    /// `4πRε`. Tends to the closed form as `ε → 0`.
    pub fn hole_exponent_annulus(&self, s: f64, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < self.l_i) {
            return Err(Error::domain(format!("annulus half-width must lie in (0, l_I), got {eps}")));
        }
        let m = self.tail.m_interf as f64;
        let p = self.tail.tx_power;
        let a = self.tail.alpha_interf;
        let q = integrate(
            |u: f64| -(-m * (s * p / (m * u.powf(a))).ln_1p()).exp_m1() * u,
            self.l_i - eps,
            self.l_i + eps,
            Tolerance::new(1e-300, 1e-13),
        )?;
        Ok(q.value / (2.0 * self.big_r * eps))
    }

    /// Partial sum over `U < terms` of the Newton series
    /// `(1 + x)^{−m_I} = Σ_U (−1)^U C(m_I + U − 1, U) x^U`, `x < 1`.
    pub fn hole_exponent_newton(&self, s: f64, terms: usize) -> f64 {
        let mi = self.tail.m_interf as usize;
        let x = self.hole_c() * s;
        let mut sum = 0.0;
        let mut xp = 1.0;
        for u in 0..terms {
            let sign = if u % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binomial(mi + u - 1, u) * xp;
            xp *= x;
        }
        self.weight() * (1.0 - sum)
    }
}

/// Hole factor for Rayleigh interferers as an elementary expression:
/// `exp(−(l_I/R) · sP / (l_I^{α_I} + sP))`.
pub fn rayleigh_hole_factor(s: f64, tx_power: f64, alpha_interf: f64, l_i: f64, big_r: f64) -> f64 {
    let sp = s * tx_power;
    (-(l_i / big_r) * sp / (l_i.powf(alpha_interf) + sp)).exp()
}

impl InterferenceExponent for HoleLaplaceExponent {
    fn derivatives(&self, s: f64, order: usize) -> Result<Vec<f64>> {
        let mut d = self.tail.derivatives(s, order)?;
        if self.include_hole {
            for (a, b) in d.iter_mut().zip(self.hole_derivatives(s, order)) {
                *a += b;
            }
        }
        Ok(d)
    }
}

/// Coverage of `user` at horizontal distance `r` from its UAV, with the
/// nearest other UAV at `big_r`.
pub fn coverage_cond_pair(r: f64, big_r: f64, user: PairUser, cfg: &NetworkConfig, thr: &ThresholdSet) -> Result<f64> {
    let (lo, hi) = user.range(big_r);
    let slack = 1e-9 * big_r;
    if !(r >= lo - slack && r <= hi + slack) {
        return Err(Error::domain(format!(
            "{} user must lie in [{lo}, {hi}] for R = {big_r}, got {r}",
            user.as_str()
        )));
    }
    coverage_cond_pair_with(r, user, cfg, thr, &HoleLaplaceExponent::new(cfg, big_r)?)
}

fn desired(r: f64, user: PairUser, cfg: &NetworkConfig, thr: &ThresholdSet) -> DesiredLink {
    DesiredLink {
        m: cfg.m_desired,
        coeff: user.coeff(thr),
        dist3d: r.hypot(cfg.uav_height),
        alpha: cfg.alpha_desired,
        noise: cfg.noise_power,
    }
}

fn coverage_cond_pair_with(
    r: f64,
    user: PairUser,
    cfg: &NetworkConfig,
    thr: &ThresholdSet,
    exponent: &HoleLaplaceExponent,
) -> Result<f64> {
    conditional_coverage(&desired(r, user, cfg, thr), exponent)
}

/// [`coverage_cond_pair`] under [`NeighbourModel::ExactGeometry`].
pub fn coverage_cond_pair_exact(
    r: f64,
    big_r: f64,
    user: PairUser,
    cfg: &NetworkConfig,
    thr: &ThresholdSet,
) -> Result<f64> {
    let link = desired(r, user, cfg, thr);
    let Some(s) = laplace_argument(&link)? else {
        return Ok(0.0);
    };
    let order = (cfg.m_desired - 1) as usize;
    let field = DiscExclusionExponent::new(cfg, r, big_r)?.derivatives(s, order)?;
    let h_sq = cfg.uav_height * cfg.uav_height;
    let total = integrate_fallible(
        |phi: f64| {
            let neighbour = PointInterferer {
                tx_power: cfg.tx_power,
                alpha_interf: cfg.alpha_interf,
                m_interf: cfg.m_interf,
                dist3d: (r * r + big_r * big_r - 2.0 * r * big_r * phi.cos() + h_sq).sqrt(),
            };
            let eta: Vec<f64> = field
                .iter()
                .zip(neighbour.derivatives(s, order)?)
                .map(|(a, b)| a + b)
                .collect();
            coverage_from_exponent(&link, s, &eta)
        },
        0.0,
        PI,
        ANGLE_TOL,
    )?;
    Ok(total / PI)
}

/// Horizontal distance at quantile `t` of the placement density.
fn placement_quantile(user: PairUser, big_r: f64, t: f64) -> f64 {
    match user {
        PairUser::Near => 0.25 * big_r * t.sqrt(),
        PairUser::Far => 0.25 * big_r * (1.0 + 3.0 * t).sqrt(),
    }
}

/// `∫ P(r | R) f(r | R) dr` over the user's placement density.
pub fn coverage_given_neighbour(
    big_r: f64,
    user: PairUser,
    cfg: &NetworkConfig,
    thr: &ThresholdSet,
    model: NeighbourModel,
) -> Result<f64> {
    match model {
        NeighbourModel::ClosedForm => {
            let exponent = HoleLaplaceExponent::new(cfg, big_r)?;
            average_over_placement(user, big_r, |r| coverage_cond_pair_with(r, user, cfg, thr, &exponent))
        }
        NeighbourModel::ExactGeometry => {
            average_over_placement(user, big_r, |r| coverage_cond_pair_exact(r, big_r, user, cfg, thr))
        }
    }
}

fn average_over_placement<G: Fn(f64) -> Result<f64>>(user: PairUser, big_r: f64, g: G) -> Result<f64> {
    integrate_fallible(|t| g(placement_quantile(user, big_r, t)), 0.0, 1.0, INNER_TOL)
}

/// Coverage of `user` averaged over its placement and the neighbour
/// distance `R`.
pub fn coverage_pair(user: PairUser, cfg: &NetworkConfig, link: &NomaLink, access: Access) -> Result<f64> {
    coverage_pair_with(user, cfg, link, access, NeighbourModel::ClosedForm)
}

pub fn coverage_pair_with(
    user: PairUser,
    cfg: &NetworkConfig,
    link: &NomaLink,
    access: Access,
    model: NeighbourModel,
) -> Result<f64> {
    cfg.validate()?;
    link.validate()?;
    let thr = thresholds(link, cfg, Strategy::UavCentric, access);
    if !user.coeff(&thr).is_feasible() {
        return Ok(0.0);
    }
    integrate_nearest_distance(cfg.uav_density, 0.0, |big_r| {
        if big_r == 0.0 {
            return Ok(0.0);
        }
        coverage_given_neighbour(big_r, user, cfg, &thr, model)
    })
}
