//! Network and link parameters, unit conversion, and the NOMA threshold
//! algebra shared by the analytic and Monte Carlo paths.
//!
//! All internal quantities are linear (watts, metres). dBm only appears in
//! [`dbm_to_watts`], [`watts_to_dbm`] and [`noise_from_bandwidth`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::DEFAULT_PARTITION_CAP;

/// UAV density used throughout the reference studies: one UAV per
/// `π·500²` square metres.
pub const REFERENCE_DENSITY: f64 = 1.0 / (500.0 * 500.0 * std::f64::consts::PI);

/// Downlink bandwidth of the reference studies, hertz.
pub const REFERENCE_BANDWIDTH_HZ: f64 = 300e3;

/// A denominator `own − residue·ε·other` at or below this fraction of
/// `own` is treated as zero, so boundary cases like `β = 2/3` with a
/// 0.6/0.4 split land on the infeasible side despite rounding.
const FEASIBILITY_SLACK: f64 = 1e-12;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1e3).log10()
}

/// Thermal noise power `−174 + 10·log10(BW)` dBm, returned in watts.
pub fn noise_from_bandwidth(bw_hz: f64) -> Result<f64> {
    if !(bw_hz > 0.0) || !bw_hz.is_finite() {
        return Err(Error::config("bandwidth_hz", format!("must be > 0, got {bw_hz}")));
    }
    Ok(dbm_to_watts(-174.0 + 10.0 * bw_hz.log10()))
}

/// Physical and deployment parameters of the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// UAVs per square metre.
    pub uav_density: f64,
    /// UAV altitude in metres; at least 1 so that no link is shorter than 1 m.
    pub uav_height: f64,
    /// UAV transmit power, watts.
    pub tx_power: f64,
    /// Path-loss exponent of the serving link.
    pub alpha_desired: f64,
    /// Path-loss exponent of interfering links; must exceed 2.
    pub alpha_interf: f64,
    /// Nakagami parameter of the serving link.
    pub m_desired: u32,
    /// Nakagami parameter of interfering links.
    pub m_interf: u32,
    /// Receiver noise power, watts.
    pub noise_power: f64,
    /// Radius of the simulated UAV disc, metres.
    pub sim_disc_radius: f64,
    /// Half-width of the annulus used to isolate the nearest interferer
    /// in the UAV-centric strategy, metres.
    pub hole_halfwidth: f64,
}

impl NetworkConfig {
    /// The reference deployment: 100 m altitude, α = 3, α_I = 4,
    /// Rayleigh links, 300 kHz noise floor, −30 dBm transmit power and
    /// a 10 km simulation disc.
    pub fn reference() -> Self {
        NetworkConfig {
            uav_density: REFERENCE_DENSITY,
            uav_height: 100.0,
            tx_power: dbm_to_watts(-30.0),
            alpha_desired: 3.0,
            alpha_interf: 4.0,
            m_desired: 1,
            m_interf: 1,
            noise_power: noise_from_bandwidth(REFERENCE_BANDWIDTH_HZ).expect("positive bandwidth"),
            sim_disc_radius: 10_000.0,
            hole_halfwidth: 0.1,
        }
    }

    /// `δ_I = 2 / α_I`.
    pub fn delta_interf(&self) -> f64 {
        2.0 / self.alpha_interf
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("uav_density", self.uav_density),
            ("tx_power", self.tx_power),
            ("noise_power", self.noise_power),
            ("sim_disc_radius", self.sim_disc_radius),
            ("hole_halfwidth", self.hole_halfwidth),
            ("alpha_desired", self.alpha_desired),
        ];
        for (field, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(field, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.uav_height >= 1.0) || !self.uav_height.is_finite() {
            return Err(Error::config(
                "uav_height",
                format!("must be at least 1 m, got {}", self.uav_height),
            ));
        }
        if !(self.alpha_interf > 2.0) || !self.alpha_interf.is_finite() {
            return Err(Error::config(
                "alpha_interf",
                format!("must exceed 2 so that 2/alpha_interf < 1, got {}", self.alpha_interf),
            ));
        }
        let max_m = DEFAULT_PARTITION_CAP as u32 + 1;
        for (field, m) in [("m_desired", self.m_desired), ("m_interf", self.m_interf)] {
            if m == 0 || m > max_m {
                return Err(Error::config(field, format!("must be in 1..={max_m}, got {m}")));
            }
        }
        Ok(())
    }
}

/// Power split, target rates and SIC quality of a NOMA pair.
///
/// Rates are named by the UAV-centric roles. In the user-centric strategy
/// the typical user takes `rate_near` and the fixed user `rate_far`,
/// whichever of the two ends up closer to the UAV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NomaLink {
    /// Power fraction of the far user, `α_v²`.
    pub pw_far: f64,
    /// Power fraction of the near user, `α_w² = 1 − α_v²`.
    pub pw_near: f64,
    /// Target rate of the near (UAV-centric) or typical (user-centric) user, BPCU.
    pub rate_near: f64,
    /// Target rate of the far (UAV-centric) or fixed (user-centric) user, BPCU.
    pub rate_far: f64,
    /// Imperfect-SIC residue coefficient β.
    pub ipsic: f64,
    /// Horizontal distance from the fixed user to its UAV, metres
    /// (user-centric only).
    pub fixed_user_horiz_dist: f64,
}

impl NomaLink {
    pub fn new(pw_far: f64, rate_near: f64, rate_far: f64, ipsic: f64, fixed_user_horiz_dist: f64) -> Self {
        NomaLink {
            pw_far,
            pw_near: 1.0 - pw_far,
            rate_near,
            rate_far,
            ipsic,
            fixed_user_horiz_dist,
        }
    }

    /// The 0.6/0.4 split with `R_t = 1`, `R_f = 0.5`, perfect SIC and a
    /// fixed user 300 m out.
    pub fn reference() -> Self {
        NomaLink::new(0.6, 1.0, 0.5, 0.0, 300.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("pw_far", self.pw_far), ("pw_near", self.pw_near)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(field, format!("must lie in [0, 1], got {v}")));
            }
        }
        if ((self.pw_far + self.pw_near) - 1.0).abs() > 1e-12 {
            return Err(Error::config(
                "pw_near",
                format!("power fractions must sum to 1, got {}", self.pw_far + self.pw_near),
            ));
        }
        if !(0.0..=1.0).contains(&self.ipsic) {
            return Err(Error::config("ipsic", format!("must lie in [0, 1], got {}", self.ipsic)));
        }
        for (field, v) in [("rate_near", self.rate_near), ("rate_far", self.rate_far)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(self.fixed_user_horiz_dist >= 0.0) || !self.fixed_user_horiz_dist.is_finite() {
            return Err(Error::config(
                "fixed_user_horiz_dist",
                format!("must be finite and >= 0, got {}", self.fixed_user_horiz_dist),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    UserCentric,
    UavCentric,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::UserCentric => "user-centric",
            Strategy::UavCentric => "uav-centric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Access {
    Noma,
    Oma,
}

impl Access {
    pub fn as_str(self) -> &'static str {
        match self {
            Access::Noma => "noma",
            Access::Oma => "oma",
        }
    }

    /// Linear SINR threshold for a target rate. OMA halves the time each
    /// user gets, so its effective rate doubles.
    pub fn threshold(self, rate: f64) -> f64 {
        match self {
            Access::Noma => 2f64.powf(rate) - 1.0,
            Access::Oma => 2f64.powf(2.0 * rate) - 1.0,
        }
    }
}

/// Whether the typical user is closer to the UAV than the fixed user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairCase {
    /// Typical user nearer than the fixed user (`r < r_k`).
    Near,
    /// Typical user farther than the fixed user (`r > r_k`).
    Far,
}

/// A decoding coefficient `M`: success iff the serving fading power
/// exceeds `M·(σ² + I)·d^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coeff {
    Feasible(f64),
    /// The SINR can never reach the threshold: the residual from the other
    /// user's signal is at least as strong as the useful part.
    Infeasible,
}

impl Coeff {
    /// `ε / (P_u (own − residue·ε·other))`.
    pub fn decode(eps: f64, tx_power: f64, own: f64, other: f64, residue: f64) -> Coeff {
        let denom = own - residue * eps * other;
        if denom <= FEASIBILITY_SLACK * own || denom <= 0.0 {
            Coeff::Infeasible
        } else {
            Coeff::Feasible(eps / (tx_power * denom))
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Coeff::Feasible(m) => Some(m),
            Coeff::Infeasible => None,
        }
    }

    pub fn is_feasible(self) -> bool {
        matches!(self, Coeff::Feasible(_))
    }

    /// Joint requirement of two decoding steps on the same fading draw.
    pub fn max(self, other: Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Feasible(a), Coeff::Feasible(b)) => Coeff::Feasible(a.max(b)),
            _ => Coeff::Infeasible,
        }
    }
}

/// User-centric NOMA coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserCentricCoeffs {
    /// Typical user decodes its own signal after SIC (`M_t^n`).
    pub near_own: Coeff,
    /// Typical user decodes the fixed user's signal (`M_{t→f}`).
    pub near_decode_fixed: Coeff,
    /// `M_{t*} = max{M_t^n, M_{t→f}}`.
    pub near_joint: Coeff,
    /// Typical user as the far user (`M_t^f`).
    pub far_own: Coeff,
    /// Fixed user as the far user, typical user nearer.
    pub fixed_far: Coeff,
    /// Fixed user decodes the typical user's signal when it is the near user.
    pub fixed_decode_typical: Coeff,
    /// Fixed user decodes its own signal after SIC.
    pub fixed_near_own: Coeff,
    /// Joint requirement for the fixed user as the near user.
    pub fixed_near_joint: Coeff,
}

/// UAV-centric NOMA coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavCentricCoeffs {
    /// Near user decodes its own signal after SIC (`M_w`).
    pub near_own: Coeff,
    /// Near user decodes the far user's signal, with the β-scaled residue
    /// of its own signal in the denominator.
    pub near_decode_far: Coeff,
    /// `max` of the two near-user steps.
    pub near_joint: Coeff,
    /// Far user treating the near user's signal as noise (`M_v`).
    pub far_own: Coeff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecodeCoeffs {
    UserCentric(UserCentricCoeffs),
    UavCentric(UavCentricCoeffs),
    /// Orthogonal access: each user alone on half the resource with full power.
    Oma { own: Coeff, other: Coeff },
}

/// Linear SINR thresholds and decoding coefficients for one link.
///
/// `eps_own` belongs to the typical (user-centric) or near (UAV-centric)
/// user; `eps_other` to the fixed or far user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet {
    pub strategy: Strategy,
    pub access: Access,
    pub eps_own: f64,
    pub eps_other: f64,
    pub coeffs: DecodeCoeffs,
}

impl ThresholdSet {
    /// Coefficient governing the typical user's coverage (user-centric).
    pub fn typical(&self, case: PairCase) -> Coeff {
        match (&self.coeffs, case) {
            (DecodeCoeffs::UserCentric(c), PairCase::Near) => c.near_joint,
            (DecodeCoeffs::UserCentric(c), PairCase::Far) => c.far_own,
            (DecodeCoeffs::Oma { own, .. }, _) => *own,
            (DecodeCoeffs::UavCentric(_), _) => Coeff::Infeasible,
        }
    }

    /// Coefficient governing the fixed user's coverage, where `case` is
    /// the typical user's role.
    pub fn fixed(&self, case: PairCase) -> Coeff {
        match (&self.coeffs, case) {
            (DecodeCoeffs::UserCentric(c), PairCase::Near) => c.fixed_far,
            (DecodeCoeffs::UserCentric(c), PairCase::Far) => c.fixed_near_joint,
            (DecodeCoeffs::Oma { other, .. }, _) => *other,
            (DecodeCoeffs::UavCentric(_), _) => Coeff::Infeasible,
        }
    }

    /// Near user `w` (UAV-centric).
    pub fn near(&self) -> Coeff {
        match &self.coeffs {
            DecodeCoeffs::UavCentric(c) => c.near_joint,
            DecodeCoeffs::Oma { own, .. } => *own,
            DecodeCoeffs::UserCentric(_) => Coeff::Infeasible,
        }
    }

    /// Far user `v` (UAV-centric).
    pub fn far(&self) -> Coeff {
        match &self.coeffs {
            DecodeCoeffs::UavCentric(c) => c.far_own,
            DecodeCoeffs::Oma { other, .. } => *other,
            DecodeCoeffs::UserCentric(_) => Coeff::Infeasible,
        }
    }

    /// True if at least one user of the pair can ever be covered.
    pub fn any_feasible(&self) -> bool {
        match &self.coeffs {
            DecodeCoeffs::UserCentric(c) => [c.near_joint, c.far_own, c.fixed_far, c.fixed_near_joint]
                .iter()
                .any(|m| m.is_feasible()),
            DecodeCoeffs::UavCentric(c) => c.near_joint.is_feasible() || c.far_own.is_feasible(),
            DecodeCoeffs::Oma { own, other } => own.is_feasible() || other.is_feasible(),
        }
    }
}

/// Builds every threshold and decoding coefficient for a link.
pub fn thresholds(link: &NomaLink, cfg: &NetworkConfig, strategy: Strategy, access: Access) -> ThresholdSet {
    let eps_own = access.threshold(link.rate_near);
    let eps_other = access.threshold(link.rate_far);
    let p = cfg.tx_power;
    let (far, near, beta) = (link.pw_far, link.pw_near, link.ipsic);

    let coeffs = match (access, strategy) {
        (Access::Oma, _) => DecodeCoeffs::Oma {
            own: Coeff::decode(eps_own, p, 1.0, 0.0, 0.0),
            other: Coeff::decode(eps_other, p, 1.0, 0.0, 0.0),
        },
        (Access::Noma, Strategy::UserCentric) => {
            let near_own = Coeff::decode(eps_own, p, near, far, beta);
            let near_decode_fixed = Coeff::decode(eps_other, p, far, near, 1.0);
            let fixed_decode_typical = Coeff::decode(eps_own, p, far, near, 1.0);
            let fixed_near_own = Coeff::decode(eps_other, p, near, far, beta);
            DecodeCoeffs::UserCentric(UserCentricCoeffs {
                near_own,
                near_decode_fixed,
                near_joint: near_own.max(near_decode_fixed),
                far_own: Coeff::decode(eps_own, p, far, near, 1.0),
                fixed_far: Coeff::decode(eps_other, p, far, near, 1.0),
                fixed_decode_typical,
                fixed_near_own,
                fixed_near_joint: fixed_decode_typical.max(fixed_near_own),
            })
        }
        (Access::Noma, Strategy::UavCentric) => {
            let near_own = Coeff::decode(eps_own, p, near, far, beta);
            let near_decode_far = Coeff::decode(eps_other, p, far, near, beta);
            DecodeCoeffs::UavCentric(UavCentricCoeffs {
                near_own,
                near_decode_far,
                near_joint: near_own.max(near_decode_far),
                far_own: Coeff::decode(eps_other, p, far, near, 1.0),
            })
        }
    };

    ThresholdSet {
        strategy,
        access,
        eps_own,
        eps_other,
        coeffs,
    }
}
