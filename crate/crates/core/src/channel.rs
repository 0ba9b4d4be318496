//! Fading, path loss, aggregate interference and the SINR of every
//! decoding step in both strategies.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::scenario::NomaLink;
use crate::spatial::{Point2, Scene};
use crate::specfun::ln_gamma;

/// Returned instead of `+∞` when an SINR has a zero denominator.
pub const SINR_MAX: f64 = f64::MAX;

/// Power gain `|h|²` of a Nakagami-m link with unit mean: a Gamma(m, 1/m)
/// variate built as the mean of `m` unit exponentials.
pub fn sample_nakagami_power<R: Rng + ?Sized>(m: u32, rng: &mut R) -> f64 {
    debug_assert!(m >= 1);
    let sum: f64 = (0..m).map(|_| Exp1.sample(rng)).map(|x: f64| x).sum();
    sum / m as f64
}

/// Density of the power gain, `m^m x^{m−1} e^{−mx} / Γ(m)`.
pub fn nakagami_power_pdf(m: u32, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let mf = m as f64;
    if x == 0.0 {
        return if m == 1 { 1.0 } else { 0.0 };
    }
    let ln = mf * mf.ln() + (mf - 1.0) * x.ln() - mf * x - ln_gamma(mf).expect("m >= 1");
    ln.exp()
}

/// `P(|h|² > x)` for integer `m`: `e^{−mx} Σ_{n<m} (mx)^n / n!`.
pub fn nakagami_power_ccdf(m: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mx = m as f64 * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..m {
        term *= mx / n as f64;
        sum += term;
    }
    (-mx).exp() * sum
}

pub fn dist3d(horizontal: f64, height: f64) -> f64 {
    horizontal.hypot(height)
}

/// Large-scale gain `d^{−α}`. Links shorter than 1 m are rejected since
/// the power law would then amplify.
pub fn path_gain(dist3d: f64, alpha: f64) -> Result<f64> {
    if !(dist3d >= 1.0) {
        return Err(Error::domain(format!("path gain needs a distance >= 1 m, got {dist3d}")));
    }
    Ok(dist3d.powf(-alpha))
}

#[inline]
fn power_law_sq(d_sq: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (d_sq * d_sq)
    } else {
        d_sq.powf(-0.5 * alpha)
    }
}

/// Co-channel interference at a ground receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceParams {
    pub height: f64,
    pub alpha_interf: f64,
    pub m_interf: u32,
    pub tx_power: f64,
}

/// Sum of `P_u |g_j|² d_j^{−α_I}` over every UAV other than the serving
/// one whose 3-D distance to `receiver` exceeds `exclusion_dist3d`.
/// Each interferer gets a fresh Nakagami-`m_I` power draw.
pub fn aggregate_interference<R: Rng + ?Sized>(
    scene: &Scene,
    receiver: Point2,
    exclusion_dist3d: f64,
    params: &InterferenceParams,
    rng: &mut R,
) -> f64 {
    let h_sq = params.height * params.height;
    let excl_sq = exclusion_dist3d * exclusion_dist3d;
    let mut total = 0.0;
    for (j, p) in scene.uav_horiz_positions.iter().enumerate() {
        if Some(j) == scene.serving_index {
            continue;
        }
        let d_sq = p.dist_sq(receiver) + h_sq;
        if d_sq <= excl_sq {
            continue;
        }
        let g = sample_nakagami_power(params.m_interf, rng);
        total += g * power_law_sq(d_sq, params.alpha_interf);
    }
    total * params.tx_power
}

/// Which SINR expression a decoding step uses.
///
/// | step | own | other | residue |
/// |------|-----|-------|---------|
/// | `OtherAsNoise` | far share | near share | 1 |
/// | `OwnAfterSic` | near share | far share | β |
/// | `DecodeFarWithResidue` | far share | near share | β |
/// | `Orthogonal` | 1 | 0 | 0 |
///
/// `OtherAsNoise` covers the far user's own signal and every decode of the
/// far user's message by the near user in the user-centric strategy.
/// `DecodeFarWithResidue` is the UAV-centric near user decoding the far
/// user's message, whose denominator carries a β-scaled copy of the near
/// user's own signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SicStep {
    OtherAsNoise,
    OwnAfterSic,
    DecodeFarWithResidue,
    Orthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrInputs {
    /// Fading power `|h|²` of the serving link.
    pub desired_gain: f64,
    pub serving_dist3d: f64,
    pub alpha: f64,
    pub tx_power: f64,
    pub interference: f64,
    pub noise: f64,
    pub split_own: f64,
    pub split_other: f64,
    /// 0 for orthogonal access, β after imperfect SIC, 1 when the other
    /// signal is untouched.
    pub residue: f64,
}

impl SinrInputs {
    #[allow(clippy::too_many_arguments)]
    pub fn for_step(
        step: SicStep,
        link: &NomaLink,
        desired_gain: f64,
        serving_dist3d: f64,
        alpha: f64,
        tx_power: f64,
        interference: f64,
        noise: f64,
    ) -> Self {
        let (split_own, split_other, residue) = match step {
            SicStep::OtherAsNoise => (link.pw_far, link.pw_near, 1.0),
            SicStep::OwnAfterSic => (link.pw_near, link.pw_far, link.ipsic),
            SicStep::DecodeFarWithResidue => (link.pw_far, link.pw_near, link.ipsic),
            SicStep::Orthogonal => (1.0, 0.0, 0.0),
        };
        SinrInputs {
            desired_gain,
            serving_dist3d,
            alpha,
            tx_power,
            interference,
            noise,
            split_own,
            split_other,
            residue,
        }
    }
}

/// `g L P own / (σ² + residue · g L P other + I)` with `L = d^{−α}`.
pub fn sinr(inp: &SinrInputs) -> f64 {
    let received = inp.desired_gain * inp.serving_dist3d.powf(-inp.alpha) * inp.tx_power;
    let num = received * inp.split_own;
    let den = inp.noise + inp.residue * received * inp.split_other + inp.interference;
    if den <= 0.0 {
        return if num > 0.0 { SINR_MAX } else { 0.0 };
    }
    let v = num / den;
    if v.is_finite() {
        v
    } else {
        SINR_MAX
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{thresholds, Access, NetworkConfig, Strategy};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inputs(gain: f64, residue: f64, noise: f64, interference: f64) -> SinrInputs {
        SinrInputs {
            desired_gain: gain,
            serving_dist3d: 1.0,
            alpha: 3.0,
            tx_power: 1.0,
            interference,
            noise,
            split_own: 0.4,
            split_other: 0.6,
            residue,
        }
    }

    #[test]
    fn nakagami_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 1_000_000;
        let mean1 = (0..n).map(|_| sample_nakagami_power(1, &mut rng)).sum::<f64>() / n as f64;
        assert!((0.997..=1.003).contains(&mean1), "{mean1}");

        let draws: Vec<f64> = (0..n).map(|_| sample_nakagami_power(2, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((0.497..=0.503).contains(&var), "{var}");
    }

    #[test]
    fn nakagami_density_at_zero() {
        assert_eq!(nakagami_power_pdf(1, 0.0), 1.0);
        assert_eq!(nakagami_power_pdf(2, 0.0), 0.0);
        assert!((nakagami_power_pdf(1, 0.7) - (-0.7f64).exp()).abs() < 1e-15);
        // m = 2: 4x e^{−2x}
        assert!((nakagami_power_pdf(2, 0.7) - 4.0 * 0.7 * (-1.4f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn nakagami_ccdf_matches_density_integral() {
        for m in 1..=4 {
            let x0 = 0.8;
            // midpoint rule on [x0, 40]
            let n = 400_000;
            let h = (40.0 - x0) / n as f64;
            let tail: f64 = (0..n).map(|i| nakagami_power_pdf(m, x0 + (i as f64 + 0.5) * h)).sum::<f64>() * h;
            assert!((tail - nakagami_power_ccdf(m, x0)).abs() < 1e-8, "m={m}");
        }
    }

    #[test]
    fn path_gain_values() {
        assert_eq!(path_gain(1.0, 3.7).unwrap(), 1.0);
        assert!((path_gain(100.0, 2.0).unwrap() - 1e-4).abs() < 1e-18);
        assert!((path_gain(100.0, 3.0).unwrap() - 1e-6).abs() < 1e-20);
        assert!(matches!(path_gain(0.5, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn interference_trivial_cases() {
        let params = InterferenceParams {
            height: 100.0,
            alpha_interf: 4.0,
            m_interf: 1,
            tx_power: 2.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let alone = Scene {
            uav_horiz_positions: vec![Point2::ORIGIN],
            serving_index: Some(0),
            realization_seed: 0,
        };
        assert_eq!(aggregate_interference(&alone, Point2::ORIGIN, 0.0, &params, &mut rng), 0.0);

        // Single interferer: the draw is reproducible, so replay it.
        let pair = Scene {
            uav_horiz_positions: vec![Point2::ORIGIN, Point2::new(300.0, 400.0)],
            serving_index: Some(0),
            realization_seed: 0,
        };
        let i = aggregate_interference(&pair, Point2::ORIGIN, 0.0, &params, &mut ChaCha8Rng::seed_from_u64(4));
        let g = sample_nakagami_power(1, &mut ChaCha8Rng::seed_from_u64(4));
        let d_sq = 500.0f64 * 500.0 + 100.0 * 100.0;
        assert!((i - 2.0 * g / (d_sq * d_sq)).abs() < 1e-25);

        // Exclusion radius beyond the interferer removes it.
        let none = aggregate_interference(&pair, Point2::ORIGIN, 600.0, &params, &mut rng);
        assert_eq!(none, 0.0);
    }

    #[test]
    fn sinr_examples() {
        assert_eq!(sinr(&inputs(1.0, 0.0, 0.0, 0.0)), SINR_MAX);
        assert!((sinr(&inputs(1.0, 0.0, 0.1, 0.0)) - 4.0).abs() < 1e-12);
        assert!((sinr(&inputs(1.0, 1.0, 0.1, 0.0)) - 0.4 / 0.7).abs() < 1e-12);
        assert_eq!(sinr(&inputs(0.0, 0.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn selector_table() {
        let link = NomaLink::new(0.6, 1.5, 1.0, 0.25, 0.0);
        let s = SinrInputs::for_step(SicStep::DecodeFarWithResidue, &link, 1.0, 1.0, 3.0, 1.0, 0.0, 0.1);
        assert_eq!((s.split_own, s.split_other, s.residue), (0.6, 0.4, 0.25));
        let s = SinrInputs::for_step(SicStep::OtherAsNoise, &link, 1.0, 1.0, 3.0, 1.0, 0.0, 0.1);
        assert_eq!((s.split_own, s.split_other, s.residue), (0.6, 0.4, 1.0));
        let s = SinrInputs::for_step(SicStep::OwnAfterSic, &link, 1.0, 1.0, 3.0, 1.0, 0.0, 0.1);
        assert!((s.split_own - 0.4).abs() < 1e-15 && s.split_other == 0.6 && s.residue == 0.25);
        let s = SinrInputs::for_step(SicStep::Orthogonal, &link, 1.0, 1.0, 3.0, 1.0, 0.0, 0.1);
        assert_eq!((s.split_own, s.split_other, s.residue), (1.0, 0.0, 0.0));
    }

    proptest! {
        #[test]
        fn sinr_increases_with_gain_without_residue(g in 0.01f64..10.0, dg in 0.001f64..5.0, i in 0.0f64..1.0) {
            let a = sinr(&inputs(g, 0.0, 0.1, i));
            let b = sinr(&inputs(g + dg, 0.0, 0.1, i));
            prop_assert!(b > a);
        }

        #[test]
        fn sinr_power_monotone_only_when_noise_dominates(p in 0.01f64..10.0, dp in 0.01f64..10.0) {
            // Noise-limited: more power helps.
            let mut lo = inputs(1.0, 0.3, 0.5, 0.0);
            lo.tx_power = p;
            let mut hi = lo;
            hi.tx_power = p + dp;
            prop_assert!(sinr(&hi) > sinr(&lo));
            // Interference that scales with P_u and no noise: SINR is flat in P_u.
            let mut a = inputs(1.0, 0.3, 0.0, 0.2 * p);
            a.tx_power = p;
            let mut b = inputs(1.0, 0.3, 0.0, 0.2 * (p + dp));
            b.tx_power = p + dp;
            prop_assert!((sinr(&a) - sinr(&b)).abs() <= 1e-12 * sinr(&a));
        }

        #[test]
        fn joint_sic_event_equals_max_coefficient(
            g in 0.0f64..20.0,
            interference in 0.0f64..1e-12,
            beta in 0.0f64..0.6,
            rate_near in 0.05f64..1.5,
            rate_far in 0.05f64..1.0,
            r in 1.0f64..600.0,
        ) {
            let cfg = NetworkConfig { tx_power: 1e-6, ..NetworkConfig::reference() };
            let link = NomaLink::new(0.7, rate_near, rate_far, beta, 300.0);
            let t = thresholds(&link, &cfg, Strategy::UserCentric, Access::Noma);
            let d = dist3d(r, cfg.uav_height);
            let other = SinrInputs::for_step(SicStep::OtherAsNoise, &link, g, d, cfg.alpha_desired, cfg.tx_power, interference, cfg.noise_power);
            let own = SinrInputs::for_step(SicStep::OwnAfterSic, &link, g, d, cfg.alpha_desired, cfg.tx_power, interference, cfg.noise_power);
            let by_sinr = sinr(&other) > t.eps_other && sinr(&own) > t.eps_own;
            let by_coeff = match t.typical(crate::scenario::PairCase::Near) {
                crate::scenario::Coeff::Feasible(m) => g > m * (cfg.noise_power + interference) * d.powf(cfg.alpha_desired),
                crate::scenario::Coeff::Infeasible => false,
            };
            // Exclude draws within rounding of the boundary.
            if let crate::scenario::Coeff::Feasible(m) = t.typical(crate::scenario::PairCase::Near) {
                let edge = m * (cfg.noise_power + interference) * d.powf(cfg.alpha_desired);
                prop_assume!((g - edge).abs() > 1e-9 * edge.max(1e-300));
            }
            prop_assert_eq!(by_sinr, by_coeff);
        }
    }
}
