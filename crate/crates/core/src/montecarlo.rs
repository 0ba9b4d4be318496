//! Seeded, parallel Monte Carlo estimation of the same coverage
//! probabilities as [`crate::analytic`].
//!
//! Trial `t` of a run with seed `s` draws from a ChaCha8 generator keyed by
//! `s` on stream `t`, and successes are pooled as integer counts, so the
//! estimate does not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::analytic::uav_centric::PairUser;
use crate::channel::{aggregate_interference, sample_nakagami_power, sinr, InterferenceParams, SicStep, SinrInputs};
use crate::error::{Error, Result};
use crate::scenario::{thresholds, Access, Coeff, NetworkConfig, NomaLink, PairCase, Strategy, ThresholdSet};
use crate::spatial::{sample_far_user, sample_near_user, uniform_angle, Point2, Scene};

pub const DEFAULT_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UserRole {
    Typical,
    Fixed,
    Near,
    Far,
}

impl UserRole {
    pub fn as_str(self) -> &'static str {
        match self {
            UserRole::Typical => "typical",
            UserRole::Fixed => "fixed",
            UserRole::Near => "near",
            UserRole::Far => "far",
        }
    }
}

impl From<PairUser> for UserRole {
    fn from(u: PairUser) -> Self {
        match u {
            PairUser::Near => UserRole::Near,
            PairUser::Far => UserRole::Far,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub p_hat: f64,
    pub successes: u64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub strategy: Strategy,
    pub access: Access,
    pub user_role: UserRole,
    pub seed: u64,
    /// Trials where the two-SINR success test and the max-coefficient
    /// test disagreed.
    pub identity_mismatches: u64,
}

impl CoverageEstimate {
    fn from_counts(tally: Counts, trials: u64, strategy: Strategy, access: Access, user_role: UserRole, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(tally.successes, trials, DEFAULT_CONFIDENCE).expect("trials >= 1");
        CoverageEstimate {
            p_hat: tally.successes as f64 / trials as f64,
            successes: tally.successes,
            trials,
            ci_low,
            ci_high,
            strategy,
            access,
            user_role,
            seed,
            identity_mismatches: tally.mismatches,
        }
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::domain("Wilson interval needs at least one trial"));
    }
    if successes > trials {
        return Err(Error::domain(format!("{successes} successes out of {trials} trials")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    let z = Normal::standard().inverse_cdf(0.5 + 0.5 * confidence);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Ok((low, high))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    successes: u64,
    mismatches: u64,
}

impl Counts {
    fn record(&mut self, outcome: Outcome) {
        self.successes += outcome.success as u64;
        self.mismatches += (outcome.success != outcome.by_coeff) as u64;
    }

    fn merge(self, other: Counts) -> Counts {
        Counts {
            successes: self.successes + other.successes,
            mismatches: self.mismatches + other.mismatches,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Outcome {
    success: bool,
    by_coeff: bool,
}

impl Outcome {
    const FAILURE: Outcome = Outcome {
        success: false,
        by_coeff: false,
    };
}

/// Generator for trial `trial` of a run keyed by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trials<const K: usize, F>(trials: u64, seed: u64, f: F) -> [Counts; K]
where
    F: Fn(&mut ChaCha8Rng) -> [Outcome; K] + Sync,
{
    let key = ChaCha8Rng::seed_from_u64(seed).get_seed();
    (0..trials)
        .into_par_iter()
        .fold(
            || [Counts::default(); K],
            |mut acc, t| {
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_stream(t);
                for (c, o) in acc.iter_mut().zip(f(&mut rng)) {
                    c.record(o);
                }
                acc
            },
        )
        .reduce(|| [Counts::default(); K], |a, b| std::array::from_fn(|i| a[i].merge(b[i])))
}

/// Success count of an arbitrary per-trial predicate under the same
/// seeding scheme as the coverage runs.
pub fn count_successes<F>(trials: u64, seed: u64, predicate: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let [c] = run_trials(trials, seed, |rng| {
        let s = predicate(rng);
        [Outcome { success: s, by_coeff: s }]
    });
    c.successes
}

fn check_run(cfg: &NetworkConfig, link: &NomaLink, trials: u64) -> Result<()> {
    cfg.validate()?;
    link.validate()?;
    if trials == 0 {
        return Err(Error::domain("trials must be >= 1"));
    }
    Ok(())
}

/// Everything a single receiver needs besides its fading and interference.
struct Receiver<'a> {
    cfg: &'a NetworkConfig,
    link: &'a NomaLink,
    dist3d: f64,
}

impl Receiver<'_> {
    fn sinr(&self, step: SicStep, gain: f64, interference: f64) -> f64 {
        sinr(&SinrInputs::for_step(
            step,
            self.link,
            gain,
            self.dist3d,
            self.cfg.alpha_desired,
            self.cfg.tx_power,
            interference,
            self.cfg.noise_power,
        ))
    }

    fn by_coeff(&self, coeff: Coeff, gain: f64, interference: f64) -> bool {
        match coeff {
            Coeff::Feasible(m) => gain > m * (self.cfg.noise_power + interference) * self.dist3d.powf(self.cfg.alpha_desired),
            Coeff::Infeasible => false,
        }
    }

    /// Success of a chain of `(step, threshold)` decodes on one fading draw.
    fn decode(&self, chain: &[(SicStep, f64)], coeff: Coeff, gain: f64, interference: f64) -> Outcome {
        Outcome {
            success: chain.iter().all(|&(step, eps)| self.sinr(step, gain, interference) > eps),
            by_coeff: self.by_coeff(coeff, gain, interference),
        }
    }
}

fn interference_params(cfg: &NetworkConfig) -> InterferenceParams {
    InterferenceParams {
        height: cfg.uav_height,
        alpha_interf: cfg.alpha_interf,
        m_interf: cfg.m_interf,
        tx_power: cfg.tx_power,
    }
}

/// Decoding chain of the typical (`fixed == false`) or fixed user, given
/// the typical user's role.
fn user_centric_chain(thr: &ThresholdSet, case: PairCase, fixed: bool) -> Vec<(SicStep, f64)> {
    let (mine, theirs) = if fixed {
        (thr.eps_other, thr.eps_own)
    } else {
        (thr.eps_own, thr.eps_other)
    };
    let i_am_near = (case == PairCase::Near) != fixed;
    match thr.access {
        Access::Oma => vec![(SicStep::Orthogonal, mine)],
        Access::Noma if i_am_near => vec![(SicStep::OtherAsNoise, theirs), (SicStep::OwnAfterSic, mine)],
        Access::Noma => vec![(SicStep::OtherAsNoise, mine)],
    }
}

fn user_centric_trial(
    scene: &Scene,
    cfg: &NetworkConfig,
    link: &NomaLink,
    thr: &ThresholdSet,
    rng: &mut ChaCha8Rng,
) -> [Outcome; 2] {
    let Some(serving) = scene.serving_position() else {
        return [Outcome::FAILURE; 2];
    };
    let params = interference_params(cfg);
    let r = serving.norm();
    let case = if r < link.fixed_user_horiz_dist {
        PairCase::Near
    } else {
        PairCase::Far
    };
    let fixed_pos = serving.offset(Point2::polar(link.fixed_user_horiz_dist, uniform_angle(rng)));

    let typical = Receiver {
        cfg,
        link,
        dist3d: r.hypot(cfg.uav_height),
    };
    let g_t = sample_nakagami_power(cfg.m_desired, rng);
    let i_t = aggregate_interference(scene, Point2::ORIGIN, 0.0, &params, rng);
    let t_out = typical.decode(&user_centric_chain(thr, case, false), thr.typical(case), g_t, i_t);

    let fixed = Receiver {
        cfg,
        link,
        dist3d: link.fixed_user_horiz_dist.hypot(cfg.uav_height),
    };
    let g_f = sample_nakagami_power(cfg.m_desired, rng);
    let i_f = aggregate_interference(scene, fixed_pos, 0.0, &params, rng);
    let f_out = fixed.decode(&user_centric_chain(thr, case, true), thr.fixed(case), g_f, i_f);

    [t_out, f_out]
}

/// Typical and fixed user coverage under the user-centric strategy.
pub fn run_user_centric(
    cfg: &NetworkConfig,
    link: &NomaLink,
    access: Access,
    trials: u64,
    seed: u64,
) -> Result<(CoverageEstimate, CoverageEstimate)> {
    check_run(cfg, link, trials)?;
    let thr = thresholds(link, cfg, Strategy::UserCentric, access);
    let [t, f] = run_trials(trials, seed, |rng| {
        let scene = Scene::user_centric(cfg.uav_density, cfg.sim_disc_radius, seed, rng);
        user_centric_trial(&scene, cfg, link, &thr, rng)
    });
    Ok(user_centric_pair(t, f, trials, access, seed))
}

/// As [`run_user_centric`] with the serving UAV pinned at horizontal
/// distance `r` from the typical user.
pub fn run_user_centric_pinned(
    cfg: &NetworkConfig,
    link: &NomaLink,
    access: Access,
    r: f64,
    trials: u64,
    seed: u64,
) -> Result<(CoverageEstimate, CoverageEstimate)> {
    check_run(cfg, link, trials)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("pinned serving distance must be finite and >= 0, got {r}")));
    }
    let thr = thresholds(link, cfg, Strategy::UserCentric, access);
    let [t, f] = run_trials(trials, seed, |rng| {
        let scene = Scene::user_centric_pinned(cfg.uav_density, cfg.sim_disc_radius, r, seed, rng);
        user_centric_trial(&scene, cfg, link, &thr, rng)
    });
    Ok(user_centric_pair(t, f, trials, access, seed))
}

fn user_centric_pair(t: Counts, f: Counts, trials: u64, access: Access, seed: u64) -> (CoverageEstimate, CoverageEstimate) {
    let s = Strategy::UserCentric;
    (
        CoverageEstimate::from_counts(t, trials, s, access, UserRole::Typical, seed),
        CoverageEstimate::from_counts(f, trials, s, access, UserRole::Fixed, seed),
    )
}

fn uav_centric_outcome(
    user: PairUser,
    horiz: f64,
    angle: f64,
    scene: &Scene,
    cfg: &NetworkConfig,
    link: &NomaLink,
    thr: &ThresholdSet,
    rng: &mut ChaCha8Rng,
) -> Outcome {
    let rx = Receiver {
        cfg,
        link,
        dist3d: horiz.hypot(cfg.uav_height),
    };
    let pos = Point2::polar(horiz, angle);
    let g = sample_nakagami_power(cfg.m_desired, rng);
    let i = aggregate_interference(scene, pos, 0.0, &interference_params(cfg), rng);
    let (chain, coeff) = match (thr.access, user) {
        (Access::Oma, PairUser::Near) => (vec![(SicStep::Orthogonal, thr.eps_own)], thr.near()),
        (Access::Oma, PairUser::Far) => (vec![(SicStep::Orthogonal, thr.eps_other)], thr.far()),
        (Access::Noma, PairUser::Near) => (
            vec![(SicStep::DecodeFarWithResidue, thr.eps_other), (SicStep::OwnAfterSic, thr.eps_own)],
            thr.near(),
        ),
        (Access::Noma, PairUser::Far) => (vec![(SicStep::OtherAsNoise, thr.eps_other)], thr.far()),
    };
    rx.decode(&chain, coeff, g, i)
}

fn uav_centric_trial(scene: &Scene, cfg: &NetworkConfig, link: &NomaLink, thr: &ThresholdSet, rng: &mut ChaCha8Rng) -> [Outcome; 2] {
    let Some(big_r) = scene.nearest_other_distance() else {
        return [Outcome::FAILURE; 2];
    };
    let r_w = sample_near_user(big_r, rng);
    let a_w = uniform_angle(rng);
    let r_v = sample_far_user(big_r, rng);
    let a_v = uniform_angle(rng);
    [
        uav_centric_outcome(PairUser::Near, r_w, a_w, scene, cfg, link, thr, rng),
        uav_centric_outcome(PairUser::Far, r_v, a_v, scene, cfg, link, thr, rng),
    ]
}

/// Near and far user coverage under the UAV-centric strategy.
pub fn run_uav_centric(
    cfg: &NetworkConfig,
    link: &NomaLink,
    access: Access,
    trials: u64,
    seed: u64,
) -> Result<(CoverageEstimate, CoverageEstimate)> {
    check_run(cfg, link, trials)?;
    let thr = thresholds(link, cfg, Strategy::UavCentric, access);
    let [w, v] = run_trials(trials, seed, |rng| {
        let scene = Scene::uav_centric(cfg.uav_density, cfg.sim_disc_radius, seed, rng);
        uav_centric_trial(&scene, cfg, link, &thr, rng)
    });
    let s = Strategy::UavCentric;
    Ok((
        CoverageEstimate::from_counts(w, trials, s, access, UserRole::Near, seed),
        CoverageEstimate::from_counts(v, trials, s, access, UserRole::Far, seed),
    ))
}

/// Coverage of one UAV-centric user at horizontal distance `r`, with the
/// nearest other UAV pinned at `big_r`.
#[allow(clippy::too_many_arguments)]
pub fn run_uav_centric_pinned(
    cfg: &NetworkConfig,
    link: &NomaLink,
    access: Access,
    user: PairUser,
    r: f64,
    big_r: f64,
    trials: u64,
    seed: u64,
) -> Result<CoverageEstimate> {
    check_run(cfg, link, trials)?;
    if !(big_r > 0.0) || !big_r.is_finite() || !(r >= 0.0) || r > 0.5 * big_r {
        return Err(Error::domain(format!("need 0 <= r <= R/2 with R > 0, got r = {r}, R = {big_r}")));
    }
    let thr = thresholds(link, cfg, Strategy::UavCentric, access);
    let [c] = run_trials(trials, seed, |rng| {
        let scene = Scene::uav_centric_pinned(cfg.uav_density, cfg.sim_disc_radius, big_r, seed, rng);
        let angle = uniform_angle(rng);
        [uav_centric_outcome(user, r, angle, &scene, cfg, link, &thr, rng)]
    });
    Ok(CoverageEstimate::from_counts(c, trials, Strategy::UavCentric, access, user.into(), seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::dbm_to_watts;
    use rand::Rng;

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 100, 0.99).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.07);
        let (lo, hi) = wilson_interval(100, 100, 0.99).unwrap();
        assert_eq!(hi, 1.0);
        assert!(lo > 0.93 && lo < 1.0);
        assert!(wilson_interval(1, 0, 0.99).is_err());
        assert!(wilson_interval(5, 4, 0.99).is_err());
    }

    #[test]
    fn wilson_half_of_hundred() {
        // z = 2.5758293035489, n = 100, p = 0.5:
        // centre 0.5, half-width z/(1+z²/n)·sqrt(0.0025 + z²/40000).
        let z: f64 = 2.575_829_303_548_9;
        let n = 100.0;
        let denom = 1.0 + z * z / n;
        let half = z / denom * (0.25 / n + z * z / (4.0 * n * n)).sqrt();
        let (lo, hi) = wilson_interval(50, 100, 0.99).unwrap();
        assert!((lo - (0.5 - half)).abs() < 1e-9, "{lo}");
        assert!((hi - (0.5 + half)).abs() < 1e-9, "{hi}");
        assert!((lo - 0.3747).abs() < 1e-3 && (hi - 0.6253).abs() < 1e-3);
    }

    #[test]
    fn custom_predicate_counts() {
        assert_eq!(count_successes(1000, 3, |_| true), 1000);
        let half = count_successes(20_000, 3, |rng| rng.random::<f64>() < 0.5);
        assert!((9_600..=10_400).contains(&half), "{half}");
    }

    #[test]
    fn lone_uav_with_huge_power_always_covers() {
        let cfg = NetworkConfig {
            uav_density: 1e-12,
            sim_disc_radius: 100.0,
            tx_power: 1e6,
            ..NetworkConfig::reference()
        };
        let link = NomaLink::reference();
        let (t, _) = run_user_centric_pinned(&cfg, &link, Access::Noma, 50.0, 1, 9).unwrap();
        assert_eq!(t.p_hat, 1.0);
        assert_eq!(t.identity_mismatches, 0);
    }

    #[test]
    fn infeasible_links_never_succeed() {
        let cfg = NetworkConfig::reference();
        let uc = NomaLink::new(0.6, 1.0, 0.5, 2.0 / 3.0, 1e5);
        let (t, _) = run_user_centric(&cfg, &uc, Access::Noma, 2_000, 1).unwrap();
        assert_eq!(t.successes, 0);
        let uav = NomaLink::new(0.6, 1.5, 1.0, 0.5, 300.0);
        let (w, v) = run_uav_centric(&cfg, &uav, Access::Noma, 2_000, 1).unwrap();
        assert_eq!(w.successes, 0);
        assert!(v.successes > 0);
    }

    #[test]
    fn same_seed_same_counts() {
        let cfg = NetworkConfig {
            tx_power: dbm_to_watts(-40.0),
            ..NetworkConfig::reference()
        };
        let link = NomaLink::reference();
        let a = run_user_centric(&cfg, &link, Access::Noma, 3_000, 77).unwrap();
        let b = run_user_centric(&cfg, &link, Access::Noma, 3_000, 77).unwrap();
        assert_eq!(a, b);
        let c = run_user_centric(&cfg, &link, Access::Noma, 3_000, 78).unwrap();
        assert_ne!(a.0.successes, c.0.successes);
    }

    #[test]
    fn estimates_are_ordered_within_bounds() {
        let cfg = NetworkConfig::reference();
        let (w, v) = run_uav_centric(&cfg, &NomaLink::new(0.6, 1.5, 1.0, 0.0, 300.0), Access::Noma, 2_000, 5).unwrap();
        for e in [w, v] {
            assert!(0.0 <= e.ci_low && e.ci_low <= e.p_hat && e.p_hat <= e.ci_high && e.ci_high <= 1.0);
            assert_eq!(e.identity_mismatches, 0);
        }
    }
}
