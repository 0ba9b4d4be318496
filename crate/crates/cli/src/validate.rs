//! Cross-check suite: closed forms against the general evaluators, the
//! series against quadrature, and analytics against seeded Monte Carlo.

use uavnoma::analytic::uav_centric::{
    coverage_cond_pair_exact, coverage_pair, rayleigh_hole_factor, HoleLaplaceExponent, PairUser,
};
use uavnoma::analytic::user_centric::{
    arctan_exponent, coverage_cond, coverage_fixed, coverage_typical, hypergeometric_exponent, ExponentMethod,
    LaplaceExponent,
};
use uavnoma::analytic::InterferenceExponent;
use uavnoma::montecarlo::{run_uav_centric, run_uav_centric_pinned, run_user_centric, run_user_centric_pinned};
use uavnoma::scenario::{dbm_to_watts, thresholds, Access, NetworkConfig, NomaLink, PairCase, Strategy};

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn closed_forms() -> uavnoma::Result<Vec<Check>> {
    let cfg = NetworkConfig {
        tx_power: 1e-3,
        ..NetworkConfig::reference()
    };
    let r_t = 300.0f64.hypot(cfg.uav_height);
    let general = LaplaceExponent::new(&cfg, r_t);
    let kappa = general.series_argument(1.0);
    let (mut arctan, mut hyper) = (0.0f64, 0.0f64);
    for i in 0..=30 {
        let s = 10f64.powf(-4.0 + 6.0 * i as f64 / 30.0) / kappa;
        let g = general.value(s)?;
        arctan = arctan.max(rel(arctan_exponent(s, cfg.tx_power, cfg.uav_density, r_t), g));
        hyper = hyper.max(rel(hypergeometric_exponent(s, cfg.tx_power, cfg.uav_density, 4.0, r_t)?, g));
    }

    let mut series = 0.0f64;
    for (m_i, alpha_i) in [(1, 4.0), (2, 3.0), (3, 2.5)] {
        let c = NetworkConfig {
            m_interf: m_i,
            alpha_interf: alpha_i,
            ..cfg
        };
        let e = LaplaceExponent::new(&c, 250.0);
        for z in [0.01, 0.2, 0.5, 0.74] {
            let s = z / e.series_argument(1.0);
            let a = e.with_method(ExponentMethod::Series).derivatives(s, 3)?;
            let b = e.with_method(ExponentMethod::Quadrature).derivatives(s, 3)?;
            for k in 0..=3 {
                series = series.max(rel(a[k], b[k]));
            }
        }
    }

    let mut hole = 0.0f64;
    for big_r in [30.0, 400.0, 2000.0] {
        let e = HoleLaplaceExponent::new(&cfg, big_r)?;
        for i in 0..=10 {
            let s = 10f64.powf(4.0 + 0.8 * i as f64);
            hole = hole.max((e.hole_factor(s) - rayleigh_hole_factor(s, cfg.tx_power, 4.0, e.l_i, big_r)).abs());
        }
    }
    Ok(vec![
        check("arctan form vs general exponent", arctan <= 1e-8, format!("max rel err {arctan:.1e}")),
        check("hypergeometric form vs general exponent", hyper <= 1e-8, format!("max rel err {hyper:.1e}")),
        check("series vs quadrature (orders 0-3)", series <= 1e-8, format!("max rel err {series:.1e}")),
        check("hole factor vs Rayleigh form", hole <= 1e-12, format!("max abs err {hole:.1e}")),
    ])
}

fn in_band(p: f64, lo: f64, hi: f64, slack: f64) -> bool {
    lo - slack <= p && p <= hi + slack
}

fn simulations(trials: u64, seed: u64) -> uavnoma::Result<Vec<Check>> {
    let cfg = NetworkConfig {
        m_desired: 2,
        tx_power: dbm_to_watts(-35.0),
        ..NetworkConfig::reference()
    };
    let link = NomaLink::new(0.6, 1.0, 0.5, 0.1, 300.0);
    let thr = thresholds(&link, &cfg, Strategy::UserCentric, Access::Noma);
    let mut pinned = Vec::new();
    for r in [150.0, 450.0] {
        let case = if r < link.fixed_user_horiz_dist { PairCase::Near } else { PairCase::Far };
        let (t, _) = run_user_centric_pinned(&cfg, &link, Access::Noma, r, trials, seed)?;
        let a = coverage_cond(r, case, &cfg, &thr)?;
        pinned.push((in_band(a, t.ci_low, t.ci_high, 0.005), format!("r={r}: {a:.4} vs {:.4}", t.p_hat)));
    }
    let uav_cfg = NetworkConfig {
        alpha_desired: 3.5,
        ..cfg
    };
    let uav_link = NomaLink::new(0.6, 1.5, 1.0, 0.0, 300.0);
    let uav_thr = thresholds(&uav_link, &uav_cfg, Strategy::UavCentric, Access::Noma);
    for (user, r, big_r) in [(PairUser::Near, 60.0, 400.0), (PairUser::Far, 160.0, 400.0)] {
        let e = run_uav_centric_pinned(&uav_cfg, &uav_link, Access::Noma, user, r, big_r, trials, seed)?;
        let a = coverage_cond_pair_exact(r, big_r, user, &uav_cfg, &uav_thr)?;
        pinned.push((
            in_band(a, e.ci_low, e.ci_high, 0.005),
            format!("{} r={r} R={big_r}: {a:.4} vs {:.4}", user.as_str(), e.p_hat),
        ));
    }

    let base = NetworkConfig::reference();
    let (t, f) = run_user_centric(&base, &NomaLink::reference(), Access::Noma, trials, seed)?;
    let at = coverage_typical(&base, &NomaLink::reference(), Access::Noma)?;
    let af = coverage_fixed(&base, &NomaLink::reference(), Access::Noma)?;
    let (w, v) = run_uav_centric(&uav_cfg, &uav_link, Access::Noma, trials, seed)?;
    let aw = coverage_pair(PairUser::Near, &uav_cfg, &uav_link, Access::Noma)?;
    let av = coverage_pair(PairUser::Far, &uav_cfg, &uav_link, Access::Noma)?;
    let pairs = [(at, t), (af, f), (aw, w), (av, v)];
    let worst = pairs.iter().fold(0.0f64, |m, (a, e)| m.max((a - e.p_hat).abs()));
    let banded = pairs.iter().all(|(a, e)| in_band(*a, e.ci_low, e.ci_high, 0.01));
    let mismatches = t.identity_mismatches + f.identity_mismatches + w.identity_mismatches + v.identity_mismatches;

    Ok(vec![
        check(
            "pinned-geometry analytic vs mc",
            pinned.iter().all(|(ok, _)| *ok),
            pinned.into_iter().map(|(_, d)| d).collect::<Vec<_>>().join("; "),
        ),
        check(
            "averaged analytic vs mc",
            banded,
            format!("max |gap| {worst:.4} over typical, fixed, near, far; 99% band widened by 0.01"),
        ),
        check(
            "two-SINR vs max-coefficient success test",
            mismatches == 0,
            format!("{mismatches} disagreements"),
        ),
    ])
}

fn infeasibility(trials: u64, seed: u64) -> uavnoma::Result<Check> {
    let cfg = NetworkConfig {
        alpha_desired: 3.5,
        ..NetworkConfig::reference()
    };
    let link = NomaLink::new(0.6, 1.5, 1.0, 0.5, 300.0);
    let a = coverage_pair(PairUser::Near, &cfg, &link, Access::Noma)?;
    let (w, _) = run_uav_centric(&cfg, &link, Access::Noma, trials, seed)?;
    Ok(check(
        "infeasible near user is exactly zero",
        a == 0.0 && w.successes == 0,
        format!("analytic {a}, mc successes {}", w.successes),
    ))
}

pub fn run(trials: u64, seed: u64) -> uavnoma::Result<Vec<Check>> {
    let mut checks = closed_forms()?;
    checks.extend(simulations(trials, seed)?);
    checks.push(infeasibility(trials.min(10_000), seed)?);
    Ok(checks)
}
