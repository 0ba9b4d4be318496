//! Point evaluation and CSV output.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use uavnoma::analytic::uav_centric::{coverage_pair_with, PairUser};
use uavnoma::analytic::user_centric::{coverage_fixed_with, coverage_typical};
use uavnoma::montecarlo::{run_uav_centric, run_user_centric, CoverageEstimate, UserRole};
use uavnoma::scenario::{thresholds, Access, Coeff, DecodeCoeffs, Strategy};

use crate::config::{AnalysisSection, Mode, Scenario, SweepSpec};
use crate::CliError;

/// One evaluation request.
#[derive(Debug, Clone)]
pub struct Point {
    pub strategy: Strategy,
    pub access: Access,
    pub scenario: Scenario,
    pub axis: String,
    pub value: f64,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
}

/// One CSV line.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Row {
    pub strategy: &'static str,
    pub access: &'static str,
    pub user_role: &'static str,
    pub axis: String,
    pub value: f64,
    pub p_analytic: Option<f64>,
    pub p_mc: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

fn roles(strategy: Strategy) -> [UserRole; 2] {
    match strategy {
        Strategy::UserCentric => [UserRole::Typical, UserRole::Fixed],
        Strategy::UavCentric => [UserRole::Near, UserRole::Far],
    }
}

fn analytic_pair(p: &Point, analysis: &AnalysisSection) -> uavnoma::Result<[f64; 2]> {
    let (cfg, link) = (&p.scenario.network, &p.scenario.link);
    Ok(match p.strategy {
        Strategy::UserCentric => [
            coverage_typical(cfg, link, p.access)?,
            coverage_fixed_with(cfg, link, p.access, analysis.fixed_user())?,
        ],
        Strategy::UavCentric => [
            coverage_pair_with(PairUser::Near, cfg, link, p.access, analysis.neighbour())?,
            coverage_pair_with(PairUser::Far, cfg, link, p.access, analysis.neighbour())?,
        ],
    })
}

fn mc_pair(p: &Point) -> uavnoma::Result<[CoverageEstimate; 2]> {
    let (cfg, link) = (&p.scenario.network, &p.scenario.link);
    let (a, b) = match p.strategy {
        Strategy::UserCentric => run_user_centric(cfg, link, p.access, p.trials, p.seed)?,
        Strategy::UavCentric => run_uav_centric(cfg, link, p.access, p.trials, p.seed)?,
    };
    Ok([a, b])
}

/// Both rows of a point, in role order.
pub fn evaluate(p: &Point, analysis: &AnalysisSection) -> Result<[Row; 2], CliError> {
    let analytic = if p.mode.analytic() {
        Some(analytic_pair(p, analysis).map_err(CliError::from_core)?)
    } else {
        None
    };
    let mc = if p.mode.mc() {
        Some(mc_pair(p).map_err(CliError::from_core)?)
    } else {
        None
    };
    let role = roles(p.strategy);
    Ok(std::array::from_fn(|i| {
        let est = mc.as_ref().map(|m| m[i]);
        Row {
            strategy: p.strategy.as_str(),
            access: p.access.as_str(),
            user_role: role[i].as_str(),
            axis: p.axis.clone(),
            value: p.value,
            p_analytic: analytic.map(|a| a[i]),
            p_mc: est.map(|e| e.p_hat),
            ci_low: est.map(|e| e.ci_low),
            ci_high: est.map(|e| e.ci_high),
            trials: est.map(|e| e.trials),
            seed: est.map(|e| e.seed),
        }
    }))
}

/// Expands a sweep into points, series-major then axis order.
pub fn expand(spec: &SweepSpec, base: &Scenario, trials: u64, seed: u64) -> Result<Vec<Point>, CliError> {
    let mut points = Vec::new();
    for series in spec.series_or_default() {
        let scenario = series.apply(base)?;
        let label = series.label();
        let axis = if label.is_empty() {
            spec.axis.name().to_string()
        } else {
            format!("{};{label}", spec.axis)
        };
        for &value in &spec.values {
            points.push(Point {
                strategy: spec.strategy,
                access: series.access.unwrap_or(spec.access),
                scenario: scenario.with(spec.axis, value)?,
                axis: axis.clone(),
                value,
                mode: spec.mode,
                trials,
                seed,
            });
        }
    }
    Ok(points)
}

/// Evaluates points on the worker pool; rows keep the input order.
pub fn run(points: &[Point], analysis: &AnalysisSection) -> Result<Vec<Row>, CliError> {
    let rows: Result<Vec<[Row; 2]>, CliError> = points.par_iter().map(|p| evaluate(p, analysis)).collect();
    Ok(rows?.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "strategy",
            "access",
            "user_role",
            "axis",
            "value",
            "p_analytic",
            "p_mc",
            "ci_low",
            "ci_high",
            "trials",
            "seed",
        ])
        .map_err(CliError::io)?;
    }
    for r in rows {
        w.serialize(r).map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

/// Human-readable names of decoding steps that can never succeed.
pub fn infeasible_steps(p: &Point) -> Vec<&'static str> {
    let thr = thresholds(&p.scenario.link, &p.scenario.network, p.strategy, p.access);
    let named: Vec<(&'static str, Coeff)> = match thr.coeffs {
        DecodeCoeffs::UserCentric(c) => vec![
            ("typical user as the near user", c.near_joint),
            ("typical user as the far user", c.far_own),
            ("fixed user as the far user", c.fixed_far),
            ("fixed user as the near user", c.fixed_near_joint),
        ],
        DecodeCoeffs::UavCentric(c) => vec![("near user", c.near_joint), ("far user", c.far_own)],
        DecodeCoeffs::Oma { own, other } => match p.strategy {
            Strategy::UserCentric => vec![("typical user", own), ("fixed user", other)],
            Strategy::UavCentric => vec![("near user", own), ("far user", other)],
        },
    };
    named.into_iter().filter(|(_, c)| !c.is_feasible()).map(|(n, _)| n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentFile;

    fn spec(json: &str) -> (SweepSpec, Scenario) {
        let f = ExperimentFile::parse(json).unwrap();
        (f.sweep.clone().unwrap(), f.scenario().unwrap())
    }

    #[test]
    fn expansion_is_series_major() {
        let (s, base) = spec(
            r#"{"sweep": {"axis": "tx_power_dbm", "values": [-40, -30],
                "series": [{"ipsic": 0.0}, {"ipsic": 0.3, "access": "oma"}]}}"#,
        );
        let pts = expand(&s, &base, 10, 3).unwrap();
        let summary: Vec<_> = pts.iter().map(|p| (p.axis.as_str(), p.value, p.access)).collect();
        assert_eq!(
            summary,
            [
                ("tx_power_dbm;ipsic=0", -40.0, Access::Noma),
                ("tx_power_dbm;ipsic=0", -30.0, Access::Noma),
                ("tx_power_dbm;ipsic=0.3", -40.0, Access::Oma),
                ("tx_power_dbm;ipsic=0.3", -30.0, Access::Oma),
            ]
        );
        assert_eq!(pts[3].scenario.link.ipsic, 0.3);
    }

    #[test]
    fn analytic_mode_leaves_mc_columns_empty() {
        let (s, base) = spec(r#"{"sweep": {"axis": "rate_near", "values": [1.0], "mode": "analytic"}}"#);
        let rows = run(&expand(&s, &base, 10, 1).unwrap(), &AnalysisSection::default()).unwrap();
        assert_eq!(rows.len(), 2);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "strategy,access,user_role,axis,value,p_analytic,p_mc,ci_low,ci_high,trials,seed"
        );
        let typical = lines.next().unwrap();
        assert!(typical.starts_with("user-centric,noma,typical,rate_near,1.0,0."), "{typical}");
        assert!(typical.ends_with(",,,,,"), "{typical}");
    }

    #[test]
    fn reports_infeasible_steps() {
        let (s, base) = spec(r#"{"link": {"ipsic": 0.5, "rate_near": 1.5, "rate_far": 1.0},
            "sweep": {"axis": "rate_near", "values": [1.5], "strategy": "uav-centric"}}"#);
        let pts = expand(&s, &base, 10, 1).unwrap();
        assert_eq!(infeasible_steps(&pts[0]), ["near user"]);
    }
}
