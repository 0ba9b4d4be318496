//! Experiment configuration: a JSON document with `network`, `link`,
//! `sweep` and `analysis` sections. Powers are given in dBm here and
//! converted to watts once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use uavnoma::analytic::uav_centric::NeighbourModel;
use uavnoma::analytic::user_centric::FixedUserInterference;
use uavnoma::scenario::{
    dbm_to_watts, noise_from_bandwidth, Access, NetworkConfig, NomaLink, Strategy, REFERENCE_BANDWIDTH_HZ,
    REFERENCE_DENSITY,
};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentFile {
    pub network: NetworkSection,
    pub link: LinkSection,
    pub sweep: Option<SweepSpec>,
    pub analysis: AnalysisSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSection {
    /// UAVs per square metre.
    pub uav_density: f64,
    pub uav_height_m: f64,
    pub tx_power_dbm: f64,
    pub alpha_desired: f64,
    pub alpha_interf: f64,
    pub m_desired: u32,
    pub m_interf: u32,
    /// Overrides the bandwidth-derived noise floor when present.
    pub noise_dbm: Option<f64>,
    pub bandwidth_hz: f64,
    pub sim_disc_radius_m: f64,
    pub hole_halfwidth_m: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection {
            uav_density: REFERENCE_DENSITY,
            uav_height_m: 100.0,
            tx_power_dbm: -30.0,
            alpha_desired: 3.0,
            alpha_interf: 4.0,
            m_desired: 1,
            m_interf: 1,
            noise_dbm: None,
            bandwidth_hz: REFERENCE_BANDWIDTH_HZ,
            sim_disc_radius_m: 10_000.0,
            hole_halfwidth_m: 0.1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    /// Power fraction of the far (or fixed) user, `α_v²`.
    pub power_split_far: f64,
    pub rate_near: f64,
    pub rate_far: f64,
    pub ipsic: f64,
    pub fixed_user_dist_m: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        LinkSection {
            power_split_far: 0.6,
            rate_near: 1.0,
            rate_far: 0.5,
            ipsic: 0.0,
            fixed_user_dist_m: 300.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FixedUserModel {
    SharedExclusion,
    #[default]
    ExactGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UavNeighbourModel {
    #[default]
    ClosedForm,
    ExactGeometry,
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub fixed_user_model: FixedUserModel,
    pub neighbour_model: UavNeighbourModel,
}

impl AnalysisSection {
    pub fn fixed_user(&self) -> FixedUserInterference {
        match self.fixed_user_model {
            FixedUserModel::SharedExclusion => FixedUserInterference::SharedExclusion,
            FixedUserModel::ExactGeometry => FixedUserInterference::ExactGeometry,
        }
    }

    pub fn neighbour(&self) -> NeighbourModel {
        match self.neighbour_model {
            UavNeighbourModel::ClosedForm => NeighbourModel::ClosedForm,
            UavNeighbourModel::ExactGeometry => NeighbourModel::ExactGeometry,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Analytic,
    Mc,
    #[default]
    Both,
}

impl Mode {
    pub fn analytic(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }

    pub fn mc(self) -> bool {
        matches!(self, Mode::Mc | Mode::Both)
    }
}

/// Parameters that can be swept or overridden per series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    TxPowerDbm,
    RateNear,
    RateFar,
    Ipsic,
    UavDensity,
    FixedUserDist,
    PowerSplitFar,
    AlphaDesired,
    AlphaInterf,
    MDesired,
    MInterf,
    UavHeight,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::TxPowerDbm => "tx_power_dbm",
            Param::RateNear => "rate_near",
            Param::RateFar => "rate_far",
            Param::Ipsic => "ipsic",
            Param::UavDensity => "uav_density",
            Param::FixedUserDist => "fixed_user_dist",
            Param::PowerSplitFar => "power_split_far",
            Param::AlphaDesired => "alpha_desired",
            Param::AlphaInterf => "alpha_interf",
            Param::MDesired => "m_desired",
            Param::MInterf => "m_interf",
            Param::UavHeight => "uav_height",
        }
    }

    /// Parameters allowed on the sweep axis; the rest only in series.
    pub fn is_axis(self) -> bool {
        matches!(
            self,
            Param::TxPowerDbm
                | Param::RateNear
                | Param::RateFar
                | Param::Ipsic
                | Param::UavDensity
                | Param::FixedUserDist
                | Param::PowerSplitFar
        )
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One curve of a sweep: parameter overrides applied before the axis.
#[derive(Debug, Clone, Deserialize, Default)]
pub struct Series {
    pub access: Option<Access>,
    #[serde(flatten)]
    pub params: BTreeMap<Param, f64>,
}

/// Shortest round-trip form, in scientific notation for tiny or huge values.
pub fn compact(v: f64) -> String {
    if v != 0.0 && !(1e-3..1e6).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

impl Series {
    /// `ipsic=0.1;alpha_desired=3.5`, or empty with no overrides.
    pub fn label(&self) -> String {
        self.params
            .iter()
            .map(|(p, v)| format!("{p}={}", compact(*v)))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Param,
    pub values: Vec<f64>,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default = "default_access")]
    pub access: Access,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub series: Vec<Series>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_strategy() -> Strategy {
    Strategy::UserCentric
}

fn default_access() -> Access {
    Access::Noma
}

fn default_trials() -> u64 {
    100_000
}

fn default_seed() -> u64 {
    1
}

/// Network and link in internal units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub network: NetworkConfig,
    pub link: NomaLink,
}

impl ExperimentFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: ExperimentFile = serde_json::from_str(text)
            .map_err(|e| CliError::Config(e.to_string()))?;
        file.check()?;
        Ok(file)
    }

    fn check(&self) -> Result<(), CliError> {
        self.scenario()?;
        if let Some(sweep) = &self.sweep {
            sweep.check(&self.scenario()?)?;
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let n = &self.network;
        let noise = match n.noise_dbm {
            Some(dbm) => dbm_to_watts(dbm),
            None => noise_from_bandwidth(n.bandwidth_hz).map_err(|e| field_error("network", e))?,
        };
        let network = NetworkConfig {
            uav_density: n.uav_density,
            uav_height: n.uav_height_m,
            tx_power: dbm_to_watts(n.tx_power_dbm),
            alpha_desired: n.alpha_desired,
            alpha_interf: n.alpha_interf,
            m_desired: n.m_desired,
            m_interf: n.m_interf,
            noise_power: noise,
            sim_disc_radius: n.sim_disc_radius_m,
            hole_halfwidth: n.hole_halfwidth_m,
        };
        let l = &self.link;
        let link = NomaLink::new(l.power_split_far, l.rate_near, l.rate_far, l.ipsic, l.fixed_user_dist_m);
        let s = Scenario { network, link };
        s.validate("")?;
        Ok(s)
    }
}

fn field_error(section: &str, e: uavnoma::Error) -> CliError {
    match e {
        uavnoma::Error::Config { field, reason } => CliError::Config(format!("field `{section}.{field}`: {reason}")),
        other => CliError::Config(format!("section `{section}`: {other}")),
    }
}

impl Scenario {
    fn validate(&self, context: &str) -> Result<(), CliError> {
        let wrap = |section: &str, e| match field_error(section, e) {
            CliError::Config(m) if !context.is_empty() => CliError::Config(format!("{context}: {m}")),
            other => other,
        };
        self.network.validate().map_err(|e| wrap("network", e))?;
        self.link.validate().map_err(|e| wrap("link", e))
    }

    /// Copy with `param` set to `value`.
    pub fn with(&self, param: Param, value: f64) -> Result<Scenario, CliError> {
        let mut s = *self;
        let integer = |v: f64| -> Result<u32, CliError> {
            if v.fract() == 0.0 && (1.0..=u32::MAX as f64).contains(&v) {
                Ok(v as u32)
            } else {
                Err(CliError::Config(format!("`{param}` must be a positive integer, got {value}")))
            }
        };
        match param {
            Param::TxPowerDbm => s.network.tx_power = dbm_to_watts(value),
            Param::RateNear => s.link.rate_near = value,
            Param::RateFar => s.link.rate_far = value,
            Param::Ipsic => s.link.ipsic = value,
            Param::UavDensity => s.network.uav_density = value,
            Param::FixedUserDist => s.link.fixed_user_horiz_dist = value,
            Param::PowerSplitFar => {
                s.link = NomaLink::new(value, s.link.rate_near, s.link.rate_far, s.link.ipsic, s.link.fixed_user_horiz_dist)
            }
            Param::AlphaDesired => s.network.alpha_desired = value,
            Param::AlphaInterf => s.network.alpha_interf = value,
            Param::MDesired => s.network.m_desired = integer(value)?,
            Param::MInterf => s.network.m_interf = integer(value)?,
            Param::UavHeight => s.network.uav_height = value,
        }
        if !value.is_finite() {
            return Err(CliError::Config(format!("`{param}` must be finite, got {value}")));
        }
        s.validate(&format!("{param}={value}"))?;
        Ok(s)
    }
}

impl SweepSpec {
    fn check(&self, base: &Scenario) -> Result<(), CliError> {
        if !self.axis.is_axis() {
            return Err(CliError::Config(format!(
                "field `sweep.axis`: `{}` can only be set per series",
                self.axis
            )));
        }
        if self.values.is_empty() {
            return Err(CliError::Config("field `sweep.values`: must not be empty".into()));
        }
        if self.trials == 0 && self.mode.mc() {
            return Err(CliError::Config("field `sweep.trials`: must be >= 1".into()));
        }
        for series in self.series_or_default() {
            let s = series.apply(base)?;
            for &v in &self.values {
                s.with(self.axis, v)?;
            }
        }
        Ok(())
    }

    /// The declared series, or a single empty one.
    pub fn series_or_default(&self) -> Vec<Series> {
        if self.series.is_empty() {
            vec![Series::default()]
        } else {
            self.series.clone()
        }
    }
}

impl Series {
    pub fn apply(&self, base: &Scenario) -> Result<Scenario, CliError> {
        self.params.iter().try_fold(*base, |s, (&p, &v)| s.with(p, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_reference() {
        let f = ExperimentFile::parse("{}").unwrap();
        let s = f.scenario().unwrap();
        assert_eq!(s.network, NetworkConfig::reference());
        assert_eq!(s.link, NomaLink::reference());
        assert!(f.sweep.is_none());
    }

    #[test]
    fn syntax_errors_report_position() {
        let err = ExperimentFile::parse("{\n  \"network\": {\n    \"tx_power_dbm\": ,\n  }\n}").unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.ends_with("line 3 column 21"), "{msg}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ExperimentFile::parse(r#"{"network": {"tx_power": 1}}"#).unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.contains("tx_power"), "{msg}");
    }

    #[test]
    fn domain_errors_name_the_field() {
        let err = ExperimentFile::parse(r#"{"network": {"alpha_interf": 2.0}}"#).unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.contains("network.alpha_interf"), "{msg}");
        let err = ExperimentFile::parse(
            r#"{"sweep": {"axis": "ipsic", "values": [0.0, 1.5]}}"#,
        )
        .unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.contains("ipsic=1.5") && msg.contains("link.ipsic"), "{msg}");
    }

    #[test]
    fn series_overrides_and_labels() {
        let f = ExperimentFile::parse(
            r#"{"sweep": {"axis": "tx_power_dbm", "values": [-30],
                "series": [{"ipsic": 0.1, "m_desired": 2, "access": "oma"}]}}"#,
        )
        .unwrap();
        let sweep = f.sweep.clone().unwrap();
        let series = &sweep.series[0];
        assert_eq!(series.access, Some(Access::Oma));
        assert_eq!(series.label(), "ipsic=0.1;m_desired=2");
        assert_eq!(compact(1.5e-6), "1.5e-6");
        assert_eq!(compact(0.25), "0.25");
        let s = series.apply(&f.scenario().unwrap()).unwrap();
        assert_eq!(s.link.ipsic, 0.1);
        assert_eq!(s.network.m_desired, 2);
    }

    #[test]
    fn series_only_parameters_cannot_be_swept() {
        assert!(ExperimentFile::parse(r#"{"sweep": {"axis": "m_desired", "values": [1]}}"#).is_err());
        assert!(ExperimentFile::parse(r#"{"sweep": {"axis": "rate_near", "values": []}}"#).is_err());
        assert!(ExperimentFile::parse(
            r#"{"sweep": {"axis": "rate_near", "values": [1], "series": [{"m_desired": 1.5}]}}"#
        )
        .is_err());
    }

    #[test]
    fn power_split_keeps_fractions_summing_to_one() {
        let base = ExperimentFile::parse("{}").unwrap().scenario().unwrap();
        let s = base.with(Param::PowerSplitFar, 0.81).unwrap();
        assert_eq!(s.link.pw_far, 0.81);
        assert!((s.link.pw_near - 0.19).abs() < 1e-15);
    }
}
