//! Scenario reports and sweep rows shared by the CLI and the tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, claimed_gap};
use crate::channel::{gen_channel_for, lambda_sets, DecodeReport, Verifier, DEFAULT_PRIME};
use crate::config::{Demands, SystemConfig};
use crate::delivery::{matching, schedule_with, Census, CensusSummary, Schedule, SchemeChoice};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::types::SchemeTag;

/// One verification request, as read from a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(rename = "K1")]
    pub k1: u32,
    pub gamma1: Rational,
    #[serde(rename = "K2")]
    pub k2: u32,
    pub gamma2: Rational,
    #[serde(rename = "L")]
    pub l: u32,
    /// Defaults to `K1 + K2`.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub scheme: SchemeChoice,
    /// File requested by each user; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demands: Option<Vec<u32>>,
}

fn default_seed() -> u64 {
    1
}

impl Scenario {
    pub fn config(&self) -> Result<SystemConfig> {
        let n = self.n.unwrap_or(self.k1 + self.k2);
        SystemConfig::new(self.k1, self.gamma1.clone(), self.k2, self.gamma2.clone(), self.l, n)
    }
}

/// Options of [`check_config`].
#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Decode over `F_p` when the schedule has at most this many
    /// transmissions; `None` always decodes.
    pub decode_cap: Option<u64>,
    pub seed: u64,
    pub prime: u64,
    pub scheme: SchemeChoice,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { decode_cap: None, seed: 1, prime: DEFAULT_PRIME, scheme: SchemeChoice::Auto }
    }
}

/// Everything verified about one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigCheck {
    pub config: SystemConfig,
    pub scheme: SchemeTag,
    pub regime: &'static str,
    pub subpacketization: u64,
    pub multiplier: Rational,
    pub transmissions: u64,
    pub measured_delay: Rational,
    pub formula_delay: Rational,
    pub formula: &'static str,
    pub delay_matches: bool,
    pub census: CensusSummary,
    /// Whether the XOR/uncoded pairing graph has a perfect matching, for
    /// cache-less designs with an uncoded phase.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matching: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decode: Option<DecodeReport>,
}

impl ConfigCheck {
    pub fn passed(&self) -> bool {
        self.delay_matches
            && self.census.complete
            && self.matching != Some(false)
            && self.decode.as_ref().is_none_or(|d| d.success)
    }
}

/// Closed-form delay the schedule of `choice` should meet.
pub fn formula_delay(cfg: &SystemConfig, scheme: SchemeTag) -> (Rational, &'static str) {
    match scheme {
        SchemeTag::Homogeneous => (analysis::homogeneous_delay(cfg.k1, &cfg.gamma1, cfg.l), "homogeneous"),
        _ => (analysis::achievable_delay(cfg), analysis::achievable_branch(cfg)),
    }
}

/// Schedules `cfg`, runs the census (and the channel decoder, within
/// `decode_cap`) in one streaming pass, and compares the delay with its
/// closed form.
pub fn check_config(cfg: &SystemConfig, demands: &Demands, opts: &CheckOptions) -> Result<ConfigCheck> {
    let schedule = schedule_with(opts.scheme, cfg, demands)?;
    check_schedule(&schedule, opts)
}

pub fn check_schedule(schedule: &Schedule, opts: &CheckOptions) -> Result<ConfigCheck> {
    let cfg = schedule.config();
    let decode = opts.decode_cap.is_none_or(|cap| schedule.transmission_count() <= cap);
    let mut census = Census::new(schedule.layout(), schedule.demands(), cfg.l);
    let decode_report = if decode {
        let channel = gen_channel_for(cfg.k(), cfg.l, opts.seed, opts.prime, &lambda_sets(schedule)?)?;
        let mut v = Verifier::new(&channel, schedule.layout(), schedule.demands());
        schedule.run(&mut |tx| {
            census.observe(tx)?;
            v.observe(tx)
        })?;
        Some(v.finish())
    } else {
        schedule.run(&mut |tx| census.observe(tx))?;
        None
    };
    let census = census.summary();
    let measured = Rational::new(census.transmissions as i64, schedule.subpacketization() as i64);
    let (formula_delay, formula) = formula_delay(cfg, schedule.scheme());
    let matching = matching::MatchingInstance::for_config(cfg)
        .ok()
        .flatten()
        .filter(|_| schedule.scheme() == SchemeTag::Cacheless)
        .map(|inst| matching::verify_perfect_matching(&inst).perfect);
    Ok(ConfigCheck {
        config: cfg.clone(),
        scheme: schedule.scheme(),
        regime: schedule.design().regime(),
        subpacketization: schedule.subpacketization(),
        multiplier: schedule.placement().multiplier.clone(),
        transmissions: census.transmissions,
        delay_matches: measured == formula_delay,
        measured_delay: measured,
        formula_delay,
        formula,
        census,
        matching,
        decode: decode_report,
    })
}

/// The `verify` report of the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub passed: bool,
    #[serde(flatten)]
    pub check: ConfigCheck,
}

pub fn run_scenario(scenario: &Scenario, prime: u64) -> Result<ScenarioReport> {
    let cfg = scenario.config()?;
    let demands = Demands::for_config(&cfg, scenario.demands.clone())?;
    let opts = CheckOptions { decode_cap: None, seed: scenario.seed, prime, scheme: scenario.scheme };
    let check = check_config(&cfg, &demands, &opts)?;
    Ok(ScenarioReport { scenario: scenario.clone(), passed: check.passed(), check })
}

/// Parameter grid of a sweep. Combinations that are not valid
/// configurations are skipped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub k1: Vec<u32>,
    pub gamma1: Vec<Rational>,
    pub k2: Vec<u32>,
    pub gamma2: Vec<Rational>,
    pub l: Vec<u32>,
}

impl SweepSpec {
    pub fn combinations(&self) -> u64 {
        [self.k1.len(), self.gamma1.len(), self.k2.len(), self.gamma2.len(), self.l.len()]
            .iter()
            .map(|&n| n as u64)
            .product()
    }

    /// Valid configurations in grid order (`K1` outermost, `L` innermost).
    pub fn configs(&self) -> Vec<SystemConfig> {
        let mut out = Vec::new();
        for &k1 in &self.k1 {
            for g1 in &self.gamma1 {
                for &k2 in &self.k2 {
                    for g2 in &self.gamma2 {
                        for &l in &self.l {
                            if let Ok(c) = SystemConfig::with_min_library(k1, g1.clone(), k2, g2.clone(), l) {
                                out.push(c);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Column names of [`SweepRow`], in order.
pub const SWEEP_HEADER: [&str; 17] = [
    "K1",
    "gamma1",
    "K2",
    "gamma2",
    "L",
    "branch",
    "achievable",
    "achievable_decimal",
    "bound",
    "gap",
    "claimed_gap",
    "homogeneous",
    "dof",
    "single_antenna",
    "boost",
    "extra_antenna",
    "extra_cache",
];

/// One CSV row of a delay sweep. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "K1")]
    pub k1: u32,
    pub gamma1: Rational,
    #[serde(rename = "K2")]
    pub k2: u32,
    pub gamma2: Rational,
    #[serde(rename = "L")]
    pub l: u32,
    pub branch: &'static str,
    pub achievable: Rational,
    pub achievable_decimal: String,
    pub bound: Option<Rational>,
    pub gap: Option<Rational>,
    pub claimed_gap: Option<Rational>,
    pub homogeneous: Rational,
    pub dof: Rational,
    /// Same system with one antenna.
    pub single_antenna: Rational,
    /// `single_antenna / achievable`.
    pub boost: Rational,
    /// Same system with `L + 1` antennas.
    pub extra_antenna: Rational,
    /// Same system with `K2γ2` one larger, when that stays below `γ1`.
    pub extra_cache: Option<Rational>,
}

pub fn sweep_row(cfg: &SystemConfig) -> SweepRow {
    let s = analysis::summarize(cfg);
    let with = |l: u32, g2: Rational| {
        let mut c = cfg.clone();
        c.l = l;
        c.gamma2 = g2;
        analysis::achievable_delay(&c)
    };
    let single_antenna = with(1, cfg.gamma2.clone());
    let extra_cache = (cfg.k2 > 0)
        .then(|| cfg.gamma2.clone() + Rational::new(1, cfg.k2 as i64))
        .filter(|g| *g < cfg.gamma1)
        .map(|g| with(cfg.l, g));
    SweepRow {
        k1: cfg.k1,
        gamma1: cfg.gamma1.clone(),
        k2: cfg.k2,
        gamma2: cfg.gamma2.clone(),
        l: cfg.l,
        branch: s.branch,
        achievable_decimal: s.achievable.to_decimal_string(),
        boost: single_antenna.clone() / s.achievable.clone(),
        achievable: s.achievable,
        claimed_gap: s.bound.as_ref().map(|_| claimed_gap(cfg.k1, &cfg.gamma1, cfg.k2, cfg.l)),
        bound: s.bound,
        gap: s.gap,
        homogeneous: s.homogeneous,
        dof: s.dof,
        single_antenna,
        extra_antenna: with(cfg.l + 1, cfg.gamma2.clone()),
        extra_cache,
    }
}

/// Rows of every valid configuration in `spec`, computed in parallel.
/// Fails when the grid has more than `cap` combinations.
pub fn sweep(spec: &SweepSpec, cap: u64) -> Result<Vec<SweepRow>> {
    let n = spec.combinations();
    if n > cap {
        return Err(Error::InvalidConfig(format!("sweep has {n} combinations, cap is {cap}")));
    }
    Ok(spec.configs().par_iter().map(sweep_row).collect())
}

/// Every configuration with integral redundancies `K1γ1`, `K2γ2` and
/// `K1 ≤ max_k1`, `K2 ≤ max_k2`, `L ≤ max_l`.
pub fn integral_configs(max_k1: u32, max_k2: u32, max_l: u32) -> Vec<SystemConfig> {
    let mut out = Vec::new();
    for k1 in 2..=max_k1 {
        for t1 in 1..k1 {
            let g1 = Rational::new(t1 as i64, k1 as i64);
            for k2 in 0..=max_k2 {
                for t2 in 0..k2.max(1) {
                    let g2 = if k2 == 0 { Rational::zero() } else { Rational::new(t2 as i64, k2 as i64) };
                    for l in 1..=max_l {
                        if let Ok(c) = SystemConfig::with_min_library(k1, g1.clone(), k2, g2.clone(), l) {
                            out.push(c);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Outcome of [`verify_sweep`] for one configuration.
#[derive(Debug, Clone, Serialize)]
pub enum SweepOutcome {
    Checked(Box<ConfigCheck>),
    /// No construction exists for this configuration.
    Unsupported(String),
    /// The construction failed while running (a bug).
    Failed(String),
}

/// Schedules and checks every configuration in parallel.
pub fn verify_sweep(configs: &[SystemConfig], opts: &CheckOptions) -> Vec<(SystemConfig, SweepOutcome)> {
    configs
        .par_iter()
        .map(|cfg| {
            let demands = Demands::identity(cfg.k());
            let outcome = match schedule_with(opts.scheme, cfg, &demands) {
                Err(e) if e.is_config_error() => SweepOutcome::Unsupported(e.to_string()),
                Err(e) => SweepOutcome::Failed(e.to_string()),
                Ok(s) => match check_schedule(&s, opts) {
                    Ok(c) => SweepOutcome::Checked(Box::new(c)),
                    Err(e) => SweepOutcome::Failed(e.to_string()),
                },
            };
            (cfg.clone(), outcome)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn scenario_defaults() {
        let s: Scenario =
            serde_json::from_str(r#"{"K1":5,"gamma1":"1/5","K2":2,"gamma2":"0","L":2}"#).unwrap();
        assert_eq!(s.seed, 1);
        assert_eq!(s.scheme, SchemeChoice::Auto);
        assert_eq!(s.config().unwrap().n, 7);
        assert!(serde_json::from_str::<Scenario>(r#"{"K1":5,"gamma1":"1/5","K2":2,"gamma2":"0","L":2,"x":1}"#).is_err());
    }

    #[test]
    fn worked_scenario() {
        let s: Scenario =
            serde_json::from_str(r#"{"K1":5,"gamma1":"1/5","K2":2,"gamma2":"0","L":2,"N":7,"seed":3}"#).unwrap();
        let rep = run_scenario(&s, DEFAULT_PRIME).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.check.subpacketization, 20);
        assert_eq!(rep.check.transmissions, 40);
        assert_eq!(rep.check.measured_delay, 2);
        assert_eq!(rep.check.matching, Some(true));
        let a = serde_json::to_string(&rep).unwrap();
        let b = serde_json::to_string(&run_scenario(&s, DEFAULT_PRIME).unwrap()).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["measured_delay"], "2/1");
        assert_eq!(v["decode"]["success"], true);
    }

    #[test]
    fn non_integral_scenario_is_config_error() {
        let s: Scenario = serde_json::from_str(r#"{"K1":5,"gamma1":"1/3","K2":2,"gamma2":"0","L":2}"#).unwrap();
        let e = run_scenario(&s, DEFAULT_PRIME).unwrap_err();
        assert!(matches!(e, Error::NonIntegerRedundancy { .. }));
        assert!(e.is_config_error());
    }

    #[test]
    fn sweep_rows_and_cap() {
        let spec = SweepSpec {
            k1: vec![5],
            gamma1: vec![r(1, 5)],
            k2: vec![2, 4, 6],
            gamma2: vec![Rational::zero()],
            l: vec![1, 2],
        };
        let rows = sweep(&spec, 100).unwrap();
        assert_eq!(rows.len(), 6);
        // K2 = (L̃−1)T_{K1}: L̃ = 2 for K2 = 2
        let row = rows.iter().find(|r| r.k2 == 2 && r.l == 2).unwrap();
        assert_eq!(row.boost, 2);
        assert_eq!(row.achievable, 2);
        assert!(sweep(&spec, 5).is_err());
        assert!(sweep(&SweepSpec::default(), 10).unwrap().is_empty());
    }

    #[test]
    fn header_matches_fields() {
        let c = SystemConfig::with_min_library(5, r(1, 5), 2, Rational::zero(), 2).unwrap();
        let v = serde_json::to_value(sweep_row(&c)).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut want = SWEEP_HEADER.to_vec();
        want.sort_unstable();
        let mut keys = keys;
        keys.sort_unstable();
        assert_eq!(keys, want);
    }

    #[test]
    fn extra_antenna_matches_extra_cache() {
        // K2 ≤ (L−1)T: one more antenna or one more cached unit in group 2 give the same DoF
        let c = SystemConfig::with_min_library(6, r(1, 2), 3, Rational::zero(), 4).unwrap();
        let row = sweep_row(&c);
        let load_antenna = Rational::from(3 + 3u32);
        let load_cache = Rational::from(3 + 2u32);
        assert_eq!(load_antenna / row.extra_antenna, load_cache / row.extra_cache.unwrap());
    }

    #[test]
    fn small_sweep_verifies() {
        let configs = integral_configs(5, 3, 3);
        let opts = CheckOptions { decode_cap: Some(5_000), ..CheckOptions::default() };
        let out = verify_sweep(&configs, &opts);
        let mut checked = 0;
        for (cfg, o) in &out {
            match o {
                SweepOutcome::Checked(c) => {
                    assert!(c.passed(), "{cfg:?}: {c:?}");
                    checked += 1;
                }
                SweepOutcome::Failed(e) => panic!("{cfg:?}: {e}"),
                SweepOutcome::Unsupported(_) => {}
            }
        }
        assert!(checked > 50, "{checked}");
    }
}
