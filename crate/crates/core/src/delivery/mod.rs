//! Transmission schedules.
//!
//! A [`Schedule`] is a lazily generated plan: [`Schedule::run`] streams the
//! transmissions in loop order to a callback, and [`Schedule::plan`]
//! collects them. Piece copies are assigned on the fly, one fresh copy per
//! delivery of a class.

mod beta;
mod census;
mod engine;
pub mod matching;

pub use beta::beta_set;
pub use census::{census, Census, CensusSummary, IncompleteClass};
pub use matching::{
    build_matching, is_valid_perfect_matching, verify_perfect_matching, LeftNode, MatchedPair, MatchingInstance,
    MatchingOutcome, RightNode,
};

use serde::Serialize;

use crate::config::{Demands, SystemConfig};
use crate::error::{Error, Result};
use crate::placement::{
    place_homogeneous, split_streams, twotype_result, CachelessDesign, CachelessRegime, Layout, PlacementResult,
    TwotypeDesign, TwotypePlan,
};
use crate::rational::Rational;
use crate::types::{SchemeTag, Transmission, TransmissionPlan};
use engine::Emitter;

/// Which construction a schedule runs, with its repetition counts.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "design", rename_all = "kebab-case")]
pub enum Design {
    Homogeneous { users: u32, t: u32, streams: u32 },
    Cacheless(CachelessDesign),
    Twotype(TwotypePlan),
}

impl Design {
    /// Short regime name for reports.
    pub fn regime(&self) -> &'static str {
        match self {
            Design::Homogeneous { .. } => "homogeneous",
            Design::Cacheless(d) => match d.regime {
                CachelessRegime::SingleStream => "single-stream",
                CachelessRegime::NoCacheless => "no-cacheless",
                CachelessRegime::Balanced => "balanced",
                CachelessRegime::CacheAidedTail => "cache-aided-tail",
                CachelessRegime::CachelessTail => "cacheless-tail",
            },
            Design::Twotype(p) => match &p.design {
                TwotypeDesign::Rounds { d, .. } if *d > 1 => "fractional-split",
                TwotypeDesign::Rounds { .. } => "integer-split",
                TwotypeDesign::Residual { .. } => "residual",
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Schedule {
    config: SystemConfig,
    demands: Demands,
    placement: PlacementResult,
    design: Design,
}

impl Schedule {
    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn demands(&self) -> &Demands {
        &self.demands
    }

    pub fn placement(&self) -> &PlacementResult {
        &self.placement
    }

    pub fn layout(&self) -> &Layout {
        &self.placement.layout
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn scheme(&self) -> SchemeTag {
        self.placement.scheme
    }

    pub fn subpacketization(&self) -> u64 {
        self.placement.subpacketization()
    }

    /// Transmission count from the design, without generating anything.
    pub fn transmission_count(&self) -> u64 {
        match &self.design {
            Design::Homogeneous { users, t, .. } => {
                let (k, t) = (*users as u64, *t as u64);
                crate::users::binomial(k, t) * (k - t)
            }
            Design::Cacheless(d) => d.transmissions(&self.config),
            Design::Twotype(p) => p.transmissions(&self.config),
        }
    }

    /// `transmission_count / S`.
    pub fn expected_delay(&self) -> Rational {
        Rational::new(self.transmission_count() as i64, self.subpacketization() as i64)
    }

    /// Streams every transmission to `sink` in schedule order and returns
    /// how many were produced.
    pub fn run(&self, sink: &mut dyn FnMut(&Transmission) -> Result<()>) -> Result<u64> {
        let cfg = &self.config;
        let mut e = Emitter::new(&self.placement.layout, &self.demands, sink);
        match &self.design {
            Design::Homogeneous { users, t, streams } => engine::run_homogeneous(&mut e, *users, *t, *streams)?,
            Design::Cacheless(d) => engine::run_cacheless(&mut e, d, cfg.k1, cfg.k2, cfg.l)?,
            Design::Twotype(p) => engine::run_twotype(&mut e, p, cfg.k1, cfg.k2, cfg.l)?,
        }
        Ok(e.count())
    }

    pub fn plan(&self) -> Result<TransmissionPlan> {
        let mut transmissions = Vec::with_capacity(self.transmission_count() as usize);
        self.run(&mut |tx| {
            transmissions.push(tx.clone());
            Ok(())
        })?;
        Ok(TransmissionPlan { scheme: self.scheme(), subpacketization: self.subpacketization(), transmissions })
    }

    /// Runs the schedule through a fresh [`Census`].
    pub fn census(&self) -> Result<Census> {
        let mut c = Census::new(self.layout(), &self.demands, self.config.l);
        self.run(&mut |tx| c.observe(tx))?;
        Ok(c)
    }
}

fn check_demands(cfg: &SystemConfig, demands: &Demands) -> Result<()> {
    if demands.len() != cfg.k() as usize {
        return Err(Error::InvalidDemands(format!("{} demands for {} users", demands.len(), cfg.k())));
    }
    Demands::new(demands.as_slice().to_vec(), cfg.n).map(|_| ())
}

fn cacheless_schedule(cfg: &SystemConfig, demands: &Demands, d: CachelessDesign) -> Schedule {
    let n1 = cfg.k1 - d.t1;
    let placement = PlacementResult {
        scheme: SchemeTag::Cacheless,
        layout: Layout::single(cfg.k1, d.t1, d.copies, cfg.k2),
        multiplier: Rational::new(d.copies as i64, n1 as i64),
    };
    Schedule { config: cfg.clone(), demands: demands.clone(), placement, design: Design::Cacheless(d) }
}

/// The cache-less scheme in its base form: `K2 = (L−1)T_{K1}` with `T_{K1}` integral.
pub fn schedule_cacheless(cfg: &SystemConfig, demands: &Demands) -> Result<Schedule> {
    check_demands(cfg, demands)?;
    let t1 = cfg.t1_int()?;
    if cfg.gamma2.is_positive() {
        return Err(Error::RegimeMismatch("cache-less scheme needs gamma2 = 0".into()));
    }
    let tk1 = cfg.tk1();
    let threshold = &tk1 * (cfg.l as i64 - 1);
    if cfg.l < 2 || !tk1.is_integer() || threshold != cfg.k2 as i64 {
        return Err(Error::RegimeMismatch(format!(
            "the base cache-less scheme needs K2 = (L-1)T_K1 with integral T_K1; have K2 = {}, (L-1)T_K1 = {threshold}",
            cfg.k2
        )));
    }
    let d = CachelessDesign::new(cfg)?;
    debug_assert_eq!(d.copies, cfg.k1 - t1);
    Ok(cacheless_schedule(cfg, demands, d))
}

/// The cache-less scheme for any `K2`, including the boosted
/// subpacketization and the two-phase completions.
pub fn schedule_cacheless_general(cfg: &SystemConfig, demands: &Demands) -> Result<Schedule> {
    check_demands(cfg, demands)?;
    let d = CachelessDesign::new(cfg)?;
    Ok(cacheless_schedule(cfg, demands, d))
}

fn twotype_schedule(cfg: &SystemConfig, demands: &Demands, plan: TwotypePlan) -> Schedule {
    let placement = twotype_result(cfg, &plan);
    Schedule { config: cfg.clone(), demands: demands.clone(), placement, design: Design::Twotype(plan) }
}

/// The two-group scheme with an integer split that equalizes both groups.
pub fn schedule_twotype(cfg: &SystemConfig, demands: &Demands, l1: u32, l2: u32) -> Result<Schedule> {
    check_demands(cfg, demands)?;
    if l1 + l2 != cfg.l || l1 == 0 {
        return Err(Error::InvalidStreamSplit(format!("({l1}, {l2}) for L = {}", cfg.l)));
    }
    cfg.t1_int()?;
    cfg.t2_int()?;
    let split = split_streams(cfg)?;
    if split.clamped {
        return Err(Error::RegimeMismatch(
            "group 1 needs less than one stream; use the residual schedule".into(),
        ));
    }
    if split.l1 != l1 as i64 {
        return Err(Error::InvalidStreamSplit(format!(
            "({l1}, {l2}) does not equalize the groups; the split is ({}, {})",
            split.l1, split.l2
        )));
    }
    let plan = TwotypePlan::new(cfg, &split.l1)?;
    Ok(twotype_schedule(cfg, demands, plan))
}

/// The two-group scheme repeated `d²` times with mixed integer splits averaging to
/// `(l1, l2)`.
pub fn schedule_twotype_fractional(
    cfg: &SystemConfig,
    demands: &Demands,
    l1: &Rational,
    l2: &Rational,
) -> Result<Schedule> {
    check_demands(cfg, demands)?;
    if l1 + l2 != Rational::from(cfg.l) {
        return Err(Error::InvalidStreamSplit(format!("({l1}, {l2}) for L = {}", cfg.l)));
    }
    let plan = TwotypePlan::new(cfg, l1)?;
    if matches!(plan.design, TwotypeDesign::Residual { .. }) {
        return Err(Error::RegimeMismatch("split is in the residual regime".into()));
    }
    Ok(twotype_schedule(cfg, demands, plan))
}

/// One stream for group 1 until it is served, then the homogeneous scheme
/// on group 2.
pub fn schedule_twotype_residual(cfg: &SystemConfig, demands: &Demands) -> Result<Schedule> {
    check_demands(cfg, demands)?;
    cfg.t1_int()?;
    cfg.t2_int()?;
    let split = split_streams(cfg)?;
    if split.l1 != 1 {
        return Err(Error::RegimeMismatch(format!(
            "split ({}, {}) gives group 1 more than one stream",
            split.l1, split.l2
        )));
    }
    let plan = TwotypePlan::new(cfg, &Rational::one())?;
    Ok(twotype_schedule(cfg, demands, plan))
}

/// The homogeneous multi-antenna scheme on `K` users with cache fraction `gamma`.
pub fn schedule_homogeneous(k: u32, gamma: &Rational, l: u32, demands: &Demands) -> Result<Schedule> {
    let n = demands.as_slice().iter().copied().max().unwrap_or(0).max(k);
    let cfg = SystemConfig::new(k, gamma.clone(), 0, Rational::zero(), l, n)?;
    check_demands(&cfg, demands)?;
    let placement = place_homogeneous(k, gamma, l)?;
    let t = placement.layout.t1();
    if k - t < l {
        return Err(Error::InsufficientGround { available: (k - t) as usize - 1, requested: l as usize - 1 });
    }
    Ok(Schedule {
        config: cfg,
        demands: demands.clone(),
        placement,
        design: Design::Homogeneous { users: k, t, streams: l },
    })
}

/// Scheme selection used by the CLI and the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    #[default]
    Auto,
    Cacheless,
    Twotype,
    Homogeneous,
}

/// Picks the construction for `cfg`:
///
/// 1. `γ2 = 0`: the cache-less scheme (all `K2`).
/// 2. otherwise split the streams; `L1 = 1` after clamping or at the
///    boundary gives the residual schedule when group 1 finishes first,
///    an integral split gives one two-group pass, anything else the `d²`-round
///    extension.
pub fn schedule_auto(cfg: &SystemConfig, demands: &Demands) -> Result<Schedule> {
    if !cfg.gamma2.is_positive() {
        return schedule_cacheless_general(cfg, demands);
    }
    if cfg.l < 2 {
        return Err(Error::UnsupportedRegime("two-type delivery needs L >= 2".into()));
    }
    let split = split_streams(cfg)?;
    if split.clamped {
        return schedule_twotype_residual(cfg, demands);
    }
    if split.l1.is_integer() {
        let l1 = split.l1.to_u64().expect("integral") as u32;
        return schedule_twotype(cfg, demands, l1, cfg.l - l1);
    }
    schedule_twotype_fractional(cfg, demands, &split.l1, &split.l2)
}

pub fn schedule_with(choice: SchemeChoice, cfg: &SystemConfig, demands: &Demands) -> Result<Schedule> {
    match choice {
        SchemeChoice::Auto => schedule_auto(cfg, demands),
        SchemeChoice::Cacheless => schedule_cacheless_general(cfg, demands),
        SchemeChoice::Twotype => {
            if !cfg.gamma2.is_positive() {
                return Err(Error::RegimeMismatch("two-type scheme needs gamma2 > 0".into()));
            }
            schedule_auto(cfg, demands)
        }
        SchemeChoice::Homogeneous => {
            if cfg.k2 != 0 {
                return Err(Error::RegimeMismatch("homogeneous scheme needs K2 = 0".into()));
            }
            schedule_homogeneous(cfg.k1, &cfg.gamma1, cfg.l, demands)
        }
    }
}

#[cfg(test)]
mod tests;
