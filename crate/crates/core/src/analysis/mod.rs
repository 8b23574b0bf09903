//! Closed-form delays, bounds and comparisons.
//!
//! Everything here is exact rational arithmetic and accepts non-integral
//! `K1γ1`, unlike the scheme constructors.

mod converse;

pub use converse::{converse_counting_oracle, converse_xi_bound, xi_bound_minimum};

use serde::Serialize;

use crate::config::{t_k, SystemConfig};
use crate::error::{Error, Result};
use crate::rational::Rational;

fn q(n: u32) -> Rational {
    Rational::from(n)
}

/// Single-antenna delay of `k` users with cache `gamma`, on the lower
/// convex envelope of the integer-redundancy points.
pub fn t_k_envelope(k: u32, gamma: &Rational) -> Rational {
    let t = gamma * k as i64;
    if t.is_integer() {
        return t_k(k, gamma);
    }
    let lo = t.floor();
    let hi = t.ceil();
    let f = |x: &Rational| (q(k) - x) / (x.clone() + 1);
    let w = t - lo.clone();
    f(&lo) * (Rational::one() - w.clone()) + f(&hi) * w
}

/// Optimal single-antenna delay under uncoded placement:
/// `T_{K1} + K2`, with `T_{K1}` on its convex envelope.
pub fn delay_theorem1(k1: u32, gamma1: &Rational, k2: u32) -> Rational {
    t_k_envelope(k1, gamma1) + q(k2)
}

/// Which branch of the cache-less delay applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CachelessBranch {
    /// `K2 ≤ (L−1)T_{K1}`: `(K2 + K1(1−γ1))/(K1γ1 + L)`.
    Small,
    /// `K2 > (L−1)T_{K1}`: `T_{K1} + (K2 − (L−1)T_{K1})/min(L, K2)`.
    Large,
}

pub fn cacheless_branch(k1: u32, gamma1: &Rational, k2: u32, l: u32) -> CachelessBranch {
    if q(k2) <= t_k(k1, gamma1) * (l as i64 - 1) {
        CachelessBranch::Small
    } else {
        CachelessBranch::Large
    }
}

/// Achievable delay with `L` antennas and `K2` cache-less users.
pub fn delay_theorem2(k1: u32, gamma1: &Rational, k2: u32, l: u32) -> Rational {
    let tk1 = t_k(k1, gamma1);
    let t1 = gamma1 * k1 as i64;
    match cacheless_branch(k1, gamma1, k2, l) {
        CachelessBranch::Small => (q(k2) + q(k1) - t1.clone()) / (t1 + l as i64),
        CachelessBranch::Large => {
            let rest = q(k2) - tk1.clone() * (l as i64 - 1);
            tk1 + rest / q(l.min(k2))
        }
    }
}

/// Which branch of the two-type delay applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwotypeBranch {
    /// `T_{K1} ≥ K2(1−γ2)/(L−1+K2γ2)`: both groups finish together.
    Joint,
    /// Group 1 finishes first; group 2 continues alone.
    Residual,
}

pub fn twotype_branch(k1: u32, gamma1: &Rational, k2: u32, gamma2: &Rational, l: u32) -> TwotypeBranch {
    let t2 = gamma2 * k2 as i64;
    let n2 = q(k2) - t2.clone();
    let den = t2 + (l as i64 - 1);
    if den.is_zero() {
        // L = 1 with no second-group redundancy: group 2 is never co-served
        return if n2.is_zero() { TwotypeBranch::Joint } else { TwotypeBranch::Residual };
    }
    if t_k(k1, gamma1) >= n2 / den {
        TwotypeBranch::Joint
    } else {
        TwotypeBranch::Residual
    }
}

/// Achievable delay with two cache sizes `γ1 > γ2`.
pub fn delay_theorem4(k1: u32, gamma1: &Rational, k2: u32, gamma2: &Rational, l: u32) -> Rational {
    let t1 = gamma1 * k1 as i64;
    let t2 = gamma2 * k2 as i64;
    let n1 = q(k1) - t1.clone();
    let n2 = q(k2) - t2.clone();
    match twotype_branch(k1, gamma1, k2, gamma2, l) {
        TwotypeBranch::Joint => (n1 + n2) / (t1 + t2 + l as i64),
        TwotypeBranch::Residual => {
            let tk1 = t_k(k1, gamma1);
            let served = (t2.clone() + (l as i64 - 1)) * tk1.clone();
            tk1 + (n2 - served) / (t2 + l as i64).min(q(k2))
        }
    }
}

/// The achievable delay of `cfg`: [`delay_theorem2`] for `γ2 = 0`, [`delay_theorem4`]
/// otherwise.
pub fn achievable_delay(cfg: &SystemConfig) -> Rational {
    if cfg.gamma2.is_zero() {
        delay_theorem2(cfg.k1, &cfg.gamma1, cfg.k2, cfg.l)
    } else {
        delay_theorem4(cfg.k1, &cfg.gamma1, cfg.k2, &cfg.gamma2, cfg.l)
    }
}

/// Name of the formula branch [`achievable_delay`] uses.
pub fn achievable_branch(cfg: &SystemConfig) -> &'static str {
    if cfg.gamma2.is_zero() {
        match cacheless_branch(cfg.k1, &cfg.gamma1, cfg.k2, cfg.l) {
            CachelessBranch::Small => "cacheless-small",
            CachelessBranch::Large => "cacheless-large",
        }
    } else {
        match twotype_branch(cfg.k1, &cfg.gamma1, cfg.k2, &cfg.gamma2, cfg.l) {
            TwotypeBranch::Joint => "twotype-joint",
            TwotypeBranch::Residual => "twotype-residual",
        }
    }
}

/// Total content still missing at the users: `K1(1−γ1) + K2(1−γ2)`.
pub fn served_load(cfg: &SystemConfig) -> Rational {
    q(cfg.k1) - cfg.t1() + q(cfg.k2) - cfg.t2()
}

/// Users served per unit time.
pub fn dof(delay: &Rational, served_load: &Rational) -> Result<Rational> {
    if !delay.is_positive() {
        return Err(Error::InvalidConfig(format!("delay {delay} must be positive")));
    }
    Ok(served_load.clone() / delay.clone())
}

/// `K(1−γ)/(L+Kγ)`.
pub fn homogeneous_delay(k: u32, gamma: &Rational, l: u32) -> Rational {
    let t = gamma * k as i64;
    (q(k) - t.clone()) / (t + l as i64)
}

/// The single-size system with the same total cache: `(K, (K1γ1+K2γ2)/K)`.
pub fn homogeneous_equivalent(k1: u32, gamma1: &Rational, k2: u32, gamma2: &Rational) -> (u32, Rational) {
    let k = k1 + k2;
    (k, (gamma1 * k1 as i64 + gamma2 * k2 as i64) / k as i64)
}

/// Lower bound on the delay with cache-less users.
///
/// `L = 1` is the exact single-antenna optimum. Otherwise `min(K2,L)/L`
/// when `K2 ≥ (L−1)T_{K1}`, else the larger of that and half the
/// cache-aided-only delay.
pub fn lower_bound(k1: u32, gamma1: &Rational, k2: u32, l: u32) -> Rational {
    if l == 1 {
        return delay_theorem1(k1, gamma1, k2);
    }
    let cacheless = Rational::new(k2.min(l) as i64, l as i64);
    if q(k2) >= t_k(k1, gamma1) * (l as i64 - 1) {
        return cacheless;
    }
    let t1 = gamma1 * k1 as i64;
    let aided = (q(k1) - t1.clone()) / ((t1 + l as i64) * 2);
    cacheless.max(aided)
}

/// Achievable over lower bound for the cache-less setting.
pub fn gap_ratio(k1: u32, gamma1: &Rational, k2: u32, l: u32) -> Rational {
    delay_theorem2(k1, gamma1, k2, l) / lower_bound(k1, gamma1, k2, l)
}

/// The gap the analysis claims: 2 when `K2 ≥ (L−1)T_{K1}`, 3 otherwise.
pub fn claimed_gap(k1: u32, gamma1: &Rational, k2: u32, l: u32) -> Rational {
    if q(k2) >= t_k(k1, gamma1) * (l as i64 - 1) {
        Rational::from(2i64)
    } else {
        Rational::from(3i64)
    }
}

/// Stream split between the groups that equalizes their completion when
/// `K2 = (L̃−1)T_{K1}`: `l1 = L/L̃` and `T* = T_{K1}·L̃/L`.
pub fn optimal_stream_allocation(k1: u32, gamma1: &Rational, k2: u32, l: u32) -> Result<(Rational, Rational)> {
    let tk1 = t_k(k1, gamma1);
    let l_tilde = q(k2) / tk1.clone() + 1;
    if q(l) > l_tilde {
        return Err(Error::RegimeMismatch(format!("L = {l} exceeds the equalizing stream count {l_tilde}")));
    }
    let l1 = q(l) / l_tilde.clone();
    Ok((l1, tk1 * l_tilde / l as i64))
}

/// Everything the delay table reports for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelaySummary {
    pub achievable: Rational,
    pub branch: &'static str,
    /// Only for `γ2 = 0`.
    pub bound: Option<Rational>,
    pub gap: Option<Rational>,
    pub homogeneous: Rational,
    pub gamma_av: Rational,
    pub dof: Rational,
}

pub fn summarize(cfg: &SystemConfig) -> DelaySummary {
    let achievable = achievable_delay(cfg);
    let (bound, gap) = if cfg.gamma2.is_zero() {
        let b = lower_bound(cfg.k1, &cfg.gamma1, cfg.k2, cfg.l);
        let g = achievable.clone() / b.clone();
        (Some(b), Some(g))
    } else {
        (None, None)
    };
    let (k, gamma_av) = homogeneous_equivalent(cfg.k1, &cfg.gamma1, cfg.k2, &cfg.gamma2);
    DelaySummary {
        dof: served_load(cfg) / achievable.clone(),
        achievable,
        branch: achievable_branch(cfg),
        bound,
        gap,
        homogeneous: homogeneous_delay(k, &gamma_av, cfg.l),
        gamma_av,
    }
}
