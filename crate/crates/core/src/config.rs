use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::users::{User, UserSet, MAX_USER};

/// `(K1, γ1, K2, γ2, L, N)`: two user groups with different cache sizes
/// served by an `L`-antenna transmitter from a library of `N` files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemConfig {
    #[serde(rename = "K1")]
    pub k1: u32,
    pub gamma1: Rational,
    #[serde(rename = "K2")]
    pub k2: u32,
    pub gamma2: Rational,
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "N")]
    pub n: u32,
}

impl SystemConfig {
    pub fn new(k1: u32, gamma1: Rational, k2: u32, gamma2: Rational, l: u32, n: u32) -> Result<Self> {
        let cfg = SystemConfig { k1, gamma1, k2, gamma2, l, n };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Shorthand with `N = K1 + K2`.
    pub fn with_min_library(k1: u32, gamma1: Rational, k2: u32, gamma2: Rational, l: u32) -> Result<Self> {
        Self::new(k1, gamma1, k2, gamma2, l, k1 + k2)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.k1 == 0 {
            return bad("K1 must be at least 1".into());
        }
        if !(self.gamma1.is_positive() && self.gamma1 < 1) {
            return bad(format!("gamma1 = {} must lie in (0,1)", self.gamma1));
        }
        if self.gamma2.is_negative() || self.gamma2 >= self.gamma1 {
            return bad(format!("gamma2 = {} must lie in [0, gamma1)", self.gamma2));
        }
        if self.l == 0 {
            return bad("L must be at least 1".into());
        }
        if self.k() > MAX_USER {
            return bad(format!("at most {MAX_USER} users are supported"));
        }
        if self.n < self.k() {
            return bad(format!("N = {} is smaller than K = {}", self.n, self.k()));
        }
        Ok(())
    }

    pub fn k(&self) -> u32 {
        self.k1 + self.k2
    }

    /// `K1·γ1`, possibly fractional.
    pub fn t1(&self) -> Rational {
        &self.gamma1 * self.k1 as i64
    }

    /// `K2·γ2`, possibly fractional.
    pub fn t2(&self) -> Rational {
        &self.gamma2 * self.k2 as i64
    }

    /// Integral `K1·γ1`, as required by every scheme constructor.
    pub fn t1_int(&self) -> Result<u32> {
        integral(1, self.t1())
    }

    pub fn t2_int(&self) -> Result<u32> {
        integral(2, self.t2())
    }

    /// `T_{K1}`.
    pub fn tk1(&self) -> Rational {
        t_k(self.k1, &self.gamma1)
    }

    /// `T_{K2}`.
    pub fn tk2(&self) -> Rational {
        t_k(self.k2, &self.gamma2)
    }

    pub fn group1(&self) -> Vec<User> {
        (1..=self.k1).collect()
    }

    pub fn group2(&self) -> Vec<User> {
        (self.k1 + 1..=self.k()).collect()
    }

    pub fn group1_set(&self) -> UserSet {
        UserSet::range(1, self.k1)
    }

    pub fn group2_set(&self) -> UserSet {
        UserSet::range(self.k1 + 1, self.k())
    }

    pub fn all_users(&self) -> Vec<User> {
        (1..=self.k()).collect()
    }
}

fn integral(group: u8, value: Rational) -> Result<u32> {
    value
        .to_u64()
        .and_then(|v| u32::try_from(v).ok())
        .ok_or(Error::NonIntegerRedundancy { group, value })
}

/// `T_K(γ) = K(1−γ)/(1+Kγ)`: single-antenna delay of one homogeneous group.
pub fn t_k(k: u32, gamma: &Rational) -> Rational {
    let k = k as i64;
    (Rational::one() - gamma) * k / (gamma * k + 1)
}

/// Demand vector: `file(k)` is the file requested by user `k`. Files are
/// numbered `1..=N` and all requests are distinct (worst case).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Demands(Vec<u32>);

impl Demands {
    pub fn new(files: Vec<u32>, n: u32) -> Result<Self> {
        let mut seen = vec![false; n as usize + 1];
        for &f in &files {
            if f == 0 || f > n {
                return Err(Error::InvalidDemands(format!("file {f} outside 1..={n}")));
            }
            if std::mem::replace(&mut seen[f as usize], true) {
                return Err(Error::InvalidDemands(format!("file {f} requested twice")));
            }
        }
        Ok(Demands(files))
    }

    /// User `k` requests file `k`.
    pub fn identity(k: u32) -> Self {
        Demands((1..=k).collect())
    }

    pub fn for_config(cfg: &SystemConfig, files: Option<Vec<u32>>) -> Result<Self> {
        match files {
            None => Ok(Self::identity(cfg.k())),
            Some(files) => {
                if files.len() != cfg.k() as usize {
                    return Err(Error::InvalidDemands(format!(
                        "{} demands for {} users",
                        files.len(),
                        cfg.k()
                    )));
                }
                Self::new(files, cfg.n)
            }
        }
    }

    pub fn file(&self, user: User) -> u32 {
        self.0[user as usize - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// The demands of users `first..first+count`, renumbered from 1.
    pub fn restrict(&self, first: User, count: u32) -> Demands {
        Demands(self.0[first as usize - 1..(first + count) as usize - 1].to_vec())
    }
}
