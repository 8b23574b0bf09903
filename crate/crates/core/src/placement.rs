//! Subpacketization and cache contents.
//!
//! Every file is split into classes `(τ1, τ2)`, one per pair of cache
//! index sets, and each class into `c` equally sized copies. A user caches
//! a class iff it belongs to `τ1 ∪ τ2`. The copy count `c` is fixed by the
//! delivery design: every demanded class of every user must be delivered
//! exactly `c` times, one copy per delivery.

use num_integer::gcd;
use serde::Serialize;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::types::{SchemeTag, SubfileId};
use crate::users::{binomial, SubsetIndexer, User, UserSet};

/// Class and copy structure shared by placement, scheduling and
/// verification.
#[derive(Debug, Clone)]
pub struct Layout {
    k1: u32,
    k2: u32,
    idx1: SubsetIndexer,
    idx2: SubsetIndexer,
    c1: u32,
    c2: u32,
    two_type: bool,
}

impl Layout {
    /// Single group `1..=k` with redundancy `t` and `copies` per class.
    /// Users `k+1..=k+extra` hold no cache.
    pub fn single(k: u32, t: u32, copies: u32, extra: u32) -> Self {
        let g1: Vec<User> = (1..=k).collect();
        let g2: Vec<User> = (k + 1..=k + extra).collect();
        Layout {
            k1: k,
            k2: extra,
            idx1: SubsetIndexer::new(&g1, t as usize),
            idx2: SubsetIndexer::new(&g2, 0),
            c1: copies,
            c2: 1,
            two_type: false,
        }
    }

    /// Two cache-aided groups with a `c1 × c2` copy grid.
    pub fn two_type(k1: u32, t1: u32, k2: u32, t2: u32, c1: u32, c2: u32) -> Self {
        let g1: Vec<User> = (1..=k1).collect();
        let g2: Vec<User> = (k1 + 1..=k1 + k2).collect();
        Layout {
            k1,
            k2,
            idx1: SubsetIndexer::new(&g1, t1 as usize),
            idx2: SubsetIndexer::new(&g2, t2 as usize),
            c1,
            c2,
            two_type: true,
        }
    }

    pub fn users(&self) -> u32 {
        self.k1 + self.k2
    }

    pub fn k1(&self) -> u32 {
        self.k1
    }

    pub fn k2(&self) -> u32 {
        self.k2
    }

    pub fn t1(&self) -> u32 {
        self.idx1.subset_size() as u32
    }

    pub fn t2(&self) -> u32 {
        self.idx2.subset_size() as u32
    }

    pub fn is_two_type(&self) -> bool {
        self.two_type
    }

    /// Copies per class.
    pub fn copies(&self) -> u32 {
        self.c1 * self.c2
    }

    pub fn copy_grid(&self) -> (u32, u32) {
        (self.c1, self.c2)
    }

    pub fn classes(&self) -> usize {
        self.idx1.count() * self.idx2.count()
    }

    pub fn tau1_classes(&self) -> usize {
        self.idx1.count()
    }

    pub fn tau2_classes(&self) -> usize {
        self.idx2.count()
    }

    pub fn class_index(&self, tau1: UserSet, tau2: UserSet) -> usize {
        self.idx1.rank(tau1) * self.idx2.count() + self.idx2.rank(tau2)
    }

    pub fn class_sets(&self, class: usize) -> (UserSet, UserSet) {
        let n2 = self.idx2.count();
        (self.idx1.unrank(class / n2), self.idx2.unrank(class % n2))
    }

    pub fn tau1_rank(&self, tau1: UserSet) -> usize {
        self.idx1.rank(tau1)
    }

    pub fn tau1_unrank(&self, rank: usize) -> UserSet {
        self.idx1.unrank(rank)
    }

    pub fn tau2_rank(&self, tau2: UserSet) -> usize {
        self.idx2.rank(tau2)
    }

    /// `S`, the number of pieces per file.
    pub fn subpacketization(&self) -> u64 {
        self.classes() as u64 * self.copies() as u64
    }

    /// Copy ordinal in `0..copies()` to `(φ1, φ2)`.
    pub fn phi(&self, ordinal: u32) -> (u32, Option<u32>) {
        if self.two_type {
            (ordinal / self.c2, Some(ordinal % self.c2))
        } else {
            (ordinal, None)
        }
    }

    pub fn ordinal(&self, id: &SubfileId) -> u32 {
        id.phi1 * self.c2 + id.phi2.unwrap_or(0)
    }

    pub fn subfile(&self, file: u32, tau1: UserSet, tau2: UserSet, ordinal: u32) -> SubfileId {
        let (phi1, phi2) = self.phi(ordinal);
        SubfileId { file, tau1, tau2, phi1, phi2 }
    }

    /// Whether `user` must receive class `class` of its demanded file.
    pub fn demanded(&self, user: User, class: usize) -> bool {
        let (a, b) = self.class_sets(class);
        !a.contains(user) && !b.contains(user)
    }
}

/// Cache contents for one scheme.
#[derive(Debug, Clone)]
pub struct PlacementResult {
    pub scheme: SchemeTag,
    pub layout: Layout,
    /// Copies per class relative to the unboosted scheme.
    pub multiplier: Rational,
}

impl PlacementResult {
    pub fn subpacketization(&self) -> u64 {
        self.layout.subpacketization()
    }

    /// Every piece of `file`, class by class.
    pub fn universe(&self, file: u32) -> impl Iterator<Item = SubfileId> + '_ {
        let l = &self.layout;
        (0..l.classes()).flat_map(move |class| {
            let (t1, t2) = l.class_sets(class);
            (0..l.copies()).map(move |o| l.subfile(file, t1, t2, o))
        })
    }

    pub fn is_cached(&self, user: User, id: &SubfileId) -> bool {
        id.cached_by(user)
    }

    /// Pieces of `file` held by `user`.
    pub fn cache_of_file(&self, user: User, file: u32) -> Vec<SubfileId> {
        self.universe(file).filter(|id| id.cached_by(user)).collect()
    }

    /// Cached fraction of every file, counted in pieces.
    pub fn cached_fraction(&self, user: User) -> Rational {
        let l = &self.layout;
        let held = (0..l.classes())
            .filter(|&c| {
                let (a, b) = l.class_sets(c);
                a.contains(user) || b.contains(user)
            })
            .count();
        Rational::new(held as i64, l.classes() as i64)
    }

    /// Summary for reports.
    pub fn summary(&self) -> PlacementSummary {
        let (c1, c2) = self.layout.copy_grid();
        PlacementSummary {
            subpacketization: self.subpacketization(),
            classes: self.layout.classes() as u64,
            copies: self.layout.copies(),
            copy_grid: if self.layout.is_two_type() { Some([c1, c2]) } else { None },
            multiplier: self.multiplier.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlacementSummary {
    #[serde(rename = "S")]
    pub subpacketization: u64,
    pub classes: u64,
    pub copies: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copy_grid: Option<[u32; 2]>,
    pub multiplier: Rational,
}

/// How the cache-less scheme is arranged for a given `(K1, γ1, K2, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CachelessRegime {
    /// `L = 1`: coded multicast to group 1, then one cache-less user at a time.
    SingleStream,
    /// `K2 = 0`: the homogeneous multi-antenna scheme on group 1.
    NoCacheless,
    /// `K2 = (L−1)T_{K1}`: both groups finish together.
    Balanced,
    /// `K2 < (L−1)T_{K1}`: group 1 is finished with the homogeneous scheme.
    CacheAidedTail,
    /// `K2 > (L−1)T_{K1}`: cache-less users are finished by plain ZF.
    CachelessTail,
}

/// Repetition counts of the cache-less construction.
///
/// Phase 1 walks `(τ, φ)` and serves each cache-less window of `L−1`
/// users next to `X_{τ∪{φ}}`. Windows are cyclic, step `L−1`, and there
/// are `m = K2/gcd(K2, L−1)` of them, so each cache-less user sits in
/// `a = (L−1)/gcd(K2, L−1)` windows. Per pass a cache-aided class gets
/// `p1 = (t1+1)m` pieces and a cache-less class `q1 = (K1−t1)a`.
#[derive(Debug, Clone, Serialize)]
pub struct CachelessDesign {
    pub regime: CachelessRegime,
    pub t1: u32,
    pub window_count: u32,
    pub window_cover: u32,
    pub p1: u32,
    pub q1: u32,
    /// Passes of phase 1.
    pub runs: u32,
    /// Passes (or cycles) of phase 2.
    pub tail_runs: u32,
    /// Streams of the ZF tail.
    pub tail_streams: u32,
    pub tail_windows: u32,
    pub tail_cover: u32,
    pub copies: u32,
}

impl CachelessDesign {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        if cfg.gamma2.is_positive() {
            return Err(Error::RegimeMismatch("cache-less scheme needs gamma2 = 0".into()));
        }
        let t1 = cfg.t1_int()?;
        let n1 = cfg.k1 - t1;
        let (k2, l) = (cfg.k2, cfg.l);
        let c1 = binomial(cfg.k1 as u64, t1 as u64);
        let mut d = CachelessDesign {
            regime: CachelessRegime::Balanced,
            t1,
            window_count: 0,
            window_cover: 0,
            p1: 0,
            q1: 0,
            runs: 1,
            tail_runs: 0,
            tail_streams: 0,
            tail_windows: 0,
            tail_cover: 0,
            copies: 0,
        };
        if l == 1 {
            d.regime = CachelessRegime::SingleStream;
            d.copies = t1 + 1;
            d.tail_streams = 1;
            return Ok(d);
        }
        if k2 == 0 {
            if n1 < l {
                return Err(Error::InsufficientGround {
                    available: n1 as usize - 1,
                    requested: l as usize - 1,
                });
            }
            d.regime = CachelessRegime::NoCacheless;
            d.copies = t1 + l;
            return Ok(d);
        }
        if k2 < l - 1 {
            return Err(Error::UnsupportedRegime(format!(
                "K2 = {k2} cache-less users cannot fill the {} uncoded streams",
                l - 1
            )));
        }
        let g = gcd(k2, l - 1);
        let m = k2 / g;
        let a = (l - 1) / g;
        d.window_count = m;
        d.window_cover = a;
        d.p1 = (t1 + 1) * m;
        d.q1 = n1 * a;
        let (p1, q1) = (d.p1 as u64, d.q1 as u64);
        match p1.cmp(&q1) {
            std::cmp::Ordering::Equal => {
                d.copies = d.p1;
            }
            std::cmp::Ordering::Less => {
                if n1 < l {
                    return Err(Error::UnsupportedRegime(format!(
                        "homogeneous tail needs K1(1-gamma1) = {n1} >= L = {l}"
                    )));
                }
                d.regime = CachelessRegime::CacheAidedTail;
                let per_run = (t1 + l) as u64;
                let runs = per_run / gcd(per_run, q1 - p1);
                d.runs = runs as u32;
                d.tail_runs = (runs * (q1 - p1) / per_run) as u32;
                d.tail_streams = l;
                d.copies = (runs * q1) as u32;
            }
            std::cmp::Ordering::Greater => {
                d.regime = CachelessRegime::CachelessTail;
                let lp = l.min(k2);
                let gg = gcd(k2, lp);
                let (m2, a2) = ((k2 / gg) as u64, (lp / gg) as u64);
                let need = c1 * (p1 - q1);
                let runs = a2 / gcd(a2, need);
                d.runs = runs as u32;
                d.tail_runs = (need * runs / a2) as u32;
                d.tail_streams = lp;
                d.tail_windows = m2 as u32;
                d.tail_cover = a2 as u32;
                d.copies = (runs * p1) as u32;
            }
        }
        Ok(d)
    }

    /// Number of transmissions the design produces.
    pub fn transmissions(&self, cfg: &SystemConfig) -> u64 {
        let t1 = self.t1 as u64;
        let k1 = cfg.k1 as u64;
        let c1 = binomial(k1, t1);
        let alg3 = c1 * (k1 - t1);
        match self.regime {
            CachelessRegime::SingleStream => alg3 + cfg.k2 as u64 * c1 * self.copies as u64,
            CachelessRegime::NoCacheless => alg3,
            _ => {
                let phase1 = self.runs as u64 * c1 * (k1 - t1) * self.window_count as u64;
                let tail = match self.regime {
                    CachelessRegime::CacheAidedTail => self.tail_runs as u64 * alg3,
                    CachelessRegime::CachelessTail => self.tail_runs as u64 * self.tail_windows as u64,
                    _ => 0,
                };
                phase1 + tail
            }
        }
    }
}

/// Solution of the stream-split equation
/// `K1(1−γ1)/(L1+K1γ1) = K2(1−γ2)/(L2+K2γ2)`, `L1 + L2 = L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StreamSplit {
    pub l1: Rational,
    pub l2: Rational,
    /// The unconstrained solution had `L1 < 1` and was moved to `(1, L−1)`.
    pub clamped: bool,
}

pub fn split_streams(cfg: &SystemConfig) -> Result<StreamSplit> {
    if !cfg.gamma2.is_positive() {
        return Err(Error::InvalidStreamSplit("stream split needs gamma2 > 0".into()));
    }
    if cfg.l < 2 {
        return Err(Error::InvalidStreamSplit("stream split needs L >= 2".into()));
    }
    let (t1, t2) = (cfg.t1(), cfg.t2());
    let n1 = Rational::from(cfg.k1) - &t1;
    let n2 = Rational::from(cfg.k2) - &t2;
    let l = Rational::from(cfg.l);
    let l1 = split_point(&n1, &t1, &n2, &t2, &l);
    if l1 < 1 {
        return Ok(StreamSplit { l1: Rational::one(), l2: l - 1, clamped: true });
    }
    let l2 = &l - &l1;
    Ok(StreamSplit { l1, l2, clamped: false })
}

/// Unconstrained `L1` solving `n1/(L1+t1) = n2/(L−L1+t2)`.
pub fn split_point(n1: &Rational, t1: &Rational, n2: &Rational, t2: &Rational, l: &Rational) -> Rational {
    (n1 * &(l + t2) - n2 * t1) / &(n1 + n2)
}

/// `d²` rounds whose `(L1, L2)` allocations average to `(l1, L − l1)`,
/// with `d` the denominator of `l1`. Rounds using `⌈l1⌉` are spread evenly.
pub fn round_allocation(l1: &Rational, l: u32) -> Result<Vec<(u32, u32)>> {
    if *l1 < 1 || *l1 > (l as i64 - 1) {
        return Err(Error::InvalidStreamSplit(format!("L1 = {l1} outside [1, L-1] for L = {l}")));
    }
    let d: u64 = l1.denom().try_into().map_err(|_| Error::InvalidStreamSplit(format!("L1 = {l1}")))?;
    let rounds = d * d;
    let lo = l1.floor().to_u64().expect("L1 >= 1") as u32;
    let up = (l1.fract() * rounds as i64).to_u64().expect("integral");
    Ok((0..rounds)
        .map(|i| {
            if (i + 1) * up / rounds > i * up / rounds {
                (lo + 1, l - lo - 1)
            } else {
                (lo, l - lo)
            }
        })
        .collect())
}

/// Shape of a two-type delivery.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TwotypeDesign {
    /// The two-group pass repeated over the listed `(L1, L2)` rounds.
    Rounds { rounds: Vec<(u32, u32)>, d: u32 },
    /// `runs` rounds at `(1, L−1)`, then `tail_runs` passes of the
    /// homogeneous scheme on group 2 with `tail_streams` streams.
    Residual { runs: u32, tail_runs: u32, tail_streams: u32 },
}

/// Design plus copy grid for a two-type delivery.
#[derive(Debug, Clone, Serialize)]
pub struct TwotypePlan {
    pub design: TwotypeDesign,
    pub l1: Rational,
    pub t1: u32,
    pub t2: u32,
    pub c1: u32,
    pub c2: u32,
}

impl TwotypePlan {
    /// Design for a split with average `l1` streams on group 1.
    ///
    /// When the split equalizes both groups every class receives
    /// `d²(t1+L1)(K2−t2)` pieces. With `L1 = 1` and group 1 finishing
    /// first, the residual design applies.
    pub fn new(cfg: &SystemConfig, l1: &Rational) -> Result<Self> {
        if !cfg.gamma2.is_positive() {
            return Err(Error::RegimeMismatch("two-type scheme needs gamma2 > 0".into()));
        }
        let t1 = cfg.t1_int()?;
        let t2 = cfg.t2_int()?;
        if cfg.l < 2 {
            return Err(Error::UnsupportedRegime("two-type delivery needs L >= 2".into()));
        }
        let l = cfg.l;
        if *l1 < 1 {
            return Err(Error::InvalidStreamSplit(format!("L1 = {l1} < 1")));
        }
        let l2 = Rational::from(l) - l1;
        if l2 < 1 {
            return Err(Error::UnsupportedRegime(format!(
                "L2 = {l2} < 1: the second group would get no stream"
            )));
        }
        let (n1, n2) = (cfg.k1 - t1, cfg.k2 - t2);
        let balanced = (l1 + &Rational::from(t1)) * n2 as i64 == (&l2 + &Rational::from(t2)) * n1 as i64;
        if balanced {
            if l1.ceil() > n1 as i64 || l2.ceil() > n2 as i64 {
                return Err(Error::UnsupportedRegime(format!(
                    "split ({l1}, {l2}) exceeds the uncached users of a group ({n1}, {n2})"
                )));
            }
            let rounds = round_allocation(l1, l)?;
            let d: u32 = l1.denom().try_into().expect("small denominator");
            let c1 = ((l1 + &Rational::from(t1)) * (d * d) as i64).to_u64().expect("integral") as u32;
            return Ok(TwotypePlan {
                design: TwotypeDesign::Rounds { rounds, d },
                l1: l1.clone(),
                t1,
                t2,
                c1,
                c2: n2,
            });
        }
        let p = ((t1 + 1) * n2) as u64;
        let q = ((t2 + l - 1) * n1) as u64;
        if *l1 != 1 || p < q {
            return Err(Error::InvalidStreamSplit(format!(
                "split ({l1}, {l2}) does not equalize the two groups"
            )));
        }
        if n2 < l - 1 {
            return Err(Error::UnsupportedRegime(format!(
                "residual phase needs K2(1-gamma2) = {n2} >= L-1 = {}",
                l - 1
            )));
        }
        let lp = l.min(n2) as u64;
        let per_run = t2 as u64 + lp;
        let need = binomial(cfg.k1 as u64, t1 as u64) * (p - q);
        let runs = per_run / gcd(per_run, need);
        let tail_runs = runs * need / per_run;
        Ok(TwotypePlan {
            design: TwotypeDesign::Residual {
                runs: runs as u32,
                tail_runs: tail_runs as u32,
                tail_streams: lp as u32,
            },
            l1: l1.clone(),
            t1,
            t2,
            c1: runs as u32 * (t1 + 1),
            c2: n2,
        })
    }

    pub fn is_fractional(&self) -> bool {
        matches!(&self.design, TwotypeDesign::Rounds { d, .. } if *d > 1)
    }

    pub fn layout(&self, cfg: &SystemConfig) -> Layout {
        Layout::two_type(cfg.k1, self.t1, cfg.k2, self.t2, self.c1, self.c2)
    }

    pub fn transmissions(&self, cfg: &SystemConfig) -> u64 {
        let (k1, k2) = (cfg.k1 as u64, cfg.k2 as u64);
        let (t1, t2) = (self.t1 as u64, self.t2 as u64);
        let a1 = binomial(k1, t1) * (k1 - t1);
        let a2 = binomial(k2, t2) * (k2 - t2);
        match &self.design {
            TwotypeDesign::Rounds { rounds, .. } => rounds.len() as u64 * a1 * a2,
            TwotypeDesign::Residual { runs, tail_runs, .. } => {
                *runs as u64 * a1 * a2 + *tail_runs as u64 * a2
            }
        }
    }
}

/// Placement of the cache-less scheme (`γ2 = 0`). Users of group 2 cache
/// nothing; the copy count follows [`CachelessDesign`].
pub fn place_cacheless(cfg: &SystemConfig) -> Result<PlacementResult> {
    let d = CachelessDesign::new(cfg)?;
    let n1 = cfg.k1 - d.t1;
    Ok(PlacementResult {
        scheme: SchemeTag::Cacheless,
        layout: Layout::single(cfg.k1, d.t1, d.copies, cfg.k2),
        multiplier: Rational::new(d.copies as i64, n1 as i64),
    })
}

/// Placement of the two-type scheme with an integer split.
pub fn place_twotype(cfg: &SystemConfig, l1: u32, l2: u32) -> Result<PlacementResult> {
    if l1 + l2 != cfg.l {
        return Err(Error::InvalidStreamSplit(format!("L1 + L2 = {} != L = {}", l1 + l2, cfg.l)));
    }
    let plan = TwotypePlan::new(cfg, &Rational::from(l1))?;
    Ok(twotype_result(cfg, &plan))
}

/// Placement of the two-type scheme with a rational split (`d²` rounds).
pub fn place_twotype_fractional(cfg: &SystemConfig, l1: &Rational, l2: &Rational) -> Result<PlacementResult> {
    if l1 + l2 != Rational::from(cfg.l) {
        return Err(Error::InvalidStreamSplit(format!("L1 + L2 = {} != L = {}", l1 + l2, cfg.l)));
    }
    let plan = TwotypePlan::new(cfg, l1)?;
    Ok(twotype_result(cfg, &plan))
}

pub(crate) fn twotype_result(cfg: &SystemConfig, plan: &TwotypePlan) -> PlacementResult {
    // unboosted grid: (t1+L1)(t2+L2) copies per class
    let l2 = Rational::from(cfg.l) - &plan.l1;
    let base = (&plan.l1 + &Rational::from(plan.t1)) * (l2 + Rational::from(plan.t2));
    PlacementResult {
        scheme: if plan.is_fractional() { SchemeTag::TwotypeFractional } else { SchemeTag::Twotype },
        layout: plan.layout(cfg),
        multiplier: Rational::from(plan.c1 * plan.c2) / base,
    }
}

/// Placement of the homogeneous multi-antenna scheme: `C(K,Kγ)` classes of
/// `Kγ+L` copies.
pub fn place_homogeneous(k: u32, gamma: &Rational, l: u32) -> Result<PlacementResult> {
    let t = (gamma * k as i64)
        .to_u64()
        .ok_or(Error::NonIntegerRedundancy { group: 1, value: gamma * k as i64 })? as u32;
    Ok(PlacementResult {
        scheme: SchemeTag::Homogeneous,
        layout: Layout::single(k, t, t + l, 0),
        multiplier: Rational::one(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn cfg(k1: u32, g1: Rational, k2: u32, g2: Rational, l: u32) -> SystemConfig {
        SystemConfig::with_min_library(k1, g1, k2, g2, l).unwrap()
    }

    #[test]
    fn cacheless_worked_example() {
        let p = place_cacheless(&cfg(5, r(1, 5), 2, r(0, 1), 2)).unwrap();
        assert_eq!(p.subpacketization(), 20);
        assert_eq!(p.multiplier, 1);
        // user 1 holds copies φ ∈ {2,3,4,5} of class {1}, listed here by ordinal
        let held = p.cache_of_file(1, 3);
        assert_eq!(held.len(), 4);
        assert!(held.iter().all(|id| id.tau1 == UserSet::singleton(1)));
        assert_eq!(held.iter().map(|id| id.phi1).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert!(p.cache_of_file(6, 1).is_empty());
        assert_eq!(p.cached_fraction(1), r(1, 5));
        assert_eq!(p.cached_fraction(7), 0);
    }

    #[test]
    fn cacheless_boosted_subpacketization() {
        // T = 3/2, (L-1)T = 3: copies grow from 3 to 6
        let p = place_cacheless(&cfg(4, r(1, 4), 3, r(0, 1), 3)).unwrap();
        assert_eq!(p.multiplier, 2);
        assert_eq!(p.subpacketization(), 4 * 6);
        let p = place_cacheless(&cfg(4, r(1, 2), 1, r(0, 1), 2)).unwrap();
        assert_eq!(p.subpacketization(), 18);
        assert_eq!(p.cached_fraction(2), r(1, 2));
        assert_eq!(p.cache_of_file(1, 1).len(), 9);
    }

    #[test]
    fn twotype_worked_example() {
        let c = cfg(5, r(2, 5), 4, r(1, 4), 3);
        let p = place_twotype(&c, 1, 2).unwrap();
        assert_eq!(p.subpacketization(), 360);
        assert_eq!(p.layout.copy_grid(), (3, 3));
        assert_eq!(p.cached_fraction(6), r(1, 4));
        assert_eq!(p.cached_fraction(1), r(2, 5));
        let z6 = p.cache_of_file(6, 1);
        assert_eq!(z6.len(), 90);
        assert!(z6.iter().all(|id| id.tau2.contains(6)));
    }

    #[test]
    fn twotype_small_example() {
        // (t1+L1)(t2+L2) C1 C2 = 162, but the groups need only (t1+L1)(K2-t2) = 6 copies
        let c = cfg(4, r(1, 2), 3, r(1, 3), 3);
        let p = place_twotype(&c, 1, 2).unwrap();
        assert_eq!(p.subpacketization(), 108);
        assert_eq!(p.multiplier, r(2, 3));
        assert!(matches!(place_twotype(&c, 2, 1), Err(Error::InvalidStreamSplit(_))));
        assert!(matches!(place_twotype(&c, 0, 3), Err(Error::InvalidStreamSplit(_))));
    }

    #[test]
    fn homogeneous() {
        let p = place_homogeneous(5, &r(1, 5), 2).unwrap();
        assert_eq!(p.subpacketization(), 15);
        assert_eq!(p.cache_of_file(3, 3).len(), 3);
        assert_eq!(place_homogeneous(4, &r(1, 2), 2).unwrap().subpacketization(), 24);
        assert!(matches!(
            place_homogeneous(5, &r(1, 3), 2),
            Err(Error::NonIntegerRedundancy { .. })
        ));
    }

    #[test]
    fn non_integer_redundancy_rejected() {
        let c = cfg(5, r(1, 3), 2, r(0, 1), 2);
        assert!(matches!(place_cacheless(&c), Err(Error::NonIntegerRedundancy { group: 1, .. })));
    }

    #[test]
    fn splits() {
        let s = split_streams(&cfg(5, r(2, 5), 4, r(1, 4), 3)).unwrap();
        assert_eq!((s.l1, s.l2, s.clamped), (Rational::one(), Rational::from(2i64), false));
        let s = split_streams(&cfg(4, r(1, 2), 3, r(1, 3), 4)).unwrap();
        assert_eq!((s.l1, s.clamped), (r(3, 2), false));
        // 2/(L1+2) = 3/(L2+1) solves to L1 = 2/5, which is clamped
        let s = split_streams(&cfg(4, r(1, 2), 4, r(1, 4), 3)).unwrap();
        assert_eq!((s.l1, s.l2, s.clamped), (Rational::one(), Rational::from(2i64), true));
    }

    #[test]
    fn symmetric_split_halves() {
        for l in 2..8i64 {
            let (n, t) = (r(5, 1), r(3, 1));
            assert_eq!(split_point(&n, &t, &n, &t, &r(l, 1)), r(l, 2));
        }
    }

    #[test]
    fn split_equalizes_groups() {
        for (k1, g1, k2, g2, l) in [(6, r(1, 3), 9, r(1, 9), 4), (8, r(1, 2), 6, r(1, 3), 4), (3, r(2, 3), 5, r(2, 5), 3)] {
            let c = cfg(k1, g1, k2, g2, l);
            let s = split_streams(&c).unwrap();
            if !s.clamped {
                let lhs = (r(k1 as i64, 1) - c.t1()) / (s.l1.clone() + c.t1());
                let rhs = (r(k2 as i64, 1) - c.t2()) / (s.l2.clone() + c.t2());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn rounds() {
        let r75 = round_allocation(&r(7, 5), 3).unwrap();
        assert_eq!(r75.len(), 25);
        assert_eq!(r75.iter().filter(|x| **x == (2, 1)).count(), 10);
        assert_eq!(r75.iter().filter(|x| **x == (1, 2)).count(), 15);
        let avg: Rational = r75.iter().map(|x| Rational::from(x.0)).sum::<Rational>() / 25;
        assert_eq!(avg, r(7, 5));
        assert_eq!(round_allocation(&r(3, 2), 3).unwrap(), vec![(1, 2), (2, 1), (1, 2), (2, 1)]);
        assert_eq!(round_allocation(&r(2, 1), 3).unwrap(), vec![(2, 1)]);
    }
}
