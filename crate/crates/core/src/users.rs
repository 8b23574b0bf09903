//! User identifiers, user sets and subset combinatorics.
//!
//! Users are numbered globally `1..=K`; the cache-aided group is `1..=K1`
//! and the second group is `K1+1..=K`. A [`UserSet`] is a bitmask, which
//! caps the system at 63 users.

use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type User = u32;

/// Largest user id a [`UserSet`] can hold.
pub const MAX_USER: User = 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UserSet(u64);

impl UserSet {
    pub const EMPTY: UserSet = UserSet(0);

    pub fn from_bits(bits: u64) -> Self {
        debug_assert!(bits & 1 == 0, "user 0 does not exist");
        UserSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Users `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: User, hi: User) -> Self {
        (lo..=hi).collect()
    }

    pub fn singleton(user: User) -> Self {
        UserSet(1 << user)
    }

    pub fn contains(self, user: User) -> bool {
        user <= MAX_USER && self.0 & (1 << user) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn with(self, user: User) -> Self {
        UserSet(self.0 | (1 << user))
    }

    pub fn without(self, user: User) -> Self {
        UserSet(self.0 & !(1 << user))
    }

    pub fn union(self, other: UserSet) -> Self {
        UserSet(self.0 | other.0)
    }

    pub fn difference(self, other: UserSet) -> Self {
        UserSet(self.0 & !other.0)
    }

    pub fn intersection(self, other: UserSet) -> Self {
        UserSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: UserSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = User> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let u = bits.trailing_zeros();
                bits &= bits - 1;
                Some(u)
            }
        })
    }

    pub fn to_vec(self) -> Vec<User> {
        self.iter().collect()
    }
}

impl FromIterator<User> for UserSet {
    fn from_iter<I: IntoIterator<Item = User>>(iter: I) -> Self {
        let mut bits = 0u64;
        for u in iter {
            assert!((1..=MAX_USER).contains(&u), "user id {u} out of range");
            bits |= 1 << u;
        }
        UserSet(bits)
    }
}

impl fmt::Debug for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Compact rendering, e.g. `{2,3}` or `{}`.
impl fmt::Display for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, u) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{u}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for UserSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for u in self.iter() {
            seq.serialize_element(&u)?;
        }
        seq.end()
    }
}

/// All `size`-subsets of `ground`, in lexicographic order of their sorted
/// member lists.
pub fn enumerate_subsets(ground: &[User], size: usize) -> Result<Vec<UserSet>> {
    if size > ground.len() {
        return Err(Error::InsufficientGround { available: ground.len(), requested: size });
    }
    let mut sorted = ground.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != ground.len() {
        return Err(Error::InvalidConfig("ground set has repeated users".into()));
    }
    let mut out = Vec::with_capacity(binomial(sorted.len() as u64, size as u64) as usize);
    let mut idx: Vec<usize> = (0..size).collect();
    let n = sorted.len();
    loop {
        out.push(idx.iter().map(|&i| sorted[i]).collect());
        // advance the rightmost index that can still move
        let Some(pos) = (0..size).rev().find(|&p| idx[p] < n - size + p) else {
            break;
        };
        idx[pos] += 1;
        for q in pos + 1..size {
            idx[q] = idx[q - 1] + 1;
        }
    }
    Ok(out)
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflow")
}

/// Dense ranking of the `k`-subsets of a fixed ground set (colex order).
///
/// Used to index per-class counters without hashing.
#[derive(Debug, Clone)]
pub struct SubsetIndexer {
    position: [u8; MAX_USER as usize + 1],
    choose: Vec<Vec<u64>>,
    k: usize,
    sets: Vec<UserSet>,
}

impl SubsetIndexer {
    pub fn new(ground: &[User], k: usize) -> Self {
        let mut position = [u8::MAX; MAX_USER as usize + 1];
        let mut sorted = ground.to_vec();
        sorted.sort_unstable();
        for (i, &u) in sorted.iter().enumerate() {
            position[u as usize] = i as u8;
        }
        let n = sorted.len();
        let choose = (0..=n as u64)
            .map(|m| (0..=k as u64).map(|j| binomial(m, j)).collect())
            .collect();
        let mut idx = SubsetIndexer { position, choose, k, sets: Vec::new() };
        let mut sets = enumerate_subsets(&sorted, k).unwrap_or_default();
        sets.sort_by_key(|s| idx.rank(*s));
        idx.sets = sets;
        idx
    }

    /// Number of `k`-subsets.
    pub fn count(&self) -> usize {
        self.sets.len()
    }

    pub fn subset_size(&self) -> usize {
        self.k
    }

    /// Inverse of [`rank`](Self::rank).
    pub fn unrank(&self, rank: usize) -> UserSet {
        self.sets[rank]
    }

    /// Rank of `set`, which must be a `k`-subset of the ground set.
    pub fn rank(&self, set: UserSet) -> usize {
        debug_assert_eq!(set.len(), self.k);
        set.iter()
            .enumerate()
            .map(|(i, u)| {
                let p = self.position[u as usize];
                debug_assert!(p != u8::MAX, "user {u} not in ground set");
                self.choose[p as usize][i + 1]
            })
            .sum::<u64>() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(v: &[&[User]]) -> Vec<UserSet> {
        v.iter().map(|s| s.iter().copied().collect()).collect()
    }

    #[test]
    fn three_choose_two() {
        let got = enumerate_subsets(&[1, 2, 3], 2).unwrap();
        assert_eq!(got, sets(&[&[1, 2], &[1, 3], &[2, 3]]));
    }

    #[test]
    fn singletons_and_pairs_of_five() {
        let ground: Vec<User> = (1..=5).collect();
        let ones = enumerate_subsets(&ground, 1).unwrap();
        assert_eq!(ones, sets(&[&[1], &[2], &[3], &[4], &[5]]));
        assert_eq!(enumerate_subsets(&ground, 2).unwrap().len(), 10);
    }

    #[test]
    fn edge_sizes() {
        assert_eq!(enumerate_subsets(&[4, 7], 0).unwrap(), vec![UserSet::EMPTY]);
        assert_eq!(enumerate_subsets(&[4, 7], 2).unwrap(), sets(&[&[4, 7]]));
        assert!(matches!(
            enumerate_subsets(&[4, 7], 3),
            Err(Error::InsufficientGround { available: 2, requested: 3 })
        ));
    }

    #[test]
    fn unordered_ground_is_sorted_first() {
        let got = enumerate_subsets(&[9, 6, 7], 2).unwrap();
        assert_eq!(got, sets(&[&[6, 7], &[6, 9], &[7, 9]]));
    }

    #[test]
    fn exhaustive_against_bitmask_oracle() {
        for n in 0..=20usize {
            let ground: Vec<User> = (1..=n as User).collect();
            for k in [0, 1, n / 3, n / 2, n.saturating_sub(1), n] {
                if k > n {
                    continue;
                }
                let got = enumerate_subsets(&ground, k).unwrap();
                // bitmask oracle over 2^n
                let oracle: Vec<UserSet> = (0u64..1 << n)
                    .filter(|m| m.count_ones() as usize == k)
                    .map(|m| UserSet::from_bits(m << 1))
                    .collect();
                assert_eq!(got.len(), oracle.len(), "n={n} k={k}");
                let mut a = got.clone();
                let mut b = oracle;
                a.sort();
                b.sort();
                assert_eq!(a, b);
                a.dedup();
                assert_eq!(a.len(), got.len(), "duplicates for n={n} k={k}");
                // lexicographic order on sorted member lists
                assert!(got.windows(2).all(|w| w[0].to_vec() < w[1].to_vec()));
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn indexer_is_a_bijection() {
        let ground = [6, 7, 8, 9, 10];
        for k in 0..=5 {
            let idx = SubsetIndexer::new(&ground, k);
            let mut ranks: Vec<usize> =
                enumerate_subsets(&ground, k).unwrap().into_iter().map(|s| idx.rank(s)).collect();
            ranks.sort();
            assert_eq!(ranks, (0..idx.count()).collect::<Vec<_>>());
            for r in 0..idx.count() {
                assert_eq!(idx.rank(idx.unrank(r)), r);
            }
        }
    }

    #[test]
    fn user_set_ops() {
        let a: UserSet = [1, 4, 5].into_iter().collect();
        assert_eq!(a.len(), 3);
        assert!(a.contains(4) && !a.contains(2));
        assert_eq!(a.without(4).with(2).to_vec(), vec![1, 2, 5]);
        assert!(UserSet::range(1, 3).is_subset(UserSet::range(1, 5)));
        assert_eq!(a.to_string(), "{1,4,5}");
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1,4,5]");
    }
}
