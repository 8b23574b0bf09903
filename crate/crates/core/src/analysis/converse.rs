//! Counting behind the uncoded-placement converse.

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest `K` and `N` the brute force accepts.
pub const ORACLE_LIMIT: u32 = 5;

/// `Q_i / (K1!·P(N, K))` by enumeration, for the subfile `W^1_T` with
/// `T = {1..i}`.
///
/// `Q_i` counts the pairs `(σ, d)` of a user ordering `σ ∈ S_{K1}` and a
/// distinct demand vector `d` for which `W^1_T` lies in the acyclic set
/// `{W^{d_{σ(j)}}_S : S ∩ {σ(1..j)} = ∅}`.
pub fn converse_counting_oracle(k1: u32, k2: u32, n: u32, i: u32) -> Result<Rational> {
    let k = k1 + k2;
    if k > ORACLE_LIMIT || n > ORACLE_LIMIT {
        return Err(Error::InstanceTooLarge(format!("K = {k}, N = {n}; limit {ORACLE_LIMIT}")));
    }
    if k1 == 0 || n < k || i > k1 {
        return Err(Error::InvalidConfig(format!("need K1 >= 1, N >= K and i <= K1; got K1 = {k1}, K = {k}, N = {n}, i = {i}")));
    }
    let tau: u32 = (1 << i) - 1; // users 1..=i as bits 0..i
    let sigmas = permutations(k1 as usize);
    let mut hits = 0u64;
    let mut demands = 0u64;
    for_each_injection(k as usize, n, &mut |d| {
        demands += 1;
        for sigma in &sigmas {
            let mut prefix = 0u32;
            for &user in sigma {
                prefix |= 1 << user;
                if d[user] == 1 && prefix & tau == 0 {
                    hits += 1;
                    break;
                }
            }
        }
    });
    let total = sigmas.len() as u64 * demands;
    Ok(Rational::new(hits as i64, total as i64))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap(n, &mut cur, &mut out);
    out
}

fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k {
        heap(k - 1, a, out);
        if k % 2 == 0 {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

// all d: [k] -> [n] with distinct values
fn for_each_injection(k: usize, n: u32, f: &mut dyn FnMut(&[u32])) {
    fn rec(d: &mut Vec<u32>, k: usize, n: u32, used: u32, f: &mut dyn FnMut(&[u32])) {
        if d.len() == k {
            f(d);
            return;
        }
        for v in 1..=n {
            if used >> v & 1 == 0 {
                d.push(v);
                rec(d, k, n, used | 1 << v, f);
                d.pop();
            }
        }
    }
    rec(&mut Vec::with_capacity(k), k, n, 0, f);
}

/// Lower bound `Σ_i x_i (K1−i)/((i+1)N) + K2` for a placement profile:
/// `x_i` files' worth of content cached by exactly `i` of the `K1` users.
///
/// The profile must satisfy `Σ x_i = N`, `x_i ≥ 0` and the cache budget
/// `Σ i·x_i ≤ K1·γ·N`.
pub fn converse_xi_bound(x: &[Rational], k1: u32, gamma: &Rational, k2: u32, n: u32) -> Result<Rational> {
    if x.len() != k1 as usize + 1 {
        return Err(Error::InfeasibleProfile(format!("{} entries for K1 = {k1}", x.len())));
    }
    if x.iter().any(|v| v.is_negative()) {
        return Err(Error::InfeasibleProfile("negative entry".into()));
    }
    let total: Rational = x.iter().cloned().sum();
    if total != n as i64 {
        return Err(Error::InfeasibleProfile(format!("entries sum to {total}, not N = {n}")));
    }
    let used: Rational = x.iter().enumerate().map(|(i, v)| v.clone() * i as i64).sum();
    let budget = gamma * (k1 as i64 * n as i64);
    if used > budget {
        return Err(Error::InfeasibleProfile(format!("profile uses {used} of a cache budget {budget}")));
    }
    let bound: Rational = x
        .iter()
        .enumerate()
        .map(|(i, v)| v.clone() * (k1 as i64 - i as i64) / ((i as i64 + 1) * n as i64))
        .sum();
    Ok(bound + k2 as i64)
}

/// Minimum of [`converse_xi_bound`] over feasible profiles. The
/// coefficients are convex and decreasing in `i`, so the optimum spends the
/// whole budget on the two integers around `K1γ`.
pub fn xi_bound_minimum(k1: u32, gamma: &Rational, k2: u32, n: u32) -> Result<Rational> {
    let t = gamma * k1 as i64;
    let lo = t.floor();
    let w = t - lo.clone();
    let lo = lo.to_u64().ok_or_else(|| Error::InfeasibleProfile(format!("gamma = {gamma}")))? as usize;
    let mut x = vec![Rational::zero(); k1 as usize + 1];
    x[lo] = (Rational::one() - w.clone()) * n as i64;
    if w.is_positive() {
        x[lo + 1] = w * n as i64;
    }
    converse_xi_bound(&x, k1, gamma, k2, n)
}
