//! Pairing of XORs with the uncoded subfiles sent next to them.
//!
//! A right node `(τ, φ, t)` stands for the `t`-th group of cache-less users
//! served with pieces of class `τ` while `φ` is the precoded cache-aided
//! user. A left node `(χ, j)` is the `j`-th copy of `X_χ`. The pair is
//! admissible iff `τ ⊂ χ`, so that every other user of `χ` caches the
//! uncoded interference.

use serde::Serialize;

use crate::config::SystemConfig;
use crate::error::Result;
use crate::placement::{CachelessDesign, CachelessRegime};
use crate::users::{enumerate_subsets, User, UserSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RightNode {
    pub tau: UserSet,
    pub phi: User,
    pub group: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LeftNode {
    pub chi: UserSet,
    pub copy: u32,
}

#[derive(Debug, Clone)]
pub struct MatchingInstance {
    pub left: Vec<LeftNode>,
    pub right: Vec<RightNode>,
    /// For each right node, the admissible left nodes.
    pub adjacency: Vec<Vec<u32>>,
}

impl MatchingInstance {
    /// Instance for group 1 of `k1` users with redundancy `t1` and `groups`
    /// cache-less groups per `(τ, φ)`.
    pub fn new(k1: u32, t1: u32, groups: u32) -> Result<Self> {
        let ground: Vec<User> = (1..=k1).collect();
        let copies = (t1 + 1) * groups;
        let chis = enumerate_subsets(&ground, t1 as usize + 1)?;
        let left: Vec<LeftNode> = chis
            .iter()
            .flat_map(|&chi| (0..copies).map(move |copy| LeftNode { chi, copy }))
            .collect();
        let mut right = Vec::new();
        for tau in enumerate_subsets(&ground, t1 as usize)? {
            for phi in ground.iter().copied().filter(|u| !tau.contains(*u)) {
                for group in 0..groups {
                    right.push(RightNode { tau, phi, group });
                }
            }
        }
        let adjacency = right
            .iter()
            .map(|r| {
                chis.iter()
                    .enumerate()
                    .filter(|(_, chi)| r.tau.is_subset(**chi))
                    .flat_map(|(i, _)| (0..copies).map(move |c| i as u32 * copies + c))
                    .collect()
            })
            .collect();
        Ok(MatchingInstance { left, right, adjacency })
    }

    /// The instance behind the cache-less schedule of `cfg`, if it has an
    /// uncoded phase at all.
    pub fn for_config(cfg: &SystemConfig) -> Result<Option<Self>> {
        let d = CachelessDesign::new(cfg)?;
        match d.regime {
            CachelessRegime::SingleStream | CachelessRegime::NoCacheless => Ok(None),
            _ => Self::new(cfg.k1, d.t1, d.runs * d.window_count).map(Some),
        }
    }

    /// Removes every edge into the copies of `X_chi` (fault injection).
    pub fn prune_chi(&mut self, chi: UserSet) {
        let left = &self.left;
        for adj in &mut self.adjacency {
            adj.retain(|&l| left[l as usize].chi != chi);
        }
    }
}

/// Result of [`verify_perfect_matching`].
#[derive(Debug, Clone, Serialize)]
pub struct MatchingOutcome {
    pub perfect: bool,
    pub size: usize,
    /// `pairs[r]` is the left node matched to right node `r`.
    pub pairs: Vec<Option<u32>>,
}

/// Maximum matching by Hopcroft–Karp; `perfect` iff every right node is
/// matched.
pub fn verify_perfect_matching(inst: &MatchingInstance) -> MatchingOutcome {
    const NIL: u32 = u32::MAX;
    let nr = inst.right.len();
    let nl = inst.left.len();
    let mut match_r = vec![NIL; nr];
    let mut match_l = vec![NIL; nl];
    let mut dist = vec![0u32; nr];
    let mut size = 0;
    loop {
        // BFS layers from free right nodes
        let mut queue = std::collections::VecDeque::new();
        for r in 0..nr {
            if match_r[r] == NIL {
                dist[r] = 0;
                queue.push_back(r);
            } else {
                dist[r] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(r) = queue.pop_front() {
            for &l in &inst.adjacency[r] {
                let next = match_l[l as usize];
                if next == NIL {
                    found = true;
                } else if dist[next as usize] == u32::MAX {
                    dist[next as usize] = dist[r] + 1;
                    queue.push_back(next as usize);
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; nr];
        for r in 0..nr {
            if match_r[r] == NIL && augment(r, inst, &mut match_r, &mut match_l, &mut dist, &mut cursor) {
                size += 1;
            }
        }
    }
    MatchingOutcome {
        perfect: size == nr,
        size,
        pairs: match_r.into_iter().map(|l| (l != NIL).then_some(l)).collect(),
    }
}

// iterative DFS along the BFS layers
fn augment(
    root: usize,
    inst: &MatchingInstance,
    match_r: &mut [u32],
    match_l: &mut [u32],
    dist: &mut [u32],
    cursor: &mut [usize],
) -> bool {
    const NIL: u32 = u32::MAX;
    let mut stack = vec![root];
    while let Some(&r) = stack.last() {
        let adj = &inst.adjacency[r];
        if cursor[r] == adj.len() {
            dist[r] = u32::MAX;
            stack.pop();
            continue;
        }
        let l = adj[cursor[r]];
        let next = match_l[l as usize];
        if next == NIL {
            // flip the path
            for &rr in stack.iter().rev() {
                let ll = inst.adjacency[rr][cursor[rr]];
                match_r[rr] = ll;
                match_l[ll as usize] = rr as u32;
            }
            return true;
        }
        if dist[next as usize] == dist[r] + 1 {
            stack.push(next as usize);
        } else {
            cursor[r] += 1;
        }
    }
    false
}

/// One assignment of the explicit construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchedPair {
    pub right: RightNode,
    pub left: LeftNode,
}

/// Explicit perfect matching: `(τ, φ, t)` goes to `X_{τ∪{φ}}`, copy
/// `pos(φ in χ)·groups + t`.
pub fn build_matching(k1: u32, t1: u32, groups: u32) -> Result<Vec<MatchedPair>> {
    let inst = MatchingInstance::new(k1, t1, groups)?;
    Ok(inst
        .right
        .iter()
        .map(|&r| {
            let chi = r.tau.with(r.phi);
            let pos = chi.iter().position(|u| u == r.phi).expect("phi in chi") as u32;
            MatchedPair { right: r, left: LeftNode { chi, copy: pos * groups + r.group } }
        })
        .collect())
}

/// Whether `pairs` is a perfect matching of `inst`: each right node once,
/// each left node at most once, every pair admissible.
pub fn is_valid_perfect_matching(inst: &MatchingInstance, pairs: &[MatchedPair]) -> bool {
    use std::collections::HashSet;
    if pairs.len() != inst.right.len() {
        return false;
    }
    let rights: HashSet<_> = pairs.iter().map(|p| (p.right.tau, p.right.phi, p.right.group)).collect();
    let lefts: HashSet<_> = pairs.iter().map(|p| (p.left.chi, p.left.copy)).collect();
    let copies = inst.left.iter().filter(|l| l.chi == inst.left[0].chi).count() as u32;
    rights.len() == pairs.len()
        && lefts.len() == pairs.len()
        && pairs.iter().all(|p| {
            p.right.tau.is_subset(p.left.chi)
                && !p.right.tau.contains(p.right.phi)
                && p.left.copy < copies
                && p.left.chi.len() == p.right.tau.len() + 1
        })
        && inst.right.iter().all(|r| rights.contains(&(r.tau, r.phi, r.group)))
}
