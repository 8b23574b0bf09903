//! Subfiles, transmissions and plans.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::users::{User, UserSet};

/// `W^{n,φ1,φ2}_{τ1,τ2}`. Single-type schemes leave `tau2` empty and
/// `phi2` unset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SubfileId {
    pub file: u32,
    pub tau1: UserSet,
    pub tau2: UserSet,
    pub phi1: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi2: Option<u32>,
}

impl SubfileId {
    pub fn cached_by(&self, user: User) -> bool {
        self.tau1.contains(user) || self.tau2.contains(user)
    }
}

impl fmt::Display for SubfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W^{{{},{}", self.file, self.phi1)?;
        if let Some(p) = self.phi2 {
            write!(f, ",{p}")?;
        }
        write!(f, "}}_{{{}", self.tau1)?;
        if self.phi2.is_some() {
            write!(f, ",{}", self.tau2)?;
        }
        write!(f, "}}")
    }
}

/// A piece of a subfile addressed to the user that wants it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Term {
    pub user: User,
    #[serde(flatten)]
    pub id: SubfileId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotKind {
    /// Sum of one demanded piece per user of some χ.
    Xor,
    /// A single piece for the user the slot is steered to.
    Uncoded,
}

/// One information slot of a transmission, borrowed from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Slot<'a> {
    pub kind: SlotKind,
    pub terms: &'a [Term],
}

impl Slot<'_> {
    /// Whether `user` holds every term of this slot in cache.
    pub fn cached_by(&self, user: User) -> bool {
        self.terms.iter().all(|t| t.id.cached_by(user))
    }

    pub fn term_for(&self, user: User) -> Option<&Term> {
        self.terms.iter().find(|t| t.user == user)
    }
}

/// Information vector plus the precoded user set. Slot `i` is steered to
/// `lambda[i]`.
///
/// Storage is flat so that schedulers can reuse one buffer for millions of
/// transmissions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transmission {
    lambda: Vec<User>,
    kinds: Vec<SlotKind>,
    ends: Vec<u32>,
    terms: Vec<Term>,
}

impl Transmission {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.lambda.clear();
        self.kinds.clear();
        self.ends.clear();
        self.terms.clear();
    }

    /// Appends a slot steered to `target`.
    pub fn push_slot(&mut self, kind: SlotKind, target: User, terms: impl IntoIterator<Item = Term>) {
        self.terms.extend(terms);
        self.kinds.push(kind);
        self.ends.push(self.terms.len() as u32);
        self.lambda.push(target);
    }

    pub fn push_uncoded(&mut self, term: Term) {
        self.push_slot(SlotKind::Uncoded, term.user, [term]);
    }

    pub fn lambda(&self) -> &[User] {
        &self.lambda
    }

    pub fn lambda_set(&self) -> UserSet {
        self.lambda.iter().copied().collect()
    }

    pub fn slot_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn slot(&self, i: usize) -> Slot<'_> {
        let start = if i == 0 { 0 } else { self.ends[i - 1] as usize };
        Slot { kind: self.kinds[i], terms: &self.terms[start..self.ends[i] as usize] }
    }

    pub fn slots(&self) -> impl Iterator<Item = Slot<'_>> + '_ {
        (0..self.slot_count()).map(|i| self.slot(i))
    }

    /// Every term of every slot.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Users with a term in this transmission.
    pub fn addressed(&self) -> UserSet {
        self.terms.iter().map(|t| t.user).collect()
    }

    /// Removes slot `i` (fault injection in tests).
    pub fn remove_slot(&mut self, i: usize) {
        let start = if i == 0 { 0 } else { self.ends[i - 1] as usize };
        let end = self.ends[i] as usize;
        self.terms.drain(start..end);
        self.kinds.remove(i);
        self.lambda.remove(i);
        let removed = (end - start) as u32;
        self.ends.remove(i);
        for e in &mut self.ends[i..] {
            *e -= removed;
        }
    }
}

#[derive(Serialize)]
struct SlotRecord<'a> {
    kind: SlotKind,
    target: User,
    terms: &'a [Term],
}

#[derive(Serialize)]
struct TransmissionRecord<'a> {
    lambda: &'a [User],
    slots: Vec<SlotRecord<'a>>,
}

impl Serialize for Transmission {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let slots = self
            .slots()
            .zip(&self.lambda)
            .map(|(s, &target)| SlotRecord { kind: s.kind, target, terms: s.terms })
            .collect();
        TransmissionRecord { lambda: &self.lambda, slots }.serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeTag {
    Cacheless,
    Twotype,
    Homogeneous,
    TwotypeFractional,
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeTag::Cacheless => "cacheless",
            SchemeTag::Twotype => "twotype",
            SchemeTag::Homogeneous => "homogeneous",
            SchemeTag::TwotypeFractional => "twotype-fractional",
        })
    }
}

/// A fully materialized schedule. Each transmission lasts `1/S`.
#[derive(Debug, Clone, Serialize)]
pub struct TransmissionPlan {
    pub scheme: SchemeTag,
    pub subpacketization: u64,
    pub transmissions: Vec<Transmission>,
}

impl TransmissionPlan {
    pub fn slot_duration(&self) -> Rational {
        Rational::new(1, self.subpacketization as i64)
    }

    pub fn measured_delay(&self) -> Rational {
        Rational::new(self.transmissions.len() as i64, self.subpacketization as i64)
    }

    pub fn len(&self) -> usize {
        self.transmissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissions.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(file: u32, tau: &[User]) -> SubfileId {
        SubfileId { file, tau1: tau.iter().copied().collect(), tau2: UserSet::EMPTY, phi1: 0, phi2: None }
    }

    fn sample() -> Transmission {
        let mut tx = Transmission::new();
        tx.push_slot(
            SlotKind::Xor,
            2,
            [Term { user: 1, id: id(1, &[2]) }, Term { user: 2, id: id(2, &[1]) }],
        );
        tx.push_uncoded(Term { user: 6, id: id(6, &[1]) });
        tx
    }

    #[test]
    fn slot_views() {
        let tx = sample();
        assert_eq!(tx.lambda(), &[2, 6]);
        assert_eq!(tx.slot_count(), 2);
        assert_eq!(tx.slot(0).terms.len(), 2);
        assert_eq!(tx.slot(1).kind, SlotKind::Uncoded);
        assert!(tx.slot(1).cached_by(1));
        assert!(!tx.slot(0).cached_by(1));
        assert_eq!(tx.addressed().to_vec(), vec![1, 2, 6]);
    }

    #[test]
    fn remove_slot_keeps_offsets() {
        let mut tx = sample();
        tx.remove_slot(0);
        assert_eq!(tx.lambda(), &[6]);
        assert_eq!(tx.slot(0).terms[0].user, 6);
    }

    #[test]
    fn serializes_trace_record() {
        let json = serde_json::to_string(&sample()).unwrap();
        assert!(json.starts_with(r#"{"lambda":[2,6],"slots":[{"kind":"xor","target":2,"terms":[{"user":1,"file":1,"tau1":[2]"#));
    }

    #[test]
    fn plan_delay() {
        let plan = TransmissionPlan {
            scheme: SchemeTag::Cacheless,
            subpacketization: 20,
            transmissions: vec![sample(); 40],
        };
        assert_eq!(plan.measured_delay(), 2);
        assert_eq!(plan.slot_duration(), Rational::new(1, 20));
    }
}
