use serde::Serialize;

use crate::config::Demands;
use crate::error::{Error, Result};
use crate::placement::Layout;
use crate::types::{Term, Transmission, TransmissionPlan};
use crate::users::{User, UserSet};

/// Per `(user, class)` delivery counts plus a per-copy bitmap.
///
/// Feed it transmissions with [`observe`](Census::observe); a copy seen
/// twice fails with [`Error::DuplicatePhi`].
#[derive(Debug, Clone)]
pub struct Census {
    layout: Layout,
    demands: Demands,
    streams: u32,
    counts: Vec<u32>,
    seen: Vec<u64>,
    transmissions: u64,
    cached_deliveries: u64,
    wrong_file: u64,
    malformed: u64,
}

impl Census {
    pub fn new(layout: &Layout, demands: &Demands, streams: u32) -> Self {
        let cells = layout.users() as usize * layout.classes();
        let bits = cells * layout.copies() as usize;
        Census {
            layout: layout.clone(),
            demands: demands.clone(),
            streams,
            counts: vec![0; cells],
            seen: vec![0; bits.div_ceil(64)],
            transmissions: 0,
            cached_deliveries: 0,
            wrong_file: 0,
            malformed: 0,
        }
    }

    pub fn observe(&mut self, tx: &Transmission) -> Result<()> {
        self.transmissions += 1;
        let lambda = tx.lambda_set();
        if lambda.len() != tx.lambda().len() || tx.lambda().len() > self.streams as usize || tx.slot_count() == 0 {
            self.malformed += 1;
        }
        for (slot, &target) in tx.slots().zip(tx.lambda()) {
            // the steered user must be served by its slot
            if slot.term_for(target).is_none() {
                self.malformed += 1;
            }
            for term in slot.terms {
                self.record(term)?;
            }
        }
        Ok(())
    }

    fn record(&mut self, term: &Term) -> Result<()> {
        let id = &term.id;
        if id.cached_by(term.user) {
            self.cached_deliveries += 1;
            return Ok(());
        }
        if id.file != self.demands.file(term.user) {
            self.wrong_file += 1;
            return Ok(());
        }
        let class = self.layout.class_index(id.tau1, id.tau2);
        let cell = (term.user as usize - 1) * self.layout.classes() + class;
        self.counts[cell] += 1;
        let bit = cell * self.layout.copies() as usize + self.layout.ordinal(id) as usize;
        let (w, b) = (bit / 64, bit % 64);
        if self.seen[w] >> b & 1 == 1 {
            return Err(Error::DuplicatePhi { user: term.user, subfile: id.to_string() });
        }
        self.seen[w] |= 1 << b;
        Ok(())
    }

    pub fn count(&self, user: User, tau1: UserSet, tau2: UserSet) -> u32 {
        self.counts[(user as usize - 1) * self.layout.classes() + self.layout.class_index(tau1, tau2)]
    }

    pub fn transmissions(&self) -> u64 {
        self.transmissions
    }

    /// Demanded classes delivered fewer than `copies` times.
    pub fn incomplete(&self) -> Vec<IncompleteClass> {
        let mut out = Vec::new();
        for user in 1..=self.layout.users() {
            for class in 0..self.layout.classes() {
                if !self.layout.demanded(user, class) {
                    continue;
                }
                let n = self.counts[(user as usize - 1) * self.layout.classes() + class];
                if n != self.layout.copies() {
                    let (tau1, tau2) = self.layout.class_sets(class);
                    out.push(IncompleteClass { user, tau1, tau2, delivered: n });
                }
            }
        }
        out
    }

    pub fn summary(&self) -> CensusSummary {
        let mut min = u32::MAX;
        let mut max = 0;
        let mut classes = 0u64;
        for user in 1..=self.layout.users() {
            for class in 0..self.layout.classes() {
                if self.layout.demanded(user, class) {
                    let n = self.counts[(user as usize - 1) * self.layout.classes() + class];
                    min = min.min(n);
                    max = max.max(n);
                    classes += 1;
                }
            }
        }
        let expected = self.layout.copies();
        CensusSummary {
            transmissions: self.transmissions,
            demanded_classes: classes,
            expected_per_class: expected,
            min_per_class: if classes == 0 { 0 } else { min },
            max_per_class: max,
            cached_deliveries: self.cached_deliveries,
            wrong_file: self.wrong_file,
            malformed: self.malformed,
            complete: classes > 0
                && min == expected
                && max == expected
                && self.cached_deliveries == 0
                && self.wrong_file == 0
                && self.malformed == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncompleteClass {
    pub user: User,
    pub tau1: UserSet,
    pub tau2: UserSet,
    pub delivered: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub transmissions: u64,
    pub demanded_classes: u64,
    pub expected_per_class: u32,
    pub min_per_class: u32,
    pub max_per_class: u32,
    pub cached_deliveries: u64,
    pub wrong_file: u64,
    pub malformed: u64,
    /// Every demanded class delivered exactly once per copy and nothing else.
    pub complete: bool,
}

/// Census of a materialized plan.
pub fn census(plan: &TransmissionPlan, layout: &Layout, demands: &Demands, streams: u32) -> Result<Census> {
    let mut c = Census::new(layout, demands, streams);
    for tx in &plan.transmissions {
        c.observe(tx)?;
    }
    Ok(c)
}
