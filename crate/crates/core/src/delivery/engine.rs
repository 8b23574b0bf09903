//! Transmission generators. Each walks its loops in the documented order
//! and hands every transmission to a sink; nothing is buffered.

use crate::config::Demands;
use crate::error::Result;
use crate::placement::{CachelessDesign, CachelessRegime, Layout, TwotypeDesign, TwotypePlan};
use crate::types::{SlotKind, Term, Transmission};
use crate::users::{binomial, enumerate_subsets, User, UserSet};

use super::beta::beta_set;

pub(crate) type Sink<'a> = dyn FnMut(&Transmission) -> Result<()> + 'a;

/// Lazy copy allocation: every delivery of a class takes its next unused
/// copy. Counters wrap modulo the copy count, so an over-delivering
/// scheduler repeats a copy and the census reports it.
struct Alloc {
    copies: u32,
    classes: usize,
    tau2_classes: usize,
    next: Vec<u32>,
    any_cursor: Vec<usize>,
    tau1_cursor: Vec<usize>,
}

impl Alloc {
    fn new(layout: &Layout) -> Self {
        let users = layout.users() as usize;
        Alloc {
            copies: layout.copies(),
            classes: layout.classes(),
            tau2_classes: layout.tau2_classes(),
            next: vec![0; users * layout.classes()],
            any_cursor: vec![0; users],
            tau1_cursor: vec![0; users * layout.tau2_classes()],
        }
    }

    fn take(&mut self, user: User, class: usize) -> u32 {
        let slot = &mut self.next[(user as usize - 1) * self.classes + class];
        let o = *slot % self.copies;
        *slot += 1;
        o
    }

    fn exhausted(&self, user: User, class: usize) -> bool {
        self.next[(user as usize - 1) * self.classes + class] >= self.copies
    }

    /// Next copy of any class of `user`, classes taken in rank order.
    fn take_any(&mut self, user: User) -> usize {
        let mut cur = self.any_cursor[user as usize - 1];
        while cur + 1 < self.classes && self.exhausted(user, cur) {
            cur += 1;
        }
        self.any_cursor[user as usize - 1] = cur;
        cur
    }

    /// Next class `(τ1, tau2)` of `user` with a copy left, for fixed `tau2`.
    fn take_tau1(&mut self, user: User, rank2: usize) -> usize {
        let key = (user as usize - 1) * self.tau2_classes + rank2;
        let tau1_classes = self.classes / self.tau2_classes;
        let mut cur = self.tau1_cursor[key];
        while cur + 1 < tau1_classes && self.exhausted(user, cur * self.tau2_classes + rank2) {
            cur += 1;
        }
        self.tau1_cursor[key] = cur;
        cur * self.tau2_classes + rank2
    }
}

pub(crate) struct Emitter<'a, 's> {
    layout: &'a Layout,
    demands: &'a Demands,
    alloc: Alloc,
    tx: Transmission,
    scratch: Vec<Term>,
    sink: &'a mut Sink<'s>,
    count: u64,
}

impl<'a, 's> Emitter<'a, 's> {
    pub(crate) fn new(layout: &'a Layout, demands: &'a Demands, sink: &'a mut Sink<'s>) -> Self {
        Emitter { layout, demands, alloc: Alloc::new(layout), tx: Transmission::new(), scratch: Vec::new(), sink, count: 0 }
    }

    pub(crate) fn count(&self) -> u64 {
        self.count
    }

    fn term_for_class(&mut self, user: User, class: usize) -> Term {
        let o = self.alloc.take(user, class);
        let (tau1, tau2) = self.layout.class_sets(class);
        Term { user, id: self.layout.subfile(self.demands.file(user), tau1, tau2, o) }
    }

    fn own(&mut self, user: User, tau1: UserSet, tau2: UserSet) -> Term {
        let class = self.layout.class_index(tau1, tau2);
        self.term_for_class(user, class)
    }

    fn pooled_any(&mut self, user: User) -> Term {
        let class = self.alloc.take_any(user);
        self.term_for_class(user, class)
    }

    fn pooled_tau1(&mut self, user: User, tau2: UserSet) -> Term {
        let class = self.alloc.take_tau1(user, self.layout.tau2_rank(tau2));
        self.term_for_class(user, class)
    }

    /// Closes the XOR collected in `scratch` as a slot steered to `target`.
    fn flush_xor(&mut self, target: User) {
        self.tx.push_slot(SlotKind::Xor, target, self.scratch.drain(..));
    }

    fn emit(&mut self) -> Result<()> {
        self.count += 1;
        (self.sink)(&self.tx)
    }
}

/// `(χ, s)` pair of the homogeneous scheme with `τ = χ∖{s}` and its β.
struct Half {
    chi: UserSet,
    s: User,
    tau: UserSet,
    beta: Vec<User>,
}

fn halves(ground: &[User], t: u32, l: u32) -> Result<Vec<Half>> {
    let mut out = Vec::new();
    for chi in enumerate_subsets(ground, t as usize + 1)? {
        for s in chi.iter() {
            let tau = chi.without(s);
            let beta = beta_set(ground, tau, s, l as usize - 1)?;
            out.push(Half { chi, s, tau, beta });
        }
    }
    Ok(out)
}

/// How the other group's index is chosen when only one group is served.
#[derive(Clone, Copy)]
enum Side {
    /// Group 1 alone; `τ2 = ∅`.
    First,
    /// Group 2 alone; `τ1` pooled per `(user, τ2)`.
    Second,
}

/// Homogeneous multi-antenna pass: for each `χ` and `s ∈ χ`, send `X_χ` to `s` and uncoded
/// `W_τ` pieces to `β_{τ,s}`.
fn homogeneous_pass(e: &mut Emitter, hs: &[Half], side: Side) -> Result<()> {
    for h in hs {
        e.tx.clear();
        for k in h.chi.iter() {
            let t = match side {
                Side::First => e.own(k, h.chi.without(k), UserSet::EMPTY),
                Side::Second => e.pooled_tau1(k, h.chi.without(k)),
            };
            e.scratch.push(t);
        }
        e.flush_xor(h.s);
        for &b in &h.beta {
            let t = match side {
                Side::First => e.own(b, h.tau, UserSet::EMPTY),
                Side::Second => e.pooled_tau1(b, h.tau),
            };
            e.tx.push_uncoded(t);
        }
        e.emit()?;
    }
    Ok(())
}

pub(crate) fn run_homogeneous(e: &mut Emitter, k: u32, t: u32, l: u32) -> Result<()> {
    let ground: Vec<User> = (1..=k).collect();
    let hs = halves(&ground, t, l)?;
    homogeneous_pass(e, &hs, Side::First)
}

pub(crate) fn run_cacheless(e: &mut Emitter, d: &CachelessDesign, k1: u32, k2: u32, l: u32) -> Result<()> {
    let g1: Vec<User> = (1..=k1).collect();
    let g2: Vec<User> = (k1 + 1..=k1 + k2).collect();
    match d.regime {
        CachelessRegime::SingleStream => {
            homogeneous_pass(e, &halves(&g1, d.t1, 1)?, Side::First)?;
            let per_user = binomial(k1 as u64, d.t1 as u64) * d.copies as u64;
            for &u in &g2 {
                for _ in 0..per_user {
                    e.tx.clear();
                    let t = e.pooled_any(u);
                    e.tx.push_uncoded(t);
                    e.emit()?;
                }
            }
            return Ok(());
        }
        CachelessRegime::NoCacheless => {
            return homogeneous_pass(e, &halves(&g1, d.t1, l)?, Side::First);
        }
        _ => {}
    }
    let taus = enumerate_subsets(&g1, d.t1 as usize)?;
    let w = (l - 1) as usize;
    for _ in 0..d.runs {
        for &tau in &taus {
            for phi in g1.iter().copied().filter(|u| !tau.contains(*u)) {
                let chi = tau.with(phi);
                for j in 0..d.window_count as usize {
                    e.tx.clear();
                    for k in chi.iter() {
                        let t = e.own(k, chi.without(k), UserSet::EMPTY);
                        e.scratch.push(t);
                    }
                    e.flush_xor(phi);
                    for i in 0..w {
                        let u = g2[(j * w + i) % g2.len()];
                        let t = e.own(u, tau, UserSet::EMPTY);
                        e.tx.push_uncoded(t);
                    }
                    e.emit()?;
                }
            }
        }
    }
    match d.regime {
        CachelessRegime::CacheAidedTail => {
            let hs = halves(&g1, d.t1, l)?;
            for _ in 0..d.tail_runs {
                homogeneous_pass(e, &hs, Side::First)?;
            }
        }
        CachelessRegime::CachelessTail => {
            let lp = d.tail_streams as usize;
            for _ in 0..d.tail_runs {
                for j in 0..d.tail_windows as usize {
                    e.tx.clear();
                    for i in 0..lp {
                        let u = g2[(j * lp + i) % g2.len()];
                        let t = e.pooled_any(u);
                        e.tx.push_uncoded(t);
                    }
                    e.emit()?;
                }
            }
        }
        _ => {}
    }
    Ok(())
}

/// One pass of the two-group scheme with `l1` streams on group 1 and `l2` on group 2.
fn product_round(e: &mut Emitter, h1: &[Half], h2: &[Half]) -> Result<()> {
    for a in h1 {
        for b in h2 {
            e.tx.clear();
            for k in a.chi.iter() {
                let t = e.own(k, a.chi.without(k), b.tau);
                e.scratch.push(t);
            }
            e.flush_xor(a.s);
            for &u in &a.beta {
                let t = e.own(u, a.tau, b.tau);
                e.tx.push_uncoded(t);
            }
            for k in b.chi.iter() {
                let t = e.own(k, a.tau, b.chi.without(k));
                e.scratch.push(t);
            }
            e.flush_xor(b.s);
            for &u in &b.beta {
                let t = e.own(u, a.tau, b.tau);
                e.tx.push_uncoded(t);
            }
            e.emit()?;
        }
    }
    Ok(())
}

pub(crate) fn run_twotype(e: &mut Emitter, p: &TwotypePlan, k1: u32, k2: u32, l: u32) -> Result<()> {
    let g1: Vec<User> = (1..=k1).collect();
    let g2: Vec<User> = (k1 + 1..=k1 + k2).collect();
    // halves per stream count, built on first use
    let mut cache1: Vec<Option<Vec<Half>>> = (0..=l).map(|_| None).collect();
    let mut cache2: Vec<Option<Vec<Half>>> = (0..=l).map(|_| None).collect();
    let mut round = |e: &mut Emitter, l1: u32, l2: u32| -> Result<()> {
        if cache1[l1 as usize].is_none() {
            cache1[l1 as usize] = Some(halves(&g1, p.t1, l1)?);
        }
        if cache2[l2 as usize].is_none() {
            cache2[l2 as usize] = Some(halves(&g2, p.t2, l2)?);
        }
        product_round(e, cache1[l1 as usize].as_ref().unwrap(), cache2[l2 as usize].as_ref().unwrap())
    };
    match &p.design {
        TwotypeDesign::Rounds { rounds, .. } => {
            for &(l1, l2) in rounds {
                round(e, l1, l2)?;
            }
        }
        TwotypeDesign::Residual { runs, tail_runs, tail_streams } => {
            for _ in 0..*runs {
                round(e, 1, l - 1)?;
            }
            let hs = halves(&g2, p.t2, *tail_streams)?;
            for _ in 0..*tail_runs {
                homogeneous_pass(e, &hs, Side::Second)?;
            }
        }
    }
    Ok(())
}
