use super::*;
use crate::placement::round_allocation;
use crate::rational::Rational;
use crate::types::{SlotKind, Term};
use crate::users::UserSet;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn cfg(k1: u32, g1: Rational, k2: u32, g2: Rational, l: u32) -> SystemConfig {
    SystemConfig::with_min_library(k1, g1, k2, g2, l).unwrap()
}

fn auto(c: &SystemConfig) -> Schedule {
    schedule_auto(c, &Demands::identity(c.k())).unwrap()
}

fn set(users: &[u32]) -> UserSet {
    users.iter().copied().collect()
}

fn assert_complete(s: &Schedule) {
    let c = s.census().unwrap();
    let sum = c.summary();
    assert!(sum.complete, "{:?} {}: {sum:?} {:?}", s.config(), s.design().regime(), c.incomplete().first());
    assert_eq!(sum.transmissions, s.transmission_count());
}

fn measured(s: &Schedule) -> Rational {
    let n = s.run(&mut |_| Ok(())).unwrap();
    Rational::new(n as i64, s.subpacketization() as i64)
}

// (user, file, τ1, φ-ordinal) of every term in a slot
fn terms(tx: &Transmission, i: usize) -> Vec<(u32, u32, Vec<u32>, u32)> {
    tx.slot(i).terms.iter().map(|t| (t.user, t.id.file, t.id.tau1.to_vec(), t.id.phi1)).collect()
}

#[test]
fn cacheless_worked_example() {
    let c = cfg(5, r(1, 5), 2, Rational::zero(), 2);
    let d = Demands::identity(7);
    let s = schedule_cacheless(&c, &d).unwrap();
    let plan = s.plan().unwrap();
    assert_eq!(plan.len(), 40);
    assert_eq!(plan.subpacketization, 20);
    assert_eq!(plan.measured_delay(), 2);

    // A^{φ}_2 ⊕ B^{φ}_1 to user 2, F^{φ}_1 to user 6
    let tx = &plan.transmissions[0];
    assert_eq!(tx.lambda(), &[2, 6]);
    assert_eq!(tx.slot(0).kind, SlotKind::Xor);
    assert_eq!(terms(tx, 0), vec![(1, 1, vec![2], 0), (2, 2, vec![1], 0)]);
    assert_eq!(tx.slot(1).kind, SlotKind::Uncoded);
    assert_eq!(terms(tx, 1), vec![(6, 6, vec![1], 0)]);
    // next copy of the same XOR pairs with user 7
    let tx = &plan.transmissions[1];
    assert_eq!(tx.lambda(), &[2, 7]);
    assert_eq!(terms(tx, 0), vec![(1, 1, vec![2], 1), (2, 2, vec![1], 1)]);
    assert_eq!(terms(tx, 1), vec![(7, 7, vec![1], 0)]);

    let census = s.census().unwrap();
    for u in 1..=7 {
        for k in 1..=5 {
            if k != u {
                assert_eq!(census.count(u, UserSet::singleton(k), UserSet::EMPTY), 4);
            }
        }
    }
    assert!(census.summary().complete);
}

#[test]
fn cacheless_uncoded_pieces_fit_their_xor() {
    for c in [cfg(5, r(1, 5), 2, Rational::zero(), 2), cfg(7, r(1, 7), 6, Rational::zero(), 3)] {
        let s = schedule_cacheless(&c, &Demands::identity(c.k())).unwrap();
        s.run(&mut |tx| {
            let xor = tx.slot(0);
            let chi: UserSet = xor.terms.iter().map(|t| t.user).collect();
            for slot in tx.slots().skip(1) {
                let tau = slot.terms[0].id.tau1;
                assert_eq!(tau, chi.without(tx.lambda()[0]));
                assert!(tau.is_subset(chi));
            }
            Ok(())
        })
        .unwrap();
    }
}

#[test]
fn cacheless_regime_gate() {
    let c = cfg(4, r(1, 2), 1, Rational::zero(), 2);
    let d = Demands::identity(5);
    assert!(matches!(schedule_cacheless(&c, &d), Err(Error::RegimeMismatch(_))));
    let s = schedule_cacheless_general(&c, &d).unwrap();
    assert_eq!(s.subpacketization(), 18);
    assert_eq!(measured(&s), 1);
    assert_complete(&s);
}

#[test]
fn cacheless_delays() {
    let cases = [
        ((7, r(1, 7), 10, 2), r(13, 2)),
        ((7, r(1, 7), 10, 1), r(13, 1)),
        ((5, r(1, 5), 1, 2), r(5, 3)),
        ((4, r(1, 4), 3, 3), r(3, 2)),
        ((6, r(1, 3), 5, 2), r(19, 6)),
    ];
    for ((k1, g1, k2, l), want) in cases {
        let s = auto(&cfg(k1, g1, k2, Rational::zero(), l));
        assert_eq!(measured(&s), want, "({k1}, {k2}, {l})");
        assert_eq!(s.expected_delay(), want);
        assert_complete(&s);
    }
}

#[test]
fn twotype_worked_example() {
    let c = cfg(5, r(2, 5), 4, r(1, 4), 3);
    let s = schedule_twotype(&c, &Demands::identity(9), 1, 2).unwrap();
    let plan = s.plan().unwrap();
    assert_eq!(plan.len(), 360);
    assert_eq!(plan.subpacketization, 360);
    assert_eq!(plan.measured_delay(), 1);
    let tx = &plan.transmissions[0];
    assert_eq!(tx.lambda(), &[1, 6, 8]);
    type Ids = Vec<(u32, Vec<u32>, Vec<u32>)>;
    let ids: Vec<Ids> = (0..3)
        .map(|i| tx.slot(i).terms.iter().map(|t| (t.user, t.id.tau1.to_vec(), t.id.tau2.to_vec())).collect())
        .collect();
    assert_eq!(
        ids,
        vec![
            vec![(1, vec![2, 3], vec![7]), (2, vec![1, 3], vec![7]), (3, vec![1, 2], vec![7])],
            vec![(6, vec![2, 3], vec![7]), (7, vec![2, 3], vec![6])],
            vec![(8, vec![2, 3], vec![7])],
        ]
    );
    assert_complete(&s);
}

#[test]
fn twotype_split_errors() {
    let c = cfg(5, r(2, 5), 4, r(1, 4), 3);
    let d = Demands::identity(9);
    assert!(matches!(schedule_twotype(&c, &d, 2, 1), Err(Error::InvalidStreamSplit(_))));
    assert!(matches!(schedule_twotype(&c, &d, 1, 1), Err(Error::InvalidStreamSplit(_))));
    assert!(matches!(schedule_twotype(&c, &d, 0, 3), Err(Error::InvalidStreamSplit(_))));
    let c = cfg(7, r(1, 7), 10, r(1, 10), 2);
    assert!(matches!(schedule_twotype(&c, &Demands::identity(17), 1, 1), Err(Error::RegimeMismatch(_))));
}

#[test]
fn residual_delays() {
    for ((k1, g1, k2, g2), want) in [((7, r(1, 7), 10, r(1, 10)), r(4, 1)), ((4, r(1, 2), 6, r(1, 6)), r(17, 9))] {
        let c = cfg(k1, g1, k2, g2, 2);
        let s = schedule_twotype_residual(&c, &Demands::identity(c.k())).unwrap();
        assert_eq!(s.design().regime(), "residual");
        assert_eq!(measured(&s), want);
        assert_complete(&s);
    }
}

#[test]
fn fractional_split() {
    // 2/(L1+1) = 3/(L2+1) with L = 4 gives L1 = 7/5
    let c = cfg(3, r(1, 3), 4, r(1, 4), 4);
    let s = auto(&c);
    assert_eq!(s.design().regime(), "fractional-split");
    let Design::Twotype(p) = s.design() else { panic!() };
    let TwotypeDesign::Rounds { rounds, d } = &p.design else { panic!() };
    assert_eq!(*d, 5);
    assert_eq!(rounds.len(), 25);
    assert_eq!(rounds.iter().filter(|r| **r == (2, 2)).count(), 10);
    assert_eq!(rounds.iter().filter(|r| **r == (1, 3)).count(), 15);
    // (n1 + n2)/(L + t1 + t2)
    assert_eq!(measured(&s), r(5, 6));
    assert_complete(&s);

    let c = cfg(5, r(2, 5), 4, r(1, 4), 4);
    let s = auto(&c);
    assert_eq!(measured(&s), r(6, 7));
    assert_complete(&s);
}

#[test]
fn round_allocation_averages() {
    let rounds = round_allocation(&r(7, 5), 3).unwrap();
    assert_eq!(rounds.len(), 25);
    assert_eq!(rounds.iter().filter(|r| **r == (2, 1)).count(), 10);
    assert_eq!(round_allocation(&r(3, 2), 3).unwrap(), vec![(1, 2), (2, 1), (1, 2), (2, 1)]);
    assert_eq!(round_allocation(&r(2, 1), 3).unwrap(), vec![(2, 1)]);
    assert!(round_allocation(&r(1, 2), 3).is_err());
}

#[test]
fn homogeneous_schedule() {
    let s = schedule_homogeneous(5, &r(1, 5), 2, &Demands::identity(5)).unwrap();
    assert_eq!(s.transmission_count(), 20);
    assert_eq!(s.subpacketization(), 15);
    assert_eq!(measured(&s), r(4, 3));
    let census = s.census().unwrap();
    for u in 1..=5 {
        for k in (1..=5).filter(|&k| k != u) {
            assert_eq!(census.count(u, UserSet::singleton(k), UserSet::EMPTY), 3);
        }
    }
    assert!(census.summary().complete);
    let s = schedule_homogeneous(7, &r(1, 7), 2, &Demands::identity(7)).unwrap();
    assert_eq!(measured(&s), 2);
    assert!(matches!(
        schedule_homogeneous(4, &r(3, 4), 2, &Demands::identity(4)),
        Err(Error::InsufficientGround { .. })
    ));
}

#[test]
fn repeated_demands_rejected() {
    let c = cfg(5, r(1, 5), 2, Rational::zero(), 2);
    let d = Demands::new(vec![1, 2, 3, 4, 5, 6, 7], 7).unwrap();
    assert!(schedule_cacheless(&c, &d).is_ok());
    assert!(Demands::new(vec![1, 1, 3, 4, 5, 6, 7], 7).is_err());
    assert!(matches!(schedule_cacheless(&c, &Demands::identity(6)), Err(Error::InvalidDemands(_))));
}

#[test]
fn permuted_demands_stay_complete() {
    let c = SystemConfig::new(5, r(2, 5), 4, r(1, 4), 3, 12).unwrap();
    let d = Demands::new(vec![12, 3, 7, 1, 9, 2, 11, 5, 4], 12).unwrap();
    let s = schedule_auto(&c, &d).unwrap();
    assert_complete(&s);
    let plan = s.plan().unwrap();
    assert!(plan.transmissions.iter().all(|tx| tx.terms().iter().all(|t| t.id.file == d.file(t.user))));
}

#[test]
fn scheme_choice() {
    let c = cfg(5, r(1, 5), 0, Rational::zero(), 2);
    let d = Demands::identity(5);
    assert_eq!(schedule_with(SchemeChoice::Homogeneous, &c, &d).unwrap().scheme(), SchemeTag::Homogeneous);
    assert_eq!(schedule_with(SchemeChoice::Auto, &c, &d).unwrap().scheme(), SchemeTag::Cacheless);
    assert!(schedule_with(SchemeChoice::Twotype, &c, &d).is_err());
    let c = cfg(5, r(1, 5), 2, Rational::zero(), 2);
    assert!(schedule_with(SchemeChoice::Homogeneous, &c, &Demands::identity(7)).is_err());
}

#[test]
fn toy_census() {
    let layout = Layout::single(3, 1, 3, 0);
    let d = Demands::identity(3);
    let mut tx = Transmission::new();
    let a = Term { user: 1, id: layout.subfile(1, set(&[2]), UserSet::EMPTY, 0) };
    let b = Term { user: 2, id: layout.subfile(2, set(&[1]), UserSet::EMPTY, 0) };
    tx.push_slot(SlotKind::Xor, 1, [a, b]);
    let plan = TransmissionPlan { scheme: SchemeTag::Homogeneous, subpacketization: 9, transmissions: vec![tx.clone()] };
    let c = census(&plan, &layout, &d, 2).unwrap();
    assert_eq!(c.count(1, set(&[2]), UserSet::EMPTY), 1);
    assert_eq!(c.count(2, set(&[1]), UserSet::EMPTY), 1);
    assert_eq!(c.count(1, set(&[3]), UserSet::EMPTY), 0);
    assert_eq!(c.count(3, set(&[1]), UserSet::EMPTY), 0);
    let sum = c.summary();
    assert!(!sum.complete);
    assert_eq!(sum.malformed, 0);
    // one of three copies is not enough
    assert_eq!(c.incomplete().len(), 6);

    // same copy twice
    let plan = TransmissionPlan { transmissions: vec![tx.clone(), tx], ..plan };
    assert!(matches!(census(&plan, &layout, &d, 2), Err(Error::DuplicatePhi { user: 1, .. })));
}

#[test]
fn census_flags_dropped_slot() {
    let s = auto(&cfg(5, r(1, 5), 2, Rational::zero(), 2));
    let mut plan = s.plan().unwrap();
    plan.transmissions[5].remove_slot(1);
    let c = census(&plan, s.layout(), s.demands(), 2).unwrap();
    let sum = c.summary();
    assert!(!sum.complete);
    assert_eq!(sum.min_per_class, 3);
    assert_eq!(c.incomplete().len(), 1);
}

#[test]
fn census_flags_cached_piece() {
    let s = auto(&cfg(5, r(1, 5), 2, Rational::zero(), 2));
    let mut plan = s.plan().unwrap();
    let layout = s.layout().clone();
    let mut tx = Transmission::new();
    tx.push_uncoded(Term { user: 1, id: layout.subfile(1, set(&[1]), UserSet::EMPTY, 0) });
    plan.transmissions.push(tx);
    let sum = census(&plan, &layout, s.demands(), 2).unwrap().summary();
    assert_eq!(sum.cached_deliveries, 1);
    assert!(!sum.complete);
}

#[test]
fn sweep_small_configs() {
    let mut ran = 0;
    for k1 in 2..=7u32 {
        for t1 in 1..k1 {
            for k2 in 0..=6u32 {
                for t2 in 0..k2.max(1) {
                    let g2 = if k2 == 0 { Rational::zero() } else { r(t2 as i64, k2 as i64) };
                    if g2 >= r(t1 as i64, k1 as i64) {
                        continue;
                    }
                    for l in 1..=5u32 {
                        let c = cfg(k1, r(t1 as i64, k1 as i64), k2, g2.clone(), l);
                        let Ok(s) = schedule_auto(&c, &Demands::identity(c.k())) else { continue };
                        if s.transmission_count() > 200_000 {
                            continue;
                        }
                        assert_complete(&s);
                        ran += 1;
                    }
                }
            }
        }
    }
    assert!(ran > 900, "{ran}");
}
