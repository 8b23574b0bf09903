//! Zero-forcing over a prime field.
//!
//! The channel is a random `K×L` matrix over `F_p`. For a precoded set
//! `λ` the precoder is the inverse of the `λ`-rows restricted to the
//! leading `|λ|` antennas, so `h_k · p_l = δ_{kl}` for `k, l ∈ λ`. Every
//! receiver sees a linear combination of the information slots with
//! known coefficients, cancels what its cache covers, and must be left
//! with exactly one slot holding one unknown piece.

mod field;

pub use field::{Field, DEFAULT_PRIME};

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Demands;
use crate::delivery::Schedule;
use crate::error::{Error, Result};
use crate::placement::Layout;
use crate::types::{SlotKind, SubfileId, Transmission};
use crate::users::{binomial, User, UserSet};

/// Resampling budget of [`gen_channel`].
pub const MAX_DRAWS: u32 = 32;

/// Most failures kept verbatim in a [`DecodeReport`].
pub const FAILURE_CAP: usize = 64;

#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    field: Field,
    users: u32,
    antennas: u32,
    seed: u64,
    draws: u32,
    h: Vec<u64>,
}

impl ChannelMatrix {
    /// One draw from the seeded stream, without any genericity check.
    fn draw(rng: &mut ChaCha8Rng, field: Field, users: u32, antennas: u32, seed: u64, draws: u32) -> Self {
        let h = (0..users * antennas).map(|_| rng.gen_range(0..field.prime())).collect();
        ChannelMatrix { field, users, antennas, seed, draws, h }
    }

    /// A channel with the given entries (row `k−1` is user `k`).
    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Result<Self> {
        let antennas = rows.first().map_or(0, |r| r.len());
        if antennas == 0 || rows.iter().any(|r| r.len() != antennas) {
            return Err(Error::InvalidConfig("channel rows must be non-empty and equally long".into()));
        }
        let h = rows.iter().flatten().map(|&x| field.reduce(x)).collect();
        Ok(ChannelMatrix { field, users: rows.len() as u32, antennas: antennas as u32, seed: 0, draws: 0, h })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn users(&self) -> u32 {
        self.users
    }

    pub fn antennas(&self) -> u32 {
        self.antennas
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draws used before a generic matrix was found (1 for the first).
    pub fn draws(&self) -> u32 {
        self.draws
    }

    pub fn row(&self, user: User) -> &[u64] {
        let a = self.antennas as usize;
        &self.h[(user as usize - 1) * a..user as usize * a]
    }

    /// Whether `zf_precoder(lambda)` exists and leaves every other user a
    /// nonzero coefficient on every slot.
    pub fn is_generic_for(&self, lambda: UserSet) -> bool {
        let Ok(p) = zf_precoder(self, lambda) else { return false };
        (1..=self.users)
            .filter(|&k| !lambda.contains(k))
            .all(|k| p.columns.iter().all(|c| self.field.dot(self.row(k), c) != 0))
    }
}

/// Seeded channel, resampled until every user set of size `min(L, K)` is
/// generic.
pub fn gen_channel(users: u32, antennas: u32, seed: u64, prime: u64) -> Result<ChannelMatrix> {
    let size = antennas.min(users) as usize;
    let count = binomial(users as u64, size as u64);
    if count > 1 << 20 {
        return Err(Error::InvalidConfig(format!(
            "{count} user sets of size {size}; check only the sets a plan uses"
        )));
    }
    let ground: Vec<User> = (1..=users).collect();
    let sets = crate::users::enumerate_subsets(&ground, size)?;
    gen_channel_for(users, antennas, seed, prime, &sets)
}

/// Seeded channel, resampled until every set in `lambdas` is generic.
pub fn gen_channel_for(users: u32, antennas: u32, seed: u64, prime: u64, lambdas: &[UserSet]) -> Result<ChannelMatrix> {
    let field = Field::new(prime)?;
    if users == 0 || antennas == 0 {
        return Err(Error::InvalidConfig("channel needs at least one user and one antenna".into()));
    }
    if let Some(bad) = lambdas.iter().find(|s| s.len() > antennas as usize || s.iter().any(|u| u > users)) {
        return Err(Error::InvalidConfig(format!("user set {bad} does not fit a {users}x{antennas} channel")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 1..=MAX_DRAWS {
        let h = ChannelMatrix::draw(&mut rng, field, users, antennas, seed, draw);
        if lambdas.iter().all(|&s| h.is_generic_for(s)) {
            return Ok(h);
        }
    }
    Err(Error::GenericityFailure { attempts: MAX_DRAWS, prime })
}

/// Columns of `H_λ^{-1}`, one per user of `λ` in ascending order, padded
/// with zeros on the antennas beyond `|λ|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precoder {
    pub lambda: UserSet,
    pub columns: Vec<Vec<u64>>,
}

impl Precoder {
    /// Beamformer carrying the slot steered to `user`.
    pub fn column_for(&self, user: User) -> Option<&[u64]> {
        self.lambda.iter().position(|u| u == user).map(|i| self.columns[i].as_slice())
    }
}

pub fn zf_precoder(channel: &ChannelMatrix, lambda: UserSet) -> Result<Precoder> {
    let n = lambda.len();
    let users = lambda.to_vec();
    if n == 0 || n > channel.antennas as usize || users.iter().any(|&u| u == 0 || u > channel.users) {
        return Err(Error::InvalidConfig(format!(
            "cannot precode {lambda} with {} antennas and {} users",
            channel.antennas, channel.users
        )));
    }
    let sub: Vec<u64> = users.iter().flat_map(|&u| channel.row(u)[..n].to_vec()).collect();
    let inv = channel.field.invert(&sub, n).ok_or_else(|| Error::SingularSubmatrix(users.clone()))?;
    let columns = (0..n)
        .map(|c| {
            let mut col: Vec<u64> = (0..n).map(|r| inv[r * n + c]).collect();
            col.resize(channel.antennas as usize, 0);
            col
        })
        .collect();
    Ok(Precoder { lambda, columns })
}

/// Per-receiver coefficients of the information slots of one
/// transmission, in slot order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientLedger {
    pub slots: usize,
    coefficients: Vec<u64>,
}

impl CoefficientLedger {
    pub fn coefficients(&self, user: User) -> &[u64] {
        &self.coefficients[(user as usize - 1) * self.slots..user as usize * self.slots]
    }
}

/// Coefficients of `user` on the slots of `tx`.
pub fn receive_user(channel: &ChannelMatrix, precoder: &Precoder, tx: &Transmission, user: User, out: &mut Vec<u64>) {
    out.clear();
    let h = channel.row(user);
    for &target in tx.lambda() {
        let col = precoder.column_for(target).expect("precoder built for this lambda");
        out.push(channel.field.dot(h, col));
    }
}

pub fn receive(tx: &Transmission, channel: &ChannelMatrix, precoder: &Precoder) -> CoefficientLedger {
    let mut coefficients = Vec::with_capacity(channel.users as usize * tx.slot_count());
    let mut row = Vec::new();
    for k in 1..=channel.users {
        receive_user(channel, precoder, tx, k, &mut row);
        coefficients.extend_from_slice(&row);
    }
    CoefficientLedger { slots: tx.slot_count(), coefficients }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureCause {
    /// Two or more slots survive cancellation.
    Uncancelable,
    /// The slot with the user's piece reaches it with coefficient zero.
    ZeroDesiredCoefficient,
    /// The user's XOR contains another piece it does not cache.
    XorUnresolvable,
    /// The decoded payload differs from the piece's payload.
    PayloadMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// No piece for this user in the transmission.
    NotAddressed,
    Recovered(SubfileId),
    Failed(FailureCause),
}

/// Decodes the piece of `user` from its coefficients, cancelling every
/// slot that `cached` covers.
pub fn decode_user(
    coefficients: &[u64],
    user: User,
    tx: &Transmission,
    cached: &dyn Fn(&SubfileId) -> bool,
) -> DecodeOutcome {
    let Some(desired) = tx.slots().position(|s| s.term_for(user).is_some()) else {
        return DecodeOutcome::NotAddressed;
    };
    if coefficients[desired] == 0 {
        return DecodeOutcome::Failed(FailureCause::ZeroDesiredCoefficient);
    }
    for (i, slot) in tx.slots().enumerate() {
        if i != desired && coefficients[i] != 0 && !slot.terms.iter().all(|t| cached(&t.id)) {
            return DecodeOutcome::Failed(FailureCause::Uncancelable);
        }
    }
    let slot = tx.slot(desired);
    let own = slot.term_for(user).expect("desired slot");
    if slot.terms.iter().any(|t| t.user != user && !cached(&t.id)) {
        return DecodeOutcome::Failed(FailureCause::XorUnresolvable);
    }
    DecodeOutcome::Recovered(own.id)
}

/// Deterministic stand-in for the content of a piece, an element of `F_p`.
pub fn payload(field: Field, salt: u64, id: &SubfileId) -> u64 {
    let mut x = salt;
    for v in [id.file as u64, id.tau1.bits(), id.tau2.bits(), id.phi1 as u64, id.phi2.map_or(u64::MAX, |p| p as u64)] {
        x = splitmix(x ^ v);
    }
    field.reduce(x)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Decodes a recovered piece's payload from the received symbol: subtracts
/// the cached slots, normalizes, and removes the cached XOR partners.
fn decode_payload(
    field: Field,
    salt: u64,
    coefficients: &[u64],
    tx: &Transmission,
    user: User,
    cached: &dyn Fn(&SubfileId) -> bool,
) -> Option<u64> {
    // transmitter side
    let symbols: Vec<u64> = tx
        .slots()
        .map(|s| s.terms.iter().fold(0, |acc, t| field.add(acc, payload(field, salt, &t.id))))
        .collect();
    let y = field.dot(coefficients, &symbols);
    // receiver side, using only cached pieces
    let known_symbol = |i: usize| -> u64 {
        tx.slot(i).terms.iter().filter(|t| cached(&t.id)).fold(0, |acc, t| field.add(acc, payload(field, salt, &t.id)))
    };
    let desired = tx.slots().position(|s| s.term_for(user).is_some())?;
    let mut rest = y;
    for i in (0..tx.slot_count()).filter(|&i| i != desired) {
        rest = field.sub(rest, field.mul(coefficients[i], known_symbol(i)));
    }
    let sum = field.mul(rest, field.inv(coefficients[desired])?);
    Some(field.sub(sum, known_symbol(desired)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeFailure {
    pub transmission: u64,
    pub user: User,
    pub cause: FailureCause,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserDecode {
    pub user: User,
    pub file: u32,
    pub recovered: u64,
    pub expected: u64,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingClass {
    pub user: User,
    pub tau1: UserSet,
    pub tau2: UserSet,
    pub recovered: u32,
    pub expected: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeReport {
    pub seed: u64,
    pub prime: u64,
    pub channel_draws: u32,
    pub transmissions: u64,
    pub users: Vec<UserDecode>,
    pub failure_count: u64,
    /// The first [`FAILURE_CAP`] failures.
    pub failures: Vec<DecodeFailure>,
    /// Copies recovered more than once.
    pub duplicates: u64,
    /// Demanded classes with copies missing, at most [`FAILURE_CAP`].
    pub missing: Vec<MissingClass>,
    pub missing_count: u64,
    /// Every user recovered every demanded copy exactly once.
    pub success: bool,
}

/// Whether a user caches a subfile.
type CacheOracle<'a> = Box<dyn Fn(User, &SubfileId) -> bool + 'a>;

/// Streaming decodability check. Feed transmissions in order with
/// [`observe`](Verifier::observe), then [`finish`](Verifier::finish).
pub struct Verifier<'a> {
    channel: &'a ChannelMatrix,
    layout: &'a Layout,
    demands: &'a Demands,
    precoders: HashMap<u64, Precoder>,
    payloads: bool,
    cached: CacheOracle<'a>,
    seen: Vec<u64>,
    index: u64,
    failures: Vec<DecodeFailure>,
    failure_count: u64,
    duplicates: u64,
    row: Vec<u64>,
}

impl<'a> Verifier<'a> {
    pub fn new(channel: &'a ChannelMatrix, layout: &'a Layout, demands: &'a Demands) -> Self {
        let bits = layout.users() as usize * layout.classes() * layout.copies() as usize;
        Verifier {
            channel,
            layout,
            demands,
            precoders: HashMap::new(),
            payloads: true,
            cached: Box::new(|user, id: &SubfileId| id.cached_by(user)),
            seen: vec![0; bits.div_ceil(64)],
            index: 0,
            failures: Vec::new(),
            failure_count: 0,
            duplicates: 0,
            row: Vec::new(),
        }
    }

    /// Skip the payload arithmetic and decode symbolically only.
    pub fn without_payloads(mut self) -> Self {
        self.payloads = false;
        self
    }

    /// Replaces the cache contents the receivers decode with.
    pub fn with_cache(mut self, cached: impl Fn(User, &SubfileId) -> bool + 'a) -> Self {
        self.cached = Box::new(cached);
        self
    }

    fn fail(&mut self, user: User, cause: FailureCause) {
        self.failure_count += 1;
        if self.failures.len() < FAILURE_CAP {
            self.failures.push(DecodeFailure { transmission: self.index, user, cause });
        }
    }

    pub fn observe(&mut self, tx: &Transmission) -> Result<()> {
        let lambda = tx.lambda_set();
        if !self.precoders.contains_key(&lambda.bits()) {
            let p = zf_precoder(self.channel, lambda)?;
            self.precoders.insert(lambda.bits(), p);
        }
        let mut outcomes = [(0, DecodeOutcome::NotAddressed); 64];
        let mut n = 0;
        {
            let precoder = &self.precoders[&lambda.bits()];
            let field = self.channel.field;
            let salt = self.channel.seed;
            let row = &mut self.row;
            for user in tx.addressed().iter() {
                receive_user(self.channel, precoder, tx, user, row);
                let cached = |id: &SubfileId| (self.cached)(user, id);
                let outcome = match decode_user(row, user, tx, &cached) {
                    DecodeOutcome::Recovered(id) if self.payloads => {
                        match decode_payload(field, salt, row, tx, user, &cached) {
                            Some(v) if v == payload(field, salt, &id) => DecodeOutcome::Recovered(id),
                            _ => DecodeOutcome::Failed(FailureCause::PayloadMismatch),
                        }
                    }
                    o => o,
                };
                outcomes[n] = (user, outcome);
                n += 1;
            }
        }
        for &(user, outcome) in &outcomes[..n] {
            match outcome {
                DecodeOutcome::NotAddressed => {}
                DecodeOutcome::Failed(cause) => self.fail(user, cause),
                DecodeOutcome::Recovered(id) => self.mark(user, &id),
            }
        }
        self.index += 1;
        Ok(())
    }

    fn mark(&mut self, user: User, id: &SubfileId) {
        if id.file != self.demands.file(user) || id.cached_by(user) {
            return;
        }
        let class = self.layout.class_index(id.tau1, id.tau2);
        let bit = ((user as usize - 1) * self.layout.classes() + class) * self.layout.copies() as usize
            + self.layout.ordinal(id) as usize;
        let (w, b) = (bit / 64, bit % 64);
        if self.seen[w] >> b & 1 == 1 {
            self.duplicates += 1;
        }
        self.seen[w] |= 1 << b;
    }

    pub fn finish(self) -> DecodeReport {
        let copies = self.layout.copies() as usize;
        let mut users = Vec::new();
        let mut missing = Vec::new();
        let mut missing_count = 0;
        for user in 1..=self.layout.users() {
            let (mut recovered, mut expected) = (0u64, 0u64);
            for class in 0..self.layout.classes() {
                if !self.layout.demanded(user, class) {
                    continue;
                }
                let base = ((user as usize - 1) * self.layout.classes() + class) * copies;
                let got = (base..base + copies).filter(|&b| self.seen[b / 64] >> (b % 64) & 1 == 1).count() as u32;
                recovered += got as u64;
                expected += copies as u64;
                if got as usize != copies {
                    missing_count += 1;
                    if missing.len() < FAILURE_CAP {
                        let (tau1, tau2) = self.layout.class_sets(class);
                        missing.push(MissingClass { user, tau1, tau2, recovered: got, expected: copies as u32 });
                    }
                }
            }
            users.push(UserDecode {
                user,
                file: self.demands.file(user),
                recovered,
                expected,
                complete: recovered == expected,
            });
        }
        DecodeReport {
            seed: self.channel.seed,
            prime: self.channel.field.prime(),
            channel_draws: self.channel.draws,
            transmissions: self.index,
            success: self.failure_count == 0 && self.duplicates == 0 && missing_count == 0,
            users,
            failure_count: self.failure_count,
            failures: self.failures,
            duplicates: self.duplicates,
            missing,
            missing_count,
        }
    }
}

/// Decodes every transmission of a materialized plan.
pub fn verify_plan(
    transmissions: &[Transmission],
    layout: &Layout,
    channel: &ChannelMatrix,
    demands: &Demands,
) -> Result<DecodeReport> {
    let mut v = Verifier::new(channel, layout, demands);
    for tx in transmissions {
        v.observe(tx)?;
    }
    Ok(v.finish())
}

/// Precoded sets used by a schedule.
pub fn lambda_sets(schedule: &Schedule) -> Result<Vec<UserSet>> {
    let mut sets = HashSet::new();
    schedule.run(&mut |tx| {
        sets.insert(tx.lambda_set());
        Ok(())
    })?;
    let mut out: Vec<UserSet> = sets.into_iter().collect();
    out.sort_by_key(|s| s.bits());
    Ok(out)
}

/// Draws a channel generic for the schedule's precoded sets and decodes
/// the whole schedule, streaming.
pub fn verify_schedule(schedule: &Schedule, seed: u64, prime: u64) -> Result<DecodeReport> {
    let cfg = schedule.config();
    let channel = gen_channel_for(cfg.k(), cfg.l, seed, prime, &lambda_sets(schedule)?)?;
    let mut v = Verifier::new(&channel, schedule.layout(), schedule.demands());
    schedule.run(&mut |tx| v.observe(tx))?;
    Ok(v.finish())
}

/// Whether every slot kind matches its content: XOR slots are steered to a
/// member, uncoded slots carry one piece.
pub fn well_formed(tx: &Transmission) -> bool {
    tx.slots().zip(tx.lambda()).all(|(s, &target)| match s.kind {
        SlotKind::Xor => s.term_for(target).is_some(),
        SlotKind::Uncoded => s.terms.len() == 1 && s.terms[0].user == target,
    })
}
