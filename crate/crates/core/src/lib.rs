//! Multi-antenna coded caching with heterogeneous cache sizes.
//!
//! Builds placements and transmission schedules for two user groups with
//! different cache sizes behind an `L`-antenna transmitter, checks them
//! combinatorially ([`delivery::Census`]) and algebraically over a prime
//! field ([`channel`]), and evaluates the closed-form delays and bounds
//! ([`analysis`]).

pub mod analysis;
pub mod channel;
pub mod config;
pub mod delivery;
pub mod error;
pub mod placement;
pub mod rational;
pub mod report;
pub mod types;
pub mod users;

pub use config::{t_k, Demands, SystemConfig};
pub use delivery::{
    schedule_auto, schedule_cacheless, schedule_cacheless_general, schedule_homogeneous, schedule_twotype,
    schedule_twotype_fractional, schedule_twotype_residual, schedule_with, Schedule, SchemeChoice,
};
pub use error::{Error, Result};
pub use placement::{place_cacheless, place_homogeneous, place_twotype, place_twotype_fractional, split_streams};
pub use rational::Rational;
pub use types::{SchemeTag, Slot, SlotKind, SubfileId, Term, Transmission, TransmissionPlan};
pub use users::{enumerate_subsets, User, UserSet};
