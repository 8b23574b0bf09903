use thiserror::Error;

use crate::rational::Rational;
use crate::users::User;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cache redundancy K{group}*gamma{group} = {value} is not an integer")]
    NonIntegerRedundancy { group: u8, value: Rational },

    #[error("invalid stream split: {0}")]
    InvalidStreamSplit(String),

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("insufficient ground set: {available} candidates, {requested} requested")]
    InsufficientGround { available: usize, requested: usize },

    #[error("invalid demand vector: {0}")]
    InvalidDemands(String),

    #[error("subfile copy delivered twice to user {user}: {subfile}")]
    DuplicatePhi { user: User, subfile: String },

    #[error("no generic channel found after {attempts} draws over F_{prime}")]
    GenericityFailure { attempts: u32, prime: u64 },

    #[error("channel submatrix for users {0:?} is singular")]
    SingularSubmatrix(Vec<User>),

    #[error("{0} is not a prime below 2^32")]
    InvalidPrime(u64),

    #[error("instance too large for brute force: {0}")]
    InstanceTooLarge(String),

    #[error("infeasible placement profile: {0}")]
    InfeasibleProfile(String),

    #[error("malformed rational {0:?}, expected \"num/den\"")]
    ParseRational(String),
}

impl Error {
    /// Errors caused by the requested configuration rather than by a failed
    /// verification.
    pub fn is_config_error(&self) -> bool {
        !matches!(
            self,
            Error::DuplicatePhi { .. } | Error::GenericityFailure { .. } | Error::SingularSubmatrix(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
