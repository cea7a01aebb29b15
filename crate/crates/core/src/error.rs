use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty prime range: limit {0} is below 3")]
    EmptyRange(u64),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("word of length {len} does not fit in the residue word of p = {p}")]
    InvalidLength { len: usize, p: u64 },

    #[error("degenerate curve {0}: f vanishes identically")]
    DegenerateCurve(String),

    #[error("curve {label} has bad reduction at p = {p}")]
    BadReduction { label: String, p: u64 },

    #[error("p = {p} is not congruent to {expected} mod 4")]
    WrongClass { p: u64, expected: u8 },

    #[error("{what} = {value} is outside the supported range ({constraint})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        constraint: &'static str,
    },

    #[error("p = {0} is 3 mod 4: residue graphs are oriented and not supported")]
    OrientedCaseUnsupported(u64),

    #[error("tuple entries must be pairwise distinct mod p")]
    InvalidTuple,

    #[error("identity `{identity}` violated at p = {p}: {detail}")]
    IdentityViolation {
        identity: &'static str,
        p: u64,
        detail: String,
    },

    #[error("interpolation basis is deficient: rank {rank} < {needed}")]
    BasisDeficient { rank: usize, needed: usize },

    #[error(
        "class {class_id} is not a polynomial in the capped basis (held-out mismatch at p = {p})"
    )]
    NonPolynomial { class_id: usize, p: u64 },

    #[error("internal consistency: {0}")]
    Inconsistent(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
