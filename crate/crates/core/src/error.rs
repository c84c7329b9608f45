//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by group, isometry, factorization, and realization
/// operations. Internal consistency violations (scalar commutators that are
/// not scalar, pairing exponents that fail the divisibility guaranteed by
/// the structure theory) panic instead: they indicate a bug, never bad input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {found} at position {index} does not divide its predecessor {previous}")]
    ChainViolation {
        index: usize,
        found: u64,
        previous: u64,
    },

    #[error("modulus {0} is smaller than 2")]
    ModulusTooSmall(u64),

    #[error("elements belong to different shapes")]
    ShapeMismatch,

    #[error("({0}, {1}) is not a hyperbolic pair: orders and pairing must agree")]
    NotHyperbolic(String, String),

    #[error("subgroups or pairs are not mutually orthogonal")]
    NotOrthogonal,

    #[error("the pairing restricted to the subgroup is singular")]
    SingularSubgroup,

    #[error("operation needs {needed} materialized elements, bound is {bound}")]
    BoundExceeded { needed: u128, bound: u64 },

    #[error("orders {0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("matrix entry ({row},{col}) = {entry} does not define a homomorphism")]
    IllFormedHom { row: usize, col: usize, entry: u64 },

    #[error("map does not preserve the pairing on generators ({0}, {1})")]
    NotIsometry(usize, usize),

    #[error("transvection base must be nonzero")]
    ZeroBase,

    #[error("matrix determinant is not 1 modulo {0}")]
    NotUnimodular(u64),

    #[error("hyperbolic pairs are incompatible: {0}")]
    IncompatiblePairs(&'static str),

    #[error("element order {found} is not the maximal order {maximal}")]
    NotMaximalOrder { found: u64, maximal: u64 },

    #[error("root order {culprit} does not divide ambient root order {ambient}")]
    RootOrderIncompatible { culprit: u64, ambient: u64 },

    #[error("monomial dimensions {0} and {1} differ")]
    DimensionMismatch(usize, usize),

    #[error("conjugate of Y differs from the character prediction for exponent {expected}")]
    EigenMismatch { expected: u64 },

    #[error("label is not pure-Q: component {0} has a nonzero P part")]
    NotPureQ(usize),

    #[error("label must be nonzero")]
    OrderOne,

    #[error("matrix does not normalize K: conjugated generator {0} is not projectively Pauli")]
    NotNormalizing(usize),

    #[error("projective match is ambiguous at tolerance {tol}: generator {generator}")]
    AmbiguousMatch { generator: usize, tol: f64 },

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("invalid {what}: {detail}")]
    InvalidInput { what: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
