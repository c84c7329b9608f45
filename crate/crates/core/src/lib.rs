//! Finite nonsingular symplectic abelian groups, their transvection-generated
//! isometry groups, and the fine grading of `sl(n,C)` induced by tensor
//! products of generalized Pauli matrices.
//!
//! The crate has three layers:
//!
//! - exact group theory: shapes `[l1,...,lk]`, the symplectic pairing stored
//!   as root-of-unity exponents, isometries, transvections, brute-force
//!   enumeration of `Sp(H)` and the transvection closure `Q(H)`
//!   ([`sympcore`], [`isom`]);
//! - constructive factorization: Euclidean `SL(2,Z_n)` words, reduction of a
//!   maximal-order element to `u_1`, swaps of isometric hyperbolic summands,
//!   and factorization of an arbitrary isometry into transvections
//!   ([`factor`]);
//! - the matrix side: exact monomial models of the Pauli operators, the fine
//!   grading of `gl(n,C)`/`sl(n,C)`, and a numeric construction of normalizer
//!   elements of `PGL(n,C)` that induce transvections on the diagonalizable
//!   group `K` ([`pauli`], [`grading`], [`realize`]).
//!
//! The [`verify`] module bundles the invariant suites behind the
//! `sympauli verify` command line.

mod arith;
pub mod error;
pub mod factor;
pub mod grading;
pub mod isom;
pub mod pauli;
pub mod sympcore;

pub use error::{Error, Result};
pub use factor::{
    conjugate_to_multiple_of_u1, factor_isometry, reduce_to_u1, sl2_factor, sl2_factor_bfs,
    sl2_lift, sl2_matrix_count, sl2_order_closed_form, sl2_word_in_pair, swap_word, Sl2Gen,
    Sl2Word,
};
pub use isom::{
    orbit, q_closure, q_orbit, sp_enumerate, sp_order, sp_tables, EnumLimits, Isometry,
    MaterializedGroup, Transvection, TransvectionWord,
};
pub use grading::{
    bracket_is_zero, character_exponent, eigen_check, grading_table, label_to_matrix, star,
    structure_exponent, trace_form_orthogonality, Algebra, GradingRow, RootLabel,
};
pub use pauli::{commutator_exponent, k_lift, pauli_p, pauli_q, MonoTrace, MonomialMatrix};
pub use sympcore::{
    canonical_decompose, crt_hyperbolic, element_order, orthocomplement, pair, projection,
    standard_pair, GroupElement, HyperbolicPair, PairingExponent, Shape, SubgroupView,
    DEFAULT_MATERIALIZATION_BOUND,
};
