//! The fine grading of `gl(n,C)` and `sl(n,C)` induced by the action of the
//! projective Pauli group `K`: root labels, basis matrices, structure
//! scalars, the star map, and trace orthogonality.
//!
//! A root label shares coordinates with a group element: factor `t` of
//! `(a_t, b_t)` means the character `a_t beta_{l_t} + b_t alpha_{l_t}`, whose
//! basis matrix is `Q_{l_t}^{a_t} P_{l_t}^{-b_t}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{k_lift, p_power, q_power, MonoTrace, MonomialMatrix};
use crate::sympcore::{GroupElement, Shape};

/// Characters of `K` use the same coordinate space as its elements.
pub type RootLabel = GroupElement;

/// The canonical basis matrix `Y_gamma`: per factor `Q^{a} P^{-b}`, tensored
/// across factors, phases in the ambient root order.
pub fn label_to_matrix(gamma: &RootLabel) -> MonomialMatrix {
    let shape = gamma.shape();
    let mut acc: Option<MonomialMatrix> = None;
    for (t, &lt) in shape.moduli().iter().enumerate() {
        let (a, b) = gamma.factor(t);
        let x = q_power(lt, a)
            .mul(&p_power(lt, (lt - b) % lt))
            .expect("same dimension");
        acc = Some(match acc {
            None => x,
            Some(prev) => prev.tensor(&x),
        });
    }
    acc.expect("shapes have at least one factor")
        .with_root_order(shape.exponent())
        .expect("factor orders divide the exponent")
}

/// The character value `gamma(sigma)` as an exponent of `omega_{l1}`:
/// `sum_t (l1/l_t)(a_t i_t + b_t j_t)`.
pub fn character_exponent(gamma: &RootLabel, sigma: &GroupElement) -> Result<u64> {
    if gamma.shape() != sigma.shape() {
        return Err(Error::ShapeMismatch);
    }
    let shape = gamma.shape();
    let l1 = shape.exponent();
    let mut acc: u128 = 0;
    for (t, &lt) in shape.moduli().iter().enumerate() {
        let (a, b) = gamma.factor(t);
        let (i, j) = sigma.factor(t);
        acc += (l1 / lt) as u128 * (a as u128 * i as u128 + b as u128 * j as u128);
    }
    Ok((acc % l1 as u128) as u64)
}

/// Verifies that conjugating `Y_gamma` by the lift of `sigma` scales it by
/// exactly the character value, and returns the exponent.
pub fn eigen_check(sigma: &GroupElement, gamma: &RootLabel) -> Result<u64> {
    let expected = character_exponent(gamma, sigma)?;
    let y = label_to_matrix(gamma);
    let s = k_lift(sigma);
    let conj = s.mul(&y)?.mul(&s.inv())?;
    if conj != y.scalar_mul(expected as i64) {
        return Err(Error::EigenMismatch { expected });
    }
    Ok(expected)
}

/// The scalar `e` with `Y_gamma Y_delta = omega_{l1}^e Y_{gamma+delta}`.
/// Total: root spaces are one-dimensional, so the product is always a
/// scalar multiple of the canonical representative.
pub fn structure_exponent(gamma: &RootLabel, delta: &RootLabel) -> Result<u64> {
    let prod = label_to_matrix(gamma).mul(&label_to_matrix(delta))?;
    let canonical = label_to_matrix(&gamma.add(delta)?);
    assert_eq!(
        prod.perm(),
        canonical.perm(),
        "product of basis matrices must be proportional to the canonical one"
    );
    let n = prod.root_order();
    debug_assert_eq!(n, canonical.root_order());
    let e = (prod.phase()[0] + n - canonical.phase()[0]) % n;
    for c in 1..prod.dim() {
        assert_eq!(
            (prod.phase()[c] + n - canonical.phase()[c]) % n,
            e,
            "structure scalar must be constant"
        );
    }
    Ok(e)
}

/// `[Y_gamma, Y_delta] = 0` iff the two structure scalars coincide, which is
/// exactly the vanishing of the symplectic pairing of the matching elements.
pub fn bracket_is_zero(gamma: &RootLabel, delta: &RootLabel) -> Result<bool> {
    Ok(structure_exponent(gamma, delta)? == structure_exponent(delta, gamma)?)
}

/// Which algebra a grading table describes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Algebra {
    Sl,
    Gl,
}

impl std::str::FromStr for Algebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sl" => Ok(Algebra::Sl),
            "gl" => Ok(Algebra::Gl),
            other => Err(Error::InvalidInput {
                what: "algebra",
                detail: format!("expected sl or gl, got {other}"),
            }),
        }
    }
}

/// One root space: its label, canonical basis matrix, and trace flag.
#[derive(Clone, Debug, Serialize)]
pub struct GradingRow {
    pub label: RootLabel,
    #[serde(flatten)]
    pub matrix: MonomialMatrix,
    pub trace_zero: bool,
}

/// Enumerates the root spaces: all of `K-hat` for `gl`, the nonzero labels
/// for `sl`. Asserts the trace discipline: traceless away from 0, trace `n`
/// at 0.
pub fn grading_table(shape: &Shape, algebra: Algebra) -> Result<Vec<GradingRow>> {
    let n = shape.matrix_dimension();
    let labels = shape.elements(1 << 16)?;
    let mut rows = Vec::with_capacity(labels.len());
    for label in labels {
        if algebra == Algebra::Sl && label.is_zero() {
            continue;
        }
        let matrix = label_to_matrix(&label);
        let trace = matrix.trace();
        let trace_zero = if label.is_zero() {
            assert_eq!(
                trace,
                MonoTrace::ExactRootMultiple {
                    count: n,
                    exponent: 0,
                    root_order: shape.exponent()
                },
                "the zero label carries the identity"
            );
            false
        } else {
            assert_eq!(trace, MonoTrace::ExactZero, "nonzero labels are traceless");
            true
        };
        rows.push(GradingRow {
            label,
            matrix,
            trace_zero,
        });
    }
    Ok(rows)
}

/// The star map: the element of `K` representing the character through the
/// pairing. Per factor `(a, b) -> (b, -a)`, i.e. `P`-exponent `b` and
/// `Q`-exponent `-a`; concretely the inverse of `Ad_{Y_gamma}`.
pub fn star(gamma: &RootLabel) -> GroupElement {
    let shape = gamma.shape();
    let mut coords = Vec::with_capacity(shape.rank());
    for (t, &lt) in shape.moduli().iter().enumerate() {
        let (a, b) = gamma.factor(t);
        coords.push(b as i64);
        coords.push(-(a as i64));
        debug_assert!(lt > 0);
    }
    shape.element(&coords).expect("coordinates match the shape")
}

/// Trace-form orthogonality of root spaces: `tr(Y_gamma Y_delta) = 0` iff
/// `gamma + delta != 0` (the trace form is proportional to Killing on `sl`).
pub fn trace_form_orthogonality(gamma: &RootLabel, delta: &RootLabel) -> Result<bool> {
    let prod = label_to_matrix(gamma).mul(&label_to_matrix(delta))?;
    let zero = match prod.trace() {
        MonoTrace::ExactZero => true,
        MonoTrace::ExactRootMultiple { count, .. } => count == 0,
        MonoTrace::Numeric(_) => unreachable!("tensor Pauli traces evaluate exactly"),
    };
    debug_assert_eq!(zero, !gamma.add(delta)?.is_zero());
    Ok(zero)
}
