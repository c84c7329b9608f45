//! Exact monomial model of the generalized Pauli matrices, their tensor
//! products, and the commutator pairing on the finite maximal diagonalizable
//! subgroup `K` of `PGL(n,C)`.
//!
//! A monomial matrix is a permutation plus one root-of-unity phase per
//! column; products, inverses, tensor products, and traces stay exact. The
//! projective Pauli elements of `K` share their coordinates with
//! [`GroupElement`]: factor `t` of `(i_t, j_t)` means `Ad` of
//! `P_{l_t}^{i_t} Q_{l_t}^{j_t}`.

use num_complex::Complex64;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arith::{gcd, lcm};
use crate::error::{Error, Result};
use crate::sympcore::{GroupElement, PairingExponent};

/// An `n x n` matrix with exactly one nonzero entry per row and column; the
/// entry in column `c` sits in row `perm[c]` and equals `omega_N^{phase[c]}`.
#[derive(Clone, Debug)]
pub struct MonomialMatrix {
    dim: usize,
    root_order: u64,
    perm: Vec<usize>,
    phase: Vec<u64>,
}

impl MonomialMatrix {
    pub fn new(dim: usize, root_order: u64, perm: Vec<usize>, phase: Vec<u64>) -> Result<Self> {
        if root_order == 0 || perm.len() != dim || phase.len() != dim {
            return Err(Error::InvalidInput {
                what: "monomial matrix",
                detail: "dimension mismatch".into(),
            });
        }
        let mut seen = vec![false; dim];
        for &p in &perm {
            if p >= dim || seen[p] {
                return Err(Error::InvalidInput {
                    what: "monomial matrix",
                    detail: "perm is not a permutation".into(),
                });
            }
            seen[p] = true;
        }
        let phase = phase.into_iter().map(|d| d % root_order).collect();
        Ok(MonomialMatrix {
            dim,
            root_order,
            perm,
            phase,
        })
    }

    pub fn identity(dim: usize, root_order: u64) -> Self {
        MonomialMatrix {
            dim,
            root_order,
            perm: (0..dim).collect(),
            phase: vec![0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root_order(&self) -> u64 {
        self.root_order
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phase(&self) -> &[u64] {
        &self.phase
    }

    /// Re-expresses the phases in a larger ambient root order.
    pub fn with_root_order(&self, ambient: u64) -> Result<Self> {
        if ambient % self.root_order != 0 {
            return Err(Error::RootOrderIncompatible {
                culprit: self.root_order,
                ambient,
            });
        }
        let scale = ambient / self.root_order;
        Ok(MonomialMatrix {
            dim: self.dim,
            root_order: ambient,
            perm: self.perm.clone(),
            phase: self.phase.iter().map(|&d| d * scale).collect(),
        })
    }

    /// Reduces to the smallest root order representing the same matrix;
    /// basis for equality comparisons.
    fn canonical(&self) -> (usize, u64, Vec<usize>, Vec<u64>) {
        let g = self
            .phase
            .iter()
            .fold(self.root_order, |acc, &d| gcd(acc, d));
        let g = if g == 0 { self.root_order } else { g };
        (
            self.dim,
            self.root_order / g,
            self.perm.clone(),
            self.phase.iter().map(|&d| d / g).collect(),
        )
    }

    pub fn mul(&self, other: &MonomialMatrix) -> Result<MonomialMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let ambient = lcm(self.root_order, other.root_order);
        let a = self.with_root_order(ambient)?;
        let b = other.with_root_order(ambient)?;
        let mut perm = vec![0usize; self.dim];
        let mut phase = vec![0u64; self.dim];
        for c in 0..self.dim {
            let mid = b.perm[c];
            perm[c] = a.perm[mid];
            phase[c] = (b.phase[c] + a.phase[mid]) % ambient;
        }
        Ok(MonomialMatrix {
            dim: self.dim,
            root_order: ambient,
            perm,
            phase,
        })
    }

    pub fn inv(&self) -> MonomialMatrix {
        let mut perm = vec![0usize; self.dim];
        let mut phase = vec![0u64; self.dim];
        for c in 0..self.dim {
            perm[self.perm[c]] = c;
            phase[self.perm[c]] = (self.root_order - self.phase[c]) % self.root_order;
        }
        MonomialMatrix {
            dim: self.dim,
            root_order: self.root_order,
            perm,
            phase,
        }
    }

    /// Kronecker product, phases embedded into the common root order.
    pub fn tensor(&self, other: &MonomialMatrix) -> MonomialMatrix {
        let ambient = lcm(self.root_order, other.root_order);
        let a = self.with_root_order(ambient).expect("lcm is compatible");
        let b = other.with_root_order(ambient).expect("lcm is compatible");
        let dim = self.dim * other.dim;
        let mut perm = vec![0usize; dim];
        let mut phase = vec![0u64; dim];
        for c1 in 0..self.dim {
            for c2 in 0..other.dim {
                let c = c1 * other.dim + c2;
                perm[c] = a.perm[c1] * other.dim + b.perm[c2];
                phase[c] = (a.phase[c1] + b.phase[c2]) % ambient;
            }
        }
        MonomialMatrix {
            dim,
            root_order: ambient,
            perm,
            phase,
        }
    }

    /// Multiplies by the scalar `omega_N^e`.
    pub fn scalar_mul(&self, e: i64) -> MonomialMatrix {
        let ee = (e as i128).rem_euclid(self.root_order as i128) as u64;
        MonomialMatrix {
            dim: self.dim,
            root_order: self.root_order,
            perm: self.perm.clone(),
            phase: self.phase.iter().map(|&d| (d + ee) % self.root_order).collect(),
        }
    }

    pub fn pow(&self, k: u64) -> MonomialMatrix {
        let mut acc = MonomialMatrix::identity(self.dim, self.root_order);
        for _ in 0..k {
            acc = acc.mul(self).expect("same dimension");
        }
        acc
    }

    /// When the matrix is `omega_N^e I`, returns `e`.
    pub fn as_scalar(&self) -> Option<u64> {
        if (0..self.dim).any(|c| self.perm[c] != c) {
            return None;
        }
        let e = self.phase[0];
        self.phase.iter().all(|&d| d == e).then_some(e)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|c| self.perm[c] == c)
    }

    /// Exact trace where the fixed-point phases form a (coset of a) full
    /// geometric series; numeric evaluation otherwise.
    pub fn trace(&self) -> MonoTrace {
        let fixed: Vec<u64> = (0..self.dim)
            .filter(|&c| self.perm[c] == c)
            .map(|c| self.phase[c])
            .collect();
        if fixed.is_empty() {
            return MonoTrace::ExactZero;
        }
        let mut counts = std::collections::BTreeMap::new();
        for ph in &fixed {
            *counts.entry(*ph).or_insert(0u64) += 1;
        }
        if counts.len() == 1 {
            let (&exponent, &count) = counts.iter().next().unwrap();
            return MonoTrace::ExactRootMultiple {
                count,
                exponent,
                root_order: self.root_order,
            };
        }
        let equal_counts = counts.values().all(|&c| c == *counts.values().next().unwrap());
        if equal_counts {
            // Zero iff the distinct phases are a coset of a nontrivial
            // subgroup of Z_N: an arithmetic progression of step N/m.
            let phases: Vec<u64> = counts.keys().copied().collect();
            let m = phases.len() as u64;
            if self.root_order % m == 0 {
                let d = self.root_order / m;
                let arithmetic = phases.windows(2).all(|w| w[1] - w[0] == d)
                    && phases[0] < d;
                if arithmetic {
                    return MonoTrace::ExactZero;
                }
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (&ph, &count) in &counts {
            let angle = 2.0 * std::f64::consts::PI * ph as f64 / self.root_order as f64;
            acc += Complex64::from_polar(count as f64, angle);
        }
        MonoTrace::Numeric(acc)
    }

    /// True when the trace vanishes; exact fast path, numeric fallback with
    /// the given tolerance.
    pub fn trace_is_zero(&self, tol: f64) -> bool {
        match self.trace() {
            MonoTrace::ExactZero => true,
            MonoTrace::ExactRootMultiple { count, .. } => count == 0,
            MonoTrace::Numeric(z) => z.norm() < tol,
        }
    }

    /// Dense complex form.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for c in 0..self.dim {
            let angle = 2.0 * std::f64::consts::PI * self.phase[c] as f64 / self.root_order as f64;
            out[self.perm[c] * self.dim + c] = Complex64::from_polar(1.0, angle);
        }
        out
    }

    /// Parses `{"n":n,"N":N,"perm":[...],"phase":[...]}`.
    pub fn from_json(value: &serde_json::Value) -> Result<MonomialMatrix> {
        let err = |detail: String| Error::InvalidInput {
            what: "monomial json",
            detail,
        };
        let n = value["n"].as_u64().ok_or_else(|| err("missing n".into()))? as usize;
        let root = value["N"].as_u64().ok_or_else(|| err("missing N".into()))?;
        let perm: Vec<usize> =
            serde_json::from_value(value["perm"].clone()).map_err(|e| err(e.to_string()))?;
        let phase: Vec<u64> =
            serde_json::from_value(value["phase"].clone()).map_err(|e| err(e.to_string()))?;
        MonomialMatrix::new(n, root, perm, phase)
    }
}

impl PartialEq for MonomialMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for MonomialMatrix {}

impl Serialize for MonomialMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("n", &self.dim)?;
        map.serialize_entry("N", &self.root_order)?;
        map.serialize_entry("perm", &self.perm)?;
        map.serialize_entry("phase", &self.phase)?;
        map.end()
    }
}

/// Result of an exact-first trace evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MonoTrace {
    ExactZero,
    ExactRootMultiple {
        count: u64,
        exponent: u64,
        root_order: u64,
    },
    Numeric(Complex64),
}

/// The cyclic shift: row `i` carries a 1 in column `i+1 (mod n)`.
pub fn pauli_p(n: u64) -> MonomialMatrix {
    let dim = n as usize;
    MonomialMatrix {
        dim,
        root_order: n,
        perm: (0..dim).map(|c| (c + dim - 1) % dim).collect(),
        phase: vec![0; dim],
    }
}

/// The clock `diag(1, omega_n, ..., omega_n^{n-1})`.
pub fn pauli_q(n: u64) -> MonomialMatrix {
    let dim = n as usize;
    MonomialMatrix {
        dim,
        root_order: n,
        perm: (0..dim).collect(),
        phase: (0..n).collect(),
    }
}

/// `Q_n^a` without the multiplication loop.
pub(crate) fn q_power(n: u64, a: u64) -> MonomialMatrix {
    let dim = n as usize;
    MonomialMatrix {
        dim,
        root_order: n,
        perm: (0..dim).collect(),
        phase: (0..n).map(|c| c * (a % n) % n).collect(),
    }
}

/// `P_n^b` without the multiplication loop.
pub(crate) fn p_power(n: u64, b: u64) -> MonomialMatrix {
    let dim = n as usize;
    let shift = (b % n) as usize;
    MonomialMatrix {
        dim,
        root_order: n,
        perm: (0..dim).map(|c| (c + dim - shift) % dim).collect(),
        phase: vec![0; dim],
    }
}

/// Canonical lift of a projective Pauli element: the tensor product
/// `P_{l_1}^{i_1} Q_{l_1}^{j_1} (x) ... (x) P_{l_k}^{i_k} Q_{l_k}^{j_k}`
/// with no extra scalar, phases in the ambient root order `l1`.
pub fn k_lift(sigma: &GroupElement) -> MonomialMatrix {
    let shape = sigma.shape();
    let mut acc: Option<MonomialMatrix> = None;
    for (t, &lt) in shape.moduli().iter().enumerate() {
        let (i, j) = sigma.factor(t);
        let f = p_power(lt, i).mul(&q_power(lt, j)).expect("same dimension");
        acc = Some(match acc {
            None => f,
            Some(prev) => prev.tensor(&f),
        });
    }
    acc.expect("shapes have at least one factor")
        .with_root_order(shape.exponent())
        .expect("factor orders divide the exponent")
}

/// The commutator pairing of Definition-style form: lifts both elements,
/// forms `S T S^{-1} T^{-1}` (always a scalar), and returns its exponent in
/// the ambient root order. Independent of the lifts chosen.
pub fn commutator_exponent(
    sigma: &GroupElement,
    tau: &GroupElement,
) -> Result<PairingExponent> {
    if sigma.shape() != tau.shape() {
        return Err(Error::ShapeMismatch);
    }
    let s = k_lift(sigma);
    let t = k_lift(tau);
    let comm = s
        .mul(&t)?
        .mul(&s.inv())?
        .mul(&t.inv())?;
    let e = comm
        .as_scalar()
        .expect("commutator of projective Pauli lifts is scalar");
    let l1 = sigma.shape().exponent();
    debug_assert_eq!(comm.root_order(), l1);
    Ok(PairingExponent::new(e % l1, l1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympcore::{pair, Shape};

    fn shape(moduli: &[u64]) -> Shape {
        Shape::new(moduli).unwrap()
    }

    #[test]
    fn displayed_matrices() {
        // Q_2 = diag(1, -1), P_2 = [[0,1],[1,0]].
        let q2 = pauli_q(2);
        assert_eq!(q2.to_dense()[0], Complex64::new(1.0, 0.0));
        assert!((q2.to_dense()[3] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let p2 = pauli_p(2);
        let d = p2.to_dense();
        assert_eq!(d[1], Complex64::new(1.0, 0.0));
        assert_eq!(d[2], Complex64::new(1.0, 0.0));
        assert_eq!(d[0], Complex64::new(0.0, 0.0));
        // P_n^n = I.
        for n in 2..=6 {
            assert_eq!(pauli_p(n).pow(n), MonomialMatrix::identity(n as usize, n));
        }
    }

    #[test]
    fn weyl_commutation() {
        // P_n Q_n = omega_n Q_n P_n.
        for n in 2..=8 {
            let pq = pauli_p(n).mul(&pauli_q(n)).unwrap();
            let qp = pauli_q(n).mul(&pauli_p(n)).unwrap();
            assert_eq!(pq, qp.scalar_mul(1));
        }
    }

    #[test]
    fn inverse_and_tensor() {
        for n in 2..=5 {
            assert_eq!(pauli_p(n).inv(), pauli_p(n).pow(n - 1));
            let prod = pauli_p(n).mul(&pauli_p(n).inv()).unwrap();
            assert_eq!(prod.as_scalar(), Some(0));
        }
        // Q_2 (x) Q_2 = diag(1,-1,-1,1).
        let t = pauli_q(2).tensor(&pauli_q(2));
        let d = t.to_dense();
        let diag: Vec<f64> = (0..4).map(|i| d[i * 4 + i].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn commutator_matches_displayed_relation() {
        for n in 2..=8u64 {
            let s = shape(&[n]);
            // Ad_P ~ u_1 = (1,0), Ad_Q ~ v_1 = (0,1).
            let e = commutator_exponent(&s.generator(0), &s.generator(1)).unwrap();
            assert_eq!(e.value(), 1);
        }
    }

    #[test]
    fn commutator_self_and_cross_factor() {
        let s = shape(&[4, 2]);
        for a in s.elements(4096).unwrap().iter().step_by(5) {
            assert!(commutator_exponent(a, a).unwrap().is_trivial());
        }
        // sigma_1 against tau_2: orthogonal factors commute.
        assert!(commutator_exponent(&s.generator(0), &s.generator(3))
            .unwrap()
            .is_trivial());
    }

    #[test]
    fn commutator_agrees_with_symplectic_pairing() {
        for moduli in [&[2u64][..], &[3], &[4], &[2, 2], &[4, 2], &[6]] {
            let s = shape(moduli);
            let elements = s.elements(4096).unwrap();
            for a in &elements {
                for b in &elements {
                    assert_eq!(
                        commutator_exponent(a, b).unwrap(),
                        pair(a, b).unwrap(),
                        "shape {s}, a={a:?}, b={b:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn lift_examples() {
        let s = shape(&[2]);
        assert_eq!(k_lift(&s.zero()), MonomialMatrix::identity(2, 2));
        assert_eq!(k_lift(&s.generator(0)), pauli_p(2));
        // shape [2,2], sigma = (1,0,0,1) -> P_2 (x) Q_2.
        let s22 = shape(&[2, 2]);
        let sigma = s22.element(&[1, 0, 0, 1]).unwrap();
        assert_eq!(k_lift(&sigma), pauli_p(2).tensor(&pauli_q(2)));
    }

    #[test]
    fn lift_power_is_scalar() {
        for moduli in [&[3u64][..], &[4, 2], &[2, 2]] {
            let s = shape(moduli);
            let l1 = s.exponent();
            for sigma in s.elements(4096).unwrap() {
                let m = k_lift(&sigma).pow(l1);
                assert!(m.as_scalar().is_some(), "lift^N must be scalar");
            }
        }
    }

    #[test]
    fn trace_examples() {
        // tr(Q_3 P_3) = 0: no fixed points.
        let qp = pauli_q(3).mul(&pauli_p(3)).unwrap();
        assert_eq!(qp.trace(), MonoTrace::ExactZero);
        // tr(Q_3) = 1 + w + w^2 = 0: full geometric series.
        assert_eq!(pauli_q(3).trace(), MonoTrace::ExactZero);
        // tr(I_n) = n.
        let id = MonomialMatrix::identity(5, 5);
        assert_eq!(
            id.trace(),
            MonoTrace::ExactRootMultiple {
                count: 5,
                exponent: 0,
                root_order: 5
            }
        );
        assert!(!id.trace_is_zero(1e-9));
        // A non-series diagonal falls back to numerics.
        let odd = MonomialMatrix::new(3, 6, vec![0, 1, 2], vec![0, 1, 5]).unwrap();
        match odd.trace() {
            MonoTrace::Numeric(z) => assert!((z - Complex64::new(2.0, 0.0)).norm() < 1e-12),
            other => panic!("expected numeric trace, got {other:?}"),
        }
    }

    #[test]
    fn json_matches_schema() {
        let m = pauli_q(3);
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["n"], 3);
        assert_eq!(v["N"], 3);
        assert_eq!(v["perm"], serde_json::json!([0, 1, 2]));
        assert_eq!(v["phase"], serde_json::json!([0, 1, 2]));
        assert_eq!(MonomialMatrix::from_json(&v).unwrap(), m);
        let mut bad = v.clone();
        bad["perm"] = serde_json::json!([0, 0, 2]);
        assert!(MonomialMatrix::from_json(&bad).is_err());
    }

    #[test]
    fn root_order_embedding() {
        let q2 = pauli_q(2);
        let embedded = q2.with_root_order(6).unwrap();
        assert_eq!(embedded.phase(), &[0, 3]);
        assert_eq!(embedded, q2);
        assert!(matches!(
            q2.with_root_order(3),
            Err(Error::RootOrderIncompatible { culprit: 2, ambient: 3 })
        ));
    }
}
