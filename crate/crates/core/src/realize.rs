//! Numeric construction of explicit `PGL(n,C)` normalizer elements that
//! induce transvections on the finite diagonalizable group `K`.
//!
//! For a pure-Q label `delta` the basis matrix `Y` is diagonal with `m`-th
//! roots of unity on the diagonal (`m = ord(delta)`). Solving a Vandermonde
//! system gives log coefficients `a_i` with `exp(sum a_i Y^i) = Y`; scaling
//! them by `-1/(omega_m^i - 1)` yields a diagonal `Z` whose commutator with
//! a lift of a well-chosen `sigma` is a scalar times `Y^{-1}` — the witness
//! that the transvection `s_delta` lies in the Weyl group.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grading::{character_exponent, label_to_matrix, RootLabel};
use crate::isom::Isometry;
use crate::pauli::k_lift;
use crate::sympcore::{GroupElement, Shape};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug)]
pub struct CMat {
    n: usize,
    a: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = diag[i];
        }
        m
    }

    pub fn from_monomial(mono: &crate::pauli::MonomialMatrix) -> Self {
        CMat {
            n: mono.dim(),
            a: mono.to_dense(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.a[r * self.n + c]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self.a[i * self.n + i]).collect()
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = CMat::zeros(n);
        for r in 0..n {
            for t in 0..n {
                let x = self.a[r * n + t];
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out.a[r * n + c] += x * other.a[t * n + c];
                }
            }
        }
        out
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<CMat> {
        let n = self.n;
        let mut aug = self.a.clone();
        let mut inv = CMat::identity(n).a;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    aug[i * n + col]
                        .norm()
                        .partial_cmp(&aug[j * n + col].norm())
                        .unwrap()
                })
                .unwrap();
            if aug[pivot * n + col].norm() < 1e-12 {
                return Err(Error::SingularMatrix);
            }
            for c in 0..n {
                aug.swap(col * n + c, pivot * n + c);
                inv.swap(col * n + c, pivot * n + c);
            }
            let d = aug[col * n + col];
            for c in 0..n {
                aug[col * n + c] /= d;
                inv[col * n + c] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = aug[r * n + col];
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let ac = aug[col * n + c];
                    let ic = inv[col * n + c];
                    aug[r * n + c] -= f * ac;
                    inv[r * n + c] -= f * ic;
                }
            }
        }
        Ok(CMat { n, a: inv })
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }

    pub fn scale(&self, z: Complex64) -> CMat {
        CMat {
            n: self.n,
            a: self.a.iter().map(|x| x * z).collect(),
        }
    }
}

/// True iff `m1 = lambda m2` for a unit scalar, entrywise within `tol`;
/// `lambda` is estimated from the largest-magnitude entry of `m2`.
pub fn projective_equal(m1: &CMat, m2: &CMat, tol: f64) -> bool {
    if m1.dim() != m2.dim() {
        return false;
    }
    let (mut best, mut best_norm) = (0usize, 0.0f64);
    for (i, z) in m2.a.iter().enumerate() {
        if z.norm() > best_norm {
            best_norm = z.norm();
            best = i;
        }
    }
    if best_norm < tol {
        return m1.max_abs() < tol;
    }
    let lambda = m1.a[best] / m2.a[best];
    if (lambda.norm() - 1.0).abs() > 1e-6 {
        return false;
    }
    m1.sub(&m2.scale(lambda)).max_abs() < tol
}

/// Coefficients `c_0..c_{m-1}` with `sum_i c_i omega_m^{ji} = j * 2*pi*i/m`
/// for every `j`: applied to any diagonal `Y` with spectrum in the `m`-th
/// roots of unity, `sum_i c_i Y^i` is a logarithm of `Y`.
#[derive(Clone, Debug)]
pub struct LogCoefficients {
    order: u64,
    coeffs: Vec<Complex64>,
    residual: f64,
}

impl LogCoefficients {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Solves the `m x m` Vandermonde system `D c = (0, s, ..., (m-1)s)` with
/// `D_ij = omega_m^{ij}` and `s = 2 pi i / m`. Since `D Dbar = m I`, the
/// solution is `c = (1/m) Dbar rhs`, with the residual asserted.
pub fn vandermonde_log(m: u64) -> LogCoefficients {
    assert!(m >= 2, "order must be at least 2");
    let mm = m as usize;
    let s = Complex64::new(0.0, 2.0 * std::f64::consts::PI / m as f64);
    let omega = |e: i64| -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / m as f64)
    };
    let rhs: Vec<Complex64> = (0..mm).map(|j| s * j as f64).collect();
    let coeffs: Vec<Complex64> = (0..mm)
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, r) in rhs.iter().enumerate() {
                acc += omega(-((i * j) as i64)) * r;
            }
            acc / m as f64
        })
        .collect();
    let mut residual = 0.0f64;
    for (i, r) in rhs.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in coeffs.iter().enumerate() {
            acc += omega((i * j) as i64) * c;
        }
        residual = residual.max((acc - r).norm());
    }
    assert!(
        residual < 1e-10,
        "Vandermonde residual {residual} out of tolerance"
    );
    LogCoefficients {
        order: m,
        coeffs,
        residual,
    }
}

/// A realized normalizer element certifying one pure-Q transvection.
#[derive(Clone, Debug)]
pub struct Realization {
    pub delta: RootLabel,
    pub sigma: GroupElement,
    pub order: u64,
    pub z: CMat,
    /// Projective distance of `S Z S^{-1} Z^{-1}` from `Y_delta^{-1}`.
    pub commutator_residual: f64,
}

fn check_pure_q(delta: &RootLabel) -> Result<()> {
    for t in 0..delta.shape().factor_count() {
        if delta.factor(t).1 != 0 {
            return Err(Error::NotPureQ(t));
        }
    }
    Ok(())
}

/// The lexicographically least `sigma` with `delta(sigma) = omega_m`.
pub fn default_sigma(delta: &RootLabel) -> Result<GroupElement> {
    let shape = delta.shape();
    let m = delta.order();
    let l1 = shape.exponent();
    let target = l1 / m;
    for sigma in shape.elements(1 << 16)? {
        if character_exponent(delta, &sigma)? == target {
            return Ok(sigma);
        }
    }
    unreachable!("a character of order m attains omega_m");
}

/// Realizes the transvection attached to a nonzero pure-Q label with a
/// caller-chosen `sigma` satisfying `delta(sigma) = omega_m`.
pub fn realize_pure_q_transvection_with_sigma(
    delta: &RootLabel,
    sigma: &GroupElement,
) -> Result<Realization> {
    if delta.is_zero() {
        return Err(Error::OrderOne);
    }
    check_pure_q(delta)?;
    let shape = delta.shape();
    let l1 = shape.exponent();
    let m = delta.order();
    debug_assert_eq!(character_exponent(delta, sigma)?, l1 / m);

    let y_mono = label_to_matrix(delta);
    debug_assert!(y_mono.is_diagonal());
    let n = y_mono.dim();
    // Diagonal eigenvalue exponents, rebased from l1 to m.
    let rebase = l1 / m;
    let j_exp: Vec<u64> = y_mono
        .phase()
        .iter()
        .map(|&ph| {
            debug_assert_eq!(ph % rebase, 0);
            ph / rebase
        })
        .collect();
    let omega = |e: i64| -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / m as f64)
    };
    let logc = vandermonde_log(m);
    let a = logc.coeffs();
    // exp-solve round trip on the actual spectrum.
    for &j in &j_exp {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ai) in a.iter().enumerate() {
            acc += ai * omega((i as i64) * j as i64);
        }
        debug_assert!((acc.exp() - omega(j as i64)).norm() < 1e-9);
    }
    // c'_i = -a_i / (omega_m^i - 1), i >= 1: then
    // S Z S^{-1} Z^{-1} = exp(-(A - a_0 I)) = e^{a_0} Y^{-1}.
    let z_diag: Vec<Complex64> = j_exp
        .iter()
        .map(|&j| {
            let mut w = Complex64::new(0.0, 0.0);
            for (i, ai) in a.iter().enumerate().skip(1) {
                let scale = -ai / (omega(i as i64) - 1.0);
                w += scale * omega((i as i64) * j as i64);
            }
            w.exp()
        })
        .collect();
    let z = CMat::from_diagonal(&z_diag);

    let s = CMat::from_monomial(&k_lift(sigma));
    let s_inv = CMat::from_monomial(&k_lift(sigma).inv());
    let z_inv = CMat::from_diagonal(&z_diag.iter().map(|v| 1.0 / v).collect::<Vec<_>>());
    let comm = s.mul(&z).mul(&s_inv).mul(&z_inv);
    let target = CMat::from_monomial(&y_mono.inv());
    // Residual after removing the scalar.
    let mut best = (0usize, 0.0f64);
    for (i, v) in target.a.iter().enumerate() {
        if v.norm() > best.1 {
            best = (i, v.norm());
        }
    }
    let lambda = comm.a[best.0] / target.a[best.0];
    let commutator_residual = comm.sub(&target.scale(lambda)).max_abs();
    debug_assert!(n > 0);
    Ok(Realization {
        delta: delta.clone(),
        sigma: sigma.clone(),
        order: m,
        z,
        commutator_residual,
    })
}

/// Realizes the transvection attached to a nonzero pure-Q label, choosing
/// `sigma` canonically.
pub fn realize_pure_q_transvection(delta: &RootLabel) -> Result<Realization> {
    if delta.is_zero() {
        return Err(Error::OrderOne);
    }
    check_pure_q(delta)?;
    let sigma = default_sigma(delta)?;
    realize_pure_q_transvection_with_sigma(delta, &sigma)
}

/// The coordinate map `Z` induces on `K` by conjugation: each conjugated
/// generator lift is matched projectively against all canonical lifts.
pub fn induced_k_map(z: &CMat, shape: &Shape, tol: f64) -> Result<Isometry> {
    let z_inv = z.inverse()?;
    let candidates = shape.elements(1 << 16)?;
    let dense: Vec<CMat> = candidates
        .iter()
        .map(|e| CMat::from_monomial(&k_lift(e)))
        .collect();
    let mut images = Vec::with_capacity(shape.rank());
    for g in 0..shape.rank() {
        let lift = CMat::from_monomial(&k_lift(&shape.generator(g)));
        let conj = z.mul(&lift).mul(&z_inv);
        let mut found: Option<usize> = None;
        for (i, cand) in dense.iter().enumerate() {
            if projective_equal(&conj, cand, tol) {
                if let Some(first) = found {
                    let _ = first;
                    return Err(Error::AmbiguousMatch { generator: g, tol });
                }
                found = Some(i);
            }
        }
        match found {
            Some(i) => images.push(candidates[i].clone()),
            None => return Err(Error::NotNormalizing(g)),
        }
    }
    Isometry::from_images(shape, &images)
}
