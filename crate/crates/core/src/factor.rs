//! Constructive factorization: lifting and factoring `SL(2,Z_n)` into the
//! elementary generators, reducing a maximal-order element to `u_1`,
//! swapping isometric hyperbolic summands, and factoring an arbitrary
//! isometry into a transvection word.
//!
//! Every step mirrors a reduction in the structure theory of the isometry
//! group; abstract existence steps are replaced by explicit words built
//! inside rank-2 subgroups.

use crate::arith::{ext_gcd, gcd, mod_inverse, prime_factors, valuation};
use crate::error::{Error, Result};
use crate::isom::{Isometry, Transvection, TransvectionWord};
use crate::sympcore::{pair, standard_pair, GroupElement, HyperbolicPair, Shape};

/// The two elementary generators of `SL(2,Z_n)`:
/// `A = [[1,-1],[0,1]]` (the matrix of `s_{u_1}`) and
/// `B = [[1,0],[1,1]]` (the matrix of `s_{v_1}`).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sl2Gen {
    A,
    B,
}

/// A word in the generators, stored as (generator, exponent) factors in
/// matrix-product order: the last factor acts first on column vectors.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Sl2Word {
    factors: Vec<(Sl2Gen, i64)>,
}

impl Sl2Word {
    pub fn identity() -> Self {
        Sl2Word::default()
    }

    /// Normalizes: merges adjacent equal generators, drops zero exponents.
    pub fn new(factors: Vec<(Sl2Gen, i64)>) -> Self {
        let mut out: Vec<(Sl2Gen, i64)> = Vec::with_capacity(factors.len());
        for (g, k) in factors {
            if k == 0 {
                continue;
            }
            match out.last_mut() {
                Some((lg, lk)) if *lg == g => {
                    *lk += k;
                    if *lk == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, k)),
            }
        }
        Sl2Word { factors: out }
    }

    pub fn factors(&self) -> &[(Sl2Gen, i64)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Evaluates the product modulo `n`.
    pub fn eval_mod(&self, n: u64) -> [[u64; 2]; 2] {
        let mut acc = [[1 % n, 0], [0, 1 % n]];
        for &(g, k) in &self.factors {
            let kk = (k as i128).rem_euclid(n as i128) as u64;
            let f = match g {
                // A^k = [[1,-k],[0,1]], B^k = [[1,0],[k,1]]
                Sl2Gen::A => [[1 % n, (n - kk) % n], [0, 1 % n]],
                Sl2Gen::B => [[1 % n, 0], [kk, 1 % n]],
            };
            acc = mat_mul_mod(&acc, &f, n);
        }
        acc
    }
}

fn mat_mul_mod(a: &[[u64; 2]; 2], b: &[[u64; 2]; 2], n: u64) -> [[u64; 2]; 2] {
    let mut out = [[0u64; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let mut acc: u128 = 0;
            for t in 0..2 {
                acc += a[r][t] as u128 * b[t][c] as u128;
            }
            out[r][c] = (acc % n as u128) as u64;
        }
    }
    out
}

fn det_mod(c: &[[u64; 2]; 2], n: u64) -> u64 {
    let ad = c[0][0] as u128 * c[1][1] as u128 % n as u128;
    let bc = c[0][1] as u128 * c[1][0] as u128 % n as u128;
    ((ad + n as u128 - bc) % n as u128) as u64
}

fn reduce_mat(n: u64, c: &[[i64; 2]; 2]) -> [[u64; 2]; 2] {
    let mut out = [[0u64; 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            out[r][col] = (c[r][col] as i128).rem_euclid(n as i128) as u64;
        }
    }
    out
}

/// Lifts a matrix with `det = 1 (mod n)` to an integer matrix with
/// determinant exactly 1, congruent to the input modulo `n`.
///
/// The first column is nudged by multiples of `n` until its entries are
/// coprime, then a Bezout correction of the second column fixes the
/// determinant.
pub fn sl2_lift(n: u64, c: &[[i64; 2]; 2]) -> Result<[[i64; 2]; 2]> {
    let cm = reduce_mat(n, c);
    if det_mod(&cm, n) != 1 % n {
        return Err(Error::NotUnimodular(n));
    }
    let (mut a, b) = (cm[0][0] as i128, cm[0][1] as i128);
    let (mut cc, d) = (cm[1][0] as i128, cm[1][1] as i128);
    let n = n as i128;
    if gcd(a as u64, cc as u64) != 1 {
        if cc == 0 {
            cc = n;
        }
        let mut t = 0;
        while gcd((a + t * n).rem_euclid(u64::MAX as i128) as u64, cc as u64) != 1 {
            t += 1;
            assert!(t <= 4 * cc + 4, "coprime nudge must terminate");
        }
        a += t * n;
    }
    // det0 = 1 + s*n; fix with a*dd - cc*bb = -s.
    let det0 = a * d - b * cc;
    debug_assert_eq!((det0 - 1).rem_euclid(n), 0);
    let s = (det0 - 1) / n;
    let (g, x, y) = ext_gcd(a, cc);
    debug_assert_eq!(g, 1);
    let dd = d + (-s * x) * n;
    let bb = b + (s * y) * n;
    let out = [[a, bb], [cc, dd]];
    debug_assert_eq!(out[0][0] * out[1][1] - out[0][1] * out[1][0], 1);
    let fit = |v: i128| -> Result<i64> {
        i64::try_from(v).map_err(|_| Error::InvalidInput {
            what: "sl2 lift",
            detail: "entries exceed i64".into(),
        })
    };
    Ok([
        [fit(out[0][0])?, fit(out[0][1])?],
        [fit(out[1][0])?, fit(out[1][1])?],
    ])
}

/// Factors `C` in `SL(2,Z_n)` as a word in `A` and `B`: lift to `SL(2,Z)`,
/// then run the Euclidean algorithm on the first column with row operations
/// realized by powers of `A` and `B`. No minimality guarantee.
pub fn sl2_factor(n: u64, c: &[[i64; 2]; 2]) -> Result<Sl2Word> {
    let lifted = sl2_lift(n, c)?;
    let mut m: [[i128; 2]; 2] = [
        [lifted[0][0] as i128, lifted[0][1] as i128],
        [lifted[1][0] as i128, lifted[1][1] as i128],
    ];
    // Row operations applied on the left; (g, k) means the op g^k.
    let mut applied: Vec<(Sl2Gen, i128)> = Vec::new();
    let mut apply_a = |m: &mut [[i128; 2]; 2], k: i128, applied: &mut Vec<(Sl2Gen, i128)>| {
        // A^k: row0 -= k*row1
        m[0][0] -= k * m[1][0];
        m[0][1] -= k * m[1][1];
        applied.push((Sl2Gen::A, k));
    };
    let mut apply_b = |m: &mut [[i128; 2]; 2], k: i128, applied: &mut Vec<(Sl2Gen, i128)>| {
        // B^k: row1 += k*row0
        m[1][0] += k * m[0][0];
        m[1][1] += k * m[0][1];
        applied.push((Sl2Gen::B, k));
    };
    while m[1][0] != 0 {
        if m[0][0] == 0 {
            apply_a(&mut m, -1, &mut applied);
            continue;
        }
        let q = m[1][0].div_euclid(m[0][0]);
        if q != 0 {
            apply_b(&mut m, -q, &mut applied);
        }
        if m[1][0] == 0 {
            break;
        }
        let q2 = m[0][0].div_euclid(m[1][0]);
        apply_a(&mut m, q2, &mut applied);
    }
    if m[0][0] == -1 {
        // Left-multiply by -I = (ABA)^2.
        for g in [
            Sl2Gen::A,
            Sl2Gen::B,
            Sl2Gen::A,
            Sl2Gen::A,
            Sl2Gen::B,
            Sl2Gen::A,
        ] {
            match g {
                Sl2Gen::A => apply_a(&mut m, 1, &mut applied),
                Sl2Gen::B => apply_b(&mut m, 1, &mut applied),
            }
        }
    }
    debug_assert_eq!(m[0][0], 1);
    debug_assert_eq!(m[1][1], 1);
    if m[0][1] != 0 {
        let k = m[0][1];
        apply_a(&mut m, k, &mut applied);
    }
    debug_assert_eq!(m, [[1, 0], [0, 1]]);
    // L_r ... L_1 M = I, so M = inv(L_1) ... inv(L_r).
    let factors: Vec<(Sl2Gen, i64)> = applied
        .iter()
        .map(|&(g, k)| {
            let kk = (-k).rem_euclid(n as i128) as i64;
            (g, kk)
        })
        .collect();
    let word = Sl2Word::new(factors);
    debug_assert_eq!(word.eval_mod(n), reduce_mat(n, c));
    Ok(word)
}

/// Shortest-word factorization by breadth-first search; intended for small
/// moduli golden tests only.
pub fn sl2_factor_bfs(n: u64, c: &[[i64; 2]; 2]) -> Result<Sl2Word> {
    use std::collections::{HashMap, VecDeque};
    let target = reduce_mat(n, c);
    if det_mod(&target, n) != 1 % n {
        return Err(Error::NotUnimodular(n));
    }
    let id = [[1 % n, 0], [0, 1 % n]];
    let steps: [(Sl2Gen, i64); 4] = [
        (Sl2Gen::A, 1),
        (Sl2Gen::A, -1),
        (Sl2Gen::B, 1),
        (Sl2Gen::B, -1),
    ];
    let mut parent: HashMap<[[u64; 2]; 2], ([[u64; 2]; 2], (Sl2Gen, i64))> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(id);
    while let Some(cur) = queue.pop_front() {
        if cur == target {
            break;
        }
        for &(g, k) in &steps {
            let f = Sl2Word::new(vec![(g, k)]).eval_mod(n);
            let next = mat_mul_mod(&cur, &f, n);
            if next != id && !parent.contains_key(&next) {
                parent.insert(next, (cur, (g, k)));
                queue.push_back(next);
            }
        }
    }
    let mut factors = Vec::new();
    let mut cur = target;
    while cur != id {
        let (prev, step) = parent[&cur];
        factors.push(step);
        cur = prev;
    }
    factors.reverse();
    Ok(Sl2Word::new(factors))
}

/// Finds `M` in `SL(2,Z_n)` with `M (i,j)^t = (l, 0)^t`, where `l` generates
/// the ideal of `Z_n` generated by `i` and `j`. For a maximal-order element
/// the outcome is normalized to `l = 1`.
pub fn conjugate_to_multiple_of_u1(n: u64, a: (u64, u64)) -> ([[u64; 2]; 2], u64) {
    let (i, j) = (a.0 % n, a.1 % n);
    if i == 0 && j == 0 {
        return ([[1 % n, 0], [0, 1 % n]], 0);
    }
    let g = gcd(gcd(i, j), n);
    let (i0, j0) = (i / g, j / g);
    let step = n / g;
    // Nudge (i0, j0) within its residue class mod n/g until it has maximal
    // order, i.e. gcd with n is 1.
    let (mut ip, mut jp) = (i0 % n, j0 % n);
    'search: for budget in 0.. {
        for e1 in 0..=budget {
            let e2 = budget - e1;
            let ci = (i0 + e1 * step) % n;
            let cj = (j0 + e2 * step) % n;
            if gcd(gcd(ci, cj), n) == 1 {
                ip = ci;
                jp = cj;
                break 'search;
            }
        }
        assert!(budget <= n, "order-one representative search must terminate");
    }
    // Bezout: alpha*ip + beta*jp = 1 (mod n).
    let (g2, s0, t0) = ext_gcd(ip as i128, jp as i128);
    let h = mod_inverse((g2 as u64) % n, n).expect("gcd(ip, jp) is a unit mod n");
    let alpha = ((s0.rem_euclid(n as i128) as u64) as u128 * h as u128 % n as u128) as u64;
    let beta = ((t0.rem_euclid(n as i128) as u64) as u128 * h as u128 % n as u128) as u64;
    let m = [[alpha, beta], [(n - jp) % n, ip]];
    debug_assert_eq!(det_mod(&m, n), 1 % n);
    debug_assert_eq!(
        (m[0][0] as u128 * i as u128 + m[0][1] as u128 * j as u128) % n as u128,
        g as u128 % n as u128
    );
    debug_assert_eq!(
        (m[1][0] as u128 * i as u128 + m[1][1] as u128 * j as u128) % n as u128,
        0
    );
    (m, g)
}

/// Translates an `SL(2,Z_n)` word into transvections inside a hyperbolic
/// pair `(a, b)` of order `n`: `A -> s_a`, `B -> s_b`, exponents becoming
/// multipliers.
pub fn sl2_word_in_pair(word: &Sl2Word, hp: &HyperbolicPair) -> Result<TransvectionWord> {
    let shape = hp.shape().clone();
    let mut factors = Vec::with_capacity(word.len());
    for &(g, k) in word.factors() {
        let base = match g {
            Sl2Gen::A => hp.first().clone(),
            Sl2Gen::B => hp.second().clone(),
        };
        let t = Transvection::new(base, k)?;
        if t.multiplier() != 0 {
            factors.push(t);
        }
    }
    TransvectionWord::new(&shape, factors)
}

fn sl2_factor_mod_in_pair(c: &[[u64; 2]; 2], hp: &HyperbolicPair) -> Result<TransvectionWord> {
    let n = hp.order();
    let ci = [
        [c[0][0] as i64, c[0][1] as i64],
        [c[1][0] as i64, c[1][1] as i64],
    ];
    sl2_word_in_pair(&sl2_factor(n, &ci)?, hp)
}

/// Coordinates of `y` in the basis of a hyperbolic pair, read off through
/// the pairing; `y` must lie in the pair's span.
fn coords_in_pair(hp: &HyperbolicPair, y: &GroupElement) -> (u64, u64) {
    let n = hp.order();
    let p = pair(y, hp.second())
        .expect("same shape")
        .as_omega_power(n)
        .expect("span coordinate");
    let mq = pair(y, hp.first())
        .expect("same shape")
        .as_omega_power(n)
        .expect("span coordinate");
    let q = (n - mq) % n;
    let rebuilt = hp
        .first()
        .scale(p as i64)
        .add(&hp.second().scale(q as i64))
        .expect("same shape");
    assert_eq!(&rebuilt, y, "element must lie in the span of the pair");
    (p, q)
}

/// A transvection word swapping two orthogonal isometric hyperbolic pairs:
/// it maps `(a_1,b_1) <-> (a_2,b_2)` and fixes the orthocomplement of their
/// joint span pointwise.
pub fn swap_word(p1: &HyperbolicPair, p2: &HyperbolicPair) -> Result<TransvectionWord> {
    if p1.shape() != p2.shape() {
        return Err(Error::ShapeMismatch);
    }
    let n = p1.order();
    if p2.order() != n {
        return Err(Error::IncompatiblePairs("orders differ"));
    }
    if !p1.orthogonal_to(p2)? {
        return Err(Error::IncompatiblePairs("pairs are not orthogonal"));
    }
    let (a1, b1) = (p1.first().clone(), p1.second().clone());
    let (a2, b2) = (p2.first().clone(), p2.second().clone());

    // x = b1 + b2 makes (a1, x) and (a2, x) hyperbolic of order n.
    let x = b1.add(&b2)?;
    let pair_a1x = HyperbolicPair::new(a1.clone(), x.clone())?;
    let pair_a2x = HyperbolicPair::new(a2.clone(), x.clone())?;

    // tau: x -> a1 inside span(a1, x); phi: a2 -> x inside span(a2, x).
    let tau = sl2_factor_mod_in_pair(&[[0, 1], [(n - 1) % n, 0]], &pair_a1x)?;
    let phi = sl2_factor_mod_in_pair(&[[0, (n - 1) % n], [1, 0]], &pair_a2x)?;
    let tau_phi = TransvectionWord::concat(&[&tau, &phi])?;
    debug_assert_eq!(tau_phi.apply(&a2), a1);

    // Normalize the image of b2 so it pairs with b1 exactly by omega_n,
    // then one more transvection sends it to b1.
    let v2p = tau_phi.apply(&b2);
    let i = pair(&v2p, &b1)?
        .as_omega_power(n)
        .expect("pairing of order-n elements");
    let s_u1 = Transvection::new(a1.clone(), i as i64 - 1)?;
    let v2pp = s_u1.apply(&v2p);
    let q = v2pp.sub(&b1)?;
    let s_q = Transvection::new(q, 1)?;
    debug_assert_eq!(s_q.apply(&v2pp), b1);
    let nu = TransvectionWord::concat(&[
        &TransvectionWord::new(p1.shape(), vec![s_q, s_u1])?,
        &tau_phi,
    ])?;
    debug_assert_eq!(nu.apply(&a2), a1);
    debug_assert_eq!(nu.apply(&b2), b1);

    // nu carries span(a1,b1) into span(a2,b2); the residue psi is a plain
    // SL(2,Z_n) element there, factored explicitly.
    let img_a1 = coords_in_pair(p2, &nu.apply(&a1));
    let img_b1 = coords_in_pair(p2, &nu.apply(&b1));
    let psi_mat = [[img_a1.0, img_b1.0], [img_a1.1, img_b1.1]];
    let psi = sl2_factor_mod_in_pair(&psi_mat, p2)?;

    let w = TransvectionWord::concat(&[&nu.inverse(), &psi])?;
    assert_eq!(w.apply(&a1), a2, "swap word must map a1 to a2");
    assert_eq!(w.apply(&b1), b2, "swap word must map b1 to b2");
    assert_eq!(w.apply(&a2), a1, "swap word must map a2 to a1");
    assert_eq!(w.apply(&b2), b1, "swap word must map b2 to b1");
    Ok(w)
}

/// The hyperbolic pair spanning the `p^r`-torsion of factor `t`, with the
/// pairing normalized to `omega_{p^r}`.
fn sylow_pair(shape: &Shape, t: usize, m: u64) -> Result<HyperbolicPair> {
    let lt = shape.moduli()[t];
    debug_assert_eq!(lt % m, 0);
    let s = (lt / m) as i64;
    HyperbolicPair::from_unnormalized(
        shape.generator(2 * t).scale(s),
        shape.generator(2 * t + 1).scale(s),
    )
}

fn bezout_one(x: u64, y: u64, n: u64) -> (u64, u64) {
    let (g, s0, t0) = ext_gcd(x as i128, y as i128);
    let h = mod_inverse((g as u64) % n, n).expect("gcd(x, y) must be a unit mod n");
    let alpha = ((s0.rem_euclid(n as i128) as u64) as u128 * h as u128 % n as u128) as u64;
    let beta = ((t0.rem_euclid(n as i128) as u64) as u128 * h as u128 % n as u128) as u64;
    (alpha, beta)
}

/// Builds a transvection word sending a maximal-order element to `u_1`.
///
/// Stage 1 fixes, prime by prime, the first component's order by swapping
/// isometric hyperbolic Sylow summands; stage 2 clears the remaining
/// components one transvection at a time; stage 3 finishes inside the first
/// hyperbolic factor with an `SL(2,Z_{l1})` word.
pub fn reduce_to_u1(a: &GroupElement) -> Result<TransvectionWord> {
    let shape = a.shape().clone();
    let l1 = shape.exponent();
    if a.order() != l1 {
        return Err(Error::NotMaximalOrder {
            found: a.order(),
            maximal: l1,
        });
    }
    let mut word = TransvectionWord::identity(&shape);
    let mut c = a.clone();

    // Stage 1: make ord(c_1) = l1, prime by prime.
    for (p, r1) in prime_factors(l1) {
        if valuation(c.factor_order(0), p) == r1 {
            continue;
        }
        let donor = (1..shape.factor_count())
            .find(|&t| valuation(c.factor_order(t), p) == r1)
            .expect("the maximal p-order is attained at some component");
        let m = p.pow(r1);
        let w = swap_word(&sylow_pair(&shape, 0, m)?, &sylow_pair(&shape, donor, m)?)?;
        c = w.apply(&c);
        word = TransvectionWord::concat(&[&w, &word])?;
    }
    debug_assert_eq!(c.factor_order(0), l1);

    // Stage 2: clear components 2..k with one transvection each. The base
    // pairs with c by exactly omega_{l1}, so s_b subtracts b outright.
    while let Some(t) = (1..shape.factor_count()).find(|&t| c.factor(t) != (0, 0)) {
        let (x, y) = c.factor(0);
        let (alpha, beta) = bezout_one(x, y, l1);
        let mut coords = vec![0i64; shape.rank()];
        coords[0] = beta as i64;
        coords[1] = -(alpha as i64);
        coords[2 * t] = c.factor(t).0 as i64;
        coords[2 * t + 1] = c.factor(t).1 as i64;
        let b = shape.element(&coords)?;
        debug_assert_eq!(pair(&b, &c)?.value(), 1);
        let s = Transvection::new(b, 1)?;
        c = s.apply(&c);
        debug_assert_eq!(c.factor(t), (0, 0));
        debug_assert_eq!(c.factor_order(0), l1);
        word = TransvectionWord::concat(&[
            &TransvectionWord::new(&shape, vec![s])?,
            &word,
        ])?;
    }

    // Stage 3: conjugate the surviving first component onto u_1.
    let (m2, l) = conjugate_to_multiple_of_u1(l1, c.factor(0));
    debug_assert_eq!(l, 1);
    let w3 = sl2_factor_mod_in_pair(&m2, &standard_pair(&shape, 0))?;
    c = w3.apply(&c);
    assert_eq!(c, shape.generator(0), "reduction must land on u_1");
    word = TransvectionWord::concat(&[&w3, &word])?;
    Ok(word)
}

/// Embeds a word over the trailing factors `[l_{1+offset}, ...]` into the
/// full shape by padding the leading coordinates with zeros.
fn embed_word(shape: &Shape, w: &TransvectionWord, offset: usize) -> Result<TransvectionWord> {
    let mut factors = Vec::with_capacity(w.len());
    for t in w.factors() {
        let mut coords = vec![0i64; shape.rank()];
        for (i, &v) in t.base().coords().iter().enumerate() {
            coords[2 * offset + i] = v as i64;
        }
        factors.push(Transvection::new(
            shape.element(&coords)?,
            t.multiplier() as i64,
        )?);
    }
    TransvectionWord::new(shape, factors)
}

/// Factors a validated isometry into a transvection word whose product
/// equals it (constructively realizing the generation theorem).
///
/// The image of `u_1` is reduced back to `u_1`, the image of `v_1` is
/// normalized factor by factor, the residue splits as `Sp(H_{l1}) x Sp(rest)`,
/// and the two blocks are factored by the `SL(2,Z_n)` word and recursion.
pub fn factor_isometry(m: &Isometry) -> Result<TransvectionWord> {
    let shape = m.shape().clone();
    let k = shape.factor_count();
    let l1 = shape.exponent();

    // (1) w1 . M fixes u_1.
    let w1 = reduce_to_u1(&m.generator_image(0))?;
    let fixed = w1.to_isometry().compose(m)?;
    debug_assert_eq!(fixed.generator_image(0), shape.generator(0));

    // (2) Clean the image of v_1 factor by factor: phi_t maps the t-th
    // component onto a multiple of u_t.
    let v1img = fixed.generator_image(1);
    let mut phi = TransvectionWord::identity(&shape);
    for t in 1..k {
        let (pt, qt) = v1img.factor(t);
        if (pt, qt) == (0, 0) {
            continue;
        }
        let lt = shape.moduli()[t];
        let (ct, _) = conjugate_to_multiple_of_u1(lt, (pt, qt));
        let wt = sl2_factor_mod_in_pair(&ct, &standard_pair(&shape, t))?;
        phi = TransvectionWord::concat(&[&wt, &phi])?;
    }
    let cleaned = phi.apply(&v1img);
    debug_assert_eq!(cleaned.factor(0).1, 1);
    debug_assert!((1..k).all(|t| cleaned.factor(t).1 == 0));

    // (3) tau = prod s_{u_1+u_t}^{j_t} folds the stray u_t terms into u_1.
    let mut tau_factors = Vec::new();
    for t in 1..k {
        let jt = cleaned.factor(t).0;
        if jt != 0 {
            let base = shape.generator(0).add(&shape.generator(2 * t))?;
            tau_factors.push(Transvection::new(base, jt as i64)?);
        }
    }
    let tau = TransvectionWord::new(&shape, tau_factors)?;

    // (4) rho = tau . phi . w1 . M preserves H_{l1} and its complement.
    let rho = tau
        .to_isometry()
        .compose(&phi.to_isometry())?
        .compose(&w1.to_isometry())?
        .compose(m)?;
    for r in 2..shape.rank() {
        assert_eq!(rho.entry(r, 0), 0, "rho must preserve the first factor");
        assert_eq!(rho.entry(r, 1), 0, "rho must preserve the first factor");
    }
    for c in 2..shape.rank() {
        assert_eq!(rho.entry(0, c), 0, "rho must preserve the complement");
        assert_eq!(rho.entry(1, c), 0, "rho must preserve the complement");
    }

    // (5) Factor the H_{l1} block...
    let c1 = [
        [rho.entry(0, 0), rho.entry(0, 1)],
        [rho.entry(1, 0), rho.entry(1, 1)],
    ];
    let w_first = sl2_factor_mod_in_pair(&c1, &standard_pair(&shape, 0))?;

    // (6) ... and recurse on the rest.
    let w_rest = if k > 1 {
        let sub_shape = Shape::new(&shape.moduli()[1..])?;
        let sub_rows: Vec<Vec<i64>> = (2..shape.rank())
            .map(|r| {
                (2..shape.rank())
                    .map(|c| rho.entry(r, c) as i64)
                    .collect()
            })
            .collect();
        let rho_rest = Isometry::from_matrix(&sub_shape, &sub_rows)?;
        embed_word(&shape, &factor_isometry(&rho_rest)?, 1)?
    } else {
        TransvectionWord::identity(&shape)
    };

    // M = w1^{-1} phi^{-1} tau^{-1} (first x rest).
    let word = TransvectionWord::concat(&[
        &w1.inverse(),
        &phi.inverse(),
        &tau.inverse(),
        &w_first,
        &w_rest,
    ])?
    .simplify();
    debug_assert_eq!((l1 > 0) as u8, 1);
    Ok(word)
}

/// Direct count of `{2x2 matrices over Z_n : det = 1}`.
pub fn sl2_matrix_count(n: u64) -> u64 {
    let mut count = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if (a * d % n + n - b * c % n) % n == 1 % n {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// `|SL(2,Z_n)| = n^3 prod_{p|n} (1 - p^{-2})`.
pub fn sl2_order_closed_form(n: u64) -> u64 {
    let mut out = n * n * n;
    for (p, _) in prime_factors(n) {
        out = out / (p * p) * (p * p - 1);
    }
    out
}
