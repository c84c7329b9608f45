//! Finite nonsingular symplectic abelian groups in canonical hyperbolic
//! coordinates.
//!
//! A group of shape `[l1, ..., lk]` (each modulus dividing the previous one)
//! is the direct sum of hyperbolic planes `Z_li x Z_li` with coordinates
//! `(u_1, v_1, ..., u_k, v_k)`. The antisymmetric pairing takes values in the
//! roots of unity of order `l1`; values are stored exactly as exponents.

use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::arith::{gcd, lcm, mod_inverse, solve_congruence};
use crate::error::{Error, Result};

/// Default cap on the number of elements an operation may materialize.
pub const DEFAULT_MATERIALIZATION_BOUND: u64 = 4096;

/// Canonical type `[l1, ..., lk]` of a finite nonsingular symplectic abelian
/// group, with `l_{i+1} | l_i` and every modulus at least 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    moduli: Arc<[u64]>,
}

impl Shape {
    /// Validates the divisibility chain and builds the shape.
    pub fn new(moduli: &[u64]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::InvalidInput {
                what: "shape",
                detail: "modulus list is empty".into(),
            });
        }
        for (i, &m) in moduli.iter().enumerate() {
            if m < 2 {
                return Err(Error::ModulusTooSmall(m));
            }
            if i > 0 && moduli[i - 1] % m != 0 {
                return Err(Error::ChainViolation {
                    index: i,
                    found: m,
                    previous: moduli[i - 1],
                });
            }
        }
        Ok(Shape {
            moduli: moduli.into(),
        })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// The group exponent `N = l1`; every pairing value is an `N`-th root of unity.
    pub fn exponent(&self) -> u64 {
        self.moduli[0]
    }

    /// Number `k` of hyperbolic factors.
    pub fn factor_count(&self) -> usize {
        self.moduli.len()
    }

    /// Coordinate count `2k`.
    pub fn rank(&self) -> usize {
        2 * self.moduli.len()
    }

    /// The group order, i.e. the product of the squared moduli.
    pub fn group_order(&self) -> u128 {
        self.moduli
            .iter()
            .map(|&m| (m as u128) * (m as u128))
            .product()
    }

    /// Modulus governing coordinate `idx` (coordinates `2t` and `2t+1` share `l_{t+1}`).
    pub fn coord_modulus(&self, idx: usize) -> u64 {
        self.moduli[idx / 2]
    }

    /// Also the dimension of the matrices graded by this group: `n = Π l_i`.
    pub fn matrix_dimension(&self) -> u64 {
        self.moduli.iter().product()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            shape: self.clone(),
            coords: vec![0; self.rank()],
        }
    }

    /// Canonical generator `e_idx`: `u_{t+1}` at `idx = 2t`, `v_{t+1}` at `idx = 2t+1`.
    pub fn generator(&self, idx: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        coords[idx] = 1;
        GroupElement {
            shape: self.clone(),
            coords,
        }
    }

    /// Builds an element from raw coordinates, reducing each modulo its modulus.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidInput {
                what: "coordinates",
                detail: format!("expected {} coordinates, got {}", self.rank(), coords.len()),
            });
        }
        let reduced = coords
            .iter()
            .enumerate()
            .map(|(i, &c)| (c as i128).rem_euclid(self.coord_modulus(i) as i128) as u64)
            .collect();
        Ok(GroupElement {
            shape: self.clone(),
            coords: reduced,
        })
    }

    pub(crate) fn element_from_reduced(&self, coords: Vec<u64>) -> GroupElement {
        debug_assert_eq!(coords.len(), self.rank());
        debug_assert!(coords
            .iter()
            .enumerate()
            .all(|(i, &c)| c < self.coord_modulus(i)));
        GroupElement {
            shape: self.clone(),
            coords,
        }
    }

    /// All elements in lexicographic coordinate order, if the group order is
    /// within `bound`.
    pub fn elements(&self, bound: u64) -> Result<Vec<GroupElement>> {
        let order = self.group_order();
        if order > bound as u128 {
            return Err(Error::BoundExceeded {
                needed: order,
                bound,
            });
        }
        let rank = self.rank();
        let mut out = Vec::with_capacity(order as usize);
        let mut coords = vec![0u64; rank];
        loop {
            out.push(self.element_from_reduced(coords.clone()));
            let mut i = rank;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < self.coord_modulus(i) {
                    break;
                }
                coords[i] = 0;
            }
        }
    }
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Shape{:?}", self.moduli)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| m.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Serialize for Shape {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.moduli.len()))?;
        for m in self.moduli.iter() {
            seq.serialize_element(m)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Shape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let moduli = Vec::<u64>::deserialize(d)?;
        Shape::new(&moduli).map_err(serde::de::Error::custom)
    }
}

/// Element of the shaped group, coordinates `(u_1, v_1, ..., u_k, v_k)` kept
/// as canonical representatives. Doubles as a root label of the induced
/// grading and as a projective Pauli element (the three index sets coincide).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    shape: Shape,
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// The `(u, v)` coordinate pair of hyperbolic factor `t` (0-based).
    pub fn factor(&self, t: usize) -> (u64, u64) {
        (self.coords[2 * t], self.coords[2 * t + 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch);
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .enumerate()
            .map(|(i, (&a, &b))| (a + b) % self.shape.coord_modulus(i))
            .collect();
        Ok(GroupElement {
            shape: self.shape.clone(),
            coords,
        })
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GroupElement {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let m = self.shape.coord_modulus(i);
                (m - a) % m
            })
            .collect();
        GroupElement {
            shape: self.shape.clone(),
            coords,
        }
    }

    pub fn scale(&self, k: i64) -> GroupElement {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let m = self.shape.coord_modulus(i) as i128;
                ((a as i128) * (k as i128)).rem_euclid(m) as u64
            })
            .collect();
        GroupElement {
            shape: self.shape.clone(),
            coords,
        }
    }

    /// Group-theoretic order: `lcm_i  l_i / gcd(l_i, u_i, v_i)`.
    pub fn order(&self) -> u64 {
        let mut ord = 1;
        for t in 0..self.shape.factor_count() {
            ord = lcm(ord, self.factor_order(t));
        }
        ord
    }

    /// Order of the component in hyperbolic factor `t`.
    pub fn factor_order(&self, t: usize) -> u64 {
        let m = self.shape.moduli()[t];
        let (u, v) = self.factor(t);
        m / gcd(m, gcd(u, v))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coords.len()))?;
        for c in &self.coords {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

/// Pairing value `omega_{l1}^e`, stored as the exponent `e` modulo `l1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PairingExponent {
    value: u64,
    modulus: u64,
}

impl PairingExponent {
    pub(crate) fn new(value: u64, modulus: u64) -> Self {
        debug_assert!(value < modulus);
        PairingExponent { value, modulus }
    }

    /// Exponent base `omega_{l1}`.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// The ambient root order `l1`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// True when the pairing value is 1.
    pub fn is_trivial(&self) -> bool {
        self.value == 0
    }

    /// Multiplicative order of the root of unity `omega_{l1}^e`.
    pub fn root_order(&self) -> u64 {
        self.modulus / gcd(self.modulus, self.value)
    }

    /// Rewrites the value as a power of `omega_n`: the `j` with
    /// `e = j * (l1/n)`, when `n` divides `l1` and the value lies in that
    /// cyclic subgroup.
    pub fn as_omega_power(&self, n: u64) -> Option<u64> {
        if n == 0 || self.modulus % n != 0 {
            return None;
        }
        let step = self.modulus / n;
        if self.value % step != 0 {
            return None;
        }
        Some(self.value / step)
    }

    pub fn neg(&self) -> PairingExponent {
        PairingExponent::new((self.modulus - self.value) % self.modulus, self.modulus)
    }
}

/// Raw pairing on coordinate slices; callers guarantee both belong to `shape`.
pub(crate) fn pair_coords(shape: &Shape, a: &[u64], b: &[u64]) -> u64 {
    let l1 = shape.exponent();
    let mut acc: i128 = 0;
    for (t, &m) in shape.moduli().iter().enumerate() {
        let w = (l1 / m) as i128;
        let (u, v) = (a[2 * t] as i128, a[2 * t + 1] as i128);
        let (up, vp) = (b[2 * t] as i128, b[2 * t + 1] as i128);
        acc += w * (u * vp - v * up);
    }
    acc.rem_euclid(l1 as i128) as u64
}

/// The symplectic pairing `<a,b>` as an exponent of `omega_{l1}`.
///
/// Factorwise `<(u,v),(u',v')> = omega_{l_i}^{u v' - v u'}`, the hyperbolic
/// factors being mutually orthogonal.
pub fn pair(a: &GroupElement, b: &GroupElement) -> Result<PairingExponent> {
    if a.shape != b.shape {
        return Err(Error::ShapeMismatch);
    }
    Ok(PairingExponent::new(
        pair_coords(&a.shape, &a.coords, &b.coords),
        a.shape.exponent(),
    ))
}

/// Order of `a` in the group.
pub fn element_order(a: &GroupElement) -> u64 {
    a.order()
}

/// Two elements of equal order `n` whose pairing is exactly `omega_n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HyperbolicPair {
    a: GroupElement,
    b: GroupElement,
    order: u64,
}

impl HyperbolicPair {
    /// Checks `ord(a) = ord(b) = n` and `<a,b> = omega_n`.
    pub fn new(a: GroupElement, b: GroupElement) -> Result<Self> {
        let n = a.order();
        let ok = n > 1 && b.order() == n && {
            let e = pair(&a, &b)?;
            e.as_omega_power(n) == Some(1 % n)
        };
        if !ok {
            return Err(Error::NotHyperbolic(
                format!("{:?}", a.coords),
                format!("{:?}", b.coords),
            ));
        }
        Ok(HyperbolicPair { a, b, order: n })
    }

    /// Builds a pair from `a` and a partner whose pairing with `a` is only
    /// primitive, rescaling the partner by the least positive multiplier
    /// that normalizes the pairing to `omega_n`.
    pub fn from_unnormalized(a: GroupElement, b: GroupElement) -> Result<Self> {
        let n = a.order();
        let l1 = a.shape.exponent();
        if n < 2 {
            return Err(Error::NotHyperbolic(
                format!("{:?}", a.coords),
                format!("{:?}", b.coords),
            ));
        }
        let e = pair(&a, &b)?;
        let target = l1 / n;
        let t = solve_congruence(e.value(), target, l1).ok_or_else(|| {
            Error::NotHyperbolic(format!("{:?}", a.coords), format!("{:?}", b.coords))
        })?;
        let t = if t == 0 { l1 } else { t };
        HyperbolicPair::new(a, b.scale(t as i64))
    }

    pub fn first(&self) -> &GroupElement {
        &self.a
    }

    pub fn second(&self) -> &GroupElement {
        &self.b
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn shape(&self) -> &Shape {
        self.a.shape()
    }

    /// True when every cross pairing with `other` vanishes.
    pub fn orthogonal_to(&self, other: &HyperbolicPair) -> Result<bool> {
        for x in [&self.a, &self.b] {
            for y in [&other.a, &other.b] {
                if !pair(x, y)?.is_trivial() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The standard hyperbolic pair `(u_t, v_t)` of factor `t`.
pub fn standard_pair(shape: &Shape, t: usize) -> HyperbolicPair {
    HyperbolicPair::new(shape.generator(2 * t), shape.generator(2 * t + 1))
        .expect("standard generators form a hyperbolic pair")
}

/// Projection of `c` onto the nonsingular subgroup spanned by mutually
/// orthogonal hyperbolic pairs: `pi(c) = sum_i (<c,b_i>.a_i - <c,a_i>.b_i)`,
/// a root of unity acting on an element of matching order by its exponent.
pub fn projection(pairs: &[HyperbolicPair], c: &GroupElement) -> Result<GroupElement> {
    for (i, p) in pairs.iter().enumerate() {
        if p.shape() != c.shape() {
            return Err(Error::ShapeMismatch);
        }
        for q in &pairs[i + 1..] {
            if !p.orthogonal_to(q)? {
                return Err(Error::NotOrthogonal);
            }
        }
    }
    let mut acc = c.shape().zero();
    for p in pairs {
        let n = p.order();
        // Lemma on pairing orders guarantees both coefficients exist.
        let jb = pair(c, &p.b)?
            .as_omega_power(n)
            .expect("pairing value must be an omega_n power");
        let ja = pair(c, &p.a)?
            .as_omega_power(n)
            .expect("pairing value must be an omega_n power");
        acc = acc.add(&p.a.scale(jb as i64))?;
        acc = acc.sub(&p.b.scale(ja as i64))?;
    }
    Ok(acc)
}

/// A subgroup given by generators, with the element set cached when the
/// subgroup fits under the materialization bound.
#[derive(Clone, Debug)]
pub struct SubgroupView {
    shape: Shape,
    generators: Vec<GroupElement>,
    elements: Option<Vec<GroupElement>>,
}

impl SubgroupView {
    /// Closure of the generators under addition, materialized when at most
    /// `bound` elements arise.
    pub fn span(shape: &Shape, generators: &[GroupElement], bound: u64) -> Result<Self> {
        for g in generators {
            if g.shape() != shape {
                return Err(Error::ShapeMismatch);
            }
        }
        let mut seen = std::collections::HashSet::new();
        let mut queue = vec![shape.zero()];
        seen.insert(shape.zero().coords.clone());
        let mut overflow = false;
        while let Some(x) = queue.pop() {
            for g in generators {
                let y = x.add(g)?;
                if seen.insert(y.coords.clone()) {
                    if seen.len() as u64 > bound {
                        overflow = true;
                        break;
                    }
                    queue.push(y);
                }
            }
            if overflow {
                break;
            }
        }
        let elements = if overflow {
            None
        } else {
            let mut v: Vec<GroupElement> = seen
                .into_iter()
                .map(|coords| shape.element_from_reduced(coords))
                .collect();
            v.sort_by(|a, b| a.coords.cmp(&b.coords));
            Some(v)
        };
        Ok(SubgroupView {
            shape: shape.clone(),
            generators: generators.to_vec(),
            elements,
        })
    }

    /// The whole group as a view.
    pub fn whole_group(shape: &Shape, bound: u64) -> Result<Self> {
        let gens: Vec<GroupElement> = (0..shape.rank()).map(|i| shape.generator(i)).collect();
        let elements = shape.elements(bound)?;
        Ok(SubgroupView {
            shape: shape.clone(),
            generators: gens,
            elements: Some(elements),
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn is_materialized(&self) -> bool {
        self.elements.is_some()
    }

    pub fn elements(&self) -> Result<&[GroupElement]> {
        self.elements.as_deref().ok_or(Error::BoundExceeded {
            needed: 0,
            bound: 0,
        })
    }

    pub fn order(&self) -> Result<u64> {
        Ok(self.elements()?.len() as u64)
    }

    pub fn contains(&self, x: &GroupElement) -> Result<bool> {
        Ok(self
            .elements()?
            .binary_search_by(|e| e.coords.cmp(&x.coords))
            .is_ok())
    }

    /// Nonsingularity of the restricted pairing: only 0 pairs trivially with
    /// every generator.
    pub fn is_nonsingular(&self) -> Result<bool> {
        for x in self.elements()? {
            if x.is_zero() {
                continue;
            }
            if self
                .generators
                .iter()
                .all(|g| pair_coords(&self.shape, &x.coords, &g.coords) == 0)
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Orthocomplement `{a : <a,b> = 1 for all b in H_0}` inside the full group.
///
/// Requires `H_0` nonsingular; the complement then satisfies
/// `|H_0| * |H_0^perp| = |H|` and meets `H_0` trivially.
pub fn orthocomplement(h0: &SubgroupView, bound: u64) -> Result<SubgroupView> {
    if !h0.is_nonsingular()? {
        return Err(Error::SingularSubgroup);
    }
    let shape = h0.shape().clone();
    let ambient = shape.elements(bound)?;
    let members: Vec<GroupElement> = ambient
        .into_iter()
        .filter(|x| {
            h0.generators()
                .iter()
                .all(|g| pair_coords(&shape, &x.coords, &g.coords) == 0)
        })
        .collect();
    let total = (members.len() as u128) * (h0.order()? as u128);
    assert_eq!(
        total,
        shape.group_order(),
        "orthocomplement must complement a nonsingular subgroup"
    );
    // A compact generating set keeps later pairing checks cheap.
    let mut gens: Vec<GroupElement> = Vec::new();
    let mut span_size = 1u64;
    for x in &members {
        if span_size as usize == members.len() {
            break;
        }
        let trial: Vec<GroupElement> = gens.iter().cloned().chain([x.clone()]).collect();
        let sub = SubgroupView::span(&shape, &trial, members.len() as u64)?;
        let new_size = sub.order()?;
        if new_size > span_size {
            gens = trial;
            span_size = new_size;
        }
    }
    Ok(SubgroupView {
        shape,
        generators: gens,
        elements: Some(members),
    })
}

/// Decomposes a nonsingular subgroup into orthogonal hyperbolic pairs of
/// weakly decreasing orders (the canonical decomposition).
///
/// Greedy: take `a` of maximal order (lexicographically least), find the
/// lexicographically least partner with primitive pairing, normalize it,
/// emit the pair, project everything onto the pair's orthocomplement and
/// recurse.
pub fn canonical_decompose(s: &SubgroupView) -> Result<Vec<HyperbolicPair>> {
    let shape = s.shape().clone();
    let mut working: Vec<GroupElement> = s.elements()?.to_vec();
    let mut out = Vec::new();
    loop {
        if working.iter().all(|x| x.is_zero()) {
            break;
        }
        let m = working.iter().map(|x| x.order()).max().unwrap();
        let a = working
            .iter()
            .filter(|x| x.order() == m)
            .min_by(|x, y| x.coords.cmp(&y.coords))
            .unwrap()
            .clone();
        let partner = working
            .iter()
            .filter(|b| {
                pair_coords(&shape, &a.coords, &b.coords) != 0
                    && PairingExponent::new(
                        pair_coords(&shape, &a.coords, &b.coords),
                        shape.exponent(),
                    )
                    .root_order()
                        == m
            })
            .min_by(|x, y| x.coords.cmp(&y.coords))
            .cloned()
            .ok_or(Error::SingularSubgroup)?;
        let hp = HyperbolicPair::from_unnormalized(a, partner)?;
        let pair_slice = [hp.clone()];
        let mut next: Vec<GroupElement> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for c in &working {
            let residue = c.sub(&projection(&pair_slice, c)?)?;
            if seen.insert(residue.coords.clone()) {
                next.push(residue);
            }
        }
        next.sort_by(|x, y| x.coords.cmp(&y.coords));
        working = next;
        out.push(hp);
    }
    for w in out.windows(2) {
        debug_assert_eq!(
            w[0].order() % w[1].order(),
            0,
            "decomposition orders must form a divisor chain"
        );
    }
    Ok(out)
}

/// Combines orthogonal hyperbolic pairs of coprime orders `m`, `n` into one
/// of order `mn`: `a = u + u'`, `b = i(v + v')` with `i = (m+n)^{-1} mod mn`.
pub fn crt_hyperbolic(p1: &HyperbolicPair, p2: &HyperbolicPair) -> Result<HyperbolicPair> {
    let (m, n) = (p1.order(), p2.order());
    if gcd(m, n) != 1 {
        return Err(Error::NotCoprime(m, n));
    }
    if p1.shape() != p2.shape() {
        return Err(Error::ShapeMismatch);
    }
    if !p1.orthogonal_to(p2)? {
        return Err(Error::NotOrthogonal);
    }
    let a = p1.first().add(p2.first())?;
    let b0 = p1.second().add(p2.second())?;
    let i = mod_inverse((m + n) % (m * n), m * n).expect("m+n is a unit modulo mn");
    HyperbolicPair::new(a, b0.scale(i as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(moduli: &[u64]) -> Shape {
        Shape::new(moduli).unwrap()
    }

    fn el(s: &Shape, coords: &[i64]) -> GroupElement {
        s.element(coords).unwrap()
    }

    /// Brute-force order oracle: the least m >= 1 with m*a = 0.
    fn order_oracle(a: &GroupElement) -> u64 {
        let mut acc = a.clone();
        let mut m = 1;
        while !acc.is_zero() {
            acc = acc.add(a).unwrap();
            m += 1;
        }
        m
    }

    #[test]
    fn make_shape_examples() {
        let s = shape(&[4, 2]);
        assert_eq!(s.exponent(), 4);
        assert_eq!(s.group_order(), 64);
        let s2 = shape(&[2]);
        assert_eq!(s2.group_order(), 4);
        assert!(matches!(
            Shape::new(&[4, 3]),
            Err(Error::ChainViolation { .. })
        ));
        assert!(matches!(Shape::new(&[4, 1]), Err(Error::ModulusTooSmall(1))));
        assert!(matches!(Shape::new(&[]), Err(Error::InvalidInput { .. })));
    }

    #[test]
    fn pairing_examples() {
        for n in 2..8 {
            let s = shape(&[n]);
            let e = pair(&s.generator(0), &s.generator(1)).unwrap();
            assert_eq!(e.value(), 1);
        }
        let s = shape(&[4, 2]);
        let u1 = s.generator(0);
        let v2 = s.generator(3);
        assert!(pair(&u1, &v2).unwrap().is_trivial());
        for a in s.elements(4096).unwrap().iter().take(10) {
            assert!(pair(a, a).unwrap().is_trivial());
        }
        let other = shape(&[2]);
        assert!(matches!(
            pair(&u1, &other.generator(0)),
            Err(Error::ShapeMismatch)
        ));
    }

    #[test]
    fn order_examples() {
        let s = shape(&[4]);
        assert_eq!(el(&s, &[1, 0]).order(), 4);
        assert_eq!(el(&s, &[2, 2]).order(), 2);
        let s2 = shape(&[4, 2]);
        assert_eq!(el(&s2, &[2, 0, 1, 0]).order(), 2);
        // Oracle agreement on every element of a mixed shape.
        for a in s2.elements(4096).unwrap() {
            assert_eq!(a.order(), order_oracle(&a));
        }
    }

    #[test]
    fn projection_examples() {
        // c already in H_0 is fixed.
        let s = shape(&[4, 2]);
        let h0 = [standard_pair(&s, 0)];
        let a1 = s.generator(0);
        assert_eq!(projection(&h0, &a1).unwrap(), a1);
        // c orthogonal to H_0 projects to zero.
        let s22 = shape(&[2, 2]);
        let h0 = [standard_pair(&s22, 0)];
        let u2 = s22.generator(2);
        assert!(projection(&h0, &u2).unwrap().is_zero());
        // Mixed element: u1 + v1 + u2 projects onto u1 + v1.
        let h0 = [standard_pair(&s, 0)];
        let c = el(&s, &[1, 1, 1, 0]);
        assert_eq!(projection(&h0, &c).unwrap(), el(&s, &[1, 1, 0, 0]));
    }

    #[test]
    fn projection_independent_of_pair_choice() {
        // Replace (a, b) by (a, b + a): same span, same projection.
        for moduli in [&[4u64, 2][..], &[2, 2], &[6, 3]] {
            let s = shape(moduli);
            let p = standard_pair(&s, 0);
            let alt = HyperbolicPair::new(
                p.first().clone(),
                p.second().add(p.first()).unwrap(),
            )
            .unwrap();
            for c in s.elements(4096).unwrap() {
                assert_eq!(
                    projection(&[p.clone()], &c).unwrap(),
                    projection(&[alt.clone()], &c).unwrap()
                );
            }
        }
    }

    #[test]
    fn orthocomplement_examples() {
        let s = shape(&[2, 2]);
        let whole = SubgroupView::whole_group(&s, 4096).unwrap();
        let comp = orthocomplement(&whole, 4096).unwrap();
        assert_eq!(comp.order().unwrap(), 1);

        let h0 = SubgroupView::span(&s, &[s.generator(0), s.generator(1)], 4096).unwrap();
        let comp = orthocomplement(&h0, 4096).unwrap();
        assert_eq!(comp.order().unwrap(), 4);
        assert!(comp.contains(&s.generator(2)).unwrap());
        assert!(comp.contains(&s.generator(3)).unwrap());

        let s4 = shape(&[4]);
        let whole = SubgroupView::whole_group(&s4, 4096).unwrap();
        let comp = orthocomplement(&whole, 4096).unwrap();
        assert_eq!(comp.order().unwrap(), 1);
    }

    #[test]
    fn orthocomplement_rejects_singular() {
        // The 2-torsion of H_4 is totally isotropic.
        let s = shape(&[4]);
        let iso = SubgroupView::span(&s, &[el(&s, &[2, 0]), el(&s, &[0, 2])], 4096).unwrap();
        assert!(matches!(
            orthocomplement(&iso, 4096),
            Err(Error::SingularSubgroup)
        ));
    }

    #[test]
    fn canonical_decompose_full_group() {
        for moduli in [&[4u64, 2][..], &[2], &[6, 3], &[2, 2, 2]] {
            let s = shape(moduli);
            let whole = SubgroupView::whole_group(&s, 4096).unwrap();
            let pairs = canonical_decompose(&whole).unwrap();
            let orders: Vec<u64> = pairs.iter().map(|p| p.order()).collect();
            assert_eq!(orders, moduli.to_vec());
            for (i, p) in pairs.iter().enumerate() {
                for q in &pairs[i + 1..] {
                    assert!(p.orthogonal_to(q).unwrap());
                }
            }
        }
    }

    #[test]
    fn canonical_decompose_trivial_and_singular() {
        let s = shape(&[4]);
        let zero = SubgroupView::span(&s, &[], 4096).unwrap();
        assert!(canonical_decompose(&zero).unwrap().is_empty());
        // Brute force confirms span{(2,0),(0,2)} holds no hyperbolic pair:
        // all pairings inside are trivial, so decomposition must fail.
        let iso = SubgroupView::span(&s, &[el(&s, &[2, 0]), el(&s, &[0, 2])], 4096).unwrap();
        for a in iso.elements().unwrap() {
            for b in iso.elements().unwrap() {
                assert!(pair(a, b).unwrap().is_trivial());
            }
        }
        assert!(matches!(
            canonical_decompose(&iso),
            Err(Error::SingularSubgroup)
        ));
    }

    #[test]
    fn crt_hyperbolic_examples() {
        // H_6 splits as orthogonal hyperbolic summands of orders 2 and 3;
        // recombining them recovers a pair of full order 6.
        let s = shape(&[6]);
        let p2 = HyperbolicPair::from_unnormalized(el(&s, &[3, 0]), el(&s, &[0, 3])).unwrap();
        let p3 = HyperbolicPair::from_unnormalized(el(&s, &[2, 0]), el(&s, &[0, 2])).unwrap();
        assert_eq!((p2.order(), p3.order()), (2, 3));
        let combined = crt_hyperbolic(&p2, &p3).unwrap();
        assert_eq!(combined.order(), 6);
        assert_eq!(
            pair(combined.first(), combined.second())
                .unwrap()
                .as_omega_power(6),
            Some(1)
        );

        assert!(matches!(
            crt_hyperbolic(&p2, &p2),
            Err(Error::NotCoprime(2, 2))
        ));

        // Orders (3,4) inside H_12.
        let s12 = shape(&[12]);
        let q3 = HyperbolicPair::from_unnormalized(el(&s12, &[4, 0]), el(&s12, &[0, 4])).unwrap();
        let q4 = HyperbolicPair::from_unnormalized(el(&s12, &[3, 0]), el(&s12, &[0, 3])).unwrap();
        let c = crt_hyperbolic(&q3, &q4).unwrap();
        assert_eq!(c.order(), 12);
        assert_eq!(
            pair(c.first(), c.second()).unwrap().as_omega_power(12),
            Some(1)
        );
    }

    #[test]
    fn direct_sum_of_h0_and_complement() {
        let s = shape(&[4, 2]);
        let h0 = SubgroupView::span(&s, &[s.generator(0), s.generator(1)], 4096).unwrap();
        let comp = orthocomplement(&h0, 4096).unwrap();
        assert_eq!(
            h0.order().unwrap() as u128 * comp.order().unwrap() as u128,
            s.group_order()
        );
        for x in comp.elements().unwrap() {
            if !x.is_zero() {
                assert!(!h0.contains(x).unwrap());
            }
        }
    }

    #[test]
    fn shape_json_roundtrip() {
        let s = shape(&[6, 2]);
        let txt = serde_json::to_string(&s).unwrap();
        assert_eq!(txt, "[6,2]");
        let back: Shape = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<Shape>("[4,3]").is_err());
        let e = el(&s, &[5, 0, 1, 1]);
        assert_eq!(serde_json::to_string(&e).unwrap(), "[5,0,1,1]");
    }
}
