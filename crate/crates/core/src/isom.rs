//! Isometries of a shaped group: validation, application, composition;
//! transvections and transvection words; brute-force enumeration of `Sp(H)`
//! (the oracle) and the transvection closure `Q(H)`.
//!
//! Three representations coexist: integer matrices for algebra, permutation
//! tables over the materialized group for closure hashing, and transvection
//! words for constructive output.

use std::collections::{HashSet, VecDeque};

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sympcore::{pair, pair_coords, GroupElement, Shape};

/// Caps for operations that materialize the group or enumerate isometries.
#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    /// Largest group order that may be materialized.
    pub max_group_order: u64,
    /// Largest isometry set that may be collected.
    pub max_set_size: u64,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_group_order: crate::sympcore::DEFAULT_MATERIALIZATION_BOUND,
            max_set_size: 1 << 22,
        }
    }
}

/// The group laid out in lexicographic coordinate order, with O(1)
/// rank/unrank between coordinates and indices.
#[derive(Clone, Debug)]
pub struct MaterializedGroup {
    shape: Shape,
    strides: Vec<u64>,
    coords: Vec<Vec<u64>>,
    orders: Vec<u64>,
}

impl MaterializedGroup {
    pub fn new(shape: &Shape, bound: u64) -> Result<Self> {
        let order = shape.group_order();
        if order > bound as u128 || order > u32::MAX as u128 {
            return Err(Error::BoundExceeded {
                needed: order,
                bound,
            });
        }
        let rank = shape.rank();
        let mut strides = vec![1u64; rank];
        for i in (0..rank - 1).rev() {
            strides[i] = strides[i + 1] * shape.coord_modulus(i + 1);
        }
        let elements = shape.elements(bound)?;
        let coords: Vec<Vec<u64>> = elements.iter().map(|e| e.coords().to_vec()).collect();
        let orders: Vec<u64> = elements.iter().map(|e| e.order()).collect();
        Ok(MaterializedGroup {
            shape: shape.clone(),
            strides,
            coords,
            orders,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, coords: &[u64]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| (c * s) as usize)
            .sum()
    }

    pub fn coords_at(&self, idx: usize) -> &[u64] {
        &self.coords[idx]
    }

    pub fn order_at(&self, idx: usize) -> u64 {
        self.orders[idx]
    }

    pub fn element(&self, idx: usize) -> GroupElement {
        self.shape
            .element(&self.coords[idx].iter().map(|&c| c as i64).collect::<Vec<_>>())
            .expect("materialized coordinates are valid")
    }
}

/// A pairing-preserving automorphism, stored as a `2k x 2k` integer matrix
/// whose column `c` holds the coordinates of the image of generator `e_c`,
/// each row reduced modulo its coordinate modulus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Isometry {
    shape: Shape,
    matrix: Vec<u64>,
}

impl Isometry {
    /// Validates well-definedness and pairing preservation; the two imply
    /// bijectivity on a nonsingular group.
    pub fn from_matrix(shape: &Shape, rows: &[Vec<i64>]) -> Result<Self> {
        let rank = shape.rank();
        if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
            return Err(Error::InvalidInput {
                what: "isometry matrix",
                detail: format!("expected {rank}x{rank} matrix"),
            });
        }
        let mut matrix = vec![0u64; rank * rank];
        for (r, row) in rows.iter().enumerate() {
            let m = shape.coord_modulus(r) as i128;
            for (c, &entry) in row.iter().enumerate() {
                matrix[r * rank + c] = (entry as i128).rem_euclid(m) as u64;
            }
        }
        let iso = Isometry {
            shape: shape.clone(),
            matrix,
        };
        iso.validate()?;
        Ok(iso)
    }

    /// Builds the matrix whose columns are the given images of the canonical
    /// generators, then validates.
    pub fn from_images(shape: &Shape, images: &[GroupElement]) -> Result<Self> {
        let rank = shape.rank();
        if images.len() != rank {
            return Err(Error::InvalidInput {
                what: "generator images",
                detail: format!("expected {rank} images"),
            });
        }
        let mut matrix = vec![0u64; rank * rank];
        for (c, img) in images.iter().enumerate() {
            if img.shape() != shape {
                return Err(Error::ShapeMismatch);
            }
            for r in 0..rank {
                matrix[r * rank + c] = img.coords()[r];
            }
        }
        let iso = Isometry {
            shape: shape.clone(),
            matrix,
        };
        iso.validate()?;
        Ok(iso)
    }

    pub fn identity(shape: &Shape) -> Self {
        let rank = shape.rank();
        let mut matrix = vec![0u64; rank * rank];
        for r in 0..rank {
            matrix[r * rank + r] = 1 % shape.coord_modulus(r);
        }
        Isometry {
            shape: shape.clone(),
            matrix,
        }
    }

    fn validate(&self) -> Result<()> {
        let rank = self.shape.rank();
        // Well-definedness: entry (r,c) must be divisible by
        // mod(r)/gcd(mod(r), mod(c)), else e_c's image has too large an order.
        for r in 0..rank {
            let mr = self.shape.coord_modulus(r);
            for c in 0..rank {
                let mc = self.shape.coord_modulus(c);
                let step = mr / crate::arith::gcd(mr, mc);
                let entry = self.matrix[r * rank + c];
                if entry % step != 0 {
                    return Err(Error::IllFormedHom {
                        row: r,
                        col: c,
                        entry,
                    });
                }
            }
        }
        // Pairing preservation on generator pairs.
        let l1 = self.shape.exponent();
        for c in 0..rank {
            for cp in c + 1..rank {
                let expected = if cp == c + 1 && c % 2 == 0 {
                    l1 / self.shape.coord_modulus(c)
                } else {
                    0
                };
                let got = pair_coords(&self.shape, &self.column(c), &self.column(cp));
                if got != expected {
                    return Err(Error::NotIsometry(c, cp));
                }
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn entry(&self, r: usize, c: usize) -> u64 {
        self.matrix[r * self.shape.rank() + c]
    }

    fn column(&self, c: usize) -> Vec<u64> {
        let rank = self.shape.rank();
        (0..rank).map(|r| self.matrix[r * rank + c]).collect()
    }

    /// Image of generator `e_c`.
    pub fn generator_image(&self, c: usize) -> GroupElement {
        self.shape.element_from_reduced(self.column(c))
    }

    pub(crate) fn apply_coords(&self, coords: &[u64]) -> Vec<u64> {
        let rank = self.shape.rank();
        (0..rank)
            .map(|r| {
                let m = self.shape.coord_modulus(r) as u128;
                let acc: u128 = (0..rank)
                    .map(|c| (self.matrix[r * rank + c] as u128) * (coords[c] as u128))
                    .sum();
                (acc % m) as u64
            })
            .collect()
    }

    pub fn apply(&self, a: &GroupElement) -> Result<GroupElement> {
        if a.shape() != &self.shape {
            return Err(Error::ShapeMismatch);
        }
        Ok(self.shape.element_from_reduced(self.apply_coords(a.coords())))
    }

    /// `self . other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch);
        }
        let rank = self.shape.rank();
        let mut matrix = vec![0u64; rank * rank];
        for r in 0..rank {
            let m = self.shape.coord_modulus(r) as u128;
            for c in 0..rank {
                let acc: u128 = (0..rank)
                    .map(|t| (self.matrix[r * rank + t] as u128) * (other.matrix[t * rank + c] as u128))
                    .sum();
                matrix[r * rank + c] = (acc % m) as u64;
            }
        }
        Ok(Isometry {
            shape: self.shape.clone(),
            matrix,
        })
    }

    /// Action on the materialized group as a permutation table.
    pub fn permutation_table(&self, mg: &MaterializedGroup) -> Vec<u32> {
        (0..mg.len())
            .map(|i| mg.index_of(&self.apply_coords(mg.coords_at(i))) as u32)
            .collect()
    }

    /// Inverse of a bare matrix, computed through the permutation table.
    /// Mixed-modulus integer matrices have no uniform adjugate, so this is
    /// only available below the materialization bound.
    pub fn inverse(&self, bound: u64) -> Result<Isometry> {
        let mg = MaterializedGroup::new(&self.shape, bound)?;
        let table = self.permutation_table(&mg);
        let mut inv = vec![0u32; table.len()];
        for (i, &j) in table.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        let rank = self.shape.rank();
        let images: Vec<GroupElement> = (0..rank)
            .map(|c| {
                let idx = mg.index_of(self.shape.generator(c).coords());
                mg.element(inv[idx] as usize)
            })
            .collect();
        Isometry::from_images(&self.shape, &images)
    }
}

impl Serialize for Isometry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rank = self.shape.rank();
        let rows: Vec<Vec<u64>> = (0..rank)
            .map(|r| (0..rank).map(|c| self.matrix[r * rank + c]).collect())
            .collect();
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("shape", &self.shape)?;
        map.serialize_entry("matrix", &rows)?;
        map.end()
    }
}

impl Isometry {
    /// Parses `{"shape": [...], "matrix": [[...], ...]}` and validates.
    pub fn from_json(value: &serde_json::Value) -> Result<Isometry> {
        let obj = value.as_object().ok_or(Error::InvalidInput {
            what: "isometry json",
            detail: "expected an object".into(),
        })?;
        let shape: Shape = serde_json::from_value(
            obj.get("shape")
                .cloned()
                .ok_or(Error::InvalidInput {
                    what: "isometry json",
                    detail: "missing \"shape\"".into(),
                })?,
        )
        .map_err(|e| Error::InvalidInput {
            what: "isometry json",
            detail: e.to_string(),
        })?;
        let rows: Vec<Vec<i64>> = serde_json::from_value(
            obj.get("matrix")
                .cloned()
                .ok_or(Error::InvalidInput {
                    what: "isometry json",
                    detail: "missing \"matrix\"".into(),
                })?,
        )
        .map_err(|e| Error::InvalidInput {
            what: "isometry json",
            detail: e.to_string(),
        })?;
        Isometry::from_matrix(&shape, &rows)
    }
}

/// The transvection `s_{b,k}: a -> a - k(<b,a>.b)`, `b` nonzero and `k`
/// reduced modulo `ord(b)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Transvection {
    base: GroupElement,
    multiplier: u64,
}

impl Transvection {
    pub fn new(base: GroupElement, k: i64) -> Result<Self> {
        if base.is_zero() {
            return Err(Error::ZeroBase);
        }
        let m = base.order();
        Ok(Transvection {
            base,
            multiplier: (k as i128).rem_euclid(m as i128) as u64,
        })
    }

    pub fn base(&self) -> &GroupElement {
        &self.base
    }

    pub fn multiplier(&self) -> u64 {
        self.multiplier
    }

    /// `s_{b,k}^{-1} = s_{b,-k}`.
    pub fn inverse(&self) -> Transvection {
        let m = self.base.order();
        Transvection {
            base: self.base.clone(),
            multiplier: (m - self.multiplier) % m,
        }
    }

    /// Applies the transvection. The pairing value `<b,a>` lies in the
    /// `ord(b)`-th roots of unity, so its action on `b` is by exponent.
    pub fn apply(&self, a: &GroupElement) -> GroupElement {
        assert_eq!(
            a.shape(),
            self.base.shape(),
            "transvection applied across shapes"
        );
        let m = self.base.order();
        let e = pair(&self.base, a).expect("shapes checked");
        let t = e
            .as_omega_power(m)
            .expect("pairing with the base is an ord(b)-th root of unity");
        let mult = (self.multiplier as u128 * t as u128 % m as u128) as i64;
        a.sub(&self.base.scale(mult)).expect("shapes checked")
    }

    pub fn to_isometry(&self) -> Isometry {
        let shape = self.base.shape().clone();
        let images: Vec<GroupElement> = (0..shape.rank())
            .map(|c| self.apply(&shape.generator(c)))
            .collect();
        Isometry::from_images(&shape, &images).expect("a transvection is an isometry")
    }

    /// Permutation action on the materialized group.
    pub fn permutation_table(&self, mg: &MaterializedGroup) -> Vec<u32> {
        // a -> a - (k t') b  with t' read off the pairing; inlined on raw
        // coordinates to keep closures cheap.
        let shape = mg.shape().clone();
        let m = self.base.order();
        let l1 = shape.exponent();
        let step = l1 / m;
        let rank = shape.rank();
        let mut out = Vec::with_capacity(mg.len());
        for i in 0..mg.len() {
            let a = mg.coords_at(i);
            let e = pair_coords(&shape, self.base.coords(), a);
            debug_assert_eq!(e % step, 0);
            let t = e / step;
            let mult = (self.multiplier as u128 * t as u128 % m as u128) as u64;
            let coords: Vec<u64> = (0..rank)
                .map(|r| {
                    let md = shape.coord_modulus(r) as u128;
                    let sub = (self.base.coords()[r] as u128 * mult as u128) % md;
                    ((a[r] as u128 + md - sub) % md) as u64
                })
                .collect();
            out.push(mg.index_of(&coords) as u32);
        }
        out
    }
}

/// An ordered product of transvections, applied right to left: the last
/// entry acts first, like a matrix product.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransvectionWord {
    shape: Shape,
    factors: Vec<Transvection>,
}

impl TransvectionWord {
    pub fn identity(shape: &Shape) -> Self {
        TransvectionWord {
            shape: shape.clone(),
            factors: Vec::new(),
        }
    }

    pub fn new(shape: &Shape, factors: Vec<Transvection>) -> Result<Self> {
        for t in &factors {
            if t.base().shape() != shape {
                return Err(Error::ShapeMismatch);
            }
        }
        Ok(TransvectionWord {
            shape: shape.clone(),
            factors,
        })
    }

    /// Builds a word from transvections listed in the order they are
    /// applied (first entry acts first).
    pub fn from_application_order(shape: &Shape, mut steps: Vec<Transvection>) -> Result<Self> {
        steps.reverse();
        TransvectionWord::new(shape, steps)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn factors(&self) -> &[Transvection] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn apply(&self, a: &GroupElement) -> GroupElement {
        let mut acc = a.clone();
        for t in self.factors.iter().rev() {
            acc = t.apply(&acc);
        }
        acc
    }

    /// Word inversion: reversed order, negated multipliers.
    pub fn inverse(&self) -> TransvectionWord {
        TransvectionWord {
            shape: self.shape.clone(),
            factors: self.factors.iter().rev().map(|t| t.inverse()).collect(),
        }
    }

    /// Product of words, leftmost acting last.
    pub fn concat(parts: &[&TransvectionWord]) -> Result<TransvectionWord> {
        let shape = parts
            .first()
            .map(|w| w.shape.clone())
            .ok_or(Error::InvalidInput {
                what: "word concat",
                detail: "no parts".into(),
            })?;
        let mut factors = Vec::new();
        for w in parts {
            if w.shape != shape {
                return Err(Error::ShapeMismatch);
            }
            factors.extend(w.factors.iter().cloned());
        }
        Ok(TransvectionWord { shape, factors })
    }

    pub fn to_isometry(&self) -> Isometry {
        let images: Vec<GroupElement> = (0..self.shape.rank())
            .map(|c| self.apply(&self.shape.generator(c)))
            .collect();
        Isometry::from_images(&self.shape, &images)
            .expect("a product of transvections is an isometry")
    }

    /// Peephole cleanup: merges adjacent factors with equal base via
    /// `s_{b,k} s_{b,j} = s_{b,k+j}` and drops trivial multipliers.
    pub fn simplify(&self) -> TransvectionWord {
        let mut factors: Vec<Transvection> = Vec::with_capacity(self.factors.len());
        for t in &self.factors {
            if let Some(last) = factors.last_mut() {
                if last.base() == t.base() {
                    let m = t.base().order();
                    let k = (last.multiplier + t.multiplier) % m;
                    if k == 0 {
                        factors.pop();
                    } else {
                        last.multiplier = k;
                    }
                    continue;
                }
            }
            if t.multiplier != 0 {
                factors.push(t.clone());
            }
        }
        TransvectionWord {
            shape: self.shape.clone(),
            factors,
        }
    }

    /// Parses `{"word":[{"b":[...],"k":k},...]}` against a known shape.
    pub fn from_json(shape: &Shape, value: &serde_json::Value) -> Result<TransvectionWord> {
        let entries = value
            .get("word")
            .and_then(|w| w.as_array())
            .ok_or(Error::InvalidInput {
                what: "word json",
                detail: "missing \"word\" array".into(),
            })?;
        let mut factors = Vec::with_capacity(entries.len());
        for e in entries {
            let b: Vec<i64> = serde_json::from_value(e.get("b").cloned().unwrap_or_default())
                .map_err(|e| Error::InvalidInput {
                    what: "word json",
                    detail: e.to_string(),
                })?;
            let k = e.get("k").and_then(|k| k.as_i64()).ok_or(Error::InvalidInput {
                what: "word json",
                detail: "missing multiplier".into(),
            })?;
            factors.push(Transvection::new(shape.element(&b)?, k)?);
        }
        TransvectionWord::new(shape, factors)
    }
}

impl Serialize for TransvectionWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            b: &'a GroupElement,
            k: u64,
        }
        struct Word<'a>(&'a [Transvection]);
        impl Serialize for Word<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for t in self.0 {
                    seq.serialize_element(&Entry {
                        b: t.base(),
                        k: t.multiplier(),
                    })?;
                }
                seq.end()
            }
        }
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry("word", &Word(&self.factors))?;
        map.end()
    }
}

/// Backtracking enumeration of `Sp(H)`: generator images must have the
/// generator's order and reproduce all pairings with previously placed
/// images. Visits each isometry exactly once.
fn sp_backtrack(
    shape: &Shape,
    limits: &EnumLimits,
    mut on_solution: impl FnMut(&MaterializedGroup, &[u32]) -> Result<()>,
) -> Result<u64> {
    let mg = MaterializedGroup::new(shape, limits.max_group_order)?;
    let rank = shape.rank();
    let l1 = shape.exponent();
    // Expected pairing exponents between generators.
    let mut target = vec![0u64; rank * rank];
    for c in 0..rank / 2 {
        target[(2 * c) * rank + 2 * c + 1] = l1 / shape.coord_modulus(2 * c);
        target[(2 * c + 1) * rank + 2 * c] =
            (l1 - l1 / shape.coord_modulus(2 * c)) % l1;
    }
    // Candidates per position: elements of exactly the generator's order.
    let candidates: Vec<Vec<u32>> = (0..rank)
        .map(|c| {
            let want = shape.coord_modulus(c);
            (0..mg.len() as u32)
                .filter(|&i| mg.order_at(i as usize) == want)
                .collect()
        })
        .collect();

    let mut chosen: Vec<u32> = Vec::with_capacity(rank);
    let mut count = 0u64;

    fn recurse(
        mg: &MaterializedGroup,
        target: &[u64],
        candidates: &[Vec<u32>],
        chosen: &mut Vec<u32>,
        count: &mut u64,
        limits: &EnumLimits,
        on_solution: &mut impl FnMut(&MaterializedGroup, &[u32]) -> Result<()>,
    ) -> Result<()> {
        let rank = candidates.len();
        let level = chosen.len();
        if level == rank {
            *count += 1;
            if *count > limits.max_set_size {
                return Err(Error::BoundExceeded {
                    needed: *count as u128,
                    bound: limits.max_set_size,
                });
            }
            return on_solution(mg, chosen);
        }
        'next: for &cand in &candidates[level] {
            for (j, &prev) in chosen.iter().enumerate() {
                let got = pair_coords(
                    mg.shape(),
                    mg.coords_at(prev as usize),
                    mg.coords_at(cand as usize),
                );
                if got != target[j * rank + level] {
                    continue 'next;
                }
            }
            chosen.push(cand);
            recurse(mg, target, candidates, chosen, count, limits, on_solution)?;
            chosen.pop();
        }
        Ok(())
    }

    recurse(
        &mg,
        &target,
        &candidates,
        &mut chosen,
        &mut count,
        limits,
        &mut on_solution,
    )?;
    Ok(count)
}

/// Number of isometries of the shaped group.
pub fn sp_order(shape: &Shape, limits: &EnumLimits) -> Result<u64> {
    sp_backtrack(shape, limits, |_, _| Ok(()))
}

/// The full isometry group as validated matrices.
pub fn sp_enumerate(shape: &Shape, limits: &EnumLimits) -> Result<Vec<Isometry>> {
    let mut out = Vec::new();
    sp_backtrack(shape, limits, |mg, images| {
        let imgs: Vec<GroupElement> = images.iter().map(|&i| mg.element(i as usize)).collect();
        out.push(Isometry::from_images(mg.shape(), &imgs)?);
        Ok(())
    })?;
    Ok(out)
}

/// `Sp(H)` as a sorted set of permutation tables (for set comparisons).
pub fn sp_tables(shape: &Shape, limits: &EnumLimits) -> Result<Vec<Vec<u32>>> {
    let mg = MaterializedGroup::new(shape, limits.max_group_order)?;
    let mut out = Vec::new();
    sp_backtrack(shape, limits, |inner, images| {
        let imgs: Vec<GroupElement> = images.iter().map(|&i| inner.element(i as usize)).collect();
        let iso = Isometry::from_images(inner.shape(), &imgs)?;
        out.push(iso.permutation_table(&mg));
        Ok(())
    })?;
    out.sort_unstable();
    Ok(out)
}

/// Permutation tables of the generating transvections `s_b`, `b != 0`.
pub fn transvection_generator_tables(mg: &MaterializedGroup) -> Vec<Vec<u32>> {
    (1..mg.len())
        .map(|i| {
            Transvection::new(mg.element(i), 1)
                .expect("nonzero base")
                .permutation_table(mg)
        })
        .collect()
}

/// Breadth-first closure of the transvections under composition, i.e. the
/// group `Q(H)` they generate, as a sorted set of permutation tables.
pub fn q_closure(shape: &Shape, limits: &EnumLimits) -> Result<Vec<Vec<u32>>> {
    let mg = MaterializedGroup::new(shape, limits.max_group_order)?;
    let gens = transvection_generator_tables(&mg);
    let identity: Vec<u32> = (0..mg.len() as u32).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity);
    while let Some(cur) = queue.pop_front() {
        for g in &gens {
            let next: Vec<u32> = cur.iter().map(|&i| g[i as usize]).collect();
            if seen.contains(&next) {
                continue;
            }
            if seen.len() as u64 >= limits.max_set_size {
                return Err(Error::BoundExceeded {
                    needed: seen.len() as u128 + 1,
                    bound: limits.max_set_size,
                });
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    let mut out: Vec<Vec<u32>> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// Orbit of `a` under a set of isometries, ordered by element index.
pub fn orbit(
    generators: &[Isometry],
    a: &GroupElement,
    limits: &EnumLimits,
) -> Result<Vec<GroupElement>> {
    let shape = a.shape().clone();
    let mg = MaterializedGroup::new(&shape, limits.max_group_order)?;
    let tables: Vec<Vec<u32>> = generators
        .iter()
        .map(|g| {
            if g.shape() != &shape {
                return Err(Error::ShapeMismatch);
            }
            Ok(g.permutation_table(&mg))
        })
        .collect::<Result<_>>()?;
    Ok(orbit_indices(&mg, &tables, mg.index_of(a.coords()))
        .into_iter()
        .map(|i| mg.element(i))
        .collect())
}

/// Orbit of `a` under all transvections, i.e. under `Q(H)`.
pub fn q_orbit(shape: &Shape, a: &GroupElement, limits: &EnumLimits) -> Result<Vec<GroupElement>> {
    if a.shape() != shape {
        return Err(Error::ShapeMismatch);
    }
    let mg = MaterializedGroup::new(shape, limits.max_group_order)?;
    let tables = transvection_generator_tables(&mg);
    Ok(orbit_indices(&mg, &tables, mg.index_of(a.coords()))
        .into_iter()
        .map(|i| mg.element(i))
        .collect())
}

pub(crate) fn orbit_indices(
    mg: &MaterializedGroup,
    tables: &[Vec<u32>],
    start: usize,
) -> Vec<usize> {
    let mut seen = vec![false; mg.len()];
    let mut queue = VecDeque::new();
    seen[start] = true;
    queue.push_back(start);
    while let Some(i) = queue.pop_front() {
        for t in tables {
            let j = t[i] as usize;
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    (0..mg.len()).filter(|&i| seen[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympcore::standard_pair;

    fn shape(moduli: &[u64]) -> Shape {
        Shape::new(moduli).unwrap()
    }

    fn el(s: &Shape, coords: &[i64]) -> GroupElement {
        s.element(coords).unwrap()
    }

    /// Oracle: count 2x2 matrices over Z_n with det = 1 by brute force.
    fn sl2_count_bruteforce(n: u64) -> u64 {
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

    #[test]
    fn validate_examples() {
        let s = shape(&[2]);
        assert!(Isometry::from_matrix(&s, &[vec![1, 0], vec![0, 1]]).is_ok());
        assert!(Isometry::from_matrix(&s, &[vec![1, 1], vec![0, 1]]).is_ok());
        assert!(matches!(
            Isometry::from_matrix(&s, &[vec![1, 0], vec![0, 0]]),
            Err(Error::NotIsometry(_, _))
        ));
        // Ill-formed across moduli: u_2 cannot map onto an order-4 element.
        let s42 = shape(&[4, 2]);
        let mut rows = vec![vec![0i64; 4]; 4];
        for r in 0..4 {
            rows[r][r] = 1;
        }
        rows[0][2] = 1; // e_2 (order 2) picks up an order-4 coordinate
        assert!(matches!(
            Isometry::from_matrix(&s42, &rows),
            Err(Error::IllFormedHom { .. })
        ));
    }

    #[test]
    fn transvection_action_on_standard_pair() {
        for n in [2u64, 3, 4, 6] {
            let s = shape(&[n]);
            let u1 = s.generator(0);
            let v1 = s.generator(1);
            let su = Transvection::new(u1.clone(), 1).unwrap();
            assert_eq!(su.apply(&v1), v1.sub(&u1).unwrap());
            assert_eq!(su.apply(&u1), u1);
            let sv = Transvection::new(v1.clone(), 1).unwrap();
            assert_eq!(sv.apply(&u1), u1.add(&v1).unwrap());
            // s_{b,0} = 1
            let s0 = Transvection::new(u1.clone(), 0).unwrap();
            assert_eq!(s0.apply(&v1), v1);
        }
    }

    #[test]
    fn transvection_matrix_matches_apply() {
        let s = shape(&[4, 2]);
        for b in s.elements(4096).unwrap() {
            if b.is_zero() {
                continue;
            }
            let t = Transvection::new(b, 3).unwrap();
            let iso = t.to_isometry();
            for a in s.elements(4096).unwrap() {
                assert_eq!(iso.apply(&a).unwrap(), t.apply(&a));
            }
        }
    }

    #[test]
    fn compose_and_inverse() {
        let s = shape(&[4]);
        let u1 = s.generator(0);
        let su = Transvection::new(u1.clone(), 1).unwrap();
        let su3 = Transvection::new(u1.clone(), 3).unwrap();
        // s_{b,k} s_{b,j} = s_{b,k+j}; inverse of s_{u1} is s_{u1,3}.
        let prod = su.to_isometry().compose(&su3.to_isometry()).unwrap();
        assert_eq!(prod, Isometry::identity(&s));
        assert_eq!(su.inverse(), su3);
        assert_eq!(
            Isometry::identity(&s).inverse(4096).unwrap(),
            Isometry::identity(&s)
        );
        let inv = su.to_isometry().inverse(4096).unwrap();
        assert_eq!(inv, su3.to_isometry());
    }

    #[test]
    fn transvection_powers_are_cyclic() {
        let s = shape(&[6]);
        let b = el(&s, &[1, 2]);
        let m = b.order();
        let gen = Transvection::new(b.clone(), 1).unwrap().to_isometry();
        let mut acc = Isometry::identity(&s);
        for _ in 0..m {
            acc = gen.compose(&acc).unwrap();
        }
        assert_eq!(acc, Isometry::identity(&s));
        let mut pow = Isometry::identity(&s);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..m {
            seen.insert(format!("{pow:?}"));
            pow = gen.compose(&pow).unwrap();
        }
        assert_eq!(seen.len(), m as usize);
    }

    #[test]
    fn sp_counts_match_sl2_oracle() {
        let limits = EnumLimits::default();
        for n in 2..=6u64 {
            let got = sp_order(&shape(&[n]), &limits).unwrap();
            assert_eq!(got, sl2_count_bruteforce(n), "n = {n}");
        }
        assert_eq!(sp_order(&shape(&[2]), &limits).unwrap(), 6);
        assert_eq!(sp_order(&shape(&[3]), &limits).unwrap(), 24);
    }

    #[test]
    fn sp_of_two_squared_is_720() {
        assert_eq!(
            sp_order(&shape(&[2, 2]), &EnumLimits::default()).unwrap(),
            720
        );
    }

    #[test]
    fn q_closure_equals_sp() {
        let limits = EnumLimits::default();
        for moduli in [&[2u64][..], &[3], &[4], &[2, 2]] {
            let s = shape(moduli);
            let q = q_closure(&s, &limits).unwrap();
            let sp = sp_tables(&s, &limits).unwrap();
            assert_eq!(q, sp, "shape {s}");
        }
    }

    #[test]
    fn orbit_examples() {
        let limits = EnumLimits::default();
        let s = shape(&[4]);
        let orb = q_orbit(&s, &s.generator(0), &limits).unwrap();
        // Oracle: elements of order 4 in Z_4^2 number 16 - 4 = 12.
        let max_order: Vec<GroupElement> = s
            .elements(4096)
            .unwrap()
            .into_iter()
            .filter(|a| a.order() == 4)
            .collect();
        assert_eq!(orb.len(), 12);
        assert_eq!(orb, max_order);

        let zero_orbit = q_orbit(&s, &s.zero(), &limits).unwrap();
        assert_eq!(zero_orbit.len(), 1);

        let s22 = shape(&[2, 2]);
        let orb = q_orbit(&s22, &s22.generator(0), &limits).unwrap();
        assert_eq!(orb.len(), 15);
    }

    #[test]
    fn apply_preserves_pairing() {
        let s = shape(&[6, 2]);
        let b = el(&s, &[1, 2, 1, 0]);
        let iso = Transvection::new(b, 1).unwrap().to_isometry();
        let elements = s.elements(4096).unwrap();
        for a in elements.iter().step_by(7) {
            for c in elements.iter().step_by(5) {
                assert_eq!(
                    pair(&iso.apply(a).unwrap(), &iso.apply(c).unwrap()).unwrap(),
                    pair(a, c).unwrap()
                );
            }
        }
    }

    #[test]
    fn word_roundtrip_and_simplify() {
        let s = shape(&[4, 2]);
        let b1 = el(&s, &[1, 0, 1, 0]);
        let b2 = el(&s, &[0, 1, 0, 1]);
        let w = TransvectionWord::new(
            &s,
            vec![
                Transvection::new(b1.clone(), 1).unwrap(),
                Transvection::new(b1.clone(), 3).unwrap(),
                Transvection::new(b2.clone(), 2).unwrap(),
            ],
        )
        .unwrap();
        let winv = w.inverse();
        let id = TransvectionWord::concat(&[&w, &winv]).unwrap();
        assert_eq!(id.to_isometry(), Isometry::identity(&s));
        // b1 has order 4: k=1 then k=3 cancel.
        let simpl = w.simplify();
        assert_eq!(simpl.len(), 1);
        assert_eq!(simpl.to_isometry(), w.to_isometry());
    }

    #[test]
    fn word_json_roundtrip() {
        let s = shape(&[4, 2]);
        let w = TransvectionWord::new(
            &s,
            vec![Transvection::new(el(&s, &[1, 2, 0, 1]), 3).unwrap()],
        )
        .unwrap();
        let v = serde_json::to_value(&w).unwrap();
        assert_eq!(v["word"][0]["b"], serde_json::json!([1, 2, 0, 1]));
        let back = TransvectionWord::from_json(&s, &v).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn isometry_json_roundtrip() {
        let s = shape(&[2, 2]);
        let iso = Transvection::new(el(&s, &[1, 1, 1, 0]), 1)
            .unwrap()
            .to_isometry();
        let v = serde_json::to_value(&iso).unwrap();
        let back = Isometry::from_json(&v).unwrap();
        assert_eq!(back, iso);
        // A matrix that kills u_1 is rejected.
        let mut bad = v.clone();
        for r in 0..4 {
            bad["matrix"][r][0] = serde_json::json!(0);
        }
        assert!(Isometry::from_json(&bad).is_err());
    }

    #[test]
    fn hyperbolic_pair_transitivity_small() {
        // Any two standard-order pairs lie in one orbit; spot-check [2,2]
        // by mapping (u1,v1) onto (u2,v2) with an enumerated isometry.
        let s = shape(&[2, 2]);
        let all = sp_enumerate(&s, &EnumLimits::default()).unwrap();
        let p = standard_pair(&s, 0);
        let q = standard_pair(&s, 1);
        assert!(all.iter().any(|m| {
            m.apply(p.first()).unwrap() == *q.first() && m.apply(p.second()).unwrap() == *q.second()
        }));
    }
}
