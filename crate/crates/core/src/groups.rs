//! A uniform interface over the finite groups the law checker works with.
//!
//! Elements are canonical `u32` encodings ([`Elem`]) of a fixed length per
//! group. Equality of elements is equality of encodings, and enumeration
//! always returns encodings in increasing lexicographic order, so any search
//! that walks the enumeration in order is deterministic.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Canonical encoding of a group element.
pub type Elem = Vec<u32>;

/// Shared, type-erased group handle.
pub type GroupRef = Arc<dyn FiniteGroup>;

/// Default cap on the number of elements materialized by enumeration.
pub const ENUMERATION_LIMIT: usize = 100_000;

pub trait FiniteGroup: Send + Sync + fmt::Debug {
    /// Descriptor-style name, e.g. `cyclic:4`.
    fn name(&self) -> String;

    /// Length of every element encoding.
    fn encoding_len(&self) -> usize;

    fn identity(&self) -> Elem;

    fn multiply(&self, a: &Elem, b: &Elem) -> Elem;

    fn invert(&self, a: &Elem) -> Elem;

    fn order(&self) -> BigUint;

    fn generators(&self) -> Vec<Elem>;

    fn random_element(&self, rng: &mut dyn RngCore) -> Elem;

    /// Whether `a` is a valid encoding of an element.
    fn contains(&self, a: &Elem) -> bool;

    /// All elements, sorted, or a budget error if the order exceeds `limit`.
    ///
    /// The default closes the generating set under right multiplication.
    fn elements(&self, limit: usize) -> Result<Vec<Elem>> {
        check_enumerable(self, limit)?;
        let mut seen: HashSet<Elem> = HashSet::new();
        let mut queue = VecDeque::new();
        let e = self.identity();
        seen.insert(e.clone());
        queue.push_back(e);
        let gens = self.generators();
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = self.multiply(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<Elem> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    fn is_identity(&self, a: &Elem) -> bool {
        *a == self.identity()
    }

    /// `a^k` by square-and-multiply; negative `k` inverts first.
    fn power(&self, a: &Elem, k: i64) -> Elem {
        let mut base = if k < 0 { self.invert(a) } else { a.clone() };
        let mut exp = k.unsigned_abs();
        let mut acc = self.identity();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    /// Order of the element `a`.
    fn element_order(&self, a: &Elem) -> u64 {
        let e = self.identity();
        let mut x = a.clone();
        let mut n = 1;
        while x != e {
            x = self.multiply(&x, a);
            n += 1;
        }
        n
    }

    fn conjugate(&self, a: &Elem, by: &Elem) -> Elem {
        self.multiply(&self.multiply(&self.invert(by), a), by)
    }
}

pub(crate) fn check_enumerable<G: FiniteGroup + ?Sized>(g: &G, limit: usize) -> Result<usize> {
    g.order()
        .to_usize()
        .filter(|&n| n <= limit)
        .ok_or_else(|| Error::Budget(format!("{} has order {} > enumeration limit {limit}", g.name(), g.order())))
}

/// The cyclic group Z_n, written additively on residues.
#[derive(Clone, Debug)]
pub struct Cyclic {
    n: u32,
}

impl Cyclic {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("cyclic group of order 0".into()));
        }
        Ok(Cyclic { n })
    }

    pub fn trivial() -> Self {
        Cyclic { n: 1 }
    }
}

impl FiniteGroup for Cyclic {
    fn name(&self) -> String {
        format!("cyclic:{}", self.n)
    }

    fn encoding_len(&self) -> usize {
        1
    }

    fn identity(&self) -> Elem {
        vec![0]
    }

    fn multiply(&self, a: &Elem, b: &Elem) -> Elem {
        vec![((a[0] as u64 + b[0] as u64) % self.n as u64) as u32]
    }

    fn invert(&self, a: &Elem) -> Elem {
        vec![(self.n - a[0]) % self.n]
    }

    fn order(&self) -> BigUint {
        BigUint::from(self.n)
    }

    fn generators(&self) -> Vec<Elem> {
        if self.n == 1 {
            vec![]
        } else {
            vec![vec![1]]
        }
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Elem {
        vec![rng.gen_range(0..self.n)]
    }

    fn contains(&self, a: &Elem) -> bool {
        a.len() == 1 && a[0] < self.n
    }

    fn elements(&self, limit: usize) -> Result<Vec<Elem>> {
        check_enumerable(self, limit)?;
        Ok((0..self.n).map(|k| vec![k]).collect())
    }
}

/// The symmetric group on `{0, …, k-1}`. An element is its image list; the
/// product `a·b` applies `a` first, then `b`.
#[derive(Clone, Debug)]
pub struct Symmetric {
    degree: usize,
}

impl Symmetric {
    pub fn new(degree: usize) -> Result<Self> {
        if !(1..=8).contains(&degree) {
            return Err(Error::InvalidParams(format!("symmetric group degree {degree} outside 1..=8")));
        }
        Ok(Symmetric { degree })
    }
}

impl FiniteGroup for Symmetric {
    fn name(&self) -> String {
        format!("sym:{}", self.degree)
    }

    fn encoding_len(&self) -> usize {
        self.degree
    }

    fn identity(&self) -> Elem {
        (0..self.degree as u32).collect()
    }

    fn multiply(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().map(|&i| b[i as usize]).collect()
    }

    fn invert(&self, a: &Elem) -> Elem {
        let mut out = vec![0; a.len()];
        for (i, &j) in a.iter().enumerate() {
            out[j as usize] = i as u32;
        }
        out
    }

    fn order(&self) -> BigUint {
        (1..=self.degree as u32).map(BigUint::from).product()
    }

    fn generators(&self) -> Vec<Elem> {
        if self.degree < 2 {
            return vec![];
        }
        let mut swap = self.identity();
        swap.swap(0, 1);
        let cycle: Elem = (0..self.degree as u32).map(|i| (i + 1) % self.degree as u32).collect();
        if self.degree == 2 {
            vec![swap]
        } else {
            vec![swap, cycle]
        }
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Elem {
        let mut v = self.identity();
        for i in (1..v.len()).rev() {
            let j = rng.gen_range(0..=i);
            v.swap(i, j);
        }
        v
    }

    fn contains(&self, a: &Elem) -> bool {
        let mut seen = vec![false; self.degree];
        a.len() == self.degree
            && a.iter().all(|&i| (i as usize) < self.degree && !std::mem::replace(&mut seen[i as usize], true))
    }
}

/// The quaternion group Q_8. Encoding `[4·s + u]` stands for `(-1)^s · u`
/// with `u` one of `1, i, j, k`.
#[derive(Clone, Debug, Default)]
pub struct Quaternion;

impl Quaternion {
    // (sign, unit) of unit_a · unit_b
    const TABLE: [[(u32, u32); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
}

impl FiniteGroup for Quaternion {
    fn name(&self) -> String {
        "q8".into()
    }

    fn encoding_len(&self) -> usize {
        1
    }

    fn identity(&self) -> Elem {
        vec![0]
    }

    fn multiply(&self, a: &Elem, b: &Elem) -> Elem {
        let (sa, ua) = (a[0] / 4, a[0] % 4);
        let (sb, ub) = (b[0] / 4, b[0] % 4);
        let (s, u) = Self::TABLE[ua as usize][ub as usize];
        vec![((sa + sb + s) % 2) * 4 + u]
    }

    fn invert(&self, a: &Elem) -> Elem {
        let (s, u) = (a[0] / 4, a[0] % 4);
        if u == 0 {
            a.clone()
        } else {
            vec![((s + 1) % 2) * 4 + u]
        }
    }

    fn order(&self) -> BigUint {
        BigUint::from(8u32)
    }

    fn generators(&self) -> Vec<Elem> {
        vec![vec![1], vec![2]]
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Elem {
        vec![rng.gen_range(0..8)]
    }

    fn contains(&self, a: &Elem) -> bool {
        a.len() == 1 && a[0] < 8
    }
}

/// `G × H`, encoded as the concatenation of the factor encodings.
#[derive(Clone, Debug)]
pub struct DirectProduct {
    left: GroupRef,
    right: GroupRef,
}

impl DirectProduct {
    pub fn new(left: GroupRef, right: GroupRef) -> Self {
        DirectProduct { left, right }
    }

    fn split(&self, a: &Elem) -> (Elem, Elem) {
        let (l, r) = a.split_at(self.left.encoding_len());
        (l.to_vec(), r.to_vec())
    }

    fn join(mut l: Elem, r: Elem) -> Elem {
        l.extend(r);
        l
    }
}

impl FiniteGroup for DirectProduct {
    fn name(&self) -> String {
        format!("product:{}x{}", self.left.name(), self.right.name())
    }

    fn encoding_len(&self) -> usize {
        self.left.encoding_len() + self.right.encoding_len()
    }

    fn identity(&self) -> Elem {
        Self::join(self.left.identity(), self.right.identity())
    }

    fn multiply(&self, a: &Elem, b: &Elem) -> Elem {
        let ((al, ar), (bl, br)) = (self.split(a), self.split(b));
        Self::join(self.left.multiply(&al, &bl), self.right.multiply(&ar, &br))
    }

    fn invert(&self, a: &Elem) -> Elem {
        let (l, r) = self.split(a);
        Self::join(self.left.invert(&l), self.right.invert(&r))
    }

    fn order(&self) -> BigUint {
        self.left.order() * self.right.order()
    }

    fn generators(&self) -> Vec<Elem> {
        let (el, er) = (self.left.identity(), self.right.identity());
        let mut gens: Vec<Elem> = self.left.generators().into_iter().map(|g| Self::join(g, er.clone())).collect();
        gens.extend(self.right.generators().into_iter().map(|h| Self::join(el.clone(), h)));
        gens
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Elem {
        let l = self.left.random_element(rng);
        Self::join(l, self.right.random_element(rng))
    }

    fn contains(&self, a: &Elem) -> bool {
        if a.len() != self.encoding_len() {
            return false;
        }
        let (l, r) = self.split(a);
        self.left.contains(&l) && self.right.contains(&r)
    }

    fn elements(&self, limit: usize) -> Result<Vec<Elem>> {
        check_enumerable(self, limit)?;
        let ls = self.left.elements(limit)?;
        let rs = self.right.elements(limit)?;
        Ok(ls.iter().flat_map(|l| rs.iter().map(move |r| Self::join(l.clone(), r.clone()))).collect())
    }
}

/// Checks the group axioms on an enumerable group: closure, associativity,
/// identity and inverses, over all elements (associativity over all triples
/// when `|G|^3` is small, else over the first 20 elements).
pub fn verify_axioms(g: &dyn FiniteGroup) -> Result<bool> {
    let els = g.elements(ENUMERATION_LIMIT)?;
    let set: HashSet<&Elem> = els.iter().collect();
    let e = g.identity();
    for a in &els {
        if g.multiply(a, &e) != *a || g.multiply(&e, a) != *a || g.multiply(a, &g.invert(a)) != e {
            return Ok(false);
        }
        if !g.contains(a) {
            return Ok(false);
        }
    }
    let sample: &[Elem] = if els.len() <= 64 { &els } else { &els[..20] };
    for a in sample {
        for b in sample {
            let ab = g.multiply(a, b);
            if !set.contains(&ab) {
                return Ok(false);
            }
            for c in sample {
                if g.multiply(&ab, c) != g.multiply(a, &g.multiply(b, c)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Order of a group as a `u64`, when it fits.
pub fn order_u64(g: &dyn FiniteGroup) -> Option<u64> {
    g.order().to_u64()
}

/// `true` when `|G|^k` does not exceed `budget`.
pub fn power_within(g: &dyn FiniteGroup, k: u32, budget: u64) -> bool {
    let n = g.order();
    let mut acc = BigUint::one();
    for _ in 0..k {
        acc *= &n;
    }
    acc <= BigUint::from(budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn small_groups_satisfy_axioms() {
        let groups: Vec<GroupRef> = vec![
            Arc::new(Cyclic::new(1).unwrap()),
            Arc::new(Cyclic::new(8).unwrap()),
            Arc::new(Symmetric::new(3).unwrap()),
            Arc::new(Symmetric::new(4).unwrap()),
            Arc::new(Quaternion),
            Arc::new(DirectProduct::new(Arc::new(Cyclic::new(2).unwrap()), Arc::new(Symmetric::new(3).unwrap()))),
        ];
        for g in groups {
            assert!(verify_axioms(g.as_ref()).unwrap(), "{}", g.name());
            let els = g.elements(ENUMERATION_LIMIT).unwrap();
            assert_eq!(BigUint::from(els.len()), g.order(), "{}", g.name());
            assert!(els.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn quaternion_relations() {
        let q = Quaternion;
        let (i, j, k, minus_one) = (vec![1], vec![2], vec![3], vec![4]);
        assert_eq!(q.multiply(&i, &j), k);
        assert_eq!(q.multiply(&j, &i), vec![7]);
        assert_eq!(q.multiply(&i, &i), minus_one);
        assert_eq!(q.element_order(&i), 4);
        assert_eq!(q.element_order(&minus_one), 2);
    }

    #[test]
    fn symmetric_basics() {
        let s = Symmetric::new(3).unwrap();
        assert_eq!(s.order(), BigUint::from(6u32));
        assert_eq!(s.element_order(&vec![0, 2, 1]), 2);
        assert_eq!(s.element_order(&vec![1, 2, 0]), 3);
        assert!(s.contains(&vec![2, 0, 1]));
        assert!(!s.contains(&vec![0, 0, 1]));
        let mut rng = seeded(1);
        for _ in 0..20 {
            assert!(s.contains(&s.random_element(&mut rng)));
        }
        assert!(Symmetric::new(9).is_err());
    }

    #[test]
    fn power_matches_repeated_product() {
        let s = Symmetric::new(4).unwrap();
        let mut rng = seeded(2);
        for _ in 0..20 {
            let a = s.random_element(&mut rng);
            let mut x = s.identity();
            for k in 0..7 {
                assert_eq!(s.power(&a, k), x);
                x = s.multiply(&x, &a);
            }
            assert_eq!(s.multiply(&s.power(&a, -3), &s.power(&a, 3)), s.identity());
        }
    }

    #[test]
    fn enumeration_budget() {
        let s = Symmetric::new(8).unwrap();
        assert!(matches!(s.elements(1000), Err(Error::Budget(_))));
        assert!(power_within(&Cyclic::new(10).unwrap(), 3, 1000));
        assert!(!power_within(&Cyclic::new(10).unwrap(), 4, 1000));
    }
}
