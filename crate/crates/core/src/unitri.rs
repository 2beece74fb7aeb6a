//! The groups UT(ℓ, p, m): ℓ×ℓ upper unitriangular matrices whose `(i, j)`
//! entry is a `(j - i)`-linear form on copies of `F_p^m`.
//!
//! Entry products are tensor concatenations, so the `(i, k)` entry of a
//! product is `a_ik + b_ik + Σ_{i<j<k} a_ij ⊗ b_jk`. When `ℓ = p + 1` the p-th
//! power of any matrix is the identity apart from the corner `(1, p+1)`,
//! which is the concatenation of the superdiagonal entries.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, RngCore};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{tensor_len, MultilinearForm, Vector};
use crate::gf::{is_prime, neg_mod};
use crate::groups::{check_enumerable, Elem, FiniteGroup};
use crate::rng::seeded;
use crate::FORMAT_VERSION;

/// Largest group order for which verification walks every element.
pub const EXHAUSTIVE_ORDER_LIMIT: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UtParams {
    pub p: u32,
    /// Matrix size ℓ.
    pub l: usize,
    /// Dimension m of every V_i.
    pub m: usize,
}

impl UtParams {
    pub fn new(p: u32, l: usize, m: usize) -> Result<Self> {
        if p == 2 || !is_prime(p as u64) {
            return Err(Error::InvalidParams(format!("p = {p} must be an odd prime")));
        }
        if l < 2 {
            return Err(Error::InvalidParams(format!("size {l} must be at least 2")));
        }
        if m < 1 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        tensor_len(m, l - 1)?;
        Ok(UtParams { p, l, m })
    }

    /// UT(p+1, p, m).
    pub fn lemma(p: u32, m: usize) -> Result<Self> {
        Self::new(p, p as usize + 1, m)
    }

    pub fn is_corner_case(&self) -> bool {
        self.l == self.p as usize + 1
    }

    fn require_corner_case(&self) -> Result<()> {
        if !self.is_corner_case() {
            return Err(Error::Hypothesis(format!(
                "the p-th power formula needs size p+1 = {}, got {}",
                self.p + 1,
                self.l
            )));
        }
        Ok(())
    }

    /// Number of strictly upper entries, `ℓ(ℓ-1)/2`.
    pub fn entry_count(&self) -> usize {
        self.l * (self.l - 1) / 2
    }

    /// Position of entry `(i, j)` (1-based, `i < j`) in ascending order.
    pub fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i < j && j <= self.l);
        (1..i).map(|r| self.l - r).sum::<usize>() + (j - i - 1)
    }

    /// Entry positions `(i, j)` in ascending order.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.l).flat_map(move |i| (i + 1..=self.l).map(move |j| (i, j)))
    }

    /// Total number of F_p coefficients, `Σ_t (ℓ - t)·m^t`.
    pub fn coefficient_count(&self) -> usize {
        self.positions().map(|(i, j)| self.m.pow((j - i) as u32)).sum()
    }
}

/// |UT(ℓ, p, m)| = p^(Σ_{t=1}^{ℓ-1} (ℓ - t)·m^t).
pub fn group_order(params: &UtParams) -> BigUint {
    let exponent: BigUint =
        (1..params.l).map(|t| BigUint::from(params.l - t) * BigUint::from(params.m).pow(t as u32)).sum();
    let exp = exponent.to_u32().expect("exponent bounded by the coefficient count");
    BigUint::from(params.p).pow(exp)
}

/// Dimension over F_p of the subgroup of p-th powers, `m^p`.
pub fn corner_dimension(params: &UtParams) -> Result<BigUint> {
    params.require_corner_case()?;
    Ok(BigUint::from(params.m).pow(params.p))
}

/// Order `p^(m^p)` of the subgroup generated by p-th powers.
pub fn pth_power_subgroup_order(params: &UtParams) -> Result<BigUint> {
    let dim = corner_dimension(params)?
        .to_u32()
        .ok_or_else(|| Error::Overflow(format!("dimension m^p for m = {}", params.m)))?;
    Ok(BigUint::from(params.p).pow(dim))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitriMatrix {
    params: UtParams,
    /// Strictly upper entries in ascending `(i, j)` order.
    entries: Vec<MultilinearForm>,
}

impl fmt::Debug for UnitriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for ((i, j), e) in self.params.positions().zip(&self.entries) {
            m.entry(&format_args!("{i},{j}"), &e.coeffs());
        }
        m.finish()
    }
}

fn nil_product(params: &UtParams, a: &[MultilinearForm], b: &[MultilinearForm]) -> Vec<MultilinearForm> {
    let mut out = Vec::with_capacity(params.entry_count());
    for (i, k) in params.positions() {
        let mut c = MultilinearForm::zero_unchecked(params.p, k - i, params.m);
        for j in i + 1..k {
            c.add_concat_assign(&a[params.slot(i, j)], &b[params.slot(j, k)]);
        }
        out.push(c);
    }
    out
}

impl UnitriMatrix {
    pub fn identity(params: UtParams) -> Self {
        let entries =
            params.positions().map(|(i, j)| MultilinearForm::zero_unchecked(params.p, j - i, params.m)).collect();
        UnitriMatrix { params, entries }
    }

    /// Builds a matrix from its strictly upper entries in ascending order.
    pub fn from_entries(params: UtParams, entries: Vec<MultilinearForm>) -> Result<Self> {
        if entries.len() != params.entry_count() {
            return Err(Error::Shape(format!("{} entries for size {}", entries.len(), params.l)));
        }
        for ((i, j), e) in params.positions().zip(&entries) {
            if e.modulus() != params.p {
                return Err(Error::ModulusMismatch(params.p, e.modulus()));
            }
            if e.arity() != j - i || e.dim() != params.m {
                return Err(Error::Shape(format!(
                    "entry ({i},{j}) must be {}-linear on dim {}, got arity {} dim {}",
                    j - i,
                    params.m,
                    e.arity(),
                    e.dim()
                )));
            }
        }
        Ok(UnitriMatrix { params, entries })
    }

    /// Identity except for entry `(1, ℓ)`.
    pub fn from_corner(params: UtParams, corner: MultilinearForm) -> Result<Self> {
        let mut entries = Self::identity(params).entries;
        entries[params.slot(1, params.l)] = corner;
        Self::from_entries(params, entries)
    }

    /// Every coefficient drawn uniformly from F_p.
    pub fn random<R: Rng + ?Sized>(params: UtParams, rng: &mut R) -> Self {
        let entries =
            params.positions().map(|(i, j)| MultilinearForm::random(params.p, j - i, params.m, rng)).collect();
        UnitriMatrix { params, entries }
    }

    /// Identity plus the linear form `e_k` at superdiagonal position `(i, i+1)`.
    pub fn elementary(params: UtParams, i: usize, k: usize) -> Self {
        let mut a = Self::identity(params);
        a.entries[params.slot(i, i + 1)] = MultilinearForm::linear(&Vector::basis(params.p, params.m, k));
        a
    }

    pub fn params(&self) -> UtParams {
        self.params
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&MultilinearForm> {
        if 1 <= i && i < j && j <= self.params.l {
            Some(&self.entries[self.params.slot(i, j)])
        } else {
            None
        }
    }

    pub fn entries(&self) -> &[MultilinearForm] {
        &self.entries
    }

    /// Entry `(1, ℓ)`.
    pub fn corner(&self) -> &MultilinearForm {
        &self.entries[self.params.slot(1, self.params.l)]
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(MultilinearForm::is_zero)
    }

    /// Zero everywhere except possibly the corner.
    pub fn is_corner_only(&self) -> bool {
        let corner = self.params.slot(1, self.params.l);
        self.entries.iter().enumerate().all(|(k, e)| k == corner || e.is_zero())
    }

    fn check_params(&self, other: &Self) -> Result<()> {
        if self.params != other.params {
            return Err(Error::Shape(format!("UT{:?} vs UT{:?}", self.params, other.params)));
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_params(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut entries = nil_product(&self.params, &self.entries, &other.entries);
        for ((c, a), b) in entries.iter_mut().zip(&self.entries).zip(&other.entries) {
            c.add_assign_unchecked(a);
            c.add_assign_unchecked(b);
        }
        UnitriMatrix { params: self.params, entries }
    }

    /// `(I + N)^{-1} = I - N + N² - … ± N^{ℓ-1}`.
    pub fn inverse(&self) -> Self {
        let params = self.params;
        let mut acc = Self::identity(params).entries;
        let mut term = self.entries.clone();
        for k in 1..params.l {
            for (a, t) in acc.iter_mut().zip(&term) {
                if k % 2 == 1 {
                    a.sub_assign_unchecked(t);
                } else {
                    a.add_assign_unchecked(t);
                }
            }
            if k + 1 < params.l {
                term = nil_product(&params, &term, &self.entries);
            }
        }
        UnitriMatrix { params, entries: acc }
    }

    /// `self^k` by square-and-multiply.
    pub fn power(&self, mut k: u64) -> Self {
        let mut acc = Self::identity(self.params);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `self^p` in UT(p+1, p, m): the identity with corner
    /// `a_12 ⊗ a_23 ⊗ … ⊗ a_{p,p+1}`.
    pub fn pth_power_fast(&self) -> Result<Self> {
        self.params.require_corner_case()?;
        let corner = self.superdiagonal_product();
        let mut out = Self::identity(self.params);
        out.entries[self.params.slot(1, self.params.l)] = corner;
        Ok(out)
    }

    /// Concatenation of the superdiagonal entries.
    pub fn superdiagonal_product(&self) -> MultilinearForm {
        let l = self.params.l;
        let first = self.entries[self.params.slot(1, 2)].clone();
        (2..l).fold(first, |acc, i| {
            acc.tensor_concat(&self.entries[self.params.slot(i, i + 1)]).expect("entries share modulus and dimension")
        })
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.params == other.params && self.mul_unchecked(other) == other.mul_unchecked(self)
    }

    /// Flat coefficient encoding used by [`UnitriGroup`].
    pub fn to_elem(&self) -> Elem {
        self.entries.iter().flat_map(|e| e.coeffs().iter().copied()).collect()
    }

    pub fn from_elem(params: UtParams, elem: &[u32]) -> Result<Self> {
        if elem.len() != params.coefficient_count() {
            return Err(Error::Shape(format!(
                "{} coefficients for UT({}, {}, {})",
                elem.len(),
                params.l,
                params.p,
                params.m
            )));
        }
        let mut rest = elem;
        let mut entries = Vec::with_capacity(params.entry_count());
        for (i, j) in params.positions() {
            let n = params.m.pow((j - i) as u32);
            let (head, tail) = rest.split_at(n);
            entries.push(MultilinearForm::new(params.p, j - i, params.m, head.to_vec())?);
            rest = tail;
        }
        Ok(UnitriMatrix { params, entries })
    }

    fn from_elem_unchecked(params: UtParams, elem: &[u32]) -> Self {
        let mut rest = elem;
        let entries = params
            .positions()
            .map(|(i, j)| {
                let n = params.m.pow((j - i) as u32);
                let (head, tail) = rest.split_at(n);
                rest = tail;
                MultilinearForm::from_raw(params.p, j - i, params.m, head.to_vec())
            })
            .collect();
        UnitriMatrix { params, entries }
    }
}

impl Serialize for UnitriMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Entries<'a>(&'a UnitriMatrix);
        impl Serialize for Entries<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                let m = self.0;
                let mut map = serializer.serialize_map(Some(m.entries.len()))?;
                for ((i, j), e) in m.params.positions().zip(&m.entries) {
                    map.serialize_entry(&format!("{i},{j}"), e.coeffs())?;
                }
                map.end()
            }
        }
        let mut s = serializer.serialize_struct("UnitriMatrix", 5)?;
        s.serialize_field("version", &FORMAT_VERSION)?;
        s.serialize_field("p", &self.params.p)?;
        s.serialize_field("l", &self.params.l)?;
        s.serialize_field("m", &self.params.m)?;
        s.serialize_field("entries", &Entries(self))?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for UnitriMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            version: u32,
            p: u32,
            l: usize,
            m: usize,
            entries: std::collections::HashMap<String, Vec<u32>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.version != FORMAT_VERSION {
            return Err(de::Error::custom(format!("unsupported matrix version {}", raw.version)));
        }
        let params = UtParams::new(raw.p, raw.l, raw.m).map_err(de::Error::custom)?;
        let mut entries = Vec::with_capacity(params.entry_count());
        for (i, j) in params.positions() {
            let key = format!("{i},{j}");
            let coeffs = raw.entries.get(&key).ok_or_else(|| de::Error::custom(format!("missing entry {key}")))?;
            entries.push(MultilinearForm::new(params.p, j - i, params.m, coeffs.clone()).map_err(de::Error::custom)?);
        }
        if raw.entries.len() != params.entry_count() {
            return Err(de::Error::custom("unexpected entry keys"));
        }
        Ok(UnitriMatrix { params, entries })
    }
}

/// UT(ℓ, p, m) as a [`FiniteGroup`]; elements are flat coefficient arrays.
#[derive(Clone, Debug)]
pub struct UnitriGroup {
    params: UtParams,
}

impl UnitriGroup {
    pub fn new(params: UtParams) -> Self {
        UnitriGroup { params }
    }

    pub fn params(&self) -> UtParams {
        self.params
    }

    pub fn matrix(&self, a: &Elem) -> UnitriMatrix {
        UnitriMatrix::from_elem_unchecked(self.params, a)
    }
}

impl FiniteGroup for UnitriGroup {
    fn name(&self) -> String {
        format!("ut:{}:{}:{}", self.params.p, self.params.l, self.params.m)
    }

    fn encoding_len(&self) -> usize {
        self.params.coefficient_count()
    }

    fn identity(&self) -> Elem {
        vec![0; self.params.coefficient_count()]
    }

    fn multiply(&self, a: &Elem, b: &Elem) -> Elem {
        self.matrix(a).mul_unchecked(&self.matrix(b)).to_elem()
    }

    fn invert(&self, a: &Elem) -> Elem {
        self.matrix(a).inverse().to_elem()
    }

    fn power(&self, a: &Elem, k: i64) -> Elem {
        let m = self.matrix(a);
        let base = if k < 0 { m.inverse() } else { m };
        base.power(k.unsigned_abs()).to_elem()
    }

    fn order(&self) -> BigUint {
        group_order(&self.params)
    }

    fn generators(&self) -> Vec<Elem> {
        (1..self.params.l)
            .flat_map(|i| (0..self.params.m).map(move |k| (i, k)))
            .map(|(i, k)| UnitriMatrix::elementary(self.params, i, k).to_elem())
            .collect()
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Elem {
        UnitriMatrix::random(self.params, rng).to_elem()
    }

    fn contains(&self, a: &Elem) -> bool {
        a.len() == self.params.coefficient_count() && a.iter().all(|&c| c < self.params.p)
    }

    /// Odometer over all coefficient arrays, already in lexicographic order.
    fn elements(&self, limit: usize) -> Result<Vec<Elem>> {
        let n = check_enumerable(self, limit)?;
        let p = self.params.p;
        let mut cur = self.identity();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(cur.clone());
            for c in cur.iter_mut().rev() {
                *c += 1;
                if *c < p {
                    break;
                }
                *c = 0;
            }
        }
        Ok(out)
    }
}

/// Whether `c` commutes with every element: exhaustively when the group has
/// at most [`EXHAUSTIVE_ORDER_LIMIT`] elements, otherwise against the
/// superdiagonal generators (which generate the group) plus `trials` seeded
/// random matrices.
pub fn is_central(c: &UnitriMatrix, trials: usize, seed: u64) -> bool {
    let group = UnitriGroup::new(c.params());
    if group.order() <= BigUint::from(EXHAUSTIVE_ORDER_LIMIT) {
        let elems = group.elements(EXHAUSTIVE_ORDER_LIMIT as usize).expect("order checked");
        return elems.iter().all(|x| c.commutes_with(&group.matrix(x)));
    }
    let generators_ok = group.generators().iter().all(|g| c.commutes_with(&group.matrix(g)));
    let mut rng = seeded(seed);
    generators_ok && (0..trials).all(|_| c.commutes_with(&UnitriMatrix::random(c.params(), &mut rng)))
}

/// Outcome of checking that p-th powers in UT(p+1, p, m) are central of
/// exponent p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerbalSubgroupReport {
    pub params: UtParams,
    /// `"exhaustive"` or `"randomized"`.
    pub mode: String,
    pub seed: u64,
    pub samples: u64,
    pub fast_power_agrees: bool,
    pub all_central: bool,
    pub all_exponent_p: bool,
    pub nontrivial_found: bool,
    /// Distinct p-th powers seen (exhaustive mode only).
    pub distinct_powers: Option<u64>,
    /// Order of the subgroup generated by the p-th powers (exhaustive mode only).
    pub verbal_order: Option<String>,
    pub counterexample: Option<UnitriMatrix>,
}

impl VerbalSubgroupReport {
    pub fn verified(&self) -> bool {
        self.fast_power_agrees && self.all_central && self.all_exponent_p && self.nontrivial_found
    }
}

/// Samples `trials` matrices `A`, forms `C = A^p` by the corner formula, and
/// checks that `C` agrees with repeated multiplication, is central and has
/// `C^p = I`; at least one `C` must be nontrivial.
pub fn verify_verbal_subgroup(params: UtParams, trials: usize, seed: u64) -> Result<VerbalSubgroupReport> {
    params.require_corner_case()?;
    let mut rng = seeded(seed);
    let mut report = VerbalSubgroupReport {
        params,
        mode: "randomized".into(),
        seed,
        samples: trials as u64,
        fast_power_agrees: true,
        all_central: true,
        all_exponent_p: true,
        nontrivial_found: false,
        distinct_powers: None,
        verbal_order: None,
        counterexample: None,
    };
    let group = UnitriGroup::new(params);
    let gens: Vec<UnitriMatrix> = group.generators().iter().map(|g| group.matrix(g)).collect();
    for _ in 0..trials {
        let a = UnitriMatrix::random(params, &mut rng);
        let c = a.pth_power_fast()?;
        let x = UnitriMatrix::random(params, &mut rng);
        let fail_fast = c != a.power(params.p as u64);
        let fail_central = !c.commutes_with(&x) || !gens.iter().all(|g| c.commutes_with(g));
        let fail_exp = !c.power(params.p as u64).is_identity();
        report.nontrivial_found |= !c.is_identity();
        report.fast_power_agrees &= !fail_fast;
        report.all_central &= !fail_central;
        report.all_exponent_p &= !fail_exp;
        if (fail_fast || fail_central || fail_exp) && report.counterexample.is_none() {
            report.counterexample = Some(a);
        }
    }
    Ok(report)
}

/// Exhaustive version of [`verify_verbal_subgroup`]: every element's p-th
/// power is compared against repeated multiplication, every distinct power is
/// tested for commutation with every element, and the subgroup generated by
/// the powers is closed explicitly.
pub fn verify_verbal_subgroup_exhaustive(params: UtParams) -> Result<VerbalSubgroupReport> {
    params.require_corner_case()?;
    let group = UnitriGroup::new(params);
    let elems = group.elements(EXHAUSTIVE_ORDER_LIMIT as usize)?;
    let mut report = VerbalSubgroupReport {
        params,
        mode: "exhaustive".into(),
        seed: 0,
        samples: elems.len() as u64,
        fast_power_agrees: true,
        all_central: true,
        all_exponent_p: true,
        nontrivial_found: false,
        distinct_powers: None,
        verbal_order: None,
        counterexample: None,
    };
    let mut powers = BTreeSet::new();
    for e in &elems {
        let a = group.matrix(e);
        let c = a.pth_power_fast()?;
        if c != a.power(params.p as u64) {
            report.fast_power_agrees = false;
            report.counterexample.get_or_insert(a);
        }
        powers.insert(c);
    }
    let matrices: Vec<UnitriMatrix> = elems.iter().map(|e| group.matrix(e)).collect();
    for c in &powers {
        report.nontrivial_found |= !c.is_identity();
        if !matrices.iter().all(|x| c.commutes_with(x)) {
            report.all_central = false;
            report.counterexample.get_or_insert_with(|| c.clone());
        }
        if !c.power(params.p as u64).is_identity() {
            report.all_exponent_p = false;
            report.counterexample.get_or_insert_with(|| c.clone());
        }
    }
    // Closure of the power set under products.
    let mut closed: HashSet<UnitriMatrix> = powers.iter().cloned().collect();
    closed.insert(UnitriMatrix::identity(params));
    let mut frontier: Vec<UnitriMatrix> = closed.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for c in &powers {
                let y = x.mul_unchecked(c);
                if closed.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    report.distinct_powers = Some(powers.len() as u64);
    report.verbal_order = Some(closed.len().to_string());
    Ok(report)
}

/// The product of corner forms of `r` p-th powers equals the sum of the
/// corners: `A_1^p ⋯ A_r^p` is corner-only with corner `Σ corner(A_i^p)`.
pub fn product_of_pth_powers(mats: &[UnitriMatrix]) -> Result<UnitriMatrix> {
    let params = mats.first().map(UnitriMatrix::params).ok_or_else(|| Error::InvalidParams("empty product".into()))?;
    mats.iter().try_fold(UnitriMatrix::identity(params), |acc, a| acc.multiply(&a.power(params.p as u64)))
}

/// `-f`, used when building explicit inverses in tests and examples.
pub fn negate_entries(a: &UnitriMatrix) -> UnitriMatrix {
    let entries = a
        .entries
        .iter()
        .map(|e| {
            let p = e.modulus();
            MultilinearForm::from_raw(p, e.arity(), e.dim(), e.coeffs().iter().map(|&c| neg_mod(c, p)).collect())
        })
        .collect();
    UnitriMatrix { params: a.params, entries }
}

/// `true` if `k` is 1 or a power of `p`; a p-group's element orders all are.
pub fn is_power_of(k: u64, p: u64) -> bool {
    let mut x = BigUint::one();
    let target = BigUint::from(k);
    while x < target {
        x *= p;
    }
    x == target
}
