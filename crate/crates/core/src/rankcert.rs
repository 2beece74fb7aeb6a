//! Tensor rank over F_p for small coefficient tensors, and certificates for
//! lines `⟨T⟩` none of whose nonzero points is a sum of `r` decomposable
//! forms.
//!
//! Two independent routes decide rank:
//! * [`RankOneTable::sum_search`] is a depth-first search over sums of
//!   distinct decomposables, pruned by unfolding rank;
//! * [`RankTable::classify`] is a breadth-first sweep over the whole space of
//!   forms, with no pruning, used as the oracle for the first.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forms::{tensor_len, MultilinearForm, Vector};
use crate::gf::{self, is_prime};
use crate::rng::seeded;
use crate::unitri::{UnitriMatrix, UtParams};
use crate::FORMAT_VERSION;

/// Default node budget for one sum search.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Largest space `p^(d^t)` the breadth-first classifier will sweep.
pub const CLASSIFY_LIMIT: u64 = 1 << 22;

/// Largest number of rank-one forms that will be materialized.
pub const RANK_ONE_LIMIT: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankSearchParams {
    pub p: u32,
    /// Arity t of the forms.
    pub t: usize,
    /// Dimension d of each factor space.
    pub d: usize,
    /// Number r of decomposable summands allowed.
    pub r: u32,
}

impl RankSearchParams {
    pub fn new(p: u32, t: usize, d: usize, r: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if t == 0 || d == 0 {
            return Err(Error::InvalidParams(format!("arity {t} and dim {d} must be positive")));
        }
        tensor_len(d, t)?;
        Ok(RankSearchParams { p, t, d, r })
    }
}

/// Number of nonzero decomposable forms, `(p^d - 1)^t / (p - 1)^(t-1)`.
pub fn rank_one_count(p: u32, t: usize, d: usize) -> BigUint {
    let nonzero = BigUint::from(p).pow(d as u32) - 1u32;
    nonzero.pow(t as u32) / BigUint::from(p - 1).pow(t as u32 - 1)
}

fn nonzero_vectors(p: u32, d: usize, normalized: bool) -> Vec<Vector> {
    let total = (p as u64).pow(d as u32);
    (1..total)
        .map(|mut idx| {
            let mut entries = vec![0u32; d];
            for e in entries.iter_mut().rev() {
                *e = (idx % p as u64) as u32;
                idx /= p as u64;
            }
            entries
        })
        .filter(|e| !normalized || e.iter().find(|&&c| c != 0) == Some(&1))
        .map(|entries| Vector::new(p, entries).expect("reduced entries"))
        .collect()
}

/// Every nonzero decomposable form `u_1 ⊗ … ⊗ u_t` exactly once: the first
/// factor ranges over all nonzero vectors, the others over vectors whose
/// first nonzero coordinate is 1.
pub fn enumerate_rank1(p: u32, t: usize, d: usize) -> Result<Vec<MultilinearForm>> {
    RankSearchParams::new(p, t, d, 0)?;
    let count = rank_one_count(p, t, d);
    if count > BigUint::from(RANK_ONE_LIMIT) {
        return Err(Error::Overflow(format!("{count} decomposable forms")));
    }
    let first = nonzero_vectors(p, d, false);
    let rest = nonzero_vectors(p, d, true);
    let mut forms: Vec<MultilinearForm> = first.iter().map(MultilinearForm::linear).collect();
    for _ in 1..t {
        forms = forms
            .iter()
            .flat_map(|f| rest.iter().map(move |u| f.tensor_concat(&MultilinearForm::linear(u)).expect("same shape")))
            .collect();
    }
    Ok(forms)
}

/// Rank of a matrix over F_p by Gaussian elimination.
pub fn matrix_rank(mut rows: Vec<Vec<u32>>, p: u32) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = gf::inv_mod(rows[rank][col], p).expect("nonzero pivot");
        let pivot_row: Vec<u32> = rows[rank].iter().map(|&x| gf::mul_mod(x, inv, p)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = gf::sub_mod(*x, gf::mul_mod(factor, y, p), p);
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Largest rank among the single-slot unfoldings; a lower bound on tensor rank.
pub fn unfolding_rank(f: &MultilinearForm) -> usize {
    (0..f.arity()).map(|axis| matrix_rank(f.unfolding(axis), f.modulus())).max().unwrap_or(0)
}

/// Outcome of asking whether a form is a sum of at most `r` decomposables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result", content = "witness")]
pub enum SumSearch {
    /// The summands, which add up to the queried form.
    Found(Vec<MultilinearForm>),
    NotFound,
    /// The node budget ran out before the search finished.
    Inconclusive,
}

/// The decomposable forms of one shape, indexed for lookup.
#[derive(Clone, Debug)]
pub struct RankOneTable {
    p: u32,
    t: usize,
    d: usize,
    forms: Vec<MultilinearForm>,
    index: HashMap<Vec<u32>, usize>,
}

struct Dfs<'a> {
    table: &'a RankOneTable,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Dfs<'_> {
    fn search(&mut self, rem: &MultilinearForm, left: u32, start: usize, picked: &mut Vec<usize>) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return false;
        }
        if rem.is_zero() {
            return true;
        }
        if left == 0 || unfolding_rank(rem) > left as usize {
            return false;
        }
        if left == 1 {
            return match self.table.index.get(rem.coeffs()) {
                Some(&i) => {
                    picked.push(i);
                    true
                }
                None => false,
            };
        }
        for i in start..self.table.forms.len() {
            let next = rem.sub(&self.table.forms[i]).expect("same shape");
            picked.push(i);
            if self.search(&next, left - 1, i + 1, picked) {
                return true;
            }
            picked.pop();
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

impl RankOneTable {
    pub fn new(p: u32, t: usize, d: usize) -> Result<Self> {
        let forms = enumerate_rank1(p, t, d)?;
        let index = forms.iter().enumerate().map(|(i, f)| (f.coeffs().to_vec(), i)).collect();
        Ok(RankOneTable { p, t, d, forms, index })
    }

    pub fn forms(&self) -> &[MultilinearForm] {
        &self.forms
    }

    pub fn is_rank_one(&self, f: &MultilinearForm) -> bool {
        self.index.contains_key(f.coeffs())
    }

    fn check_shape(&self, f: &MultilinearForm) -> Result<()> {
        if (f.modulus(), f.arity(), f.dim()) != (self.p, self.t, self.d) {
            return Err(Error::Shape(format!(
                "form (p={}, t={}, d={}) against table (p={}, t={}, d={})",
                f.modulus(),
                f.arity(),
                f.dim(),
                self.p,
                self.t,
                self.d
            )));
        }
        Ok(())
    }

    /// Sequential search; returns the outcome and the number of nodes visited.
    ///
    /// Summands are chosen with strictly increasing table index: two equal
    /// summands `D + D` could be merged into one decomposable, so no
    /// decomposition is missed.
    pub fn sum_search(&self, f: &MultilinearForm, r: u32, budget: u64) -> Result<(SumSearch, u64)> {
        self.check_shape(f)?;
        let mut dfs = Dfs { table: self, nodes: 0, budget, exhausted: false };
        let mut picked = Vec::new();
        let outcome = if dfs.search(f, r, 0, &mut picked) {
            let summands = picked.iter().map(|&i| self.forms[i].clone()).collect();
            SumSearch::Found(summands)
        } else if dfs.exhausted {
            SumSearch::Inconclusive
        } else {
            SumSearch::NotFound
        };
        Ok((outcome, dfs.nodes))
    }

    /// Same answer as [`sum_search`](Self::sum_search), with the choice of
    /// first summand spread across threads. Each branch gets its own node
    /// budget, so the outcome is deterministic.
    pub fn sum_search_parallel(&self, f: &MultilinearForm, r: u32, budget: u64) -> Result<SumSearch> {
        self.check_shape(f)?;
        if f.is_zero() {
            return Ok(SumSearch::Found(vec![]));
        }
        if r <= 1 || unfolding_rank(f) > r as usize {
            return Ok(self.sum_search(f, r, budget)?.0);
        }
        let inconclusive = AtomicBool::new(false);
        let found = (0..self.forms.len()).into_par_iter().find_map_first(|i| {
            let rem = f.sub(&self.forms[i]).expect("same shape");
            let mut dfs = Dfs { table: self, nodes: 0, budget, exhausted: false };
            let mut picked = vec![i];
            if dfs.search(&rem, r - 1, i + 1, &mut picked) {
                Some(picked.iter().map(|&j| self.forms[j].clone()).collect::<Vec<_>>())
            } else {
                if dfs.exhausted {
                    inconclusive.store(true, Ordering::Relaxed);
                }
                None
            }
        });
        Ok(match found {
            Some(w) => SumSearch::Found(w),
            None if inconclusive.load(Ordering::Relaxed) => SumSearch::Inconclusive,
            None => SumSearch::NotFound,
        })
    }
}

/// Whether `f` is a sum of at most `r` decomposable forms. A witness is
/// re-added and compared against `f` before it is returned.
pub fn is_sum_of_rank1(f: &MultilinearForm, r: u32) -> Result<SumSearch> {
    let table = RankOneTable::new(f.modulus(), f.arity(), f.dim())?;
    let outcome = table.sum_search_parallel(f, r, DEFAULT_NODE_BUDGET)?;
    if let SumSearch::Found(w) = &outcome {
        let mut sum = MultilinearForm::zero(f.modulus(), f.arity(), f.dim())?;
        for s in w {
            sum = sum.add(s)?;
        }
        assert_eq!(&sum, f, "witness does not add up");
    }
    Ok(outcome)
}

/// Rank of every form in a small space, by breadth-first search from zero
/// in the Cayley graph generated by the decomposable forms.
#[derive(Clone, Debug)]
pub struct RankTable {
    p: u32,
    t: usize,
    d: usize,
    ranks: Vec<u8>,
}

impl RankTable {
    pub fn classify(p: u32, t: usize, d: usize) -> Result<Self> {
        RankSearchParams::new(p, t, d, 0)?;
        let size = MultilinearForm::space_size(p, t, d)
            .filter(|&n| n <= CLASSIFY_LIMIT)
            .ok_or_else(|| Error::Budget(format!("space of {t}-linear forms on F_{p}^{d} too large to classify")))?;
        let len = d.pow(t as u32);
        // Adding a decomposable digit-wise: precompute its base-p digits.
        let digits: Vec<Vec<u32>> = enumerate_rank1(p, t, d)?.into_iter().map(|f| f.coeffs().to_vec()).collect();
        let mut ranks = vec![u8::MAX; size as usize];
        ranks[0] = 0;
        let mut frontier = vec![0u64];
        let mut level = 0u8;
        let mut coeffs = vec![0u32; len];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &idx in &frontier {
                let base = MultilinearForm::from_index(p, t, d, idx);
                for dg in &digits {
                    for ((c, &a), &b) in coeffs.iter_mut().zip(base.coeffs()).zip(dg) {
                        *c = gf::add_mod(a, b, p);
                    }
                    let j = coeffs.iter().fold(0u64, |acc, &c| acc * p as u64 + c as u64) as usize;
                    if ranks[j] == u8::MAX {
                        ranks[j] = level + 1;
                        next.push(j as u64);
                    }
                }
            }
            frontier = next;
            level += 1;
        }
        Ok(RankTable { p, t, d, ranks })
    }

    pub fn rank(&self, f: &MultilinearForm) -> Option<u32> {
        if (f.modulus(), f.arity(), f.dim()) != (self.p, self.t, self.d) {
            return None;
        }
        Some(self.ranks[f.index() as usize] as u32)
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn max_rank(&self) -> u32 {
        self.ranks.iter().copied().max().unwrap_or(0) as u32
    }

    /// `histogram[k]` = number of forms of rank k.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.max_rank() as usize + 1];
        for &r in &self.ranks {
            h[r as usize] += 1;
        }
        h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result", content = "rank")]
pub enum BruteRank {
    Exact(u32),
    Inconclusive,
}

/// Least r such that `f` is a sum of r decomposables, without pruning: a
/// full classification of the space when it is small, otherwise plain
/// enumeration of all sums of up to three decomposables.
pub fn brute_rank(f: &MultilinearForm) -> Result<BruteRank> {
    let (p, t, d) = (f.modulus(), f.arity(), f.dim());
    if MultilinearForm::space_size(p, t, d).is_some_and(|n| n <= CLASSIFY_LIMIT) {
        let table = RankTable::classify(p, t, d)?;
        return Ok(BruteRank::Exact(table.rank(f).expect("shape matches")));
    }
    if f.is_zero() {
        return Ok(BruteRank::Exact(0));
    }
    let forms = enumerate_rank1(p, t, d)?;
    let target = f.coeffs();
    let hit = |parts: &[&MultilinearForm]| {
        let mut acc = vec![0u32; target.len()];
        for part in parts {
            for (a, &b) in acc.iter_mut().zip(part.coeffs()) {
                *a = gf::add_mod(*a, b, p);
            }
        }
        acc == target
    };
    if forms.iter().any(|a| hit(&[a])) {
        return Ok(BruteRank::Exact(1));
    }
    if forms.iter().enumerate().any(|(i, a)| forms[i..].iter().any(|b| hit(&[a, b]))) {
        return Ok(BruteRank::Exact(2));
    }
    let three = forms
        .par_iter()
        .enumerate()
        .any(|(i, a)| forms[i..].iter().enumerate().any(|(j, b)| forms[i + j..].iter().any(|c| hit(&[a, b, c]))));
    Ok(if three { BruteRank::Exact(3) } else { BruteRank::Inconclusive })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Canonical line generators examined before the reported one.
    pub lines_before: u64,
    /// Search nodes spent re-verifying the generator's multiples.
    pub verification_nodes: u64,
    /// `p^(d^t)`.
    pub space_size: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_time_ms: u64,
}

/// A line `⟨T⟩` such that no `k·T`, `k ∈ {1, …, p-1}`, is a sum of `r`
/// decomposable forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub version: u32,
    pub p: u32,
    pub t: usize,
    pub d: usize,
    pub r: u32,
    pub generator: MultilinearForm,
    pub method: String,
    pub stats: SearchStats,
    pub hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RankCertificate {
    pub fn params(&self) -> RankSearchParams {
        RankSearchParams { p: self.p, t: self.t, d: self.d, r: self.r }
    }

    /// Hex SHA-256 over the parameters and the generator's coefficients.
    pub fn content_hash(params: &RankSearchParams, generator: &MultilinearForm) -> String {
        let coeffs: Vec<String> = generator.coeffs().iter().map(u32::to_string).collect();
        let text = format!(
            "v{}|p={}|t={}|d={}|r={}|{}",
            FORMAT_VERSION,
            params.p,
            params.t,
            params.d,
            params.r,
            coeffs.join(",")
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum LineSearch {
    Found { certificate: Box<RankCertificate> },
    NoneExists { lines_scanned: u64 },
    Inconclusive { lines_scanned: u64 },
}

/// Nonzero forms whose first nonzero coefficient is 1, one per line.
fn is_line_generator(f: &MultilinearForm) -> bool {
    f.coeffs().iter().find(|&&c| c != 0) == Some(&1)
}

fn line_avoids(table: &RankOneTable, generator: &MultilinearForm, r: u32, budget: u64) -> Result<(Option<bool>, u64)> {
    let mut nodes = 0;
    for k in 1..generator.modulus() {
        let (outcome, n) = table.sum_search(&generator.scale_raw(k), r, budget)?;
        nodes += n;
        match outcome {
            SumSearch::Found(_) => return Ok((Some(false), nodes)),
            SumSearch::Inconclusive => return Ok((None, nodes)),
            SumSearch::NotFound => {}
        }
    }
    Ok((Some(true), nodes))
}

/// Scans lines in increasing order of their canonical generator and returns
/// a certificate for the first line avoiding all sums of `r` decomposables.
pub fn find_avoiding_line(params: RankSearchParams, budget: u64) -> Result<LineSearch> {
    let start = Instant::now();
    let RankSearchParams { p, t, d, r } = params;
    let size = MultilinearForm::space_size(p, t, d)
        .ok_or_else(|| Error::Overflow(format!("space of {t}-linear forms on F_{p}^{d}")))?;
    let table = RankOneTable::new(p, t, d)?;
    let inconclusive = AtomicBool::new(false);
    let found = (1..size).into_par_iter().find_map_first(|idx| {
        let f = MultilinearForm::from_index(p, t, d, idx);
        if !is_line_generator(&f) {
            return None;
        }
        match line_avoids(&table, &f, r, budget) {
            Ok((Some(true), _)) => Some(f),
            Ok((None, _)) | Err(_) => {
                inconclusive.store(true, Ordering::Relaxed);
                None
            }
            Ok((Some(false), _)) => None,
        }
    });
    let lines_total = (size - 1) / (p as u64 - 1);
    let Some(generator) = found else {
        return Ok(if inconclusive.load(Ordering::Relaxed) {
            LineSearch::Inconclusive { lines_scanned: lines_total }
        } else {
            LineSearch::NoneExists { lines_scanned: lines_total }
        });
    };
    let lines_before =
        (1..generator.index()).filter(|&i| is_line_generator(&MultilinearForm::from_index(p, t, d, i))).count() as u64;
    let (avoids, verification_nodes) = line_avoids(&table, &generator, r, budget)?;
    assert_eq!(avoids, Some(true), "certificate failed re-verification");
    let hash = RankCertificate::content_hash(&params, &generator);
    Ok(LineSearch::Found {
        certificate: Box::new(RankCertificate {
            version: FORMAT_VERSION,
            p,
            t,
            d,
            r,
            generator,
            method: "dfs-with-pruning".into(),
            stats: SearchStats { lines_before, verification_nodes, space_size: size },
            hash,
            timing: Some(Timing { wall_time_ms: start.elapsed().as_millis() as u64 }),
        }),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub hash_ok: bool,
    pub shape_ok: bool,
    /// `Some(true)` when every multiple was shown not to be a sum of r
    /// decomposables; `None` if a search ran out of budget.
    pub multiples_avoid: Option<bool>,
    /// Oracle rank of the generator, when the space is small enough.
    pub oracle_rank: Option<u32>,
    pub valid: Option<bool>,
}

/// Re-checks a certificate from scratch.
pub fn verify_certificate(cert: &RankCertificate, budget: u64) -> Result<CertificateCheck> {
    let params = RankSearchParams::new(cert.p, cert.t, cert.d, cert.r)?;
    let g = &cert.generator;
    let shape_ok = cert.version == FORMAT_VERSION && (g.modulus(), g.arity(), g.dim()) == (cert.p, cert.t, cert.d);
    let hash_ok = RankCertificate::content_hash(&params, g) == cert.hash;
    let mut check =
        CertificateCheck { hash_ok, shape_ok, multiples_avoid: None, oracle_rank: None, valid: Some(false) };
    if !shape_ok || g.is_zero() {
        return Ok(check);
    }
    let table = RankOneTable::new(cert.p, cert.t, cert.d)?;
    check.multiples_avoid = line_avoids(&table, g, cert.r, budget)?.0;
    if MultilinearForm::space_size(cert.p, cert.t, cert.d).is_some_and(|n| n <= CLASSIFY_LIMIT) {
        let table = RankTable::classify(cert.p, cert.t, cert.d)?;
        check.oracle_rank = table.rank(g);
    }
    let oracle_ok = check.oracle_rank.is_none_or(|rank| rank > cert.r);
    check.valid = check.multiples_avoid.map(|avoid| avoid && hash_ok && oracle_ok);
    Ok(check)
}

/// A non-negative integer reported either exactly or by size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Exact(String),
    /// Exact number of decimal digits.
    Digits(u64),
    /// `base^exponent`, when even the digit count was not computed.
    Power {
        base: u32,
        exponent: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub p: u32,
    pub m: u64,
    /// `(p^(m^p) - 1) / (p - 1)`: the number of order-p subgroups of the
    /// subgroup of p-th powers.
    pub lines: Magnitude,
    /// `p^(p·m²)`: the bound on products of m p-th powers.
    pub products_bound: Magnitude,
    pub holds: bool,
    pub method: String,
}

/// Values with more digits than this are reported by digit count.
pub const EXACT_DIGITS_LIMIT: u64 = 120;

/// Largest `p^(m^p)`, in bits, that is materialized as a big integer.
pub const MAX_EXACT_BITS: u64 = 1 << 24;

fn decimal_digits(x: &BigUint) -> u64 {
    if x.bits() == 0 {
        return 1;
    }
    // Estimate from the bit length, then correct against exact powers of ten.
    let mut k = ((x.bits() - 1) as f64 * std::f64::consts::LOG10_2).floor() as u32;
    let ten = BigUint::from(10u32);
    let mut pow = ten.pow(k);
    while &pow > x {
        k -= 1;
        pow /= &ten;
    }
    while &(&pow * &ten) <= x {
        k += 1;
        pow *= &ten;
    }
    k as u64 + 1
}

fn magnitude(x: &BigUint) -> Magnitude {
    let digits = decimal_digits(x);
    if digits <= EXACT_DIGITS_LIMIT {
        Magnitude::Exact(x.to_string())
    } else {
        Magnitude::Digits(digits)
    }
}

/// Exact comparison of `(p^(m^p) - 1)/(p - 1)` with `p^(p·m²)`.
pub fn counting_inequality(p: u32, m: u64) -> Result<InequalityReport> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if m == 0 {
        return Err(Error::InvalidParams("m must be positive".into()));
    }
    let big_p = BigUint::from(p);
    let dim = BigUint::from(m).pow(p);
    let bound_exp = BigUint::from(p) * BigUint::from(m) * BigUint::from(m);
    let bits = dim.to_f64().unwrap_or(f64::INFINITY) * (p as f64).log2();
    if bits <= MAX_EXACT_BITS as f64 {
        let dim = dim.to_u32().expect("bounded by MAX_EXACT_BITS");
        let bound_exp = bound_exp.to_u32().expect("bounded by dim");
        let lines = (big_p.pow(dim) - BigUint::one()) / BigUint::from(p - 1);
        let bound = big_p.pow(bound_exp);
        return Ok(InequalityReport {
            p,
            m,
            holds: lines > bound,
            lines: magnitude(&lines),
            products_bound: magnitude(&bound),
            method: "big-integer".into(),
        });
    }
    // For a = m^p and b = p·m²: a > b gives p^a - 1 ≥ p·p^b - 1 > (p-1)·p^b,
    // and a ≤ b gives p^a - 1 < p^b ≤ (p-1)·p^b.
    Ok(InequalityReport {
        p,
        m,
        holds: dim > bound_exp,
        lines: Magnitude::Power { base: p, exponent: format!("{dim} (numerator exponent)") },
        products_bound: Magnitude::Power { base: p, exponent: bound_exp.to_string() },
        method: "exponent-comparison".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowViolation {
    pub tuple: Vec<UnitriMatrix>,
    pub corner: MultilinearForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowReport {
    pub p: u32,
    pub dim: usize,
    pub r: u32,
    pub trials: u64,
    pub seed: u64,
    /// Products `A_1^p ⋯ A_r^p` that were not corner-only, or whose corner
    /// differed from the sum of the individual corner formulas.
    pub bridge_mismatches: u64,
    /// Products landing on a nonzero point of the certified line.
    pub violations: Vec<ShadowViolation>,
    pub zero_corners: u64,
}

impl ShadowReport {
    pub fn passed(&self) -> bool {
        self.bridge_mismatches == 0 && self.violations.is_empty()
    }
}

/// Samples `r`-tuples in UT(p+1, p, d), multiplies their p-th powers (by
/// repeated squaring), and checks the product against the certificate: its
/// corner must never be a nonzero multiple of the generator, and must equal
/// the sum of the superdiagonal products.
pub fn group_shadow_check(cert: &RankCertificate, trials: u64, seed: u64) -> Result<ShadowReport> {
    if cert.t != cert.p as usize {
        return Err(Error::Hypothesis(format!(
            "certificate arity {} must equal p = {} for corners of UT(p+1, p, m)",
            cert.t, cert.p
        )));
    }
    let params = UtParams::lemma(cert.p, cert.d)?;
    let line: Vec<MultilinearForm> = (1..cert.p).map(|k| cert.generator.scale_raw(k)).collect();
    let mut rng = seeded(seed);
    let mut report = ShadowReport {
        p: cert.p,
        dim: cert.d,
        r: cert.r,
        trials,
        seed,
        bridge_mismatches: 0,
        violations: Vec::new(),
        zero_corners: 0,
    };
    for _ in 0..trials {
        let tuple: Vec<UnitriMatrix> = (0..cert.r).map(|_| UnitriMatrix::random(params, &mut rng)).collect();
        report.check_tuple(params, &tuple, &line)?;
    }
    Ok(report)
}

impl ShadowReport {
    fn check_tuple(&mut self, params: UtParams, tuple: &[UnitriMatrix], line: &[MultilinearForm]) -> Result<()> {
        let mut product = UnitriMatrix::identity(params);
        let mut corner_sum = MultilinearForm::zero(params.p, params.p as usize, params.m)?;
        for a in tuple {
            product = product.multiply(&a.power(params.p as u64))?;
            corner_sum = corner_sum.add(&a.superdiagonal_product())?;
        }
        if !product.is_corner_only() || product.corner() != &corner_sum {
            self.bridge_mismatches += 1;
        }
        let corner = product.corner();
        if corner.is_zero() {
            self.zero_corners += 1;
        }
        if line.contains(corner) {
            self.violations.push(ShadowViolation { tuple: tuple.to_vec(), corner: corner.clone() });
        }
        Ok(())
    }
}

/// [`group_shadow_check`] on one explicit tuple.
pub fn shadow_check_tuple(cert: &RankCertificate, tuple: &[UnitriMatrix]) -> Result<ShadowReport> {
    let params = UtParams::lemma(cert.p, cert.d)?;
    let line: Vec<MultilinearForm> = (1..cert.p).map(|k| cert.generator.scale_raw(k)).collect();
    let mut report = ShadowReport {
        p: cert.p,
        dim: cert.d,
        r: cert.r,
        trials: 1,
        seed: 0,
        bridge_mismatches: 0,
        violations: Vec::new(),
        zero_corners: 0,
    };
    report.check_tuple(params, tuple, &line)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn w_tensor() -> MultilinearForm {
        // e1⊗e1⊗e2 + e1⊗e2⊗e1 + e2⊗e1⊗e1 with e1 = index 0, e2 = index 1
        let mut c = vec![0u32; 8];
        c[0b001] = 1;
        c[0b010] = 1;
        c[0b100] = 1;
        MultilinearForm::new(3, 3, 2, c).unwrap()
    }

    #[test]
    fn rank_one_enumeration() {
        let forms = enumerate_rank1(3, 3, 2).unwrap();
        assert_eq!(forms.len(), 128);
        assert_eq!(rank_one_count(3, 3, 2), BigUint::from(128u32));
        let distinct: HashSet<_> = forms.iter().collect();
        assert_eq!(distinct.len(), 128);
        assert!(forms.iter().all(|f| !f.is_zero() && unfolding_rank(f) == 1));
        assert_eq!(enumerate_rank1(3, 1, 1).unwrap().len(), 2);
        for (p, t, d) in [(2u32, 2usize, 2usize), (5, 2, 2), (3, 2, 3), (2, 4, 2)] {
            let forms = enumerate_rank1(p, t, d).unwrap();
            let distinct: HashSet<_> = forms.iter().collect();
            assert_eq!(BigUint::from(distinct.len()), rank_one_count(p, t, d));
            assert_eq!(distinct.len(), forms.len());
        }
    }

    #[test]
    fn matrix_ranks() {
        assert_eq!(matrix_rank(vec![vec![1, 2], vec![2, 4]], 5), 1);
        assert_eq!(matrix_rank(vec![vec![1, 2], vec![2, 1]], 3), 1);
        assert_eq!(matrix_rank(vec![vec![1, 2], vec![2, 1]], 5), 2);
        assert_eq!(matrix_rank(vec![vec![0, 0], vec![0, 0]], 5), 0);
    }

    #[test]
    fn sum_search_examples() {
        let zero = MultilinearForm::zero(3, 3, 2).unwrap();
        assert!(matches!(is_sum_of_rank1(&zero, 0).unwrap(), SumSearch::Found(v) if v.is_empty()));
        let table = RankOneTable::new(3, 3, 2).unwrap();
        for f in table.forms().iter().step_by(9) {
            assert!(matches!(is_sum_of_rank1(f, 1).unwrap(), SumSearch::Found(_)));
        }
        assert_eq!(is_sum_of_rank1(&w_tensor(), 2).unwrap(), SumSearch::NotFound);
        match is_sum_of_rank1(&w_tensor(), 3).unwrap() {
            SumSearch::Found(w) => assert_eq!(w.len(), 3),
            other => panic!("{other:?}"),
        }
        let (outcome, _) = table.sum_search(&w_tensor(), 3, 2).unwrap();
        assert_eq!(outcome, SumSearch::Inconclusive);
    }

    #[test]
    fn w_tensor_rank_by_both_routes() {
        // Oracle: exhaustive sweep over all pairs of decomposables.
        let forms = enumerate_rank1(3, 3, 2).unwrap();
        let target = w_tensor();
        let pair_hit = forms.iter().any(|a| forms.iter().any(|b| a.add(b).unwrap() == target));
        assert!(!pair_hit);
        assert_eq!(brute_rank(&target).unwrap(), BruteRank::Exact(3));
        assert_eq!(brute_rank(&MultilinearForm::zero(3, 3, 2).unwrap()).unwrap(), BruteRank::Exact(0));
        assert_eq!(brute_rank(&forms[17]).unwrap(), BruteRank::Exact(1));
    }

    #[test]
    fn brute_rank_fallback_without_classification() {
        // p^(d^t) = 3^27 is too big to classify; sums of ≤ 3 are enumerated.
        let e = |i| Vector::basis(3, 3, i);
        let a = MultilinearForm::decomposable(&[e(0), e(1), e(2)]).unwrap();
        let b = MultilinearForm::decomposable(&[e(1), e(1), e(0)]).unwrap();
        assert_eq!(brute_rank(&a).unwrap(), BruteRank::Exact(1));
        assert_eq!(brute_rank(&a.add(&b).unwrap()).unwrap(), BruteRank::Exact(2));
    }

    #[test]
    fn classification_agrees_with_search() {
        let table = RankTable::classify(3, 3, 2).unwrap();
        let ones = RankOneTable::new(3, 3, 2).unwrap();
        assert_eq!(table.histogram()[1], 128);
        assert_eq!(table.max_rank(), 3);
        for f in MultilinearForm::enumerate_all(3, 3, 2).unwrap().step_by(7) {
            let rank = table.rank(&f).unwrap();
            assert!(unfolding_rank(&f) as u32 <= rank);
            for r in 0..=3 {
                let (found, _) = ones.sum_search(&f, r, DEFAULT_NODE_BUDGET).unwrap();
                assert_eq!(matches!(found, SumSearch::Found(_)), rank <= r, "{f:?} r={r}");
            }
            for k in 1..3 {
                assert_eq!(table.rank(&f.scale_raw(k)), Some(rank));
            }
        }
    }

    #[test]
    fn line_search_examples() {
        let LineSearch::Found { certificate } =
            find_avoiding_line(RankSearchParams::new(3, 3, 2, 2).unwrap(), DEFAULT_NODE_BUDGET).unwrap()
        else {
            panic!("expected a certificate");
        };
        let check = verify_certificate(&certificate, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(check.valid, Some(true));
        assert_eq!(check.oracle_rank, Some(3));

        let none = find_avoiding_line(RankSearchParams::new(3, 3, 2, 3).unwrap(), DEFAULT_NODE_BUDGET).unwrap();
        assert!(matches!(none, LineSearch::NoneExists { lines_scanned: 3280 }));
        let none = find_avoiding_line(RankSearchParams::new(3, 1, 1, 1).unwrap(), DEFAULT_NODE_BUDGET).unwrap();
        assert!(matches!(none, LineSearch::NoneExists { lines_scanned: 1 }));

        let mut tampered = (*certificate).clone();
        tampered.r = 3;
        let check = verify_certificate(&tampered, DEFAULT_NODE_BUDGET).unwrap();
        assert!(!check.hash_ok);
        assert_eq!(check.valid, Some(false));
    }

    #[test]
    fn inequality_examples() {
        let r = counting_inequality(3, 4).unwrap();
        assert!(r.holds);
        let r = counting_inequality(3, 3).unwrap();
        assert!(!r.holds);
        let r = counting_inequality(3, 1).unwrap();
        assert!(!r.holds);
        assert_eq!(r.lines, Magnitude::Exact("1".into()));
        assert_eq!(r.products_bound, Magnitude::Exact("27".into()));
        assert!(counting_inequality(4, 2).is_err());
    }

    #[test]
    fn inequality_monotone_and_matches_exponents() {
        for p in [3u32, 5, 7] {
            let mut seen_true = false;
            for m in 1..=6u64 {
                let r = counting_inequality(p, m).unwrap();
                assert!(!seen_true || r.holds, "p={p} m={m}");
                seen_true |= r.holds;
                assert_eq!(r.holds, m.pow(p) > p as u64 * m * m);
            }
        }
        let huge = counting_inequality(101, 50).unwrap();
        assert!(huge.holds);
        assert_eq!(huge.method, "exponent-comparison");
    }

    #[test]
    fn digit_counts() {
        for s in ["1", "9", "10", "99", "100", "123456789012345678901234567890"] {
            assert_eq!(decimal_digits(&s.parse().unwrap()), s.len() as u64);
        }
        assert_eq!(decimal_digits(&BigUint::from(0u32)), 1);
    }
}
