//! Finite wreath products, homomorphism search for discrimination, and a
//! finite model of the maps `ε`, `η`, `α` attached to a split free basis.
//!
//! `A wr D` is written as pairs `(f, d)` with `f: D → A` and multiplication
//! `(f1, d1)(f2, d2) = (f1 · (d1▷f2), d1 d2)`, where `(d▷f)(x) = f(d⁻¹x)`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{check_enumerable, Elem, FiniteGroup, GroupRef, ENUMERATION_LIMIT};
use crate::identity::evaluate_word;
use crate::rng::seeded;
use crate::words::GroupWord;

/// Largest top group accepted, since functions `D → A` are stored densely.
pub const TOP_LIMIT: usize = 4096;

/// Default node budget per branch of the homomorphism search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

#[derive(Clone)]
pub struct WreathProduct {
    base: GroupRef,
    top: GroupRef,
    /// Fixed enumeration of D; coordinate `i` of `f` is `f(top_elems[i])`.
    top_elems: Vec<Elem>,
    top_index: HashMap<Elem, usize>,
    base_len: usize,
}

impl fmt::Debug for WreathProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WreathProduct({})", self.name())
    }
}

impl WreathProduct {
    pub fn new(base: GroupRef, top: GroupRef) -> Result<Self> {
        let top_elems = top.elements(TOP_LIMIT)?;
        let top_index = top_elems.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
        let base_len = base.encoding_len();
        Ok(WreathProduct { base, top, top_elems, top_index, base_len })
    }

    pub fn base(&self) -> &GroupRef {
        &self.base
    }

    pub fn top(&self) -> &GroupRef {
        &self.top
    }

    pub fn top_elements(&self) -> &[Elem] {
        &self.top_elems
    }

    fn coord<'a>(&self, w: &'a [u32], i: usize) -> &'a [u32] {
        &w[i * self.base_len..(i + 1) * self.base_len]
    }

    fn top_part<'a>(&self, w: &'a [u32]) -> &'a [u32] {
        &w[self.top_elems.len() * self.base_len..]
    }

    fn assemble(&self, coords: impl IntoIterator<Item = Elem>, d: &[u32]) -> Elem {
        let mut out = Vec::with_capacity(self.encoding_len());
        for c in coords {
            out.extend(c);
        }
        out.extend_from_slice(d);
        out
    }

    fn index_of(&self, d: &[u32]) -> usize {
        self.top_index[d]
    }

    /// Coordinate functions `D → A`, in the fixed enumeration order of D.
    pub fn base_coordinates(&self, w: &Elem) -> Vec<Elem> {
        (0..self.top_elems.len()).map(|i| self.coord(w, i).to_vec()).collect()
    }

    /// `a` placed at the identity coordinate of D.
    pub fn embed_base(&self, a: &Elem) -> Elem {
        let e = self.top.identity();
        let at = self.index_of(&e);
        let coords = (0..self.top_elems.len()).map(|i| if i == at { a.clone() } else { self.base.identity() });
        self.assemble(coords, &e)
    }

    pub fn embed_top(&self, d: &Elem) -> Elem {
        let coords = (0..self.top_elems.len()).map(|_| self.base.identity());
        self.assemble(coords, d)
    }

    /// The projection `α: (f, d) ↦ d`.
    pub fn projection_alpha(&self, w: &Elem) -> Elem {
        self.top_part(w).to_vec()
    }

    /// Whether `w` lies in the base `M = ker α`.
    pub fn in_base(&self, w: &Elem) -> bool {
        self.top.is_identity(&self.projection_alpha(w))
    }
}

impl FiniteGroup for WreathProduct {
    fn name(&self) -> String {
        format!("wreath:{}:{}", self.base.name(), self.top.name())
    }

    fn encoding_len(&self) -> usize {
        self.top_elems.len() * self.base_len + self.top.encoding_len()
    }

    fn identity(&self) -> Elem {
        self.embed_top(&self.top.identity())
    }

    fn multiply(&self, a: &Elem, b: &Elem) -> Elem {
        let d1 = self.top_part(a);
        let d1_inv = self.top.invert(&d1.to_vec());
        let coords = self.top_elems.iter().enumerate().map(|(i, x)| {
            let shifted = self.index_of(&self.top.multiply(&d1_inv, x));
            self.base.multiply(&self.coord(a, i).to_vec(), &self.coord(b, shifted).to_vec())
        });
        let d = self.top.multiply(&d1.to_vec(), &self.top_part(b).to_vec());
        self.assemble(coords.collect::<Vec<_>>(), &d)
    }

    /// `(f, d)⁻¹ = (g, d⁻¹)` with `g(x) = f(dx)⁻¹`.
    fn invert(&self, a: &Elem) -> Elem {
        let d = self.top_part(a).to_vec();
        let coords: Vec<Elem> = self
            .top_elems
            .iter()
            .map(|x| {
                let j = self.index_of(&self.top.multiply(&d, x));
                self.base.invert(&self.coord(a, j).to_vec())
            })
            .collect();
        self.assemble(coords, &self.top.invert(&d))
    }

    fn order(&self) -> num_bigint::BigUint {
        self.base.order().pow(self.top_elems.len() as u32) * self.top.order()
    }

    fn generators(&self) -> Vec<Elem> {
        let mut gens: Vec<Elem> = self.base.generators().iter().map(|a| self.embed_base(a)).collect();
        gens.extend(self.top.generators().iter().map(|d| self.embed_top(d)));
        gens
    }

    fn random_element(&self, rng: &mut dyn RngCore) -> Elem {
        let coords: Vec<Elem> = (0..self.top_elems.len()).map(|_| self.base.random_element(rng)).collect();
        let d = &self.top_elems[rng.gen_range(0..self.top_elems.len())];
        self.assemble(coords, d)
    }

    fn contains(&self, a: &Elem) -> bool {
        a.len() == self.encoding_len()
            && (0..self.top_elems.len()).all(|i| self.base.contains(&self.coord(a, i).to_vec()))
            && self.top_index.contains_key(self.top_part(a))
    }

    fn elements(&self, limit: usize) -> Result<Vec<Elem>> {
        check_enumerable(self, limit)?;
        let base = self.base.elements(limit)?;
        let n = self.top_elems.len();
        let mut out = Vec::new();
        let mut digits = vec![0usize; n];
        loop {
            for d in &self.top_elems {
                out.push(self.assemble(digits.iter().map(|&k| base[k].clone()), d));
            }
            // Odometer over the coordinate functions, last coordinate fastest.
            let Some(pos) = (0..n).rev().find(|&i| digits[i] + 1 < base.len()) else {
                break;
            };
            digits[pos] += 1;
            digits[pos + 1..].iter_mut().for_each(|k| *k = 0);
        }
        out.sort();
        Ok(out)
    }
}

/// Cayley graph of an enumerable group with a spanning tree rooted at the
/// identity.
struct Cayley {
    elems: Vec<Elem>,
    gens: Vec<Elem>,
    /// `(parent, generator)` for every non-root vertex in BFS order.
    tree: Vec<Option<(usize, usize)>>,
    bfs_order: Vec<usize>,
    /// `x · g_i = y`, as `(x, i, y)` for edges outside the tree.
    edges: Vec<(usize, usize, usize)>,
    /// Largest generator index on the tree path to each vertex.
    need: Vec<usize>,
}

impl Cayley {
    fn new(g: &dyn FiniteGroup) -> Result<Self> {
        let elems = g.elements(ENUMERATION_LIMIT)?;
        let index: HashMap<&Elem, usize> = elems.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let gens = g.generators();
        let n = elems.len();
        let root = index[&g.identity()];
        let mut tree = vec![None; n];
        let mut seen = vec![false; n];
        let mut bfs_order = vec![root];
        let mut need = vec![0usize; n];
        let mut edges = Vec::new();
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for (i, gi) in gens.iter().enumerate() {
                let y = index[&g.multiply(&elems[x], gi)];
                if seen[y] {
                    edges.push((x, i, y));
                } else {
                    seen[y] = true;
                    tree[y] = Some((x, i));
                    need[y] = need[x].max(i);
                    bfs_order.push(y);
                    queue.push_back(y);
                }
            }
        }
        if bfs_order.len() != n {
            return Err(Error::InvalidParams(format!("generators of {} do not generate it", g.name())));
        }
        Ok(Cayley { elems, gens, tree, bfs_order, edges, need })
    }

    /// Extends generator images along the tree; `None` where the path uses an
    /// unassigned generator.
    fn extend(&self, d: &dyn FiniteGroup, images: &[Elem]) -> Vec<Option<Elem>> {
        let mut phi: Vec<Option<Elem>> = vec![None; self.elems.len()];
        for &v in &self.bfs_order {
            phi[v] = match self.tree[v] {
                None => Some(d.identity()),
                Some((parent, i)) if i < images.len() => phi[parent].as_ref().map(|x| d.multiply(x, &images[i])),
                Some(_) => None,
            };
        }
        phi
    }

    /// Whether every edge whose endpoints and label are all assigned agrees.
    fn consistent(&self, d: &dyn FiniteGroup, images: &[Elem], phi: &[Option<Elem>]) -> bool {
        let k = images.len();
        self.edges.iter().all(|&(x, i, y)| {
            if i >= k || self.need[x] >= k || self.need[y] >= k {
                return true;
            }
            match (&phi[x], &phi[y]) {
                (Some(px), Some(py)) => d.multiply(px, &images[i]) == *py,
                _ => true,
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum Discrimination {
    Found {
        /// Images of the source generators, in generator order.
        generator_images: Vec<Elem>,
        set_images: Vec<Elem>,
    },
    NoneExists {
        reason: String,
    },
    Inconclusive {
        reason: String,
    },
}

struct HomSearch<'a> {
    cayley: &'a Cayley,
    target: &'a dyn FiniteGroup,
    targets: &'a [Elem],
    set: &'a [usize],
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl HomSearch<'_> {
    fn run(&mut self, images: &mut Vec<Elem>) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return false;
        }
        let phi = self.cayley.extend(self.target, images);
        if !self.cayley.consistent(self.target, images, &phi) {
            return false;
        }
        if images.len() == self.cayley.gens.len() {
            let mut seen = HashSet::new();
            return self.set.iter().all(|&s| seen.insert(phi[s].clone().expect("all assigned")));
        }
        for t in self.targets {
            images.push(t.clone());
            if self.run(images) {
                return true;
            }
            images.pop();
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

/// Searches for a homomorphism `G → D` injective on `set`, trying generator
/// images in lexicographic order of D's elements and pruning as soon as the
/// images assigned so far violate a relation. The first solution in that
/// order is returned.
pub fn discriminate(g: &dyn FiniteGroup, d: &dyn FiniteGroup, set: &[Elem], budget: u64) -> Result<Discrimination> {
    let cayley = Cayley::new(g)?;
    let index: HashMap<&Elem, usize> = cayley.elems.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut members: Vec<usize> = Vec::new();
    for s in set {
        let &i =
            index.get(s).ok_or_else(|| Error::InvalidParams(format!("{s:?} is not an element of {}", g.name())))?;
        if !members.contains(&i) {
            members.push(i);
        }
    }
    let targets = d.elements(ENUMERATION_LIMIT)?;
    if members.len() > targets.len() {
        return Ok(Discrimination::NoneExists {
            reason: format!("|S| = {} exceeds |D| = {}", members.len(), targets.len()),
        });
    }
    let set_images = |images: &[Elem]| {
        let phi = cayley.extend(d, images);
        members.iter().map(|&s| phi[s].clone().expect("all assigned")).collect::<Vec<_>>()
    };
    if cayley.gens.is_empty() {
        // Trivial source: the only map sends everything to the identity.
        return Ok(if members.len() <= 1 {
            Discrimination::Found { generator_images: vec![], set_images: set_images(&[]) }
        } else {
            Discrimination::NoneExists { reason: "trivial source".into() }
        });
    }
    let exhausted = AtomicBool::new(false);
    let found = targets.par_iter().find_map_first(|first| {
        let mut search = HomSearch {
            cayley: &cayley,
            target: d,
            targets: &targets,
            set: &members,
            nodes: 0,
            budget,
            exhausted: false,
        };
        let mut images = vec![first.clone()];
        if search.run(&mut images) {
            Some(images)
        } else {
            if search.exhausted {
                exhausted.store(true, Ordering::Relaxed);
            }
            None
        }
    });
    Ok(match found {
        Some(images) => Discrimination::Found { set_images: set_images(&images), generator_images: images },
        None if exhausted.load(Ordering::Relaxed) => {
            Discrimination::Inconclusive { reason: format!("search budget of {budget} nodes per branch exhausted") }
        }
        None => Discrimination::NoneExists { reason: "exhaustive search".into() },
    })
}

/// Independent check of a generator assignment: builds the map by walking
/// the group from the identity, then checks `φ(xy) = φ(x)φ(y)` for all pairs
/// (or for the first 1000 elements against all, on larger groups) and
/// injectivity on `set`.
pub fn verify_homomorphism(g: &dyn FiniteGroup, d: &dyn FiniteGroup, images: &[Elem], set: &[Elem]) -> Result<bool> {
    let gens = g.generators();
    if gens.len() != images.len() {
        return Ok(false);
    }
    let mut phi: HashMap<Elem, Elem> = HashMap::from([(g.identity(), d.identity())]);
    let mut stack = vec![g.identity()];
    while let Some(x) = stack.pop() {
        for (gi, di) in gens.iter().zip(images) {
            let y = g.multiply(&x, gi);
            if !phi.contains_key(&y) {
                phi.insert(y.clone(), d.multiply(&phi[&x], di));
                stack.push(y);
            }
        }
    }
    let mut elems: Vec<&Elem> = phi.keys().collect();
    elems.sort();
    for x in elems.iter().take(1000) {
        for y in &elems {
            let xy = g.multiply(x, y);
            if phi.get(&xy) != Some(&d.multiply(&phi[*x], &phi[*y])) {
                return Ok(false);
            }
        }
    }
    let mut seen = HashSet::new();
    let distinct: HashSet<&Elem> = set.iter().collect();
    for s in distinct {
        match phi.get(s) {
            Some(v) if seen.insert(v.clone()) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianFunctional {
    /// `B = 1 + 2·max |s_i - t_i|` over pairs of points and coordinates.
    pub base: String,
    pub coefficients: Vec<String>,
    pub values: Vec<String>,
    pub injective: bool,
}

/// A homomorphism `Z^n → Z` injective on the finite set `set`:
/// `v ↦ Σ v_i B^i`.
pub fn discriminate_free_abelian(set: &[Vec<i64>]) -> Result<AbelianFunctional> {
    let n = set.first().map(Vec::len).ok_or_else(|| Error::InvalidParams("empty set".into()))?;
    if set.iter().any(|v| v.len() != n) {
        return Err(Error::Shape("points of different rank".into()));
    }
    let spread = (0..n)
        .map(|i| {
            let lo = set.iter().map(|v| v[i] as i128).min().unwrap_or(0);
            let hi = set.iter().map(|v| v[i] as i128).max().unwrap_or(0);
            hi - lo
        })
        .max()
        .unwrap_or(0);
    let base = BigInt::one() + BigInt::from(2) * BigInt::from(spread);
    let mut coefficients = Vec::with_capacity(n);
    let mut c = BigInt::one();
    for _ in 0..n {
        coefficients.push(c.clone());
        c *= &base;
    }
    let values: Vec<BigInt> =
        set.iter().map(|v| v.iter().zip(&coefficients).fold(BigInt::zero(), |acc, (&x, c)| acc + c * x)).collect();
    let mut seen = HashMap::new();
    let mut injective = true;
    for (v, val) in set.iter().zip(&values) {
        if let Some(prev) = seen.insert(val, v) {
            injective &= prev == v;
        }
    }
    Ok(AbelianFunctional {
        base: base.to_string(),
        coefficients: coefficients.iter().map(BigInt::to_string).collect(),
        values: values.iter().map(BigInt::to_string).collect(),
        injective,
    })
}

/// Evaluates a functional returned by [`discriminate_free_abelian`].
pub fn apply_functional(f: &AbelianFunctional, v: &[i64]) -> Option<BigInt> {
    let coeffs: Option<Vec<BigInt>> = f.coefficients.iter().map(|c| c.parse().ok()).collect();
    let coeffs = coeffs?;
    (coeffs.len() == v.len()).then(|| v.iter().zip(&coeffs).fold(BigInt::zero(), |acc, (&x, c)| acc + c * x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UvShadowReport {
    pub s: u32,
    pub r: u32,
    pub base: String,
    pub top: String,
    pub wreath_order: String,
    pub seed: u64,
    pub eps_images: Vec<Elem>,
    /// `η(z_j)`, as base elements of A.
    pub z_images: Vec<Elem>,
    pub basis_ok: bool,
    pub random_words: u64,
    pub random_mismatches: u64,
    pub kernel_words: u64,
    pub kernel_attempts: u64,
    pub max_syllables: usize,
    pub violations: Vec<String>,
    pub note: String,
}

impl UvShadowReport {
    pub fn passed(&self) -> bool {
        self.basis_ok && self.random_mismatches == 0 && self.violations.is_empty()
    }
}

/// Syllable cap for sampled words.
pub const UV_MAX_SYLLABLES: usize = 12;

/// Finite model of the maps on a free group with basis
/// `y_1..y_s, z_1..z_r` (variables `x_1..x_s` and `x_{s+1}..x_{s+r}`):
/// `ε` sends `y_i` to `eps_images[i]` in D and every `z_j` to 1;
/// `η` sends `y_i` to `ε(y_i)` in the top group of `W = A wr D` and `z_j` to
/// the `j`-th generator of A (cyclically) in the base. Checks `α∘η = ε` on
/// the basis and on `words` random words, then that `η(w) ∈ M` for `words`
/// sampled words `w` with `ε(w) = 1`.
pub fn theorem_uv_shadow(
    s: u32,
    r: u32,
    top: GroupRef,
    base: GroupRef,
    eps_images: &[Elem],
    words: u64,
    seed: u64,
) -> Result<UvShadowReport> {
    if eps_images.len() != s as usize {
        return Err(Error::Shape(format!("{} images for s = {s}", eps_images.len())));
    }
    if s + r == 0 {
        return Err(Error::InvalidParams("empty basis".into()));
    }
    if let Some(bad) = eps_images.iter().find(|d| !top.contains(d)) {
        return Err(Error::InvalidParams(format!("{bad:?} is not an element of {}", top.name())));
    }
    let w = WreathProduct::new(base.clone(), top.clone())?;
    let gens_a = base.generators();
    let z_images: Vec<Elem> = (0..r as usize)
        .map(|j| gens_a.get(j % gens_a.len().max(1)).cloned().unwrap_or_else(|| base.identity()))
        .collect();
    let eps_basis: Vec<Elem> = eps_images.iter().cloned().chain((0..r).map(|_| top.identity())).collect();
    let eta_basis: Vec<Elem> =
        eps_images.iter().map(|d| w.embed_top(d)).chain(z_images.iter().map(|a| w.embed_base(a))).collect();

    let vars = s + r;
    let basis_ok = (0..vars as usize).all(|i| w.projection_alpha(&eta_basis[i]) == eps_basis[i]);
    let mut report = UvShadowReport {
        s,
        r,
        base: base.name(),
        top: top.name(),
        wreath_order: w.order().to_string(),
        seed,
        eps_images: eps_images.to_vec(),
        z_images,
        basis_ok,
        random_words: 0,
        random_mismatches: 0,
        kernel_words: 0,
        kernel_attempts: 0,
        max_syllables: UV_MAX_SYLLABLES,
        violations: Vec::new(),
        note: "finite stand-in: A and D are finite groups and kernel words are sampled with bounded length".into(),
    };

    let mut rng = seeded(seed);
    for _ in 0..words {
        let word = GroupWord::random(vars, UV_MAX_SYLLABLES, 3, &mut rng);
        let eps = evaluate_word(&word, top.as_ref(), &eps_basis)?;
        let eta = evaluate_word(&word, &w, &eta_basis)?;
        report.random_words += 1;
        if w.projection_alpha(&eta) != eps {
            report.random_mismatches += 1;
            report.violations.push(format!("alpha(eta(w)) != eps(w) for w = {word}"));
        }
    }

    let attempt_cap = words.saturating_mul(100).max(100);
    while report.kernel_words < words && report.kernel_attempts < attempt_cap {
        report.kernel_attempts += 1;
        let word = kernel_candidate(report.kernel_attempts, s, r, top.as_ref(), &eps_basis, &mut rng)?;
        if !top.is_identity(&evaluate_word(&word, top.as_ref(), &eps_basis)?) {
            continue;
        }
        report.kernel_words += 1;
        let eta = evaluate_word(&word, &w, &eta_basis)?;
        if !w.in_base(&eta) {
            report.violations.push(format!("eta(w) outside the base for w = {word}"));
        }
    }
    if report.kernel_words < words {
        report.violations.push(format!("only {} kernel words found in {} attempts", report.kernel_words, attempt_cap));
    }
    Ok(report)
}

/// Candidate kernel words, cycling through four shapes: conjugates of a
/// `z_j`, commutators, `u^k` with `k` the order of `ε(u)`, and plain random
/// words (which the caller filters).
fn kernel_candidate(
    attempt: u64,
    s: u32,
    r: u32,
    top: &dyn FiniteGroup,
    eps_basis: &[Elem],
    rng: &mut dyn RngCore,
) -> Result<GroupWord> {
    let vars = s + r;
    let half = UV_MAX_SYLLABLES / 2;
    let mut u = || GroupWord::random(vars, half.max(1), 3, rng);
    Ok(match attempt % 4 {
        0 if r > 0 => {
            let conj = u();
            let z = GroupWord::var(s + 1 + (attempt / 4 % r as u64) as u32);
            conj.invert().concat(&z).concat(&conj)
        }
        1 => {
            let (a, b) = (u(), u());
            GroupWord::commutator(&a, &b)
        }
        2 => {
            let base = u();
            let k = top.element_order(&evaluate_word(&base, top, eps_basis)?);
            base.pow(k as i64)
        }
        _ => GroupWord::random(vars, UV_MAX_SYLLABLES, 3, &mut *rng),
    })
}
