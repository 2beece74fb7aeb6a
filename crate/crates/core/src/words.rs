//! Words in the free group on `x1, x2, …`.
//!
//! A [`GroupWord`] is kept in syllable normal form: maximal powers `x_k^e`
//! with `e ≠ 0` and no two adjacent syllables on the same variable, which is
//! exactly the freely reduced form.
//!
//! Grammar accepted by [`parse_word`]:
//!
//! ```text
//! word     := item*
//! item     := atom ('^' exponent)*
//! atom     := 'x' digits | '(' word ')' | '[' word ',' word ']' | '1'
//! exponent := '-'? (digits | name) | '(' '-'? (digits | name) ')'
//! ```
//!
//! Items are juxtaposed (whitespace and `*` are ignored between them),
//! `[u,v]` is the commutator `u⁻¹v⁻¹uv`, and every `name` must be bound in
//! the parameter map.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cap on the letter length of any word produced by parsing.
pub const MAX_PARSED_LENGTH: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub var: u32,
    pub exp: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct GroupWord {
    syllables: Vec<Syllable>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord::default()
    }

    /// The generator `x_var`.
    pub fn var(var: u32) -> Self {
        Self::power_of(var, 1)
    }

    pub fn power_of(var: u32, exp: i64) -> Self {
        assert!(var >= 1, "variables are numbered from 1");
        Self::from_syllables([Syllable { var, exp }])
    }

    /// Reduces an arbitrary syllable sequence.
    pub fn from_syllables<I: IntoIterator<Item = Syllable>>(syllables: I) -> Self {
        let mut out: Vec<Syllable> = Vec::new();
        for s in syllables {
            push_syllable(&mut out, s);
        }
        GroupWord { syllables: out }
    }

    /// A random word on `x_1..x_vars` with between 1 and `max_syllables`
    /// syllables, exponents in `±1..=max_exp`, reduced afterwards.
    pub fn random<R: Rng + ?Sized>(vars: u32, max_syllables: usize, max_exp: i64, rng: &mut R) -> Self {
        assert!(vars >= 1 && max_syllables >= 1 && max_exp >= 1);
        let n = rng.gen_range(1..=max_syllables);
        Self::from_syllables((0..n).map(|_| {
            let e = rng.gen_range(1..=max_exp);
            Syllable { var: rng.gen_range(1..=vars), exp: if rng.gen_bool(0.5) { e } else { -e } }
        }))
    }

    /// From signed letters: `k` is `x_k`, `-k` is `x_k⁻¹`.
    pub fn from_letters(letters: &[i32]) -> Self {
        Self::from_syllables(letters.iter().map(|&l| Syllable { var: l.unsigned_abs(), exp: l.signum() as i64 }))
    }

    pub fn letters(&self) -> Vec<i32> {
        self.syllables
            .iter()
            .flat_map(|s| {
                let l = if s.exp > 0 { s.var as i32 } else { -(s.var as i32) };
                std::iter::repeat_n(l, s.exp.unsigned_abs() as usize)
            })
            .collect()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Letter length.
    pub fn len(&self) -> u64 {
        self.syllables.iter().map(|s| s.exp.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Largest variable index occurring, 0 for the empty word.
    pub fn max_var(&self) -> u32 {
        self.syllables.iter().map(|s| s.var).max().unwrap_or(0)
    }

    /// Re-reduces the word. Words are always stored reduced, so this is the
    /// identity on values; it exists for callers that build raw syllables.
    pub fn free_reduce(&self) -> Self {
        Self::from_syllables(self.syllables.iter().copied())
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut out = self.syllables.clone();
        for &s in &other.syllables {
            push_syllable(&mut out, s);
        }
        GroupWord { syllables: out }
    }

    pub fn invert(&self) -> Self {
        GroupWord { syllables: self.syllables.iter().rev().map(|s| Syllable { var: s.var, exp: -s.exp }).collect() }
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Self {
        if let [s] = self.syllables.as_slice() {
            return Self::from_syllables([Syllable { var: s.var, exp: s.exp * k }]);
        }
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = Self::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Strips conjugating letters: the result `c` satisfies `w = u c u⁻¹`
    /// with `c` cyclically reduced.
    pub fn cyclic_reduce(&self) -> Self {
        let mut l = self.letters();
        let (mut a, mut b) = (0usize, l.len());
        while b >= a + 2 && l[a] == -l[b - 1] {
            a += 1;
            b -= 1;
        }
        let core = l.drain(a..b).collect::<Vec<_>>();
        Self::from_letters(&core)
    }

    /// Whether the two words are conjugate in the free group.
    pub fn conjugate_test(&self, other: &Self) -> bool {
        let a = self.cyclic_reduce().letters();
        let b = other.cyclic_reduce().letters();
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        let doubled: Vec<i32> = a.iter().chain(a.iter()).copied().collect();
        doubled.windows(b.len()).any(|w| w == b.as_slice())
    }

    /// `[u, v] = u⁻¹ v⁻¹ u v`.
    pub fn commutator(u: &Self, v: &Self) -> Self {
        u.invert().concat(&v.invert()).concat(u).concat(v)
    }
}

fn push_syllable(out: &mut Vec<Syllable>, s: Syllable) {
    if s.exp == 0 {
        return;
    }
    match out.last_mut() {
        Some(last) if last.var == s.var => {
            last.exp += s.exp;
            if last.exp == 0 {
                out.pop();
            }
        }
        _ => out.push(s),
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for (n, s) in self.syllables.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            match s.exp {
                1 => write!(f, "x{}", s.var)?,
                e => write!(f, "x{}^{}", s.var, e)?,
            }
        }
        Ok(())
    }
}

impl From<GroupWord> for String {
    fn from(w: GroupWord) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for GroupWord {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        parse_word(&s, &BTreeMap::new())
    }
}

/// Parameter bindings for exponents, e.g. `p ↦ 3`.
pub type Params = BTreeMap<String, i64>;

pub fn parse_word(text: &str, params: &Params) -> Result<GroupWord> {
    let mut parser = Parser { src: text.as_bytes(), pos: 0, params };
    let w = parser.word()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error(format!("unexpected '{}'", parser.src[parser.pos] as char)));
    }
    Ok(w)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    params: &'a Params,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_whitespace() || self.src[self.pos] == b'*') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> Result<GroupWord> {
        let mut w = GroupWord::empty();
        while let Some(c) = self.peek() {
            if c == b')' || c == b']' || c == b',' {
                break;
            }
            let item = self.item()?;
            w = w.concat(&item);
            if w.len() > MAX_PARSED_LENGTH {
                return Err(self.error("word too long"));
            }
        }
        Ok(w)
    }

    fn item(&mut self) -> Result<GroupWord> {
        let mut w = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let start = self.pos;
            let k = self.exponent()?;
            if k == 0 {
                return Err(Error::Parse { pos: start, msg: "zero exponent".into() });
            }
            if w.len().saturating_mul(k.unsigned_abs()) > MAX_PARSED_LENGTH {
                return Err(self.error("word too long"));
            }
            w = w.pow(k);
        }
        Ok(w)
    }

    fn atom(&mut self) -> Result<GroupWord> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                let n = self.digits().ok_or_else(|| self.error("expected variable index after 'x'"))?;
                if n == 0 || n > u32::MAX as i64 {
                    return Err(Error::Parse { pos: start, msg: format!("invalid variable index {n}") });
                }
                Ok(GroupWord::var(n as u32))
            }
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let u = self.word()?;
                self.expect(b',')?;
                let v = self.word()?;
                self.expect(b']')?;
                Ok(GroupWord::commutator(&u, &v))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(GroupWord::empty())
            }
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Option<i64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn exponent(&mut self) -> Result<i64> {
        let parenthesized = self.peek() == Some(b'(');
        if parenthesized {
            self.pos += 1;
        }
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
        }
        self.skip_ws();
        let value = match self.src.get(self.pos) {
            Some(c) if c.is_ascii_digit() => self.digits().ok_or_else(|| self.error("exponent out of range"))?,
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                *self
                    .params
                    .get(name)
                    .ok_or_else(|| Error::Parse { pos: start, msg: format!("unbound parameter '{name}'") })?
            }
            _ => return Err(self.error("expected exponent")),
        };
        if parenthesized {
            self.expect(b')')?;
        }
        Ok(if negative { -value } else { value })
    }
}

/// An ordered tuple of words in the free group of the given rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordTuple {
    rank: u32,
    words: Vec<GroupWord>,
}

impl WordTuple {
    pub fn new(rank: u32, words: Vec<GroupWord>) -> Result<Self> {
        if let Some(w) = words.iter().find(|w| w.max_var() > rank) {
            return Err(Error::InvalidParams(format!("word {w} exceeds ambient rank {rank}")));
        }
        Ok(WordTuple { rank, words })
    }

    /// `(x1, …, xn)`.
    pub fn standard_basis(rank: u32) -> Self {
        WordTuple { rank, words: (1..=rank).map(GroupWord::var).collect() }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn words(&self) -> &[GroupWord] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn total_length(&self) -> u64 {
        self.words.iter().map(GroupWord::len).sum()
    }
}

/// Elementary Nielsen transformation on a tuple `(u_1, …, u_k)` (0-based
/// indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum NielsenMove {
    /// `u_i ← u_i⁻¹`
    Invert { i: usize },
    /// `u_i ← u_i · u_j^{±1}`
    RightMultiply { i: usize, j: usize, inverse: bool },
    /// `u_i ← u_j^{±1} · u_i`
    LeftMultiply { i: usize, j: usize, inverse: bool },
    /// `u_i ↔ u_j`
    Swap { i: usize, j: usize },
}

impl NielsenMove {
    pub fn apply(&self, words: &mut [GroupWord]) {
        let factor = |w: &GroupWord, inverse: bool| if inverse { w.invert() } else { w.clone() };
        match *self {
            NielsenMove::Invert { i } => words[i] = words[i].invert(),
            NielsenMove::RightMultiply { i, j, inverse } => {
                assert_ne!(i, j);
                words[i] = words[i].concat(&factor(&words[j], inverse));
            }
            NielsenMove::LeftMultiply { i, j, inverse } => {
                assert_ne!(i, j);
                words[i] = factor(&words[j], inverse).concat(&words[i]);
            }
            NielsenMove::Swap { i, j } => words.swap(i, j),
        }
    }

    /// A uniformly chosen move on a tuple of size `k ≥ 2`.
    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let i = rng.gen_range(0..k);
        let mut j = rng.gen_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let inverse = rng.gen_bool(0.5);
        match rng.gen_range(0..4) {
            0 => NielsenMove::Invert { i },
            1 => NielsenMove::RightMultiply { i, j, inverse },
            2 => NielsenMove::LeftMultiply { i, j, inverse },
            _ => NielsenMove::Swap { i, j },
        }
    }
}

/// Replays a move log.
pub fn apply_moves(tuple: &WordTuple, log: &[NielsenMove]) -> WordTuple {
    let mut words = tuple.words.clone();
    for m in log {
        m.apply(&mut words);
    }
    WordTuple { rank: tuple.rank, words }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NielsenReduction {
    pub reduced: WordTuple,
    pub log: Vec<NielsenMove>,
    /// Positions whose word reduced to the identity.
    pub trivial: Vec<usize>,
}

/// Letter order `x1 < x1⁻¹ < x2 < x2⁻¹ < …`.
fn letter_key(l: i32) -> u32 {
    2 * (l.unsigned_abs() - 1) + u32::from(l < 0)
}

/// Order on words used to break length ties: length, then the smaller and
/// larger of the left halves of `u` and `u⁻¹`.
fn tie_key(w: &GroupWord) -> (u64, Vec<u32>, Vec<u32>) {
    let l = w.letters();
    let half = l.len().div_ceil(2);
    let left: Vec<u32> = l[..half].iter().map(|&x| letter_key(x)).collect();
    let right: Vec<u32> = l.iter().rev().take(half).map(|&x| letter_key(-x)).collect();
    let (a, b) = if left <= right { (left, right) } else { (right, left) };
    (w.len(), a, b)
}

/// Applies length-reducing elementary moves until none applies, breaking
/// length ties by the half-word order so that the result satisfies the
/// Nielsen conditions (no trivial entries apart from flagged ones, no
/// product of two entries shorter than either, no entry swallowed by its
/// neighbours). Each entry is finally replaced by whichever of `u`, `u⁻¹`
/// has the smaller letter sequence.
pub fn nielsen_reduce(tuple: &WordTuple) -> NielsenReduction {
    let mut words = tuple.words.clone();
    let mut log = Vec::new();
    let k = words.len();
    'outer: loop {
        for i in 0..k {
            if words[i].is_empty() {
                continue;
            }
            let current = tie_key(&words[i]);
            for j in 0..k {
                if j == i || words[j].is_empty() {
                    continue;
                }
                let candidates = [
                    NielsenMove::RightMultiply { i, j, inverse: true },
                    NielsenMove::RightMultiply { i, j, inverse: false },
                    NielsenMove::LeftMultiply { i, j, inverse: true },
                    NielsenMove::LeftMultiply { i, j, inverse: false },
                ];
                for mv in candidates {
                    let mut trial = words.clone();
                    mv.apply(&mut trial);
                    if tie_key(&trial[i]).cmp(&current) == Ordering::Less {
                        words = trial;
                        log.push(mv);
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    for (i, w) in words.iter_mut().enumerate() {
        let inv = w.invert();
        if !w.is_empty() && inv.letters().iter().map(|&x| letter_key(x)).lt(w.letters().iter().map(|&x| letter_key(x)))
        {
            *w = inv;
            log.push(NielsenMove::Invert { i });
        }
    }
    let trivial = words.iter().enumerate().filter(|(_, w)| w.is_empty()).map(|(i, _)| i).collect();
    NielsenReduction { reduced: WordTuple { rank: tuple.rank, words }, log, trivial }
}

/// Whether `w` lies in the subgroup generated by a Nielsen-reduced tuple.
///
/// Every reduced product `y_1 ⋯ y_k` of Nielsen-reduced generators begins
/// with the first `⌈|y_1|/2⌉` letters of `y_1`, so peeling candidate first
/// factors never lengthens the word; the search is a reachability walk over
/// words no longer than `w`.
pub fn contains_in_reduced(reduced: &WordTuple, w: &GroupWord) -> bool {
    let gens: Vec<Vec<i32>> =
        reduced.words.iter().filter(|g| !g.is_empty()).flat_map(|g| [g.letters(), g.invert().letters()]).collect();
    let mut visited: HashSet<Vec<i32>> = HashSet::new();
    let mut stack = vec![w.letters()];
    while let Some(cur) = stack.pop() {
        if cur.is_empty() {
            return true;
        }
        if !visited.insert(cur.clone()) {
            continue;
        }
        for g in &gens {
            let half = g.len().div_ceil(2);
            if cur.len() >= half && cur[..half] == g[..half] {
                let inv: Vec<i32> = g.iter().rev().map(|&x| -x).collect();
                let next = GroupWord::from_letters(&[inv, cur.clone()].concat()).letters();
                if next.len() <= cur.len() && !visited.contains(&next) {
                    stack.push(next);
                }
            }
        }
    }
    false
}

/// Whether `tuple` is a free basis of the free group of rank `n`.
pub fn is_basis(tuple: &WordTuple, n: u32) -> bool {
    if tuple.len() != n as usize || tuple.words.iter().any(|w| w.max_var() > n) {
        return false;
    }
    let reduced = nielsen_reduce(tuple);
    if !reduced.trivial.is_empty() {
        return false;
    }
    let mut vars: Vec<u32> = Vec::with_capacity(n as usize);
    for w in &reduced.reduced.words {
        match w.syllables() {
            [s] if s.exp.abs() == 1 => vars.push(s.var),
            _ => return false,
        }
    }
    vars.sort_unstable();
    vars == (1..=n).collect::<Vec<_>>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn w(s: &str) -> GroupWord {
        parse_word(s, &Params::new()).unwrap()
    }

    fn tuple(rank: u32, ws: &[&str]) -> WordTuple {
        WordTuple::new(rank, ws.iter().map(|s| w(s)).collect()).unwrap()
    }

    #[test]
    fn parse_examples() {
        let params: Params = [("p".to_string(), 3)].into();
        let v = parse_word("(x1^p x2^p)^p", &params).unwrap();
        assert_eq!(v.len(), 18);
        assert_eq!(v.to_string(), "x1^3 x2^3 x1^3 x2^3 x1^3 x2^3");
        assert_eq!(w("x1 x1^-1 x2"), GroupWord::var(2));
        assert_eq!(w("[x1,x2]"), w("x1^-1 x2^-1 x1 x2"));
        assert_eq!(w("1"), GroupWord::empty());
        assert_eq!(w("x1^(-2)"), GroupWord::power_of(1, -2));
        assert_eq!(w("x1^2^3"), GroupWord::power_of(1, 6));
        assert_eq!(w("(x1 x2)^-1"), w("x2^-1 x1^-1"));
        assert_eq!(parse_word("(x1^p x2)^-p", &params).unwrap().len(), 12);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_word("x1^0", &Params::new()), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_word("x1^q", &Params::new()), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("x0", &Params::new()), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("(x1", &Params::new()), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("x1 y", &Params::new()), Err(Error::Parse { pos: 3, .. })));
        let zero: Params = [("n".to_string(), 0)].into();
        assert!(parse_word("x1^n", &zero).is_err());
        assert!(parse_word("x1^999999999", &Params::new()).is_err());
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(w("x1 x2 x1^-1").cyclic_reduce(), w("x2"));
        assert_eq!(w("x1 x2 x3 x2^-1 x1^-1").cyclic_reduce(), w("x3"));
        assert!(w("x1 x2").conjugate_test(&w("x2 x1")));
        assert!(w("x1^2 x2").conjugate_test(&w("x1 x2 x1")));
        assert!(!w("x1 x2").conjugate_test(&w("x1 x2^-1")));
        assert!(GroupWord::empty().conjugate_test(&w("x1 x1^-1")));
        let (a, b) = (w("x1 x2^2"), w("x2^-1 x3"));
        assert_eq!(a.concat(&b).invert(), b.invert().concat(&a.invert()));
        assert_eq!(a.concat(&b), w("x1 x2 x3"));
    }

    #[test]
    fn nielsen_examples() {
        let r = nielsen_reduce(&tuple(2, &["x1 x2", "x2"]));
        assert_eq!(r.reduced.words(), &[w("x1"), w("x2")]);
        assert_eq!(r.log.len(), 1);

        let r = nielsen_reduce(&tuple(1, &["x1", "x1"]));
        assert_eq!(r.reduced.words(), &[GroupWord::empty(), w("x1")]);
        assert_eq!(r.trivial, vec![0]);

        let input = tuple(2, &["x2", "x1 x2 x1^-1", "x1"]);
        let r = nielsen_reduce(&input);
        assert_eq!(apply_moves(&input, &r.log), r.reduced);
        for u in input.words() {
            assert!(contains_in_reduced(&r.reduced, u), "{u}");
        }
        assert!(!contains_in_reduced(&nielsen_reduce(&tuple(2, &["x1^2", "x2"])).reduced, &w("x1")));
    }

    #[test]
    fn basis_examples() {
        assert!(is_basis(&tuple(2, &["x1 x2", "x2"]), 2));
        assert!(!is_basis(&tuple(2, &["x1^2", "x2"]), 2));
        assert!(!is_basis(&tuple(2, &["x1", "x1"]), 2));
        assert!(!is_basis(&tuple(3, &["x1", "x2"]), 3));
        assert!(is_basis(&tuple(3, &["x3 x1", "x2^-1", "x1 x2"]), 3));
        assert!(!is_basis(&tuple(2, &["x1 x2 x1^-1 x2^-1", "x2"]), 2));
    }

    #[test]
    fn random_moves_preserve_basis() {
        let mut rng = seeded(17);
        for trial in 0..50 {
            let n = 2 + trial % 3;
            let mut t = WordTuple::standard_basis(n as u32);
            for _ in 0..30 {
                let mv = NielsenMove::random(n, &mut rng);
                t = apply_moves(&t, &[mv]);
            }
            assert!(is_basis(&t, n as u32), "{t:?}");
            let r = nielsen_reduce(&t);
            assert_eq!(apply_moves(&t, &r.log), r.reduced);
        }
    }

    #[test]
    fn reduced_output_is_nielsen_reduced() {
        let mut rng = seeded(23);
        for _ in 0..40 {
            let k = rng.gen_range(2..5);
            let words: Vec<GroupWord> = (0..k)
                .map(|_| {
                    let letters: Vec<i32> = (0..rng.gen_range(1..7))
                        .map(|_| rng.gen_range(1..4) * if rng.gen_bool(0.5) { 1 } else { -1 })
                        .collect();
                    GroupWord::from_letters(&letters)
                })
                .collect();
            let t = WordTuple::new(3, words).unwrap();
            let r = nielsen_reduce(&t);
            let ws: Vec<&GroupWord> = r.reduced.words().iter().filter(|u| !u.is_empty()).collect();
            // N1: no product of two entries is shorter than either factor.
            for (a, u) in ws.iter().enumerate() {
                for (b, v) in ws.iter().enumerate() {
                    if a == b {
                        continue;
                    }
                    for vv in [(*v).clone(), v.invert()] {
                        let prod = u.concat(&vv);
                        if !prod.is_empty() {
                            assert!(prod.len() >= u.len() && prod.len() >= v.len(), "{u} · {vv}");
                        }
                    }
                }
            }
            for u in t.words() {
                assert!(contains_in_reduced(&r.reduced, u), "{u} not in {:?}", r.reduced);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let t = tuple(2, &["x1 x2^-3", "x2"]);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"rank":2,"words":["x1 x2^-3","x2"]}"#);
        assert_eq!(serde_json::from_str::<WordTuple>(&s).unwrap(), t);
        assert!(WordTuple::new(1, vec![w("x2")]).is_err());
    }

    fn word_strategy() -> impl Strategy<Value = GroupWord> {
        proptest::collection::vec((1i32..4, any::<bool>()), 0..12).prop_map(|v| {
            GroupWord::from_letters(&v.into_iter().map(|(x, s)| if s { x } else { -x }).collect::<Vec<_>>())
        })
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(raw in proptest::collection::vec((1u32..4, -3i64..4), 0..10)) {
            let syl: Vec<Syllable> = raw.iter().map(|&(var, exp)| Syllable { var, exp }).collect();
            let naive_len: u64 = syl.iter().map(|s| s.exp.unsigned_abs()).sum();
            let w = GroupWord::from_syllables(syl);
            prop_assert_eq!(w.free_reduce(), w.clone());
            prop_assert!(w.len() <= naive_len);
            prop_assert!(w.syllables().windows(2).all(|p| p[0].var != p[1].var));
            prop_assert_eq!(parse_word(&w.to_string(), &Params::new()).unwrap(), w);
        }

        #[test]
        fn inverse_is_anti_homomorphism(a in word_strategy(), b in word_strategy()) {
            prop_assert_eq!(a.concat(&b).invert(), b.invert().concat(&a.invert()));
            prop_assert!(a.concat(&a.invert()).is_empty());
            prop_assert!(a.conjugate_test(&b.concat(&a).concat(&b.invert())));
        }

        #[test]
        fn basis_answer_invariant_under_moves(
            words in proptest::collection::vec(word_strategy(), 2..4),
            seed in any::<u64>(),
        ) {
            let t = WordTuple::new(3, words).unwrap();
            let n = t.len() as u32;
            let mut rng = seeded(seed);
            let moved = apply_moves(&t, &(0..10).map(|_| NielsenMove::random(t.len(), &mut rng)).collect::<Vec<_>>());
            // Both questions are asked in rank n only when all words fit.
            if t.words().iter().all(|w| w.max_var() <= n) {
                prop_assert_eq!(is_basis(&t, n), is_basis(&moved, n));
            }
        }
    }
}
