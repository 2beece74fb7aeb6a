//! Group laws evaluated in finite groups.
//!
//! Exhaustive checks walk assignments in lexicographic order of the
//! enumerated elements (variable `x1` most significant) and report the least
//! failing assignment, so the verdict does not depend on how the sweep is
//! split across threads.

use std::collections::HashSet;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{power_within, Elem, FiniteGroup, ENUMERATION_LIMIT};
use crate::rng::seeded;
use crate::words::{GroupWord, Syllable};

/// Maximum number of assignments an exhaustive check may evaluate.
pub const EXHAUSTIVE_BUDGET: u64 = 10_000_000;

/// Default number of random assignments.
pub const DEFAULT_TRIALS: usize = 10_000;

/// Value of `w` under `x_k ↦ assignment[k - 1]`.
pub fn evaluate_word(w: &GroupWord, g: &dyn FiniteGroup, assignment: &[Elem]) -> Result<Elem> {
    let mut acc = g.identity();
    for &Syllable { var, exp } in w.syllables() {
        let x = assignment.get(var as usize - 1).ok_or(Error::MissingVariable { var, given: assignment.len() })?;
        acc = g.multiply(&acc, &g.power(x, exp));
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum LawMode {
    Exhaustive,
    Randomized {
        trials: usize,
        seed: u64,
    },
    /// Exhaustive when within [`EXHAUSTIVE_BUDGET`], randomized otherwise.
    Auto {
        trials: usize,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    NoCounterexampleFound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawCheckReport {
    pub law: String,
    pub group: String,
    pub mode: LawMode,
    pub assignments_checked: u64,
    pub verdict: Verdict,
    pub counterexample: Option<Vec<Elem>>,
    pub counterexample_value: Option<Elem>,
}

/// Checks `w = 1` in `g`.
pub fn check_law(g: &dyn FiniteGroup, w: &GroupWord, mode: LawMode) -> Result<LawCheckReport> {
    let vars = w.max_var();
    let enumerable = vars == 0 || g.order() <= num_bigint::BigUint::from(ENUMERATION_LIMIT);
    let within = enumerable && power_within(g, vars, EXHAUSTIVE_BUDGET);
    let mode = match mode {
        LawMode::Auto { trials, seed } if !within => LawMode::Randomized { trials, seed },
        LawMode::Auto { .. } => LawMode::Exhaustive,
        m => m,
    };
    let mut report = LawCheckReport {
        law: w.to_string(),
        group: g.name(),
        mode,
        assignments_checked: 0,
        verdict: Verdict::Holds,
        counterexample: None,
        counterexample_value: None,
    };
    let e = g.identity();
    match mode {
        LawMode::Exhaustive => {
            if !within {
                return Err(Error::Budget(format!(
                    "|{}|^{vars} exceeds {EXHAUSTIVE_BUDGET} assignments; use randomized mode",
                    g.name()
                )));
            }
            let elems = if vars == 0 { Vec::new() } else { g.elements(ENUMERATION_LIMIT)? };
            let n = elems.len() as u64;
            let total = n.pow(vars);
            let assignment = |mut idx: u64| -> Vec<Elem> {
                let mut out = vec![Vec::new(); vars as usize];
                for slot in out.iter_mut().rev() {
                    *slot = elems[(idx % n) as usize].clone();
                    idx /= n;
                }
                out
            };
            let failure = (0..total)
                .into_par_iter()
                .find_first(|&idx| evaluate_word(w, g, &assignment(idx)).map(|v| v != e).unwrap_or(true));
            report.assignments_checked = failure.map_or(total, |i| i + 1);
            if let Some(idx) = failure {
                let a = assignment(idx);
                report.counterexample_value = Some(evaluate_word(w, g, &a)?);
                report.counterexample = Some(a);
                report.verdict = Verdict::Fails;
            }
        }
        LawMode::Randomized { trials, seed } => {
            let mut rng = seeded(seed);
            report.verdict = Verdict::NoCounterexampleFound;
            for t in 0..trials {
                let a: Vec<Elem> = (0..vars).map(|_| g.random_element(&mut rng)).collect();
                let v = evaluate_word(w, g, &a)?;
                if v != e {
                    report.assignments_checked = t as u64 + 1;
                    report.counterexample = Some(a);
                    report.counterexample_value = Some(v);
                    report.verdict = Verdict::Fails;
                    return Ok(report);
                }
            }
            report.assignments_checked = trials as u64;
        }
        LawMode::Auto { .. } => unreachable!("resolved above"),
    }
    Ok(report)
}

/// A subgroup, as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    pub order: u64,
    pub elements: Vec<Elem>,
}

impl Subgroup {
    fn from_set(set: HashSet<Elem>) -> Self {
        let mut elements: Vec<Elem> = set.into_iter().collect();
        elements.sort();
        Subgroup { order: elements.len() as u64, elements }
    }

    pub fn contains(&self, x: &Elem) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Least common multiple of element orders.
    pub fn exponent(&self, g: &dyn FiniteGroup) -> u64 {
        self.elements.iter().fold(1, |acc, x| acc.lcm(&g.element_order(x)))
    }
}

/// Closes `set` (containing the identity) under right multiplication by `gens`.
fn close_under(g: &dyn FiniteGroup, set: &mut HashSet<Elem>, list: &mut Vec<Elem>, gens: &[Elem]) {
    let mut i = 0;
    while i < list.len() {
        for s in gens {
            let y = g.multiply(&list[i], s);
            if set.insert(y.clone()) {
                list.push(y);
            }
        }
        i += 1;
    }
}

/// The subgroup generated by `gens`.
pub fn generated_subgroup(g: &dyn FiniteGroup, gens: &[Elem]) -> Subgroup {
    Subgroup::from_set(generate(g, gens).0)
}

fn generate(g: &dyn FiniteGroup, gens: &[Elem]) -> (HashSet<Elem>, Vec<Elem>) {
    let e = g.identity();
    let mut set: HashSet<Elem> = [e.clone()].into();
    let mut list = vec![e];
    let mut chosen: Vec<Elem> = Vec::new();
    for s in gens {
        if set.contains(s) {
            continue;
        }
        chosen.push(s.clone());
        close_under(g, &mut set, &mut list, &chosen);
    }
    (set, chosen)
}

/// The smallest normal subgroup containing `gens`.
pub fn normal_closure(g: &dyn FiniteGroup, gens: &[Elem]) -> Subgroup {
    let (mut set, mut chosen) = generate(g, gens);
    let conjugators: Vec<Elem> = g.generators().iter().flat_map(|x| [x.clone(), g.invert(x)]).collect();
    loop {
        let missing = chosen
            .iter()
            .flat_map(|c| conjugators.iter().map(move |x| (c, x)))
            .map(|(c, x)| g.conjugate(c, x))
            .find(|y| !set.contains(y));
        match missing {
            Some(y) => {
                chosen.push(y);
                let mut list: Vec<Elem> = set.iter().cloned().collect();
                list.sort();
                close_under(g, &mut set, &mut list, &chosen);
            }
            None => return Subgroup::from_set(set),
        }
    }
}

/// All values of `w` over all assignments.
pub fn word_values(g: &dyn FiniteGroup, w: &GroupWord) -> Result<HashSet<Elem>> {
    let vars = w.max_var();
    if !power_within(g, vars, EXHAUSTIVE_BUDGET) {
        return Err(Error::Budget(format!("|{}|^{vars} word evaluations", g.name())));
    }
    let elems = g.elements(ENUMERATION_LIMIT)?;
    let n = elems.len() as u64;
    let total = n.pow(vars);
    let values: Vec<Elem> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut a = vec![Vec::new(); vars as usize];
            for slot in a.iter_mut().rev() {
                *slot = elems[(idx % n) as usize].clone();
                idx /= n;
            }
            evaluate_word(w, g, &a).expect("all variables assigned")
        })
        .collect();
    Ok(values.into_iter().collect())
}

/// The verbal subgroup of `g` for the given words: generated by all their
/// values, closed under conjugation.
pub fn verbal_closure(g: &dyn FiniteGroup, words: &[GroupWord]) -> Result<Subgroup> {
    let mut values: Vec<Elem> = Vec::new();
    for w in words {
        values.extend(word_values(g, w)?);
    }
    values.sort();
    values.dedup();
    Ok(normal_closure(g, &values))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub group: String,
    pub m: u64,
    pub n: u64,
    /// Order of the normal closure of n-th powers.
    pub verbal_order: u64,
    pub member: bool,
    /// Least element of the verbal subgroup whose order does not divide `m`.
    pub witness: Option<Elem>,
}

/// Whether `g` lies in `B_m · B_n`: the subgroup generated by n-th powers
/// must have exponent dividing `m`.
pub fn burnside_product_membership(g: &dyn FiniteGroup, m: u64, n: u64) -> Result<MembershipReport> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParams("exponents must be positive".into()));
    }
    let verbal = verbal_closure(g, &[GroupWord::power_of(1, n as i64)])?;
    let e = g.identity();
    let witness = verbal.elements.iter().find(|h| g.power(h, m as i64) != e).cloned();
    Ok(MembershipReport { group: g.name(), m, n, verbal_order: verbal.order, member: witness.is_none(), witness })
}

/// The law family `(x_1^n ⋯ x_k^n)^m = 1`, `k = 1, 2, …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Scheme {
    pub outer: u64,
    pub inner: u64,
}

impl Scheme {
    /// `x^8 = 1, (x_1^2 x_2^2)^4 = 1, …`
    pub fn b4b2() -> Self {
        Scheme { outer: 4, inner: 2 }
    }

    /// `x^{p^2} = 1, (x_1^p x_2^p)^p = 1, …`
    pub fn bpbp(p: u64) -> Self {
        Scheme { outer: p, inner: p }
    }

    /// The k-th law of the scheme.
    pub fn law(&self, k: u32) -> GroupWord {
        let inner = GroupWord::from_syllables((1..=k).map(|var| Syllable { var, exp: self.inner as i64 }));
        inner.pow(self.outer as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchemeReport {
    pub group: String,
    pub scheme: Scheme,
    /// Least k after which k-fold products of n-th powers stop growing.
    pub stabilization_index: u32,
    /// Whether the k-th law holds, for k = 1..=stabilization_index.
    pub satisfied_per_k: Vec<bool>,
    pub scheme_satisfied: bool,
    pub membership: MembershipReport,
    pub equivalent: bool,
}

/// Checks, for one finite group, that satisfying every law of the scheme is
/// equivalent to membership in `B_outer · B_inner`.
///
/// The k-th law holds iff every product of k inner-th powers has order
/// dividing `outer`. Those product sets grow with k (the identity is a
/// power) and stabilize by `|G|`, so finitely many laws decide the scheme.
pub fn scheme_equivalence_check(g: &dyn FiniteGroup, scheme: Scheme) -> Result<SchemeReport> {
    let elems = g.elements(ENUMERATION_LIMIT)?;
    let e = g.identity();
    let powers: Vec<Elem> = {
        let set: HashSet<Elem> = elems.iter().map(|x| g.power(x, scheme.inner as i64)).collect();
        let mut v: Vec<Elem> = set.into_iter().collect();
        v.sort();
        v
    };
    let satisfied = |set: &HashSet<Elem>| set.iter().all(|y| g.power(y, scheme.outer as i64) == e);
    let mut products: HashSet<Elem> = powers.iter().cloned().collect();
    let mut satisfied_per_k = vec![satisfied(&products)];
    let mut k = 1u32;
    loop {
        let next: HashSet<Elem> = products.iter().flat_map(|a| powers.iter().map(move |q| g.multiply(a, q))).collect();
        if next.len() == products.len() {
            break;
        }
        products = next;
        k += 1;
        satisfied_per_k.push(satisfied(&products));
    }
    let scheme_satisfied = satisfied_per_k.iter().all(|&b| b);
    let membership = burnside_product_membership(g, scheme.outer, scheme.inner)?;
    Ok(SchemeReport {
        group: g.name(),
        scheme,
        stabilization_index: k,
        satisfied_per_k,
        scheme_satisfied,
        equivalent: scheme_satisfied == membership.member,
        membership,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoprimeReport {
    pub group: String,
    pub m: u64,
    pub n: u64,
    pub law: LawCheckReport,
    pub law_holds: bool,
    pub membership: MembershipReport,
    pub equivalent: bool,
}

/// For coprime `m, n`: `g` satisfies `(x_1^n x_2^n)^m = 1` iff it lies in
/// `B_m · B_n`.
pub fn coprime_single_law_check(g: &dyn FiniteGroup, m: u64, n: u64) -> Result<CoprimeReport> {
    if m == 0 || n == 0 || m.gcd(&n) != 1 {
        return Err(Error::InvalidParams(format!("m = {m} and n = {n} must be positive and coprime")));
    }
    let w = Scheme { outer: m, inner: n }.law(2);
    let law = check_law(g, &w, LawMode::Exhaustive)?;
    let law_holds = law.verdict == Verdict::Holds;
    let membership = burnside_product_membership(g, m, n)?;
    Ok(CoprimeReport { group: g.name(), m, n, law, law_holds, equivalent: law_holds == membership.member, membership })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{Cyclic, DirectProduct, Quaternion, Symmetric};
    use crate::unitri::{UnitriGroup, UtParams};
    use crate::words::{parse_word, Params};
    use std::sync::Arc;

    fn w(s: &str) -> GroupWord {
        parse_word(s, &Params::new()).unwrap()
    }

    fn s3() -> Symmetric {
        Symmetric::new(3).unwrap()
    }

    #[test]
    fn evaluation() {
        let z6 = Cyclic::new(6).unwrap();
        assert_eq!(evaluate_word(&w("x1^2 x2^2"), &z6, &[vec![1], vec![2]]).unwrap(), vec![0]);
        assert_eq!(evaluate_word(&GroupWord::empty(), &z6, &[]).unwrap(), vec![0]);
        assert_eq!(
            evaluate_word(&w("x1 x3"), &z6, &[vec![1], vec![2]]),
            Err(Error::MissingVariable { var: 3, given: 2 })
        );
    }

    #[test]
    fn evaluation_is_a_homomorphism() {
        let g = s3();
        let mut rng = seeded(3);
        let (a, b) = (w("x1^2 x2 x3^-1"), w("x2^-3 x1 x3"));
        for _ in 0..50 {
            let asg: Vec<Elem> = (0..3).map(|_| g.random_element(&mut rng)).collect();
            let lhs = evaluate_word(&a.concat(&b), &g, &asg).unwrap();
            let rhs = g.multiply(&evaluate_word(&a, &g, &asg).unwrap(), &evaluate_word(&b, &g, &asg).unwrap());
            assert_eq!(lhs, rhs);
            assert_eq!(evaluate_word(&a.invert(), &g, &asg).unwrap(), g.invert(&evaluate_word(&a, &g, &asg).unwrap()));
        }
    }

    #[test]
    fn laws_in_s3() {
        let r = check_law(&s3(), &w("(x1^2 x2^2)^3"), LawMode::Exhaustive).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.assignments_checked, 36);

        let r = check_law(&s3(), &w("x1^3"), LawMode::Exhaustive).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let cx = &r.counterexample.unwrap()[0];
        assert_eq!(s3().element_order(cx), 2);
        assert_eq!(cx, &vec![0, 2, 1]);
    }

    #[test]
    fn randomized_and_exhaustive_agree() {
        let groups: Vec<Arc<dyn FiniteGroup>> = vec![
            Arc::new(s3()),
            Arc::new(Quaternion),
            Arc::new(Cyclic::new(8).unwrap()),
            Arc::new(DirectProduct::new(Arc::new(Cyclic::new(2).unwrap()), Arc::new(s3()))),
        ];
        let laws = ["x1^6", "x1^4", "[x1,x2]", "(x1^2 x2^2)^3", "[x1^2,x2]", "x1^2"];
        for g in &groups {
            for l in laws {
                let ex = check_law(g.as_ref(), &w(l), LawMode::Exhaustive).unwrap();
                let rnd = check_law(g.as_ref(), &w(l), LawMode::Randomized { trials: 2000, seed: 5 }).unwrap();
                assert_eq!(ex.verdict == Verdict::Holds, rnd.verdict != Verdict::Fails, "{} {l}", g.name());
            }
        }
    }

    #[test]
    fn budget_errors() {
        let g = Symmetric::new(8).unwrap();
        assert!(matches!(check_law(&g, &w("[x1,x2]"), LawMode::Exhaustive), Err(Error::Budget(_))));
        let r = check_law(&g, &w("[x1,x2]"), LawMode::Auto { trials: 100, seed: 1 }).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(matches!(r.mode, LawMode::Randomized { .. }));
    }

    #[test]
    fn verbal_closures() {
        let a3 = verbal_closure(&s3(), &[w("x1^2")]).unwrap();
        assert_eq!(a3.order, 3);
        assert!(a3.elements.iter().all(|x| s3().element_order(x) != 2));
        let z8 = Cyclic::new(8).unwrap();
        assert_eq!(verbal_closure(&z8, &[w("x1^2")]).unwrap().order, 4);
        assert_eq!(verbal_closure(&z8, &[w("[x1,x2]")]).unwrap().order, 1);
        assert_eq!(verbal_closure(&s3(), &[w("[x1,x2]")]).unwrap().order, 3);
        assert_eq!(verbal_closure(&Quaternion, &[w("x1^2")]).unwrap().order, 2);
    }

    #[test]
    fn closures_are_normal() {
        let s4 = Symmetric::new(4).unwrap();
        let all = s4.elements(100).unwrap();
        for word in ["x1^2", "x1^3", "[x1,x2]", "x1^2 x2^2"] {
            let n = verbal_closure(&s4, &[w(word)]).unwrap();
            for h in &n.elements {
                for g in &all {
                    assert!(n.contains(&s4.conjugate(h, g)));
                }
            }
        }
        let sub = generated_subgroup(&s4, &[vec![1, 0, 2, 3]]);
        assert_eq!(sub.order, 2);
        assert_eq!(normal_closure(&s4, &[vec![1, 0, 2, 3]]).order, 24);
    }

    #[test]
    fn memberships() {
        assert!(burnside_product_membership(&s3(), 3, 2).unwrap().member);
        let r = burnside_product_membership(&s3(), 2, 2).unwrap();
        assert!(!r.member);
        assert_eq!(s3().element_order(&r.witness.unwrap()), 3);
        let q = burnside_product_membership(&Quaternion, 2, 2).unwrap();
        assert!(q.member);
        assert_eq!(q.verbal_order, 2);
    }

    #[test]
    fn schemes() {
        let z8 = Cyclic::new(8).unwrap();
        let r = scheme_equivalence_check(&z8, Scheme::b4b2()).unwrap();
        assert!(r.scheme_satisfied && r.membership.member && r.equivalent);

        let trivial = Cyclic::trivial();
        let r = scheme_equivalence_check(&trivial, Scheme::bpbp(3)).unwrap();
        assert_eq!(r.stabilization_index, 1);
        assert!(r.scheme_satisfied && r.equivalent);

        let r = scheme_equivalence_check(&s3(), Scheme { outer: 3, inner: 2 }).unwrap();
        assert!(r.equivalent && r.scheme_satisfied);
        let r = scheme_equivalence_check(&s3(), Scheme::bpbp(3)).unwrap();
        assert!(r.equivalent);
        assert!(!r.scheme_satisfied);
    }

    #[test]
    fn scheme_laws_match_direct_checks() {
        for g in [&s3() as &dyn FiniteGroup, &Quaternion, &Cyclic::new(12).unwrap()] {
            for scheme in [Scheme::b4b2(), Scheme::bpbp(3), Scheme { outer: 2, inner: 2 }] {
                let r = scheme_equivalence_check(g, scheme).unwrap();
                for (k, &sat) in r.satisfied_per_k.iter().enumerate().take(2) {
                    let direct = check_law(g, &scheme.law(k as u32 + 1), LawMode::Exhaustive).unwrap();
                    assert_eq!(sat, direct.verdict == Verdict::Holds);
                }
            }
        }
        assert_eq!(Scheme::bpbp(3).law(1), w("x1^9"));
        assert_eq!(Scheme::b4b2().law(2), w("(x1^2 x2^2)^4"));
    }

    #[test]
    fn coprime_checks() {
        let r = coprime_single_law_check(&s3(), 3, 2).unwrap();
        assert!(r.law_holds && r.membership.member && r.equivalent);
        let r = coprime_single_law_check(&Cyclic::new(4).unwrap(), 3, 2).unwrap();
        assert!(!r.law_holds && !r.membership.member && r.equivalent);
        let r = coprime_single_law_check(&Cyclic::trivial(), 5, 7).unwrap();
        assert!(r.law_holds && r.membership.member);
        assert!(coprime_single_law_check(&s3(), 2, 4).is_err());
    }

    #[test]
    fn unitriangular_shadow_law() {
        let g = UnitriGroup::new(UtParams::lemma(3, 2).unwrap());
        let r = check_law(&g, &w("(x1^3 x2^3 x3^3 x4^3)^3"), LawMode::Randomized { trials: 300, seed: 1 }).unwrap();
        assert_eq!(r.verdict, Verdict::NoCounterexampleFound);
        let r = check_law(&g, &w("x1^3"), LawMode::Randomized { trials: 300, seed: 1 }).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
    }
}
