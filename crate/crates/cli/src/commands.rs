use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use varieties_core::groups::{verify_axioms, ENUMERATION_LIMIT};
use varieties_core::identity::{
    burnside_product_membership, check_law, coprime_single_law_check, scheme_equivalence_check, verbal_closure, Scheme,
};
use varieties_core::rankcert::{
    counting_inequality, find_avoiding_line, group_shadow_check, verify_certificate, LineSearch, RankTable,
};
use varieties_core::rng::seeded;
use varieties_core::unitri::{
    corner_dimension, group_order, pth_power_subgroup_order, verify_verbal_subgroup, verify_verbal_subgroup_exhaustive,
    EXHAUSTIVE_ORDER_LIMIT,
};
use varieties_core::words::{is_basis, nielsen_reduce, parse_word, Params};
use varieties_core::wreath::{
    discriminate, discriminate_free_abelian, theorem_uv_shadow, verify_homomorphism, Discrimination,
};
use varieties_core::{
    parse_group, Elem, Error, FiniteGroup, GroupWord, LawMode, RankCertificate, RankSearchParams, Result, UnitriMatrix,
    UtParams, Verdict, WordTuple, WreathProduct,
};

use crate::args::*;
use crate::report::{Finding, Outcome};

/// Runs a subcommand; returns its name, the config echo and the finding.
pub fn run(command: &Command) -> Result<(&'static str, Value, Finding)> {
    Ok(match command {
        Command::Ut(UtCommand::VerifyLemma1(a)) => ("ut verify-lemma1", config(a), ut_verify(a)?),
        Command::Ut(UtCommand::Power(a)) => ("ut power", config(a), ut_power(a)?),
        Command::Ut(UtCommand::Order(a)) => ("ut order", config(a), ut_order(a)?),
        Command::Rank(RankCommand::FindLine(a)) => ("rank find-line", config(a), find_line(a)?),
        Command::Rank(RankCommand::Verify(a)) => ("rank verify", config(a), rank_verify(a)?),
        Command::Rank(RankCommand::Inequality(a)) => ("rank inequality", config(a), inequality(a)?),
        Command::Rank(RankCommand::Classify(a)) => ("rank classify", config(a), classify(a)?),
        Command::Rank(RankCommand::Shadow(a)) => ("rank shadow", config(a), shadow(a)?),
        Command::Identity(IdentityCommand::Check(a)) => ("identity check", config(a), identity_check(a)?),
        Command::Identity(IdentityCommand::Verbal(a)) => ("identity verbal", config(a), identity_verbal(a)?),
        Command::Identity(IdentityCommand::Member(a)) => ("identity member", config(a), identity_member(a)?),
        Command::Identity(IdentityCommand::Scheme(a)) => ("identity scheme", config(a), identity_scheme(a)?),
        Command::Identity(IdentityCommand::Coprime(a)) => ("identity coprime", config(a), identity_coprime(a)?),
        Command::Wreath(WreathCommand::Build(a)) => ("wreath build", config(a), wreath_build(a)?),
        Command::Wreath(WreathCommand::Discriminate(a)) => ("wreath discriminate", config(a), wreath_discriminate(a)?),
        Command::Wreath(WreathCommand::Abelian(a)) => ("wreath abelian", config(a), wreath_abelian(a)?),
        Command::Wreath(WreathCommand::UvShadow(a)) => ("wreath uv-shadow", config(a), uv_shadow(a)?),
        Command::Words(WordsCommand::Nielsen(a)) => ("words nielsen", config(a), words_nielsen(a)?),
        Command::Words(WordsCommand::Parse(a)) => ("words parse", config(a), words_parse(a)?),
    })
}

fn config(args: &impl Serialize) -> Value {
    serde_json::to_value(args).expect("arguments serialize")
}

fn params_map(params: &[(String, i64)]) -> Params {
    params.iter().cloned().collect::<BTreeMap<_, _>>()
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidParams(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Elements written as `a,b,c;d,e,f`.
fn parse_elements(text: &str, g: &dyn FiniteGroup) -> Result<Vec<Elem>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let elem: Elem = item
                .split(',')
                .map(|c| c.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidParams(format!("element '{item}': {e}")))?;
            if !g.contains(&elem) {
                return Err(Error::InvalidParams(format!("'{item}' is not an element of {}", g.name())));
            }
            Ok(elem)
        })
        .collect()
}

fn ut_verify(a: &UtVerifyArgs) -> Result<Finding> {
    let params = UtParams::lemma(a.p, a.m)?;
    let sampled = verify_verbal_subgroup(params, a.trials, a.seed)?;
    let exhaustive = if a.exhaustive { Some(verify_verbal_subgroup_exhaustive(params)?) } else { None };
    let dim = corner_dimension(&params)?;
    let inequality = counting_inequality(a.p, a.m as u64)?;
    let mut ok = sampled.verified();
    if let Some(ex) = &exhaustive {
        let expected = pth_power_subgroup_order(&params)?.to_string();
        ok &= ex.verified() && ex.verbal_order.as_deref() == Some(expected.as_str());
    }
    Ok(Finding::new(
        Outcome::from_bool(ok),
        json!({
            "group": format!("ut:{}:{}:{}", params.p, params.l, params.m),
            "order": group_order(&params).to_string(),
            "pth_powers_dimension": dim.to_string(),
            "sampled": sampled,
            "exhaustive": exhaustive,
            // Informational: the counting argument for an avoiding line needs it.
            "counting_inequality": inequality,
        }),
    ))
}

fn ut_power(a: &UtPowerArgs) -> Result<Finding> {
    let params = UtParams::lemma(a.p, a.m)?;
    let matrix: UnitriMatrix = match &a.input {
        Some(path) => {
            let m: UnitriMatrix = serde_json::from_value(read_json(path)?)?;
            if m.params() != params {
                return Err(Error::InvalidParams(format!("matrix is UT{:?}, expected UT{:?}", m.params(), params)));
            }
            m
        }
        None => UnitriMatrix::random(params, &mut seeded(a.seed)),
    };
    let fast = matrix.pth_power_fast()?;
    let slow = matrix.power(a.p as u64);
    Ok(Finding::new(
        Outcome::from_bool(fast == slow),
        json!({ "matrix": matrix, "fast": fast, "repeated": slow, "agree": fast == slow }),
    ))
}

fn ut_order(a: &UtOrderArgs) -> Result<Finding> {
    let params = UtParams::new(a.p, a.l.unwrap_or(a.p as usize + 1), a.m)?;
    let order = group_order(&params);
    Ok(Finding::new(
        Outcome::Verified,
        json!({
            "group": format!("ut:{}:{}:{}", params.p, params.l, params.m),
            "order": order.to_string(),
            "log_p_order": params.coefficient_count(),
            "pth_powers_dimension": corner_dimension(&params).ok().map(|d| d.to_string()),
            "exhaustive_feasible": order <= EXHAUSTIVE_ORDER_LIMIT.into(),
        }),
    ))
}

fn find_line(a: &FindLineArgs) -> Result<Finding> {
    let params = RankSearchParams::new(a.p, a.arity, a.dim, a.count)?;
    let mut outcome = find_avoiding_line(params, a.budget)?;
    if let LineSearch::Found { certificate } = &mut outcome {
        // Timing is reported by the driver in its own section.
        certificate.timing = None;
    }
    let verdict = match &outcome {
        LineSearch::Found { .. } => Outcome::Verified,
        LineSearch::NoneExists { .. } => Outcome::Refuted,
        LineSearch::Inconclusive { .. } => Outcome::Inconclusive,
    };
    Ok(Finding::new(verdict, outcome))
}

fn load_certificate(path: &Path) -> Result<RankCertificate> {
    let value = read_json(path)?;
    let inner = match value.pointer("/result/certificate") {
        Some(c) => c.clone(),
        None => value,
    };
    Ok(serde_json::from_value(inner)?)
}

fn rank_verify(a: &VerifyArgs) -> Result<Finding> {
    let cert = load_certificate(&a.certificate)?;
    let check = verify_certificate(&cert, a.budget)?;
    let outcome = match check.valid {
        Some(true) => Outcome::Verified,
        Some(false) => Outcome::Refuted,
        None => Outcome::Inconclusive,
    };
    Ok(Finding::new(outcome, json!({ "certificate_hash": cert.hash, "check": check })))
}

fn inequality(a: &InequalityArgs) -> Result<Finding> {
    let report = counting_inequality(a.p, a.m)?;
    Ok(Finding::new(Outcome::from_bool(report.holds), report))
}

fn classify(a: &ClassifyArgs) -> Result<Finding> {
    let table = RankTable::classify(a.p, a.arity, a.dim)?;
    Ok(Finding::new(
        Outcome::Verified,
        json!({
            "forms": table.ranks().len(),
            "max_rank": table.max_rank(),
            "histogram": table.histogram(),
        }),
    ))
}

fn shadow(a: &ShadowArgs) -> Result<Finding> {
    let cert = load_certificate(&a.certificate)?;
    let report = group_shadow_check(&cert, a.trials, a.seed)?;
    Ok(Finding::new(Outcome::from_bool(report.passed()), report))
}

fn identity_check(a: &CheckArgs) -> Result<Finding> {
    let g = parse_group(&a.group)?;
    let w = parse_word(&a.word, &params_map(&a.params))?;
    let mode = match a.mode {
        ModeArg::Auto => LawMode::Auto { trials: a.trials, seed: a.seed },
        ModeArg::Exhaustive => LawMode::Exhaustive,
        ModeArg::Randomized => LawMode::Randomized { trials: a.trials, seed: a.seed },
    };
    let report = check_law(g.as_ref(), &w, mode)?;
    let outcome = match report.verdict {
        Verdict::Holds => Outcome::Verified,
        Verdict::Fails => Outcome::Refuted,
        Verdict::NoCounterexampleFound => Outcome::Inconclusive,
    };
    Ok(Finding::new(outcome, report))
}

fn identity_verbal(a: &VerbalArgs) -> Result<Finding> {
    let g = parse_group(&a.group)?;
    let params = params_map(&a.params);
    let words: Vec<GroupWord> = a.words.iter().map(|w| parse_word(w, &params)).collect::<Result<_>>()?;
    let sub = verbal_closure(g.as_ref(), &words)?;
    Ok(Finding::new(
        Outcome::Verified,
        json!({
            "group": g.name(),
            "group_order": g.order().to_string(),
            "words": words.iter().map(GroupWord::to_string).collect::<Vec<_>>(),
            "order": sub.order,
            "exponent": sub.exponent(g.as_ref()),
            "elements": a.elements.then_some(&sub.elements),
        }),
    ))
}

fn identity_member(a: &MemberArgs) -> Result<Finding> {
    let g = parse_group(&a.group)?;
    let report = burnside_product_membership(g.as_ref(), a.m, a.n)?;
    Ok(Finding::new(Outcome::from_bool(report.member), report))
}

fn identity_scheme(a: &SchemeArgs) -> Result<Finding> {
    let g = parse_group(&a.group)?;
    let report = scheme_equivalence_check(g.as_ref(), Scheme { outer: a.m, inner: a.n })?;
    Ok(Finding::new(Outcome::from_bool(report.equivalent), report))
}

fn identity_coprime(a: &MemberArgs) -> Result<Finding> {
    let g = parse_group(&a.group)?;
    let report = coprime_single_law_check(g.as_ref(), a.m, a.n)?;
    Ok(Finding::new(Outcome::from_bool(report.equivalent), report))
}

fn wreath_build(a: &BuildArgs) -> Result<Finding> {
    let w = WreathProduct::new(parse_group(&a.base)?, parse_group(&a.top)?)?;
    let order = w.order();
    let enumerated = w.elements(ENUMERATION_LIMIT).ok();
    let kernel = enumerated.as_ref().map(|els| els.iter().filter(|x| w.in_base(x)).count());
    let axioms = if enumerated.is_some() { Some(verify_axioms(&w)?) } else { None };
    let mut rng = seeded(a.seed);
    let alpha_ok = (0..a.samples).all(|_| {
        let (x, y) = (w.random_element(&mut rng), w.random_element(&mut rng));
        w.projection_alpha(&w.multiply(&x, &y)) == w.top().multiply(&w.projection_alpha(&x), &w.projection_alpha(&y))
    });
    let section_ok = w.top_elements().iter().all(|d| &w.projection_alpha(&w.embed_top(d)) == d);
    let base_power = w.base().order().pow(w.top_elements().len() as u32);
    let order_ok = enumerated.as_ref().is_none_or(|els| order == els.len().into());
    let kernel_ok = kernel.is_none_or(|k| base_power == k.into());
    let ok = alpha_ok && section_ok && order_ok && kernel_ok && axioms != Some(false);
    Ok(Finding::new(
        Outcome::from_bool(ok),
        json!({
            "group": w.name(),
            "order": order.to_string(),
            "enumerated_order": enumerated.as_ref().map(Vec::len),
            "kernel_of_alpha": kernel,
            "base_order": base_power.to_string(),
            "axioms": axioms,
            "alpha_homomorphism_on_samples": alpha_ok,
            "alpha_splits": section_ok,
        }),
    ))
}

fn wreath_discriminate(a: &DiscriminateArgs) -> Result<Finding> {
    let g = parse_group(&a.group)?;
    let d = parse_group(&a.target)?;
    let set = match &a.set {
        Some(text) => parse_elements(text, g.as_ref())?,
        None => g.elements(ENUMERATION_LIMIT)?,
    };
    let result = discriminate(g.as_ref(), d.as_ref(), &set, a.budget)?;
    let (outcome, rechecked) = match &result {
        Discrimination::Found { generator_images, .. } => {
            let ok = verify_homomorphism(g.as_ref(), d.as_ref(), generator_images, &set)?;
            (Outcome::from_bool(ok), Some(ok))
        }
        Discrimination::NoneExists { .. } => (Outcome::Refuted, None),
        Discrimination::Inconclusive { .. } => (Outcome::Inconclusive, None),
    };
    Ok(Finding::new(
        outcome,
        json!({
            "source": g.name(),
            "target": d.name(),
            "generators": g.generators(),
            "set": set,
            "search": result,
            "independent_recheck": rechecked,
        }),
    ))
}

fn wreath_abelian(a: &AbelianArgs) -> Result<Finding> {
    let set: Vec<Vec<i64>> = a
        .set
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            item.split(',')
                .map(|c| c.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidParams(format!("point '{item}': {e}")))
        })
        .collect::<Result<_>>()?;
    let f = discriminate_free_abelian(&set)?;
    Ok(Finding::new(Outcome::from_bool(f.injective), f))
}

fn uv_shadow(a: &UvShadowArgs) -> Result<Finding> {
    let top = parse_group(&a.top)?;
    let base = parse_group(&a.base)?;
    let eps = match &a.eps {
        Some(text) => parse_elements(text, top.as_ref())?,
        None => {
            let gens = top.generators();
            (0..a.s as usize)
                .map(|i| gens.get(i % gens.len().max(1)).cloned().unwrap_or_else(|| top.identity()))
                .collect()
        }
    };
    let report = theorem_uv_shadow(a.s, a.r, top, base, &eps, a.words, a.seed)?;
    Ok(Finding::new(Outcome::from_bool(report.passed()), report))
}

fn words_nielsen(a: &NielsenArgs) -> Result<Finding> {
    let empty = Params::new();
    let words: Vec<GroupWord> = a
        .tuple
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|w| parse_word(w, &empty))
        .collect::<Result<_>>()?;
    let rank = a.rank.unwrap_or_else(|| words.iter().map(GroupWord::max_var).max().unwrap_or(0));
    let tuple = WordTuple::new(rank, words)?;
    let reduction = nielsen_reduce(&tuple);
    let basis = is_basis(&tuple, rank);
    Ok(Finding::new(
        Outcome::from_bool(basis),
        json!({
            "rank": rank,
            "input": tuple,
            "reduced": reduction.reduced,
            "moves": reduction.log,
            "trivial_entries": reduction.trivial,
            "is_basis": basis,
        }),
    ))
}

fn words_parse(a: &ParseArgs) -> Result<Finding> {
    let w = parse_word(&a.word, &params_map(&a.params))?;
    Ok(Finding::new(
        Outcome::Verified,
        json!({
            "word": w.to_string(),
            "length": w.len(),
            "syllables": w.syllables().len(),
            "variables": w.max_var(),
            "cyclic_reduction": w.cyclic_reduce().to_string(),
        }),
    ))
}
