use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::order::{
    enumerate_structures, fresh_names, macneille_completion, Embedding, FinitePoset, OpTable, Operation, Order,
    OrderedStructure, StructureKind,
};
use crate::partial_ext::{all_extensions, check_necessary, extend, MixedBound, PartialOp, PropertySpec};

use super::config::{configurations, Rep};
use super::eval::{eval_formula, evaluate, flatten_parts, Flattened};
use super::syntax::{Formula, Sentence, Signature, Term};

/// Largest generator count searched exactly, per kind.
pub fn generator_cap(kind: StructureKind) -> usize {
    match kind {
        StructureKind::Poset => 6,
        StructureKind::JoinSemilattice | StructureKind::MeetSemilattice => 5,
        StructureKind::DistributiveLattice | StructureKind::BooleanAlgebra => 4,
        _ => 0,
    }
}

/// Valuations kept per configuration when a distributive-lattice search is bounded.
pub const DL_FALLBACK_VALUATIONS: usize = 4;

/// Free bounded distributive lattice sizes for `0..=6` generators.
const FREE_BOUNDED_DL: [u128; 7] = [2, 3, 6, 20, 168, 7581, 7828354];

/// A base theory with added operations and their properties.
#[derive(Clone, Debug)]
pub struct TheoryProfile {
    pub kind: StructureKind,
    pub ops: Vec<(String, PropertySpec)>,
}

impl TheoryProfile {
    pub fn new(kind: StructureKind, ops: Vec<(String, PropertySpec)>) -> Result<Self> {
        if !matches!(
            kind,
            StructureKind::Poset
                | StructureKind::JoinSemilattice
                | StructureKind::MeetSemilattice
                | StructureKind::DistributiveLattice
                | StructureKind::BooleanAlgebra
        ) {
            return Err(Error::Unsupported(format!("{kind} is not locally finite")));
        }
        for (name, w) in &ops {
            if matches!(w, PropertySpec::Mixed(m) if matches!(m.bound, MixedBound::Term(_))) && !kind.is_lattice() {
                return Err(Error::Unsupported(format!("{name}: term bounds need a lattice base")));
            }
        }
        Ok(TheoryProfile { kind, ops })
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.kind, self.ops.iter().map(|(n, w)| (n.clone(), w.arity())))
    }

    /// Bound on the size of a base model generated by `m` elements.
    pub fn g_t(&self, m: usize) -> Option<u128> {
        match self.kind {
            StructureKind::Poset => Some(m as u128),
            StructureKind::JoinSemilattice | StructureKind::MeetSemilattice => {
                1u128.checked_shl(m as u32).map(|x| x - 1)
            }
            StructureKind::BooleanAlgebra => 1u32.checked_shl(m as u32).and_then(|e| 1u128.checked_shl(e)),
            StructureKind::DistributiveLattice => FREE_BOUNDED_DL.get(m).copied(),
            _ => None,
        }
    }

    /// Bound on the size of a lattice-ordered extension of such a model.
    pub fn h_t(&self, m: usize) -> Option<u128> {
        match self.kind {
            // the MacNeille completion of a poset with m elements has at most 2^m
            StructureKind::Poset => 1u128.checked_shl(m as u32),
            // adding a bottom (top) completes a finite join (meet) semilattice
            StructureKind::JoinSemilattice | StructureKind::MeetSemilattice => self.g_t(m).map(|g| g + 1),
            _ => self.g_t(m),
        }
    }

    fn property(&self, op: &str) -> &PropertySpec {
        &self.ops.iter().find(|(n, _)| n == op).expect("operation in profile").1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// No countermodel in a search that was not exhaustive for the theory.
    ValidUpToBound,
    Invalid,
}

impl Verdict {
    pub fn is_invalid(self) -> bool {
        self == Verdict::Invalid
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Valid => "valid",
            Verdict::ValidUpToBound => "valid up to bound",
            Verdict::Invalid => "invalid",
        })
    }
}

/// An expanded model and an assignment of the sentence's variables where it fails.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub model: OrderedStructure,
    pub assignment: Vec<usize>,
}

impl Countermodel {
    /// `(variable, element name)` pairs.
    pub fn named_assignment(&self, s: &Sentence) -> Vec<(String, String)> {
        s.vars.iter().cloned().zip(self.assignment.iter().map(|&a| self.model.name(a).to_string())).collect()
    }
}

#[derive(Clone, Debug)]
pub struct DecisionOutcome {
    pub verdict: Verdict,
    pub countermodel: Option<Countermodel>,
    /// Original variables, operation terms named by flattening, and their sum.
    pub ell: usize,
    pub m: usize,
    pub k: usize,
    /// Base model size bound used (largest size searched for the brute-force oracle).
    pub size_bound: Option<u128>,
    pub configurations: usize,
}

fn check_profile_covers(profile: &TheoryProfile, s: &Sentence) -> Result<()> {
    for (name, arity) in s.ops_used() {
        match profile.ops.iter().find(|(n, _)| *n == name) {
            Some((_, w)) if w.arity() == arity => {}
            Some((_, w)) => return Err(Error::Arity { expected: w.arity(), found: arity }),
            None => return Err(Error::Invalid(format!("operation {name} is not in the profile"))),
        }
    }
    Ok(())
}

fn rep_term(rep: &Rep, t: &Term, vals: &[u64]) -> u64 {
    match t {
        Term::Var(i) => vals[*i],
        Term::Zero => rep.zero(),
        Term::One => rep.one(),
        Term::Join(a, b) => rep.join(rep_term(rep, a, vals), rep_term(rep, b, vals)),
        Term::Meet(a, b) => rep.meet(rep_term(rep, a, vals), rep_term(rep, b, vals)),
        Term::Compl(a) => rep.compl(rep_term(rep, a, vals)),
        Term::Op(..) => unreachable!("flattened terms are operation-free"),
    }
}

fn rep_formula(rep: &Rep, f: &Formula, vals: &[u64]) -> bool {
    match f {
        Formula::Eq(a, b) => rep_term(rep, a, vals) == rep_term(rep, b, vals),
        Formula::Le(a, b) => rep.leq(rep_term(rep, a, vals), rep_term(rep, b, vals)),
        Formula::Not(p) => !rep_formula(rep, p, vals),
        Formula::And(p, q) => rep_formula(rep, p, vals) && rep_formula(rep, q, vals),
        Formula::Or(p, q) => rep_formula(rep, p, vals) || rep_formula(rep, q, vals),
        Formula::Implies(p, q) => !rep_formula(rep, p, vals) || rep_formula(rep, q, vals),
    }
}

/// The order restricted to listed elements of a configuration.
struct SubOrder<'a> {
    rep: &'a Rep,
    elems: Vec<u64>,
}

impl Order for SubOrder<'_> {
    fn len(&self) -> usize {
        self.elems.len()
    }
    fn leq(&self, a: usize, b: usize) -> bool {
        self.rep.leq(self.elems[a], self.elems[b])
    }
}

type Tables = BTreeMap<String, BTreeMap<Vec<u64>, u64>>;

/// Premise tables `V` of a configuration, or `None` when a premise is contradictory, the
/// body holds, or some `V` fails its necessary condition.
fn falsifier(profile: &TheoryProfile, flat: &Flattened, rep: &Rep) -> Option<Tables> {
    let vals: Vec<u64> = (0..flat.k()).map(|i| rep.var(i)).collect();
    let mut tables: Tables = BTreeMap::new();
    for p in &flat.premises {
        let args: Vec<u64> = p.args.iter().map(|a| rep_term(rep, a, &vals)).collect();
        let entry = tables.entry(p.op.clone()).or_default();
        match entry.get(&args) {
            Some(&v) if v != vals[p.y] => return None,
            _ => {
                entry.insert(args, vals[p.y]);
            }
        }
    }
    if rep_formula(rep, &flat.body, &vals) {
        return None;
    }
    for (op, table) in &tables {
        let w = profile.property(op);
        let mut elems: Vec<u64> = table.iter().flat_map(|(a, v)| a.iter().copied().chain([*v])).collect();
        // term bounds are checked separately below, with the lattice operations of the model
        let (w_order, term) = match w {
            PropertySpec::Mixed(m) => match &m.bound {
                MixedBound::Term(t) => {
                    let mut m2 = m.clone();
                    m2.bound = MixedBound::None;
                    (PropertySpec::Mixed(m2), Some((t, m.i)))
                }
                _ => (w.clone(), None),
            },
            _ => (w.clone(), None),
        };
        if let Some((t, i)) = term {
            for (args, v) in table {
                let tv = eval_lattice_term(rep, t, &args[..i]);
                if !rep.leq(tv, *v) {
                    return None;
                }
            }
        }
        elems.sort_unstable();
        elems.dedup();
        let idx = |x: u64| elems.binary_search(&x).unwrap();
        let g = PartialOp::from_entries(
            w.arity(),
            table.iter().map(|(a, v)| (a.iter().map(|&x| idx(x)).collect(), idx(*v))),
        )
        .ok()?;
        let host = SubOrder { rep, elems: elems.clone() };
        if check_necessary(&host, &w_order, &g).ok()?.is_some() {
            return None;
        }
    }
    Some(tables)
}

fn eval_lattice_term(rep: &Rep, t: &crate::partial_ext::LatticeTerm, args: &[u64]) -> u64 {
    use crate::partial_ext::LatticeTerm as L;
    match t {
        L::Var(i) => args[*i],
        L::Join(a, b) => rep.join(eval_lattice_term(rep, a, args), eval_lattice_term(rep, b, args)),
        L::Meet(a, b) => rep.meet(eval_lattice_term(rep, a, args), eval_lattice_term(rep, b, args)),
    }
}

/// Builds the base model of a configuration, names its elements after the variables that
/// take them, completes it to a lattice-ordered model, extends every premise table and
/// checks that the sentence fails there.
fn materialize(
    profile: &TheoryProfile,
    s: &Sentence,
    flat: &Flattened,
    rep: &Rep,
    tables: &Tables,
) -> Result<Countermodel> {
    let elems = rep.elements();
    let idx = |x: u64| elems.binary_search(&x).expect("value is an element");
    let mut names: Vec<Option<String>> = vec![None; elems.len()];
    for (i, v) in flat.vars.iter().enumerate() {
        names[idx(rep.var(i))].get_or_insert_with(|| v.clone());
    }
    let taken: Vec<String> = names.iter().flatten().cloned().collect();
    let mut fresh = fresh_names(&taken, names.len() - taken.len()).into_iter();
    let names: Vec<String> = names.into_iter().map(|n| n.unwrap_or_else(|| fresh.next().unwrap())).collect();
    let n = elems.len();
    let poset = FinitePoset::from_fn(n, |a, b| rep.leq(elems[a], elems[b]));
    let base = OrderedStructure::new(profile.kind, names, poset)?;
    let (host, emb): (OrderedStructure, Embedding) = if profile.kind.is_lattice() {
        (base.clone(), Embedding::identity(n))
    } else {
        let (m, e) = macneille_completion(&base);
        (m.retag(profile.kind)?, e)
    };
    let mut model = host.clone();
    for (name, w) in &profile.ops {
        let mut g = PartialOp::new(w.arity());
        if let Some(t) = tables.get(name) {
            for (args, v) in t {
                g.insert(args.iter().map(|&x| emb.apply(idx(x))).collect(), emb.apply(idx(*v)))?;
            }
        }
        let table = extend(&host, w, &g)
            .map_err(|e| Error::Internal(format!("premise table for {name} does not extend: {e}")))?;
        model.set_op(name, Operation { property: Some(w.clone()), table })?;
    }
    let assignment: Vec<usize> = (0..flat.ell).map(|i| emb.apply(idx(rep.var(i)))).collect();
    if eval_formula(&model, &s.matrix, &assignment) {
        return Err(Error::Internal("materialized countermodel satisfies the sentence".into()));
    }
    Ok(Countermodel { model, assignment })
}

/// Decides whether `s` follows from the profile's theory: flatten, enumerate every base
/// model generated by the `k = ℓ + m` variables, and look for premise tables that meet the
/// extension condition while the body fails.
pub fn decide_universal(profile: &TheoryProfile, s: &Sentence) -> Result<DecisionOutcome> {
    check_profile_covers(profile, s)?;
    let flat = flatten_parts(s);
    let k = flat.k();
    let cap = generator_cap(profile.kind);
    let (reps, verdict_if_none) = if k <= cap {
        (configurations(profile.kind, k, usize::MAX), Verdict::Valid)
    } else if profile.kind == StructureKind::DistributiveLattice && k <= 6 {
        (configurations(profile.kind, k, DL_FALLBACK_VALUATIONS), Verdict::ValidUpToBound)
    } else {
        return Err(Error::BoundExceeded(format!(
            "{} needs {k} generators (models up to {} elements); the {} limit is {cap}",
            s,
            profile.g_t(k).map_or("an astronomical number of".to_string(), |g| g.to_string()),
            profile.kind
        )));
    };
    let found = reps
        .par_iter()
        .enumerate()
        .find_map_first(|(i, rep)| falsifier(profile, &flat, rep).map(|t| (i, t)));
    let (verdict, countermodel) = match found {
        None => (verdict_if_none, None),
        Some((i, tables)) => (Verdict::Invalid, Some(materialize(profile, s, &flat, &reps[i], &tables)?)),
    };
    Ok(DecisionOutcome {
        verdict,
        countermodel,
        ell: flat.ell,
        m: flat.premises.len(),
        k,
        size_bound: profile.g_t(k),
        configurations: reps.len(),
    })
}

/// Oracle: evaluates `s` in every expanded model with at most `size_bound` elements (base
/// structures up to isomorphism times every admissible table for the operations used).
pub fn brute_force_decide(profile: &TheoryProfile, s: &Sentence, size_bound: usize) -> Result<DecisionOutcome> {
    const CAP: u128 = 1 << 34;
    check_profile_covers(profile, s)?;
    let used = s.ops_used();
    let mut work: u128 = 0;
    let mut checked = 0usize;
    for size in 1..=size_bound {
        let bases = enumerate_structures(profile.kind, size);
        let per_base: Vec<Result<Option<Countermodel>>> = bases
            .par_iter()
            .map(|base| -> Result<Option<Countermodel>> {
                let mut choices: Vec<(String, PropertySpec, Vec<OpTable>)> = Vec::new();
                for (name, w) in &profile.ops {
                    let mut tables = all_extensions(base, w, &PartialOp::new(w.arity()), CAP)?;
                    if !used.contains_key(name) {
                        tables.truncate(1);
                    }
                    choices.push((name.clone(), w.clone(), tables));
                }
                let total: u128 = choices.iter().map(|c| c.2.len() as u128).product();
                if total * (size as u128).pow(s.vars.len() as u32) > CAP {
                    return Err(Error::BoundExceeded(format!("{total} expansions of a {size}-element model")));
                }
                let mut pick = vec![0usize; choices.len()];
                loop {
                    if choices.iter().any(|c| c.2.is_empty()) {
                        return Ok(None);
                    }
                    let mut m = base.clone();
                    for (c, &p) in choices.iter().zip(&pick) {
                        m.set_op(&c.0, Operation { property: Some(c.1.clone()), table: c.2[p].clone() })?;
                    }
                    if let Some(w) = evaluate(&m, s)?.witness {
                        return Ok(Some(Countermodel { model: m, assignment: w }));
                    }
                    // odometer over table choices
                    let mut i = 0;
                    loop {
                        if i == pick.len() {
                            return Ok(None);
                        }
                        pick[i] += 1;
                        if pick[i] < choices[i].2.len() {
                            break;
                        }
                        pick[i] = 0;
                        i += 1;
                    }
                }
            })
            .collect();
        checked += bases.len();
        for r in per_base {
            if let Some(cm) = r? {
                return Ok(DecisionOutcome {
                    verdict: Verdict::Invalid,
                    countermodel: Some(cm),
                    ell: s.vars.len(),
                    m: s.matrix.op_count(),
                    k: s.vars.len(),
                    size_bound: Some(size_bound as u128),
                    configurations: checked,
                });
            }
        }
        work += bases.len() as u128;
    }
    let _ = work;
    Ok(DecisionOutcome {
        verdict: Verdict::ValidUpToBound,
        countermodel: None,
        ell: s.vars.len(),
        m: s.matrix.op_count(),
        k: s.vars.len(),
        size_bound: Some(size_bound as u128),
        configurations: checked,
    })
}

/// Re-checks an invalid verdict: the countermodel is valid, every operation has its
/// property, and the sentence fails under the reported assignment.
pub fn certify_countermodel(profile: &TheoryProfile, s: &Sentence, cm: &Countermodel) -> std::result::Result<(), String> {
    let report = cm.model.validate();
    if !report.is_valid() {
        return Err(format!("countermodel is invalid: {report}"));
    }
    for (name, w) in &profile.ops {
        let op = cm.model.op(name).ok_or_else(|| format!("countermodel lacks {name}"))?;
        if let Some(v) = crate::partial_ext::verify_property(&cm.model, w, &op.table) {
            return Err(format!("{name}: {}", v.describe(&cm.model)));
        }
    }
    super::eval::check_signature(&cm.model, s).map_err(|e| e.to_string())?;
    if eval_formula(&cm.model, &s.matrix, &cm.assignment) {
        return Err("the sentence holds under the reported assignment".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::syntax::parse_sentence;
    use crate::partial_ext::UnaryCase;

    fn profile(kind: StructureKind, ops: &[(&str, UnaryCase)]) -> TheoryProfile {
        TheoryProfile::new(kind, ops.iter().map(|(n, c)| (n.to_string(), (*c).into())).collect()).unwrap()
    }

    fn run(p: &TheoryProfile, text: &str) -> DecisionOutcome {
        let s = parse_sentence(text, &p.signature()).unwrap();
        let out = decide_universal(p, &s).unwrap();
        if let Some(cm) = &out.countermodel {
            certify_countermodel(p, &s, cm).unwrap();
        }
        out
    }

    #[test]
    fn closure_axioms_are_valid() {
        let p = profile(StructureKind::Poset, &[("K", UnaryCase::B3)]);
        assert_eq!(run(&p, "forall x . x <= K(x)").verdict, Verdict::Valid);
        assert_eq!(run(&p, "forall x . K(K(x)) = K(x)").verdict, Verdict::Valid);
        assert_eq!(run(&p, "forall x y . x <= y -> K(x) <= K(y)").verdict, Verdict::Valid);
        assert_eq!(run(&p, "forall x . K(x) = x").verdict, Verdict::Invalid);
    }

    #[test]
    fn additivity_fails_for_semilattice_closures() {
        let p = profile(StructureKind::JoinSemilattice, &[("K", UnaryCase::B3)]);
        let out = run(&p, "forall x y . K(x) \\/ K(y) = K(x \\/ y)");
        assert_eq!(out.verdict, Verdict::Invalid);
        assert_eq!(out.k, 5);
        assert!(out.countermodel.unwrap().model.len() <= 5);
    }

    #[test]
    fn isotone_operations_need_not_commute() {
        let p = profile(StructureKind::Poset, &[("K1", UnaryCase::B1), ("K2", UnaryCase::B1)]);
        assert!(run(&p, "forall x . K1(K2(x)) = K2(K1(x))").verdict.is_invalid());
    }

    #[test]
    fn agrees_with_brute_force_on_small_cases() {
        let p = profile(StructureKind::Poset, &[("K", UnaryCase::B5)]);
        for text in ["forall x y . x <= y -> K(y) <= K(x)", "forall x . K(K(x)) = x", "forall x . x <= K(x) | K(x) <= x"] {
            let s = parse_sentence(text, &p.signature()).unwrap();
            let d = decide_universal(&p, &s).unwrap();
            let b = brute_force_decide(&p, &s, 4).unwrap();
            assert_eq!(d.verdict.is_invalid(), b.verdict.is_invalid(), "{text}");
        }
    }

    #[test]
    fn boolean_and_distributive_profiles() {
        let p = profile(StructureKind::BooleanAlgebra, &[("K", UnaryCase::B3)]);
        assert_eq!(run(&p, "forall x . x <= K(x)").verdict, Verdict::Valid);
        assert!(run(&p, "forall x . K(0) = 0").verdict.is_invalid());
        let p = profile(StructureKind::DistributiveLattice, &[("K", UnaryCase::B1)]);
        assert!(run(&p, "forall x y . K(x /\\ y) = K(x) /\\ K(y)").verdict.is_invalid());
    }

    #[test]
    fn bounds_are_reported() {
        let p = profile(StructureKind::Poset, &[("K", UnaryCase::B1)]);
        let s = parse_sentence("forall x y z . K(K(K(K(x)))) = K(y) -> z <= z", &p.signature()).unwrap();
        assert!(matches!(decide_universal(&p, &s), Err(Error::BoundExceeded(_))));
        assert_eq!(p.g_t(3), Some(3));
        let j = profile(StructureKind::JoinSemilattice, &[]);
        assert_eq!(j.g_t(3), Some(7));
        assert!(TheoryProfile::new(StructureKind::Lattice, vec![]).is_err());
    }
}
