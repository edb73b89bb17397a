use crate::error::{Error, Result};
use crate::order::{all_tuples, OrderedStructure};

use super::syntax::{Formula, Sentence, Term};

/// Result of evaluating a sentence: whether it holds and, if not, the first falsifying
/// assignment in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub holds: bool,
    pub witness: Option<Vec<usize>>,
}

fn check_term(m: &OrderedStructure, t: &Term) -> Result<()> {
    let kind = m.kind();
    match t {
        Term::Var(_) => Ok(()),
        Term::Zero | Term::One if kind.is_bounded() => Ok(()),
        Term::Join(a, b) if kind.has_join() => check_term(m, a).and(check_term(m, b)),
        Term::Meet(a, b) if kind.has_meet() => check_term(m, a).and(check_term(m, b)),
        Term::Compl(a) if kind.is_boolean() => check_term(m, a),
        Term::Op(name, args) => match m.op(name) {
            Some(op) if op.table.arity() == args.len() => args.iter().try_for_each(|a| check_term(m, a)),
            Some(op) => Err(Error::Arity { expected: op.table.arity(), found: args.len() }),
            None => Err(Error::Invalid(format!("the structure has no operation {name}"))),
        },
        _ => Err(Error::Invalid(format!("a {} does not interpret {t:?}", kind))),
    }
}

/// Checks that `m` interprets every symbol of `s`.
pub fn check_signature(m: &OrderedStructure, s: &Sentence) -> Result<()> {
    s.matrix.terms().into_iter().try_for_each(|t| check_term(m, t))
}

/// Value of a term; `m` must interpret it (see [`check_signature`]).
pub fn eval_term(m: &OrderedStructure, t: &Term, asg: &[usize]) -> usize {
    match t {
        Term::Var(i) => asg[*i],
        Term::Zero => m.bottom().expect("bounded"),
        Term::One => m.top().expect("bounded"),
        Term::Join(a, b) => m.join2(eval_term(m, a, asg), eval_term(m, b, asg)).expect("join exists"),
        Term::Meet(a, b) => m.meet2(eval_term(m, a, asg), eval_term(m, b, asg)).expect("meet exists"),
        Term::Compl(a) => m.complement(eval_term(m, a, asg)).expect("complemented"),
        Term::Op(name, args) => {
            let vals: Vec<usize> = args.iter().map(|a| eval_term(m, a, asg)).collect();
            m.op(name).expect("operation present").table.get(&vals)
        }
    }
}

pub fn eval_formula(m: &OrderedStructure, f: &Formula, asg: &[usize]) -> bool {
    use crate::order::Order;
    match f {
        Formula::Eq(a, b) => eval_term(m, a, asg) == eval_term(m, b, asg),
        Formula::Le(a, b) => m.leq(eval_term(m, a, asg), eval_term(m, b, asg)),
        Formula::Not(p) => !eval_formula(m, p, asg),
        Formula::And(p, q) => eval_formula(m, p, asg) && eval_formula(m, q, asg),
        Formula::Or(p, q) => eval_formula(m, p, asg) || eval_formula(m, q, asg),
        Formula::Implies(p, q) => !eval_formula(m, p, asg) || eval_formula(m, q, asg),
    }
}

/// Truth of `s` in `m` by exhaustive search over assignments.
pub fn evaluate(m: &OrderedStructure, s: &Sentence) -> Result<Evaluation> {
    check_signature(m, s)?;
    let witness = all_tuples(m.len(), s.vars.len()).find(|asg| !eval_formula(m, &s.matrix, asg));
    Ok(Evaluation { holds: witness.is_none(), witness })
}

/// One premise `op(args) = y` of a flattened sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Premise {
    pub op: String,
    pub args: Vec<Term>,
    pub y: usize,
}

/// A sentence split as `premises -> body` with every premise argument and the body free of
/// added operations. The first `ell` variables are the original ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flattened {
    pub vars: Vec<String>,
    pub ell: usize,
    pub premises: Vec<Premise>,
    pub body: Formula,
}

impl Flattened {
    /// The number of generators the decision procedure needs: all variables, old and new.
    pub fn k(&self) -> usize {
        self.vars.len()
    }

    pub fn to_sentence(&self) -> Sentence {
        let mut premises = self
            .premises
            .iter()
            .map(|p| Formula::Eq(Term::Op(p.op.clone(), p.args.clone()), Term::Var(p.y)));
        let matrix = match premises.next() {
            None => self.body.clone(),
            Some(first) => {
                let conj = premises.fold(first, |acc, f| Formula::And(Box::new(acc), Box::new(f)));
                Formula::Implies(Box::new(conj), Box::new(self.body.clone()))
            }
        };
        Sentence { vars: self.vars.clone(), matrix }
    }
}

fn innermost_op(t: &Term) -> Option<&Term> {
    if let Term::Op(_, args) = t {
        if !args.iter().any(Term::has_ops) {
            return Some(t);
        }
    }
    match t {
        Term::Join(a, b) | Term::Meet(a, b) => innermost_op(a).or_else(|| innermost_op(b)),
        Term::Compl(a) => innermost_op(a),
        Term::Op(_, args) => args.iter().find_map(innermost_op),
        _ => None,
    }
}

fn replace(t: &mut Term, target: &Term, var: usize) {
    if t == target {
        *t = Term::Var(var);
        return;
    }
    for c in t.children_mut() {
        replace(c, target, var);
    }
}

fn fresh_var(taken: &[String], next: &mut usize) -> String {
    loop {
        let cand = format!("y{next}");
        *next += 1;
        if !taken.contains(&cand) {
            return cand;
        }
    }
}

/// Repeatedly names the leftmost innermost operation term `op(t̄)` with a fresh `y`,
/// replacing all its occurrences.
pub fn flatten_parts(s: &Sentence) -> Flattened {
    let mut vars = s.vars.clone();
    let mut body = s.matrix.clone();
    let mut premises = Vec::new();
    let mut next = 1;
    loop {
        let target = body.terms().into_iter().find_map(innermost_op).cloned();
        let Some(target) = target else { break };
        let y = vars.len();
        vars.push(fresh_var(&vars, &mut next));
        for t in body.terms_mut() {
            replace(t, &target, y);
        }
        let Term::Op(op, args) = target else { unreachable!() };
        premises.push(Premise { op, args, y });
    }
    Flattened { vars, ell: s.vars.len(), premises, body }
}

/// The premise form `forall x̄ ȳ . (op_1(t̄_1) = y_1 & ...) -> ψ*`.
pub fn flatten(s: &Sentence) -> Sentence {
    flatten_parts(s).to_sentence()
}
