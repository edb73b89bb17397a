use std::fmt;

use crate::error::{Error, Result};
use crate::order::{OpTable, Order};

use super::property::{MixedBound, MixedSpec, PropertySpec, UnaryCase};
use super::PartialOp;

/// A single checkable requirement on a (partial or total) operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `x ≤ Kx`
    Extensive,
    /// `Kx ≤ x`
    Contractive,
    /// `KKx = Kx`
    Idempotent,
    /// `KKx = x`
    Involutive,
    /// `x ≤ y ⇒ Kx ≤ Ky`
    Isotone,
    /// `x ≤ y ⇒ Ky ≤ Kx`
    Antitone,
    /// on the domain: `Ga ∈ D ⇒ GGa = Ga`
    IdempotentOnDomain,
    /// on the domain: `Ga ∈ D ⇒ GGa = a`
    InvolutiveOnDomain,
    /// on the domain: `Ga = Gb ⇒ a = b`
    Injective,
    /// on the domain: `a ≤ Gb ⇒ Ga ≤ Gb`
    BelowImage,
    /// on the domain: `Ga ≤ b ⇒ Ga ≤ Gb`
    AboveImage,
    /// isotone in the first `i` places, constant pattern in the middle, antitone in the last `j`
    MixedMonotone,
    /// isotone in the given (0-based) place
    IsotoneIn(usize),
    /// antitone in the given (0-based) place
    AntitoneIn(usize),
    /// `x_h ≤ F(x̄)`
    ProjectionBound(usize),
    /// `t(x_1..x_i) ≤ F(x̄)`
    TermBound,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Extensive => f.write_str("extensive (x <= Kx)"),
            Rule::Contractive => f.write_str("contractive (Kx <= x)"),
            Rule::Idempotent => f.write_str("idempotent (KKx = Kx)"),
            Rule::Involutive => f.write_str("involutive (KKx = x)"),
            Rule::Isotone => f.write_str("isotone (a <= b implies Ka <= Kb)"),
            Rule::Antitone => f.write_str("antitone (a <= b implies Kb <= Ka)"),
            Rule::IdempotentOnDomain => f.write_str("if Ga is in the domain then GGa = Ga"),
            Rule::InvolutiveOnDomain => f.write_str("if Ga is in the domain then GGa = a"),
            Rule::Injective => f.write_str("Ga = Gb implies a = b"),
            Rule::BelowImage => f.write_str("a <= Gb implies Ga <= Gb"),
            Rule::AboveImage => f.write_str("Ga <= b implies Ga <= Gb"),
            Rule::MixedMonotone => f.write_str("monotone pattern on the domain"),
            Rule::IsotoneIn(h) => write!(f, "isotone in argument {}", h + 1),
            Rule::AntitoneIn(h) => write!(f, "antitone in argument {}", h + 1),
            Rule::ProjectionBound(h) => write!(f, "x{} <= F(x)", h + 1),
            Rule::TermBound => f.write_str("t(x1..xi) <= F(x)"),
        }
    }
}

/// A rule that fails, with the argument tuples witnessing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleViolation {
    pub rule: Rule,
    pub at: Vec<Vec<usize>>,
}

impl RuleViolation {
    fn new(rule: Rule, at: Vec<Vec<usize>>) -> Self {
        RuleViolation { rule, at }
    }

    /// Human-readable form with element labels from `host`.
    pub fn describe<O: Order + ?Sized>(&self, host: &O) -> String {
        let tuples: Vec<String> = self
            .at
            .iter()
            .map(|t| {
                let parts: Vec<String> = t.iter().map(|&x| host.label(x)).collect();
                format!("({})", parts.join(", "))
            })
            .collect();
        format!("{} fails at {}", self.rule, tuples.join(" "))
    }
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {:?}", self.rule, self.at)
    }
}

/// Conditions on a partial operation that are necessary and sufficient for an extension
/// with the given unary property.
pub fn necessary_rules(c: UnaryCase) -> Vec<Rule> {
    use Rule::*;
    match c {
        UnaryCase::A1e => vec![Extensive],
        UnaryCase::A1c => vec![Contractive],
        UnaryCase::A2 => vec![IdempotentOnDomain],
        UnaryCase::A2e => vec![IdempotentOnDomain, Extensive],
        UnaryCase::A2c => vec![IdempotentOnDomain, Contractive],
        UnaryCase::A3 => vec![InvolutiveOnDomain, Injective],
        UnaryCase::B1 => vec![Isotone],
        UnaryCase::B1e => vec![Isotone, Extensive],
        UnaryCase::B1c => vec![Isotone, Contractive],
        UnaryCase::B2 => vec![Isotone, BelowImage, AboveImage],
        UnaryCase::B3 => vec![BelowImage, Extensive],
        UnaryCase::B4 => vec![AboveImage, Contractive],
        UnaryCase::B5 => vec![Antitone],
    }
}

/// The defining properties of each unary case, for total operations.
pub fn defining_rules(c: UnaryCase) -> Vec<Rule> {
    use Rule::*;
    match c {
        UnaryCase::A1e => vec![Extensive],
        UnaryCase::A1c => vec![Contractive],
        UnaryCase::A2 => vec![Idempotent],
        UnaryCase::A2e => vec![Idempotent, Extensive],
        UnaryCase::A2c => vec![Idempotent, Contractive],
        UnaryCase::A3 => vec![Involutive],
        UnaryCase::B1 => vec![Isotone],
        UnaryCase::B1e => vec![Isotone, Extensive],
        UnaryCase::B1c => vec![Isotone, Contractive],
        UnaryCase::B2 => vec![Isotone, Idempotent],
        UnaryCase::B3 => vec![Extensive, Isotone, Idempotent],
        UnaryCase::B4 => vec![Contractive, Isotone, Idempotent],
        UnaryCase::B5 => vec![Antitone],
    }
}

fn mixed_defining_rules(m: &MixedSpec) -> Vec<Rule> {
    let mut rules: Vec<Rule> = (0..m.i).map(Rule::IsotoneIn).collect();
    rules.extend((m.n - m.j..m.n).map(Rule::AntitoneIn));
    match &m.bound {
        MixedBound::None => {}
        MixedBound::Projections(hs) => rules.extend(hs.iter().map(|&h| Rule::ProjectionBound(h))),
        MixedBound::Term(_) => rules.push(Rule::TermBound),
    }
    rules
}

fn check_arity(w: &PropertySpec, arity: usize) -> Result<()> {
    if w.arity() != arity {
        return Err(Error::Arity { expected: w.arity(), found: arity });
    }
    Ok(())
}

/// Tests the necessary (and, on complete lattices, sufficient) condition for `g` to
/// extend to an operation with property `w`. Returns the first failing rule.
pub fn check_necessary<O: Order + ?Sized>(
    host: &O,
    w: &PropertySpec,
    g: &PartialOp,
) -> Result<Option<RuleViolation>> {
    check_arity(w, g.arity())?;
    g.check_carrier(host.len())?;
    match w {
        PropertySpec::Unary(c) => {
            let dom: Vec<(usize, usize)> = g.entries().map(|(k, v)| (k[0], v)).collect();
            for rule in necessary_rules(*c) {
                if let Some(v) = unary_domain_rule(host, &rule, g, &dom) {
                    return Ok(Some(v));
                }
            }
            Ok(None)
        }
        PropertySpec::Mixed(m) => {
            let entries: Vec<(&Vec<usize>, usize)> = g.entries().collect();
            for (a, va) in &entries {
                for (b, vb) in &entries {
                    if pattern_leq(host, m, a, b) && !host.leq(*va, *vb) {
                        return Ok(Some(RuleViolation::new(
                            Rule::MixedMonotone,
                            vec![a.to_vec(), b.to_vec()],
                        )));
                    }
                }
            }
            for (a, va) in &entries {
                if let Some(v) = mixed_bound_violation(host, m, a, *va)? {
                    return Ok(Some(v));
                }
            }
            Ok(None)
        }
    }
}

/// `a` below `b` in the pattern: `≤` in the first `i`, `=` in the middle, `≥` in the last `j`.
pub(crate) fn pattern_leq<O: Order + ?Sized>(host: &O, m: &MixedSpec, a: &[usize], b: &[usize]) -> bool {
    (0..m.n).all(|h| {
        if h < m.i {
            host.leq(a[h], b[h])
        } else if h < m.n - m.j {
            a[h] == b[h]
        } else {
            host.leq(b[h], a[h])
        }
    })
}

fn mixed_bound_violation<O: Order + ?Sized>(
    host: &O,
    m: &MixedSpec,
    a: &[usize],
    va: usize,
) -> Result<Option<RuleViolation>> {
    match &m.bound {
        MixedBound::None => Ok(None),
        MixedBound::Projections(hs) => Ok(hs
            .iter()
            .find(|&&h| !host.leq(a[h], va))
            .map(|&h| RuleViolation::new(Rule::ProjectionBound(h), vec![a.to_vec()]))),
        MixedBound::Term(t) => {
            let tv = t.eval(host, &a[..m.i]).ok_or_else(|| {
                Error::Unsupported("lattice-term bounds need a lattice-ordered host".into())
            })?;
            Ok((!host.leq(tv, va)).then(|| RuleViolation::new(Rule::TermBound, vec![a.to_vec()])))
        }
    }
}

fn unary_domain_rule<O: Order + ?Sized>(
    host: &O,
    rule: &Rule,
    g: &PartialOp,
    dom: &[(usize, usize)],
) -> Option<RuleViolation> {
    let one = |r: Rule, a: usize| Some(RuleViolation::new(r, vec![vec![a]]));
    let two = |r: Rule, a: usize, b: usize| Some(RuleViolation::new(r, vec![vec![a], vec![b]]));
    match rule {
        Rule::Extensive => dom.iter().find(|&&(a, ga)| !host.leq(a, ga)).and_then(|&(a, _)| one(Rule::Extensive, a)),
        Rule::Contractive => {
            dom.iter().find(|&&(a, ga)| !host.leq(ga, a)).and_then(|&(a, _)| one(Rule::Contractive, a))
        }
        Rule::IdempotentOnDomain => dom
            .iter()
            .find(|&&(_, ga)| g.get1(ga).is_some_and(|gga| gga != ga))
            .and_then(|&(a, _)| one(Rule::IdempotentOnDomain, a)),
        Rule::InvolutiveOnDomain => dom
            .iter()
            .find(|&&(a, ga)| g.get1(ga).is_some_and(|gga| gga != a))
            .and_then(|&(a, _)| one(Rule::InvolutiveOnDomain, a)),
        _ => {
            for &(a, ga) in dom {
                for &(b, gb) in dom {
                    let bad = match rule {
                        Rule::Injective => a != b && ga == gb,
                        Rule::Isotone => host.leq(a, b) && !host.leq(ga, gb),
                        Rule::Antitone => host.leq(a, b) && !host.leq(gb, ga),
                        Rule::BelowImage => host.leq(a, gb) && !host.leq(ga, gb),
                        Rule::AboveImage => host.leq(ga, b) && !host.leq(ga, gb),
                        _ => false,
                    };
                    if bad {
                        return two(rule.clone(), a, b);
                    }
                }
            }
            None
        }
    }
}

/// Exact check of property `w` for a total operation over the whole carrier.
pub fn verify_property<O: Order + ?Sized>(host: &O, w: &PropertySpec, k: &OpTable) -> Option<RuleViolation> {
    if w.arity() != k.arity() || k.size() != host.len() {
        return Some(RuleViolation::new(Rule::MixedMonotone, Vec::new()));
    }
    property_violation(host, w, k.arity(), &|args: &[usize]| Some(k.get(args)))
}

/// Checks `w` on every fully defined instance of its rules; `get` may leave cells undefined.
pub(crate) fn property_violation<O: Order + ?Sized>(
    host: &O,
    w: &PropertySpec,
    arity: usize,
    get: &dyn Fn(&[usize]) -> Option<usize>,
) -> Option<RuleViolation> {
    let n = host.len();
    match w {
        PropertySpec::Unary(c) => {
            let k = |x: usize| get(&[x]);
            for rule in defining_rules(*c) {
                for x in 0..n {
                    let Some(kx) = k(x) else { continue };
                    let bad_one = match rule {
                        Rule::Extensive => !host.leq(x, kx),
                        Rule::Contractive => !host.leq(kx, x),
                        Rule::Idempotent => k(kx).is_some_and(|kkx| kkx != kx),
                        Rule::Involutive => k(kx).is_some_and(|kkx| kkx != x),
                        _ => false,
                    };
                    if bad_one {
                        return Some(RuleViolation::new(rule, vec![vec![x]]));
                    }
                    if matches!(rule, Rule::Isotone | Rule::Antitone) {
                        for y in 0..n {
                            if !host.leq(x, y) {
                                continue;
                            }
                            let Some(ky) = k(y) else { continue };
                            let bad = if rule == Rule::Isotone { !host.leq(kx, ky) } else { !host.leq(ky, kx) };
                            if bad {
                                return Some(RuleViolation::new(rule, vec![vec![x], vec![y]]));
                            }
                        }
                    }
                }
            }
            None
        }
        PropertySpec::Mixed(m) => {
            let tuples: Vec<Vec<usize>> = crate::order::all_tuples(n, arity).collect();
            for rule in mixed_defining_rules(m) {
                for a in &tuples {
                    let Some(fa) = get(a) else { continue };
                    match rule {
                        Rule::IsotoneIn(h) | Rule::AntitoneIn(h) => {
                            let mut b = a.clone();
                            for y in 0..n {
                                if y == a[h] || !host.leq(a[h], y) {
                                    continue;
                                }
                                b[h] = y;
                                let Some(fb) = get(&b) else { continue };
                                let ok = if matches!(rule, Rule::IsotoneIn(_)) {
                                    host.leq(fa, fb)
                                } else {
                                    host.leq(fb, fa)
                                };
                                if !ok {
                                    return Some(RuleViolation::new(rule, vec![a.clone(), b.clone()]));
                                }
                            }
                        }
                        Rule::ProjectionBound(h) => {
                            if !host.leq(a[h], fa) {
                                return Some(RuleViolation::new(rule, vec![a.clone()]));
                            }
                        }
                        Rule::TermBound => {
                            let MixedBound::Term(t) = &m.bound else { unreachable!() };
                            let ok = t.eval(host, &a[..m.i]).is_some_and(|tv| host.leq(tv, fa));
                            if !ok {
                                return Some(RuleViolation::new(rule, vec![a.clone()]));
                            }
                        }
                        _ => {}
                    }
                }
            }
            None
        }
    }
}
