//! Join semilattices with a closure operation `K`: terms, normal forms, the finite free
//! algebra on `n` generators, and the word problem.
//!
//! A normal form is `x_J ∨ K(S_1) ∨ ... ∨ K(S_m)` where `J` is a set of generators and
//! the `S_i` form an antichain of generator sets with `J` disjoint from every `S_i`.
//! Generator sets are bitmasks.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::order::{enumerate_structures, FinitePoset, OpTable, Operation, OrderedStructure, StructureKind};
use crate::partial_ext::{all_extensions, PartialOp, PropertySpec, UnaryCase};

/// Generators are limited by the bitmask width used for normal forms.
pub const MAX_GENERATORS: usize = 5;

/// Default cap on `free_algebra`'s generator count.
pub const DEFAULT_GENERATOR_CAP: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SLCTerm {
    Gen(usize),
    Join(Box<SLCTerm>, Box<SLCTerm>),
    K(Box<SLCTerm>),
}

impl SLCTerm {
    pub fn join(a: SLCTerm, b: SLCTerm) -> SLCTerm {
        SLCTerm::Join(Box::new(a), Box::new(b))
    }

    pub fn k(a: SLCTerm) -> SLCTerm {
        SLCTerm::K(Box::new(a))
    }

    /// Number of generators the term mentions, i.e. its largest index plus one.
    pub fn arity(&self) -> usize {
        match self {
            SLCTerm::Gen(i) => i + 1,
            SLCTerm::Join(a, b) => a.arity().max(b.arity()),
            SLCTerm::K(a) => a.arity(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SLCTerm::Gen(_) => 0,
            SLCTerm::Join(a, b) => 1 + a.depth().max(b.depth()),
            SLCTerm::K(a) => 1 + a.depth(),
        }
    }

    /// Parses `x \/ K(y \/ K(z))`; `∨` is accepted for `\/`. Variables are looked up in
    /// (and appended to) `vars`, so several terms can share one variable list.
    pub fn parse(text: &str, vars: &mut Vec<String>) -> Result<SLCTerm> {
        let mut p = Parser { text, pos: 0, vars };
        let t = p.expr()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(Error::Parse { pos: p.pos, msg: "unexpected trailing input".into() });
        }
        Ok(t)
    }

    pub fn render(&self, vars: &[String]) -> String {
        match self {
            SLCTerm::Gen(i) => vars.get(*i).cloned().unwrap_or_else(|| format!("x{}", i + 1)),
            SLCTerm::Join(a, b) => format!("{} \\/ {}", a.render(vars), b.render(vars)),
            SLCTerm::K(a) => format!("K({})", a.render(vars)),
        }
    }

    /// Value under `asg` in a join semilattice whose closure is the unary table `k`.
    pub fn eval(&self, m: &OrderedStructure, k: &OpTable, asg: &[usize]) -> usize {
        match self {
            SLCTerm::Gen(i) => asg[*i],
            SLCTerm::Join(a, b) => {
                m.join2(a.eval(m, k, asg), b.eval(m, k, asg)).expect("join semilattice")
            }
            SLCTerm::K(a) => k.apply(a.eval(m, k, asg)),
        }
    }
}

struct Parser<'a, 'v> {
    text: &'a str,
    pos: usize,
    vars: &'v mut Vec<String>,
}

impl Parser<'_, '_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn expr(&mut self) -> Result<SLCTerm> {
        let mut t = self.atom()?;
        while self.eat("\\/") || self.eat("∨") {
            let rhs = self.atom()?;
            t = SLCTerm::join(t, rhs);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<SLCTerm> {
        if self.eat("(") {
            let t = self.expr()?;
            if !self.eat(")") {
                return self.err("expected `)`");
            }
            return Ok(t);
        }
        self.skip_ws();
        let ident: String = self
            .rest()
            .chars()
            .take_while(|c| c.is_alphanumeric() || *c == '_')
            .collect();
        if ident.is_empty() || ident.starts_with(|c: char| c.is_ascii_digit()) {
            return self.err("expected a variable, `K(` or `(`");
        }
        if ident == "K" {
            self.pos += 1;
            if !self.eat("(") {
                return self.err("`K` is the closure symbol and must be applied");
            }
            let t = self.expr()?;
            if !self.eat(")") {
                return self.err("expected `)`");
            }
            return Ok(SLCTerm::k(t));
        }
        self.pos += ident.len();
        let i = match self.vars.iter().position(|v| *v == ident) {
            Some(i) => i,
            None => {
                if self.vars.len() == MAX_GENERATORS {
                    return self.err("too many distinct variables");
                }
                self.vars.push(ident);
                self.vars.len() - 1
            }
        };
        Ok(SLCTerm::Gen(i))
    }
}

/// `x_J ∨ ⋁ K(S_i)`; `s` is kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SLCNormalForm {
    pub j: u64,
    pub s: Vec<u64>,
}

fn subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

impl SLCNormalForm {
    fn reduced(j: u64, mut s: Vec<u64>) -> SLCNormalForm {
        s.sort_unstable();
        s.dedup();
        let keep: Vec<u64> = s
            .iter()
            .copied()
            .filter(|&a| !s.iter().any(|&b| b != a && subset(a, b)))
            .collect();
        let covered = keep.iter().fold(0, |acc, m| acc | m);
        SLCNormalForm { j: j & !covered, s: keep }
    }

    pub fn generator(i: usize) -> SLCNormalForm {
        SLCNormalForm { j: 1 << i, s: Vec::new() }
    }

    /// All generators present, inside or outside a `K`.
    pub fn support(&self) -> u64 {
        self.s.iter().fold(self.j, |acc, m| acc | m)
    }

    pub fn join(&self, other: &SLCNormalForm) -> SLCNormalForm {
        let mut s = self.s.clone();
        s.extend_from_slice(&other.s);
        SLCNormalForm::reduced(self.j | other.j, s)
    }

    /// `K` of a normal form is `K` of the join of every generator present in it.
    pub fn closure(&self) -> SLCNormalForm {
        SLCNormalForm { j: 0, s: vec![self.support()] }
    }

    /// Which of the invariants fails, if any.
    pub fn invariant_failure(&self) -> Option<&'static str> {
        if self.support() == 0 {
            return Some("empty normal form");
        }
        if self.s.contains(&0) {
            return Some("empty K-set");
        }
        if self.s.iter().any(|&m| m & self.j != 0) {
            return Some("generator also inside a K-set");
        }
        if self.s.iter().any(|&a| self.s.iter().any(|&b| a != b && subset(a, b))) {
            return Some("K-sets are not an antichain");
        }
        if self.s.windows(2).any(|w| w[0] >= w[1]) {
            return Some("K-sets not sorted");
        }
        None
    }

    pub fn to_term(&self) -> SLCTerm {
        let gens = |m: u64| -> Vec<SLCTerm> {
            (0..64).filter(|i| m >> i & 1 == 1).map(SLCTerm::Gen).collect()
        };
        let join_all = |ts: Vec<SLCTerm>| ts.into_iter().reduce(SLCTerm::join);
        let mut parts = gens(self.j);
        for &m in &self.s {
            parts.push(SLCTerm::k(join_all(gens(m)).expect("K-sets are nonempty")));
        }
        join_all(parts).expect("normal forms are nonempty")
    }

    pub fn render(&self, vars: &[String]) -> String {
        self.to_term().render(vars)
    }
}

pub fn normalize(t: &SLCTerm) -> SLCNormalForm {
    match t {
        SLCTerm::Gen(i) => SLCNormalForm::generator(*i),
        SLCTerm::Join(a, b) => normalize(a).join(&normalize(b)),
        SLCTerm::K(a) => normalize(a).closure(),
    }
}

pub fn term_equal(s: &SLCTerm, t: &SLCTerm) -> bool {
    normalize(s) == normalize(t)
}

/// `x, y, z` for up to three generators, `x1, x2, ...` beyond.
pub fn generator_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn antichains(n: usize) -> Vec<Vec<u64>> {
    fn go(next: u64, limit: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(cur.clone());
        for m in next..limit {
            if cur.iter().all(|&c| !subset(c, m) && !subset(m, c)) {
                cur.push(m);
                go(m + 1, limit, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(1, 1 << n, &mut Vec::new(), &mut out);
    out
}

/// Every normal form over `n` generators: generators first, then by number of `K`-sets.
pub fn normal_forms(n: usize) -> Vec<SLCNormalForm> {
    let full: u64 = (1 << n) - 1;
    let mut out = Vec::new();
    for s in antichains(n) {
        let covered = s.iter().fold(0, |acc, m| acc | m);
        let free = full & !covered;
        // every J ⊆ free
        let mut j = free;
        loop {
            if j | covered != 0 {
                out.push(SLCNormalForm { j, s: s.clone() });
            }
            if j == 0 {
                break;
            }
            j = (j - 1) & free;
        }
    }
    out.sort_by_key(|f| (f.s.len(), f.j.count_ones(), f.s.iter().map(|m| m.count_ones()).sum::<u32>(), f.j, f.s.clone()));
    out
}

/// The free join semilattice with closure `K` on `n` generators, with the normal form of
/// each element and the positions of the generators.
#[derive(Clone, Debug)]
pub struct FreeAlgebra {
    pub structure: OrderedStructure,
    pub forms: Vec<SLCNormalForm>,
    pub generators: Vec<usize>,
}

impl FreeAlgebra {
    pub fn closure_table(&self) -> &OpTable {
        &self.structure.op("K").expect("free algebras carry K").table
    }

    pub fn index_of(&self, f: &SLCNormalForm) -> Option<usize> {
        self.forms.iter().position(|g| g == f)
    }
}

/// `2^n + 2^(2^n)`, saturating.
pub fn size_bound(n: usize) -> u128 {
    let e = 1u32.checked_shl(n as u32).unwrap_or(u32::MAX);
    (1u128 << n).saturating_add(1u128.checked_shl(e).unwrap_or(u128::MAX))
}

pub fn free_algebra(n: usize, cap: usize) -> Result<FreeAlgebra> {
    if n == 0 {
        return Err(Error::Invalid("the free algebra needs at least one generator (there is no constant)".into()));
    }
    if n > cap.min(MAX_GENERATORS) {
        return Err(Error::BoundExceeded(format!(
            "{n} generators requested, cap is {}",
            cap.min(MAX_GENERATORS)
        )));
    }
    let forms = normal_forms(n);
    let size = forms.len();
    let index: HashMap<&SLCNormalForm, usize> = forms.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut join = Vec::with_capacity(size * size);
    for p in &forms {
        for q in &forms {
            join.push(index[&p.join(q)]);
        }
    }
    let k: Vec<usize> = forms.iter().map(|f| index[&f.closure()]).collect();
    let poset = FinitePoset::from_fn(size, |a, b| join[a * size + b] == b);
    let vars = generator_names(n);
    let names = forms.iter().map(|f| f.render(&vars)).collect();
    let structure = OrderedStructure::from_tables(StructureKind::JoinSemilattice, names, poset, Some(join), None)
        .with_op("K", Operation { property: Some(UnaryCase::B3.into()), table: OpTable::unary(k)? })?;
    let generators = (0..n).map(|i| index[&SLCNormalForm::generator(i)]).collect();
    Ok(FreeAlgebra { structure, forms, generators })
}

/// Every join semilattice with a closure operation `K` of size `1..=max_size`, up to
/// isomorphism of the semilattice (closures are not deduplicated).
pub fn closure_models(max_size: usize) -> Result<Vec<OrderedStructure>> {
    let w: PropertySpec = UnaryCase::B3.into();
    let mut out = Vec::new();
    for size in 1..=max_size {
        for s in enumerate_structures(StructureKind::JoinSemilattice, size) {
            for table in all_extensions(&s, &w, &PartialOp::new(1), u128::MAX)? {
                out.push(s.clone().with_op("K", Operation { property: Some(w.clone()), table })?);
            }
        }
    }
    Ok(out)
}

/// A model and an assignment of the generators where two terms differ.
#[derive(Clone, Debug)]
pub struct Separation {
    pub model: OrderedStructure,
    pub assignment: Vec<usize>,
    pub left: usize,
    pub right: usize,
}

impl fmt::Display for Separation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let asg: Vec<&str> = self.assignment.iter().map(|&a| self.model.name(a)).collect();
        write!(
            f,
            "in a {}-element model with assignment {:?}: {} vs {}",
            self.model.len(),
            asg,
            self.model.name(self.left),
            self.model.name(self.right)
        )
    }
}

/// Smallest model (of size at most `max_size`) separating `p` and `q`, searching models
/// in enumeration order and assignments lexicographically.
pub fn separating_model(p: &SLCTerm, q: &SLCTerm, max_size: usize) -> Result<Option<Separation>> {
    let vars = p.arity().max(q.arity());
    for model in closure_models(max_size)? {
        let k = model.op("K").unwrap().table.clone();
        for asg in crate::order::all_tuples(model.len(), vars) {
            let (l, r) = (p.eval(&model, &k, &asg), q.eval(&model, &k, &asg));
            if l != r {
                return Ok(Some(Separation { model, assignment: asg, left: l, right: r }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partial_ext::verify_property;

    fn parse2(a: &str, b: &str) -> (SLCTerm, SLCTerm) {
        let mut vars = Vec::new();
        let s = SLCTerm::parse(a, &mut vars).unwrap();
        let t = SLCTerm::parse(b, &mut vars).unwrap();
        (s, t)
    }

    fn nf(text: &str) -> SLCNormalForm {
        normalize(&SLCTerm::parse(text, &mut generator_names(3)).unwrap())
    }

    #[test]
    fn normal_form_examples() {
        assert_eq!(nf("K(x \\/ K(y))"), SLCNormalForm { j: 0, s: vec![0b11] });
        assert_eq!(nf("x \\/ x"), SLCNormalForm { j: 1, s: vec![] });
        assert_eq!(nf("x ∨ K(x ∨ y)"), SLCNormalForm { j: 0, s: vec![0b11] });
        assert_eq!(nf("K(x) \\/ K(x \\/ y) \\/ z"), SLCNormalForm { j: 0b100, s: vec![0b11] });
    }

    #[test]
    fn word_problem_examples() {
        let (a, b) = parse2("K(K(x))", "K(x)");
        assert!(term_equal(&a, &b));
        let (a, b) = parse2("K(x) \\/ K(y)", "K(x \\/ y)");
        assert!(!term_equal(&a, &b));
        let (a, b) = parse2("x \\/ K(y)", "K(y) \\/ x");
        assert!(term_equal(&a, &b));
    }

    #[test]
    fn additivity_is_separated() {
        // a, b < t < 1 with K fixing a, b and sending t to 1; no bottom is needed
        let (a, b) = parse2("K(x) \\/ K(y)", "K(x \\/ y)");
        assert!(separating_model(&a, &b, 3).unwrap().is_none());
        let sep = separating_model(&a, &b, 5).unwrap().unwrap();
        assert_eq!(sep.model.len(), 4);
    }

    #[test]
    fn small_free_algebras() {
        for (n, size) in [(1, 2), (2, 9)] {
            let f = free_algebra(n, DEFAULT_GENERATOR_CAP).unwrap();
            assert_eq!(f.structure.len(), size);
            assert!(f.structure.validate().is_valid());
            assert!(verify_property(&f.structure, &UnaryCase::B3.into(), f.closure_table()).is_none());
            let (sub, _) = f.structure.generated(&f.generators, true);
            assert_eq!(sub.len(), size);
            assert!(size as u128 <= size_bound(n));
            for form in &f.forms {
                assert_eq!(form.invariant_failure(), None);
                assert_eq!(&normalize(&form.to_term()), form);
            }
        }
        assert_eq!(free_algebra(1, 3).unwrap().structure.names(), ["x", "K(x)"]);
    }

    #[test]
    fn generator_cap() {
        assert!(matches!(free_algebra(4, 3), Err(Error::BoundExceeded(_))));
        assert!(free_algebra(0, 3).is_err());
    }

    #[test]
    fn parse_errors() {
        let mut v = Vec::new();
        assert!(SLCTerm::parse("x \\/", &mut v).is_err());
        assert!(SLCTerm::parse("K x", &mut v).is_err());
        assert!(SLCTerm::parse("(x", &mut v).is_err());
        assert!(SLCTerm::parse("x y", &mut v).is_err());
    }

    #[test]
    fn closure_model_counts() {
        // sizes 1 and 2: the point; the 2-chain with K = id or K = const top
        assert_eq!(closure_models(1).unwrap().len(), 1);
        assert_eq!(closure_models(2).unwrap().len(), 3);
    }
}
