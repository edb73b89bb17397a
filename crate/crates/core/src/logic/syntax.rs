use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::order::StructureKind;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    Zero,
    One,
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Compl(Box<Term>),
    Op(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Eq(Term, Term),
    Le(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

/// `forall vars . matrix`; variables are indices into `vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub vars: Vec<String>,
    pub matrix: Formula,
}

/// Base kind plus added operation symbols with their arities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub kind: StructureKind,
    pub ops: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new(kind: StructureKind, ops: impl IntoIterator<Item = (String, usize)>) -> Self {
        Signature { kind, ops: ops.into_iter().collect() }
    }
}

impl Term {
    pub fn has_ops(&self) -> bool {
        match self {
            Term::Var(_) | Term::Zero | Term::One => false,
            Term::Op(..) => true,
            Term::Join(a, b) | Term::Meet(a, b) => a.has_ops() || b.has_ops(),
            Term::Compl(a) => a.has_ops(),
        }
    }

    pub(crate) fn children_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Term::Var(_) | Term::Zero | Term::One => Vec::new(),
            Term::Join(a, b) | Term::Meet(a, b) => vec![a.as_mut(), b.as_mut()],
            Term::Compl(a) => vec![a.as_mut()],
            Term::Op(_, args) => args.iter_mut().collect(),
        }
    }

    /// Number of operation-symbol occurrences.
    pub fn op_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::One => 0,
            Term::Join(a, b) | Term::Meet(a, b) => a.op_count() + b.op_count(),
            Term::Compl(a) => a.op_count(),
            Term::Op(_, args) => 1 + args.iter().map(Term::op_count).sum::<usize>(),
        }
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, vars: &[String], nested: bool) -> fmt::Result {
        match self {
            Term::Var(i) => f.write_str(&vars[*i]),
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Compl(a) => {
                f.write_str("~")?;
                a.fmt_with(f, vars, true)
            }
            Term::Op(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.fmt_with(f, vars, false)?;
                }
                f.write_str(")")
            }
            Term::Join(a, b) | Term::Meet(a, b) => {
                let sym = if matches!(self, Term::Join(..)) { "\\/" } else { "/\\" };
                if nested {
                    f.write_str("(")?;
                }
                a.fmt_with(f, vars, true)?;
                write!(f, " {sym} ")?;
                b.fmt_with(f, vars, true)?;
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl Formula {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Formula::Eq(a, b) | Formula::Le(a, b) => vec![a, b],
            Formula::Not(p) => p.terms(),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                let mut v = p.terms();
                v.extend(q.terms());
                v
            }
        }
    }

    pub(crate) fn terms_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Formula::Eq(a, b) | Formula::Le(a, b) => vec![a, b],
            Formula::Not(p) => p.terms_mut(),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                let mut v = p.terms_mut();
                v.extend(q.terms_mut());
                v
            }
        }
    }

    pub fn op_count(&self) -> usize {
        self.terms().iter().map(|t| t.op_count()).sum()
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, vars: &[String], nested: bool) -> fmt::Result {
        let t = |f: &mut fmt::Formatter<'_>, t: &Term| t.fmt_with(f, vars, false);
        match self {
            Formula::Eq(a, b) | Formula::Le(a, b) => {
                t(f, a)?;
                f.write_str(if matches!(self, Formula::Eq(..)) { " = " } else { " <= " })?;
                t(f, b)
            }
            Formula::Not(p) => {
                f.write_str("!")?;
                p.fmt_with(f, vars, true)
            }
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                let sym = match self {
                    Formula::And(..) => "&",
                    Formula::Or(..) => "|",
                    _ => "->",
                };
                if nested {
                    f.write_str("(")?;
                }
                p.fmt_with(f, vars, true)?;
                write!(f, " {sym} ")?;
                q.fmt_with(f, vars, true)?;
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "forall {} . ", self.vars.join(" "))?;
        self.matrix.fmt_with(f, &self.vars, false)
    }
}

impl Sentence {
    pub fn render_term(&self, t: &Term) -> String {
        struct D<'a>(&'a Term, &'a [String]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, self.1, false)
            }
        }
        D(t, &self.vars).to_string()
    }

    /// Operation symbols used, with arities.
    pub fn ops_used(&self) -> BTreeMap<String, usize> {
        fn walk(t: &Term, out: &mut BTreeMap<String, usize>) {
            match t {
                Term::Op(name, args) => {
                    out.insert(name.clone(), args.len());
                    args.iter().for_each(|a| walk(a, out));
                }
                Term::Join(a, b) | Term::Meet(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Term::Compl(a) => walk(a, out),
                _ => {}
            }
        }
        let mut out = BTreeMap::new();
        for t in self.matrix.terms() {
            walk(t, &mut out);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    LParen,
    RParen,
    Comma,
    Dot,
    Join,
    Meet,
    Tilde,
    Le,
    Eq,
    Arrow,
    Amp,
    Bar,
    Bang,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    const SYMBOLS: [(&str, Tok); 18] = [
        ("\\/", Tok::Join),
        ("∨", Tok::Join),
        ("/\\", Tok::Meet),
        ("∧", Tok::Meet),
        ("<=", Tok::Le),
        ("≤", Tok::Le),
        ("->", Tok::Arrow),
        ("→", Tok::Arrow),
        ("(", Tok::LParen),
        (")", Tok::RParen),
        (",", Tok::Comma),
        (".", Tok::Dot),
        ("~", Tok::Tilde),
        ("=", Tok::Eq),
        ("&", Tok::Amp),
        ("|", Tok::Bar),
        ("!", Tok::Bang),
        ("¬", Tok::Bang),
    ];
    let mut out = Vec::new();
    let mut pos = 0;
    'outer: while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        for (s, t) in &SYMBOLS {
            if rest.starts_with(s) {
                out.push((pos, t.clone()));
                pos += s.len();
                continue 'outer;
            }
        }
        if c.is_alphabetic() || c == '_' || c.is_ascii_digit() {
            let word: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
            let tok = match word.as_str() {
                "0" => Tok::Zero,
                "1" => Tok::One,
                w if w.starts_with(|c: char| c.is_ascii_digit()) => {
                    return Err(Error::Parse { pos, msg: format!("`{w}` is not a variable or constant") })
                }
                _ => Tok::Ident(word.clone()),
            };
            out.push((pos, tok));
            pos += word.len();
            continue;
        }
        return Err(Error::Parse { pos, msg: format!("unexpected character `{c}`") });
    }
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    sig: &'s Signature,
    vars: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn sentence(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Ident(w)) if w == "forall" => self.i += 1,
            _ => return self.err("a sentence starts with `forall`"),
        }
        while let Some(Tok::Ident(w)) = self.peek() {
            let w = w.clone();
            if self.sig.ops.contains_key(&w) || w == "forall" {
                return self.err(format!("`{w}` cannot be used as a variable"));
            }
            if self.vars.contains(&w) {
                return self.err(format!("variable `{w}` bound twice"));
            }
            self.vars.push(w);
            self.i += 1;
        }
        if self.vars.is_empty() {
            return self.err("expected at least one variable");
        }
        self.expect(&Tok::Dot, "`.` after the variables")?;
        let f = self.implication()?;
        if self.i < self.toks.len() {
            return self.err("unexpected trailing input");
        }
        Ok(f)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            let g = self.conjunction()?;
            f = Formula::Or(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::Amp) {
            let g = self.unary()?;
            f = Formula::And(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.peek() == Some(&Tok::LParen) {
            // a parenthesized formula, unless it turns out to open a term
            let save = self.i;
            self.i += 1;
            if let Ok(f) = self.implication() {
                if self.eat(&Tok::RParen)
                    && !matches!(self.peek(), Some(Tok::Eq | Tok::Le | Tok::Join | Tok::Meet))
                {
                    return Ok(f);
                }
            }
            self.i = save;
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        if self.eat(&Tok::Eq) {
            Ok(Formula::Eq(lhs, self.term()?))
        } else if self.eat(&Tok::Le) {
            Ok(Formula::Le(lhs, self.term()?))
        } else {
            self.err("expected `=` or `<=`")
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.meet_term()?;
        while self.peek() == Some(&Tok::Join) {
            if !self.sig.kind.has_join() {
                return self.err(format!("joins are not in the signature of {}", self.sig.kind));
            }
            self.i += 1;
            let u = self.meet_term()?;
            t = Term::Join(Box::new(t), Box::new(u));
        }
        Ok(t)
    }

    fn meet_term(&mut self) -> Result<Term> {
        let mut t = self.unary_term()?;
        while self.peek() == Some(&Tok::Meet) {
            if !self.sig.kind.has_meet() {
                return self.err(format!("meets are not in the signature of {}", self.sig.kind));
            }
            self.i += 1;
            let u = self.unary_term()?;
            t = Term::Meet(Box::new(t), Box::new(u));
        }
        Ok(t)
    }

    fn unary_term(&mut self) -> Result<Term> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("expected a term");
        };
        match tok {
            Tok::Tilde => {
                if !self.sig.kind.is_boolean() {
                    return self.err(format!("complement is not in the signature of {}", self.sig.kind));
                }
                self.i += 1;
                Ok(Term::Compl(Box::new(self.unary_term()?)))
            }
            Tok::Zero | Tok::One => {
                if !self.sig.kind.is_bounded() {
                    return self.err(format!("constants are not in the signature of {}", self.sig.kind));
                }
                self.i += 1;
                Ok(if tok == Tok::Zero { Term::Zero } else { Term::One })
            }
            Tok::LParen => {
                self.i += 1;
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Ident(name) => {
                if let Some(&arity) = self.sig.ops.get(&name) {
                    self.i += 1;
                    self.expect(&Tok::LParen, &format!("`(` after {name}"))?;
                    let mut args = vec![self.term()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.term()?);
                    }
                    self.expect(&Tok::RParen, "`)`")?;
                    if args.len() != arity {
                        return self.err(format!("{name} takes {arity} argument(s), got {}", args.len()));
                    }
                    return Ok(Term::Op(name, args));
                }
                if self.toks.get(self.i + 1).map(|(_, t)| t) == Some(&Tok::LParen) {
                    return self.err(format!("unknown operation `{name}`"));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => {
                        self.i += 1;
                        Ok(Term::Var(i))
                    }
                    None => self.err(format!("unbound variable `{name}`")),
                }
            }
            _ => self.err("expected a term"),
        }
    }
}

/// Parses `forall x y . formula` against `sig`; errors carry byte positions.
pub fn parse_sentence(text: &str, sig: &Signature) -> Result<Sentence> {
    let toks = lex(text)?;
    let mut p = Parser { toks, i: 0, end: text.len(), sig, vars: Vec::new() };
    let matrix = p.sentence()?;
    Ok(Sentence { vars: p.vars, matrix })
}
