use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::order::Order;

/// The unary property cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnaryCase {
    /// extensive
    A1e,
    /// contractive
    A1c,
    /// idempotent
    A2,
    /// idempotent and extensive
    A2e,
    /// idempotent and contractive
    A2c,
    /// involution
    A3,
    /// isotone
    B1,
    /// isotone and extensive
    B1e,
    /// isotone and contractive
    B1c,
    /// isotone and idempotent
    B2,
    /// closure operation
    B3,
    /// interior operation
    B4,
    /// antitone
    B5,
}

impl UnaryCase {
    pub const ALL: [UnaryCase; 13] = [
        UnaryCase::A1e,
        UnaryCase::A1c,
        UnaryCase::A2,
        UnaryCase::A2e,
        UnaryCase::A2c,
        UnaryCase::A3,
        UnaryCase::B1,
        UnaryCase::B1e,
        UnaryCase::B1c,
        UnaryCase::B2,
        UnaryCase::B3,
        UnaryCase::B4,
        UnaryCase::B5,
    ];

    pub fn label(self) -> &'static str {
        match self {
            UnaryCase::A1e => "A1e",
            UnaryCase::A1c => "A1c",
            UnaryCase::A2 => "A2",
            UnaryCase::A2e => "A2e",
            UnaryCase::A2c => "A2c",
            UnaryCase::A3 => "A3",
            UnaryCase::B1 => "B1",
            UnaryCase::B1e => "B1e",
            UnaryCase::B1c => "B1c",
            UnaryCase::B2 => "B2",
            UnaryCase::B3 => "B3",
            UnaryCase::B4 => "B4",
            UnaryCase::B5 => "B5",
        }
    }

    /// Cases whose constructions take joins rather than meets.
    pub fn uses_joins(self) -> bool {
        matches!(self, UnaryCase::B1c | UnaryCase::B4)
    }

    pub fn is_isotone(self) -> bool {
        matches!(
            self,
            UnaryCase::B1 | UnaryCase::B1e | UnaryCase::B1c | UnaryCase::B2 | UnaryCase::B3 | UnaryCase::B4
        )
    }
}

/// A lattice term in the variables `x1..xi` (stored 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LatticeTerm {
    Var(usize),
    Join(Box<LatticeTerm>, Box<LatticeTerm>),
    Meet(Box<LatticeTerm>, Box<LatticeTerm>),
}

impl LatticeTerm {
    pub fn max_var(&self) -> usize {
        match self {
            LatticeTerm::Var(v) => *v,
            LatticeTerm::Join(a, b) | LatticeTerm::Meet(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Value under `args`, or `None` if a needed meet or join is missing.
    pub fn eval<O: Order + ?Sized>(&self, host: &O, args: &[usize]) -> Option<usize> {
        match self {
            LatticeTerm::Var(v) => args.get(*v).copied(),
            LatticeTerm::Join(a, b) => host.join(a.eval(host, args)?, b.eval(host, args)?),
            LatticeTerm::Meet(a, b) => host.meet(a.eval(host, args)?, b.eval(host, args)?),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let tokens = tokenize_term(text)?;
        let mut pos = 0;
        let t = parse_join(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse { pos, msg: "trailing input in lattice term".into() });
        }
        Ok(t)
    }
}

impl fmt::Display for LatticeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeTerm::Var(v) => write!(f, "x{}", v + 1),
            LatticeTerm::Join(a, b) => write!(f, "({a} \\/ {b})"),
            LatticeTerm::Meet(a, b) => write!(f, "({a} /\\ {b})"),
        }
    }
}

#[derive(Debug, PartialEq)]
enum Tok {
    Var(usize),
    Join,
    Meet,
    Open,
    Close,
}

fn tokenize_term(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                out.push(Tok::Open);
                i += 1
            }
            ')' => {
                out.push(Tok::Close);
                i += 1
            }
            '^' | '∧' => {
                out.push(Tok::Meet);
                i += 1
            }
            'v' | '∨' => {
                out.push(Tok::Join);
                i += 1
            }
            '/' if chars.get(i + 1) == Some(&'\\') => {
                out.push(Tok::Meet);
                i += 2
            }
            '\\' if chars.get(i + 1) == Some(&'/') => {
                out.push(Tok::Join);
                i += 2
            }
            'x' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let num: String = chars[start..j].iter().collect();
                let k: usize = num
                    .parse()
                    .map_err(|_| Error::Parse { pos: i, msg: "expected variable index".into() })?;
                if k == 0 {
                    return Err(Error::Parse { pos: i, msg: "variables are numbered from x1".into() });
                }
                out.push(Tok::Var(k - 1));
                i = j;
            }
            _ => return Err(Error::Parse { pos: i, msg: format!("unexpected `{c}` in lattice term") }),
        }
    }
    Ok(out)
}

fn parse_join(t: &[Tok], pos: &mut usize) -> Result<LatticeTerm> {
    let mut left = parse_meet(t, pos)?;
    while t.get(*pos) == Some(&Tok::Join) {
        *pos += 1;
        let right = parse_meet(t, pos)?;
        left = LatticeTerm::Join(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn parse_meet(t: &[Tok], pos: &mut usize) -> Result<LatticeTerm> {
    let mut left = parse_atom(t, pos)?;
    while t.get(*pos) == Some(&Tok::Meet) {
        *pos += 1;
        let right = parse_atom(t, pos)?;
        left = LatticeTerm::Meet(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn parse_atom(t: &[Tok], pos: &mut usize) -> Result<LatticeTerm> {
    match t.get(*pos) {
        Some(Tok::Var(v)) => {
            *pos += 1;
            Ok(LatticeTerm::Var(*v))
        }
        Some(Tok::Open) => {
            *pos += 1;
            let inner = parse_join(t, pos)?;
            if t.get(*pos) != Some(&Tok::Close) {
                return Err(Error::Parse { pos: *pos, msg: "expected `)`".into() });
            }
            *pos += 1;
            Ok(inner)
        }
        _ => Err(Error::Parse { pos: *pos, msg: "expected a variable or `(`".into() }),
    }
}

/// Extra requirement on top of the monotonicity pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MixedBound {
    /// no extra requirement
    None,
    /// `x_h ≤ F(x̄)` for each listed (0-based) position
    Projections(Vec<usize>),
    /// `t(x_1..x_i) ≤ F(x̄)`
    Term(LatticeTerm),
}

/// An n-ary operation isotone in the first `i` places and antitone in the last `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MixedSpec {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub bound: MixedBound,
}

/// Which property an added operation must satisfy.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PropertySpec {
    Unary(UnaryCase),
    Mixed(MixedSpec),
}

impl From<UnaryCase> for PropertySpec {
    fn from(c: UnaryCase) -> Self {
        PropertySpec::Unary(c)
    }
}

impl PropertySpec {
    pub fn c1(n: usize, i: usize, j: usize) -> Result<Self> {
        Self::mixed(n, i, j, MixedBound::None)
    }

    pub fn mixed(n: usize, i: usize, j: usize, bound: MixedBound) -> Result<Self> {
        let spec = MixedSpec { n, i, j, bound };
        if n == 0 || i + j > n {
            return Err(Error::Invalid(format!("need n ≥ 1 and i + j ≤ n (n={n}, i={i}, j={j})")));
        }
        match &spec.bound {
            MixedBound::Projections(hs) => {
                if hs.is_empty() || hs.iter().any(|&h| h >= i) {
                    return Err(Error::Invalid("bounded positions must lie among the first i".into()));
                }
            }
            MixedBound::Term(t) => {
                if i == 0 || t.max_var() >= i {
                    return Err(Error::Invalid("term variables must lie among x1..xi".into()));
                }
            }
            MixedBound::None => {}
        }
        Ok(PropertySpec::Mixed(spec))
    }

    pub fn arity(&self) -> usize {
        match self {
            PropertySpec::Unary(_) => 1,
            PropertySpec::Mixed(m) => m.n,
        }
    }

    pub fn unary_case(&self) -> Option<UnaryCase> {
        match self {
            PropertySpec::Unary(c) => Some(*c),
            PropertySpec::Mixed(_) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PropertySpec::Unary(c) => c.label(),
            PropertySpec::Mixed(m) => match m.bound {
                MixedBound::None => "C1",
                MixedBound::Projections(_) => "C2",
                MixedBound::Term(_) => "C3",
            },
        }
    }

    /// Whether extension builds meets (as opposed to joins) of range elements.
    pub fn uses_joins(&self) -> bool {
        matches!(self, PropertySpec::Unary(c) if c.uses_joins())
    }

    /// Cases whose extension needs no completeness of the host.
    pub fn needs_no_bounds(&self) -> bool {
        matches!(self, PropertySpec::Unary(c) if *c <= UnaryCase::A3)
    }
}

impl fmt::Display for PropertySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertySpec::Unary(c) => f.write_str(c.label()),
            PropertySpec::Mixed(m) => {
                write!(f, "{}:i={},j={},n={}", self.label(), m.i, m.j, m.n)?;
                match &m.bound {
                    MixedBound::None => Ok(()),
                    MixedBound::Projections(hs) => {
                        let parts: Vec<String> = hs.iter().map(|h| (h + 1).to_string()).collect();
                        write!(f, ",s={}", parts.join("/"))
                    }
                    MixedBound::Term(t) => {
                        let s = t.to_string();
                        if s.starts_with('(') {
                            write!(f, ",t={s}")
                        } else {
                            write!(f, ",t=({s})")
                        }
                    }
                }
            }
        }
    }
}

impl FromStr for PropertySpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(c) = UnaryCase::ALL.iter().find(|c| c.label() == text) {
            return Ok(PropertySpec::Unary(*c));
        }
        let (head, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("unknown property `{text}`")))?;
        let (mut n, mut i, mut j) = (None, None, None);
        let mut projections = None;
        let mut term = None;
        for part in rest.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("bad parameter `{part}` in `{text}`")))?;
            let num = |v: &str| {
                v.trim().parse::<usize>().map_err(|_| Error::Invalid(format!("bad number `{v}`")))
            };
            match k.trim() {
                "n" => n = Some(num(v)?),
                "i" => i = Some(num(v)?),
                "j" => j = Some(num(v)?),
                "h" => {
                    let h = num(v)?;
                    projections = Some((0..h).collect::<Vec<usize>>());
                }
                "s" => {
                    let mut hs = Vec::new();
                    for p in v.split('/') {
                        let h = num(p)?;
                        if h == 0 {
                            return Err(Error::Invalid("positions are numbered from 1".into()));
                        }
                        hs.push(h - 1);
                    }
                    projections = Some(hs);
                }
                "t" => term = Some(LatticeTerm::parse(v)?),
                other => return Err(Error::Invalid(format!("unknown parameter `{other}`"))),
            }
        }
        let n = n.ok_or_else(|| Error::Invalid("missing n".into()))?;
        let i = i.unwrap_or(0);
        let j = j.unwrap_or(0);
        let bound = match head.trim() {
            "C1" => MixedBound::None,
            "C2" => MixedBound::Projections(
                projections.ok_or_else(|| Error::Invalid("C2 needs h= or s=".into()))?,
            ),
            "C3" => MixedBound::Term(term.ok_or_else(|| Error::Invalid("C3 needs t=".into()))?),
            other => return Err(Error::Invalid(format!("unknown property `{other}`"))),
        };
        PropertySpec::mixed(n, i, j, bound)
    }
}
