//! Labelled base models generated by `k` elements, in compact form.
//!
//! * posets: preorders on the `k` generators;
//! * join (meet) semilattices: intersection-closed families of subsets of the generators
//!   containing `∅` and the full set; elements are the nonempty closed sets, ordered by `⊆`
//!   (by `⊇` for meet semilattices);
//! * distributive lattices and Boolean algebras: a nonempty set `A` of valuations in
//!   `{0,1}^k`; generator `i` is the set of valuations in `A` with bit `i`, and the model is
//!   the bounded sublattice (subalgebra) of `P(A)` they generate.

use crate::order::StructureKind;

#[derive(Clone, Debug)]
pub(crate) enum Rep {
    /// `rows[i]`: the generators above generator `i`.
    Preorder { rows: Vec<u32> },
    /// Bit `S` of `family` is set when the subset `S` is closed.
    Moore { k: usize, family: u64, dual: bool },
    /// Generator masks over `n` valuations.
    Sets { n: usize, gens: Vec<u64>, boolean: bool },
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

impl Rep {
    pub fn var(&self, i: usize) -> u64 {
        match self {
            // the least generator equivalent to i names its class
            Rep::Preorder { rows } => {
                (0..rows.len()).find(|&j| rows[i] >> j & 1 == 1 && rows[j] >> i & 1 == 1).unwrap() as u64
            }
            Rep::Moore { .. } => self.closure(1 << i),
            Rep::Sets { gens, .. } => gens[i],
        }
    }

    fn closure(&self, x: u64) -> u64 {
        let Rep::Moore { k, family, .. } = self else { unreachable!() };
        let full = (1u64 << k) - 1;
        bits(*family).map(|s| s as u64).filter(|&s| x & !s == 0).fold(full, |acc, s| acc & s)
    }

    pub fn leq(&self, a: u64, b: u64) -> bool {
        match self {
            Rep::Preorder { rows } => rows[a as usize] >> b & 1 == 1,
            Rep::Moore { dual: false, .. } | Rep::Sets { .. } => a & !b == 0,
            Rep::Moore { dual: true, .. } => b & !a == 0,
        }
    }

    pub fn join(&self, a: u64, b: u64) -> u64 {
        match self {
            Rep::Moore { dual: false, .. } => self.closure(a | b),
            Rep::Sets { .. } => a | b,
            _ => unreachable!("no joins"),
        }
    }

    pub fn meet(&self, a: u64, b: u64) -> u64 {
        match self {
            Rep::Moore { dual: true, .. } => self.closure(a | b),
            Rep::Sets { .. } => a & b,
            _ => unreachable!("no meets"),
        }
    }

    fn full(&self) -> u64 {
        match self {
            Rep::Sets { n, .. } => if *n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            _ => unreachable!("no bounds"),
        }
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        self.full()
    }

    pub fn compl(&self, a: u64) -> u64 {
        self.full() & !a
    }

    /// Every element, in increasing numeric order of the representation.
    pub fn elements(&self) -> Vec<u64> {
        match self {
            Rep::Preorder { rows } => {
                let mut v: Vec<u64> = (0..rows.len()).map(|i| self.var(i)).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            Rep::Moore { family, .. } => bits(*family).filter(|&s| s != 0).map(|s| s as u64).collect(),
            Rep::Sets { n, gens, boolean } => {
                if *boolean {
                    return (0..1u64 << n).collect();
                }
                let full = self.full();
                let mut products = Vec::new();
                for sub in 0..1u64 << gens.len() {
                    products.push(bits(sub).fold(full, |acc, i| acc & gens[i]));
                }
                let mut els = vec![0u64];
                for p in products {
                    let more: Vec<u64> = els.iter().map(|&e| e | p).collect();
                    els.extend(more);
                    els.sort_unstable();
                    els.dedup();
                }
                els
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Rep::Sets { n, boolean: true, .. } => 1 << n,
            Rep::Moore { family, .. } => family.count_ones() as usize - 1,
            _ => self.elements().len(),
        }
    }
}

/// All preorders on `0..k`, each as its up-set rows.
pub(crate) fn preorders(k: usize) -> Vec<Vec<u32>> {
    fn go(i: usize, k: usize, rows: &mut [u32], out: &mut Vec<Vec<u32>>) {
        if i == k {
            out.push(rows.to_vec());
            return;
        }
        // choose the previous elements below i (a down-set D) and above i (an up-set U)
        let prev = (1u32 << i) - 1;
        let below_of = |j: usize, rows: &[u32]| (0..i).filter(|&x| rows[x] >> j & 1 == 1).fold(0u32, |m, x| m | 1 << x);
        for d in 0..=prev {
            if (0..i).any(|x| d >> x & 1 == 1 && below_of(x, rows) & !d != 0) {
                continue;
            }
            for u in 0..=prev {
                if (0..i).any(|x| u >> x & 1 == 1 && rows[x] & prev & !u != 0) {
                    continue;
                }
                if (0..i).any(|x| d >> x & 1 == 1 && rows[x] & u != u) {
                    continue;
                }
                let mut next = rows.to_vec();
                for x in 0..i {
                    if d >> x & 1 == 1 {
                        next[x] |= 1 << i;
                    }
                }
                next.push(u | 1 << i);
                go(i + 1, k, &mut next, out);
            }
        }
    }
    let mut out = Vec::new();
    go(0, k, &mut Vec::new(), &mut out);
    out
}

/// Intersection-closed families on `0..k` containing `∅` and the full set, as bitmasks over
/// the `2^k` subsets.
pub(crate) fn moore_families(k: usize) -> Vec<u64> {
    assert!(k <= 5);
    let full = (1u64 << k) - 1;
    let mut order: Vec<u64> = (1..full).collect();
    order.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
    fn go(i: usize, order: &[u64], family: u64, full: u64, out: &mut Vec<u64>) {
        if i == order.len() {
            out.push(family);
            return;
        }
        let s = order[i];
        let inter = bits(family)
            .map(|t| t as u64)
            .filter(|&t| t != s && s & !t == 0)
            .fold(full, |acc, t| acc & t);
        if inter == s {
            go(i + 1, order, family | 1 << s, full, out);
        } else {
            go(i + 1, order, family, full, out);
            go(i + 1, order, family | 1 << s, full, out);
        }
    }
    let mut out = Vec::new();
    let base = 1u64 | 1u64 << full;
    if k == 0 {
        return vec![1];
    }
    go(0, &order, base, full, &mut out);
    out
}

/// Base configurations for `kind` with `k` generators, smallest models first. For
/// distributive lattices and Boolean algebras `max_valuations` limits `|A|`.
pub(crate) fn configurations(kind: StructureKind, k: usize, max_valuations: usize) -> Vec<Rep> {
    let mut reps: Vec<Rep> = match kind {
        StructureKind::Poset => preorders(k).into_iter().map(|rows| Rep::Preorder { rows }).collect(),
        StructureKind::JoinSemilattice | StructureKind::MeetSemilattice => moore_families(k)
            .into_iter()
            .map(|family| Rep::Moore { k, family, dual: kind == StructureKind::MeetSemilattice })
            .collect(),
        StructureKind::DistributiveLattice | StructureKind::BooleanAlgebra => {
            let vals = 1usize << k;
            let mut out = Vec::new();
            let mut pick = Vec::new();
            fn subsets(start: usize, vals: usize, max: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if !pick.is_empty() {
                    out.push(pick.clone());
                }
                if pick.len() == max {
                    return;
                }
                for v in start..vals {
                    pick.push(v);
                    subsets(v + 1, vals, max, pick, out);
                    pick.pop();
                }
            }
            let mut picks = Vec::new();
            subsets(0, vals, max_valuations.min(vals), &mut pick, &mut picks);
            for a in picks {
                let gens = (0..k)
                    .map(|i| a.iter().enumerate().filter(|(_, &v)| v >> i & 1 == 1).fold(0u64, |m, (p, _)| m | 1 << p))
                    .collect();
                out.push(Rep::Sets { n: a.len(), gens, boolean: kind == StructureKind::BooleanAlgebra });
            }
            out
        }
        _ => Vec::new(),
    };
    let mut keyed: Vec<(usize, usize, Rep)> = reps.drain(..).enumerate().map(|(i, r)| (r.size(), i, r)).collect();
    keyed.sort_by_key(|(s, i, _)| (*s, *i));
    keyed.into_iter().map(|(_, _, r)| r).collect()
}
