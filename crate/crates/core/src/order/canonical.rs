use std::cmp::Ordering;

use super::structure::all_tuples;
use super::{Order, OrderedStructure, StructureKind};

/// Isomorphism-invariant encoding of a structure: equal iff the structures are isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub kind: StructureKind,
    pub size: usize,
    pub signature: Vec<(String, String)>,
    pub code: Vec<u32>,
}

/// Returns the canonical form and the relabeling (`perm[old] = new`) that realizes it.
///
/// The matrix code is minimized over all permutations that respect a refined
/// down-set/up-set colouring, with prefix pruning.
pub fn canonical_form(s: &OrderedStructure) -> (CanonicalForm, Vec<usize>) {
    let n = s.len();
    let colors = refine_colors(s);
    let mut by_color: Vec<usize> = (0..n).collect();
    by_color.sort_by_key(|&x| (colors[x], x));
    let slot_color: Vec<usize> = by_color.iter().map(|&x| colors[x]).collect();

    let mut search = Search {
        s,
        colors: &colors,
        slot_color: &slot_color,
        order: Vec::with_capacity(n),
        used: vec![false; n],
        prefix: Vec::new(),
        best: None,
    };
    search.run();
    let (code, order) = search.best.unwrap_or_default();
    let mut perm = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    let signature = s
        .ops()
        .iter()
        .map(|(k, op)| {
            let prop = op.property.as_ref().map(|p| p.to_string()).unwrap_or_default();
            (k.clone(), format!("{}/{}", op.table.arity(), prop))
        })
        .collect();
    (CanonicalForm { kind: s.kind(), size: n, signature, code }, perm)
}

fn refine_colors(s: &OrderedStructure) -> Vec<usize> {
    let n = s.len();
    let key: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let down = (0..n).filter(|&y| s.leq(y, x)).count();
            let up = (0..n).filter(|&y| s.leq(x, y)).count();
            let mut k = vec![down, up];
            for op in s.ops().values() {
                if op.table.arity() == 1 {
                    let v = op.table.apply(x);
                    k.push(if v == x { 0 } else if s.leq(x, v) { 1 } else if s.leq(v, x) { 2 } else { 3 });
                }
            }
            k
        })
        .collect();
    let mut colors = rank(&key);
    for _ in 0..n {
        let next: Vec<Vec<usize>> = (0..n)
            .map(|x| {
                let mut below: Vec<usize> = (0..n).filter(|&y| s.poset().lt(y, x)).map(|y| colors[y]).collect();
                let mut above: Vec<usize> = (0..n).filter(|&y| s.poset().lt(x, y)).map(|y| colors[y]).collect();
                below.sort_unstable();
                above.sort_unstable();
                let mut k = vec![colors[x], usize::MAX];
                k.extend(below);
                k.push(usize::MAX);
                k.extend(above);
                for op in s.ops().values() {
                    if op.table.arity() == 1 {
                        k.push(colors[op.table.apply(x)]);
                    }
                }
                k
            })
            .collect();
        let refined = rank(&next);
        let stable = count_distinct(&refined) == count_distinct(&colors);
        colors = refined;
        if stable {
            break;
        }
    }
    colors
}

fn rank(keys: &[Vec<usize>]) -> Vec<usize> {
    let mut sorted: Vec<&Vec<usize>> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(&k).unwrap()).collect()
}

fn count_distinct(c: &[usize]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

struct Search<'a> {
    s: &'a OrderedStructure,
    colors: &'a [usize],
    slot_color: &'a [usize],
    order: Vec<usize>,
    used: Vec<bool>,
    prefix: Vec<u32>,
    best: Option<(Vec<u32>, Vec<usize>)>,
}

impl Search<'_> {
    fn run(&mut self) {
        let n = self.s.len();
        let pos = self.order.len();
        if pos == n {
            let mut code = self.prefix.clone();
            code.extend(self.ops_code());
            let better = match &self.best {
                None => true,
                Some((b, _)) => code < *b,
            };
            if better {
                self.best = Some((code, self.order.clone()));
            }
            return;
        }
        for x in 0..n {
            if self.used[x] || self.colors[x] != self.slot_color[pos] {
                continue;
            }
            let mark = self.prefix.len();
            for &y in &self.order {
                self.prefix.push(self.s.leq(y, x) as u32);
                self.prefix.push(self.s.leq(x, y) as u32);
            }
            let prune = match &self.best {
                Some((b, _)) => self.prefix.as_slice().cmp(&b[..self.prefix.len()]) == Ordering::Greater,
                None => false,
            };
            if !prune {
                self.used[x] = true;
                self.order.push(x);
                self.run();
                self.order.pop();
                self.used[x] = false;
            }
            self.prefix.truncate(mark);
        }
    }

    fn ops_code(&self) -> Vec<u32> {
        let n = self.s.len();
        let mut inv = vec![0; n];
        for (new, &old) in self.order.iter().enumerate() {
            inv[old] = new;
        }
        let mut code = Vec::new();
        for op in self.s.ops().values() {
            for args in all_tuples(n, op.table.arity()) {
                let old: Vec<usize> = args.iter().map(|&a| self.order[a]).collect();
                code.push(inv[op.table.get(&old)] as u32);
            }
        }
        code
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{FinitePoset, OpTable, Operation};

    fn poset(n: usize, pairs: &[(usize, usize)]) -> OrderedStructure {
        OrderedStructure::from_poset(StructureKind::Poset, FinitePoset::from_pairs(n, pairs).unwrap())
            .unwrap()
    }

    #[test]
    fn chain_labelings_agree() {
        let a = poset(3, &[(0, 1), (1, 2)]);
        let b = poset(3, &[(2, 0), (0, 1)]);
        assert_eq!(canonical_form(&a).0, canonical_form(&b).0);
    }

    #[test]
    fn chain_vs_antichain() {
        assert_ne!(canonical_form(&poset(2, &[(0, 1)])).0, canonical_form(&poset(2, &[])).0);
    }

    #[test]
    fn permuting_gives_canonical_structure() {
        let s = poset(4, &[(0, 1), (2, 1), (2, 3)]);
        let (f, perm) = canonical_form(&s);
        let t = s.permute(&perm);
        let (g, perm2) = canonical_form(&t);
        assert_eq!(f, g);
        assert_eq!(perm2, vec![0, 1, 2, 3]);
    }

    #[test]
    fn operations_distinguish() {
        let base = poset(2, &[]);
        let id = base.clone().with_op("K", Operation { property: None, table: OpTable::identity(2) }).unwrap();
        let swap = base
            .with_op("K", Operation { property: None, table: OpTable::unary(vec![1, 0]).unwrap() })
            .unwrap();
        assert_ne!(canonical_form(&id).0, canonical_form(&swap).0);
    }
}
