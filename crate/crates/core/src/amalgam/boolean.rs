use crate::error::{Error, Result};
use crate::order::{Embedding, FinitePoset, Order, OrderedStructure, StructureKind};

use super::instance::{interpolant_table, AmalgamationInstance, SuperamalgamResult};

fn atoms(s: &OrderedStructure) -> Vec<usize> {
    let bot = s.bottom().expect("Boolean algebras are bounded");
    (0..s.len()).filter(|&x| s.poset().lower_covers(x) == [bot]).collect()
}

/// Free product of two finite Boolean algebras amalgamated over a common subalgebra.
/// Atoms of D are the pairs `(p, q)` of atoms of A and B below the same atom of C; D keeps
/// the names of A and B and calls every other element `#k`.
pub fn boolean_amalgam(inst: &AmalgamationInstance) -> Result<SuperamalgamResult> {
    if inst.kind() != StructureKind::BooleanAlgebra {
        return Err(Error::Invalid(format!("expected Boolean algebras, got {}", inst.kind())));
    }
    let (a, b, c) = (inst.a(), inst.b(), inst.c());
    let (ca, cb) = (inst.c_in_a(), inst.c_in_b());
    let c_atoms = atoms(c);
    let under = |host: &OrderedStructure, inc: &Embedding, p: usize| {
        c_atoms.iter().position(|&z| host.leq(p, inc.apply(z))).expect("atoms of C partition the atoms above")
    };
    let mut pairs = Vec::new();
    for p in atoms(a) {
        for q in atoms(b) {
            if under(a, ca, p) == under(b, cb, q) {
                pairs.push((p, q));
            }
        }
    }
    let k = pairs.len();
    if k >= 16 {
        return Err(Error::BoundExceeded(format!("free product would have {k} atoms")));
    }
    let size = 1usize << k;
    let image = |host: &OrderedStructure, pick: &dyn Fn(&(usize, usize)) -> usize, x: usize| {
        pairs.iter().enumerate().filter(|(_, pq)| host.leq(pick(pq), x)).fold(0usize, |m, (i, _)| m | 1 << i)
    };
    let fa = Embedding { map: (0..a.len()).map(|x| image(a, &|pq| pq.0, x)).collect() };
    let fb = Embedding { map: (0..b.len()).map(|y| image(b, &|pq| pq.1, y)).collect() };

    let mut names: Vec<Option<String>> = vec![None; size];
    for x in 0..a.len() {
        names[fa.apply(x)] = Some(a.name(x).to_string());
    }
    for y in 0..b.len() {
        names[fb.apply(y)].get_or_insert_with(|| b.name(y).to_string());
    }
    let taken: Vec<String> = names.iter().flatten().cloned().collect();
    let mut fresh = crate::order::fresh_names(&taken, size - taken.len()).into_iter();
    let names: Vec<String> = names.into_iter().map(|n| n.unwrap_or_else(|| fresh.next().unwrap())).collect();

    let poset = FinitePoset::from_fn(size, |x, y| x & y == x);
    let join = (0..size * size).map(|i| (i / size) | (i % size)).collect();
    let meet = (0..size * size).map(|i| (i / size) & (i % size)).collect();
    let d = OrderedStructure::from_tables(StructureKind::BooleanAlgebra, names, poset, Some(join), Some(meet));
    let interpolants = interpolant_table(inst, &d, &fa, &fb)?;
    Ok(SuperamalgamResult { d, a_into_d: fa, b_into_d: fb, interpolants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::verify_superamalgam;

    /// Powerset algebra on `k` atoms; names other than the bounds get a prefix.
    fn ba(prefix: &str, k: usize) -> OrderedStructure {
        let size = 1 << k;
        let names = (0..size)
            .map(|m| match m {
                0 => "0".to_string(),
                m if m == size - 1 => "1".to_string(),
                m => format!("{prefix}{m}"),
            })
            .collect();
        OrderedStructure::new(StructureKind::BooleanAlgebra, names, FinitePoset::from_fn(size, |x, y| x & y == x))
            .unwrap()
    }

    #[test]
    fn two_four_element_algebras_over_two() {
        let inst = AmalgamationInstance::new(ba("a", 2), ba("b", 2), ba("c", 1)).unwrap();
        let r = boolean_amalgam(&inst).unwrap();
        assert_eq!(r.d.len(), 16);
        assert!(verify_superamalgam(&inst, &r).is_ok());
    }

    #[test]
    fn four_and_eight_over_two_gives_six_atoms() {
        let inst = AmalgamationInstance::new(ba("a", 2), ba("b", 3), ba("c", 1)).unwrap();
        assert_eq!(boolean_amalgam(&inst).unwrap().d.len(), 64);
    }

    #[test]
    fn over_the_whole_algebra() {
        let a = ba("a", 2);
        let mut b = ba("b", 3);
        // B contains A: rename the images of A's atoms {1}, {2} as a1, a2 inside B
        let mut names = b.names().to_vec();
        names[0b011] = "a1".into();
        names[0b100] = "a2".into();
        b.rename(names);
        let a = {
            let mut a = a;
            a.rename(vec!["0".into(), "a1".into(), "a2".into(), "1".into()]);
            a
        };
        let inst = AmalgamationInstance::new(a.clone(), b.clone(), a).unwrap();
        let r = boolean_amalgam(&inst).unwrap();
        assert_eq!(r.d.len(), b.len());
        assert!(verify_superamalgam(&inst, &r).is_ok());
    }
}
