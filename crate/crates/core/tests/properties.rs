use proptest::prelude::*;
use proptest::strategy::ValueTree;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use supamal_core::amalgam::{amalgamate, verify_superamalgam};
use supamal_core::freealg::{closure_models, normalize, SLCTerm};
use supamal_core::io::{parse_bundle, structure_to_json};
use supamal_core::logic::{evaluate, flatten, parse_sentence, TheoryProfile};
use supamal_core::order::{enumerate_structures, macneille_completion};
use supamal_core::partial_ext::{check_necessary, extend, verify_property, PartialOp, UnaryCase};
use supamal_core::sample::{random_expanded, random_instance};
use supamal_core::{FinitePoset, Order, OrderedStructure, StructureKind};

/// A poset on `0..n` from a strict relation `i < j` chosen by `bits`, closed transitively.
fn poset_from_bits(n: usize, bits: &[bool]) -> FinitePoset {
    let mut leq = vec![false; n * n];
    let mut b = bits.iter().copied().cycle();
    for i in 0..n {
        leq[i * n + i] = true;
        for j in i + 1..n {
            leq[i * n + j] = b.next().unwrap_or(false);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i * n + k] && leq[k * n + j] {
                    leq[i * n + j] = true;
                }
            }
        }
    }
    FinitePoset::from_matrix_unchecked(n, leq)
}

fn poset() -> impl Strategy<Value = OrderedStructure> {
    (1usize..=6, prop::collection::vec(any::<bool>(), 15)).prop_map(|(n, bits)| {
        OrderedStructure::from_poset(StructureKind::Poset, poset_from_bits(n, &bits)).unwrap()
    })
}

fn lattice() -> impl Strategy<Value = OrderedStructure> {
    (1usize..=6, any::<prop::sample::Index>()).prop_map(|(n, i)| {
        let all = enumerate_structures(StructureKind::Lattice, n);
        all[i.index(all.len())].clone()
    })
}

fn slc_term() -> impl Strategy<Value = SLCTerm> {
    let leaf = (0usize..3).prop_map(SLCTerm::Gen);
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(SLCTerm::k),
            (inner.clone(), inner).prop_map(|(a, b)| SLCTerm::join(a, b)),
        ]
    })
}

const SENTENCES: &[&str] = &[
    "forall x . x <= K(x)",
    "forall x y . x <= y -> K(x) <= K(y)",
    "forall x . K(K(x)) = K(x)",
    "forall x y . K(x) <= y -> K(x) <= K(y)",
    "forall x y . K(K(x)) = y -> K(y) = y | x <= y",
];

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn poset_generator_is_a_partial_order(p in poset()) {
        let n = p.len();
        for a in 0..n {
            prop_assert!(p.leq(a, a));
            for b in 0..n {
                prop_assert!(!(a != b && p.leq(a, b) && p.leq(b, a)));
                for c in 0..n {
                    prop_assert!(!(p.leq(a, b) && p.leq(b, c)) || p.leq(a, c));
                }
            }
        }
    }

    #[test]
    fn macneille_is_a_lattice_embedding(p in poset()) {
        let (m, e) = macneille_completion(&p);
        prop_assert!(m.validate().is_valid());
        prop_assert!(m.kind().is_lattice());
        prop_assert!(m.len() <= 1 << p.len());
        for a in 0..p.len() {
            for b in 0..p.len() {
                prop_assert_eq!(p.leq(a, b), m.leq(e.apply(a), e.apply(b)));
                if let Some(j) = p.join2(a, b) {
                    prop_assert_eq!(m.join2(e.apply(a), e.apply(b)), Some(e.apply(j)));
                }
            }
        }
        // completing a complete lattice changes nothing
        let (again, _) = macneille_completion(&m);
        prop_assert_eq!(again.len(), m.len());
    }

    #[test]
    fn json_round_trip(p in poset(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops = vec![("K".to_string(), UnaryCase::B3.into())];
        let s = random_expanded(StructureKind::Poset, p.len(), &ops, &mut rng).unwrap();
        let back = parse_bundle(&structure_to_json(&s)).unwrap().structure;
        prop_assert_eq!(back, s);
    }

    #[test]
    fn extension_when_condition_holds(
        l in lattice(),
        entries in prop::collection::vec((0usize..6, 0usize..6), 0..4),
        case in prop::sample::select(UnaryCase::ALL.to_vec()),
    ) {
        let n = l.len();
        let mut g = PartialOp::new(1);
        for (a, v) in entries {
            if g.get(&[a % n]).is_none() {
                g.insert(vec![a % n], v % n).unwrap();
            }
        }
        let w = case.into();
        if check_necessary(&l, &w, &g).unwrap().is_none() {
            let k = extend(&l, &w, &g).unwrap();
            prop_assert!(g.extended_by(&k));
            prop_assert!(verify_property(&l, &w, &k).is_none());
        } else {
            prop_assert!(extend(&l, &w, &g).is_err());
        }
    }

    #[test]
    fn normal_forms_are_canonical(t in slc_term(), u in slc_term()) {
        let nt = normalize(&t);
        prop_assert_eq!(&normalize(&nt.to_term()), &nt);
        let joined = normalize(&SLCTerm::join(t.clone(), u.clone()));
        prop_assert_eq!(joined, normalize(&SLCTerm::join(u, t)));
    }

    #[test]
    fn sampled_amalgams_verify(seed in any::<u64>(), kind in prop::sample::select(vec![
        StructureKind::Poset, StructureKind::MeetSemilattice, StructureKind::Lattice,
    ])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(kind, 5, &[], &mut rng).unwrap();
        let r = amalgamate(&inst, kind).unwrap();
        prop_assert!(verify_superamalgam(&inst, &r).is_ok());
    }

    #[test]
    fn flattening_preserves_truth(seed in any::<u64>(), size in 1usize..=4, i in 0..SENTENCES.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops = vec![("K".to_string(), UnaryCase::B1.into())];
        let m = random_expanded(StructureKind::Poset, size, &ops, &mut rng).unwrap();
        let profile = TheoryProfile::new(StructureKind::Poset, ops).unwrap();
        let s = parse_sentence(SENTENCES[i], &profile.signature()).unwrap();
        prop_assert_eq!(evaluate(&m, &s).unwrap().holds, evaluate(&m, &flatten(&s)).unwrap().holds);
    }
}

#[test]
fn normal_forms_hold_in_every_small_model() {
    // a fixed sweep complementing the random terms above
    let models = closure_models(3).unwrap();
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..200 {
        let t = slc_term().new_tree(&mut runner).unwrap().current();
        let nf = normalize(&t).to_term();
        for m in &models {
            let k = &m.op("K").unwrap().table;
            for a in 0..m.len() {
                for b in 0..m.len() {
                    for c in 0..m.len() {
                        assert_eq!(t.eval(m, k, &[a, b, c]), nf.eval(m, k, &[a, b, c]));
                    }
                }
            }
        }
    }
}
