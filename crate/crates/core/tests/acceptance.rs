//! Acceptance criteria. Runs without the libtest harness so every criterion prints one
//! PASS/FAIL line; the process fails if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use supamal_core::amalgam::{
    amalgamate, amalgamate_expanded, jonsson_poset_amalgam, verify_superamalgam, AmalgamationInstance, Comparability,
};
use supamal_core::fraisse::{all_embeddings, build_chain, check_extension_property_within, ClassSpec};
use supamal_core::freealg::{
    closure_models, free_algebra, normal_forms, normalize, separating_model, size_bound, SLCTerm,
};
use supamal_core::io::load_bundle;
use supamal_core::logic::{
    brute_force_decide, certify_countermodel, decide_universal, parse_sentence, TheoryProfile, Verdict,
};
use supamal_core::order::{all_tuples, birkhoff_embedding, enumerate_structures, macneille_completion};
use supamal_core::partial_ext::{
    all_extensions, brute_force_extension_exists, check_necessary, extend, extend_family, iterate_idempotent,
    verify_property, ComparabilitySpec,
};
use supamal_core::sample::random_instance;
use supamal_core::{FinitePoset, OpTable, Order, OrderedStructure, PartialOp, PropertySpec, StructureKind, UnaryCase};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

const CAP: u128 = 1 << 24;

// ---------------------------------------------------------------- oracles

/// Greatest lower bound of `s` by scanning every element.
fn glb(o: &impl Order, s: &[usize]) -> Option<usize> {
    let lower: Vec<usize> = (0..o.len()).filter(|&x| s.iter().all(|&y| o.leq(x, y))).collect();
    lower.iter().copied().find(|&g| lower.iter().all(|&l| o.leq(l, g)))
}

fn lub(o: &impl Order, s: &[usize]) -> Option<usize> {
    let upper: Vec<usize> = (0..o.len()).filter(|&x| s.iter().all(|&y| o.leq(y, x))).collect();
    upper.iter().copied().find(|&g| upper.iter().all(|&u| o.leq(g, u)))
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
}

/// All unary maps on `0..n` as value vectors.
fn all_maps(n: usize) -> Vec<Vec<usize>> {
    all_tuples(n, n).collect()
}

/// Reflexive-transitive closure of `pairs` on `0..n`, as a matrix.
fn closure(n: usize, pairs: &[(usize, usize)]) -> Vec<bool> {
    let mut r = vec![false; n * n];
    for i in 0..n {
        r[i * n + i] = true;
    }
    for &(a, b) in pairs {
        r[a * n + b] = true;
    }
    for k in 0..n {
        for a in 0..n {
            if r[a * n + k] {
                for b in 0..n {
                    if r[k * n + b] {
                        r[a * n + b] = true;
                    }
                }
            }
        }
    }
    r
}

fn isotone(o: &impl Order, f: &[usize]) -> bool {
    (0..o.len()).all(|a| (0..o.len()).all(|b| !o.leq(a, b) || o.leq(f[a], f[b])))
}

fn idempotent(f: &[usize]) -> bool {
    (0..f.len()).all(|a| f[f[a]] == f[a])
}

fn involutive(f: &[usize]) -> bool {
    (0..f.len()).all(|a| f[f[a]] == a)
}

fn below(o: &impl Order, f: &[usize], g: &[usize]) -> bool {
    (0..f.len()).all(|a| o.leq(f[a], g[a]))
}

fn table(t: &OpTable) -> Vec<usize> {
    t.values().to_vec()
}

fn idx(s: &OrderedStructure, name: &str) -> usize {
    s.index_of(name).unwrap_or_else(|| panic!("no element {name}"))
}

// ---------------------------------------------------------------- 1

fn criterion_1() -> Outcome {
    let mut checked = 0usize;
    let mut extendable = 0usize;
    for size in 0..=4 {
        for host in enumerate_structures(StructureKind::Lattice, size) {
            for d in subsets(size) {
                for vals in all_tuples(size, d.len()) {
                    let pairs: Vec<(usize, usize)> = d.iter().copied().zip(vals).collect();
                    let g = PartialOp::unary(&pairs).unwrap();
                    for case in UnaryCase::ALL {
                        let w: PropertySpec = case.into();
                        let necessary = check_necessary(&host, &w, &g).unwrap().is_none();
                        let exists = brute_force_extension_exists(&host, &w, &g, CAP).unwrap();
                        ensure!(
                            necessary == exists,
                            "{case:?} on {:?} with G = {pairs:?}: condition {necessary}, extension exists {exists}",
                            host.poset()
                        );
                        if necessary {
                            let k = extend(&host, &w, &g).map_err(|e| format!("{case:?} {pairs:?}: {e}"))?;
                            ensure!(g.extended_by(&k), "{case:?} {pairs:?}: result does not extend G");
                            ensure!(verify_property(&host, &w, &k).is_none(), "{case:?} {pairs:?}: result lacks {case:?}");
                            extendable += 1;
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} (lattice, G, w) triples, {extendable} extendable"))
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Outcome {
    // iterated H needs HH <= H
    let hh = load_bundle(&fixture("hh_three_chain.json")).map_err(|e| e.to_string())?.structure;
    let h = hh.op("H").unwrap().table.clone();
    let err = iterate_idempotent(&hh, &h).err().ok_or("iterate_idempotent accepted H")?.to_string();
    ensure!(err.contains("h(h(a)) = c is not below h(a) = b"), "unexpected message: {err}");
    let k1 = table(&hh.op("K1").unwrap().table);
    let k2 = table(&hh.op("K2").unwrap().table);
    let hv = table(&h);
    ensure!(below(&hh, &k1, &hv) && below(&hh, &k2, &hv), "K1, K2 not below H");
    let above_both: Vec<Vec<usize>> = all_maps(3)
        .into_iter()
        .filter(|f| isotone(&hh, f) && idempotent(f) && below(&hh, &k1, f) && below(&hh, &k2, f))
        .collect();
    let c = idx(&hh, "c");
    ensure!(above_both == vec![vec![c; 3]], "idempotents above K1, K2: {above_both:?}");
    ensure!(!below(&hh, &above_both[0], &hv), "the constant c is below H");

    // no largest idempotent extension
    let nl = load_bundle(&fixture("idempotent_no_largest.json")).map_err(|e| e.to_string())?;
    let (s, g) = (&nl.structure, &nl.partial_ops["G"]);
    let w = g.property.clone().unwrap();
    let exts = all_extensions(s, &w, &g.op, CAP).map_err(|e| e.to_string())?;
    let at_c: BTreeSet<&str> = exts.iter().map(|k| s.name(k.apply(idx(s, "c")))).collect();
    ensure!(at_c == BTreeSet::from(["0", "c", "a", "b"]), "values of K(c): {at_c:?}");
    let oracle: BTreeSet<&str> = all_maps(5)
        .into_iter()
        .filter(|f| idempotent(f) && g.op.entries().all(|(a, v)| f[a[0]] == v))
        .map(|f| s.name(f[idx(s, "c")]))
        .collect();
    ensure!(oracle == at_c, "brute-force values of K(c): {oracle:?}");

    // no involution above two involutions
    let iv = load_bundle(&fixture("involution_no_upper_bound.json")).map_err(|e| e.to_string())?;
    let s = &iv.structure;
    let (ko, kb) = (table(&s.op("Ko").unwrap().table), table(&s.op("Kb").unwrap().table));
    let g = &iv.partial_ops["G"].op;
    for k in [&ko, &kb] {
        ensure!(involutive(k) && g.entries().all(|(a, v)| k[a[0]] == v), "fixture involution {k:?} is not valid");
    }
    let w: PropertySpec = UnaryCase::A3.into();
    let exts = all_extensions(s, &w, g, CAP).map_err(|e| e.to_string())?;
    ensure!(exts.len() >= 2, "only {} involutions extend G", exts.len());
    ensure!(
        !exts.iter().any(|k| below(s, &ko, &table(k)) && below(s, &kb, &table(k))),
        "an involution lies above both"
    );
    ensure!(
        !all_maps(4).iter().any(|f| involutive(f) && f[idx(s, "1")] == idx(s, "1") && below(s, &ko, f) && below(s, &kb, f)),
        "brute force finds an involution above both"
    );

    // naive closures break comparability; the family construction repairs it
    let dpq = load_bundle(&fixture("comparable_closures_dpq.json")).map_err(|e| e.to_string())?;
    let s = &dpq.structure;
    let (go, gb) = (&dpq.partial_ops["Ko"].op, &dpq.partial_ops["Kb"].op);
    let w: PropertySpec = UnaryCase::B3.into();
    let (no, nb) = (extend(s, &w, go).unwrap(), extend(s, &w, gb).unwrap());
    let p = idx(s, "p");
    ensure!(s.name(no.apply(p)) == "q" && s.name(nb.apply(p)) == "p", "naive K(p) values differ from q and p");
    ensure!(!s.leq(no.apply(p), nb.apply(p)), "naive extensions are comparable");
    let spec = ComparabilitySpec {
        names: vec!["Ko".into(), "Kb".into()],
        index: FinitePoset::chain(2),
        ops: vec![go.clone(), gb.clone()],
    };
    let fam = extend_family(s, &w, &spec).map_err(|e| e.to_string())?;
    ensure!(below(s, &table(&fam["Ko"]), &table(&fam["Kb"])), "repaired closures are not comparable");
    for (name, g) in [("Ko", go), ("Kb", gb)] {
        ensure!(g.extended_by(&fam[name]) && verify_property(s, &w, &fam[name]).is_none(), "{name} repaired badly");
    }

    // comparable involutions on the 4-chain
    let ch = load_bundle(&fixture("involution_pair_chain4.json")).map_err(|e| e.to_string())?;
    let s = &ch.structure;
    let (go, gb) = (&ch.partial_ops["Go"].op, &ch.partial_ops["Gb"].op);
    let w: PropertySpec = UnaryCase::A3.into();
    ensure!(
        check_necessary(s, &w, go).unwrap().is_none() && check_necessary(s, &w, gb).unwrap().is_none(),
        "each partial involution should extend on its own"
    );
    let spec = ComparabilitySpec { names: vec!["Go".into(), "Gb".into()], index: FinitePoset::chain(2), ops: vec![go.clone(), gb.clone()] };
    ensure!(extend_family(s, &w, &spec).is_err(), "extend_family produced a comparable pair");
    let (eo, eb) = (all_extensions(s, &w, go, CAP).unwrap(), all_extensions(s, &w, gb, CAP).unwrap());
    ensure!(!eo.is_empty() && !eb.is_empty(), "no single extensions");
    let pair = eo.iter().any(|ko| eb.iter().any(|kb| below(s, &table(ko), &table(kb))));
    ensure!(!pair, "brute force found a comparable involution pair");
    Ok("five fixtures reproduce".into())
}

// ---------------------------------------------------------------- 3

/// Poset amalgam relation by transitive closure of both orders on the union.
fn union_closure(inst: &AmalgamationInstance) -> (Vec<String>, Vec<bool>) {
    let mut names: Vec<String> = inst.a().names().to_vec();
    for n in inst.b().names() {
        if !names.contains(n) {
            names.push(n.clone());
        }
    }
    let pos = |n: &str| names.iter().position(|m| m == n).unwrap();
    let mut pairs = Vec::new();
    for s in [inst.a(), inst.b()] {
        for x in 0..s.len() {
            for y in 0..s.len() {
                if s.leq(x, y) {
                    pairs.push((pos(s.name(x)), pos(s.name(y))));
                }
            }
        }
    }
    let n = names.len();
    (names, closure(n, &pairs))
}

fn rename(s: &OrderedStructure, f: impl Fn(usize) -> String) -> OrderedStructure {
    let mut t = s.clone();
    t.rename((0..s.len()).map(f).collect());
    t
}

fn criterion_3() -> Outcome {
    let posets: Vec<OrderedStructure> = (0..=4).flat_map(|n| enumerate_structures(StructureKind::Poset, n)).collect();
    let mut count = 0usize;
    for a in &posets {
        for sub in subsets(a.len()) {
            let c = a.induced(&sub);
            for b in &posets {
                for e in all_embeddings(&c, b) {
                    // shared elements keep C's names; the rest are made disjoint
                    let cn = |i: usize| format!("c{i}");
                    let a2 = rename(a, |x| sub.iter().position(|&y| y == x).map_or(format!("a{x}"), cn));
                    let b2 = rename(b, |x| e.map.iter().position(|&y| y == x).map_or(format!("b{x}"), cn));
                    let c2 = rename(&c, cn);
                    let inst = AmalgamationInstance::new(a2, b2, c2).map_err(|e| e.to_string())?;
                    let r = jonsson_poset_amalgam(&inst).map_err(|e| e.to_string())?;
                    let rep = verify_superamalgam(&inst, &r);
                    ensure!(rep.is_ok(), "poset instance {count}: {rep}");
                    let (names, rel) = union_closure(&inst);
                    ensure!(r.d.len() == names.len(), "amalgam is not the union");
                    let n = names.len();
                    for x in 0..n {
                        for y in 0..n {
                            let (dx, dy) = (idx(&r.d, &names[x]), idx(&r.d, &names[y]));
                            ensure!(r.d.leq(dx, dy) == rel[x * n + y], "four-piece order differs from the closure at ({}, {})", names[x], names[y]);
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sampled = 0usize;
    for (kind, max) in [
        (StructureKind::JoinSemilattice, 5),
        (StructureKind::MeetSemilattice, 5),
        (StructureKind::Lattice, 5),
        (StructureKind::BooleanAlgebra, 8),
    ] {
        for i in 0..200 {
            let inst = random_instance(kind, max, &[], &mut rng).map_err(|e| e.to_string())?;
            let r = amalgamate(&inst, kind).map_err(|e| format!("{kind} sample {i}: {e}"))?;
            let rep = verify_superamalgam(&inst, &r);
            ensure!(rep.is_ok(), "{kind} sample {i}: {rep}");
            if kind == StructureKind::BooleanAlgebra {
                boolean_interpolation(&inst, &r.d, &r.a_into_d.map, &r.b_into_d.map)
                    .map_err(|m| format!("Boolean sample {i}: {m}"))?;
            }
            sampled += 1;
        }
    }
    Ok(format!("{count} exhaustive poset triples, {sampled} sampled (semi)lattice and Boolean triples"))
}

/// `a ∧ b = 0` in D implies some `c` in C with `a ≤ c` and `b ≤ ¬c`.
fn boolean_interpolation(inst: &AmalgamationInstance, d: &OrderedStructure, fa: &[usize], fb: &[usize]) -> Result<(), String> {
    let zero = d.bottom().unwrap();
    let (a, b, c) = (inst.a(), inst.b(), inst.c());
    for x in 0..a.len() {
        for y in 0..b.len() {
            if glb(d, &[fa[x], fb[y]]) != Some(zero) {
                continue;
            }
            let ok = (0..c.len()).any(|z| {
                let (za, zb) = (idx(a, c.name(z)), idx(b, c.name(z)));
                let nz = b.complement(zb).unwrap();
                a.leq(x, za) && b.leq(y, nz)
            });
            ensure!(ok, "no interpolant for {} and {}", a.name(x), b.name(y));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let props: Vec<PropertySpec> = vec![
        UnaryCase::B1.into(),
        UnaryCase::B3.into(),
        UnaryCase::B5.into(),
        "C1:i=1,j=1,n=2".parse().unwrap(),
    ];
    let kinds = [StructureKind::Poset, StructureKind::JoinSemilattice, StructureKind::Lattice, StructureKind::BooleanAlgebra];
    let mut total = 0usize;
    let mut comparable = 0usize;
    for kind in kinds {
        let max = if kind == StructureKind::BooleanAlgebra { 8 } else { 4 };
        for w in &props {
            let ops = vec![("K".to_string(), w.clone())];
            for i in 0..100 {
                let inst = random_instance(kind, max, &ops, &mut rng).map_err(|e| e.to_string())?;
                check_expanded(&inst, &[], w).map_err(|m| format!("{kind} {w} sample {i}: {m}"))?;
                total += 1;
            }
            // two operations declared comparable: keep samples where A and B satisfy it
            let ops = vec![("K1".to_string(), w.clone()), ("K2".to_string(), w.clone())];
            let cmp = [Comparability { lower: "K1".into(), upper: "K2".into() }];
            let mut found = 0;
            for _ in 0..2000 {
                if found == 20 {
                    break;
                }
                let inst = random_instance(kind, max, &ops, &mut rng).map_err(|e| e.to_string())?;
                if ![inst.a(), inst.b()].iter().all(|s| ops_below(s, "K1", "K2")) {
                    continue;
                }
                check_expanded(&inst, &cmp, w).map_err(|m| format!("{kind} {w} comparable sample: {m}"))?;
                found += 1;
            }
            ensure!(found > 0, "{kind} {w}: no comparable samples drawn");
            comparable += found;
        }
    }
    Ok(format!("{total} expanded instances, {comparable} with a declared comparability"))
}

fn ops_below(s: &OrderedStructure, lo: &str, hi: &str) -> bool {
    let (l, h) = (&s.op(lo).unwrap().table, &s.op(hi).unwrap().table);
    l.tuples().all(|t| s.leq(l.get(&t), h.get(&t)))
}

fn check_expanded(inst: &AmalgamationInstance, cmp: &[Comparability], w: &PropertySpec) -> Result<(), String> {
    let r = amalgamate_expanded(inst, cmp).map_err(|e| e.to_string())?;
    let rep = verify_superamalgam(inst, &r);
    ensure!(rep.is_ok(), "{rep}");
    for (side, s, f) in [("A", inst.a(), &r.a_into_d), ("B", inst.b(), &r.b_into_d)] {
        for (name, op) in s.ops() {
            let dk = &r.d.op(name).ok_or(format!("D lacks {name}"))?.table;
            for t in op.table.tuples() {
                let image: Vec<usize> = t.iter().map(|&x| f.apply(x)).collect();
                ensure!(dk.get(&image) == f.apply(op.table.get(&t)), "{name} not preserved from {side} at {t:?}");
            }
        }
    }
    for (name, op) in r.d.ops() {
        ensure!(verify_property(&r.d, w, &op.table).is_none(), "{name} on D lacks {w}");
    }
    for c in cmp {
        ensure!(ops_below(&r.d, &c.lower, &c.upper), "{} <= {} fails in D", c.lower, c.upper);
    }
    Ok(())
}

// ---------------------------------------------------------------- 5

fn terms(vars: usize, depth: usize) -> Vec<SLCTerm> {
    let mut level: Vec<SLCTerm> = (0..vars).map(SLCTerm::Gen).collect();
    for _ in 0..depth {
        let mut next = level.clone();
        for t in &level {
            next.push(SLCTerm::k(t.clone()));
        }
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                next.push(SLCTerm::join(level[i].clone(), level[j].clone()));
            }
        }
        level = next;
    }
    level
}

fn criterion_5() -> Outcome {
    for (n, expected) in [(1usize, 2usize), (2, 9)] {
        let f = free_algebra(n, 3).map_err(|e| e.to_string())?;
        ensure!(f.structure.len() == expected, "|free_algebra({n})| = {}", f.structure.len());
        let bound = (1u128 << n) + (1u128 << (1u32 << n));
        ensure!(size_bound(n) == bound, "size bound for {n} is {}", size_bound(n));
        ensure!((f.structure.len() as u128) <= bound, "size above 2^n + 2^(2^n)");
        // distinct normal forms are separated in a model with at most 5 elements
        let forms = normal_forms(n);
        ensure!(forms.len() == expected, "{} normal forms", forms.len());
        for i in 0..forms.len() {
            for j in i + 1..forms.len() {
                let (p, q) = (forms[i].to_term(), forms[j].to_term());
                ensure!(
                    separating_model(&p, &q, 5).map_err(|e| e.to_string())?.is_some(),
                    "forms {i} and {j} of the {n}-generated algebra are not separated"
                );
            }
        }
    }
    let models = closure_models(4).map_err(|e| e.to_string())?;
    let tables: Vec<(OrderedStructure, OpTable)> =
        models.into_iter().map(|m| { let k = m.op("K").unwrap().table.clone(); (m, k) }).collect();
    let all = terms(3, 3);
    for t in &all {
        let nf = normalize(t).to_term();
        for (m, k) in &tables {
            for asg in all_tuples(m.len(), 3) {
                ensure!(t.eval(m, k, &asg) == nf.eval(m, k, &asg), "normal form of {t:?} differs in a model of size {}", m.len());
            }
        }
    }
    Ok(format!("sizes 2 and 9 certified; {} terms checked in {} models", all.len(), tables.len()))
}

// ---------------------------------------------------------------- 6

const CORPUS: &[&str] = &[
    "forall x . x <= K(x)",
    "forall x . K(x) <= x",
    "forall x . K(K(x)) = K(x)",
    "forall x y . x <= y -> K(x) <= K(y)",
    "forall x y . x <= y -> K(y) <= K(x)",
    "forall x . K(K(x)) = x",
    "forall x . K(K(K(x))) = K(x)",
    "forall x y . K(x) = K(y) -> x = y",
    "forall x y . x <= K(y) -> K(x) <= K(y)",
    "forall x y . x <= y & y <= K(x) -> K(y) = K(x)",
    "forall x . x <= K(x) | K(x) <= x",
    "forall x y . K(x) <= y -> K(x) <= K(y)",
    "forall x y . K(x) <= K(y) -> x <= y",
    "forall x . K(x) = x",
    "forall x y . K(x) = y -> K(y) = y",
    "forall x y z . x <= y & y <= z -> K(x) <= K(z)",
    "forall x y . !(K(x) <= y) | x <= y",
    "forall x . K(K(x)) <= K(x)",
    "forall x . K(x) <= K(K(x))",
    "forall x y . K(x) = x & x <= y -> x <= K(y)",
    "forall x y . x <= y -> K(x) <= K(K(y))",
    "forall x y . K(x) <= K(y) | K(y) <= K(x)",
    "forall x y . x <= y & K(y) <= x -> K(x) = K(y)",
    "forall x . !(K(x) = x) -> K(K(x)) = K(x)",
    "forall x y . K(x) \\/ K(y) = K(x \\/ y)",
    "forall x y . K(x) \\/ K(y) <= K(x \\/ y)",
    "forall x y . K(x \\/ y) <= K(x) \\/ K(y)",
    "forall x y . K(x \\/ K(y)) = K(x \\/ y)",
    "forall x . x \\/ K(x) = K(x)",
    "forall x y . x \\/ y <= K(x) \\/ K(y)",
    "forall x y . x <= K(y) -> x \\/ y <= K(y)",
    "forall x y . K(x \\/ y) = K(x) -> y <= K(x)",
];

fn criterion_6() -> Outcome {
    let mut profiles = Vec::new();
    for kind in [StructureKind::Poset, StructureKind::JoinSemilattice] {
        for case in [UnaryCase::B1, UnaryCase::B3, UnaryCase::B5] {
            profiles.push(TheoryProfile::new(kind, vec![("K".into(), case.into())]).unwrap());
        }
    }
    let pair = TheoryProfile::new(
        StructureKind::Poset,
        vec![("K1".into(), UnaryCase::B1.into()), ("K2".into(), UnaryCase::B1.into())],
    )
    .unwrap();
    let mut runs: Vec<(&TheoryProfile, &str)> = Vec::new();
    for p in &profiles {
        for s in CORPUS {
            runs.push((p, s));
        }
    }
    runs.push((&pair, "forall x . K1(K2(x)) = K2(K1(x))"));
    runs.push((&pair, "forall x . K1(x) <= K2(x)"));
    let mut sentences = BTreeSet::new();
    let (mut decided, mut invalid) = (0usize, 0usize);
    for (p, text) in runs {
        let Ok(s) = parse_sentence(text, &p.signature()) else {
            continue; // joins are not in the poset signature
        };
        let d = decide_universal(p, &s).map_err(|e| format!("{} / {text}: {e}", p.kind))?;
        let b = brute_force_decide(p, &s, 5).map_err(|e| format!("{} / {text}: {e}", p.kind))?;
        ensure!(
            d.verdict.is_invalid() == b.verdict.is_invalid(),
            "{} {} / {text}: procedure says {}, search says {}",
            p.kind,
            p.ops[0].1,
            d.verdict,
            b.verdict
        );
        ensure!(d.verdict != Verdict::ValidUpToBound, "{text}: exact search expected");
        for cm in [&d.countermodel, &b.countermodel].into_iter().flatten() {
            certify_countermodel(p, &s, cm).map_err(|e| format!("{text}: {e}"))?;
        }
        ensure!(d.verdict.is_invalid() == d.countermodel.is_some(), "{text}: countermodel presence");
        sentences.insert(text);
        decided += 1;
        invalid += d.verdict.is_invalid() as usize;
    }
    ensure!(sentences.len() >= 30, "only {} sentences", sentences.len());
    Ok(format!("{} sentences, {decided} (profile, sentence) runs agree, {invalid} invalid", sentences.len()))
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let spec = ClassSpec::new(StructureKind::Poset, vec![("K".into(), UnaryCase::B3.into())]);
    let steps = 3;
    let chain = build_chain(&spec, steps, 2).map_err(|e| e.to_string())?;
    let last = chain.stages.len() - 1;
    ensure!(chain.round_starts.len() == steps, "{} rounds ran", chain.round_starts.len());
    for (i, s) in chain.stages.iter().enumerate() {
        ensure!(spec.is_member(s), "stage {i} is not a poset with a closure operation");
        if i > 0 {
            chain.inclusions[i - 1]
                .verify(&chain.stages[i - 1], s, true)
                .map_err(|e| format!("inclusion {i}: {e}"))?;
        }
    }
    // every task of the last round targets the stage that round started from
    let start = *chain.round_starts.last().unwrap();
    let within = chain.inclusion(start, last).map;
    let rep = check_extension_property_within(chain.last(), &spec, 2, &within).map_err(|e| e.to_string())?;
    let missing: Vec<String> = rep.missing.iter().map(|m| m.to_string()).collect();
    ensure!(rep.holds, "unrealized tasks: {}", missing.join("; "));
    ensure!(chain.processed > 0, "no tasks were processed");
    Ok(format!(
        "{} stages (sizes {:?}), {} tasks processed, {} embeddings into stage {start} realized",
        chain.stages.len(),
        chain.stages.iter().map(|s| s.len()).collect::<Vec<_>>(),
        chain.processed,
        rep.checked
    ))
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let mut posets = 0;
    for n in 0..=5 {
        for p in enumerate_structures(StructureKind::Poset, n) {
            let (m, e) = macneille_completion(&p);
            ensure!(m.validate().is_valid() && m.kind().is_lattice(), "completion is not a lattice");
            for a in 0..n {
                for b in 0..n {
                    ensure!(p.leq(a, b) == m.leq(e.apply(a), e.apply(b)), "not an order embedding");
                }
            }
            for s in subsets(n) {
                let img: Vec<usize> = s.iter().map(|&x| e.apply(x)).collect();
                if let Some(g) = glb(&p, &s) {
                    ensure!(glb(&m, &img) == Some(e.apply(g)), "meet of {s:?} not preserved");
                }
                if let Some(g) = lub(&p, &s) {
                    ensure!(lub(&m, &img) == Some(e.apply(g)), "join of {s:?} not preserved");
                }
            }
            // join- and meet-density of the image
            for x in 0..m.len() {
                let below: Vec<usize> = (0..n).map(|a| e.apply(a)).filter(|&y| m.leq(y, x)).collect();
                let above: Vec<usize> = (0..n).map(|a| e.apply(a)).filter(|&y| m.leq(x, y)).collect();
                ensure!(lub(&m, &below) == Some(x) && glb(&m, &above) == Some(x), "image is not dense");
            }
            posets += 1;
        }
    }
    let anti = OrderedStructure::from_poset(StructureKind::Poset, FinitePoset::antichain(2)).unwrap();
    let (m, _) = macneille_completion(&anti);
    ensure!(m.len() == 4 && m.bottom().is_some() && m.top().is_some(), "antichain completes to {} elements", m.len());
    let mut dls = 0;
    for n in 1..=6 {
        for d in enumerate_structures(StructureKind::DistributiveLattice, n) {
            let (ba, e) = birkhoff_embedding(&d).map_err(|e| e.to_string())?;
            ensure!(ba.kind() == StructureKind::BooleanAlgebra && ba.validate().is_valid(), "target is not Boolean");
            let f = |x: usize| e.apply(x);
            ensure!(f(d.bottom().unwrap()) == ba.bottom().unwrap() && f(d.top().unwrap()) == ba.top().unwrap(), "bounds");
            for a in 0..n {
                for b in 0..n {
                    ensure!(a == b || f(a) != f(b), "not injective");
                    ensure!(lub(&ba, &[f(a), f(b)]) == lub(&d, &[a, b]).map(f), "join not preserved");
                    ensure!(glb(&ba, &[f(a), f(b)]) == glb(&d, &[a, b]).map(f), "meet not preserved");
                }
            }
            dls += 1;
        }
    }
    Ok(format!("{posets} posets completed, {dls} distributive lattices embedded"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("extension condition equivalence", criterion_1),
        ("fixtures reproduce", criterion_2),
        ("superamalgamation", criterion_3),
        ("expanded amalgamation", criterion_4),
        ("free closure semilattices", criterion_5),
        ("decision procedure", criterion_6),
        ("Fraisse stages", criterion_7),
        ("completions", criterion_8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut summary = BTreeMap::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("{} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("PASS {label}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL {label}: {why} ({secs:.1}s)");
            }
        }
        summary.insert(i + 1, outcome.is_ok());
    }
    println!("{} of {} criteria passed", summary.values().filter(|&&ok| ok).count(), summary.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
