use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use supamal_core::amalgam::{amalgamate, amalgamate_expanded, verify_superamalgam, AmalgamationInstance};
use supamal_core::fraisse::{build_chain, ClassSpec};
use supamal_core::freealg::{free_algebra, normalize, separating_model, size_bound, term_equal, SLCTerm};
use supamal_core::io::{bundle_to_json, load_bundle, structure_to_json, Bundle};
use supamal_core::logic::{brute_force_decide, decide_universal, parse_sentence, TheoryProfile, Verdict};
use supamal_core::order::{birkhoff_embedding, enumerate_structures, macneille_completion, Embedding};
use supamal_core::partial_ext::{check_necessary, extend_family, extend_with, ComparabilitySpec, ExtendOptions};
use supamal_core::{Error, FinitePoset, Operation, Order, OrderedStructure, PartialOp, PropertySpec, Result, StructureKind};

use crate::Command;

pub const OK: u8 = 0;
pub const NEGATIVE: u8 = 1;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BoundExceeded(_) => 3,
        _ => 2,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    fs::write(p, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", p.display())))
}

fn mapping(src: &OrderedStructure, tgt: &OrderedStructure, e: &Embedding) -> BTreeMap<String, String> {
    (0..src.len()).map(|x| (src.name(x).to_string(), tgt.name(e.apply(x)).to_string())).collect()
}

pub fn run(cmd: Command, seed: u64) -> Result<u8> {
    match cmd {
        Command::Check { file } => check(&file),
        Command::Complete { file, birkhoff, out } => complete(&file, birkhoff, out.as_deref()),
        Command::Extend { file, property, op, naive, extremal, complete, out } => {
            extend(&file, property.as_deref(), op.as_deref(), naive, extremal, complete, out.as_deref())
        }
        Command::Amalgamate { a, b, c, kind, expanded, out_dir } => amalgamate_cmd([&a, &b, &c], &kind, expanded, &out_dir),
        Command::Free { gens, cap, out } => free(gens, cap, out.as_deref()),
        Command::Eq { left, right, max_size, out } => eq(&left, &right, max_size, out.as_deref()),
        Command::Fraisse { kind, property, op, steps, cap, root, out_dir } => {
            fraisse(&kind, &property, &op, steps, cap, root.as_deref(), &out_dir)
        }
        Command::Decide { theory, ops, sentence, brute, out } => decide(&theory, &ops, &sentence, brute, out.as_deref()),
        Command::Enumerate { kind, size, sample, out_dir } => enumerate(&kind, size, sample, seed, out_dir.as_deref()),
    }
}

fn check(file: &Path) -> Result<u8> {
    let b = load_bundle(file)?;
    let s = &b.structure;
    println!("valid {} with {} elements", s.kind(), s.len());
    for (name, op) in s.ops() {
        match &op.property {
            Some(w) => println!("operation {name}: {w} holds"),
            None => println!("operation {name}: arity {}", op.table.arity()),
        }
    }
    let mut ok = true;
    for (name, g) in &b.partial_ops {
        match &g.property {
            None => println!("partial {name}: no declared property"),
            Some(w) => match check_necessary(s, w, &g.op)? {
                None => println!("partial {name}: {w} condition holds"),
                Some(v) => {
                    ok = false;
                    println!("partial {name}: {w} condition fails: {}", v.describe(s));
                }
            },
        }
    }
    for c in &b.comparabilities {
        let (Some(lo), Some(hi)) = (b.partial_ops.get(&c.lower), b.partial_ops.get(&c.upper)) else {
            println!("comparability {} <= {}: declared", c.lower, c.upper);
            continue;
        };
        let bad = lo.op.entries().find(|(t, v)| hi.op.get(t).is_some_and(|u| !s.leq(*v, u)));
        match bad {
            None => println!("comparability {} <= {}: holds on the common domain", c.lower, c.upper),
            Some((t, _)) => {
                ok = false;
                let at: Vec<&str> = t.iter().map(|&x| s.name(x)).collect();
                println!("comparability {} <= {}: fails at {}", c.lower, c.upper, at.join(","));
            }
        }
    }
    Ok(if ok { OK } else { NEGATIVE })
}

fn complete(file: &Path, birkhoff: bool, out: Option<&Path>) -> Result<u8> {
    let s = load_bundle(file)?.structure.reduct();
    let (c, e) = if birkhoff { birkhoff_embedding(&s)? } else { macneille_completion(&s) };
    emit(out, &structure_to_json(&c))?;
    if out.is_some() {
        println!("{} elements", c.len());
        for (x, y) in mapping(&s, &c, &e) {
            println!("{x} -> {y}");
        }
    }
    Ok(OK)
}

fn extend(
    file: &Path,
    property: Option<&str>,
    only: Option<&str>,
    naive: bool,
    extremal: bool,
    complete: bool,
    out: Option<&Path>,
) -> Result<u8> {
    let bundle = load_bundle(file)?;
    let forced: Option<PropertySpec> = property.map(str::parse).transpose()?;
    let (host, emb) = if complete {
        let (m, e) = macneille_completion(&bundle.structure.reduct());
        let mut m = m;
        for (name, op) in bundle.structure.ops() {
            if op.table.arity() > 0 && bundle.structure.len() != m.len() {
                return Err(Error::Invalid(format!("total operation {name} cannot be carried to the completion")));
            }
            m.set_op(name, op.clone())?;
        }
        (m, e)
    } else {
        (bundle.structure.clone(), Embedding::identity(bundle.structure.len()))
    };
    let mut todo: Vec<(String, PropertySpec, PartialOp)> = Vec::new();
    for (name, g) in &bundle.partial_ops {
        if only.is_some_and(|o| o != name) {
            continue;
        }
        let w = forced
            .clone()
            .or_else(|| g.property.clone())
            .ok_or_else(|| Error::Invalid(format!("{name} has no declared property; pass --property")))?;
        todo.push((name.clone(), w, g.op.map(|x| emb.apply(x))));
    }
    if let Some(o) = only {
        if todo.is_empty() {
            return Err(Error::Invalid(format!("no partial operation named {o}")));
        }
    }
    for (name, w, g) in &todo {
        if let Some(v) = check_necessary(&host, w, g)? {
            println!("{name}: {w} condition fails: {}", v.describe(&host));
            return Ok(NEGATIVE);
        }
    }
    let in_todo = |n: &str| todo.iter().any(|(m, _, _)| m == n);
    let related: Vec<_> = bundle.comparabilities.iter().filter(|c| in_todo(&c.lower) && in_todo(&c.upper)).collect();
    let mut tables = BTreeMap::new();
    if !naive && !related.is_empty() {
        let w = &todo[0].1;
        if todo.iter().any(|(_, w2, _)| w2 != w) {
            return Err(Error::Invalid("comparable operations must share one property".into()));
        }
        let names: Vec<String> = todo.iter().map(|t| t.0.clone()).collect();
        let pos = |n: &str| names.iter().position(|m| m == n).unwrap();
        let pairs: Vec<(usize, usize)> = related.iter().map(|c| (pos(&c.lower), pos(&c.upper))).collect();
        let spec = ComparabilitySpec {
            names: names.clone(),
            index: FinitePoset::from_pairs(names.len(), &pairs)?,
            ops: todo.iter().map(|t| t.2.clone()).collect(),
        };
        match extend_family(&host, w, &spec) {
            Ok(ts) => tables.extend(ts),
            Err(Error::Rejected(msg) | Error::Condition(msg)) => {
                println!("no comparable extension: {msg}");
                return Ok(NEGATIVE);
            }
            Err(e) => return Err(e),
        }
    } else {
        for (name, w, g) in &todo {
            tables.insert(name.clone(), extend_with(&host, w, g, ExtendOptions { extremal })?);
        }
    }
    let mut s = host;
    let mut rest = Bundle::new(s.clone());
    for (name, w, _) in &todo {
        s.set_op(name, Operation { property: Some(w.clone()), table: tables.remove(name).unwrap() })?;
    }
    rest.structure = s;
    rest.comparabilities = bundle.comparabilities.clone();
    for (name, g) in bundle.partial_ops {
        if !in_todo(&name) && !complete {
            rest.partial_ops.insert(name, g);
        }
    }
    let report = rest.structure.validate();
    if !report.is_valid() {
        return Err(Error::Internal(format!("extended structure is invalid: {report}")));
    }
    emit(out, &bundle_to_json(&rest))?;
    Ok(OK)
}

fn amalgamate_cmd(files: [&PathBuf; 3], kind: &str, expanded: bool, out_dir: &Path) -> Result<u8> {
    let kind: StructureKind = kind.parse()?;
    let mut loaded = Vec::new();
    for f in files {
        let b = load_bundle(f)?;
        let s = if b.structure.kind() == kind { b.structure.clone() } else { retag_with_ops(&b.structure, kind)? };
        loaded.push((s, b.comparabilities));
    }
    let comparabilities = loaded[0].1.clone();
    let strip = |s: &OrderedStructure| if expanded { s.clone() } else { s.reduct() };
    let inst = AmalgamationInstance::new(strip(&loaded[0].0), strip(&loaded[1].0), strip(&loaded[2].0))?;
    let r = if expanded { amalgamate_expanded(&inst, &comparabilities)? } else { amalgamate(&inst, kind)? };
    let report = verify_superamalgam(&inst, &r);
    fs::create_dir_all(out_dir).map_err(|e| Error::Invalid(format!("cannot create {}: {e}", out_dir.display())))?;
    write_file(&out_dir.join("D.json"), &structure_to_json(&r.d))?;
    let cert = json!({
        "a_into_d": mapping(inst.a(), &r.d, &r.a_into_d),
        "b_into_d": mapping(inst.b(), &r.d, &r.b_into_d),
        "interpolants": r.interpolants.iter().map(|i| json!({"lower": i.lower, "upper": i.upper, "via": i.via})).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&cert)?;
    text.push('\n');
    write_file(&out_dir.join("interpolants.json"), &text)?;
    println!("amalgam with {} elements, {} cross inequalities", r.d.len(), r.interpolants.len());
    if report.is_ok() {
        println!("superamalgam verified");
        Ok(OK)
    } else {
        println!("verification failed: {report}");
        Ok(NEGATIVE)
    }
}

fn retag_with_ops(s: &OrderedStructure, kind: StructureKind) -> Result<OrderedStructure> {
    let mut t = s.reduct().retag(kind)?;
    for (name, op) in s.ops() {
        t.set_op(name, op.clone())?;
    }
    Ok(t)
}

fn free(gens: usize, cap: usize, out: Option<&Path>) -> Result<u8> {
    let f = free_algebra(gens, cap)?;
    emit(out, &structure_to_json(&f.structure))?;
    if out.is_some() {
        println!("{} elements on {gens} generators (bound {})", f.structure.len(), size_bound(gens));
    }
    Ok(OK)
}

fn eq(left: &str, right: &str, max_size: usize, out: Option<&Path>) -> Result<u8> {
    let mut vars = Vec::new();
    let s = SLCTerm::parse(left, &mut vars)?;
    let t = SLCTerm::parse(right, &mut vars)?;
    let (ns, nt) = (normalize(&s), normalize(&t));
    if term_equal(&s, &t) {
        println!("equal");
        println!("normal form: {}", ns.render(&vars));
        return Ok(OK);
    }
    println!("distinct");
    println!("normal forms: {} | {}", ns.render(&vars), nt.render(&vars));
    match separating_model(&s, &t, max_size)? {
        None => println!("no separating model with at most {max_size} elements"),
        Some(sep) => {
            let asg: Vec<String> =
                vars.iter().zip(&sep.assignment).map(|(v, &a)| format!("{v} = {}", sep.model.name(a))).collect();
            println!(
                "countermodel: {} elements, {}; left = {}, right = {}",
                sep.model.len(),
                asg.join(", "),
                sep.model.name(sep.left),
                sep.model.name(sep.right)
            );
            emit(out, &structure_to_json(&sep.model))?;
        }
    }
    Ok(NEGATIVE)
}

fn fraisse(
    kind: &str,
    properties: &[String],
    names: &[String],
    steps: usize,
    cap: usize,
    root: Option<&Path>,
    out_dir: &Path,
) -> Result<u8> {
    let kind: StructureKind = kind.parse()?;
    let mut ops = Vec::new();
    for (i, p) in properties.iter().enumerate() {
        let name = names.get(i).cloned().unwrap_or_else(|| if i == 0 { "K".into() } else { format!("K{}", i + 1) });
        ops.push((name, p.parse::<PropertySpec>()?));
    }
    let mut spec = ClassSpec::new(kind, ops);
    if let Some(r) = root {
        spec = spec.with_root(load_bundle(r)?.structure);
    }
    let chain = build_chain(&spec, steps, cap)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::Invalid(format!("cannot create {}: {e}", out_dir.display())))?;
    for (i, s) in chain.stages.iter().enumerate() {
        write_file(&out_dir.join(format!("stage_{i}.json")), &structure_to_json(s))?;
    }
    let mut report = String::new();
    writeln!(report, "stages: {}", chain.stages.len()).unwrap();
    for (i, s) in chain.stages.iter().enumerate() {
        writeln!(report, "stage {i}: {} elements", s.len()).unwrap();
    }
    writeln!(report, "class pairs: {}", chain.pairs.len()).unwrap();
    writeln!(report, "tasks processed: {}, amalgamations: {}", chain.processed, chain.amalgamated).unwrap();
    writeln!(report, "tasks queued: {}", chain.queue.len()).unwrap();
    for task in &chain.queue {
        let p = &chain.pairs[task.pair];
        let stage = &chain.stages[task.stage];
        let image: Vec<&str> = task.e.map.iter().map(|&x| stage.name(x)).collect();
        writeln!(report, "  pair {} (|A| = {}, |B| = {}) at stage {}: [{}]", task.pair, p.a.len(), p.b.len(), task.stage, image.join(", "))
            .unwrap();
    }
    write_file(&out_dir.join("queue.txt"), &report)?;
    print!("{report}");
    Ok(OK)
}

fn decide(theory: &str, ops: &[String], sentence: &str, brute: Option<usize>, out: Option<&Path>) -> Result<u8> {
    let kind: StructureKind = theory.parse()?;
    let mut sig = Vec::new();
    for o in ops {
        let (name, w) = o
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("--ops expects name:property, got `{o}`")))?;
        sig.push((name.trim().to_string(), w.parse::<PropertySpec>()?));
    }
    let profile = TheoryProfile::new(kind, sig)?;
    let s = parse_sentence(sentence, &profile.signature())?;
    let outcome = match brute {
        Some(n) => brute_force_decide(&profile, &s, n)?,
        None => decide_universal(&profile, &s)?,
    };
    println!("{}", outcome.verdict);
    match brute {
        Some(n) => println!("searched {} base structures with at most {n} elements", outcome.configurations),
        None => println!(
            "k = {} ({} variables, {} operation terms); {} generated base models searched{}",
            outcome.k,
            outcome.ell,
            outcome.m,
            outcome.configurations,
            outcome.size_bound.map(|g| format!(", each with at most {g} elements")).unwrap_or_default()
        ),
    }
    if let Some(cm) = &outcome.countermodel {
        let asg: Vec<String> = cm.named_assignment(&s).into_iter().map(|(v, a)| format!("{v} = {a}")).collect();
        println!("falsified at {}", asg.join(", "));
        emit(out, &structure_to_json(&cm.model))?;
    }
    Ok(if outcome.verdict == Verdict::Invalid { NEGATIVE } else { OK })
}

fn enumerate(kind: &str, size: usize, sample: Option<usize>, seed: u64, out_dir: Option<&Path>) -> Result<u8> {
    let kind: StructureKind = kind.parse()?;
    let all = enumerate_structures(kind, size);
    let mut picked: Vec<(usize, &OrderedStructure)> = all.iter().enumerate().collect();
    if let Some(n) = sample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        picked = picked.choose_multiple(&mut rng, n.min(all.len())).copied().collect();
        picked.sort_by_key(|p| p.0);
    }
    println!("{} structures of kind {kind} with {size} elements", all.len());
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("cannot create {}: {e}", dir.display())))?;
    }
    for (i, s) in picked {
        let covers: Vec<String> =
            s.poset().covers().into_iter().map(|(a, b)| format!("{}<{}", s.name(a), s.name(b))).collect();
        println!("{i}: {}", if covers.is_empty() { "-".to_string() } else { covers.join(" ") });
        if let Some(dir) = out_dir {
            write_file(&dir.join(format!("{kind}_{size}_{i}.json")), &structure_to_json(s))?;
        }
    }
    Ok(OK)
}
