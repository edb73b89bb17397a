//! JSON structure files.
//!
//! ```json
//! {"kind": "poset", "elements": ["d", "p", "q"], "leq": [["d", "p"], ["p", "q"]],
//!  "ops": {"K": {"arity": 1, "property": "B3", "table": {"d": "p", "p": "p", "q": "q"}}},
//!  "partial_ops": {"G": {"arity": 1, "property": "B3", "table": {"d": "p"}}},
//!  "comparabilities": [["G", "H"]]}
//! ```
//!
//! `leq` is closed reflexively and transitively on load. Tables of higher arity use keys
//! like `"a,b"`. Emitted files list only covering pairs and are byte-for-byte
//! reproducible.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::amalgam::Comparability;
use crate::error::{Error, Result};
use crate::order::{all_tuples, FinitePoset, OpTable, Operation, Order, OrderedStructure, StructureKind};
use crate::partial_ext::{PartialOp, PropertySpec};

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct OpFile {
    pub arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    pub table: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub kind: String,
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ops: BTreeMap<String, OpFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub partial_ops: BTreeMap<String, OpFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparabilities: Vec<(String, String)>,
}

/// A partial operation read from a file, with its declared property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedPartialOp {
    pub property: Option<PropertySpec>,
    pub op: PartialOp,
}

/// A validated structure with the partial operations and comparabilities attached to it.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub structure: OrderedStructure,
    pub partial_ops: BTreeMap<String, NamedPartialOp>,
    pub comparabilities: Vec<Comparability>,
}

impl Bundle {
    pub fn new(structure: OrderedStructure) -> Self {
        Bundle { structure, partial_ops: BTreeMap::new(), comparabilities: Vec::new() }
    }
}

fn lookup(names: &BTreeMap<&str, usize>, name: &str) -> Result<usize> {
    names.get(name.trim()).copied().ok_or_else(|| Error::UnknownElement(name.trim().to_string()))
}

fn parse_args(names: &BTreeMap<&str, usize>, key: &str, arity: usize) -> Result<Vec<usize>> {
    if arity == 0 {
        return if key.trim().is_empty() {
            Ok(Vec::new())
        } else {
            Err(Error::Arity { expected: 0, found: 1 })
        };
    }
    let args: Vec<usize> = key.split(',').map(|a| lookup(names, a)).collect::<Result<_>>()?;
    if args.len() != arity {
        return Err(Error::Arity { expected: arity, found: args.len() });
    }
    Ok(args)
}

fn parse_property(name: &str, p: &Option<String>, arity: usize) -> Result<Option<PropertySpec>> {
    let Some(text) = p else { return Ok(None) };
    let w: PropertySpec = text.parse()?;
    if w.arity() != arity {
        return Err(Error::Invalid(format!("{name}: property {w} needs arity {}, the file says {arity}", w.arity())));
    }
    Ok(Some(w))
}

fn parse_partial(names: &BTreeMap<&str, usize>, op: &OpFile) -> Result<PartialOp> {
    let mut g = PartialOp::new(op.arity);
    for (k, v) in &op.table {
        g.insert(parse_args(names, k, op.arity)?, lookup(names, v)?)?;
    }
    Ok(g)
}

impl StructureFile {
    pub fn into_bundle(self) -> Result<Bundle> {
        let kind: StructureKind = self.kind.parse()?;
        let n = self.elements.len();
        let mut names: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, e) in self.elements.iter().enumerate() {
            if names.insert(e.as_str(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate element name `{e}`")));
            }
        }
        let mut pairs = Vec::with_capacity(self.leq.len());
        for (a, b) in &self.leq {
            pairs.push((lookup(&names, a)?, lookup(&names, b)?));
        }
        // close first, then report antisymmetry failures by name
        let mut rel = vec![false; n * n];
        for i in 0..n {
            rel[i * n + i] = true;
        }
        for &(a, b) in &pairs {
            rel[a * n + b] = true;
        }
        for k in 0..n {
            for a in 0..n {
                if rel[a * n + k] {
                    for b in 0..n {
                        if rel[k * n + b] {
                            rel[a * n + b] = true;
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                if rel[a * n + b] && rel[b * n + a] {
                    return Err(Error::Invalid(format!(
                        "antisymmetry fails at ({}, {})",
                        self.elements[a], self.elements[b]
                    )));
                }
            }
        }
        let poset = FinitePoset::from_matrix_unchecked(n, rel);
        let mut s = OrderedStructure::new(kind, self.elements.clone(), poset)?;
        for (name, op) in &self.ops {
            let property = parse_property(name, &op.property, op.arity)?;
            let g = parse_partial(&names, op)?;
            if let Some(missing) = all_tuples(n, op.arity).find(|t| g.get(t).is_none()) {
                let at: Vec<&str> = missing.iter().map(|&i| self.elements[i].as_str()).collect();
                return Err(Error::Invalid(format!("operation {name} is undefined at ({})", at.join(", "))));
            }
            let table = OpTable::from_fn(op.arity, n, |t| g.get(t).unwrap());
            s.set_op(name, Operation { property, table })?;
        }
        let report = s.validate();
        if !report.is_valid() {
            return Err(Error::Invalid(report.to_string()));
        }
        let mut partial_ops = BTreeMap::new();
        for (name, op) in &self.partial_ops {
            let property = parse_property(name, &op.property, op.arity)?;
            partial_ops.insert(name.clone(), NamedPartialOp { property, op: parse_partial(&names, op)? });
        }
        let mut comparabilities = Vec::new();
        for (lower, upper) in self.comparabilities {
            for n in [&lower, &upper] {
                if !partial_ops.contains_key(n) && s.op(n).is_none() {
                    return Err(Error::Invalid(format!("comparability names unknown operation {n}")));
                }
            }
            comparabilities.push(Comparability { lower, upper });
        }
        Ok(Bundle { structure: s, partial_ops, comparabilities })
    }

    pub fn from_bundle(b: &Bundle) -> Self {
        let s = &b.structure;
        let nm = |i: usize| s.name(i).to_string();
        let key = |t: &[usize]| t.iter().map(|&i| s.name(i)).collect::<Vec<_>>().join(",");
        let ops = s
            .ops()
            .iter()
            .map(|(name, op)| {
                let table = op.table.tuples().map(|t| (key(&t), nm(op.table.get(&t)))).collect();
                let file = OpFile { arity: op.table.arity(), property: op.property.as_ref().map(|w| w.to_string()), table };
                (name.clone(), file)
            })
            .collect();
        let partial_ops = b
            .partial_ops
            .iter()
            .map(|(name, g)| {
                let table = g.op.entries().map(|(t, v)| (key(t), nm(v))).collect();
                let file =
                    OpFile { arity: g.op.arity(), property: g.property.as_ref().map(|w| w.to_string()), table };
                (name.clone(), file)
            })
            .collect();
        StructureFile {
            kind: s.kind().name().to_string(),
            elements: s.names().to_vec(),
            leq: s.poset().covers().into_iter().map(|(a, b)| (nm(a), nm(b))).collect(),
            ops,
            partial_ops,
            comparabilities: b.comparabilities.iter().map(|c| (c.lower.clone(), c.upper.clone())).collect(),
        }
    }
}

pub fn parse_bundle(text: &str) -> Result<Bundle> {
    let file: StructureFile = serde_json::from_str(text)?;
    file.into_bundle()
}

pub fn load_bundle(path: &Path) -> Result<Bundle> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_bundle(&text)
}

/// Loads a file and keeps only its structure.
pub fn load_structure(path: &Path) -> Result<OrderedStructure> {
    Ok(load_bundle(path)?.structure)
}

pub fn bundle_to_json(b: &Bundle) -> String {
    let mut s = serde_json::to_string_pretty(&StructureFile::from_bundle(b)).expect("serializable");
    s.push('\n');
    s
}

pub fn structure_to_json(s: &OrderedStructure) -> String {
    bundle_to_json(&Bundle::new(s.clone()))
}

/// The order relation as `≤` pairs of names, used in reports.
pub fn strict_pairs(s: &OrderedStructure) -> Vec<(String, String)> {
    let n = s.len();
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && s.leq(a, b))
        .map(|(a, b)| (s.name(a).to_string(), s.name(b).to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::canonical_form;

    const CHAIN: &str = r#"{"kind": "poset", "elements": ["d", "p", "q"], "leq": [["d", "p"], ["p", "q"]],
        "partial_ops": {"G": {"arity": 1, "property": "B3", "table": {"d": "p"}}}}"#;

    #[test]
    fn loads_and_closes() {
        let b = parse_bundle(CHAIN).unwrap();
        let s = &b.structure;
        assert!(s.leq(0, 2));
        assert_eq!(b.partial_ops["G"].op.get1(0), Some(1));
        assert_eq!(b.partial_ops["G"].property, Some("B3".parse().unwrap()));
    }

    #[test]
    fn round_trip_is_stable() {
        let b = parse_bundle(CHAIN).unwrap();
        let text = bundle_to_json(&b);
        let again = parse_bundle(&text).unwrap();
        assert_eq!(bundle_to_json(&again), text);
        assert_eq!(canonical_form(&again.structure), canonical_form(&b.structure));
    }

    #[test]
    fn rejects_bad_files() {
        let cyc = r#"{"kind": "poset", "elements": ["a", "b"], "leq": [["a", "b"], ["b", "a"]]}"#;
        let e = parse_bundle(cyc).unwrap_err().to_string();
        assert!(e.contains("(a, b)"), "{e}");
        let off = r#"{"kind": "poset", "elements": ["a"], "partial_ops": {"G": {"arity": 1, "table": {"a": "z"}}}}"#;
        assert!(matches!(parse_bundle(off), Err(Error::UnknownElement(_))));
        let m3 = r#"{"kind": "distributive-lattice", "elements": ["0", "a", "b", "c", "1"],
            "leq": [["0", "a"], ["0", "b"], ["0", "c"], ["a", "1"], ["b", "1"], ["c", "1"]]}"#;
        assert!(parse_bundle(m3).unwrap_err().to_string().contains("distributive"));
        assert!(matches!(parse_bundle("{\"kind\": "), Err(Error::Json(_))));
        let partial = r#"{"kind": "poset", "elements": ["a", "b"], "ops": {"K": {"arity": 1, "table": {"a": "b"}}}}"#;
        assert!(parse_bundle(partial).unwrap_err().to_string().contains("undefined at (b)"));
    }

    #[test]
    fn binary_tables() {
        let text = r#"{"kind": "poset", "elements": ["a", "b"], "leq": [["a", "b"]],
            "ops": {"M": {"arity": 2, "table": {"a,a": "a", "a,b": "a", "b,a": "a", "b,b": "b"}}}}"#;
        let b = parse_bundle(text).unwrap();
        assert_eq!(b.structure.op("M").unwrap().table.get(&[1, 1]), 1);
        assert_eq!(parse_bundle(&bundle_to_json(&b)).unwrap().structure, b.structure);
    }
}
