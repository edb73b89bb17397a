use crate::error::{Error, Result};
use crate::order::{macneille_completion, Embedding, FinitePoset, Order, OrderedStructure, StructureKind};

use super::boolean::boolean_amalgam;
use super::instance::{interpolant_table, verify_superamalgam, AmalgamationInstance, Side, SuperamalgamResult};

/// Carrier of `A ∪ B`: A's elements in order, then B-only elements in order.
pub(crate) struct UnionLayout {
    pub names: Vec<String>,
    pub a_into: Embedding,
    pub b_into: Embedding,
}

pub(crate) fn union_layout(inst: &AmalgamationInstance) -> UnionLayout {
    let (a, b) = (inst.a(), inst.b());
    let sb = inst.shared_in(Side::B);
    let mut names: Vec<String> = a.names().to_vec();
    let mut b_map = Vec::with_capacity(b.len());
    for y in 0..b.len() {
        match sb[y] {
            Some(z) => b_map.push(inst.c_in_a().apply(z)),
            None => {
                b_map.push(names.len());
                names.push(b.name(y).to_string());
            }
        }
    }
    UnionLayout { names, a_into: Embedding::identity(a.len()), b_into: Embedding { map: b_map } }
}

/// `≤_A ∪ ≤_B ∪ (≤_A ∘ ≤_B) ∪ (≤_B ∘ ≤_A)` on the union carrier.
pub fn four_piece_relation(inst: &AmalgamationInstance) -> FinitePoset {
    let lay = union_layout(inst);
    four_piece(inst, &lay)
}

fn four_piece(inst: &AmalgamationInstance, lay: &UnionLayout) -> FinitePoset {
    let (a, b, c) = (inst.a(), inst.b(), inst.c());
    let n = lay.names.len();
    // which side(s) each union element belongs to
    let mut in_a = vec![None; n];
    let mut in_b = vec![None; n];
    for x in 0..a.len() {
        in_a[lay.a_into.apply(x)] = Some(x);
    }
    for y in 0..b.len() {
        in_b[lay.b_into.apply(y)] = Some(y);
    }
    let (ca, cb) = (inst.c_in_a(), inst.c_in_b());
    FinitePoset::from_fn(n, |u, v| {
        if let (Some(x), Some(y)) = (in_a[u], in_a[v]) {
            if a.leq(x, y) {
                return true;
            }
        }
        if let (Some(x), Some(y)) = (in_b[u], in_b[v]) {
            if b.leq(x, y) {
                return true;
            }
        }
        if let (Some(x), Some(y)) = (in_a[u], in_b[v]) {
            if (0..c.len()).any(|z| a.leq(x, ca.apply(z)) && b.leq(cb.apply(z), y)) {
                return true;
            }
        }
        if let (Some(x), Some(y)) = (in_b[u], in_a[v]) {
            if (0..c.len()).any(|z| b.leq(x, cb.apply(z)) && a.leq(ca.apply(z), y)) {
                return true;
            }
        }
        false
    })
}

/// The poset amalgam over `A ∪ B` ordered by the four-piece relation.
pub fn jonsson_poset_amalgam(inst: &AmalgamationInstance) -> Result<SuperamalgamResult> {
    let lay = union_layout(inst);
    let rel = four_piece(inst, &lay);
    if let Some(v) = rel.violations().first() {
        return Err(Error::Internal(format!("four-piece relation is not a partial order: {v}")));
    }
    let d = OrderedStructure::new(StructureKind::Poset, lay.names.clone(), rel)?;
    let interpolants = interpolant_table(inst, &d, &lay.a_into, &lay.b_into)?;
    Ok(SuperamalgamResult { d, a_into_d: lay.a_into, b_into_d: lay.b_into, interpolants })
}

/// Superamalgam of the reducts for `kind`: the poset amalgam, completed for (semi)lattice
/// kinds; Boolean algebras go through the free product.
pub fn amalgamate(inst: &AmalgamationInstance, kind: StructureKind) -> Result<SuperamalgamResult> {
    if inst.kind() != kind {
        return Err(Error::Invalid(format!("instance is of kind {}, requested {kind}", inst.kind())));
    }
    let reduct = inst.reduct();
    let r = match kind {
        StructureKind::Poset => jonsson_poset_amalgam(&reduct)?,
        StructureKind::MeetSemilattice
        | StructureKind::JoinSemilattice
        | StructureKind::Lattice
        | StructureKind::BoundedLattice => {
            let j = jonsson_poset_amalgam(&reduct)?;
            let (m, _) = macneille_completion(&j.d);
            let d = m.retag(kind)?;
            SuperamalgamResult { d, ..j }
        }
        StructureKind::BooleanAlgebra => boolean_amalgam(&reduct)?,
        StructureKind::DistributiveLattice => {
            return Err(Error::Unsupported(
                "distributive lattices have amalgamation but not strong amalgamation".into(),
            ))
        }
    };
    let report = verify_superamalgam(&reduct, &r);
    if !report.is_ok() {
        return Err(Error::Internal(format!("amalgam check failed: {report}")));
    }
    Ok(r)
}
