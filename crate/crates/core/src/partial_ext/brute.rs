use crate::error::{Error, Result};
use crate::order::{OpTable, Order};

use super::check::property_violation;
use super::property::PropertySpec;
use super::PartialOp;

/// Whether some total extension of `g` has property `w`, by exhaustive search.
/// `cap` bounds the naive search space `n^(free cells)`.
pub fn brute_force_extension_exists<O: Order + ?Sized>(
    host: &O,
    w: &PropertySpec,
    g: &PartialOp,
    cap: u128,
) -> Result<bool> {
    let mut found = false;
    search(host, w, g, cap, None, &mut |_| {
        found = true;
        false
    })?;
    Ok(found)
}

/// Every total extension of `g` with property `w`, in lexicographic order of tables.
pub fn all_extensions<O: Order + ?Sized>(
    host: &O,
    w: &PropertySpec,
    g: &PartialOp,
    cap: u128,
) -> Result<Vec<OpTable>> {
    let mut out = Vec::new();
    search(host, w, g, cap, None, &mut |t| {
        out.push(t);
        true
    })?;
    Ok(out)
}

/// The first extension found when free cells are tried in the value orders `order`
/// (one permutation of `0..n` per free cell, in table order). Used to draw random
/// extensions where the meet/join construction needs bounds the host lacks.
pub fn first_extension_in_order<O: Order + ?Sized>(
    host: &O,
    w: &PropertySpec,
    g: &PartialOp,
    order: &[Vec<usize>],
) -> Result<Option<OpTable>> {
    let mut found = None;
    search(host, w, g, u128::MAX, Some(order), &mut |t| {
        found = Some(t);
        false
    })?;
    Ok(found)
}

/// Backtracking over the free cells; `visit` returns false to stop.
fn search<O: Order + ?Sized>(
    host: &O,
    w: &PropertySpec,
    g: &PartialOp,
    cap: u128,
    order: Option<&[Vec<usize>]>,
    visit: &mut dyn FnMut(OpTable) -> bool,
) -> Result<()> {
    let n = host.len();
    let arity = w.arity();
    if g.arity() != arity {
        return Err(Error::Arity { expected: arity, found: g.arity() });
    }
    g.check_carrier(n)?;
    let cells = n.pow(arity as u32);
    let mut table: Vec<Option<usize>> = vec![None; cells];
    let probe = OpTable::constant(arity, n, 0);
    for (args, v) in g.entries() {
        table[probe.index_of(args)] = Some(v);
    }
    let free: Vec<usize> = (0..cells).filter(|&i| table[i].is_none()).collect();
    let space = (n as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
    if space > cap {
        return Err(Error::BoundExceeded(format!(
            "{} free cells over {} elements exceed the search cap {}",
            free.len(),
            n,
            cap
        )));
    }
    if n == 0 {
        visit(OpTable::new(arity, 0, Vec::new())?);
        return Ok(());
    }
    let violated = |t: &[Option<usize>]| {
        property_violation(host, w, arity, &|args: &[usize]| t[probe.index_of(args)]).is_some()
    };
    if violated(&table) {
        return Ok(());
    }
    let natural: Vec<usize> = (0..n).collect();
    let orders: Vec<&[usize]> =
        (0..free.len()).map(|d| order.and_then(|o| o.get(d)).map_or(&natural[..], |v| &v[..])).collect();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        depth: usize,
        free: &[usize],
        table: &mut Vec<Option<usize>>,
        n: usize,
        arity: usize,
        orders: &[&[usize]],
        violated: &dyn Fn(&[Option<usize>]) -> bool,
        visit: &mut dyn FnMut(OpTable) -> bool,
    ) -> bool {
        if depth == free.len() {
            let values = table.iter().map(|v| v.unwrap()).collect();
            return visit(OpTable::new(arity, n, values).expect("complete table"));
        }
        let cell = free[depth];
        for &v in orders[depth] {
            table[cell] = Some(v);
            if !violated(table) && !rec(depth + 1, free, table, n, arity, orders, violated, visit) {
                table[cell] = None;
                return false;
            }
        }
        table[cell] = None;
        true
    }
    rec(0, &free, &mut table, n, arity, &orders, &violated, visit);
    Ok(())
}
