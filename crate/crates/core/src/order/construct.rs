//! Object-level constructions on finite posets.
//!
//! Element identifiers of constructed posets are canonical structured tags
//! built from the component identifiers, so two runs of the same construction
//! produce identical posets (not merely isomorphic ones). Element order is
//! fixed and documented per construction; the functor layer decodes elements
//! by index using these layouts.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::order::poset::Bits;
use crate::order::FinPoset;

/// The pointed one-point poset `1`.
pub fn one() -> FinPoset {
    FinPoset::from_leq_fn(vec!["*".into()], Some(0), |_, _| true)
}

/// `𝔹 = {bot <= top}`, pointed.
pub fn boolean_lattice() -> FinPoset {
    FinPoset::from_leq_fn(vec!["bot".into(), "top".into()], Some(0), |a, b| a <= b)
}

/// `n`-element chain `0 < 1 < ... < n-1`, pointed when non-empty.
pub fn chain(n: usize) -> FinPoset {
    let ids = (0..n).map(|i| i.to_string()).collect();
    FinPoset::from_leq_fn(ids, (n > 0).then_some(0), |a, b| a <= b)
}

/// Antichain on the given names; never pointed.
pub fn discrete<S: AsRef<str>>(names: &[S]) -> Result<FinPoset> {
    let names: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
    FinPoset::new::<&str>(&names, &[], None)
}

/// Componentwise order. Element `(i, j)` sits at index `i * |q| + j`.
pub fn product(p: &FinPoset, q: &FinPoset) -> FinPoset {
    let m = q.len();
    let mut ids = Vec::with_capacity(p.len() * m);
    for i in 0..p.len() {
        for j in 0..m {
            ids.push(format!("({},{})", p.id(i), q.id(j)));
        }
    }
    let bottom = match (p.bottom(), q.bottom()) {
        (Some(a), Some(b)) => Some(a * m + b),
        _ => None,
    };
    FinPoset::from_leq_fn(ids, bottom, |x, y| p.leq(x / m, y / m) && q.leq(x % m, y % m))
}

/// Where an element of a sum came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SumTag {
    /// The shared bottom of a coalesced sum.
    Bottom,
    Left(usize),
    Right(usize),
}

/// A sum together with its injections.
#[derive(Clone, Debug)]
pub struct SumSpace {
    pub poset: FinPoset,
    /// Left element index → sum index.
    pub inl: Vec<usize>,
    /// Right element index → sum index.
    pub inr: Vec<usize>,
    pub tags: Vec<SumTag>,
    pub coalesced: bool,
}

/// Disjoint union, no order across the summands. Left elements first.
pub fn separated_sum_space(p: &FinPoset, q: &FinPoset) -> SumSpace {
    let (np, nq) = (p.len(), q.len());
    let mut ids = Vec::with_capacity(np + nq);
    let mut tags = Vec::with_capacity(np + nq);
    for i in 0..np {
        ids.push(format!("inl({})", p.id(i)));
        tags.push(SumTag::Left(i));
    }
    for j in 0..nq {
        ids.push(format!("inr({})", q.id(j)));
        tags.push(SumTag::Right(j));
    }
    let poset = FinPoset::from_leq_fn(ids, None, |x, y| match (x < np, y < np) {
        (true, true) => p.leq(x, y),
        (false, false) => q.leq(x - np, y - np),
        _ => false,
    });
    SumSpace { poset, inl: (0..np).collect(), inr: (np..np + nq).collect(), tags, coalesced: false }
}

pub fn separated_sum(p: &FinPoset, q: &FinPoset) -> FinPoset {
    separated_sum_space(p, q).poset
}

/// Disjoint union with the two bottoms identified. Index 0 is the shared
/// bottom, then the non-bottom left elements, then the non-bottom right ones.
pub fn coalesced_sum_space(p: &FinPoset, q: &FinPoset) -> Result<SumSpace> {
    let bp = p.require_bottom("left operand of a coalesced sum")?;
    let bq = q.require_bottom("right operand of a coalesced sum")?;
    let mut ids = vec!["bot".to_string()];
    let mut tags = vec![SumTag::Bottom];
    let mut inl = vec![0; p.len()];
    let mut inr = vec![0; q.len()];
    for i in (0..p.len()).filter(|&i| i != bp) {
        inl[i] = ids.len();
        ids.push(format!("inl({})", p.id(i)));
        tags.push(SumTag::Left(i));
    }
    for j in (0..q.len()).filter(|&j| j != bq) {
        inr[j] = ids.len();
        ids.push(format!("inr({})", q.id(j)));
        tags.push(SumTag::Right(j));
    }
    let t = tags.clone();
    let poset = FinPoset::from_leq_fn(ids, Some(0), |x, y| match (t[x], t[y]) {
        (SumTag::Bottom, _) => true,
        (SumTag::Left(a), SumTag::Left(b)) => p.leq(a, b),
        (SumTag::Right(a), SumTag::Right(b)) => q.leq(a, b),
        _ => false,
    });
    Ok(SumSpace { poset, inl, inr, tags, coalesced: true })
}

pub fn coalesced_sum(p: &FinPoset, q: &FinPoset) -> Result<FinPoset> {
    Ok(coalesced_sum_space(p, q)?.poset)
}

/// Adds a fresh bottom at index 0; element `i` moves to `i + 1`.
pub fn lift(p: &FinPoset) -> FinPoset {
    let mut ids = vec!["bot".to_string()];
    ids.extend(p.ids().iter().map(|id| format!("up({id})")));
    FinPoset::from_leq_fn(ids, Some(0), |x, y| x == 0 || (y != 0 && p.leq(x - 1, y - 1)))
}

/// Monotone (optionally strict) maps `dom → cod` ordered pointwise.
#[derive(Clone, Debug)]
pub struct FunSpace {
    pub poset: FinPoset,
    pub tables: Vec<Vec<usize>>,
    pub index: HashMap<Vec<usize>, usize>,
}

/// Enumerates every monotone table `dom → cod` (strict ones when `strict`),
/// failing once more than `cap` are found.
pub fn monotone_tables(dom: &FinPoset, cod: &FinPoset, strict: bool, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    monotone_tables_into(dom, cod, strict, cap, &mut out)?;
    Ok(out)
}

/// The first `limit` monotone tables in enumeration order.
pub fn monotone_tables_upto(dom: &FinPoset, cod: &FinPoset, strict: bool, limit: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    match monotone_tables_into(dom, cod, strict, limit, &mut out) {
        Ok(()) | Err(Error::ElementCapExceeded(_)) => Ok(out),
        Err(e) => Err(e),
    }
}

fn monotone_tables_into(
    dom: &FinPoset,
    cod: &FinPoset,
    strict: bool,
    cap: usize,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let forced = if strict {
        Some((dom.require_bottom("strict map domain")?, cod.require_bottom("strict map codomain")?))
    } else {
        None
    };
    let order = dom.linear_extension();
    let mut table = vec![usize::MAX; dom.len()];
    fn go(
        t: usize,
        order: &[usize],
        dom: &FinPoset,
        cod: &FinPoset,
        forced: Option<(usize, usize)>,
        table: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        if t == order.len() {
            if out.len() >= cap {
                return Err(Error::ElementCapExceeded(cap));
            }
            out.push(table.clone());
            return Ok(());
        }
        let x = order[t];
        let mut cand = Bits::full(cod.len());
        for y in dom.down_set(x).iter().filter(|&y| y != x) {
            // Everything below x precedes it in a linear extension.
            cand.intersect_with(cod.up_set(table[y]));
        }
        if let Some((bd, bc)) = forced {
            if x == bd {
                if cand.contains(bc) {
                    table[x] = bc;
                    go(t + 1, order, dom, cod, forced, table, out, cap)?;
                }
                return Ok(());
            }
        }
        for v in cand.iter().collect::<Vec<_>>() {
            table[x] = v;
            go(t + 1, order, dom, cod, forced, table, out, cap)?;
        }
        Ok(())
    }
    go(0, &order, dom, cod, forced, &mut table, out, cap)
}

fn table_id(dom: &FinPoset, cod: &FinPoset, t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().enumerate().map(|(x, &y)| format!("{}:{}", dom.id(x), cod.id(y))).collect();
    format!("[{}]", parts.join(","))
}

pub fn fun_space_with(dom: &FinPoset, cod: &FinPoset, strict: bool, cap: usize) -> Result<FunSpace> {
    let tables = monotone_tables(dom, cod, strict, cap)?;
    let index: HashMap<Vec<usize>, usize> = tables.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let bottom = cod.bottom().and_then(|b| index.get(&vec![b; dom.len()]).copied());
    let ids = tables.iter().map(|t| table_id(dom, cod, t)).collect();
    let poset =
        FinPoset::from_leq_fn(ids, bottom, |a, b| tables[a].iter().zip(&tables[b]).all(|(&x, &y)| cod.leq(x, y)));
    Ok(FunSpace { poset, tables, index })
}

/// `(P → Q)`: all monotone maps, pointwise order.
pub fn fun_space(p: &FinPoset, q: &FinPoset) -> FinPoset {
    fun_space_with(p, q, false, usize::MAX).expect("uncapped non-strict function space").poset
}

/// `(P →⊥ Q)`: strict monotone maps, pointwise order.
pub fn strict_fun_space(p: &FinPoset, q: &FinPoset) -> Result<FinPoset> {
    Ok(fun_space_with(p, q, true, usize::MAX)?.poset)
}

/// Up-closed subsets ordered by inclusion.
#[derive(Clone, Debug)]
pub struct UpsetSpace {
    pub poset: FinPoset,
    /// Members of each upset, ascending.
    pub sets: Vec<Vec<usize>>,
    pub index: HashMap<Vec<usize>, usize>,
}

/// Enumerates upsets (excluding those containing bottom when `strict`),
/// failing once more than `cap` are found. The empty set comes first.
pub fn upset_members(p: &FinPoset, strict: bool, cap: usize) -> Result<Vec<Vec<usize>>> {
    let excluded = if strict { Some(p.require_bottom("strict upsets")?) } else { None };
    let mut order = p.linear_extension();
    order.reverse();
    let mut member = vec![false; p.len()];
    let mut out = Vec::new();
    fn go(
        t: usize,
        order: &[usize],
        p: &FinPoset,
        excluded: Option<usize>,
        member: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        if t == order.len() {
            if out.len() >= cap {
                return Err(Error::ElementCapExceeded(cap));
            }
            out.push((0..p.len()).filter(|&i| member[i]).collect());
            return Ok(());
        }
        let x = order[t];
        go(t + 1, order, p, excluded, member, out, cap)?;
        let can_join = Some(x) != excluded && p.up_set(x).iter().all(|y| y == x || member[y]);
        if can_join {
            member[x] = true;
            go(t + 1, order, p, excluded, member, out, cap)?;
            member[x] = false;
        }
        Ok(())
    }
    go(0, &order, p, excluded, &mut member, &mut out, cap)?;
    Ok(out)
}

fn set_id(p: &FinPoset, s: &[usize]) -> String {
    let parts: Vec<&str> = s.iter().map(|&i| p.id(i)).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn upsets_with(p: &FinPoset, strict: bool, cap: usize) -> Result<UpsetSpace> {
    let sets = upset_members(p, strict, cap)?;
    let index: HashMap<Vec<usize>, usize> = sets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let bits: Vec<Bits> = sets
        .iter()
        .map(|s| {
            let mut b = Bits::new(p.len());
            for &i in s {
                b.insert(i);
            }
            b
        })
        .collect();
    let bottom = index.get(&Vec::new()).copied();
    let ids = sets.iter().map(|s| set_id(p, s)).collect();
    let poset = FinPoset::from_leq_fn(ids, bottom, |a, b| bits[a].is_subset(&bits[b]));
    Ok(UpsetSpace { poset, sets, index })
}

pub fn upsets(p: &FinPoset) -> FinPoset {
    upsets_with(p, false, usize::MAX).expect("uncapped upsets").poset
}

/// Upsets not containing bottom; requires a pointed argument.
pub fn strict_upsets(p: &FinPoset) -> Result<FinPoset> {
    Ok(upsets_with(p, true, usize::MAX)?.poset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::iso_check;

    fn flat(names: &[&str]) -> FinPoset {
        lift(&discrete(names).unwrap())
    }

    #[test]
    fn coalesced_sum_of_points_is_point() {
        let s = coalesced_sum(&one(), &one()).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.is_pointed());
    }

    #[test]
    fn coalesced_sum_of_chains() {
        let s = coalesced_sum(&chain(2), &chain(2)).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.hasse().len(), 2);
        assert!(!s.leq(1, 2) && !s.leq(2, 1));
    }

    #[test]
    fn coalesced_sum_needs_bottoms() {
        let d = discrete(&["a"]).unwrap();
        assert!(matches!(coalesced_sum(&d, &one()), Err(Error::NotPointed(_))));
    }

    #[test]
    fn lift_of_two_points_is_flat() {
        let l = lift(&separated_sum(&one(), &one()));
        assert_eq!(l.len(), 3);
        assert!(iso_check(&l, &flat(&["a", "b"])).unwrap().is_some());
        let l2 = lift(&discrete(&["a", "b"]).unwrap());
        assert_eq!(l2.hasse().len(), 2);
        assert!(l2.is_pointed());
    }

    #[test]
    fn discrete_shapes() {
        let d = discrete(&["a", "b"]).unwrap();
        assert_eq!(d.len(), 2);
        assert!(!d.is_pointed());
        assert!(d.hasse().is_empty());
        assert!(discrete::<&str>(&[]).unwrap().is_empty());
    }

    #[test]
    fn function_spaces_small() {
        let b = boolean_lattice();
        assert_eq!(strict_fun_space(&one(), &b).unwrap().len(), 1);
        let f = fun_space(&chain(2), &b);
        assert!(iso_check(&f, &chain(3)).unwrap().is_some());
        let sf = strict_fun_space(&chain(2), &b).unwrap();
        assert!(iso_check(&sf, &chain(2)).unwrap().is_some());
        assert!(f.is_pointed());
    }

    #[test]
    fn monotone_endomaps_of_bool() {
        let b = boolean_lattice();
        assert_eq!(monotone_tables(&b, &b, false, usize::MAX).unwrap().len(), 3);
        assert_eq!(monotone_tables(&b, &b, true, usize::MAX).unwrap().len(), 2);
    }

    #[test]
    fn upsets_small() {
        assert_eq!(strict_upsets(&one()).unwrap().len(), 1);
        assert!(iso_check(&upsets(&one()), &chain(2)).unwrap().is_some());
        assert!(iso_check(&upsets(&chain(2)), &chain(3)).unwrap().is_some());
        assert_eq!(upsets(&one()).bottom(), Some(0));
    }

    #[test]
    fn cap_is_enforced() {
        let d = discrete(&["a", "b", "c", "d"]).unwrap();
        assert!(matches!(upsets_with(&d, false, 15), Err(Error::ElementCapExceeded(15))));
        assert_eq!(upsets_with(&d, false, 16).unwrap().sets.len(), 16);
    }

    #[test]
    fn diamond_covers() {
        let b = boolean_lattice();
        assert_eq!(product(&b, &b).hasse().len(), 4);
        assert_eq!(chain(3).hasse().len(), 2);
    }

    #[test]
    fn identical_constructions_are_equal() {
        let a = fun_space(&chain(2), &boolean_lattice());
        let b = fun_space(&chain(2), &boolean_lattice());
        assert_eq!(a, b);
    }
}
