use serde::{Deserialize, Serialize};

use crate::bisim::lts::{Behaviour, LtsSpec};
use crate::error::{Error, Result};
use crate::relation::Relation;

pub const INPUT_MATCH: &str = "input-match";
pub const OUTPUT_MATCH: &str = "output-match";

/// A pair of a candidate relation that fails a transfer clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub left: String,
    pub right: String,
    pub clause: String,
}

impl Violation {
    pub fn into_error(self) -> Error {
        Error::NotABisimulation { left: self.left, right: self.right, clause: self.clause }
    }
}

fn same_values(l1: &LtsSpec, l2: &LtsSpec) -> Result<()> {
    if l1.values != l2.values {
        return Err(Error::ValueSetMismatch);
    }
    Ok(())
}

fn check_approx(lts: &LtsSpec, approx: &Relation) -> Result<()> {
    let n = lts.values.len();
    if approx.left_len() != n || approx.right_len() != n {
        return Err(Error::NotEquivalence(format!("relation is not over the {n} values")));
    }
    if !approx.is_equivalence() {
        return Err(Error::NotEquivalence("value relation is not reflexive, symmetric and transitive".into()));
    }
    Ok(())
}

/// Plain value-passing clauses for `(x, y)`.
fn value_clause(l1: &LtsSpec, l2: &LtsSpec, r: &Relation, x: usize, y: usize) -> Option<&'static str> {
    match (&l1.behaviour[x], &l2.behaviour[y]) {
        (Behaviour::Input(f), Behaviour::Input(g)) => {
            (0..f.len()).any(|p| !r.contains(f[p], g[p])).then_some(INPUT_MATCH)
        }
        (Behaviour::Output(p), Behaviour::Output(q)) => (p != q).then_some(OUTPUT_MATCH),
        (Behaviour::Input(_), Behaviour::Output(_)) => Some(INPUT_MATCH),
        (Behaviour::Output(_), Behaviour::Input(_)) => Some(OUTPUT_MATCH),
    }
}

/// Clauses up to `approx`, both directions spelled out.
fn dimmed_clause(
    l1: &LtsSpec,
    l2: &LtsSpec,
    approx: &Relation,
    r: &Relation,
    x: usize,
    y: usize,
) -> Option<&'static str> {
    match (&l1.behaviour[x], &l2.behaviour[y]) {
        (Behaviour::Input(f), Behaviour::Input(g)) => {
            let n = f.len();
            for p in 0..n {
                for q in 0..n {
                    if approx.contains(p, q) && !r.contains(f[p], g[q]) {
                        return Some(INPUT_MATCH);
                    }
                    if approx.contains(q, p) && !r.contains(f[p], g[q]) {
                        return Some(INPUT_MATCH);
                    }
                }
            }
            None
        }
        (Behaviour::Output(p), Behaviour::Output(q)) => {
            (!approx.contains(*p, *q) || !approx.contains(*q, *p)).then_some(OUTPUT_MATCH)
        }
        (Behaviour::Input(_), Behaviour::Output(_)) => Some(INPUT_MATCH),
        (Behaviour::Output(_), Behaviour::Input(_)) => Some(OUTPUT_MATCH),
    }
}

fn first_violation(
    l1: &LtsSpec,
    l2: &LtsSpec,
    r: &Relation,
    clause: impl Fn(usize, usize) -> Option<&'static str>,
) -> Option<Violation> {
    r.pairs().into_iter().find_map(|(x, y)| {
        clause(x, y).map(|c| Violation {
            left: l1.states[x].clone(),
            right: l2.states[y].clone(),
            clause: c.to_string(),
        })
    })
}

/// Removes failing pairs until none fail.
fn refine(n1: usize, n2: usize, clause: impl Fn(&Relation, usize, usize) -> bool) -> Relation {
    let mut r = Relation::full(n1, n2);
    loop {
        let bad: Vec<_> = r.pairs().into_iter().filter(|&(x, y)| clause(&r, x, y)).collect();
        if bad.is_empty() {
            return r;
        }
        for (x, y) in bad {
            r.remove(x, y);
        }
    }
}

pub fn check_value_bisim(l1: &LtsSpec, l2: &LtsSpec, r: &Relation) -> Result<Option<Violation>> {
    same_values(l1, l2)?;
    Ok(first_violation(l1, l2, r, |x, y| value_clause(l1, l2, r, x, y)))
}

pub fn check_dimmed_bisim(l1: &LtsSpec, l2: &LtsSpec, approx: &Relation, r: &Relation) -> Result<Option<Violation>> {
    same_values(l1, l2)?;
    check_approx(l1, approx)?;
    Ok(first_violation(l1, l2, r, |x, y| dimmed_clause(l1, l2, approx, r, x, y)))
}

/// Greatest value-passing bisimulation between two systems.
pub fn value_bisim(l1: &LtsSpec, l2: &LtsSpec) -> Result<Relation> {
    same_values(l1, l2)?;
    Ok(refine(l1.states.len(), l2.states.len(), |r, x, y| value_clause(l1, l2, r, x, y).is_some()))
}

/// Greatest bisimulation matching values up to `approx`.
pub fn dimmed_bisim(l1: &LtsSpec, l2: &LtsSpec, approx: &Relation) -> Result<Relation> {
    same_values(l1, l2)?;
    check_approx(l1, approx)?;
    Ok(refine(l1.states.len(), l2.states.len(), |r, x, y| dimmed_clause(l1, l2, approx, r, x, y).is_some()))
}
