use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bisim::coalg::{check_coalg_bisim, coalg_bisim_with, lts_instance, lts_to_coalgebra};
use crate::bisim::games::{check_dimmed_bisim, dimmed_bisim};
use crate::bisim::lts::{all_partitions, Behaviour, LtsSpec};
use crate::coalgebra::CoalgebraSpec;
use crate::error::{Error, Result};
use crate::functor::ElemValue;
use crate::order::discrete;
use crate::relation::{Relation, RelationJson};

/// Largest state set for the exhaustive [`lemma1_check`].
pub const EXHAUSTIVE_MAX_STATES: usize = 3;
/// Largest value set for the exhaustive [`lemma1_check`].
pub const EXHAUSTIVE_MAX_VALUES: usize = 2;

/// Name of an equivalence class: its members in brackets.
pub fn class_name(names: &[String], block: &[usize]) -> String {
    let members: Vec<&str> = block.iter().map(|&i| names[i].as_str()).collect();
    format!("[{}]", members.join(","))
}

fn class_names(names: &[String], blocks: &[Vec<usize>]) -> Vec<String> {
    blocks.iter().map(|b| class_name(names, b)).collect()
}

/// `h̄ : X/R → F(P/≈, P/≈)(X/R)`. `r` must be a `≈`-bisimulation; each
/// class is evaluated from every representative and the results compared.
pub fn quotient(lts: &LtsSpec, r: &Relation, approx: &Relation) -> Result<CoalgebraSpec> {
    if let Some(v) = check_dimmed_bisim(lts, lts, approx, r)? {
        return Err(v.into_error());
    }
    let state_blocks = r.classes()?;
    let value_blocks = approx.classes()?;
    let state_of = r.class_map()?;
    let value_of = approx.class_map()?;
    let xs = class_names(&lts.states, &state_blocks);
    let ps = class_names(&lts.values, &value_blocks);

    // `None` when an input table does not respect `≈` up to `R`.
    let image = |x: usize| -> Option<ElemValue> {
        match &lts.behaviour[x] {
            Behaviour::Input(t) => {
                // One entry per value class; all members must agree.
                let mut table: Vec<Option<usize>> = vec![None; value_blocks.len()];
                let mut clash = false;
                for (p, &x2) in t.iter().enumerate() {
                    let c = state_of[x2];
                    match table[value_of[p]] {
                        Some(d) if d != c => clash = true,
                        _ => table[value_of[p]] = Some(c),
                    }
                }
                if clash {
                    return None;
                }
                Some(ElemValue::Inl(Box::new(ElemValue::Table(
                    table
                        .iter()
                        .enumerate()
                        .map(|(k, c)| (ps[k].clone(), ElemValue::State(xs[c.unwrap()].clone())))
                        .collect(),
                ))))
            }
            Behaviour::Output(p) => Some(ElemValue::Inr(Box::new(ElemValue::W(ps[value_of[*p]].clone())))),
        }
    };

    let mut values = BTreeMap::new();
    for (k, block) in state_blocks.iter().enumerate() {
        let first = image(block[0]);
        for &x in block {
            let v = image(x);
            if v.is_none() || v != first {
                return Err(Error::NotABisimulation {
                    left: lts.states[block[0]].clone(),
                    right: lts.states[x].clone(),
                    clause: "well-defined".into(),
                });
            }
        }
        values.insert(xs[k].clone(), first.expect("checked above"));
    }
    let qp = Arc::new(discrete(&ps)?);
    let qx = Arc::new(discrete(&xs)?);
    CoalgebraSpec::from_values(lts_instance(&qp)?, qx, &values)
}

/// A relation on which the two predicates disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Counterexample {
    pub relation: RelationJson,
    pub game: bool,
    pub lifting: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub holds: bool,
    pub exhaustive: bool,
    pub relations_checked: usize,
    /// Relations accepted by the game, and by the lifting.
    pub game_accepted: usize,
    pub lifting_accepted: usize,
    /// Accepted equivalences whose quotient coalgebra was built.
    pub quotients_built: usize,
    pub counterexample: Option<Lemma1Counterexample>,
}

/// `≈` seen through the quotient map `P → P/≈`: the kernel of the class map.
fn pulled_back(approx: &Relation) -> Result<Relation> {
    let q = approx.class_map()?;
    Ok(Relation::kernel_of(&q, &q))
}

/// Compares "`R` is a `≈`-bisimulation" (game) with "`R` is a bisimulation
/// for the lifting of `F(P/≈, P/≈)`" on every `R ⊆ X × X` when `exhaustive`,
/// otherwise on the two greatest fixed points.
pub fn lemma1_check(lts: &LtsSpec, approx: &Relation, exhaustive: bool) -> Result<Lemma1Report> {
    let n = lts.states.len();
    if exhaustive && n > EXHAUSTIVE_MAX_STATES {
        return Err(Error::SizeCapExceeded { size: n, cap: EXHAUSTIVE_MAX_STATES });
    }
    if exhaustive && lts.values.len() > EXHAUSTIVE_MAX_VALUES {
        return Err(Error::SizeCapExceeded { size: lts.values.len(), cap: EXHAUSTIVE_MAX_VALUES });
    }
    if !approx.is_equivalence() || approx.left_len() != lts.values.len() {
        return Err(Error::NotEquivalence("value relation must be an equivalence over the values".into()));
    }
    let coalg = lts_to_coalgebra(lts)?;
    let kernel = pulled_back(approx)?;
    let game = |r: &Relation| -> Result<bool> { Ok(check_dimmed_bisim(lts, lts, approx, r)?.is_none()) };
    let lifting = |r: &Relation| -> Result<bool> {
        Ok(check_coalg_bisim(&coalg, &coalg, r, Some(&kernel), Some(&kernel))?.is_none())
    };

    let candidates: Vec<Relation> = if exhaustive {
        let cells = n * n;
        (0u32..1 << cells).map(|code| Relation::from_fn(n, n, |a, b| code >> (a * n + b) & 1 == 1)).collect()
    } else {
        let g = dimmed_bisim(lts, lts, approx)?;
        let l = coalg_bisim_with(&coalg, &coalg, Some(&kernel), Some(&kernel))?;
        if g == l {
            vec![g]
        } else {
            vec![g, l]
        }
    };

    let states = lts.state_set();
    let mut report = Lemma1Report {
        holds: true,
        exhaustive,
        relations_checked: 0,
        game_accepted: 0,
        lifting_accepted: 0,
        quotients_built: 0,
        counterexample: None,
    };
    for r in &candidates {
        let a = game(r)?;
        let b = lifting(r)?;
        report.relations_checked += 1;
        report.game_accepted += a as usize;
        report.lifting_accepted += b as usize;
        if a != b {
            report.holds = false;
            if report.counterexample.is_none() {
                report.counterexample =
                    Some(Lemma1Counterexample { relation: r.to_json(&states, &states), game: a, lifting: b });
            }
        } else if a && r.is_equivalence() {
            quotient(lts, r, approx)?;
            report.quotients_built += 1;
        }
    }
    Ok(report)
}

/// Totals of [`lemma1_sweep`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Sweep {
    pub systems: usize,
    pub equivalences: usize,
    pub instances: usize,
    pub relations_checked: usize,
    pub quotients_built: usize,
    pub failures: usize,
}

/// Exhaustive [`lemma1_check`] over every system with the given sizes and
/// every equivalence on the values.
pub fn lemma1_sweep(n_states: usize, n_values: usize) -> Result<Lemma1Sweep> {
    let systems = LtsSpec::enumerate_all(n_states, n_values);
    let partitions = all_partitions(n_values);
    let mut out = Lemma1Sweep {
        systems: systems.len(),
        equivalences: partitions.len(),
        instances: 0,
        relations_checked: 0,
        quotients_built: 0,
        failures: 0,
    };
    for lts in &systems {
        for blocks in &partitions {
            let approx = Relation::from_blocks(n_values, blocks)?;
            let rep = lemma1_check(lts, &approx, true)?;
            out.instances += 1;
            out.relations_checked += rep.relations_checked;
            out.quotients_built += rep.quotients_built;
            out.failures += (!rep.holds) as usize;
        }
    }
    Ok(out)
}
