use std::sync::Arc;

use super::*;
use crate::coalgebra::CoalgebraSpec;
use crate::engine::{final_coalgebra, terminal_sequence};
use crate::error::Error;
use crate::functor::{parse, Backend, Constants, FunctorInstance};
use crate::order::{boolean_lattice, chain, iso_check, monotone_tables, one, FinPoset};
use crate::relation::Relation;

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn lts(values: usize, behaviour: Vec<Behaviour>) -> LtsSpec {
    LtsSpec::new(names("p", values), names("x", behaviour.len()), behaviour).unwrap()
}

fn outputs_itself(n: usize) -> LtsSpec {
    lts(n, (0..n).map(Behaviour::Output).collect())
}

fn partitions_of(n: usize) -> Vec<Relation> {
    all_partitions(n).iter().map(|b| Relation::from_blocks(n, b).unwrap()).collect()
}

#[test]
fn outputs_of_distinct_values_give_identity() {
    let l = outputs_itself(4);
    assert_eq!(value_bisim(&l, &l).unwrap(), Relation::identity(4));
}

#[test]
fn identical_loops_are_fully_related() {
    let a = lts(2, vec![Behaviour::Input(vec![0, 0])]);
    assert_eq!(value_bisim(&a, &a.clone()).unwrap(), Relation::full(1, 1));
}

#[test]
fn output_never_matches_input() {
    let a = lts(1, vec![Behaviour::Output(0)]);
    let b = lts(1, vec![Behaviour::Input(vec![0])]);
    assert!(value_bisim(&a, &b).unwrap().is_empty());
    let v = check_value_bisim(&a, &b, &Relation::full(1, 1)).unwrap().unwrap();
    assert_eq!(v.clause, OUTPUT_MATCH);
    let v = check_value_bisim(&b, &a, &Relation::full(1, 1)).unwrap().unwrap();
    assert_eq!(v.clause, INPUT_MATCH);
}

#[test]
fn value_sets_must_agree() {
    let a = lts(1, vec![Behaviour::Output(0)]);
    let b = lts(2, vec![Behaviour::Output(0)]);
    assert_eq!(value_bisim(&a, &b).unwrap_err(), Error::ValueSetMismatch);
}

#[test]
fn dimmed_rejects_non_equivalence() {
    let a = outputs_itself(2);
    let r = Relation::from_pairs(2, 2, [(0, 1)]);
    assert!(matches!(dimmed_bisim(&a, &a, &r), Err(Error::NotEquivalence(_))));
}

#[test]
fn dimmed_with_identity_is_value_bisim() {
    for l in LtsSpec::enumerate_all(2, 2).iter().chain(&LtsSpec::enumerate_all(3, 1)) {
        let id = Relation::identity(l.values.len());
        assert_eq!(dimmed_bisim(l, l, &id).unwrap(), value_bisim(l, l).unwrap());
    }
}

#[test]
fn total_approx_relates_all_outputs() {
    let l = outputs_itself(3);
    let total = Relation::full(3, 3);
    assert_eq!(dimmed_bisim(&l, &l, &total).unwrap(), Relation::full(3, 3));
}

#[test]
fn equivalent_outputs_become_related() {
    let l = outputs_itself(2);
    let approx = Relation::full(2, 2);
    let r = dimmed_bisim(&l, &l, &approx).unwrap();
    assert!(r.contains(0, 1) && r.contains(1, 0));
    assert!(!value_bisim(&l, &l).unwrap().contains(0, 1));
}

#[test]
fn input_clause_uses_equivalent_values() {
    // x0 reads p0 -> x1, p1 -> x0; x1 outputs p0 and x2 outputs p1.
    let l = lts(2, vec![Behaviour::Input(vec![1, 2]), Behaviour::Output(0), Behaviour::Output(1)]);
    let id = Relation::identity(2);
    let total = Relation::full(2, 2);
    assert!(!value_bisim(&l, &l).unwrap().contains(1, 2));
    let r = dimmed_bisim(&l, &l, &total).unwrap();
    assert!(r.contains(1, 2));
    assert!(r.contains(0, 0));
    // Under the identity x0 only matches itself.
    assert_eq!(dimmed_bisim(&l, &l, &id).unwrap().row(0).iter().collect::<Vec<_>>(), vec![0]);
}

#[test]
fn greatest_and_closed_under_union() {
    for l in LtsSpec::enumerate_all(2, 2) {
        for approx in partitions_of(2) {
            let g = dimmed_bisim(&l, &l, &approx).unwrap();
            assert!(check_dimmed_bisim(&l, &l, &approx, &g).unwrap().is_none());
            for (x, y) in Relation::full(2, 2).pairs() {
                if g.contains(x, y) {
                    continue;
                }
                let mut bigger = g.clone();
                bigger.insert(x, y);
                assert!(check_dimmed_bisim(&l, &l, &approx, &bigger).unwrap().is_some());
            }
            // Every bisimulation lies below the greatest, and unions stay bisimulations.
            let all: Vec<Relation> = (0u32..16)
                .map(|c| Relation::from_fn(2, 2, |a, b| c >> (a * 2 + b) & 1 == 1))
                .filter(|r| check_dimmed_bisim(&l, &l, &approx, r).unwrap().is_none())
                .collect();
            for a in &all {
                assert!(a.is_subset(&g));
                for b in &all {
                    assert!(check_dimmed_bisim(&l, &l, &approx, &a.union(b)).unwrap().is_none());
                }
            }
        }
    }
}

#[test]
fn coalgebraic_bisim_matches_game() {
    for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)] {
        for l in LtsSpec::enumerate_all(n, m) {
            let c = lts_to_coalgebra(&l).unwrap();
            let r = coalg_bisim(&c, &c).unwrap();
            assert_eq!(r, value_bisim(&l, &l).unwrap(), "{:?}", l);
            assert!(r.is_equivalence());
        }
    }
}

#[test]
fn coalgebraic_bisim_across_systems() {
    let systems = LtsSpec::enumerate_all(2, 2);
    let values = Arc::new(systems[0].value_set());
    let inst = lts_instance(&values).unwrap();
    for a in systems.iter().step_by(5) {
        for b in systems.iter().step_by(7) {
            let ca = lts_to_coalgebra_over(a, inst.clone()).unwrap();
            let cb = lts_to_coalgebra_over(b, inst.clone()).unwrap();
            assert_eq!(coalg_bisim(&ca, &cb).unwrap(), value_bisim(a, b).unwrap());
        }
    }
}

#[test]
fn coalgebraic_bisim_needs_one_instance() {
    let a = lts_to_coalgebra(&outputs_itself(1)).unwrap();
    let b = lts_to_coalgebra(&outputs_itself(2)).unwrap();
    assert_eq!(coalg_bisim(&a, &b).unwrap_err(), Error::InstanceMismatch);
}

#[test]
fn quotient_by_identities_is_isomorphic() {
    let l = lts(2, vec![Behaviour::Input(vec![1, 2]), Behaviour::Output(0), Behaviour::Output(1)]);
    let q = quotient(&l, &Relation::identity(3), &Relation::identity(2)).unwrap();
    assert_eq!(q.carrier.len(), 3);
    let orig = lts_to_coalgebra(&l).unwrap();
    assert!(iso_check(q.structure.cod(), orig.structure.cod()).unwrap().is_some());
    let vals = q.values().unwrap();
    assert_eq!(
        vals["[x0]"],
        crate::functor::ElemValue::Inl(Box::new(crate::functor::ElemValue::Table(vec![
            ("[p0]".into(), crate::functor::ElemValue::State("[x1]".into())),
            ("[p1]".into(), crate::functor::ElemValue::State("[x2]".into())),
        ])))
    );
}

#[test]
fn outputs_collapse_under_total_approx() {
    let l = outputs_itself(4);
    let total = Relation::full(4, 4);
    let r = dimmed_bisim(&l, &l, &total).unwrap();
    let q = quotient(&l, &r, &total).unwrap();
    assert_eq!(q.carrier.len(), 1);
    assert_eq!(q.instance.v().len(), 1);
}

#[test]
fn quotient_of_three_states_validates() {
    let l = lts(2, vec![Behaviour::Input(vec![1, 2]), Behaviour::Output(0), Behaviour::Output(1)]);
    let total = Relation::full(2, 2);
    let r = dimmed_bisim(&l, &l, &total).unwrap();
    let q = quotient(&l, &r, &total).unwrap();
    assert_eq!(q.carrier.len(), 2);
    // Re-validate through the wire format.
    let back = CoalgebraSpec::from_json(&q.to_json().unwrap(), 512).unwrap();
    assert_eq!(back.structure.table(), q.structure.table());
    // The quotient map is a bisimulation witness: its kernel is `r`.
    let qc = coalg_bisim(&q, &q).unwrap();
    assert_eq!(qc, Relation::identity(2));
}

#[test]
fn quotient_rejects_non_bisimulation() {
    let l = outputs_itself(2);
    let err = quotient(&l, &Relation::full(2, 2), &Relation::identity(2)).unwrap_err();
    assert_eq!(err, Error::NotABisimulation { left: "x0".into(), right: "x1".into(), clause: OUTPUT_MATCH.into() });
}

#[test]
fn lemma1_identity_approx() {
    for l in LtsSpec::enumerate_all(3, 1).iter().chain(LtsSpec::enumerate_all(2, 2).iter()) {
        let rep = lemma1_check(l, &Relation::identity(l.values.len()), true).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.relations_checked, 1 << (l.states.len() * l.states.len()));
    }
}

#[test]
fn lemma1_planted_non_bisimulation() {
    let l = outputs_itself(2);
    let id = Relation::identity(2);
    let planted = Relation::full(2, 2);
    assert!(check_dimmed_bisim(&l, &l, &id, &planted).unwrap().is_some());
    let c = lts_to_coalgebra(&l).unwrap();
    assert!(check_coalg_bisim(&c, &c, &planted, Some(&id), Some(&id)).unwrap().is_some());
    let rep = lemma1_check(&l, &id, true).unwrap();
    assert!(rep.holds);
    // Subsets of the identity pass both; anything touching (x0, x1) fails both.
    assert_eq!(rep.game_accepted, 4);
    assert_eq!(rep.lifting_accepted, 4);
}

#[test]
fn lemma1_exhaustive_two_by_two() {
    let sweep = lemma1_sweep(2, 2).unwrap();
    assert_eq!(sweep.systems, 36);
    assert_eq!(sweep.equivalences, 2);
    assert_eq!(sweep.relations_checked, 36 * 2 * 16);
    assert_eq!(sweep.failures, 0);
    assert!(sweep.quotients_built >= 72);
}

#[test]
fn lemma1_greatest_mode() {
    let l = lts(
        2,
        vec![Behaviour::Input(vec![1, 2]), Behaviour::Output(0), Behaviour::Output(1), Behaviour::Input(vec![3, 0])],
    );
    for approx in partitions_of(2) {
        let rep = lemma1_check(&l, &approx, false).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.relations_checked, 1);
    }
}

#[test]
fn lemma1_exhaustive_size_cap() {
    let l = outputs_itself(4);
    let err = lemma1_check(&l, &Relation::identity(4), true).unwrap_err();
    assert!(matches!(err, Error::SizeCapExceeded { .. }));
}

fn pointed_instance(text: &str, w: FinPoset) -> Arc<FunctorInstance> {
    let c = Constants::new();
    Arc::new(
        FunctorInstance::new(parse(text, &c).unwrap(), Backend::PointedStrict, Arc::new(one()), Arc::new(w), c)
            .unwrap(),
    )
}

#[test]
fn stuck_states_are_equivalent() {
    let inst = pointed_instance("Us(Id)", one());
    let fin = final_coalgebra(&terminal_sequence(&inst, 8).unwrap(), &inst).unwrap().exact().unwrap();
    let coalg = CoalgebraSpec::new(inst.clone(), Arc::new(chain(2)), vec![0, 0]).unwrap();
    let eq = behavioural_equiv(&coalg, &fin).unwrap();
    assert_eq!(eq.classes().unwrap(), vec![vec![0, 1]]);
    assert!(coalg_bisim(&coalg, &coalg).unwrap().contains(0, 1));
}

#[test]
fn behavioural_equiv_matches_coalgebraic_bisim() {
    for w in [boolean_lattice(), chain(3)] {
        let inst = pointed_instance("(V -!> Id) + W", w);
        let fin = final_coalgebra(&terminal_sequence(&inst, 8).unwrap(), &inst).unwrap().exact().unwrap();
        let own = CoalgebraSpec::new(inst.clone(), fin.carrier.clone(), fin.structure.table().to_vec()).unwrap();
        let n = own.carrier.len();
        assert_eq!(behavioural_equiv(&own, &fin).unwrap(), Relation::identity(n));
        for x in [chain(2), chain(3), boolean_lattice()] {
            let x = Arc::new(x);
            let fx = inst.apply(&x).unwrap();
            for t in monotone_tables(&x, &fx, true, 10_000).unwrap() {
                let c = CoalgebraSpec::new(inst.clone(), x.clone(), t).unwrap();
                assert_eq!(behavioural_equiv(&c, &fin).unwrap(), coalg_bisim(&c, &c).unwrap());
            }
        }
    }
}
