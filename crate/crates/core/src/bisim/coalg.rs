use std::sync::Arc;

use crate::bisim::lts::{Behaviour, LtsSpec};
use crate::coalgebra::CoalgebraSpec;
use crate::engine::{coinductive_extension, FinalCoalgebra};
use crate::error::{Error, Result};
use crate::functor::{parse, Backend, Constants, ElemValue, FunctorInstance};
use crate::order::FinPoset;
use crate::relation::Relation;

/// Concrete syntax of `F(V, W) = Id^V + W`.
pub const LTS_FUNCTOR: &str = "(V -> Id) + W";

/// `Id^P + P` as a plain instance with both parameters set to `values`.
pub fn lts_instance(values: &Arc<FinPoset>) -> Result<Arc<FunctorInstance>> {
    let constants = Constants::new();
    let expr = parse(LTS_FUNCTOR, &constants)?;
    Ok(Arc::new(FunctorInstance::new(expr, Backend::Plain, values.clone(), values.clone(), constants)?))
}

/// Encodes a system as a coalgebra over its own instance.
pub fn lts_to_coalgebra(lts: &LtsSpec) -> Result<CoalgebraSpec> {
    lts_to_coalgebra_over(lts, lts_instance(&Arc::new(lts.value_set()))?)
}

/// Encodes a system over a given instance, so that several systems share it.
pub fn lts_to_coalgebra_over(lts: &LtsSpec, inst: Arc<FunctorInstance>) -> Result<CoalgebraSpec> {
    let values = lts
        .states
        .iter()
        .zip(&lts.behaviour)
        .map(|(s, b)| {
            let v = match b {
                Behaviour::Input(t) => ElemValue::Inl(Box::new(ElemValue::Table(
                    t.iter()
                        .enumerate()
                        .map(|(p, &x)| (lts.values[p].clone(), ElemValue::State(lts.states[x].clone())))
                        .collect(),
                ))),
                Behaviour::Output(p) => ElemValue::Inr(Box::new(ElemValue::W(lts.values[*p].clone()))),
            };
            (s.clone(), v)
        })
        .collect();
    CoalgebraSpec::from_values(inst, Arc::new(lts.state_set()), &values)
}

fn check_instances(c1: &CoalgebraSpec, c2: &CoalgebraSpec) -> Result<()> {
    if c1.instance.same_as(&c2.instance) {
        Ok(())
    } else {
        Err(Error::InstanceMismatch)
    }
}

/// First pair `(x, y)` of `r` whose images are not related by the lifted
/// relation, if any. `v_rel` and `w_rel` relate the parameter carriers.
pub fn check_coalg_bisim(
    c1: &CoalgebraSpec,
    c2: &CoalgebraSpec,
    r: &Relation,
    v_rel: Option<&Relation>,
    w_rel: Option<&Relation>,
) -> Result<Option<(usize, usize)>> {
    check_instances(c1, c2)?;
    let lifted = c1.instance.rel_lift(&c1.carrier, &c2.carrier, r, v_rel, w_rel)?;
    Ok(r.pairs().into_iter().find(|&(x, y)| !lifted.contains(c1.structure.apply(x), c2.structure.apply(y))))
}

/// Greatest relation `R` with `(h1 x, h2 y)` in the lifting of `R` for all
/// `(x, y)` in `R`.
pub fn coalg_bisim(c1: &CoalgebraSpec, c2: &CoalgebraSpec) -> Result<Relation> {
    coalg_bisim_with(c1, c2, None, None)
}

pub fn coalg_bisim_with(
    c1: &CoalgebraSpec,
    c2: &CoalgebraSpec,
    v_rel: Option<&Relation>,
    w_rel: Option<&Relation>,
) -> Result<Relation> {
    check_instances(c1, c2)?;
    let mut r = Relation::full(c1.carrier.len(), c2.carrier.len());
    loop {
        let lifted = c1.instance.rel_lift(&c1.carrier, &c2.carrier, &r, v_rel, w_rel)?;
        let bad: Vec<_> = r
            .pairs()
            .into_iter()
            .filter(|&(x, y)| !lifted.contains(c1.structure.apply(x), c2.structure.apply(y)))
            .collect();
        if bad.is_empty() {
            return Ok(r);
        }
        for (x, y) in bad {
            r.remove(x, y);
        }
    }
}

/// Kernel of the coinductive extension into `fin`.
pub fn behavioural_equiv(coalg: &CoalgebraSpec, fin: &FinalCoalgebra) -> Result<Relation> {
    let h = coinductive_extension(coalg, fin)?;
    Ok(Relation::kernel_of(h.table(), h.table()))
}
