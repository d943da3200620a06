use std::sync::Arc;

use crate::coalgebra::CoalgebraSpec;
use crate::engine::sequence::{SeqStatus, TerminalSequence};
use crate::error::{Error, Result};
use crate::functor::{Backend, FunctorInstance};
use crate::order::{compose, monotone_tables_upto, one, Bits, EpPair, FinPoset, MonoMap};

/// A final coalgebra read off a stabilized terminal sequence.
#[derive(Clone, Debug)]
pub struct FinalCoalgebra {
    pub instance: Arc<FunctorInstance>,
    pub carrier: Arc<FinPoset>,
    /// `carrier → F(carrier)`.
    pub structure: MonoMap,
    /// `F(carrier) → carrier`.
    pub inverse: MonoMap,
    /// Index of the stabilizing stage.
    pub stage: usize,
}

impl FinalCoalgebra {
    /// Both composites of structure and inverse are identities.
    pub fn lambek_check(&self) -> bool {
        let there = compose(&self.inverse, &self.structure);
        let back = compose(&self.structure, &self.inverse);
        matches!((there, back), (Ok(a), Ok(b)) if a.is_identity() && b.is_identity())
    }
}

/// Outcome of reading a final coalgebra off a sequence.
#[derive(Clone, Debug)]
pub enum FinalOutcome {
    Exact(FinalCoalgebra),
    /// Last computed stage of a truncated sequence.
    Approximant {
        carrier: Arc<FinPoset>,
        stage: usize,
    },
}

impl FinalOutcome {
    pub fn carrier(&self) -> &Arc<FinPoset> {
        match self {
            FinalOutcome::Exact(f) => &f.carrier,
            FinalOutcome::Approximant { carrier, .. } => carrier,
        }
    }

    pub fn exact(self) -> Result<FinalCoalgebra> {
        match self {
            FinalOutcome::Exact(f) => Ok(f),
            FinalOutcome::Approximant { .. } => Err(Error::NotStabilized),
        }
    }
}

pub fn final_coalgebra(seq: &TerminalSequence, inst: &Arc<FunctorInstance>) -> Result<FinalOutcome> {
    let SeqStatus::Stabilized(n) = seq.status else {
        let stage = seq.carrier_stage();
        return Ok(FinalOutcome::Approximant { carrier: seq.stages[stage].clone(), stage });
    };
    let ep = &seq.eps[n];
    let carrier = seq.stages[n].clone();
    let image = inst.apply(&carrier)?;
    if *image != **ep.target() {
        return Err(Error::InstanceMismatch);
    }
    let fin = FinalCoalgebra {
        instance: inst.clone(),
        carrier,
        structure: ep.embedding().clone(),
        inverse: ep.projection().clone(),
        stage: n,
    };
    if !fin.lambek_check() {
        return Err(Error::Invalid("stabilizing ep is not an isomorphism".into()));
    }
    Ok(FinalOutcome::Exact(fin))
}

fn check_same_instance(coalg: &CoalgebraSpec, fin: &FinalCoalgebra) -> Result<()> {
    if coalg.instance.same_as(&fin.instance) {
        Ok(())
    } else {
        Err(Error::InstanceMismatch)
    }
}

/// `structure ∘ g = F(g) ∘ h`, compared pointwise.
pub fn is_coalgebra_morphism(coalg: &CoalgebraSpec, fin: &FinalCoalgebra, g: &MonoMap) -> Result<bool> {
    check_same_instance(coalg, fin)?;
    if fin.structure.cod().len() == 1 {
        // Any two maps into a one-point poset agree.
        return Ok(true);
    }
    let left = compose(&fin.structure, g)?;
    let right = compose(&fin.instance.on_map(g)?, &coalg.structure)?;
    Ok(left.table() == right.table())
}

/// The unique coalgebra morphism into the final coalgebra, obtained by
/// iterating `h_{k+1} = F(h_k) ∘ h` from the map into `1` up to the
/// stabilizing stage.
pub fn coinductive_extension(coalg: &CoalgebraSpec, fin: &FinalCoalgebra) -> Result<MonoMap> {
    check_same_instance(coalg, fin)?;
    let h = if fin.carrier.len() == 1 {
        MonoMap::infer(coalg.carrier.clone(), fin.carrier.clone(), vec![0; coalg.carrier.len()])?
    } else {
        let mut h = MonoMap::to_terminal(&coalg.carrier, &Arc::new(one()))?;
        for _ in 0..fin.stage {
            h = compose(&fin.instance.on_map(&h)?, &coalg.structure)?;
        }
        if **h.cod() != *fin.carrier {
            return Err(Error::InstanceMismatch);
        }
        MonoMap::infer(coalg.carrier.clone(), fin.carrier.clone(), h.table().to_vec())?
    };
    if !is_coalgebra_morphism(coalg, fin, &h)? {
        return Err(Error::Invalid("iterated extension is not a coalgebra morphism".into()));
    }
    Ok(h)
}

/// Number of coalgebra morphisms `coalg → fin`, by exhausting the hom-set.
/// `None` when the hom-set has more than `limit` members.
pub fn count_coalgebra_morphisms(coalg: &CoalgebraSpec, fin: &FinalCoalgebra, limit: usize) -> Result<Option<usize>> {
    let strict = coalg.instance.backend() == Backend::PointedStrict;
    let tables = monotone_tables_upto(&coalg.carrier, &fin.carrier, strict, limit + 1)?;
    if tables.len() > limit {
        return Ok(None);
    }
    let mut n = 0;
    for t in tables {
        let g = MonoMap::infer(coalg.carrier.clone(), fin.carrier.clone(), t)?;
        if is_coalgebra_morphism(coalg, fin, &g)? {
            n += 1;
        }
    }
    Ok(Some(n))
}

/// Counts monotone (strict when `strict`) maps `dom → cod` with `u(x)`
/// drawn from `allowed[x]`, stopping at `stop`.
fn count_constrained(dom: &FinPoset, cod: &FinPoset, allowed: &[Bits], strict: bool, stop: usize) -> usize {
    let order = dom.linear_extension();
    let mut u = vec![usize::MAX; dom.len()];
    fn go(
        t: usize,
        order: &[usize],
        dom: &FinPoset,
        cod: &FinPoset,
        allowed: &[Bits],
        strict: bool,
        u: &mut Vec<usize>,
        stop: usize,
    ) -> usize {
        if t == order.len() {
            return 1;
        }
        let x = order[t];
        let mut cand = allowed[x].clone();
        for y in dom.down_set(x).iter().filter(|&y| y != x) {
            cand.intersect_with(cod.up_set(u[y]));
        }
        if strict && Some(x) == dom.bottom() {
            let mut only = Bits::new(cod.len());
            if let Some(b) = cod.bottom() {
                if cand.contains(b) {
                    only.insert(b);
                }
            }
            cand = only;
        }
        let mut total = 0;
        for v in cand.iter().collect::<Vec<_>>() {
            u[x] = v;
            total += go(t + 1, order, dom, cod, allowed, strict, u, stop - total);
            if total >= stop {
                break;
            }
        }
        total
    }
    go(0, &order, dom, cod, allowed, strict, &mut u, stop)
}

/// Summary of a limit-colimit check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitColimitReport {
    pub holds: bool,
    pub cocones_checked: usize,
    pub cones_checked: usize,
}

/// Checks that the stabilized stage is both a colimit of the embeddings and
/// a limit of the projections, against every cocone and cone into or out of
/// the computed stages (up to `per_target` per stage).
pub fn check_limit_colimit(seq: &TerminalSequence, per_target: usize) -> Result<LimitColimitReport> {
    let SeqStatus::Stabilized(n) = seq.status else {
        return Err(Error::NotStabilized);
    };
    let xs = &seq.stages;
    let l = xs[n].clone();
    let m = n + 1;
    // Cocone f_k: X_k → L and cone q_k: L → X_k, for k = 0..=m.
    let mut f: Vec<MonoMap> = vec![MonoMap::identity(&l); m + 1];
    let mut q: Vec<MonoMap> = vec![MonoMap::identity(&l); m + 1];
    f[m] = seq.eps[n].projection().clone();
    q[m] = seq.eps[n].embedding().clone();
    for k in (0..n).rev() {
        f[k] = compose(&f[k + 1], seq.eps[k].embedding())?;
        q[k] = compose(seq.eps[k].projection(), &q[k + 1])?;
    }
    let mut holds = true;
    for k in 0..m {
        holds &= compose(&f[k + 1], seq.eps[k].embedding())? == f[k];
        holds &= compose(seq.eps[k].projection(), &q[k + 1])? == q[k];
    }
    for k in 0..=m {
        holds &= EpPair::new(f[k].clone(), q[k].clone()).is_ok();
    }
    holds &= compose(&f[n], &q[n])?.is_identity();

    let mut cocones = 0;
    let mut cones = 0;
    for y in xs.iter() {
        // Cocones into y are fixed by their last leg g: X_m → y.
        for g in monotone_tables_upto(&xs[m], y, true, per_target)? {
            let g = MonoMap::infer(xs[m].clone(), y.clone(), g)?;
            let mut allowed = vec![Bits::full(y.len()); l.len()];
            let mut legs = vec![g.clone(); m + 1];
            for k in (0..m).rev() {
                legs[k] = compose(&legs[k + 1], seq.eps[k].embedding())?;
            }
            for (k, leg) in legs.iter().enumerate() {
                for x in 0..xs[k].len() {
                    let at = f[k].apply(x);
                    let mut only = Bits::new(y.len());
                    if allowed[at].contains(leg.apply(x)) {
                        only.insert(leg.apply(x));
                    }
                    allowed[at] = only;
                }
            }
            holds &= count_constrained(&l, y, &allowed, true, 2) == 1;
            cocones += 1;
        }
        // Cones out of y are fixed by their last leg h: y → X_m.
        for h in monotone_tables_upto(y, &xs[m], true, per_target)? {
            let h = MonoMap::infer(y.clone(), xs[m].clone(), h)?;
            let mut legs = vec![h.clone(); m + 1];
            for k in (0..m).rev() {
                legs[k] = compose(seq.eps[k].projection(), &legs[k + 1])?;
            }
            let allowed: Vec<Bits> = (0..y.len())
                .map(|z| {
                    let mut b = Bits::new(l.len());
                    for c in 0..l.len() {
                        if (0..=m).all(|k| q[k].apply(c) == legs[k].apply(z)) {
                            b.insert(c);
                        }
                    }
                    b
                })
                .collect();
            holds &= count_constrained(y, &l, &allowed, true, 2) == 1;
            cones += 1;
        }
    }
    Ok(LimitColimitReport { holds, cocones_checked: cocones, cones_checked: cones })
}
