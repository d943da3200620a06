//! The inclusion of pointed posets with strict maps into posets with
//! monotone maps, its left adjoint `(−)⊥`, and stagewise comparison of a
//! pointed functor with its plain counterpart.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{plain_sequence, terminal_sequence, SeqStatus};
use crate::error::{Error, Result};
use crate::functor::{Backend, Constants, FunctorExpr, FunctorInstance, DEFAULT_ELEMENT_CAP};
use crate::order::{
    all_pointed_posets, all_posets, find_iso, lift, monotone_tables, FinPoset, Iso, MonoMap, PosetJson, DEFAULT_ISO_CAP,
};

/// Bound on either hom-set in [`adjunction_check`].
pub const DEFAULT_HOM_CAP: usize = 4096;

/// Forgets the distinguished bottom. The order is unchanged.
pub fn include(p: &FinPoset) -> Result<FinPoset> {
    p.require_bottom("included object")?;
    p.with_bottom(None)
}

/// A strict map seen as a plain monotone map.
pub fn include_map(f: &MonoMap) -> Result<MonoMap> {
    if !f.is_strict() {
        return Err(Error::NotStrict("only strict maps lie in the pointed category".into()));
    }
    let dom = Arc::new(include(f.dom())?);
    let cod = Arc::new(include(f.cod())?);
    MonoMap::new(dom, cod, f.table().to_vec(), false)
}

pub fn lift_left_adjoint(p: &FinPoset) -> FinPoset {
    lift(p)
}

/// `f⊥`: bottom to bottom, `up(x)` to `up(f x)`.
pub fn lift_map(f: &MonoMap) -> MonoMap {
    let dom = Arc::new(lift(f.dom()));
    let cod = Arc::new(lift(f.cod()));
    let mut table = vec![0];
    table.extend(f.table().iter().map(|&y| y + 1));
    MonoMap::new(dom, cod, table, true).expect("lifting preserves monotonicity")
}

/// Strict `P⊥ → Q` to monotone `P → Q`: restrict along `up`.
pub fn transpose(f: &[usize]) -> Vec<usize> {
    f[1..].to_vec()
}

/// Monotone `P → Q` to strict `P⊥ → Q`.
pub fn untranspose(g: &[usize], q_bottom: usize) -> Vec<usize> {
    let mut t = vec![q_bottom];
    t.extend_from_slice(g);
    t
}

/// Hom-set sizes on both sides of the adjunction and whether the
/// transposes form a bijection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionCheck {
    pub strict_maps: usize,
    pub monotone_maps: usize,
    pub holds: bool,
}

fn capped(r: Result<Vec<Vec<usize>>>, cap: usize) -> Result<Vec<Vec<usize>>> {
    r.map_err(|e| match e {
        Error::ElementCapExceeded(_) => Error::SizeCapExceeded { size: cap + 1, cap },
        e => e,
    })
}

/// Enumerates strict maps `P⊥ → Q` and monotone maps `P → Q` and checks
/// that transposition is a bijection between them.
pub fn adjunction_check(p: &FinPoset, q: &FinPoset) -> Result<AdjunctionCheck> {
    adjunction_check_with(p, q, DEFAULT_HOM_CAP)
}

pub fn adjunction_check_with(p: &FinPoset, q: &FinPoset, cap: usize) -> Result<AdjunctionCheck> {
    let qb = q.require_bottom("adjunction codomain")?;
    let lp = lift_left_adjoint(p);
    let iq = include(q)?;
    let strict = capped(monotone_tables(&lp, q, true, cap), cap)?;
    let plain = capped(monotone_tables(p, &iq, false, cap), cap)?;
    let strict_set: std::collections::HashSet<&Vec<usize>> = strict.iter().collect();
    let plain_set: std::collections::HashSet<&Vec<usize>> = plain.iter().collect();
    let there = strict.iter().all(|f| {
        let g = transpose(f);
        plain_set.contains(&g) && untranspose(&g, qb) == *f
    });
    let back = plain.iter().all(|g| {
        let f = untranspose(g, qb);
        strict_set.contains(&f) && transpose(&f) == *g
    });
    Ok(AdjunctionCheck {
        strict_maps: strict.len(),
        monotone_maps: plain.len(),
        holds: there && back && strict.len() == plain.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionSweep {
    pub max_p: usize,
    pub max_q: usize,
    pub pairs: usize,
    pub failures: usize,
}

/// [`adjunction_check`] for every poset with at most `max_p` elements and
/// every pointed poset with at most `max_q` elements, up to isomorphism.
pub fn adjunction_sweep(max_p: usize, max_q: usize) -> Result<AdjunctionSweep> {
    let ps: Vec<FinPoset> = (0..=max_p).flat_map(all_posets).collect();
    let qs: Vec<FinPoset> = (1..=max_q).flat_map(all_pointed_posets).collect();
    let mut out = AdjunctionSweep { max_p, max_q, pairs: 0, failures: 0 };
    for p in &ps {
        for q in &qs {
            out.pairs += 1;
            out.failures += (!adjunction_check(p, q)?.holds) as usize;
        }
    }
    Ok(out)
}

/// Iso between `include(Hₖ)` and `Gₖ` at one stage.
#[derive(Clone, Debug)]
pub struct StageIso {
    pub stage: usize,
    pub pointed: Arc<FinPoset>,
    pub plain: Arc<FinPoset>,
    pub iso: Option<Iso>,
}

#[derive(Clone, Debug)]
pub struct MediatorReport {
    pub expr_h: FunctorExpr,
    pub expr_g: FunctorExpr,
    pub status_h: SeqStatus,
    pub status_g: SeqStatus,
    pub sizes_h: Vec<usize>,
    pub sizes_g: Vec<usize>,
    pub stages: Vec<StageIso>,
    /// Witnesses intertwine the connecting maps of the two sequences.
    pub maps_commute: bool,
    pub adjunction: Option<AdjunctionSweep>,
}

impl MediatorReport {
    /// Every compared stage has a witness and the connecting maps agree.
    pub fn agrees(&self) -> bool {
        !self.stages.is_empty() && self.stages.iter().all(|s| s.iso.is_some()) && self.maps_commute
    }

    pub fn first_disagreement(&self) -> Option<usize> {
        self.stages.iter().find(|s| s.iso.is_none()).map(|s| s.stage)
    }

    pub fn to_json(&self) -> MediatorJson {
        MediatorJson {
            expr_h: self.expr_h.to_string(),
            expr_g: self.expr_g.to_string(),
            backend_h: Backend::PointedStrict,
            backend_g: Backend::Plain,
            status_h: self.status_h,
            status_g: self.status_g,
            sizes_h: self.sizes_h.clone(),
            sizes_g: self.sizes_g.clone(),
            stages: self
                .stages
                .iter()
                .map(|s| StageJson {
                    stage: s.stage,
                    pointed: s.pointed.to_json(),
                    plain: s.plain.to_json(),
                    forward: s.iso.as_ref().map(|i| i.forward.table().to_vec()),
                })
                .collect(),
            maps_commute: self.maps_commute,
            agrees: self.agrees(),
            first_disagreement: self.first_disagreement(),
            adjunction: self.adjunction.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageJson {
    pub stage: usize,
    pub pointed: PosetJson,
    pub plain: PosetJson,
    /// Table of the witness `include(pointed) → plain`.
    pub forward: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediatorJson {
    pub expr_h: String,
    pub expr_g: String,
    pub backend_h: Backend,
    pub backend_g: Backend,
    pub status_h: SeqStatus,
    pub status_g: SeqStatus,
    pub sizes_h: Vec<usize>,
    pub sizes_g: Vec<usize>,
    pub stages: Vec<StageJson>,
    pub maps_commute: bool,
    pub agrees: bool,
    pub first_disagreement: Option<usize>,
    #[serde(default)]
    pub adjunction: Option<AdjunctionSweep>,
}

/// Rebuilds every stored witness and checks it is an order isomorphism.
pub fn verify_mediator_json(j: &MediatorJson) -> Result<()> {
    for s in &j.stages {
        let h = FinPoset::from_json(&s.pointed)?;
        let g = Arc::new(FinPoset::from_json(&s.plain)?);
        let Some(fwd) = &s.forward else { continue };
        let ih = Arc::new(include(&h)?);
        if fwd.len() != ih.len() || fwd.iter().any(|&y| y >= g.len()) {
            return Err(Error::Invalid(format!("witness at stage {} has the wrong shape", s.stage)));
        }
        let mut bwd = vec![usize::MAX; g.len()];
        for (x, &y) in fwd.iter().enumerate() {
            bwd[y] = x;
        }
        if bwd.contains(&usize::MAX) {
            return Err(Error::Invalid(format!("witness at stage {} is not a bijection", s.stage)));
        }
        let forward = MonoMap::new(ih.clone(), g.clone(), fwd.clone(), false)?;
        let backward = MonoMap::new(g, ih, bwd, false)?;
        Iso::new(forward, backward)?;
    }
    let agrees = !j.stages.is_empty() && j.stages.iter().all(|s| s.forward.is_some()) && j.maps_commute;
    if agrees != j.agrees {
        return Err(Error::Invalid("agreement flag disagrees with the stored witnesses".into()));
    }
    Ok(())
}

/// Witness matching elements by id when both sides use the same names,
/// otherwise any order isomorphism.
fn stage_iso(h: &Arc<FinPoset>, g: &Arc<FinPoset>) -> Result<Option<Iso>> {
    if h.len() == g.len() {
        let by_id: Option<Vec<usize>> = h.ids().iter().map(|id| g.index_of(id)).collect();
        if let Some(fwd) = by_id {
            let mut bwd = vec![0; fwd.len()];
            for (x, &y) in fwd.iter().enumerate() {
                bwd[y] = x;
            }
            let built = MonoMap::new(h.clone(), g.clone(), fwd, false)
                .and_then(|f| Ok((f, MonoMap::new(g.clone(), h.clone(), bwd, false)?)))
                .and_then(|(f, b)| Iso::new(f, b));
            if let Ok(iso) = built {
                return Ok(Some(iso));
            }
        }
    }
    find_iso(h, g, DEFAULT_ISO_CAP.max(h.len()))
}

/// Runs the terminal sequence of `expr_h` in the pointed backend and of the
/// same expression in the plain backend, then compares them stage by stage.
/// `expr_h` must be of the form `Lift(..)`.
pub fn solve_lifted(
    expr_h: &FunctorExpr,
    constants: &Constants,
    v: &FinPoset,
    w: &FinPoset,
    inner_budget: usize,
    element_cap: usize,
) -> Result<MediatorReport> {
    if !matches!(expr_h, FunctorExpr::Lift(_)) {
        return Err(Error::BackendMismatch("the lifted comparison expects an outer Lift".into()));
    }
    if expr_h.has_upset() {
        return Err(Error::NotCovariant("upset nodes have no action on plain maps".into()));
    }
    let v = Arc::new(v.clone());
    let w = Arc::new(w.clone());
    let h = FunctorInstance::with_cap(
        expr_h.clone(),
        Backend::PointedStrict,
        v.clone(),
        w.clone(),
        constants.clone(),
        element_cap,
    )?;
    let expr_g = expr_h.clone();
    let g = FunctorInstance::with_cap(
        expr_g.clone(),
        Backend::Plain,
        Arc::new(include(&v).unwrap_or_else(|_| (*v).clone())),
        Arc::new(include(&w).unwrap_or_else(|_| (*w).clone())),
        constants.clone(),
        element_cap,
    )?;
    let (seq_h, seq_g) = std::thread::scope(|s| {
        let a = s.spawn(|| terminal_sequence(&h, inner_budget));
        let b = plain_sequence(&g, inner_budget);
        (a.join().expect("pointed run"), b)
    });
    let (seq_h, seq_g) = (seq_h?, seq_g?);

    let n = seq_h.stages.len().min(seq_g.stages.len());
    let mut stages = Vec::with_capacity(n);
    for k in 0..n {
        let pointed = seq_h.stages[k].clone();
        let plain = seq_g.stages[k].clone();
        let ih = Arc::new(include(&pointed)?);
        stages.push(StageIso { stage: k, iso: stage_iso(&ih, &plain)?, pointed, plain });
    }
    // isoₖ ∘ pₖ = gₖ ∘ isoₖ₊₁ on every pair of adjacent witnessed stages.
    let mut maps_commute = true;
    for k in 0..n.saturating_sub(1) {
        let (Some(a), Some(b)) = (&stages[k].iso, &stages[k + 1].iso) else {
            maps_commute = false;
            break;
        };
        let p = seq_h.eps[k].projection().table();
        let gk = seq_g.maps[k].table();
        let ok = (0..p.len()).all(|x| a.forward.apply(p[x]) == gk[b.forward.apply(x)]);
        maps_commute &= ok;
    }
    Ok(MediatorReport {
        expr_h: expr_h.clone(),
        expr_g,
        status_h: seq_h.status,
        status_g: seq_g.status,
        sizes_h: seq_h.sizes(),
        sizes_g: seq_g.stages.iter().map(|s| s.len()).collect(),
        stages,
        maps_commute,
        adjunction: None,
    })
}

/// [`solve_lifted`] with the default element cap.
pub fn solve_lifted_default(
    expr_h: &FunctorExpr,
    constants: &Constants,
    v: &FinPoset,
    w: &FinPoset,
    inner_budget: usize,
) -> Result<MediatorReport> {
    solve_lifted(expr_h, constants, v, w, inner_budget, DEFAULT_ELEMENT_CAP)
}
