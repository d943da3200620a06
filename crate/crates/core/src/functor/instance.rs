use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functor::action::{act, Arrow};
use crate::functor::expr::{Constants, FunctorExpr};
use crate::functor::object::{check_admissible, eval, Env, Mode, Obj};
use crate::functor::rel::lift_relation;
use crate::order::{EpPair, FinPoset, MonoMap};
use crate::relation::Relation;

/// Default bound on the size of any constructed poset.
pub const DEFAULT_ELEMENT_CAP: usize = 512;

/// Which category the instance lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Pointed posets and strict maps; sums are coalesced.
    PointedStrict,
    /// All finite posets and monotone maps; sums are separated.
    Plain,
}

impl Backend {
    fn mode(self) -> Mode {
        match self {
            Backend::PointedStrict => Mode::Pointed,
            Backend::Plain => Mode::Plain,
        }
    }
}

/// `F(V, W)` with its parameters fixed: an endofunctor on finite posets.
pub struct FunctorInstance {
    expr: FunctorExpr,
    backend: Backend,
    v: Arc<FinPoset>,
    w: Arc<FinPoset>,
    constants: Constants,
    cap: usize,
    memo: Mutex<Vec<(Arc<FinPoset>, Arc<Obj>)>>,
}

impl std::fmt::Debug for FunctorInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctorInstance")
            .field("expr", &self.expr.to_string())
            .field("backend", &self.backend)
            .field("v", &self.v.len())
            .field("w", &self.w.len())
            .finish()
    }
}

impl FunctorInstance {
    pub fn new(
        expr: FunctorExpr,
        backend: Backend,
        v: Arc<FinPoset>,
        w: Arc<FinPoset>,
        constants: Constants,
    ) -> Result<Self> {
        Self::with_cap(expr, backend, v, w, constants, DEFAULT_ELEMENT_CAP)
    }

    pub fn with_cap(
        expr: FunctorExpr,
        backend: Backend,
        v: Arc<FinPoset>,
        w: Arc<FinPoset>,
        constants: Constants,
        cap: usize,
    ) -> Result<Self> {
        if backend == Backend::PointedStrict && expr.mentions_v() && !v.is_pointed() {
            return Err(Error::NotPointed("parameter V in the pointed backend".into()));
        }
        {
            let env = Env { v: &v, w: &w, constants: &constants, cap };
            check_admissible(&expr, backend.mode(), &env)?;
        }
        Ok(FunctorInstance { expr, backend, v, w, constants, cap, memo: Mutex::new(Vec::new()) })
    }

    /// Same family at other parameters.
    pub fn reinstantiate(&self, v: Arc<FinPoset>, w: Arc<FinPoset>) -> Result<Self> {
        Self::with_cap(self.expr.clone(), self.backend, v, w, self.constants.clone(), self.cap)
    }

    pub fn expr(&self) -> &FunctorExpr {
        &self.expr
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn v(&self) -> &Arc<FinPoset> {
        &self.v
    }

    pub fn w(&self) -> &Arc<FinPoset> {
        &self.w
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Same expression, backend, constants and parameters.
    pub fn same_as(&self, other: &FunctorInstance) -> bool {
        self.expr == other.expr
            && self.backend == other.backend
            && *self.v == *other.v
            && *self.w == *other.w
            && self.constants.names().eq(other.constants.names())
    }

    /// `F(x)` with its construction tree. Results are memoised.
    pub fn on_object(&self, x: &Arc<FinPoset>) -> Result<Arc<Obj>> {
        if self.backend == Backend::PointedStrict && !x.is_pointed() {
            return Err(Error::NotPointed("state object in the pointed backend".into()));
        }
        {
            let memo = self.memo.lock().expect("memo lock");
            if let Some((_, o)) = memo.iter().find(|(k, _)| Arc::ptr_eq(k, x) || **k == **x) {
                return Ok(o.clone());
            }
        }
        let env = Env { v: &self.v, w: &self.w, constants: &self.constants, cap: self.cap };
        let obj = eval(&self.expr, self.backend.mode(), &env, x)?;
        let mut memo = self.memo.lock().expect("memo lock");
        if let Some((_, o)) = memo.iter().find(|(k, _)| **k == **x) {
            return Ok(o.clone());
        }
        memo.push((x.clone(), obj.clone()));
        Ok(obj)
    }

    pub fn apply(&self, x: &Arc<FinPoset>) -> Result<Arc<FinPoset>> {
        Ok(self.on_object(x)?.poset.clone())
    }

    /// `F(e ◁ p)`: an ep-pair `F(X) → F(Y)`, laws re-verified.
    pub fn on_ep(&self, ep: &EpPair) -> Result<EpPair> {
        act_ep(self, self, ep, None)
    }

    /// `F(f)` for the fragment without upsets. Function spaces over `V` act
    /// by postcomposition.
    pub fn on_map(&self, f: &MonoMap) -> Result<MonoMap> {
        if self.expr.has_upset() {
            return Err(Error::NotCovariant("upset nodes have no action on plain maps".into()));
        }
        let src = self.on_object(f.dom())?;
        let dst = self.on_object(f.cod())?;
        let a = act(&src, &dst, &Arrow::forward(f.table().to_vec()), None)?;
        let m = MonoMap::infer(src.poset.clone(), dst.poset.clone(), a.fwd)?;
        if self.backend == Backend::PointedStrict && f.is_strict() && !m.is_strict() {
            return Err(Error::NotStrict("image of a strict map".into()));
        }
        Ok(m)
    }

    /// Lifts `r ⊆ X × Y` to `F(X) × F(Y)`. `v_rel` and `w_rel` relate the
    /// parameter carriers (identity when absent).
    pub fn rel_lift(
        &self,
        x: &Arc<FinPoset>,
        y: &Arc<FinPoset>,
        r: &Relation,
        v_rel: Option<&Relation>,
        w_rel: Option<&Relation>,
    ) -> Result<Relation> {
        let fx = self.on_object(x)?;
        let fy = self.on_object(y)?;
        lift_relation(&fx, &fy, r, v_rel, w_rel)
    }
}

/// The mixed action `F(Z,Z)(X) → F(Z',Z')(Y)` of a state ep `X → Y` and a
/// parameter ep `Z → Z'` (identity when `None`). `src` and `dst` must be
/// one family instantiated at `V = W = Z` and `V = W = Z'`.
pub fn act_ep(src: &FunctorInstance, dst: &FunctorInstance, state: &EpPair, param: Option<&EpPair>) -> Result<EpPair> {
    if src.expr != dst.expr || src.backend != dst.backend {
        return Err(Error::InstanceMismatch);
    }
    match param {
        Some(pe) => {
            let fits = |a: &FinPoset, b: &FinPoset| *a == *b;
            if !fits(pe.source(), &src.v)
                || !fits(pe.source(), &src.w)
                || !fits(pe.target(), &dst.v)
                || !fits(pe.target(), &dst.w)
            {
                return Err(Error::DomainMismatch("parameter ep does not run between the instance parameters".into()));
            }
        }
        None => {
            if !(*src.v == *dst.v && *src.w == *dst.w) {
                return Err(Error::DomainMismatch("instances differ in parameters".into()));
            }
        }
    }
    let fx = src.on_object(state.source())?;
    let fy = dst.on_object(state.target())?;
    let sa = Arrow { fwd: state.embedding().table().to_vec(), bwd: Some(state.projection().table().to_vec()) };
    let pa = param.map(|p| Arrow { fwd: p.embedding().table().to_vec(), bwd: Some(p.projection().table().to_vec()) });
    let a = act(&fx, &fy, &sa, pa.as_ref())?;
    let bwd = a.bwd.ok_or_else(|| Error::Invalid("ep action lost its projection".into()))?;
    EpPair::from_tables(&fx.poset, &fy.poset, a.fwd, bwd)
}

/// Component at `p` of the transformation `F(Z,Z) ⇒ F(Z',Z')` induced by a
/// parameter ep `Z → Z'`.
pub fn reindex_ep(src: &FunctorInstance, dst: &FunctorInstance, param: &EpPair, p: &Arc<FinPoset>) -> Result<EpPair> {
    act_ep(src, dst, &EpPair::identity(p), Some(param))
}
