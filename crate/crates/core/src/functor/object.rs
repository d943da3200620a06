use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functor::expr::{Constants, Dom, FunctorExpr};
use crate::order::{
    coalesced_sum_space, fun_space_with, lift, product, separated_sum_space, upsets_with, FinPoset, SumTag,
};

/// What an opaque leaf stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafKind {
    Const,
    State,
    Param,
}

/// How an object was built; the element layout of each node is the one
/// documented on the corresponding construction.
#[derive(Clone, Debug)]
pub enum Node {
    Leaf(LeafKind),
    Sum {
        left: Arc<Obj>,
        right: Arc<Obj>,
        inl: Vec<usize>,
        inr: Vec<usize>,
        tags: Vec<SumTag>,
        coalesced: bool,
    },
    Prod {
        left: Arc<Obj>,
        right: Arc<Obj>,
    },
    Lift(Arc<Obj>),
    Fun {
        dom: Arc<FinPoset>,
        dom_is_v: bool,
        cod: Arc<Obj>,
        tables: Vec<Vec<usize>>,
        index: HashMap<Vec<usize>, usize>,
        strict: bool,
    },
    Upset {
        inner: Arc<Obj>,
        sets: Vec<Vec<usize>>,
        index: HashMap<Vec<usize>, usize>,
        strict: bool,
    },
}

/// A poset produced by a functor, together with its construction tree.
#[derive(Clone, Debug)]
pub struct Obj {
    pub poset: Arc<FinPoset>,
    pub node: Node,
}

impl Obj {
    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }
}

/// Sums are coalesced in pointed mode. Under `Lift` the interior is built in
/// plain mode, so the lifted bottom is the only one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    Pointed,
    Plain,
}

pub(crate) struct Env<'a> {
    pub v: &'a Arc<FinPoset>,
    pub w: &'a Arc<FinPoset>,
    pub constants: &'a Constants,
    pub cap: usize,
}

fn check_size(size: Option<usize>, cap: usize) -> Result<()> {
    match size {
        Some(n) if n <= cap => Ok(()),
        _ => Err(Error::ElementCapExceeded(cap)),
    }
}

/// Static admissibility of `expr` in `mode`, including pointedness of
/// constants and parameters where pointed mode needs it.
pub(crate) fn check_admissible(expr: &FunctorExpr, mode: Mode, env: &Env<'_>) -> Result<()> {
    match expr {
        FunctorExpr::Const(n) => {
            let p = env.constants.get(n)?;
            if mode == Mode::Pointed && !p.is_pointed() {
                return Err(Error::NotPointed(format!("constant {n} is used outside Lift in the pointed backend")));
            }
            Ok(())
        }
        FunctorExpr::Id => Ok(()),
        FunctorExpr::W => {
            if mode == Mode::Pointed && !env.w.is_pointed() {
                return Err(Error::NotPointed("parameter W".into()));
            }
            Ok(())
        }
        FunctorExpr::Sum(l, r) | FunctorExpr::Prod(l, r) => {
            check_admissible(l, mode, env)?;
            check_admissible(r, mode, env)
        }
        FunctorExpr::Lift(e) => check_admissible(e, Mode::Plain, env),
        FunctorExpr::Fun { dom, cod, strict } => {
            if *strict {
                if mode == Mode::Plain {
                    return Err(Error::BackendMismatch("strict function space outside the pointed backend".into()));
                }
                let d = match dom {
                    Dom::V => env.v,
                    Dom::Const(n) => env.constants.get(n)?,
                };
                if !d.is_pointed() {
                    return Err(Error::NotPointed("domain of a strict function space".into()));
                }
            } else if let Dom::Const(n) = dom {
                env.constants.get(n)?;
            }
            check_admissible(cod, mode, env)
        }
        FunctorExpr::Upset { inner, strict } => {
            if *strict && mode == Mode::Plain {
                return Err(Error::BackendMismatch("strict upsets outside the pointed backend".into()));
            }
            check_admissible(inner, mode, env)
        }
    }
}

/// Structural evaluation of `expr` at state object `x`.
pub(crate) fn eval(expr: &FunctorExpr, mode: Mode, env: &Env<'_>, x: &Arc<FinPoset>) -> Result<Arc<Obj>> {
    let cap = env.cap;
    let obj = match expr {
        FunctorExpr::Const(n) => {
            let p = env.constants.get(n)?.clone();
            check_size(Some(p.len()), cap)?;
            Obj { poset: p, node: Node::Leaf(LeafKind::Const) }
        }
        FunctorExpr::Id => {
            check_size(Some(x.len()), cap)?;
            Obj { poset: x.clone(), node: Node::Leaf(LeafKind::State) }
        }
        FunctorExpr::W => {
            check_size(Some(env.w.len()), cap)?;
            Obj { poset: env.w.clone(), node: Node::Leaf(LeafKind::Param) }
        }
        FunctorExpr::Sum(l, r) => {
            let left = eval(l, mode, env, x)?;
            let right = eval(r, mode, env, x)?;
            let space = match mode {
                Mode::Pointed => {
                    check_size((left.len() + right.len()).checked_sub(1), cap)?;
                    coalesced_sum_space(&left.poset, &right.poset)?
                }
                Mode::Plain => {
                    check_size(Some(left.len() + right.len()), cap)?;
                    separated_sum_space(&left.poset, &right.poset)
                }
            };
            Obj {
                poset: Arc::new(space.poset),
                node: Node::Sum {
                    left,
                    right,
                    inl: space.inl,
                    inr: space.inr,
                    tags: space.tags,
                    coalesced: space.coalesced,
                },
            }
        }
        FunctorExpr::Prod(l, r) => {
            let left = eval(l, mode, env, x)?;
            let right = eval(r, mode, env, x)?;
            check_size(left.len().checked_mul(right.len()), cap)?;
            Obj { poset: Arc::new(product(&left.poset, &right.poset)), node: Node::Prod { left, right } }
        }
        FunctorExpr::Lift(e) => {
            let inner = eval(e, Mode::Plain, env, x)?;
            check_size(Some(inner.len() + 1), cap)?;
            Obj { poset: Arc::new(lift(&inner.poset)), node: Node::Lift(inner) }
        }
        FunctorExpr::Fun { dom, cod, strict } => {
            let (d, dom_is_v) = match dom {
                Dom::V => (env.v.clone(), true),
                Dom::Const(n) => (env.constants.get(n)?.clone(), false),
            };
            let cod = eval(cod, mode, env, x)?;
            let space = fun_space_with(&d, &cod.poset, *strict, cap)?;
            Obj {
                poset: Arc::new(space.poset),
                node: Node::Fun { dom: d, dom_is_v, cod, tables: space.tables, index: space.index, strict: *strict },
            }
        }
        FunctorExpr::Upset { inner, strict } => {
            let inner = eval(inner, mode, env, x)?;
            let space = upsets_with(&inner.poset, *strict, cap)?;
            Obj {
                poset: Arc::new(space.poset),
                node: Node::Upset { inner, sets: space.sets, index: space.index, strict: *strict },
            }
        }
    };
    Ok(Arc::new(obj))
}
