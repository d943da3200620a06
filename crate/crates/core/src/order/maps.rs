use std::sync::Arc;

use crate::error::{Error, Result};
use crate::order::FinPoset;

fn same(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A monotone map between finite posets, given by its table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoMap {
    dom: Arc<FinPoset>,
    cod: Arc<FinPoset>,
    table: Vec<usize>,
    strict: bool,
}

impl MonoMap {
    /// Checks totality, monotonicity, and strictness when `strict` is set.
    pub fn new(dom: Arc<FinPoset>, cod: Arc<FinPoset>, table: Vec<usize>, strict: bool) -> Result<Self> {
        if table.len() != dom.len() {
            return Err(Error::DomainMismatch(format!("table has {} entries for {} elements", table.len(), dom.len())));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= cod.len()) {
            return Err(Error::DomainMismatch(format!("image index {bad} out of range")));
        }
        for x in 0..dom.len() {
            for y in dom.up_set(x).iter() {
                if !cod.leq(table[x], table[y]) {
                    return Err(Error::NotMonotone(format!(
                        "{} <= {} but images are not ordered",
                        dom.id(x),
                        dom.id(y)
                    )));
                }
            }
        }
        if strict {
            let bd = dom.require_bottom("strict map domain")?;
            let bc = cod.require_bottom("strict map codomain")?;
            if table[bd] != bc {
                return Err(Error::NotStrict(format!("bottom sent to {}", cod.id(table[bd]))));
            }
        }
        Ok(MonoMap { dom, cod, table, strict })
    }

    /// Like [`MonoMap::new`] but marks the map strict whenever both ends are
    /// pointed and bottom is preserved.
    pub fn infer(dom: Arc<FinPoset>, cod: Arc<FinPoset>, table: Vec<usize>) -> Result<Self> {
        let strict = match (dom.bottom(), cod.bottom()) {
            (Some(a), Some(b)) => table.get(a) == Some(&b),
            _ => false,
        };
        MonoMap::new(dom, cod, table, strict)
    }

    pub fn identity(p: &Arc<FinPoset>) -> Self {
        MonoMap { dom: p.clone(), cod: p.clone(), table: (0..p.len()).collect(), strict: p.is_pointed() }
    }

    /// The constant map at the codomain's bottom.
    pub fn bottom_map(dom: &Arc<FinPoset>, cod: &Arc<FinPoset>) -> Result<Self> {
        let b = cod.require_bottom("bottom map codomain")?;
        MonoMap::infer(dom.clone(), cod.clone(), vec![b; dom.len()])
    }

    /// The unique map into a one-element poset.
    pub fn to_terminal(dom: &Arc<FinPoset>, one: &Arc<FinPoset>) -> Result<Self> {
        if one.len() != 1 {
            return Err(Error::DomainMismatch("terminal object must have one element".into()));
        }
        MonoMap::infer(dom.clone(), one.clone(), vec![0; dom.len()])
    }

    pub fn dom(&self) -> &Arc<FinPoset> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FinPoset> {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn is_identity(&self) -> bool {
        same(&self.dom, &self.cod) && self.table.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.table.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        for &y in &self.table {
            seen[y] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Pointwise order `self <= other`.
    pub fn below(&self, other: &MonoMap) -> bool {
        self.table.iter().zip(&other.table).all(|(&a, &b)| self.cod.leq(a, b))
    }
}

/// `f ∘ g`: apply `g` first.
pub fn compose(f: &MonoMap, g: &MonoMap) -> Result<MonoMap> {
    if !same(&g.cod, &f.dom) {
        return Err(Error::DomainMismatch("codomain of the inner map differs from domain of the outer map".into()));
    }
    let table = g.table.iter().map(|&y| f.table[y]).collect();
    Ok(MonoMap { dom: g.dom.clone(), cod: f.cod.clone(), table, strict: f.strict && g.strict })
}

pub fn identity(p: &Arc<FinPoset>) -> MonoMap {
    MonoMap::identity(p)
}

/// Both ep laws, checked pointwise: `p∘e = id` and `e∘p <= id`.
pub fn ep_check(e: &MonoMap, p: &MonoMap) -> bool {
    ep_violation(e, p).is_none()
}

fn ep_violation(e: &MonoMap, p: &MonoMap) -> Option<String> {
    if !same(&e.cod, &p.dom) || !same(&e.dom, &p.cod) {
        return Some("embedding and projection do not run between the same objects".into());
    }
    for x in 0..e.dom.len() {
        if p.table[e.table[x]] != x {
            return Some(format!("p(e({})) != {}", e.dom.id(x), e.dom.id(x)));
        }
    }
    for y in 0..e.cod.len() {
        if !e.cod.leq(e.table[p.table[y]], y) {
            return Some(format!("e(p({})) is not below {}", e.cod.id(y), e.cod.id(y)));
        }
    }
    None
}

/// Embedding-projection pair `e ◁ p : X → Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpPair {
    e: MonoMap,
    p: MonoMap,
}

impl EpPair {
    pub fn new(e: MonoMap, p: MonoMap) -> Result<Self> {
        match ep_violation(&e, &p) {
            Some(why) => Err(Error::NotAnEpPair(why)),
            None => Ok(EpPair { e, p }),
        }
    }

    pub fn from_tables(x: &Arc<FinPoset>, y: &Arc<FinPoset>, e: Vec<usize>, p: Vec<usize>) -> Result<Self> {
        let e = MonoMap::infer(x.clone(), y.clone(), e)?;
        let p = MonoMap::infer(y.clone(), x.clone(), p)?;
        EpPair::new(e, p)
    }

    pub fn identity(x: &Arc<FinPoset>) -> Self {
        EpPair { e: MonoMap::identity(x), p: MonoMap::identity(x) }
    }

    /// `⊥ ◁ !` from the one-point poset into a pointed `y`.
    pub fn from_terminal(one: &Arc<FinPoset>, y: &Arc<FinPoset>) -> Result<Self> {
        EpPair::new(MonoMap::bottom_map(one, y)?, MonoMap::to_terminal(y, one)?)
    }

    pub fn embedding(&self) -> &MonoMap {
        &self.e
    }

    pub fn projection(&self) -> &MonoMap {
        &self.p
    }

    pub fn source(&self) -> &Arc<FinPoset> {
        &self.e.dom
    }

    pub fn target(&self) -> &Arc<FinPoset> {
        &self.e.cod
    }

    /// `second ∘ self`.
    pub fn then(&self, second: &EpPair) -> Result<EpPair> {
        let e = compose(&second.e, &self.e)?;
        let p = compose(&self.p, &second.p)?;
        EpPair::new(e, p)
    }

    /// Both composites are identities.
    pub fn is_iso(&self) -> bool {
        self.e.table.len() == self.p.table.len() && (0..self.e.cod.len()).all(|y| self.e.table[self.p.table[y]] == y)
    }

    pub fn to_iso(&self) -> Option<Iso> {
        self.is_iso().then(|| Iso { forward: self.e.clone(), backward: self.p.clone() })
    }

    /// Re-runs the pointwise law check.
    pub fn verify(&self) -> Result<()> {
        match ep_violation(&self.e, &self.p) {
            Some(why) => Err(Error::NotAnEpPair(why)),
            None => Ok(()),
        }
    }
}

/// Order isomorphism with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iso {
    pub forward: MonoMap,
    pub backward: MonoMap,
}

impl Iso {
    pub fn new(forward: MonoMap, backward: MonoMap) -> Result<Self> {
        let iso = Iso { forward, backward };
        iso.verify()?;
        Ok(iso)
    }

    pub fn verify(&self) -> Result<()> {
        let f = &self.forward;
        let b = &self.backward;
        if !same(&f.cod, &b.dom) || !same(&f.dom, &b.cod) {
            return Err(Error::DomainMismatch("iso halves do not match".into()));
        }
        let ok =
            (0..f.dom.len()).all(|x| b.table[f.table[x]] == x) && (0..f.cod.len()).all(|y| f.table[b.table[y]] == y);
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid("composites are not identities".into()))
        }
    }

    pub fn identity(p: &Arc<FinPoset>) -> Self {
        Iso { forward: MonoMap::identity(p), backward: MonoMap::identity(p) }
    }

    pub fn inverse(&self) -> Iso {
        Iso { forward: self.backward.clone(), backward: self.forward.clone() }
    }

    pub fn as_ep(&self) -> EpPair {
        EpPair { e: self.forward.clone(), p: self.backward.clone() }
    }
}
