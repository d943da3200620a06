use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functor::{Backend, FunctorInstance};
use crate::order::{one, EpPair, FinPoset, MonoMap};

/// Why a sequence stopped before stabilizing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    Budget,
    ElementCap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqStatus {
    /// The connecting ep out of this stage is an isomorphism.
    Stabilized(usize),
    Truncated(Truncation),
}

/// `1 ← F1 ← F²1 ← …` with the ep-pairs `Xₙ → Xₙ₊₁` running upwards.
#[derive(Clone, Debug)]
pub struct TerminalSequence {
    pub stages: Vec<Arc<FinPoset>>,
    pub eps: Vec<EpPair>,
    pub status: SeqStatus,
}

impl TerminalSequence {
    pub fn is_stabilized(&self) -> bool {
        matches!(self.status, SeqStatus::Stabilized(_))
    }

    /// Stage carrying the final coalgebra, or the last approximant.
    pub fn carrier_stage(&self) -> usize {
        match self.status {
            SeqStatus::Stabilized(n) => n,
            SeqStatus::Truncated(_) => self.stages.len() - 1,
        }
    }

    pub fn carrier(&self) -> &Arc<FinPoset> {
        &self.stages[self.carrier_stage()]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.len()).collect()
    }

    /// Appends `F` of the last ep, returning `false` if the element cap
    /// is hit.
    pub(crate) fn extend(&mut self, inst: &FunctorInstance) -> Result<bool> {
        let last = self.eps.last().expect("sequences start with one ep");
        match inst.on_ep(last) {
            Ok(ep) => {
                self.stages.push(ep.target().clone());
                self.eps.push(ep);
                Ok(true)
            }
            Err(Error::ElementCapExceeded(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// An ep-pair is an isomorphism exactly when the embedding is onto.
pub(crate) fn ep_is_iso(ep: &EpPair) -> bool {
    ep.source().len() == ep.target().len() && ep.is_iso()
}

/// Monotone bijection that also reflects the order.
pub(crate) fn is_order_iso(m: &MonoMap) -> bool {
    let (d, c) = (m.dom(), m.cod());
    d.len() == c.len()
        && m.is_injective()
        && (0..d.len()).all(|x| (0..d.len()).all(|y| !c.leq(m.apply(x), m.apply(y)) || d.leq(x, y)))
}

/// Unfolds the terminal sequence of a pointed instance at most
/// `inner_budget` times.
pub fn terminal_sequence(inst: &FunctorInstance, inner_budget: usize) -> Result<TerminalSequence> {
    if inst.backend() != Backend::PointedStrict {
        return Err(Error::BackendMismatch("ep-chains need the pointed backend".into()));
    }
    let x0 = Arc::new(one());
    let x1 = match inst.apply(&x0) {
        Ok(x) => x,
        Err(Error::ElementCapExceeded(_)) => {
            return Ok(TerminalSequence {
                stages: vec![x0],
                eps: Vec::new(),
                status: SeqStatus::Truncated(Truncation::ElementCap),
            })
        }
        Err(e) => return Err(e),
    };
    let ep0 = EpPair::from_terminal(&x0, &x1)?;
    let mut seq =
        TerminalSequence { stages: vec![x0, x1], eps: vec![ep0], status: SeqStatus::Truncated(Truncation::Budget) };
    loop {
        let k = seq.eps.len() - 1;
        if ep_is_iso(&seq.eps[k]) {
            seq.status = SeqStatus::Stabilized(k);
            return Ok(seq);
        }
        if seq.eps.len() >= inner_budget.max(1) {
            seq.status = SeqStatus::Truncated(Truncation::Budget);
            return Ok(seq);
        }
        if !seq.extend(inst)? {
            seq.status = SeqStatus::Truncated(Truncation::ElementCap);
            return Ok(seq);
        }
    }
}

/// Terminal sequence with plain connecting maps `Xₙ₊₁ → Xₙ`, for backends
/// without bottoms.
#[derive(Clone, Debug)]
pub struct PlainSequence {
    pub stages: Vec<Arc<FinPoset>>,
    /// `maps[k]: X_{k+1} → X_k`.
    pub maps: Vec<MonoMap>,
    pub status: SeqStatus,
}

pub fn plain_sequence(inst: &FunctorInstance, inner_budget: usize) -> Result<PlainSequence> {
    let x0 = Arc::new(one());
    let mut seq =
        PlainSequence { stages: vec![x0.clone()], maps: Vec::new(), status: SeqStatus::Truncated(Truncation::Budget) };
    let x1 = match inst.apply(&x0) {
        Ok(x) => x,
        Err(Error::ElementCapExceeded(_)) => {
            seq.status = SeqStatus::Truncated(Truncation::ElementCap);
            return Ok(seq);
        }
        Err(e) => return Err(e),
    };
    seq.maps.push(MonoMap::to_terminal(&x1, &x0)?);
    seq.stages.push(x1);
    loop {
        let k = seq.maps.len() - 1;
        let m = &seq.maps[k];
        if is_order_iso(m) {
            seq.status = SeqStatus::Stabilized(k);
            return Ok(seq);
        }
        if seq.maps.len() >= inner_budget.max(1) {
            return Ok(seq);
        }
        match inst.on_map(&seq.maps[k]) {
            Ok(next) => {
                seq.stages.push(next.dom().clone());
                seq.maps.push(next);
            }
            Err(Error::ElementCapExceeded(_)) => {
                seq.status = SeqStatus::Truncated(Truncation::ElementCap);
                return Ok(seq);
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{parse, Constants};
    use crate::order::{chain, iso_check};

    fn run(text: &str, budget: usize) -> TerminalSequence {
        let c = Constants::new();
        let e = parse(text, &c).unwrap();
        let inst = FunctorInstance::new(e, Backend::PointedStrict, Arc::new(one()), Arc::new(one()), c).unwrap();
        terminal_sequence(&inst, budget).unwrap()
    }

    #[test]
    fn identity_stabilizes_at_zero() {
        let s = run("Id", 8);
        assert_eq!(s.status, SeqStatus::Stabilized(0));
        assert_eq!(s.carrier().len(), 1);
    }

    #[test]
    fn strict_upsets_stabilize_at_zero() {
        let s = run("Us(Id)", 8);
        assert_eq!(s.status, SeqStatus::Stabilized(0));
        assert_eq!(s.carrier().len(), 1);
    }

    #[test]
    fn upsets_grow_as_chains() {
        let s = run("U(Id)", 8);
        assert_eq!(s.status, SeqStatus::Truncated(Truncation::Budget));
        assert_eq!(s.stages.len(), 9);
        for (n, x) in s.stages.iter().enumerate() {
            assert!(iso_check(x, &chain(n + 1)).unwrap().is_some());
        }
        for ep in &s.eps {
            ep.verify().unwrap();
        }
    }

    #[test]
    fn plain_lift_counts_up() {
        let c = Constants::new();
        let e = parse("Lift(Id)", &c).unwrap();
        let inst = FunctorInstance::new(e, Backend::Plain, Arc::new(one()), Arc::new(one()), c).unwrap();
        let s = plain_sequence(&inst, 4).unwrap();
        assert_eq!(s.stages.iter().map(|x| x.len()).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
    }
}
