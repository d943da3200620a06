use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{Bits, FinPoset};

/// A binary relation between two finite carriers, stored as one bitset row
/// per left element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    right: usize,
    rows: Vec<Bits>,
}

impl std::fmt::Debug for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

impl Relation {
    pub fn empty(left: usize, right: usize) -> Self {
        Relation { right, rows: vec![Bits::new(right); left] }
    }

    pub fn full(left: usize, right: usize) -> Self {
        Relation { right, rows: vec![Bits::full(right); left] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Relation::empty(n, n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs(left: usize, right: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::empty(left, right);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    /// Pairs `(a, b)` with `f(a) == g(b)`: the kernel pair when `f == g`.
    pub fn kernel_of(f: &[usize], g: &[usize]) -> Self {
        let mut r = Relation::empty(f.len(), g.len());
        for (a, &fa) in f.iter().enumerate() {
            for (b, &gb) in g.iter().enumerate() {
                if fa == gb {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    /// The relation whose bits are given by `pred`.
    pub fn from_fn(left: usize, right: usize, pred: impl Fn(usize, usize) -> bool) -> Self {
        let mut r = Relation::empty(left, right);
        for a in 0..left {
            for b in 0..right {
                if pred(a, b) {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    pub fn left_len(&self) -> usize {
        self.rows.len()
    }

    pub fn right_len(&self) -> usize {
        self.right
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.rows[a].remove(b);
    }

    pub fn row(&self, a: usize) -> &Bits {
        &self.rows[a]
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Bits::count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.rows.iter().enumerate().flat_map(|(a, row)| row.iter().map(move |b| (a, b))).collect()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let mut r = self.clone();
        for (a, b) in r.rows.iter_mut().zip(&other.rows) {
            a.union_with(b);
        }
        r
    }

    pub fn transpose(&self) -> Relation {
        let mut t = Relation::empty(self.right, self.rows.len());
        for (a, b) in self.pairs() {
            t.insert(b, a);
        }
        t
    }

    pub fn is_reflexive(&self) -> bool {
        self.rows.len() == self.right && (0..self.right).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows.len() == self.right && self.pairs().into_iter().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs().into_iter().all(|(a, b)| self.rows[b].is_subset(&self.rows[a]))
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// Blocks of an equivalence, each sorted, ordered by least member.
    pub fn classes(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_equivalence() {
            return Err(Error::NotEquivalence("relation is not reflexive, symmetric and transitive".into()));
        }
        let mut seen = vec![false; self.right];
        let mut out = Vec::new();
        for a in 0..self.right {
            if !seen[a] {
                let block: Vec<usize> = self.rows[a].iter().collect();
                for &b in &block {
                    seen[b] = true;
                }
                out.push(block);
            }
        }
        Ok(out)
    }

    /// Class index of each element of an equivalence.
    pub fn class_map(&self) -> Result<Vec<usize>> {
        let mut map = vec![0; self.right];
        for (k, block) in self.classes()?.iter().enumerate() {
            for &x in block {
                map[x] = k;
            }
        }
        Ok(map)
    }

    /// Equivalence with the given blocks over `n` elements.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Relation> {
        let mut seen = vec![false; n];
        let mut r = Relation::empty(n, n);
        for block in blocks {
            for &a in block {
                if a >= n || std::mem::replace(&mut seen[a], true) {
                    return Err(Error::NotEquivalence("blocks overlap or leave the carrier".into()));
                }
                for &b in block {
                    r.insert(a, b);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::NotEquivalence("blocks do not cover the carrier".into()));
        }
        Ok(r)
    }

    pub fn to_json(&self, left: &FinPoset, right: &FinPoset) -> RelationJson {
        RelationJson {
            pairs: self.pairs().into_iter().map(|(a, b)| (left.id(a).to_string(), right.id(b).to_string())).collect(),
        }
    }

    pub fn from_json(j: &RelationJson, left: &FinPoset, right: &FinPoset) -> Result<Relation> {
        let mut r = Relation::empty(left.len(), right.len());
        for (a, b) in &j.pairs {
            let ia = left.index_of(a).ok_or_else(|| Error::UnknownElement(a.clone()))?;
            let ib = right.index_of(b).ok_or_else(|| Error::UnknownElement(b.clone()))?;
            r.insert(ia, ib);
        }
        Ok(r)
    }
}

/// Wire format for relations: `{"pairs": [["x","y"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationJson {
    pub pairs: Vec<(String, String)>,
}

/// Wire format for equivalences: `{"blocks": [["p","q"], ["r"]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceJson {
    pub blocks: Vec<Vec<String>>,
}

impl EquivalenceJson {
    pub fn resolve(&self, carrier: &FinPoset) -> Result<Relation> {
        let mut blocks = Vec::new();
        for b in &self.blocks {
            let mut idx = Vec::new();
            for name in b {
                idx.push(carrier.index_of(name).ok_or_else(|| Error::UnknownElement(name.clone()))?);
            }
            blocks.push(idx);
        }
        Relation::from_blocks(carrier.len(), &blocks)
    }

    pub fn from_relation(r: &Relation, carrier: &FinPoset) -> Result<Self> {
        Ok(EquivalenceJson {
            blocks: r.classes()?.iter().map(|b| b.iter().map(|&i| carrier.id(i).to_string()).collect()).collect(),
        })
    }
}
