use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-width bitset over element indices.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn new(n: usize) -> Self {
        Bits { words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn is_subset(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite partial order, optionally pointed.
///
/// Finite posets stand in for ω-cpos: every ω-chain stabilizes, so every
/// monotone map is continuous. The order is stored closed, one bitset row per
/// element (`up[x]` holds every `y` with `x <= y`).
#[derive(Clone)]
pub struct FinPoset {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    up: Vec<Bits>,
    down: Vec<Bits>,
    bottom: Option<usize>,
}

impl PartialEq for FinPoset {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.up == other.up && self.bottom == other.bottom
    }
}

impl Eq for FinPoset {}

impl fmt::Debug for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinPoset{{")?;
        for (i, id) in self.ids.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if Some(i) == self.bottom {
                write!(f, "_")?;
            }
            write!(f, "{id}")?;
        }
        let covers = self.hasse();
        write!(f, " | ")?;
        for (a, b) in covers {
            write!(f, "{}<{} ", self.ids[a], self.ids[b])?;
        }
        write!(f, "}}")
    }
}

impl FinPoset {
    /// Validates raw input: closes `pairs` reflexively and transitively and
    /// checks antisymmetry and the declared bottom.
    pub fn new<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)], bottom: Option<&str>) -> Result<Self> {
        let mut index = HashMap::with_capacity(elements.len());
        let mut ids = Vec::with_capacity(elements.len());
        for e in elements {
            let e = e.as_ref().to_string();
            if index.insert(e.clone(), ids.len()).is_some() {
                return Err(Error::DuplicateElement(e));
            }
            ids.push(e);
        }
        let look = |s: &str| index.get(s).copied().ok_or_else(|| Error::UnknownElement(s.to_string()));
        let mut idx_pairs = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            idx_pairs.push((look(a.as_ref())?, look(b.as_ref())?));
        }
        let bottom = bottom.map(look).transpose()?;
        Self::from_generators(ids, &idx_pairs, bottom)
    }

    /// Closure over index pairs, with the same checks as [`FinPoset::new`].
    pub fn from_generators(ids: Vec<String>, pairs: &[(usize, usize)], bottom: Option<usize>) -> Result<Self> {
        let n = ids.len();
        let mut up: Vec<Bits> = (0..n)
            .map(|i| {
                let mut b = Bits::new(n);
                b.insert(i);
                b
            })
            .collect();
        for &(a, b) in pairs {
            up[a].insert(b);
        }
        // Warshall on bitset rows.
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        for i in 0..n {
            for j in up[i].iter() {
                if j != i && up[j].contains(i) {
                    return Err(Error::CycleDetected(ids[i].clone(), ids[j].clone()));
                }
            }
        }
        if let Some(b) = bottom {
            if let Some(x) = (0..n).find(|&x| !up[b].contains(x)) {
                return Err(Error::BottomNotLeast { bottom: ids[b].clone(), element: ids[x].clone() });
            }
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateElement(id.clone()));
            }
        }
        Ok(Self::assemble(ids, index, up, bottom))
    }

    /// Builds from a predicate already known to be a partial order.
    /// Used by the constructions, whose orders are correct by construction.
    pub(crate) fn from_leq_fn(ids: Vec<String>, bottom: Option<usize>, leq: impl Fn(usize, usize) -> bool) -> Self {
        let n = ids.len();
        let up: Vec<Bits> = (0..n)
            .map(|i| {
                let mut b = Bits::new(n);
                for j in 0..n {
                    if leq(i, j) {
                        b.insert(j);
                    }
                }
                b
            })
            .collect();
        Self::from_up_rows(ids, bottom, up)
    }

    pub(crate) fn from_up_rows(ids: Vec<String>, bottom: Option<usize>, up: Vec<Bits>) -> Self {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            let prev = index.insert(id.clone(), i);
            debug_assert!(prev.is_none(), "duplicate constructed id {id}");
        }
        let p = Self::assemble(ids, index, up, bottom);
        debug_assert!(p.check_partial_order().is_ok());
        p
    }

    fn assemble(ids: Vec<String>, index: HashMap<String, usize>, up: Vec<Bits>, bottom: Option<usize>) -> Self {
        let n = ids.len();
        let mut down = vec![Bits::new(n); n];
        for (i, row) in up.iter().enumerate() {
            for j in row.iter() {
                down[j].insert(i);
            }
        }
        FinPoset { ids, index, up, down, bottom }
    }

    fn check_partial_order(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if !self.leq(i, i) {
                return Err(Error::Invalid(format!("not reflexive at {}", self.ids[i])));
            }
            for j in self.up[i].iter() {
                if j != i && self.leq(j, i) {
                    return Err(Error::CycleDetected(self.ids[i].clone(), self.ids[j].clone()));
                }
                if !self.up[j].is_subset(&self.up[i]) {
                    return Err(Error::Invalid("not transitive".into()));
                }
            }
        }
        if let Some(b) = self.bottom {
            if self.up[b].count() != n {
                return Err(Error::Invalid("bottom not least".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// Principal filter of `a`.
    pub fn up_set(&self, a: usize) -> &Bits {
        &self.up[a]
    }

    /// Principal ideal of `a`.
    pub fn down_set(&self, a: usize) -> &Bits {
        &self.down[a]
    }

    pub fn bottom(&self) -> Option<usize> {
        self.bottom
    }

    pub fn is_pointed(&self) -> bool {
        self.bottom.is_some()
    }

    pub(crate) fn require_bottom(&self, what: &str) -> Result<usize> {
        self.bottom.ok_or_else(|| Error::NotPointed(what.to_string()))
    }

    /// Same order with the pointedness flag replaced.
    pub fn with_bottom(&self, bottom: Option<usize>) -> Result<Self> {
        if let Some(b) = bottom {
            if self.up[b].count() != self.len() {
                return Err(Error::BottomNotLeast { bottom: self.ids[b].clone(), element: String::new() });
            }
        }
        let mut p = self.clone();
        p.bottom = bottom;
        Ok(p)
    }

    /// Indices sorted so that every element comes after everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.down[i].count(), i));
        order
    }

    /// Cover relation (transitive reduction of the strict order).
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut edges = Vec::new();
        for a in 0..n {
            let mut strict_up = self.up[a].clone();
            strict_up.remove(a);
            let mut covers = strict_up.clone();
            for z in strict_up.iter() {
                let mut above_z = self.up[z].clone();
                above_z.remove(z);
                covers.difference_with(&above_z);
            }
            edges.extend(covers.iter().map(|b| (a, b)));
        }
        edges
    }

    /// Length of the longest chain ending at each element (minimal elements
    /// have height 0).
    pub fn heights(&self) -> Vec<usize> {
        let mut h = vec![0; self.len()];
        for x in self.linear_extension() {
            h[x] = self.down[x].iter().filter(|&y| y != x).map(|y| h[y] + 1).max().unwrap_or(0);
        }
        h
    }

    pub fn to_json(&self) -> PosetJson {
        PosetJson {
            elements: self.ids.clone(),
            leq: self.hasse().into_iter().map(|(a, b)| (self.ids[a].clone(), self.ids[b].clone())).collect(),
            bottom: self.bottom.map(|b| self.ids[b].clone()),
        }
    }

    pub fn from_json(j: &PosetJson) -> Result<Self> {
        FinPoset::new(&j.elements, &j.leq, j.bottom.as_deref())
    }

    /// Graphviz rendering of the Hasse diagram, bottom drawn lowest.
    pub fn to_dot(&self, name: &str) -> String {
        let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
        let mut out = format!("digraph \"{}\" {{\n  rankdir=BT;\n  node [shape=plaintext];\n", esc(name));
        for (i, id) in self.ids.iter().enumerate() {
            if Some(i) == self.bottom {
                out.push_str(&format!("  \"{}\" [rank=min];\n", esc(id)));
            } else {
                out.push_str(&format!("  \"{}\";\n", esc(id)));
            }
        }
        if let Some(b) = self.bottom {
            out.push_str(&format!("  {{ rank=min; \"{}\"; }}\n", esc(&self.ids[b])));
        }
        for (a, b) in self.hasse() {
            out.push_str(&format!("  \"{}\" -> \"{}\" [dir=none];\n", esc(&self.ids[a]), esc(&self.ids[b])));
        }
        out.push_str("}\n");
        out
    }
}

/// Wire format: `{"elements":[...], "leq":[["a","b"],...], "bottom":"a"|null}`.
/// `leq` may be any generating set; the closure is computed on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    #[serde(default)]
    pub leq: Vec<(String, String)>,
    #[serde(default)]
    pub bottom: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_pointed() {
        let p = FinPoset::new(&["a"], &[], Some("a")).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.bottom(), Some(0));
    }

    #[test]
    fn two_chain_closure() {
        let p = FinPoset::new(&["bot", "a"], &[("bot", "a")], Some("bot")).unwrap();
        assert!(p.leq(0, 1));
        assert!(!p.leq(1, 0));
        assert_eq!(p.hasse(), vec![(0, 1)]);
    }

    #[test]
    fn cycle_rejected() {
        let err = FinPoset::new(&["a", "b"], &[("a", "b"), ("b", "a")], None).unwrap_err();
        assert!(matches!(err, Error::CycleDetected(..)));
    }

    #[test]
    fn long_cycle_rejected() {
        let err = FinPoset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")], None).unwrap_err();
        assert!(matches!(err, Error::CycleDetected(..)));
    }

    #[test]
    fn bottom_must_be_least() {
        let err = FinPoset::new(&["a", "b"], &[], Some("a")).unwrap_err();
        assert!(matches!(err, Error::BottomNotLeast { .. }));
    }

    #[test]
    fn duplicates_rejected() {
        let err = FinPoset::new(&["a", "a"], &[], None).unwrap_err();
        assert_eq!(err, Error::DuplicateElement("a".into()));
    }

    #[test]
    fn transitive_closure_from_generators() {
        let p = FinPoset::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")], Some("a")).unwrap();
        assert!(p.leq(0, 2));
        assert_eq!(p.hasse().len(), 2);
        assert_eq!(p.heights(), vec![0, 1, 2]);
    }

    #[test]
    fn json_round_trip_keeps_order() {
        let p = FinPoset::new(&["x", "y", "z"], &[("x", "y"), ("x", "z")], Some("x")).unwrap();
        let text = serde_json::to_string(&p.to_json()).unwrap();
        let back = FinPoset::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn dot_mentions_every_cover() {
        let p = FinPoset::new(&["x", "y"], &[("x", "y")], Some("x")).unwrap();
        let dot = p.to_dot("p");
        assert!(dot.contains("rankdir=BT"));
        assert!(dot.contains("\"x\" -> \"y\""));
    }

    #[test]
    fn bits_iterate_in_order() {
        let mut b = Bits::new(130);
        for i in [0, 63, 64, 129] {
            b.insert(i);
        }
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 63, 64, 129]);
        assert_eq!(b.count(), 4);
    }
}
