//! All finite posets of a given size, one per isomorphism class.

use std::collections::HashMap;

use rand::Rng;

use crate::order::iso::iso_check;
use crate::order::poset::Bits;
use crate::order::{lift, FinPoset};

fn element_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// Every naturally labelled order on `0..n` (`i <= j` only if `i <= j` as
/// numbers), as rows of strict-down sets.
fn natural_orders(n: usize) -> Vec<Vec<Bits>> {
    let mut out = Vec::new();
    let mut rows: Vec<Bits> = Vec::new();
    fn go(k: usize, n: usize, rows: &mut Vec<Bits>, out: &mut Vec<Vec<Bits>>) {
        if k == n {
            out.push(rows.clone());
            return;
        }
        for mask in 0u64..(1 << k) {
            let mut down = Bits::new(n);
            for j in 0..k {
                if mask >> j & 1 == 1 {
                    down.insert(j);
                }
            }
            // Down sets must be closed downward.
            if down.iter().all(|j| rows[j].is_subset(&down)) {
                rows.push(down);
                go(k + 1, n, rows, out);
                rows.pop();
            }
        }
    }
    go(0, n, &mut rows, &mut out);
    out
}

fn from_strict_downs(rows: &[Bits]) -> FinPoset {
    let n = rows.len();
    FinPoset::from_leq_fn(element_ids(n), None, |a, b| a == b || rows[b].contains(a))
}

/// Representatives of every isomorphism class of `n`-element posets.
/// Intended for `n <= 6`.
pub fn all_posets(n: usize) -> Vec<FinPoset> {
    let mut reps: Vec<FinPoset> = Vec::new();
    let mut buckets: HashMap<Vec<(usize, usize, usize)>, Vec<usize>> = HashMap::new();
    for rows in natural_orders(n) {
        let p = from_strict_downs(&rows);
        let h = p.heights();
        let mut key: Vec<(usize, usize, usize)> =
            (0..n).map(|x| (h[x], p.up_set(x).count(), p.down_set(x).count())).collect();
        key.sort();
        let bucket = buckets.entry(key).or_default();
        let seen = bucket.iter().any(|&r| iso_check(&reps[r], &p).expect("small posets").is_some());
        if !seen {
            bucket.push(reps.len());
            reps.push(p);
        }
    }
    reps
}

/// Representatives of every isomorphism class of pointed `n`-element posets.
pub fn all_pointed_posets(n: usize) -> Vec<FinPoset> {
    if n == 0 {
        return Vec::new();
    }
    all_posets(n - 1).iter().map(lift).collect()
}

/// A random naturally labelled poset on `n` elements.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> FinPoset {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    FinPoset::from_generators(element_ids(n), &pairs, None).expect("acyclic by construction")
}

/// A random pointed poset: a random poset with a fresh bottom.
pub fn random_pointed_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> FinPoset {
    lift(&random_poset(rng, n.saturating_sub(1), density))
}
