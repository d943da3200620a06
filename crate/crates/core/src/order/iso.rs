use std::sync::Arc;

use crate::error::{Error, Result};
use crate::order::{FinPoset, Iso, MonoMap};

/// Default bound on poset size for isomorphism search.
pub const DEFAULT_ISO_CAP: usize = 512;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct Signature {
    height: usize,
    ups: usize,
    downs: usize,
    upper_covers: usize,
    lower_covers: usize,
}

fn signatures(p: &FinPoset) -> Vec<Signature> {
    let h = p.heights();
    let mut upper = vec![0; p.len()];
    let mut lower = vec![0; p.len()];
    for (a, b) in p.hasse() {
        upper[a] += 1;
        lower[b] += 1;
    }
    (0..p.len())
        .map(|x| Signature {
            height: h[x],
            ups: p.up_set(x).count(),
            downs: p.down_set(x).count(),
            upper_covers: upper[x],
            lower_covers: lower[x],
        })
        .collect()
}

/// Searches for an order isomorphism `p → q`, returning its forward table.
/// Pointedness flags are not compared; an order isomorphism always sends a
/// least element to a least element.
pub fn iso_check(p: &FinPoset, q: &FinPoset) -> Result<Option<Vec<usize>>> {
    iso_check_with(p, q, DEFAULT_ISO_CAP)
}

pub fn iso_check_with(p: &FinPoset, q: &FinPoset, cap: usize) -> Result<Option<Vec<usize>>> {
    let size = p.len().max(q.len());
    if size > cap {
        return Err(Error::SizeCapExceeded { size, cap });
    }
    if p.len() != q.len() {
        return Ok(None);
    }
    let sp = signatures(p);
    let sq = signatures(q);
    let mut a = sp.clone();
    let mut b = sq.clone();
    a.sort();
    b.sort();
    if a != b {
        return Ok(None);
    }
    let order = p.linear_extension();
    let mut map = vec![usize::MAX; p.len()];
    let mut used = vec![false; q.len()];
    fn go(
        t: usize,
        order: &[usize],
        p: &FinPoset,
        q: &FinPoset,
        sp: &[Signature],
        sq: &[Signature],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if t == order.len() {
            return true;
        }
        let x = order[t];
        for y in 0..q.len() {
            if used[y] || sp[x] != sq[y] {
                continue;
            }
            let fits = order[..t].iter().all(|&z| p.leq(z, x) == q.leq(map[z], y) && p.leq(x, z) == q.leq(y, map[z]));
            if !fits {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if go(t + 1, order, p, q, sp, sq, map, used) {
                return true;
            }
            used[y] = false;
        }
        map[x] = usize::MAX;
        false
    }
    Ok(go(0, &order, p, q, &sp, &sq, &mut map, &mut used).then_some(map))
}

/// [`iso_check`] packaged as a verified [`Iso`].
pub fn find_iso(p: &Arc<FinPoset>, q: &Arc<FinPoset>, cap: usize) -> Result<Option<Iso>> {
    let Some(fwd) = iso_check_with(p, q, cap)? else {
        return Ok(None);
    };
    let mut bwd = vec![0; fwd.len()];
    for (x, &y) in fwd.iter().enumerate() {
        bwd[y] = x;
    }
    let forward = MonoMap::infer(p.clone(), q.clone(), fwd)?;
    let backward = MonoMap::infer(q.clone(), p.clone(), bwd)?;
    Ok(Some(Iso::new(forward, backward)?))
}

/// Reference check by trying every bijection. Only for tiny posets.
pub fn iso_brute_force(p: &FinPoset, q: &FinPoset) -> bool {
    if p.len() != q.len() {
        return false;
    }
    let n = p.len();
    let mut perm: Vec<usize> = (0..n).collect();
    fn next_perm(v: &mut [usize]) -> bool {
        let n = v.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        true
    }
    loop {
        if (0..n).all(|a| (0..n).all(|b| p.leq(a, b) == q.leq(perm[a], perm[b]))) {
            return true;
        }
        if !next_perm(&mut perm) {
            return false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{boolean_lattice, chain, discrete, lift, product};

    #[test]
    fn chain_vs_antichain() {
        let c = chain(3);
        let d = discrete(&["a", "b", "c"]).unwrap();
        assert!(iso_check(&c, &d).unwrap().is_none());
        assert!(iso_check(&c, &chain(3)).unwrap().is_some());
    }

    #[test]
    fn diamond_is_product_of_bools() {
        let b = boolean_lattice();
        let d =
            FinPoset::new(&["0", "x", "y", "1"], &[("0", "x"), ("0", "y"), ("x", "1"), ("y", "1")], Some("0")).unwrap();
        let m = iso_check(&product(&b, &b), &d).unwrap().unwrap();
        assert_eq!(m[0], 0);
        assert_eq!(m[3], 3);
    }

    #[test]
    fn cap_reported() {
        let c = chain(10);
        assert_eq!(iso_check_with(&c, &c, 9), Err(Error::SizeCapExceeded { size: 10, cap: 9 }));
    }

    #[test]
    fn same_signature_not_iso() {
        // Two posets of 6 elements: a lifted antichain of five, versus chains.
        let a = lift(&discrete(&["a", "b", "c", "d", "e"]).unwrap());
        let b = chain(6);
        assert!(iso_check(&a, &b).unwrap().is_none());
        assert!(!iso_brute_force(&a, &b));
    }

    #[test]
    fn witness_is_verified_iso() {
        let p = Arc::new(product(&chain(2), &chain(3)));
        let q = Arc::new(product(&chain(3), &chain(2)));
        let iso = find_iso(&p, &q, DEFAULT_ISO_CAP).unwrap().unwrap();
        iso.verify().unwrap();
    }
}
