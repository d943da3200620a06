use crate::error::{Error, Result};
use crate::functor::object::{LeafKind, Node, Obj};
use crate::order::SumTag;

/// A map between the carriers of two objects, optionally with a partner
/// going back (the projection of an ep-pair).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub fwd: Vec<usize>,
    pub bwd: Option<Vec<usize>>,
}

impl Arrow {
    pub fn identity(n: usize) -> Self {
        let t: Vec<usize> = (0..n).collect();
        Arrow { fwd: t.clone(), bwd: Some(t) }
    }

    pub fn forward(fwd: Vec<usize>) -> Self {
        Arrow { fwd, bwd: None }
    }
}

fn not_covariant() -> Error {
    Error::NotCovariant("upsets act only on embedding-projection pairs".into())
}

/// Action on `src → dst` (objects built from one expression), given the
/// state arrow and the parameter arrow (identity when `None`). The parameter
/// acts on `W` leaves covariantly and on `V` domains by precomposition with
/// its partner, so the result carries a backward table only when the state
/// arrow does.
pub(crate) fn act(src: &Obj, dst: &Obj, state: &Arrow, param: Option<&Arrow>) -> Result<Arrow> {
    match (&src.node, &dst.node) {
        (Node::Leaf(LeafKind::Const), Node::Leaf(LeafKind::Const)) => Ok(Arrow::identity(src.len())),
        (Node::Leaf(LeafKind::State), Node::Leaf(LeafKind::State)) => Ok(state.clone()),
        (Node::Leaf(LeafKind::Param), Node::Leaf(LeafKind::Param)) => match param {
            Some(a) => Ok(Arrow { fwd: a.fwd.clone(), bwd: state.bwd.as_ref().and(a.bwd.clone()) }),
            None => {
                let mut id = Arrow::identity(src.len());
                if state.bwd.is_none() {
                    id.bwd = None;
                }
                Ok(id)
            }
        },
        (
            Node::Sum { left: sl, right: sr, tags: st, coalesced, .. },
            Node::Sum { left: dl, right: dr, inl: dinl, inr: dinr, tags: dt, .. },
        ) => {
            let l = act(sl, dl, state, param)?;
            let r = act(sr, dr, state, param)?;
            if *coalesced {
                let strict = |a: &Arrow, s: &Obj, d: &Obj| {
                    let (bs, bd) = (s.poset.bottom(), d.poset.bottom());
                    let ok = bs.map(|b| Some(a.fwd[b]) == bd).unwrap_or(false)
                        && a.bwd.as_ref().map(|t| bd.map(|b| Some(t[b]) == bs).unwrap_or(false)).unwrap_or(true);
                    if ok {
                        Ok(())
                    } else {
                        Err(Error::NotStrict("a coalesced sum needs strict component maps".into()))
                    }
                };
                strict(&l, sl, dl)?;
                strict(&r, sr, dr)?;
            }
            let map = |tags: &[SumTag], inl: &[usize], inr: &[usize], lt: &[usize], rt: &[usize]| -> Vec<usize> {
                tags.iter()
                    .map(|t| match *t {
                        SumTag::Bottom => 0,
                        SumTag::Left(a) => inl[lt[a]],
                        SumTag::Right(b) => inr[rt[b]],
                    })
                    .collect()
            };
            let fwd = map(st, dinl, dinr, &l.fwd, &r.fwd);
            let bwd = match (&l.bwd, &r.bwd) {
                (Some(lb), Some(rb)) => {
                    let Node::Sum { inl: sinl, inr: sinr, .. } = &src.node else { unreachable!() };
                    Some(map(dt, sinl, sinr, lb, rb))
                }
                _ => None,
            };
            Ok(Arrow { fwd, bwd })
        }
        (Node::Prod { left: sl, right: sr }, Node::Prod { left: dl, right: dr }) => {
            let l = act(sl, dl, state, param)?;
            let r = act(sr, dr, state, param)?;
            let (ms, md) = (sr.len(), dr.len());
            let fwd = (0..src.len()).map(|k| l.fwd[k / ms] * md + r.fwd[k % ms]).collect();
            let bwd = match (&l.bwd, &r.bwd) {
                (Some(lb), Some(rb)) => Some((0..dst.len()).map(|k| lb[k / md] * ms + rb[k % md]).collect()),
                _ => None,
            };
            Ok(Arrow { fwd, bwd })
        }
        (Node::Lift(si), Node::Lift(di)) => {
            let a = act(si, di, state, param)?;
            let lifted = |t: &[usize]| -> Vec<usize> { std::iter::once(0).chain(t.iter().map(|&y| y + 1)).collect() };
            Ok(Arrow { fwd: lifted(&a.fwd), bwd: a.bwd.as_deref().map(lifted) })
        }
        (
            Node::Fun { dom: sdom, dom_is_v, cod: scod, tables: stables, index: sindex, .. },
            Node::Fun { dom: ddom, cod: dcod, tables: dtables, index: dindex, .. },
        ) => {
            let g = act(scod, dcod, state, param)?;
            // Reindexing tables along the domain: (d_in, d_out) with
            // d_in: dst dom → src dom used forwards, d_out: src dom → dst dom
            // used backwards.
            let (d_in, d_out): (Vec<usize>, Option<Vec<usize>>) = match (dom_is_v, param) {
                (true, Some(a)) => {
                    let back = a
                        .bwd
                        .clone()
                        .ok_or_else(|| Error::NotCovariant("a map that is not an ep-pair cannot act on V".into()))?;
                    (back, Some(a.fwd.clone()))
                }
                _ => {
                    if sdom.len() != ddom.len() {
                        return Err(Error::DomainMismatch("function domains differ".into()));
                    }
                    ((0..ddom.len()).collect(), Some((0..sdom.len()).collect()))
                }
            };
            let lookup = |index: &std::collections::HashMap<Vec<usize>, usize>, t: Vec<usize>| {
                index
                    .get(&t)
                    .copied()
                    .ok_or_else(|| Error::NotStrict("image table falls outside the function space".into()))
            };
            let mut fwd = Vec::with_capacity(stables.len());
            for t in stables {
                let image: Vec<usize> = d_in.iter().map(|&z| g.fwd[t[z]]).collect();
                fwd.push(lookup(dindex, image)?);
            }
            let bwd = match (&g.bwd, d_out) {
                (Some(gb), Some(d_out)) => {
                    let mut out = Vec::with_capacity(dtables.len());
                    for t in dtables {
                        let image: Vec<usize> = d_out.iter().map(|&z| gb[t[z]]).collect();
                        out.push(lookup(sindex, image)?);
                    }
                    Some(out)
                }
                _ => None,
            };
            Ok(Arrow { fwd, bwd })
        }
        (
            Node::Upset { inner: si, sets: ssets, index: sindex, .. },
            Node::Upset { inner: di, sets: dsets, index: dindex, .. },
        ) => {
            let g = act(si, di, state, param)?;
            let gb = g.bwd.as_ref().ok_or_else(not_covariant)?;
            let preimage = |sets: &[Vec<usize>],
                            index: &std::collections::HashMap<Vec<usize>, usize>,
                            map: &[usize],
                            n_src: usize| {
                let mut out = Vec::with_capacity(sets.len());
                for s in sets {
                    let mut member = vec![false; n_src];
                    for &x in s {
                        member[x] = true;
                    }
                    let pre: Vec<usize> = (0..map.len()).filter(|&y| member[map[y]]).collect();
                    out.push(
                        index
                            .get(&pre)
                            .copied()
                            .ok_or_else(|| Error::Invalid("inverse image is not an upset of the target".into()))?,
                    );
                }
                Ok::<_, Error>(out)
            };
            // Embedding direction: S ↦ p⁻¹(S); projection direction: T ↦ e⁻¹(T).
            let fwd = preimage(ssets, dindex, gb, si.len())?;
            let bwd = Some(preimage(dsets, sindex, &g.fwd, di.len())?);
            Ok(Arrow { fwd, bwd })
        }
        _ => Err(Error::InstanceMismatch),
    }
}
