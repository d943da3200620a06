use crate::error::{Error, Result};
use crate::functor::object::{LeafKind, Node, Obj};
use crate::order::SumTag;
use crate::relation::Relation;

/// Decodings of a sum element: the coalesced bottom stands for both
/// injected bottoms.
fn alternatives(tag: SumTag, left: &Obj, right: &Obj) -> Vec<SumTag> {
    match tag {
        SumTag::Bottom => vec![
            SumTag::Left(left.poset.bottom().expect("coalesced operand is pointed")),
            SumTag::Right(right.poset.bottom().expect("coalesced operand is pointed")),
        ],
        t => vec![t],
    }
}

/// Relation lifting along the construction trees of `x` and `y`.
///
/// `r` relates the state carriers. `v_rel` relates the function domains
/// built from `V` (identity when absent), `w_rel` the `W` leaves.
pub(crate) fn lift_relation(
    x: &Obj,
    y: &Obj,
    r: &Relation,
    v_rel: Option<&Relation>,
    w_rel: Option<&Relation>,
) -> Result<Relation> {
    let same_size_identity = |what: &str| {
        if x.len() != y.len() {
            Err(Error::DomainMismatch(format!("{what} carriers differ and no relation was supplied")))
        } else {
            Ok(Relation::identity(x.len()))
        }
    };
    match (&x.node, &y.node) {
        (Node::Leaf(LeafKind::Const), Node::Leaf(LeafKind::Const)) => same_size_identity("constant"),
        (Node::Leaf(LeafKind::State), Node::Leaf(LeafKind::State)) => Ok(r.clone()),
        (Node::Leaf(LeafKind::Param), Node::Leaf(LeafKind::Param)) => match w_rel {
            Some(w) => Ok(w.clone()),
            None => same_size_identity("W"),
        },
        (Node::Sum { left: xl, right: xr, tags: xt, .. }, Node::Sum { left: yl, right: yr, tags: yt, .. }) => {
            let rl = lift_relation(xl, yl, r, v_rel, w_rel)?;
            let rr = lift_relation(xr, yr, r, v_rel, w_rel)?;
            Ok(Relation::from_fn(x.len(), y.len(), |i, j| {
                let ai = alternatives(xt[i], xl, xr);
                let aj = alternatives(yt[j], yl, yr);
                ai.iter().any(|a| {
                    aj.iter().any(|b| match (*a, *b) {
                        (SumTag::Left(p), SumTag::Left(q)) => rl.contains(p, q),
                        (SumTag::Right(p), SumTag::Right(q)) => rr.contains(p, q),
                        _ => false,
                    })
                })
            }))
        }
        (Node::Prod { left: xl, right: xr }, Node::Prod { left: yl, right: yr }) => {
            let rl = lift_relation(xl, yl, r, v_rel, w_rel)?;
            let rr = lift_relation(xr, yr, r, v_rel, w_rel)?;
            let (mx, my) = (xr.len(), yr.len());
            Ok(Relation::from_fn(x.len(), y.len(), |i, j| rl.contains(i / mx, j / my) && rr.contains(i % mx, j % my)))
        }
        (Node::Lift(xi), Node::Lift(yi)) => {
            let inner = lift_relation(xi, yi, r, v_rel, w_rel)?;
            Ok(Relation::from_fn(x.len(), y.len(), |i, j| match (i, j) {
                (0, 0) => true,
                (0, _) | (_, 0) => false,
                _ => inner.contains(i - 1, j - 1),
            }))
        }
        (Node::Fun { dom: xd, dom_is_v, cod: xc, tables: xt, .. }, Node::Fun { dom: yd, cod: yc, tables: yt, .. }) => {
            let g = lift_relation(xc, yc, r, v_rel, w_rel)?;
            let dom_pairs = match (dom_is_v, v_rel) {
                (true, Some(v)) => v.pairs(),
                _ => {
                    if xd.len() != yd.len() {
                        return Err(Error::DomainMismatch(
                            "function domains differ and no V relation was supplied".into(),
                        ));
                    }
                    (0..xd.len()).map(|a| (a, a)).collect()
                }
            };
            Ok(Relation::from_fn(x.len(), y.len(), |i, j| {
                dom_pairs.iter().all(|&(a, b)| g.contains(xt[i][a], yt[j][b]))
            }))
        }
        (Node::Upset { inner: xi, sets: xs, .. }, Node::Upset { inner: yi, sets: ys, .. }) => {
            let g = lift_relation(xi, yi, r, v_rel, w_rel)?;
            // Egli-Milner: every member on each side has a partner on the other.
            Ok(Relation::from_fn(x.len(), y.len(), |i, j| {
                xs[i].iter().all(|&s| ys[j].iter().any(|&t| g.contains(s, t)))
                    && ys[j].iter().all(|&t| xs[i].iter().any(|&s| g.contains(s, t)))
            }))
        }
        _ => Err(Error::InstanceMismatch),
    }
}
