use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functor::object::{LeafKind, Node, Obj};
use crate::order::SumTag;

/// Structured reading of an element of a functor image.
///
/// The bottom of a coalesced sum decodes as `Inl` of the left bottom;
/// `Inr` of the right bottom encodes to the same element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElemValue {
    Const(String),
    State(String),
    W(String),
    Inl(Box<ElemValue>),
    Inr(Box<ElemValue>),
    Pair(Box<ElemValue>, Box<ElemValue>),
    Table(Vec<(String, ElemValue)>),
    Upset(Vec<ElemValue>),
    LiftBottom,
    Up(Box<ElemValue>),
}

pub fn decode(obj: &Obj, i: usize) -> ElemValue {
    match &obj.node {
        Node::Leaf(kind) => {
            let id = obj.poset.id(i).to_string();
            match kind {
                LeafKind::Const => ElemValue::Const(id),
                LeafKind::State => ElemValue::State(id),
                LeafKind::Param => ElemValue::W(id),
            }
        }
        Node::Sum { left, right, tags, .. } => match tags[i] {
            SumTag::Bottom => ElemValue::Inl(Box::new(decode(left, left.poset.bottom().expect("pointed")))),
            SumTag::Left(a) => ElemValue::Inl(Box::new(decode(left, a))),
            SumTag::Right(b) => ElemValue::Inr(Box::new(decode(right, b))),
        },
        Node::Prod { left, right } => {
            let m = right.len();
            ElemValue::Pair(Box::new(decode(left, i / m)), Box::new(decode(right, i % m)))
        }
        Node::Lift(inner) => {
            if i == 0 {
                ElemValue::LiftBottom
            } else {
                ElemValue::Up(Box::new(decode(inner, i - 1)))
            }
        }
        Node::Fun { dom, cod, tables, .. } => ElemValue::Table(
            tables[i].iter().enumerate().map(|(a, &y)| (dom.id(a).to_string(), decode(cod, y))).collect(),
        ),
        Node::Upset { inner, sets, .. } => ElemValue::Upset(sets[i].iter().map(|&s| decode(inner, s)).collect()),
    }
}

fn shape(msg: &str) -> Error {
    Error::Invalid(format!("value does not fit the functor image: {msg}"))
}

pub fn encode(obj: &Obj, v: &ElemValue) -> Result<usize> {
    match (&obj.node, v) {
        (Node::Leaf(LeafKind::Const), ElemValue::Const(id))
        | (Node::Leaf(LeafKind::State), ElemValue::State(id))
        | (Node::Leaf(LeafKind::Param), ElemValue::W(id)) => {
            obj.poset.index_of(id).ok_or_else(|| Error::UnknownElement(id.clone()))
        }
        (Node::Sum { left, inl, .. }, ElemValue::Inl(x)) => Ok(inl[encode(left, x)?]),
        (Node::Sum { right, inr, .. }, ElemValue::Inr(x)) => Ok(inr[encode(right, x)?]),
        (Node::Prod { left, right }, ElemValue::Pair(a, b)) => Ok(encode(left, a)? * right.len() + encode(right, b)?),
        (Node::Lift(_), ElemValue::LiftBottom) => Ok(0),
        (Node::Lift(inner), ElemValue::Up(x)) => Ok(encode(inner, x)? + 1),
        (Node::Fun { dom, cod, index, .. }, ElemValue::Table(rows)) => {
            let mut t = vec![usize::MAX; dom.len()];
            for (a, y) in rows {
                let ia = dom.index_of(a).ok_or_else(|| Error::UnknownElement(a.clone()))?;
                if t[ia] != usize::MAX {
                    return Err(shape(&format!("table lists {a} twice")));
                }
                t[ia] = encode(cod, y)?;
            }
            if t.contains(&usize::MAX) {
                return Err(shape("table is not total"));
            }
            index
                .get(&t)
                .copied()
                .ok_or_else(|| Error::NotMonotone("table is not a member of the function space".into()))
        }
        (Node::Upset { inner, index, .. }, ElemValue::Upset(members)) => {
            let mut s = members.iter().map(|m| encode(inner, m)).collect::<Result<Vec<_>>>()?;
            s.sort_unstable();
            s.dedup();
            index.get(&s).copied().ok_or_else(|| shape("set is not an admissible upset"))
        }
        _ => Err(shape("constructor mismatch")),
    }
}
