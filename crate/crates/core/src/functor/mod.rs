//! Behaviour families `F(V, W)`: syntax, instantiation and actions.

mod action;
mod expr;
mod instance;
mod object;
mod rel;
mod value;

pub use action::Arrow;
pub use expr::{parse, parse_open, Constants, Dom, FunctorExpr};
pub use instance::{act_ep, reindex_ep, Backend, FunctorInstance, DEFAULT_ELEMENT_CAP};
pub use object::{LeafKind, Node, Obj};
pub use value::{decode, encode, ElemValue};

#[cfg(test)]
mod tests;
