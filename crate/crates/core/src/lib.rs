pub mod bisim;
pub mod cli;
pub mod coalgebra;
pub mod engine;
pub mod error;
pub mod functor;
pub mod laws;
pub mod mediator;
pub mod order;
pub mod relation;

pub use error::{Error, Result};
