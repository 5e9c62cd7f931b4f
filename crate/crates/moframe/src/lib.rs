//! Moving frames for third-order ODEs u''' = F(x, u, p, q) under
//! fiber-preserving maps X = ξ(x), U = φ(x, u), in exact rational arithmetic.

pub mod action;
pub mod expr;
pub mod field;
pub mod forms;
pub mod frame;
pub mod jet;
pub mod parse;
pub mod series;
pub mod typos;
pub mod vfield;

pub use expr::{Expr, Symbol, SymbolKind, Q};
