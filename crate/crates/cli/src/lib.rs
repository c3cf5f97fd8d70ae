//! Netlist front end for the SLH network algebra.
//!
//! A netlist declares components and wires them with `series`, `concat`,
//! `feedback` and `loop` statements; see [`parse`] for the grammar.

pub mod ast;
pub mod eval;
pub mod parse;

pub use ast::NetworkSpec;
pub use eval::{evaluate, EvalError};
pub use parse::{parse_netspec, ParseError};
