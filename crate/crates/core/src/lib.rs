//! Calculus of Markovian quantum feedback networks.
//!
//! Components are SLH models `(S, L, H)` over finite-dimensional, labeled
//! tensor-product spaces. This crate provides:
//!
//! - [`operator`]: dense operators and operator arrays with embedding,
//!   `Im{·}`, and checked inversion.
//! - [`slh`]: SLH models, the Stratonovich E-matrix form, and the Cayley
//!   transform between them.
//! - [`network`]: series product, concatenation, feedback reduction,
//!   isolated loops and loop-induced couplings.
//! - [`linear_passive`]: linear passive networks and delayed loops in the
//!   Laplace domain.
//! - [`components`]: cavities, phase shifters, beam splitters, qubit couplers.
//! - [`json`]: the JSON schema for models.

pub mod components;
pub mod error;
pub mod json;
pub mod linear_passive;
pub mod network;
pub mod operator;
pub mod slh;

pub use error::{Error, Result};
pub use operator::{CMatrix, OpArray, Operator, SpaceLayout, EPS};
pub use slh::{strat_to_slh, slh_to_strat, PortSet, SLHModel, StratonovichModel};
