//! Verification toolchain for discrete gene regulatory networks.
//!
//! Networks are written in a small textual language ([`dsl`]), lowered to
//! the multivalued logical model ([`model`]), compiled to place/transition
//! nets ([`pn`]) and checked against CTL-style queries by a symbolic MDD
//! engine ([`symbolic`], [`checker`]). An explicit-state checker serves as an
//! independent oracle for small models.

pub mod checker;
pub mod cli;
pub mod diag;
pub mod dsl;
pub mod model;
pub mod pn;
pub mod symbolic;

pub use checker::{Formula, Model, StableReport, Verdict};
pub use diag::{Code, Diagnostic, Severity, Span};
pub use model::{GeneId, Level, Network, State};
pub use pn::{PetriNet, StateMap};
pub use symbolic::{Engine, EngineError, StateSet, SymbolicRelation, VarOrder};
