//! Finite-domain and set-bounds constraint propagation, propagation-rule
//! extraction, channel functions between dual models, and an analyzer
//! that detects and removes propagation-redundant constraints from
//! channeled combined models without changing search behavior.

pub mod analyzer;
pub mod channel;
pub mod constraint;
pub mod domain;
pub mod engine;
pub mod error;
pub mod lattice;
pub mod models;
pub mod propagate;
pub mod rules;

pub use constraint::{conjoin, solutions, Constraint, Rhs, SetOpKind};
pub use domain::{Atom, Domain, IntSet, SetBounds, Valuation, Value, VarDomain, VarId, VarKind};
pub use engine::{branch_and_bound, fixpoint, search, Mode, PropagatorSet, SearchConfig, SearchStats, VarOrder};
pub use error::{Error, Result};
pub use propagate::{dom_propagate, dsb_propagate, make_propagator, sb_propagate, Propagate, Propagator};
