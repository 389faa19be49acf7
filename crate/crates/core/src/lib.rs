//! Finite G-dynamical systems over magmas.
//!
//! A G-system is a variable set `X` together with a transition function on
//! `G^X`, the configurations assigning an element of the magma `G` to each
//! variable. This crate builds such systems, couples them, and decides
//! dependence, causal influence, closure, reducibility and emergence by
//! exhaustive enumeration. Every negative (and most positive) answers carry
//! a witness that can be re-checked independently.

pub mod atoms;
pub mod budget;
pub mod classical;
pub mod config;
pub mod coupling;
pub mod error;
pub mod magma;
pub mod reduce;
pub mod system;

pub use budget::Budget;
pub use config::{enumerate_configs, Config, ConfigSet, ConfigSpace, Team, VarSet};
pub use error::{Error, Result};
pub use magma::{builtin_magma, BuiltinMagma, Elem, Magma};
pub use system::{systems_equal, FnTable, GSystem, Term, Transition};

/// Outcome of a decision procedure: whether the property holds, and a
/// counterexample when it does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> Verdict<W> {
    pub fn holds() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    pub fn fails(witness: W) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness),
        }
    }

    pub fn from_counterexample(w: Option<W>) -> Self {
        match w {
            Some(w) => Verdict::fails(w),
            None => Verdict::holds(),
        }
    }
}

/// Which side of a two-set cover or coupling something belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    X,
    Y,
}
