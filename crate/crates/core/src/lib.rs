//! Probability on finite orthomodular lattices.
//!
//! The crate builds and validates finite orthomodular lattices ([`lattice`]),
//! states and finite observables ([`observable`]), n-dimensional s-maps
//! ([`smap`]), synthesizes s-maps by exact rational linear programming
//! ([`synth`], [`lp`]) and evaluates joint distribution functions of
//! possibly non-compatible observables ([`distribution`]).
//!
//! All arithmetic is exact: values are [`rational::Rational`]s and every
//! identity is checked by equality.

pub mod borel;
pub mod distribution;
pub mod error;
pub mod lattice;
pub mod lp;
pub mod json;
pub mod observable;
pub mod rational;
pub mod reference;
pub mod smap;
pub mod synth;

pub use error::{Error, Result};
pub use lattice::{Elem, Lattice};
pub use observable::{Observable, State};
pub use rational::Rational;
pub use smap::{PartialSMap, SMap};
