//! Higher-rank graphs given by finite presentations, their finitely aligned
//! part, filter path spaces, the shift action, path groupoids and
//! Spielberg's groupoid.

pub mod action;
pub mod alignment;
pub mod catalog;
pub mod degree;
pub mod error;
pub mod groupoid;
pub mod kgraph;
pub mod pspace;
pub mod spielberg;

pub use degree::{Degree, DegreeMonoid, GroupDegree, NatK};
pub use error::{Error, Result};
pub use kgraph::{Completeness, KGraph, Morphism};
