//! Heegaard Floer homology of 0-surgery on a nullhomologous knot, computed
//! from a finite model of the knot Floer complex through the untwisted and
//! twisted mapping cone formulas.

pub mod cfk;
pub mod cone;
pub mod detect;
pub mod format;
mod graded;
pub mod grading;
pub mod laurent;
pub mod linalg;
pub mod subquotient;
pub mod twisted;

pub use cfk::{fixtures, KnotComplex, PlaneElement};
pub use grading::Grading;
