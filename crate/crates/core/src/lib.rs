//! Exact computations on the last subconstituent of orthogonal dual polar
//! graphs over finite fields of odd characteristic.
//!
//! The library builds the graph Λ whose vertices are the maximal totally
//! isotropic subspaces at maximal distance from a fixed base subspace,
//! classifies every vertex into its point-stabilizer suborbit by a
//! constructive canonical-form reduction (returning an explicit group
//! element as witness), evaluates the closed-form suborbit lengths, the
//! quasi-strongly-regular parameters, and the ν=2 association-scheme
//! intersection numbers, and certifies all of it against an independent
//! brute-force orbit oracle at small field sizes.
//!
//! All arithmetic is exact over `F_q`; nothing here uses floating point.

pub mod error;
pub mod gf;
pub mod mat;

pub mod geometry;
pub mod lambda;
pub mod oracle;
pub mod qsrg;
pub mod scheme;
pub mod suborbits;

pub use error::{Error, Result};
pub use gf::{Fe, Gf};
pub use geometry::{GroupElement0, GroupElement01, OrthoSpace};
pub use lambda::Vertex;
pub use mat::Mat;
pub use qsrg::QsrgParams;
pub use scheme::{RelationLabel, SchemeTable};
pub use suborbits::{AltForm, SuborbitLabel};
