//! Construction and verification engine for repetitive Delone subsets of `Z²`
//! built from nested patch hierarchies.
//!
//! The crate is organised by concern:
//!
//! * [`lattice`]: lattice points, patches, candidate maps, the half-step
//!   extension of maps and exact distortion arithmetic.
//! * [`hierarchy`]: implicit substitution hierarchies, lazy materialization,
//!   exact (memoized) occurrence counting and repetitivity estimates.
//! * [`nonrect`]: the alternating-block construction and its constants.
//! * [`ue`]: the mixing refinement with `1/2 ± δ` transition matrices.
//! * [`choquet`]: hierarchies with prescribed transition matrices and the
//!   associated invariant-measure vectors.
//! * [`lab`]: probe grids, regularity predicates, boundary curves, lattice
//!   counting near curves and small bi-Lipschitz oracles.
//! * [`verify`]: named check suites shared by tests and the command line.

pub mod choquet;
mod error;
pub mod hierarchy;
pub mod lab;
pub mod lattice;
pub mod matrix;
pub mod nonrect;
pub mod rational;
pub mod ue;
pub mod verify;

pub use error::{Error, Result};
pub use hierarchy::{Arrangement, HierarchySpec, OccurrenceMode};
pub use lattice::{CandidateMap, DistortionReport, HalfPoint, Patch, Point};
pub use matrix::TransitionMatrix;
pub use rational::Rational;
