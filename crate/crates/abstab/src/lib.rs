//! Exact classical simulation of adaptive normalizer circuits over finite
//! Abelian groups.
//!
//! The crate tracks stabilizer groups of generalized Pauli operators
//! `gamma^a Z(g) X(h)` under quantum Fourier transforms, automorphism gates,
//! quadratic phase gates and Pauli measurements, entirely with
//! arbitrary-precision integer arithmetic: runtimes scale with the bit-size
//! of the group order, not the order itself. Measurement outcomes are
//! sampled from (or forced into) exact distributions, amplitudes of
//! stabilizer states are computed as exact roots of unity over square-root
//! normalizations, and a brute-force dense-vector oracle is included for
//! verifying every label computation on small groups.
//!
//! Modules follow the natural layering:
//!
//! - [`group`]: groups, elements, characters and phase exponents;
//! - [`solver`]: Smith-normal-form solver for `A x = b (mod G)`;
//! - [`subgroup`]: membership, orders, intersections, orthogonal subgroups;
//! - [`pauli`]: label arithmetic for Pauli operators;
//! - [`gates`]: normalizer gate encodings and conjugation;
//! - [`stabilizer`]: stabilizer groups, structure tests and normal forms;
//! - [`measure`]: Pauli measurements and stabilizer updates;
//! - [`circuit`]: adaptive circuit programs, execution and transcripts;
//! - [`dense`]: the dense state-vector oracle;
//! - [`io`]: JSON encodings of circuits, systems and transcripts;
//! - [`selftest`]: randomized equivalence suites against the dense oracle.

pub mod circuit;
pub mod dense;
pub mod error;
pub mod gates;
pub mod group;
pub mod io;
pub mod measure;
pub mod pauli;
pub mod selftest;
pub mod solver;
pub mod stabilizer;
pub mod subgroup;

pub use error::{Error, Result};
pub use gates::GateEncoding;
pub use group::{Group, GroupElement, PhaseExponent};
pub use pauli::PauliLabel;
pub use solver::{GeneralSolution, HomMatrix};
pub use stabilizer::{NormalFormState, StabilizerGroup};
pub use subgroup::SubgroupGens;
