//! Exact computation on nilmanifolds in Mal'cev coordinates, and finite
//! experiments on interpolation sets for nilsequences and Bohr almost
//! periodic sequences.
//!
//! * [`malcev`]: group law, inverses, powers, coefficient-growth bounds,
//!   direct products.
//! * [`orbit`]: fundamental-domain reduction, the cube metric on `[0,1)^m`,
//!   orbits, epsilon-separability, clustering, recurrence gaps.
//! * [`arrangement`]: region counting for polynomial arrangements.
//! * [`sets`]: integer-set descriptors with exact residues.
//! * [`nice`]: lacunarity classification and the nice-set census.
//! * [`bohr`]: torus-rotation separation, non-recurrence witnesses and the
//!   partition construction for lacunary-plus-shift sets.

pub mod arrangement;
pub mod bohr;
pub mod error;
pub mod malcev;
pub mod nice;
pub mod orbit;
pub mod poly;
pub mod rational;
pub mod sets;

pub use error::{Error, Result};
pub use malcev::{registry, validate_spec, DegreePolicy, GroupElement, LatticeVector, NilGroup, NilGroupSpec};
pub use orbit::{ManifoldPoint, OrbitTable};
pub use poly::Polynomial;
pub use rational::Rational;
pub use sets::{IntegerSet, SetDescriptor};
