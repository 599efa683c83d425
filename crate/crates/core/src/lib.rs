//! Construction and classification of Steiner designs `S(t, k, v)` with a
//! prescribed automorphism group.
//!
//! The pipeline runs in stages, one module each:
//!
//! 1. [`orbitgen`] enumerates the t-subset orbits and the good k-subset
//!    orbits of the prescribed group.
//! 2. [`km`] builds the Kramer-Mesner matrix over them.
//! 3. [`symbreak`] groups the k-orbits into normalizer classes and writes the
//!    exact cover problem in one of three encodings.
//! 4. [`xcc`] solves exact cover with colors.
//! 5. [`designs`] expands solutions to block designs, verifies them and sorts
//!    them into isomorphism classes.

pub mod designs;
pub mod error;
pub mod km;
pub mod orbitgen;
pub mod perm;
pub mod symbreak;
pub mod xcc;

pub use designs::{classify, canonical_form, expand, verify_steiner, CanonicalForm, Design, IsoClass, SteinerReport};
pub use error::{Error, Result};
pub use km::{build_km, KmInstance, KmMatrix};
pub use orbitgen::{good_k_orbit_reps, t_orbit_reps, GoodOrbitSet, OrbitRep};
pub use perm::{cyclic_group, normalizer_of_cyclic, verify_normalizes, Permutation, PermutationGroup, PointSubset};
pub use symbreak::{decode_solution, encode, normalizer_classes, Encoding, EncodingKind, NormalizerClasses, RepOrder};
pub use xcc::{solve, Solution, SolveLimits, SolveMode, SolveStats, XccProblem};
