//! Exact computations with twisted complexes over the plumbing of two
//! cotangent bundles: twist functors, braid orbits, normalization, and cover
//! and rank constraints.

pub mod braid;
pub mod category;
pub mod complex;
pub mod cover;
pub mod document;
pub mod equiv;
pub mod error;
pub mod field;
pub mod hom;
pub mod matrix;
pub mod normalizer;

pub use braid::{apply_braid, check_braid_relation, core_orbit_witness, twist, BraidLetter, BraidWord};
pub use category::{validate_params, BasisId, BasisKind, Category, CategoryParams, Morphism, Vertex};
pub use complex::{ComplexMap, Summand, TwistedComplex, Violation};
pub use cover::{decompose, fibre_rank, specialize, truncation_feasibility, BettiVector, CoverIndex, CoverSpec, FeasibilityReport};
pub use document::{parse_complex, serialize_complex, ComplexDocument};
pub use equiv::{equivalent, Verdict};
pub use error::{Error, Result};
pub use field::{Field, FieldSpec, PrimeField, Rationals};
pub use matrix::{generic_invertible, AffineFamily, Matrix};
pub use normalizer::{admissible, complexity, normalize, reduction_step, relabel, Certificate, ComplexityReport};
