//! Hermitian-preserving maps between matrix algebras, handled through their
//! Choi matrices, and membership tests for the standard cones of positive
//! maps together with one-sided duals of augmented cones.
//!
//! Pairings are bilinear: `<a, b> = Σ a_ij b_ij = Tr(aᵗ b)`. This is the
//! Hilbert–Schmidt inner product with the second argument conjugated.
//! Composite indices are A-major: basis vector `(i, k)` of `C^A ⊗ C^B` is
//! row `i·dimB + k`.

pub mod builtins;
pub mod calculus;
pub mod cones;
pub mod error;
pub mod fixtures;
pub mod json;
pub mod maps;
pub mod matrix;
pub mod ppt_square;
pub mod random;
pub mod schmidt;

pub use cones::{
    is_ccp, is_cp, is_decomposable, is_member, is_positive_k, is_ppt_map, is_superpositive_k, min_schmidt_overlap,
    Certificate, ConeId, MembershipVerdict, SolverOptions, Status,
};
pub use error::{Error, Result};
pub use maps::{adjoint, compose, compose_transpose, map_pairing, HpMap, KrausTerm};
pub use matrix::{
    flip, min_eigenvalue, pairing, partial_transpose, psd_project, BipartiteMatrix, CMat, CVec, HermitianMatrix, C64,
};
pub use schmidt::{schmidt, schmidt_rank, SchmidtDecomposition};
