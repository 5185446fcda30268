//! Benchmark fixtures shared by the criterion benches.

use mapcone::builtins::{phi_abcd, tau};
use mapcone::random::{random_hermitian, rng};
use mapcone::HpMap;

/// A generic Hermitian-preserving map with a reproducible Choi matrix.
pub fn random_map(dim_a: usize, dim_b: usize, seed: u64) -> HpMap {
    let mut r = rng(seed, 0);
    HpMap::from_choi_matrix(dim_a, dim_b, random_hermitian(&mut r, dim_a * dim_b)).expect("square Hermitian")
}

/// A positive map that is not completely positive.
pub fn positive_map() -> HpMap {
    phi_abcd(1.0, 1.0, 1.0, 1.0 / 3.0)
}

pub fn entangled_map() -> HpMap {
    tau()
}
