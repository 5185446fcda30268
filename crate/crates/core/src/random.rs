//! Seeded samplers for test instances. Every sampler takes the RNG by
//! reference; callers own the seed.

use nalgebra::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{c, symmetrize, CMat, CVec, C64};

pub type SolverRng = ChaCha8Rng;

/// Independent stream `stream` of the generator for `seed`.
pub fn rng(seed: u64, stream: u64) -> SolverRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian(r: &mut impl Rng) -> C64 {
    let a: f64 = r.sample(StandardNormal);
    let b: f64 = r.sample(StandardNormal);
    c(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre(r: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(r))
}

/// Unit vector, uniformly distributed on the sphere.
pub fn random_vector(r: &mut impl Rng, n: usize) -> CVec {
    let v = CVec::from_fn(n, |_, _| gaussian(r));
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// GUE-style Hermitian matrix.
pub fn random_hermitian(r: &mut impl Rng, n: usize) -> CMat {
    symmetrize(&ginibre(r, n, n))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fix.
pub fn random_unitary(r: &mut impl Rng, n: usize) -> CMat {
    let qr = QR::new(ginibre(r, n, n));
    let mut q = qr.q();
    let rr = qr.r();
    for j in 0..n {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm(), 0.0) } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random PSD matrix of the given rank, trace one.
pub fn random_psd(r: &mut impl Rng, n: usize, rank: usize) -> CMat {
    let g = ginibre(r, n, rank.max(1));
    let m = &g * g.adjoint();
    let t = m.trace().re;
    symmetrize(&(m / c(t, 0.0)))
}
