//! Schmidt decomposition of vectors in `C^A ⊗ C^B`.

use nalgebra::SVD;

use crate::error::{dim_mismatch, Error, Result};
use crate::matrix::{CMat, CVec};

#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Non-increasing, nonnegative.
    pub coefficients: Vec<f64>,
    pub left: Vec<CVec>,
    pub right: Vec<CVec>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> CVec {
        let da = self.left.first().map_or(0, |v| v.len());
        let db = self.right.first().map_or(0, |v| v.len());
        let mut out = CVec::zeros(da * db);
        for ((s, u), v) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            out += u.kronecker(v) * crate::matrix::re(*s);
        }
        out
    }

    pub fn rank(&self, tol: f64) -> usize {
        let top = self.coefficients.first().copied().unwrap_or(0.0);
        self.coefficients.iter().filter(|&&s| s > tol * top).count()
    }
}

/// Reshape `ξ` into its `dim_a × dim_b` coefficient matrix, `M[i][k] = ξ[i*dim_b + k]`.
pub fn matricize(xi: &CVec, dim_a: usize, dim_b: usize) -> Result<CMat> {
    if xi.len() != dim_a * dim_b {
        return Err(dim_mismatch(format!("vector of length {} is not in C^{dim_a}⊗C^{dim_b}", xi.len())));
    }
    Ok(CMat::from_fn(dim_a, dim_b, |i, k| xi[i * dim_b + k]))
}

pub fn vectorize(m: &CMat) -> CVec {
    let (da, db) = m.shape();
    CVec::from_fn(da * db, |r, _| m[(r / db, r % db)])
}

pub fn schmidt(xi: &CVec, dim_a: usize, dim_b: usize) -> Result<SchmidtDecomposition> {
    let m = matricize(xi, dim_a, dim_b)?;
    if m.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let svd = SVD::try_new(m, true, true, f64::EPSILON, 100_000).ok_or(Error::SvdFailure)?;
    let u = svd.u.ok_or(Error::SvdFailure)?;
    let v_t = svd.v_t.ok_or(Error::SvdFailure)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    // M = Σ s_r u_r v_r†, so the B-side vector is conj(v_r), i.e. row r of v_t.
    Ok(SchmidtDecomposition {
        coefficients: order.iter().map(|&r| svd.singular_values[r]).collect(),
        left: order.iter().map(|&r| u.column(r).into_owned()).collect(),
        right: order.iter().map(|&r| v_t.row(r).transpose()).collect(),
    })
}

pub fn schmidt_rank(xi: &CVec, dim_a: usize, dim_b: usize, tol: f64) -> Result<usize> {
    Ok(schmidt(xi, dim_a, dim_b)?.rank(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, re};
    use crate::random::{random_vector, rng};
    use proptest::prelude::*;

    #[test]
    fn product_vector_has_rank_one() {
        let x = CVec::from_vec(vec![c(1.0, 2.0), re(-0.5)]);
        let y = CVec::from_vec(vec![re(0.3), c(0.0, 1.0), re(2.0)]);
        assert_eq!(schmidt_rank(&x.kronecker(&y), 2, 3, 1e-10).unwrap(), 1);
        let basis = CVec::from_vec(vec![re(0.0), re(1.0)]);
        assert_eq!(schmidt_rank(&x.kronecker(&basis), 2, 2, 1e-10).unwrap(), 1);
    }

    #[test]
    fn maximally_entangled_has_equal_coefficients() {
        let v = CVec::from_vec(vec![re(1.0), re(0.0), re(0.0), re(1.0)]);
        let s = schmidt(&v, 2, 2).unwrap();
        assert_eq!(s.rank(1e-10), 2);
        assert!((s.coefficients[0] - 1.0).abs() < 1e-12 && (s.coefficients[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(schmidt(&CVec::zeros(4), 2, 2), Err(Error::ZeroVector)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn reconstruction_and_orthonormality(seed in any::<u64>(), da in 1usize..=6, db in 1usize..=6) {
            let mut r = rng(seed, 0);
            let xi = random_vector(&mut r, da * db);
            let s = schmidt(&xi, da, db).unwrap();
            prop_assert!((s.reconstruct() - &xi).norm() <= 1e-10);
            for w in s.coefficients.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            for fam in [&s.left, &s.right] {
                for (i, a) in fam.iter().enumerate() {
                    for (j, b) in fam.iter().enumerate() {
                        let g = a.dotc(b);
                        let want = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((g - re(want)).norm() < 1e-10);
                    }
                }
            }
        }
    }
}
