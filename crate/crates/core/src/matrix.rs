//! Dense complex matrices on `M_A` and `M_A ⊗ M_B`.
//!
//! Composite indices are A-major everywhere: the basis vector `e_i ⊗ e_k` of
//! `C^A ⊗ C^B` sits at row `i * dim_b + k`. Under this convention
//! `kron(a, b)` has entry `((i,k),(j,l)) = a[i][j] * b[k][l]`, which is what
//! nalgebra's `kronecker` produces.
//!
//! The only pairing exposed is the bilinear one `<a, b> = Σ a_ij b_ij = Tr(aᵗ b)`.
//! It is *not* the Hilbert–Schmidt inner product; the two agree after
//! replacing `b` by its entrywise conjugate: `<a, conj(b)> = Tr(a† b)` is HS.
//! On Hermitian matrices the bilinear pairing is real.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{dim_mismatch, Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative self-adjointness tolerance applied on construction.
pub const HERM_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn symmetrize(m: &CMat) -> CMat {
    (m + m.adjoint()) * re(0.5)
}

/// Matrix unit `e_ij` of size `n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = re(1.0);
    m
}

pub fn real_matrix(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMat::from_fn(n, m, |i, j| re(rows[i][j]))
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Raw bilinear pairing `Σ a_ij b_ij` of two equally shaped matrices.
pub fn pair_raw(a: &CMat, b: &CMat) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(dim_mismatch(format!(
            "pairing {:?} with {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x * y).sum())
}

/// Bilinear pairing of Hermitian matrices; the imaginary part is checked and dropped.
pub fn pairing(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    let z = pair_raw(&a.data, &b.data)?;
    let scale = 1.0 + a.data.norm() * b.data.norm();
    if z.im.abs() > 1e-10 * scale {
        return Err(Error::ComplexPairing(z.im));
    }
    Ok(z.re)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100_000).ok_or(Error::EigenFailure)?;
    let vals = eig.eigenvalues;
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok((sorted, vecs))
}

pub fn min_eigen_pair(m: &CMat) -> Result<(f64, CVec)> {
    let (vals, vecs) = eigh(m)?;
    Ok((vals[0], vecs.column(0).into_owned()))
}

/// Rebuild `V diag(f(λ)) V†`.
pub fn spectral_map(vals: &[f64], vecs: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let s = f(v);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    scaled * vecs.adjoint()
}

/// Nearest PSD matrix in Frobenius norm (eigenvalue clipping at zero).
pub fn psd_part(m: &CMat) -> Result<CMat> {
    let (vals, vecs) = eigh(m)?;
    Ok(symmetrize(&spectral_map(&vals, &vecs, |v| v.max(0.0))))
}

/// PSD test with a tolerance relative to the spectral norm.
pub fn psd_margin(m: &CMat, tol: f64) -> Result<(bool, f64)> {
    let (vals, _) = eigh(m)?;
    let lo = vals[0];
    let norm = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok((lo >= -tol * (1.0 + norm), lo))
}

/// A square complex matrix held exactly self-adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    data: CMat,
    corrected: bool,
}

impl HermitianMatrix {
    /// Symmetrizes the input; fails when the deviation exceeds the relative tolerance.
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(dim_mismatch(format!("matrix {:?} is not square", m.shape())));
        }
        let dev = hermitian_deviation(&m);
        let tol = HERM_TOL * (1.0 + max_abs(&m));
        if dev > tol {
            return Err(Error::NotHermitian { deviation: dev, tolerance: tol });
        }
        Ok(Self { data: symmetrize(&m), corrected: false })
    }

    /// Symmetrizes unconditionally, flagging corrections beyond tolerance.
    pub fn symmetrized(m: CMat) -> Self {
        assert!(m.is_square(), "Hermitian matrix must be square");
        let dev = hermitian_deviation(&m);
        let corrected = dev > HERM_TOL * (1.0 + max_abs(&m));
        Self { data: symmetrize(&m), corrected }
    }

    pub fn identity(d: usize) -> Self {
        Self { data: CMat::identity(d, d), corrected: false }
    }

    pub fn zeros(d: usize) -> Self {
        Self { data: CMat::zeros(d, d), corrected: false }
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        Self::new(real_matrix(rows))
    }

    /// `|v><v|`.
    pub fn projector(v: &CVec) -> Self {
        Self::symmetrized(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// True if construction had to correct a deviation larger than the tolerance.
    pub fn was_corrected(&self) -> bool {
        self.corrected
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.data
    }

    pub fn into_matrix(self) -> CMat {
        self.data
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn eigh(&self) -> Result<(Vec<f64>, CMat)> {
        eigh(&self.data)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.0[0])
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(psd_margin(&self.data, tol)?.0)
    }

    pub fn psd_project(&self) -> Result<HermitianMatrix> {
        Ok(Self { data: psd_part(&self.data)?, corrected: false })
    }
}

/// Nearest PSD matrix under the pairing norm.
pub fn psd_project(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    a.psd_project()
}

pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    a.min_eigenvalue()
}

pub fn is_psd(a: &HermitianMatrix, tol: f64) -> Result<bool> {
    a.is_psd(tol)
}

/// Element of `M_A ⊗ M_B` with explicit factor dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteMatrix {
    dim_a: usize,
    dim_b: usize,
    data: CMat,
}

impl BipartiteMatrix {
    pub fn new(dim_a: usize, dim_b: usize, data: CMat) -> Result<Self> {
        let n = dim_a * dim_b;
        if dim_a == 0 || dim_b == 0 || data.shape() != (n, n) {
            return Err(dim_mismatch(format!(
                "matrix {:?} does not match factors ({dim_a}, {dim_b})",
                data.shape()
            )));
        }
        Ok(Self { dim_a, dim_b, data })
    }

    pub fn zeros(dim_a: usize, dim_b: usize) -> Self {
        let n = dim_a * dim_b;
        Self { dim_a, dim_b, data: CMat::zeros(n, n) }
    }

    pub fn kron(a: &CMat, b: &CMat) -> Result<Self> {
        if !a.is_square() || !b.is_square() {
            return Err(dim_mismatch("tensor factors must be square"));
        }
        Self::new(a.nrows(), b.nrows(), kron(a, b))
    }

    /// Assemble `Σ_ij e_ij ⊗ blocks[i][j]`.
    pub fn from_blocks(dim_a: usize, dim_b: usize, block: impl Fn(usize, usize) -> CMat) -> Result<Self> {
        let mut out = Self::zeros(dim_a, dim_b);
        for i in 0..dim_a {
            for j in 0..dim_a {
                let b = block(i, j);
                if b.shape() != (dim_b, dim_b) {
                    return Err(dim_mismatch(format!("block ({i},{j}) has shape {:?}", b.shape())));
                }
                out.data.view_mut((i * dim_b, j * dim_b), (dim_b, dim_b)).copy_from(&b);
            }
        }
        Ok(out)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.data
    }

    pub fn into_matrix(self) -> CMat {
        self.data
    }

    #[inline]
    pub fn entry(&self, i: usize, k: usize, j: usize, l: usize) -> C64 {
        self.data[(i * self.dim_b + k, j * self.dim_b + l)]
    }

    /// Block `(i, j)` on the B factor: the coefficient of `e_ij ⊗ ·`.
    pub fn block(&self, i: usize, j: usize) -> CMat {
        let b = self.dim_b;
        self.data.view((i * b, j * b), (b, b)).into_owned()
    }

    /// `X^Γ = (1 ⊗ t)(X)`: entry `((i,k),(j,l))` becomes `((i,l),(j,k))`.
    pub fn partial_transpose(&self) -> Self {
        let (da, db) = self.dims();
        let mut out = CMat::zeros(da * db, da * db);
        for i in 0..da {
            for j in 0..da {
                for k in 0..db {
                    for l in 0..db {
                        out[(i * db + k, j * db + l)] = self.entry(i, l, j, k);
                    }
                }
            }
        }
        Self { dim_a: da, dim_b: db, data: out }
    }

    /// Tensor flip `M_A ⊗ M_B → M_B ⊗ M_A`.
    pub fn flip(&self) -> Self {
        let (da, db) = self.dims();
        let mut out = CMat::zeros(da * db, da * db);
        for i in 0..da {
            for j in 0..da {
                for k in 0..db {
                    for l in 0..db {
                        out[(k * da + i, l * da + j)] = self.entry(i, k, j, l);
                    }
                }
            }
        }
        Self { dim_a: db, dim_b: da, data: out }
    }

    pub fn pair(&self, other: &Self) -> Result<C64> {
        if self.dims() != other.dims() {
            return Err(dim_mismatch(format!("pairing {:?} with {:?}", self.dims(), other.dims())));
        }
        pair_raw(&self.data, &other.data)
    }

    pub fn is_hermitian(&self) -> bool {
        hermitian_deviation(&self.data) <= HERM_TOL * (1.0 + max_abs(&self.data))
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.data.clone())
    }

    pub fn symmetrized(&self) -> Self {
        Self { dim_a: self.dim_a, dim_b: self.dim_b, data: symmetrize(&self.data) }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim_a: self.dim_a, dim_b: self.dim_b, data: &self.data * re(s) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(dim_mismatch(format!("adding {:?} to {:?}", other.dims(), self.dims())));
        }
        Ok(Self { dim_a: self.dim_a, dim_b: self.dim_b, data: &self.data + &other.data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigh(&self.data)?.0[0])
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(psd_margin(&self.data, tol)?.0)
    }

    /// PSD with PSD partial transpose.
    pub fn is_ppt(&self, tol: f64) -> Result<bool> {
        Ok(self.is_psd(tol)? && self.partial_transpose().is_psd(tol)?)
    }
}

pub fn partial_transpose(x: &BipartiteMatrix) -> BipartiteMatrix {
    x.partial_transpose()
}

pub fn flip(x: &BipartiteMatrix) -> BipartiteMatrix {
    x.flip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn swap2() -> BipartiteMatrix {
        // Σ e_ij ⊗ e_ij on C²⊗C²
        BipartiteMatrix::from_blocks(2, 2, |i, j| unit(2, i, j)).unwrap()
    }

    #[test]
    fn identity_pairing_is_trace() {
        let i2 = HermitianMatrix::identity(2);
        assert_abs_diff_eq!(pairing(&i2, &i2).unwrap(), 2.0);
    }

    #[test]
    fn matrix_unit_pairs_without_conjugation() {
        let e12 = unit(2, 0, 1);
        assert_eq!(pair_raw(&e12, &e12).unwrap(), re(1.0));
        let ie = &e12 * c(0.0, 1.0);
        // Tr(aᵗ b) on i·e12 squared is -1; HS would give +1.
        assert_eq!(pair_raw(&ie, &ie).unwrap(), re(-1.0));
    }

    #[test]
    fn pairing_rejects_mismatched_dims() {
        let a = HermitianMatrix::identity(2);
        let b = HermitianMatrix::identity(3);
        assert!(matches!(pairing(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn kron_follows_a_major_convention() {
        let a = CMat::from_fn(2, 2, |i, j| re((1 + 2 * i + j) as f64));
        let b = CMat::from_fn(3, 3, |i, j| c(i as f64, j as f64));
        let x = BipartiteMatrix::kron(&a, &b).unwrap();
        for (i, j, k, l) in [(0, 1, 2, 0), (1, 0, 1, 1), (1, 1, 0, 2)] {
            assert_eq!(x.entry(i, k, j, l), a[(i, j)] * b[(k, l)]);
        }
    }

    #[test]
    fn partial_transpose_of_swap_has_eigenvalue_minus_one() {
        // Γ(Σ e_ij⊗e_ij) = swap operator, spectrum {-1, 1, 1, 1}
        let (vals, _) = eigh(swap2().partial_transpose().as_matrix()).unwrap();
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[3], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_transpose_of_product() {
        let x = CMat::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let y = CMat::from_fn(3, 3, |i, j| c((i * j) as f64, i as f64 - j as f64));
        let lhs = BipartiteMatrix::kron(&x, &y).unwrap().partial_transpose();
        let rhs = BipartiteMatrix::kron(&x, &y.transpose()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn flip_of_product_swaps_factors() {
        let e11 = unit(2, 0, 0);
        let e22 = unit(2, 1, 1);
        let x = BipartiteMatrix::kron(&e11, &e22).unwrap();
        assert_eq!(x.flip(), BipartiteMatrix::kron(&e22, &e11).unwrap());
        let y = BipartiteMatrix::kron(&unit(2, 0, 1), &unit(3, 2, 0)).unwrap();
        assert_eq!(y.flip(), BipartiteMatrix::kron(&unit(3, 2, 0), &unit(2, 0, 1)).unwrap());
        assert_eq!(y.flip().flip(), y);
    }

    #[test]
    fn min_eigenvalue_fixtures() {
        assert_abs_diff_eq!(HermitianMatrix::identity(2).min_eigenvalue().unwrap(), 1.0, epsilon = 1e-14);
        // Choi matrix of τ: block [[1,1],[1,1]] has eigenvalues 0 and 2
        let tau = HermitianMatrix::from_real(&[
            &[0., 0., 0., 0.],
            &[0., 1., 1., 0.],
            &[0., 1., 1., 0.],
            &[0., 0., 0., 1.],
        ])
        .unwrap();
        assert_abs_diff_eq!(tau.min_eigenvalue().unwrap(), 0.0, epsilon = 1e-12);
        let pt = BipartiteMatrix::new(2, 2, tau.as_matrix().clone()).unwrap().partial_transpose();
        assert!(pt.min_eigenvalue().unwrap() < -0.1);
    }

    #[test]
    fn psd_projection_fixtures() {
        let d = HermitianMatrix::from_real(&[&[1., 0.], &[0., -1.]]).unwrap();
        let p = d.psd_project().unwrap();
        assert_abs_diff_eq!((p.as_matrix() - real_matrix(&[&[1., 0.], &[0., 0.]])).norm(), 0.0, epsilon = 1e-14);
        let neg = HermitianMatrix::new(CMat::identity(3, 3) * re(-1.0)).unwrap();
        assert_abs_diff_eq!(neg.psd_project().unwrap().as_matrix().norm(), 0.0, epsilon = 1e-14);
        let psd = HermitianMatrix::from_real(&[&[2., 1.], &[1., 2.]]).unwrap();
        assert_abs_diff_eq!((psd.psd_project().unwrap().as_matrix() - psd.as_matrix()).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn hermitian_construction_checks_tolerance() {
        let mut m = real_matrix(&[&[1., 2.], &[2., 1.]]);
        m[(0, 1)] += c(0.0, 1e-12);
        let h = HermitianMatrix::new(m.clone()).unwrap();
        assert!(!h.was_corrected());
        assert_eq!(h.as_matrix()[(0, 1)], h.as_matrix()[(1, 0)].conj());
        m[(0, 1)] += re(1e-3);
        assert!(matches!(HermitianMatrix::new(m.clone()), Err(Error::NotHermitian { .. })));
        assert!(HermitianMatrix::symmetrized(m).was_corrected());
    }

    #[test]
    fn bipartite_rejects_bad_shape() {
        assert!(BipartiteMatrix::new(2, 3, CMat::zeros(5, 5)).is_err());
    }
}
