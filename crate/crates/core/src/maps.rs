//! Hermitian-preserving maps `M_A → M_B`, stored by their Choi matrix
//! `C_φ = Σ_ij e_ij ⊗ φ(e_ij)`.
//!
//! `apply` contracts the Choi matrix so that `<a ⊗ b, C_φ> = <b, φ(a)>` holds
//! literally under the transpose pairing: `φ(a)_kl = Σ_ij a_ij C[(i,k),(j,l)]`.

use crate::error::{dim_mismatch, Error, Result};
use crate::matrix::{c, re, BipartiteMatrix, CMat, HermitianMatrix, HERM_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct HpMap {
    choi: BipartiteMatrix,
}

/// A Kraus term `± Ad_V` with `Ad_V(x) = V* x V`; `V` is `dim_a × dim_b`.
#[derive(Clone, Debug)]
pub struct KrausTerm {
    pub op: CMat,
    pub sign: f64,
}

impl KrausTerm {
    pub fn positive(op: CMat) -> Self {
        Self { op, sign: 1.0 }
    }

    pub fn negative(op: CMat) -> Self {
        Self { op, sign: -1.0 }
    }
}

impl HpMap {
    /// Rejects Choi matrices that are not self-adjoint to tolerance.
    pub fn from_choi(choi: BipartiteMatrix) -> Result<Self> {
        let h = choi.to_hermitian()?;
        let (da, db) = choi.dims();
        Ok(Self { choi: BipartiteMatrix::new(da, db, h.into_matrix())? })
    }

    /// Symmetrizes whatever it is given; for internally generated matrices.
    pub(crate) fn from_choi_unchecked(choi: BipartiteMatrix) -> Self {
        Self { choi: choi.symmetrized() }
    }

    pub fn from_choi_matrix(dim_a: usize, dim_b: usize, m: CMat) -> Result<Self> {
        Self::from_choi(BipartiteMatrix::new(dim_a, dim_b, m)?)
    }

    /// `Σ ± C_{Ad_V}`. Each Choi term is `w w†` with `w_(i,k) = conj(V_ik)`.
    pub fn from_kraus(terms: &[KrausTerm]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let (da, db) = first.op.shape();
        let mut acc = CMat::zeros(da * db, da * db);
        for t in terms {
            if t.op.shape() != (da, db) {
                return Err(dim_mismatch(format!("Kraus operator {:?} vs {:?}", t.op.shape(), (da, db))));
            }
            let w = crate::schmidt::vectorize(&t.op.map(|z| z.conj()));
            acc += (&w * w.adjoint()) * re(t.sign);
        }
        Self::from_choi_matrix(da, db, acc)
    }

    /// Convenience for a single `Ad_V`.
    pub fn ad(v: &CMat) -> Result<Self> {
        Self::from_kraus(&[KrausTerm::positive(v.clone())])
    }

    /// Assemble `Σ e_ij ⊗ image(i, j)` from the images of the matrix units.
    pub fn from_images(dim_a: usize, dim_b: usize, image: impl Fn(usize, usize) -> CMat) -> Result<Self> {
        Self::from_choi(BipartiteMatrix::from_blocks(dim_a, dim_b, image)?)
    }

    pub fn dim_a(&self) -> usize {
        self.choi.dim_a()
    }

    pub fn dim_b(&self) -> usize {
        self.choi.dim_b()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.choi.dims()
    }

    pub fn choi(&self) -> &BipartiteMatrix {
        &self.choi
    }

    pub fn choi_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.choi.as_matrix().clone())
    }

    /// Image of an arbitrary (not necessarily Hermitian) matrix.
    pub fn apply_matrix(&self, a: &CMat) -> Result<CMat> {
        let (da, db) = self.dims();
        if a.shape() != (da, da) {
            return Err(dim_mismatch(format!("map on M_{da} applied to {:?}", a.shape())));
        }
        let mut out = CMat::zeros(db, db);
        for i in 0..da {
            for j in 0..da {
                let aij = a[(i, j)];
                if aij == c(0.0, 0.0) {
                    continue;
                }
                out += self.choi.as_matrix().view((i * db, j * db), (db, db)) * aij;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        Ok(HermitianMatrix::symmetrized(self.apply_matrix(a.as_matrix())?))
    }

    /// `φ*`, defined by `<φ(a), b> = <a, φ*(b)>`; its Choi matrix is the flip.
    pub fn adjoint(&self) -> Self {
        Self { choi: self.choi.flip() }
    }

    /// `self ∘ t`; the Choi matrix is the partial transpose.
    pub fn compose_transpose(&self) -> Self {
        Self { choi: self.choi.partial_transpose() }
    }

    /// `(1_d ⊗ φ)(X)` for `X ∈ M_d ⊗ M_A`.
    pub fn ampliate_left(&self, x: &BipartiteMatrix) -> Result<BipartiteMatrix> {
        if x.dim_b() != self.dim_a() {
            return Err(dim_mismatch(format!(
                "1⊗φ with φ on M_{} applied to shape {:?}",
                self.dim_a(),
                x.dims()
            )));
        }
        let mut blocks = Vec::with_capacity(x.dim_a() * x.dim_a());
        for i in 0..x.dim_a() {
            for j in 0..x.dim_a() {
                blocks.push(self.apply_matrix(&x.block(i, j))?);
            }
        }
        let d = x.dim_a();
        BipartiteMatrix::from_blocks(d, self.dim_b(), |i, j| blocks[i * d + j].clone())
    }

    /// `(φ ⊗ 1_d)(X)` for `X ∈ M_A ⊗ M_d`.
    pub fn ampliate_right(&self, x: &BipartiteMatrix) -> Result<BipartiteMatrix> {
        if x.dim_a() != self.dim_a() {
            return Err(dim_mismatch(format!(
                "φ⊗1 with φ on M_{} applied to shape {:?}",
                self.dim_a(),
                x.dims()
            )));
        }
        Ok(self.ampliate_left(&x.flip())?.flip())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { choi: self.choi.scale(s) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { choi: self.choi.add(&other.choi)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { choi: self.choi.sub(&other.choi)? })
    }
}

/// `ψ ∘ φ`, computed as `(1_A ⊗ ψ)(C_φ)`.
pub fn compose(psi: &HpMap, phi: &HpMap) -> Result<HpMap> {
    if phi.dim_b() != psi.dim_a() {
        return Err(dim_mismatch(format!(
            "cannot compose {:?} after {:?}",
            psi.dims(),
            phi.dims()
        )));
    }
    let choi = psi.ampliate_left(&phi.choi)?;
    #[cfg(debug_assertions)]
    {
        let schur = crate::ppt_square::block_schur_sum(&phi.choi.flip(), &psi.choi)?;
        let diff = (schur.as_matrix() - choi.as_matrix()).norm();
        debug_assert!(
            diff <= 1e-9 * (1.0 + choi.as_matrix().norm()),
            "composition formulas disagree by {diff:e}"
        );
    }
    Ok(HpMap::from_choi_unchecked(choi))
}

/// `ψ ∘ φ` via the block-wise summation `Σ_kl φ*(e_kl) ⊗ ψ(e_kl)`.
pub fn compose_schur(psi: &HpMap, phi: &HpMap) -> Result<HpMap> {
    if phi.dim_b() != psi.dim_a() {
        return Err(dim_mismatch("composition dimension mismatch"));
    }
    let choi = crate::ppt_square::block_schur_sum(&phi.choi.flip(), &psi.choi)?;
    Ok(HpMap::from_choi_unchecked(choi))
}

pub fn adjoint(phi: &HpMap) -> HpMap {
    phi.adjoint()
}

pub fn compose_transpose(phi: &HpMap) -> HpMap {
    phi.compose_transpose()
}

/// `<φ, ψ> = <C_φ, C_ψ>`.
pub fn map_pairing(phi: &HpMap, psi: &HpMap) -> Result<f64> {
    let z = phi.choi.pair(&psi.choi)?;
    let scale = 1.0 + phi.choi.as_matrix().norm() * psi.choi.as_matrix().norm();
    if z.im.abs() > 1e3 * HERM_TOL * scale {
        return Err(Error::ComplexPairing(z.im));
    }
    Ok(z.re)
}
