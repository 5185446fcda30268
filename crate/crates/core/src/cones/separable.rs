//! k-superpositivity: exact tests where they exist, otherwise a witness
//! search for refutation and a Frank–Wolfe fit for construction.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::json::VectorJson;
use crate::maps::HpMap;
use crate::matrix::{eigh, pair_raw, re, BipartiteMatrix, CMat, CVec};

use super::seesaw::{minimize, refine, top_k_mass};
use super::{is_cp, is_ppt_map, witness_json, Certificate, MembershipVerdict, SolverOptions, Status};

/// `min ½ wᵀGw − bᵀw` over `w ≥ 0` (Lawson–Hanson active set).
pub(crate) fn nnls_gram(g: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let m = b.len();
    let mut w = DVector::zeros(m);
    let mut passive = vec![false; m];
    let eps = 1e-12 * (1.0 + b.amax());
    for _ in 0..3 * m + 10 {
        let grad = b - g * &w;
        let candidate = (0..m).filter(|&j| !passive[j]).max_by(|&a, &c| grad[a].total_cmp(&grad[c]));
        let Some(j) = candidate else { break };
        if grad[j] <= eps {
            break;
        }
        passive[j] = true;
        for _ in 0..3 * m + 10 {
            let idx: Vec<usize> = (0..m).filter(|&i| passive[i]).collect();
            let gp = DMatrix::from_fn(idx.len(), idx.len(), |r, c| g[(idx[r], idx[c])]);
            let bp = DVector::from_fn(idx.len(), |r, _| b[idx[r]]);
            let sp = solve_spd(&gp, &bp);
            if sp.iter().all(|x| *x > 0.0) {
                for (r, &i) in idx.iter().enumerate() {
                    w[i] = sp[r];
                }
                break;
            }
            let mut alpha = 1.0_f64;
            for (r, &i) in idx.iter().enumerate() {
                if sp[r] <= 0.0 {
                    let denom = w[i] - sp[r];
                    if denom > 0.0 {
                        alpha = alpha.min(w[i] / denom);
                    }
                }
            }
            for (r, &i) in idx.iter().enumerate() {
                w[i] += alpha * (sp[r] - w[i]);
                if w[i] <= 1e-15 {
                    w[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    w
}

fn solve_spd(g: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = g.nrows();
    let ridge = 1e-13 * (1.0 + g.diagonal().amax());
    let reg = g + DMatrix::identity(n, n) * ridge;
    match reg.clone().cholesky() {
        Some(ch) => ch.solve(b),
        None => reg.pseudo_inverse(1e-12).map(|p| p * b).unwrap_or_else(|_| DVector::zeros(n)),
    }
}

struct Fit {
    weights: Vec<f64>,
    atoms: Vec<CVec>,
    residual: f64,
}

/// Fully corrective Frank–Wolfe fit of `C` by `Σ w_j η_j η_j†` with
/// rank-≤k atoms; the linear oracle is the seesaw on the negated residual.
fn conic_fit(c: &CMat, da: usize, db: usize, k: usize, opts: &SolverOptions) -> Result<Fit> {
    let target = c.norm() * opts.fit_tol.max(100.0 * opts.tol);
    let lmo_opts = SolverOptions { restarts: opts.restarts.clamp(1, 8), max_iter: opts.max_iter.min(200), ..opts.clone() };
    let mut atoms: Vec<CVec> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut residual_mat = c.clone();
    // Seed with the spectral atoms' Schmidt truncations.
    let (vals, vecs) = eigh(c)?;
    for (i, v) in vals.iter().enumerate() {
        if *v > 0.0 {
            for cand in truncations(&vecs.column(i).into_owned(), da, db, k)? {
                atoms.push(cand);
            }
        }
    }
    let mut residual = residual_mat.norm();
    for it in 0..opts.fw_iter {
        if !atoms.is_empty() {
            let m = atoms.len();
            let g = DMatrix::from_fn(m, m, |i, j| atoms[i].dotc(&atoms[j]).norm_sqr());
            let b = DVector::from_fn(m, |i, _| (atoms[i].adjoint() * c * &atoms[i])[(0, 0)].re);
            let w = nnls_gram(&g, &b);
            let keep: Vec<usize> = (0..m).filter(|&i| w[i] > 0.0).collect();
            atoms = keep.iter().map(|&i| atoms[i].clone()).collect();
            weights = keep.iter().map(|&i| w[i]).collect();
            residual_mat = c.clone();
            for (a, w) in atoms.iter().zip(&weights) {
                residual_mat -= (a * a.adjoint()) * re(*w);
            }
            residual = residual_mat.norm();
        }
        if residual <= target {
            break;
        }
        for _ in 0..4 {
            polish(c, &mut atoms, &mut weights, da, db, k)?;
        }
        let lmo = minimize(&(-&residual_mat), da, db, k, &lmo_opts.clone().with_seed(opts.seed.wrapping_add(it as u64 + 1)))?;
        if -lmo.value <= 1e-3 * target / (1.0 + c.norm()) {
            break;
        }
        atoms.push(lmo.eta);
    }
    Ok(Fit { weights, atoms, residual })
}

/// One pass of block-coordinate moves on the atoms: each atom is re-optimized
/// against the residual that excludes it.
fn polish(c: &CMat, atoms: &mut [CVec], weights: &mut [f64], da: usize, db: usize, k: usize) -> Result<()> {
    let mut residual = c.clone();
    for (a, w) in atoms.iter().zip(weights.iter()) {
        residual -= (a * a.adjoint()) * re(*w);
    }
    for j in 0..atoms.len() {
        let own = (&atoms[j] * atoms[j].adjoint()) * re(weights[j]);
        let partial = &residual + &own;
        let (val, eta) = refine(&(-&partial), da, db, k, &atoms[j], 3)?;
        let gain = -val;
        if gain > 0.0 {
            atoms[j] = eta;
            weights[j] = gain;
            residual = partial - (&atoms[j] * atoms[j].adjoint()) * re(gain);
        }
    }
    Ok(())
}

fn truncations(v: &CVec, da: usize, db: usize, k: usize) -> Result<Vec<CVec>> {
    let sd = crate::schmidt::schmidt(v, da, db)?;
    let mut out = CVec::zeros(da * db);
    for r in 0..k.min(sd.coefficients.len()) {
        out += crate::matrix::kron(
            &CMat::from_column_slice(da, 1, sd.left[r].as_slice()),
            &CMat::from_column_slice(db, 1, sd.right[r].as_slice()),
        )
        .column(0)
            * re(sd.coefficients[r]);
    }
    let n = out.norm();
    Ok(if n > 0.0 { vec![out / re(n)] } else { vec![] })
}

/// Search for ψ ∈ P(k) with `<C, C_ψ> < 0`.
fn witness_search(choi: &BipartiteMatrix, k: usize, opts: &SolverOptions) -> Result<Option<(f64, CMat, String)>> {
    let (da, db) = choi.dims();
    let c = choi.as_matrix();
    let threshold = opts.scaled_tol(c);
    let mut best: Option<(f64, CMat, String)> = None;
    let mut consider = |value: f64, w: CMat, note: &str| {
        if value < -threshold && best.as_ref().is_none_or(|b| value < b.0) {
            best = Some((value, w, note.to_string()));
        }
    };
    if k == 1 {
        let gamma = choi.partial_transpose();
        let (vals, vecs) = eigh(gamma.as_matrix())?;
        let v = vecs.column(0).map(|z| z.conj());
        let w = BipartiteMatrix::new(da, db, &v * v.adjoint())?.partial_transpose().into_matrix();
        consider(vals[0], w, "completely copositive witness");
    }
    // W = μ_k(ω) I − ω ω† is block-positive on rank-≤k vectors; pair with ζ = conj(ω) eigenvectors of C.
    let (vals, vecs) = eigh(c)?;
    let tr: f64 = (0..c.nrows()).map(|i| c[(i, i)].re).sum();
    for (i, lam) in vals.iter().enumerate().rev() {
        let zeta = vecs.column(i).into_owned();
        let mu = top_k_mass(&zeta, da, db, k)?;
        let omega = zeta.map(|z| z.conj());
        let w = CMat::identity(c.nrows(), c.nrows()) * re(mu) - &omega * omega.adjoint();
        consider(mu * tr - lam, w, "Schmidt-number witness");
    }
    if let Some((_, w, note)) = &best {
        let value = pair_raw(c, w)?.re;
        return Ok(Some((value, w.clone(), note.clone())));
    }
    Ok(None)
}

pub fn is_superpositive_k(phi: &HpMap, k: usize, opts: &SolverOptions) -> Result<MembershipVerdict> {
    let (da, db) = phi.dims();
    let m = da.min(db);
    if k == 0 || k > m {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={m}")));
    }
    if k == m {
        return is_cp(phi, opts);
    }
    if k == 1 && da * db <= 6 {
        let v = is_ppt_map(phi, opts)?;
        if v.status != Status::NonMember {
            return Ok(v);
        }
        let Some(Certificate::Eigenvector { vector, eigenvalue, partial_transpose }) = &v.certificate else {
            return Ok(v);
        };
        // Turn the eigenvector into a witness map in P₁: a CP map, or a CCP map via Γ.
        let x = vector.to_vector()?.map(|z| z.conj());
        let proj = &x * x.adjoint();
        let w = if *partial_transpose {
            BipartiteMatrix::new(da, db, proj)?.partial_transpose().into_matrix()
        } else {
            proj
        };
        let note = if *partial_transpose { "completely copositive witness" } else { "completely positive witness" };
        let cert = Certificate::Witness { map: witness_json(da, db, w)?, pairing: *eigenvalue, note: note.into() };
        return Ok(MembershipVerdict::non_member(*eigenvalue, cert));
    }
    let cp = is_cp(phi, opts)?;
    if cp.is_non_member() {
        if let Some(Certificate::Eigenvector { vector, eigenvalue, .. }) = &cp.certificate {
            let x = vector.to_vector()?.map(|z| z.conj());
            let cert = Certificate::Witness {
                map: witness_json(da, db, &x * x.adjoint())?,
                pairing: *eigenvalue,
                note: "completely positive witness".into(),
            };
            return Ok(MembershipVerdict::non_member(*eigenvalue, cert));
        }
    }
    let choi = phi.choi();
    if let Some((value, w, note)) = witness_search(choi, k, opts)? {
        let cert = Certificate::Witness { map: witness_json(da, db, w)?, pairing: value, note };
        return Ok(MembershipVerdict::non_member(value, cert));
    }
    let fit = conic_fit(choi.as_matrix(), da, db, k, opts)?;
    let target = choi.as_matrix().norm() * opts.fit_tol.max(100.0 * opts.tol);
    let cert = Certificate::RankDecomposition {
        weights: fit.weights.clone(),
        vectors: fit.atoms.iter().map(VectorJson::from_vector).collect(),
        rank: k,
        residual: fit.residual,
    };
    if fit.residual <= target {
        return Ok(MembershipVerdict::member(-fit.residual).with_certificate(cert));
    }
    Ok(MembershipVerdict::unknown(-fit.residual)
        .with_certificate(cert)
        .with_note("no witness found and the conic fit did not close"))
}
