//! Alternating minimization of `η† H η` over unit vectors whose
//! matricization has rank at most `k`.

use crate::error::{Error, Result};
use crate::matrix::{c, eigh, min_eigen_pair, CMat, CVec};
use crate::random::{ginibre, rng};
use crate::schmidt::matricize;

use super::SolverOptions;

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub value: f64,
    /// Minimizer in the frame of `H` (unit norm, rank ≤ k).
    pub eta: CVec,
    pub restart: usize,
    pub converged: bool,
}

/// Orthonormal columns spanning the range of `m` (thin QR).
fn orthonormal_columns(m: CMat) -> CMat {
    let k = m.ncols();
    let q = m.qr().q();
    q.columns(0, k).into_owned()
}

/// `I_dA ⊗ V`, the embedding `u ↦ vec(U Vᵀ)`.
fn right_frame(da: usize, v: &CMat) -> CMat {
    crate::matrix::kron(&CMat::identity(da, da), v)
}

/// `U ⊗ I_dB`, the embedding `x ↦ vec(U Xᵀ)`.
fn left_frame(db: usize, u: &CMat) -> CMat {
    crate::matrix::kron(u, &CMat::identity(db, db))
}

fn restricted_min(h: &CMat, frame: &CMat) -> Result<(f64, CVec)> {
    let reduced = frame.adjoint() * h * frame;
    let (val, u) = min_eigen_pair(&crate::matrix::symmetrize(&reduced))?;
    let eta = frame * u;
    let n = eta.norm();
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((val, eta / c(n, 0.0)))
}

/// Top-`k` singular directions of the matricization: returns
/// (left frame `U`, right frame `V`) with `η ∈ span vec(U Xᵀ)` and
/// `η ∈ span vec(Y Vᵀ)`.
fn schmidt_frames(eta: &CVec, da: usize, db: usize, k: usize) -> Result<(CMat, CMat)> {
    let m = matricize(eta, da, db)?;
    let svd = m.svd(true, true);
    let u = svd.u.ok_or(Error::SvdFailure)?;
    let vt = svd.v_t.ok_or(Error::SvdFailure)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let left = CMat::from_fn(da, k, |i, r| u[(i, order[r])]);
    // M = Σ s u w†, and vec(u w†)_(i,l) = u_i conj(w_l), so the B-side frame is conj(w) = rows of v_t.
    let right = CMat::from_fn(db, k, |l, r| vt[(order[r], l)]);
    Ok((left, right))
}

/// Sweeps over which the current pace of descent is extrapolated when
/// deciding whether a run can still undercut `floor`.
const PACE_HORIZON: f64 = 50.0;

/// Random restarts kept alongside a Bloch-sphere grid.
const GRID_RESTARTS: usize = 16;

/// One alternating run. With `floor` the lowest value already reached
/// elsewhere, it stops once its pace of descent cannot reach `floor` soon.
fn run_from(
    h: &CMat,
    da: usize,
    db: usize,
    k: usize,
    mut v: CMat,
    floor: f64,
    opts: &SolverOptions,
) -> Result<(f64, CVec, bool)> {
    let mut best = f64::INFINITY;
    let mut eta = CVec::zeros(da * db);
    for _ in 0..opts.max_iter.max(1) {
        let (val_b, eta_b) = restricted_min(h, &right_frame(da, &v))?;
        let (u, _) = schmidt_frames(&eta_b, da, db, k)?;
        let (val_a, eta_a) = restricted_min(h, &left_frame(db, &u))?;
        let (_, v_next) = schmidt_frames(&eta_a, da, db, k)?;
        v = v_next;
        let val = val_a.min(val_b);
        let improved = best - val;
        if val < best {
            best = val;
            eta = if val_a <= val_b { eta_a } else { eta_b };
        }
        let reach = improved * PACE_HORIZON;
        if improved.abs() <= opts.tol * (1.0 + best.abs()) || (best > floor && reach < best - floor) {
            return Ok((best, eta, true));
        }
    }
    Ok((best, eta, false))
}

/// A few sweeps started from `eta` instead of random frames.
pub(crate) fn refine(h: &CMat, da: usize, db: usize, k: usize, eta: &CVec, sweeps: usize) -> Result<(f64, CVec)> {
    let (_, v) = schmidt_frames(eta, da, db, k)?;
    let opts = SolverOptions { max_iter: sweeps, ..SolverOptions::default() };
    let (val, out, _) = run_from(h, da, db, k, v, f64::INFINITY, &opts)?;
    Ok((val, out))
}

/// Starting B-frames: random restarts, plus a Bloch-sphere grid when the
/// search is over product vectors and one factor is a qubit.
fn grid_starts(h: &CMat, da: usize, db: usize) -> Result<Vec<(f64, CMat)>> {
    let (qubit_on_a, other) = match (da, db) {
        (_, 2) => (false, da),
        (2, _) => (true, db),
        _ => return Ok(Vec::new()),
    };
    let mut scored = Vec::new();
    let steps = 12;
    for ti in 0..=steps {
        let theta = std::f64::consts::PI * ti as f64 / steps as f64;
        let phis = if ti == 0 || ti == steps { 1 } else { 2 * steps };
        for pi in 0..phis {
            let ph = 2.0 * std::f64::consts::PI * pi as f64 / phis as f64;
            let q = CMat::from_column_slice(
                2,
                1,
                &[c((theta / 2.0).cos(), 0.0), c(ph.cos(), ph.sin()) * (theta / 2.0).sin()],
            );
            let frame = if qubit_on_a { left_frame(other, &q) } else { right_frame(other, &q) };
            let (val, eta) = restricted_min(h, &frame)?;
            scored.push((val, eta));
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored
        .into_iter()
        .take(4)
        .map(|(val, eta)| Ok((val, schmidt_frames(&eta, da, db, 1)?.1)))
        .collect()
}

/// Minimizes `η† H η` over unit `η ∈ C^dA ⊗ C^dB` of Schmidt rank ≤ `k`.
pub fn minimize(h: &CMat, da: usize, db: usize, k: usize, opts: &SolverOptions) -> Result<SeesawResult> {
    if h.shape() != (da * db, da * db) {
        return Err(crate::error::dim_mismatch(format!("operator {:?} vs {da}⊗{db}", h.shape())));
    }
    if k == 0 || k > da.min(db) {
        return Err(Error::InvalidArgument(format!("Schmidt rank bound {k} outside 1..={}", da.min(db))));
    }
    if k == da.min(db) {
        let (vals, vecs) = eigh(h)?;
        return Ok(SeesawResult { value: vals[0], eta: vecs.column(0).into_owned(), restart: 0, converged: true });
    }
    // Grid starts run first and in order; random restarts only consult their
    // floor, so the outcome does not depend on the thread count.
    let grid = if k == 1 { grid_starts(h, da, db)? } else { Vec::new() };
    let offset = grid.len();
    let mut results: Vec<Result<(f64, CVec, bool)>> = Vec::new();
    let mut floor = grid.first().map_or(f64::INFINITY, |g| g.0);
    for (_, v) in grid {
        let out = run_from(h, da, db, k, v, floor, opts)?;
        floor = floor.min(out.0);
        results.push(Ok(out));
    }
    // A qubit grid already covers the sphere, so fewer random restarts are needed.
    let restarts = if offset > 0 { opts.restarts.clamp(1, GRID_RESTARTS) } else { opts.restarts.max(1) };
    let starts: Vec<CMat> = (0..restarts)
        .map(|r| orthonormal_columns(ginibre(&mut rng(opts.seed, r as u64), db, k)))
        .collect();
    let run = |i: usize| run_from(h, da, db, k, starts[i].clone(), floor, opts);
    let random: Vec<Result<(f64, CVec, bool)>> = if opts.threads > 1 {
        let chunk = starts.len().div_ceil(opts.threads);
        let idx: Vec<usize> = (0..starts.len()).collect();
        std::thread::scope(|s| {
            let handles: Vec<_> = idx
                .chunks(chunk)
                .map(|ch| s.spawn(move || ch.iter().map(|&i| run(i)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("seesaw worker panicked")).collect()
        })
    } else {
        (0..starts.len()).map(run).collect()
    };
    results.extend(random);
    let mut best: Option<SeesawResult> = None;
    for (i, res) in results.into_iter().enumerate() {
        let (value, eta, converged) = res?;
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(SeesawResult { value, eta, restart: i.saturating_sub(offset), converged });
        }
    }
    best.ok_or(Error::InvalidArgument("no restarts".into()))
}

/// Squared-Schmidt mass carried by the top `k` coefficients of a unit vector.
pub fn top_k_mass(eta: &CVec, da: usize, db: usize, k: usize) -> Result<f64> {
    let m = matricize(eta, da, db)?;
    let mut s: Vec<f64> = m.singular_values().iter().map(|x| x * x).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = s.iter().sum();
    Ok(s.iter().take(k).sum::<f64>() / total)
}
