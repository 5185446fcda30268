use crate::error::Result;
use crate::matrix::{psd_part, BipartiteMatrix, CMat};

fn gamma(m: &CMat, da: usize, db: usize) -> CMat {
    BipartiteMatrix::new(da, db, m.clone()).expect("shape fixed by caller").partial_transpose().into_matrix()
}

/// Nearest PPT matrix by Dykstra's alternating projections onto the PSD cone
/// and its partial transpose. Returns the iterate from the Γ-PSD side and
/// whether the two sides agreed to `tol` before `max_iter`.
pub fn project_ppt(x: &BipartiteMatrix, max_iter: usize, tol: f64) -> Result<(BipartiteMatrix, bool)> {
    let (da, db) = x.dims();
    let scale = 1.0 + x.as_matrix().norm();
    let mut cur = x.as_matrix().clone();
    let n = cur.nrows();
    let mut p = CMat::zeros(n, n);
    let mut q = CMat::zeros(n, n);
    let mut converged = false;
    for _ in 0..max_iter {
        let y = psd_part(&(&cur + &p))?;
        p = &cur + &p - &y;
        let next = gamma(&psd_part(&gamma(&(&y + &q), da, db))?, da, db);
        q = &y + &q - &next;
        let step = (&next - &cur).norm();
        let split = (&y - &next).norm();
        cur = next;
        if step <= tol * scale && split <= tol * scale {
            converged = true;
            break;
        }
    }
    Ok((BipartiteMatrix::new(da, db, crate::matrix::symmetrize(&cur))?, converged))
}
