//! Rank-revealing helpers on complex matrices.
//!
//! Column-pivoted Gram-Schmidt with reorthogonalization. The complex SVD in
//! nalgebra can return an inaccurate factorization for some non-normal
//! inputs, so column spaces, ranks and least-squares solves go through
//! this instead.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// `a[:, piv] ≈ q · r[:, piv]` with orthonormal `q` and `r[:, piv]` upper
/// triangular.
pub(crate) struct PivotedQr {
    pub q: DMatrix<C64>,
    pub r: DMatrix<C64>,
    pub piv: Vec<usize>,
}

/// Stops once every remaining column is below `rel_tol` times the larger of
/// 1 and the largest column norm of `a`.
pub(crate) fn pivoted_qr(a: &DMatrix<C64>, rel_tol: f64) -> PivotedQr {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let scale = (0..n).map(|j| w.column(j).norm()).fold(0.0, f64::max);
    let mut qs: Vec<DVector<C64>> = Vec::new();
    let mut rows: Vec<Vec<C64>> = Vec::new();
    let mut piv = Vec::new();
    let cutoff = rel_tol * scale.max(1.0);
    if scale <= cutoff {
        return PivotedQr { q: DMatrix::zeros(m, 0), r: DMatrix::zeros(0, n), piv };
    }
    while qs.len() < m.min(n) {
        let (j, norm) = (0..n)
            .filter(|j| !piv.contains(j))
            .map(|j| (j, w.column(j).norm()))
            .fold((usize::MAX, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if j == usize::MAX || norm <= cutoff {
            break;
        }
        let mut q: DVector<C64> = w.column(j) / C64::new(norm, 0.0);
        for _ in 0..2 {
            for p in &qs {
                let c = p.dotc(&q);
                q -= p * c;
            }
        }
        let qn = q.norm();
        q /= C64::new(qn, 0.0);
        let mut row = vec![C64::default(); n];
        for (l, slot) in row.iter_mut().enumerate() {
            let c = q.dotc(&w.column(l));
            *slot = c;
            let upd = &q * c;
            let mut col = w.column_mut(l);
            col -= upd;
        }
        qs.push(q);
        rows.push(row);
        piv.push(j);
    }
    let q = DMatrix::from_columns(&qs);
    let r = DMatrix::from_fn(rows.len(), n, |k, l| rows[k][l]);
    PivotedQr { q, r, piv }
}

/// Orthonormal basis of the column space.
pub(crate) fn column_basis(a: &DMatrix<C64>, rel_tol: f64) -> DMatrix<C64> {
    if a.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    pivoted_qr(a, rel_tol).q
}

pub(crate) fn rank(a: &DMatrix<C64>, rel_tol: f64) -> usize {
    column_basis(a, rel_tol).ncols()
}

/// A basic solution of `a x = b` in the least-squares sense.
pub(crate) fn lstsq(a: &DMatrix<C64>, b: &DVector<C64>, rel_tol: f64) -> DVector<C64> {
    let qr = pivoted_qr(a, rel_tol);
    let k = qr.piv.len();
    let rhs = qr.q.adjoint() * b;
    let mut y = vec![C64::default(); k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        for l in i + 1..k {
            acc -= qr.r[(i, qr.piv[l])] * y[l];
        }
        y[i] = acc / qr.r[(i, qr.piv[i])];
    }
    let mut x = DVector::zeros(a.ncols());
    for (i, &p) in qr.piv.iter().enumerate() {
        x[p] = y[i];
    }
    x
}
