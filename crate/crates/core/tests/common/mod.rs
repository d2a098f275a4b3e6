//! Reference computations written directly from the definitions, sharing no
//! code with the library beyond the matrix type.

#![allow(dead_code)]

use ebnull::{CMatrix, C64};

pub fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

/// `Σ_k K_k X K_k*`.
pub fn apply(kraus: &[CMatrix], x: &CMatrix) -> CMatrix {
    let (rows, _) = kraus[0].shape();
    let mut out = CMatrix::zeros(rows, rows);
    for k in kraus {
        out += k * x * k.adjoint();
    }
    out
}

/// `Σ_ij E_ij ⊗ Φ(E_ij)`.
pub fn choi(kraus: &[CMatrix]) -> CMatrix {
    let (m, n) = kraus[0].shape();
    let mut out = CMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let block = apply(kraus, &unit(n, i, j));
            out.view_mut((i * m, j * m), (m, m)).copy_from(&block);
        }
    }
    out
}

/// `Φ^C(X) = Σ_ij tr(V_j* V_i X) E_ij`.
pub fn complement(kraus: &[CMatrix], x: &CMatrix) -> CMatrix {
    let d = kraus.len();
    CMatrix::from_fn(d, d, |i, j| (kraus[j].adjoint() * &kraus[i] * x).trace())
}

pub fn complement_choi(kraus: &[CMatrix]) -> CMatrix {
    let n = kraus[0].ncols();
    let d = kraus.len();
    let mut out = CMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            let block = complement(kraus, &unit(n, i, j));
            out.view_mut((i * d, j * d), (d, d)).copy_from(&block);
        }
    }
    out
}

fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).unscale(2.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}

/// Number of eigenvalues above `rel · λ_max` of a positive semidefinite matrix.
pub fn psd_rank(m: &CMatrix, rel: f64) -> usize {
    let ev = hermitian_eigenvalues(m);
    let max = ev.iter().copied().fold(0.0, f64::max);
    ev.iter().filter(|&&v| v > rel * max).count()
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).into_iter().fold(f64::INFINITY, f64::min)
}

/// The `n_out² × n_in²` matrix of `X ↦ Φ(X)` in the matrix-unit bases.
fn transfer(kraus: &[CMatrix]) -> CMatrix {
    let (m, n) = kraus[0].shape();
    let mut t = CMatrix::zeros(m * m, n * n);
    for i in 0..n {
        for j in 0..n {
            let img = apply(kraus, &unit(n, i, j));
            for a in 0..m {
                for b in 0..m {
                    t[(a * m + b, i * n + j)] = img[(a, b)];
                }
            }
        }
    }
    t
}

/// Basis of `{X : Φ(X) = 0}` from the eigenvectors of `T*T`.
pub fn kernel(kraus: &[CMatrix]) -> Vec<CMatrix> {
    let n = kraus[0].ncols();
    let t = transfer(kraus);
    let g = t.adjoint() * &t;
    let g = (&g + g.adjoint()).unscale(2.0);
    let eig = g.symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max).max(1.0);
    let mut out = Vec::new();
    for (k, &v) in eig.eigenvalues.iter().enumerate() {
        if v <= 1e-14 * max {
            let col = eig.eigenvectors.column(k);
            out.push(CMatrix::from_fn(n, n, |i, j| col[i * n + j]));
        }
    }
    out
}

pub fn trace_preservation(kraus: &[CMatrix]) -> f64 {
    let n = kraus[0].ncols();
    let mut s = -CMatrix::identity(n, n);
    for k in kraus {
        s += k.adjoint() * k;
    }
    s.norm()
}
