//! Seeded random generation of test and construction inputs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{CMatrix, CVector, OperatorSubspace, Tolerance, hermitian_part, orthonormalize_hermitian};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Complex Ginibre matrix.
pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn gaussian_vector(rng: &mut impl Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| gaussian(rng))
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> CVector {
    let v = gaussian_vector(rng, n);
    let norm = v.norm();
    v.unscale(norm)
}

/// `G G* / tr(G G*)` for a Ginibre `G`.
pub fn density(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = ginibre(rng, n, n);
    let p = &g * g.adjoint();
    let t = p.trace().re;
    hermitian_part(&p.unscale(t))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = ginibre(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random Hermitian traceless matrix with unit Frobenius norm.
pub fn traceless_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = ginibre(rng, n, n);
    let mut h = hermitian_part(&g);
    let shift = h.trace() / Complex64::new(n as f64, 0.0);
    for i in 0..n {
        h[(i, i)] -= shift;
    }
    let norm = h.norm();
    h.unscale(norm)
}

/// Random self-adjoint subspace of traceless `n × n` matrices of dimension
/// `dim` (real span of random traceless Hermitian matrices).
pub fn traceless_subspace(rng: &mut impl Rng, n: usize, dim: usize, tol: &Tolerance) -> OperatorSubspace {
    assert!(dim < n * n, "traceless subspaces have dimension below n^2");
    loop {
        let spanners: Vec<CMatrix> = (0..dim).map(|_| traceless_hermitian(rng, n)).collect();
        let s = orthonormalize_hermitian(n, &spanners, tol).expect("consistent shapes");
        if s.dim() == dim {
            return s;
        }
    }
}
