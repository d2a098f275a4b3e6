//! Dense complex-matrix and operator-subspace arithmetic.
//!
//! Operators are `nalgebra` dense matrices over `Complex64`. Vectorization is
//! column stacking, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`; because `nalgebra`
//! stores matrices column-major, [`vec_op`] is a plain copy of the storage.
//!
//! Subspaces of `M_n` carry an orthonormal basis under the trace inner product
//! `⟨A, B⟩ = tr(B* A)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const IMAG: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical tolerance policy shared by every routine in the crate.
///
/// `abs` bounds residuals of identities that should hold exactly; `rank_gap`
/// is the relative singular-value (or eigenvalue) threshold below which a
/// direction counts as zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rank_gap: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-9,
            rank_gap: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rank_gap: f64) -> Result<Self> {
        if !(abs > 0.0 && abs.is_finite()) {
            return Err(Error::InvalidTolerance(format!("abs must be positive, got {abs}")));
        }
        if !(rank_gap > 0.0 && rank_gap < 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "rank_gap must lie in (0, 1), got {rank_gap}"
            )));
        }
        Ok(Tolerance { abs, rank_gap })
    }

    /// Bound for identities derived through several floating-point steps
    /// (adjointness, lemma identities, containment checks).
    pub fn check(&self) -> f64 {
        10.0 * self.abs
    }
}

/// `tr(B* A)`.
pub fn trace_inner_product(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::dims(format!("{:?}", a.shape()), format!("{:?}", b.shape())));
    }
    Ok(hs(a, b))
}

pub(crate) fn hs(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum()
}

pub fn vec_op(m: &CMatrix) -> CVector {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `E_ij = e_i e_j*` (zero-based indices).
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

pub fn basis_vector(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = ONE;
    v
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -IMAG, IMAG, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// `(A − A*) / 2i`, so that `A = hermitian_part(A) + i·skew_part(A)`.
pub fn skew_part(a: &CMatrix) -> CMatrix {
    (a - a.adjoint()) * Complex64::new(0.0, -0.5)
}

pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

pub fn is_hermitian(a: &CMatrix, tol: &Tolerance) -> bool {
    hermiticity_residual(a) <= tol.abs * a.norm().max(1.0)
}

/// `max(‖A² − A‖, ‖A − A*‖)`.
pub fn projection_residual(a: &CMatrix) -> f64 {
    (a * a - a).norm().max(hermiticity_residual(a))
}

pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (u.adjoint() * u - identity(u.ncols())).norm()
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending
/// order; eigenvectors are the columns of the returned matrix.
pub fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    eigh(a).0.last().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(a: &CMatrix) -> f64 {
    eigh(a).0.first().copied().unwrap_or(0.0)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rank_gap · σ_max`.
pub fn numerical_rank(values: &[f64], tol: &Tolerance) -> usize {
    let max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    values.iter().filter(|v| v.abs() > tol.rank_gap * max).count()
}

pub fn matrix_rank(m: &CMatrix, tol: &Tolerance) -> usize {
    numerical_rank(&singular_values(m), tol)
}

/// Orthonormal Hermitian basis of `M_n`: off-diagonal symmetric and
/// antisymmetric pairs, then the diagonal generalized Gell-Mann matrices,
/// then `I/√n` last. Dropping the last element gives a basis of the
/// traceless matrices.
pub fn hermitian_basis(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(n * n);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = CMatrix::zeros(n, n);
            sym[(i, j)] = Complex64::new(r, 0.0);
            sym[(j, i)] = Complex64::new(r, 0.0);
            out.push(sym);
            let mut anti = CMatrix::zeros(n, n);
            anti[(i, j)] = Complex64::new(0.0, -r);
            anti[(j, i)] = Complex64::new(0.0, r);
            out.push(anti);
        }
    }
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut d = CMatrix::zeros(n, n);
        for k in 0..l {
            d[(k, k)] = Complex64::new(1.0 / norm, 0.0);
        }
        d[(l, l)] = Complex64::new(-(l as f64) / norm, 0.0);
        out.push(d);
    }
    if n > 0 {
        out.push(identity(n).scale(1.0 / (n as f64).sqrt()));
    }
    out
}

/// A subspace of `n × n` matrices held by an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSubspace {
    n: usize,
    basis: Vec<CMatrix>,
    self_adjoint: bool,
    traceless: bool,
}

impl OperatorSubspace {
    pub fn zero(n: usize) -> Self {
        OperatorSubspace {
            n,
            basis: Vec::new(),
            self_adjoint: true,
            traceless: true,
        }
    }

    /// All of `M_n`, with a Hermitian basis.
    pub fn full(n: usize) -> Self {
        OperatorSubspace {
            n,
            basis: hermitian_basis(n),
            self_adjoint: true,
            traceless: n == 0,
        }
    }

    /// `M_n(ℂ)₀`, with a Hermitian basis.
    pub fn traceless(n: usize) -> Self {
        let mut basis = hermitian_basis(n);
        basis.pop();
        OperatorSubspace {
            n,
            basis,
            self_adjoint: true,
            traceless: true,
        }
    }

    /// Wraps a basis that is already orthonormal; the flags are computed.
    pub fn from_orthonormal(n: usize, basis: Vec<CMatrix>, tol: &Tolerance) -> Self {
        let mut s = OperatorSubspace {
            n,
            basis,
            self_adjoint: false,
            traceless: false,
        };
        s.refresh_flags(tol);
        s
    }

    fn refresh_flags(&mut self, tol: &Tolerance) {
        self.self_adjoint = self.self_adjoint_residual() <= tol.check();
        self.traceless = self.trace_residual() <= tol.check();
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<CMatrix> {
        self.basis
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    pub fn is_traceless(&self) -> bool {
        self.traceless
    }

    pub fn coefficients(&self, a: &CMatrix) -> Vec<Complex64> {
        self.basis.iter().map(|b| hs(a, b)).collect()
    }

    pub fn project(&self, a: &CMatrix) -> CMatrix {
        let mut p = CMatrix::zeros(self.n, self.n);
        for b in &self.basis {
            p += b * hs(a, b);
        }
        p
    }

    /// `‖A − P(A)‖_F`.
    pub fn distance(&self, a: &CMatrix) -> f64 {
        (a - self.project(a)).norm()
    }

    /// `‖A − P(A)‖_F / ‖A‖_F`, zero for the zero matrix.
    pub fn relative_distance(&self, a: &CMatrix) -> f64 {
        let norm = a.norm();
        if norm == 0.0 {
            0.0
        } else {
            self.distance(a) / norm
        }
    }

    pub fn contains(&self, a: &CMatrix, tol: &Tolerance) -> bool {
        a.shape() == (self.n, self.n) && self.relative_distance(a) <= tol.check()
    }

    /// Largest relative distance from a basis element of `other` to `self`.
    pub fn containment_residual(&self, other: &OperatorSubspace) -> f64 {
        other
            .basis
            .iter()
            .map(|b| self.relative_distance(b))
            .fold(0.0, f64::max)
    }

    /// Largest mutual containment residual; infinite when dimensions differ.
    pub fn span_distance(&self, other: &OperatorSubspace) -> f64 {
        if self.n != other.n || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.containment_residual(other)
            .max(other.containment_residual(self))
    }

    pub fn gram_residual(&self) -> f64 {
        let k = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..k {
            for j in 0..k {
                let expected = if i == j { ONE } else { ZERO };
                worst = worst.max((hs(&self.basis[i], &self.basis[j]) - expected).norm());
            }
        }
        worst
    }

    pub fn self_adjoint_residual(&self) -> f64 {
        self.basis
            .iter()
            .map(|b| self.distance(&b.adjoint()))
            .fold(0.0, f64::max)
    }

    pub fn trace_residual(&self) -> f64 {
        self.basis.iter().map(|b| b.trace().norm()).fold(0.0, f64::max)
    }

    /// Re-expresses a self-adjoint subspace in a basis of Hermitian matrices.
    /// Returns `None` if the subspace is not self-adjoint.
    pub fn to_hermitian(&self, tol: &Tolerance) -> Option<OperatorSubspace> {
        if !self.self_adjoint {
            return None;
        }
        let h = orthonormalize_hermitian(self.n, &self.basis, tol).ok()?;
        (h.dim() == self.dim()).then_some(h)
    }
}

fn check_shapes(n: usize, mats: &[CMatrix]) -> Result<()> {
    for m in mats {
        if m.shape() != (n, n) {
            return Err(Error::dims(format!("({n}, {n})"), format!("{:?}", m.shape())));
        }
    }
    Ok(())
}

/// Modified Gram–Schmidt (two passes) over `spanners` in input order.
/// A spanner whose residual falls below `rank_gap · max‖spanner‖` is dropped.
pub fn orthonormalize(n: usize, spanners: &[CMatrix], tol: &Tolerance) -> Result<OperatorSubspace> {
    check_shapes(n, spanners)?;
    let basis = gram_schmidt(spanners, &[], tol, false);
    Ok(OperatorSubspace::from_orthonormal(n, basis, tol))
}

/// Like [`orthonormalize`] but spans `{A, A*}` for each spanner and returns a
/// Hermitian basis, by orthonormalizing the Hermitian coordinates
/// `(A + A*)/2` and `(A − A*)/2i` with real coefficients.
pub fn orthonormalize_hermitian(
    n: usize,
    spanners: &[CMatrix],
    tol: &Tolerance,
) -> Result<OperatorSubspace> {
    check_shapes(n, spanners)?;
    let parts: Vec<CMatrix> = spanners
        .iter()
        .flat_map(|a| [hermitian_part(a), skew_part(a)])
        .collect();
    let basis = gram_schmidt(&parts, &[], tol, true);
    Ok(OperatorSubspace::from_orthonormal(n, basis, tol))
}

/// Gram–Schmidt of `spanners` against a fixed orthonormal set `against`
/// (which is not included in the output). With `real`, coefficients are
/// restricted to their real parts and outputs are re-symmetrized, which keeps
/// Hermitian inputs Hermitian.
fn gram_schmidt(
    spanners: &[CMatrix],
    against: &[CMatrix],
    tol: &Tolerance,
    real: bool,
) -> Vec<CMatrix> {
    let scale = spanners.iter().map(|s| s.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let threshold = tol.rank_gap * scale;
    let mut out: Vec<CMatrix> = Vec::new();
    for s in spanners {
        let mut v = s.clone();
        for _ in 0..2 {
            for q in against.iter().chain(out.iter()) {
                let mut c = hs(&v, q);
                if real {
                    c = Complex64::new(c.re, 0.0);
                }
                v -= q * c;
            }
        }
        if real {
            v = hermitian_part(&v);
        }
        let norm = v.norm();
        if norm > threshold {
            out.push(v.unscale(norm));
        }
    }
    out
}

/// `S^⊥ ∩ within`. When both subspaces are self-adjoint the result has a
/// Hermitian basis.
pub fn orthogonal_complement(
    s: &OperatorSubspace,
    within: &OperatorSubspace,
    tol: &Tolerance,
) -> Result<OperatorSubspace> {
    if s.n != within.n {
        return Err(Error::dims(format!("n = {}", within.n), format!("n = {}", s.n)));
    }
    let residual = within.containment_residual(s);
    if residual > tol.check() {
        return Err(Error::ContainmentViolation { residual });
    }
    let expected = within.dim() - s.dim().min(within.dim());
    let hermitian = s.self_adjoint && within.self_adjoint;
    let (sb, wb) = if hermitian {
        let sh = orthonormalize_hermitian(s.n, &s.basis, tol)?;
        let wh = orthonormalize_hermitian(within.n, &within.basis, tol)?;
        (sh.basis, wh.basis)
    } else {
        (s.basis.clone(), within.basis.clone())
    };
    // Project the ambient basis off S, then orthonormalize what is left.
    let mut residuals = Vec::with_capacity(wb.len());
    for w in &wb {
        let mut v = w.clone();
        for _ in 0..2 {
            for q in &sb {
                let mut c = hs(&v, q);
                if hermitian {
                    c = Complex64::new(c.re, 0.0);
                }
                v -= q * c;
            }
        }
        residuals.push(v);
    }
    let mut basis = Vec::new();
    for r in &residuals {
        let mut v = r.clone();
        for _ in 0..2 {
            for q in sb.iter().chain(basis.iter()) {
                let mut c = hs(&v, q);
                if hermitian {
                    c = Complex64::new(c.re, 0.0);
                }
                v -= q * c;
            }
        }
        if hermitian {
            v = hermitian_part(&v);
        }
        let norm = v.norm();
        if norm > tol.rank_gap {
            basis.push(v.unscale(norm));
        }
    }
    if basis.len() != expected {
        basis = complement_by_projector(&sb, &wb, expected, hermitian);
    }
    Ok(OperatorSubspace::from_orthonormal(s.n, basis, tol))
}

/// Complement through the eigenvectors of `I − C C*`, where `C` holds the
/// coordinates of `S` in the ambient basis.
fn complement_by_projector(
    sb: &[CMatrix],
    wb: &[CMatrix],
    expected: usize,
    hermitian: bool,
) -> Vec<CMatrix> {
    let k = wb.len();
    let mut c = CMatrix::zeros(k, sb.len());
    for (j, s) in sb.iter().enumerate() {
        for (i, w) in wb.iter().enumerate() {
            let mut z = hs(s, w);
            if hermitian {
                z = Complex64::new(z.re, 0.0);
            }
            c[(i, j)] = z;
        }
    }
    let proj = CMatrix::identity(k, k) - &c * c.adjoint();
    let (_, vecs) = eigh(&proj);
    (0..expected)
        .map(|col| {
            let mut m = CMatrix::zeros(wb[0].nrows(), wb[0].ncols());
            for (i, w) in wb.iter().enumerate() {
                m += w * vecs[(i, col)];
            }
            let m = if hermitian { hermitian_part(&m) } else { m };
            let norm = m.norm();
            m.unscale(norm)
        })
        .collect()
}

/// Kernel of a linear map on vectorized `n_in × n_in` operators, from the
/// singular value decomposition of its matrix `m` (any number of rows).
pub fn kernel_of_linear_map(m: &CMatrix, n_in: usize, tol: &Tolerance) -> Result<OperatorSubspace> {
    let cols = n_in * n_in;
    if m.ncols() != cols {
        return Err(Error::dims(format!("{cols} columns"), format!("{} columns", m.ncols())));
    }
    if cols == 0 {
        return Ok(OperatorSubspace::zero(n_in));
    }
    // Pad to square so the SVD returns the full right singular basis.
    let rows = m.nrows().max(cols);
    let mut padded = CMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma = &svd.singular_values;
    let max = sigma.iter().fold(0.0_f64, |a, &b| a.max(b));
    let mut idx: Vec<usize> = (0..sigma.len())
        .filter(|&i| max == 0.0 || sigma[i] <= tol.rank_gap * max)
        .collect();
    idx.sort_by(|&a, &b| sigma[a].total_cmp(&sigma[b]).then(a.cmp(&b)));
    let basis = idx
        .iter()
        .map(|&i| {
            let v: CVector = v_t.row(i).adjoint();
            unvec(&v, n_in, n_in)
        })
        .collect();
    Ok(OperatorSubspace::from_orthonormal(n_in, basis, tol))
}

/// Orthonormal basis (as matrix columns) of the span of `vectors`.
pub fn orthonormal_columns(n: usize, vectors: &[CVector], tol: &Tolerance) -> CMatrix {
    if vectors.is_empty() {
        return CMatrix::zeros(n, 0);
    }
    let mut m = CMatrix::zeros(n, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested left singular vectors");
    let sigma = &svd.singular_values;
    let max = sigma.iter().fold(0.0_f64, |a, &b| a.max(b));
    if max == 0.0 {
        return CMatrix::zeros(n, 0);
    }
    let keep: Vec<usize> = (0..sigma.len())
        .filter(|&i| sigma[i] > tol.rank_gap * max)
        .collect();
    let mut q = CMatrix::zeros(n, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        q.set_column(dst, &u.column(src));
    }
    q
}

/// Orthogonal projection onto `span(vectors)`.
pub fn projection_onto_span(n: usize, vectors: &[CVector], tol: &Tolerance) -> Result<CMatrix> {
    for v in vectors {
        if v.len() != n {
            return Err(Error::dims(n, v.len()));
        }
    }
    let q = orthonormal_columns(n, vectors, tol);
    Ok(&q * q.adjoint())
}

/// Orthonormal basis of the range of a Hermitian projection (eigenvalues
/// above one half), as matrix columns.
pub fn projection_range(p: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh(p);
    let k = vals.iter().filter(|&&v| v > 0.5).count();
    vecs.columns(0, k).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn inner_product_examples() {
        let i2 = identity(2);
        assert!(trace_inner_product(&i2, &pauli_z()).unwrap().norm() < 1e-15);
        assert!((trace_inner_product(&pauli_x(), &pauli_x()).unwrap() - c(2.0)).norm() < 1e-15);
        let e11 = matrix_unit(2, 0, 0);
        let b = &e11 + matrix_unit(2, 0, 1);
        assert!((trace_inner_product(&e11, &b).unwrap() - ONE).norm() < 1e-15);
        assert!(trace_inner_product(&e11, &identity(3)).is_err());
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let a = CMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 - 0.5, j as f64 * 0.3));
        let b = CMatrix::from_fn(3, 3, |i, j| Complex64::new((i * j) as f64, 1.0 - i as f64));
        let ab = trace_inner_product(&a, &b).unwrap();
        let ba = trace_inner_product(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);
    }

    #[test]
    fn orthonormalize_examples() {
        let z = pauli_z();
        let s = orthonormalize(2, &[z.clone(), z.scale(2.0)], &tol()).unwrap();
        assert_eq!(s.dim(), 1);
        assert!((&s.basis()[0] - z.scale(1.0 / 2f64.sqrt())).norm() < 1e-14);

        let s = orthonormalize(2, &[pauli_x(), pauli_y(), pauli_z()], &tol()).unwrap();
        assert_eq!(s.dim(), 3);
        assert!(s.gram_residual() < 1e-14);
        assert!(s.is_self_adjoint() && s.is_traceless());

        let s = orthonormalize(2, &[], &tol()).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn hermitian_basis_is_orthonormal() {
        for n in 1..5 {
            let b = OperatorSubspace::full(n);
            assert_eq!(b.dim(), n * n);
            assert!(b.gram_residual() < 1e-14);
            assert!(b.basis().iter().all(|m| hermiticity_residual(m) < 1e-15));
            let t = OperatorSubspace::traceless(n);
            assert!(t.trace_residual() < 1e-14);
        }
    }

    #[test]
    fn complement_examples() {
        let t = OperatorSubspace::traceless(2);
        let z = orthonormalize(2, &[pauli_z()], &tol()).unwrap();
        let c = orthogonal_complement(&z, &t, &tol()).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.basis().iter().all(|m| hermiticity_residual(m) < 1e-14));
        let xy = orthonormalize(2, &[pauli_x(), pauli_y()], &tol()).unwrap();
        assert!(c.span_distance(&xy) < 1e-12);

        let c = orthogonal_complement(&OperatorSubspace::zero(2), &t, &tol()).unwrap();
        assert_eq!(c.dim(), 3);
        let c = orthogonal_complement(&t, &t, &tol()).unwrap();
        assert_eq!(c.dim(), 0);
    }

    #[test]
    fn complement_rejects_non_contained() {
        let t = OperatorSubspace::traceless(2);
        let i = orthonormalize(2, &[identity(2)], &tol()).unwrap();
        assert!(matches!(
            orthogonal_complement(&i, &t, &tol()),
            Err(Error::ContainmentViolation { .. })
        ));
    }

    #[test]
    fn kernel_examples() {
        // identity map
        let id = CMatrix::identity(4, 4);
        assert_eq!(kernel_of_linear_map(&id, 2, &tol()).unwrap().dim(), 0);
        // X -> tr(X) I / 2 : M vec(X) = vec(I) vec(I)^T vec(X) / 2
        let vi = vec_op(&identity(2));
        let m = (&vi * vi.transpose()).scale(0.5);
        let k = kernel_of_linear_map(&m, 2, &tol()).unwrap();
        assert_eq!(k.dim(), 3);
        assert!(k.trace_residual() < 1e-14);
        assert!(kernel_of_linear_map(&m, 3, &tol()).is_err());
    }

    #[test]
    fn kernel_of_wide_map() {
        // M_2 -> M_1 trace map has a 3-dimensional kernel
        let vi = vec_op(&identity(2));
        let m = CMatrix::from_row_slice(1, 4, vi.as_slice());
        let k = kernel_of_linear_map(&m, 2, &tol()).unwrap();
        assert_eq!(k.dim(), 3);
    }

    #[test]
    fn projection_examples() {
        let e1 = basis_vector(2, 0);
        let e2 = basis_vector(2, 1);
        let p = projection_onto_span(2, &[e1.clone()], &tol()).unwrap();
        assert!((p - matrix_unit(2, 0, 0)).norm() < 1e-14);
        let p = projection_onto_span(2, &[e1.clone(), &e1 + &e2], &tol()).unwrap();
        assert!((p - identity(2)).norm() < 1e-14);
        let p = projection_onto_span(2, &[], &tol()).unwrap();
        assert_eq!(p, CMatrix::zeros(2, 2));
    }

    #[test]
    fn vec_is_column_stacking() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]);
        let v = vec_op(&a);
        assert_eq!(v.as_slice(), &[c(1.0), c(3.0), c(2.0), c(4.0)]);
        assert_eq!(unvec(&v, 2, 2), a);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 1e-7).is_err());
        assert!(Tolerance::new(1e-9, 1.0).is_err());
        assert!(Tolerance::new(1e-9, 1e-7).is_ok());
    }
}
