//! Mixed-unitary structure through the canonical complement.
//!
//! A channel with minimal Kraus operators `V_1, …, V_d` is mixed unitary
//! exactly when some isometry `W` (`r × d`) makes every diagonal entry of
//! `W Φ^C(X) W*` vanish on traceless `X`. Equivalently, the vectors
//! `ω_i = (row i of W)*` form a tight frame `Σ ω_i ω_i* = I_d` of rank-one
//! elements `ω_i ω_i*` of `T`, the Hermitian orthogonal complement of
//! `Φ^C(M_n(ℂ)₀)`.
//!
//! The verifier and the `T = span{I}` obstruction are exact; the search is a
//! heuristic, and a failed search proves nothing.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::channel::{canonical_complement, complement_kraus, Channel, KrausMap};
use crate::error::{Error, Result};
use crate::frame::FrameProblem;
use crate::operator::{
    eigh, hermitian_basis, hs, identity, matrix_unit, orthogonal_complement,
    orthonormalize_hermitian, outer, unitarity_residual, CMatrix, CVector, OperatorSubspace,
    Tolerance,
};
use crate::random;

pub const AP_MAX_ITERATIONS: usize = 2000;
pub const AP_STEP_TOL: f64 = 1e-10;
pub const AP_ACCEPT_RESIDUAL: f64 = 1e-8;
pub const DUPLICATE_OVERLAP: f64 = 1.0 - 1e-6;
pub const ASSEMBLY_RESIDUAL: f64 = 1e-8;
/// Frame residual at which a Levenberg–Marquardt solution is handed to the
/// verifier.
pub const FRAME_ACCEPT_RESIDUAL: f64 = 1e-10;
/// Choi-matrix reconstruction bound for a returned decomposition.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
pub const PRIVATIZATION_TOL: f64 = 1e-8;
/// Largest number of cells examined by the rank-one exclusion bound.
pub const CERTIFICATE_MAX_CELLS: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MuVerdict {
    #[serde(rename = "NOT_MIXED_UNITARY")]
    NotMixedUnitary,
    #[serde(rename = "CANDIDATE_FOUND")]
    CandidateFound,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

/// `Φ = Σ p_i U_i · U_i*` with `√p_i U_i = Σ_j W_ij V_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedUnitaryDecomposition {
    pub probs: Vec<f64>,
    pub unitaries: Vec<CMatrix>,
    pub isometry: CMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionResiduals {
    pub probability_sum: f64,
    pub unitarity: f64,
    pub isometry: f64,
    pub reconstruction: f64,
}

impl MixedUnitaryDecomposition {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn kraus(&self) -> Vec<CMatrix> {
        self.probs
            .iter()
            .zip(&self.unitaries)
            .map(|(&p, u)| u.scale(p.sqrt()))
            .collect()
    }

    pub fn residuals(&self, phi: &Channel) -> DecompositionResiduals {
        let probability_sum = (self.probs.iter().sum::<f64>() - 1.0).abs();
        let unitarity = self
            .unitaries
            .iter()
            .map(unitarity_residual)
            .fold(0.0, f64::max);
        let d = self.isometry.ncols();
        let isometry = (self.isometry.adjoint() * &self.isometry - identity(d)).norm();
        let reconstruction = KrausMap::new(self.kraus())
            .map(|m| m.choi_distance(phi.map()))
            .unwrap_or(f64::INFINITY);
        DecompositionResiduals {
            probability_sum,
            unitarity,
            isometry,
            reconstruction,
        }
    }

    /// Soundness gate applied to every decomposition the search returns.
    pub fn is_verified(&self, phi: &Channel, tol: &Tolerance) -> bool {
        let r = self.residuals(phi);
        !self.is_empty()
            && self.probs.iter().all(|&p| p > 0.0)
            && r.probability_sum <= tol.abs
            && r.unitarity <= tol.check()
            && r.isometry <= tol.check()
            && r.reconstruction <= RECONSTRUCTION_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagZeroCheck {
    pub passed: bool,
    /// `max_t max_i |(W Φ^C(B_t) W*)_ii|` over a traceless basis `{B_t}`.
    pub residual: f64,
    pub decomposition: Option<MixedUnitaryDecomposition>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub s: OperatorSubspace,
    pub t: OperatorSubspace,
    pub verdict: MuVerdict,
    pub witness: String,
    pub decomposition: Option<MixedUnitaryDecomposition>,
    /// Upper bound on `max ‖P_T(xx*)‖_F` over unit `x`, when computed.
    pub rank_one_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest number of unitaries tried; `None` means `n²`.
    pub max_terms: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_terms: None,
            restarts: 64,
            seed: 0,
        }
    }
}

/// `S = span Φ^C(M_n(ℂ)₀)` and `T = S^⊥` inside the Hermitian `d × d`
/// matrices, both with Hermitian bases.
pub fn traceless_complement_range(
    phi: &Channel,
    tol: &Tolerance,
) -> Result<(OperatorSubspace, OperatorSubspace)> {
    let comp = canonical_complement(phi, tol)?;
    let d = comp.n_out();
    let images: Vec<CMatrix> = OperatorSubspace::traceless(phi.n_in())
        .basis()
        .iter()
        .map(|b| comp.map().apply_unchecked(b))
        .collect();
    let s = orthonormalize_hermitian(d, &images, tol)?;
    let t = orthogonal_complement(&s, &OperatorSubspace::full(d), tol)?;
    if !t.contains(&identity(d), tol) {
        return Err(Error::Verification(format!(
            "identity is not orthogonal to the traceless complement range (distance {:.3e})",
            t.distance(&identity(d))
        )));
    }
    Ok((s, t))
}

fn complement_images(phi: &Channel, tol: &Tolerance) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    let kraus = complement_kraus(phi, tol)?;
    let comp = canonical_complement(phi, tol)?;
    let images = OperatorSubspace::traceless(phi.n_in())
        .basis()
        .iter()
        .map(|b| comp.map().apply_unchecked(b))
        .collect();
    Ok((kraus, images))
}

/// Checks the diagonal-zero condition for `W` and, when it holds, extracts
/// `Ṽ_i = Σ_j W_ij V_j = √p_i U_i`, dropping terms with `p_i ≈ 0`.
pub fn verify_diag_zero_isometry(phi: &Channel, w: &CMatrix, tol: &Tolerance) -> Result<DiagZeroCheck> {
    let (kraus, images) = complement_images(phi, tol)?;
    let d = kraus.len();
    if w.ncols() != d {
        return Err(Error::dims(format!("{d} columns"), format!("{} columns", w.ncols())));
    }
    let isometry_residual = (w.adjoint() * w - identity(d)).norm();
    if isometry_residual > tol.check() {
        return Err(Error::NotIsometry {
            residual: isometry_residual,
        });
    }
    let mut residual = 0.0_f64;
    for y in &images {
        let m = w * y * w.adjoint();
        for i in 0..m.nrows() {
            residual = residual.max(m[(i, i)].norm());
        }
    }
    let passed = residual <= tol.check();
    let decomposition = passed.then(|| extract(phi, w, &kraus, tol));
    Ok(DiagZeroCheck {
        passed,
        residual,
        decomposition,
    })
}

fn extract(phi: &Channel, w: &CMatrix, kraus: &[CMatrix], tol: &Tolerance) -> MixedUnitaryDecomposition {
    let n = phi.n_in();
    let mut probs = Vec::new();
    let mut unitaries = Vec::new();
    let mut rows = Vec::new();
    for i in 0..w.nrows() {
        let mut v = CMatrix::zeros(phi.n_out(), n);
        for (j, k) in kraus.iter().enumerate() {
            v += k * w[(i, j)];
        }
        let p = (v.adjoint() * &v).trace().re / n as f64;
        if p <= tol.abs * tol.abs {
            continue;
        }
        probs.push(p);
        unitaries.push(v.unscale(p.sqrt()));
        rows.push(i);
    }
    let mut isometry = CMatrix::zeros(rows.len(), w.ncols());
    for (dst, &src) in rows.iter().enumerate() {
        isometry.set_row(dst, &w.row(src));
    }
    MixedUnitaryDecomposition {
        probs,
        unitaries,
        isometry,
    }
}

/// Nearest isometry `U V*` to `W = U Σ V*`.
fn polar_isometry(w: &CMatrix) -> CMatrix {
    let svd = w.clone().svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    u * v_t
}

fn isometry_from_frame(vectors: &[CVector]) -> CMatrix {
    let d = vectors.first().map_or(0, |v| v.len());
    let mut w = CMatrix::zeros(vectors.len(), d);
    for (i, v) in vectors.iter().enumerate() {
        w.set_row(i, &v.adjoint());
    }
    w
}

/// Nonnegative least squares `min ‖A x − b‖, x ≥ 0` (Lawson–Hanson active
/// set).
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let eps = 1e-12 * (1.0 + a.norm() * b.norm());
    for _ in 0..(3 * n + 10) {
        let grad = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && grad[j] > eps)
            .max_by(|&i, &j| grad[i].total_cmp(&grad[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = DMatrix::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])]);
            let Some(z_sub) = sub.svd(true, true).solve(b, 1e-14).ok() else {
                return x;
            };
            if z_sub.iter().all(|&z| z > 0.0) {
                for (c, &k) in idx.iter().enumerate() {
                    x[k] = z_sub[c];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (c, &k) in idx.iter().enumerate() {
                if z_sub[c] <= 0.0 {
                    alpha = alpha.min(x[k] / (x[k] - z_sub[c]));
                }
            }
            for (c, &k) in idx.iter().enumerate() {
                x[k] += alpha * (z_sub[c] - x[k]);
                if x[k] <= 1e-15 {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
        }
    }
    x
}

/// Fixed point of alternating projections between `T` and the unit rank-one
/// cone, starting from `x`.
fn alternating_projection(s: &OperatorSubspace, mut x: CVector) -> Option<(CVector, f64)> {
    let mut converged = false;
    for _ in 0..AP_MAX_ITERATIONS {
        let xx = outer(&x, &x);
        let p = &xx - s.project(&xx);
        let (vals, vecs) = eigh(&p);
        if vals.first().is_none_or(|&v| v <= 0.0) {
            return None;
        }
        let mut next: CVector = vecs.column(0).into_owned();
        crate::channel::fix_phase(&mut next);
        let step = (outer(&next, &next) - &xx).norm();
        x = next;
        if step <= AP_STEP_TOL {
            converged = true;
            break;
        }
    }
    let residual = s.distance(&outer(&x, &x));
    (converged || residual <= AP_ACCEPT_RESIDUAL).then_some((x, residual))
}

fn hermitian_coordinates(basis: &[CMatrix], m: &CMatrix) -> DVector<f64> {
    DVector::from_iterator(basis.len(), basis.iter().map(|b| hs(m, b).re))
}

struct Search<'a> {
    phi: &'a Channel,
    tol: &'a Tolerance,
    s: &'a OperatorSubspace,
    d: usize,
}

impl Search<'_> {
    fn finish(&self, vectors: &[CVector]) -> Option<MixedUnitaryDecomposition> {
        let w = polar_isometry(&isometry_from_frame(vectors));
        let check = verify_diag_zero_isometry(self.phi, &w, self.tol).ok()?;
        check
            .decomposition
            .filter(|dec| dec.is_verified(self.phi, self.tol))
    }

    fn problem(&self) -> FrameProblem<'_> {
        FrameProblem {
            d: self.d,
            constraints: self.s.basis(),
            targets: &[],
        }
    }

    fn polish(&self, init: Vec<CVector>) -> Option<MixedUnitaryDecomposition> {
        let zeros = vec![0.0; self.s.dim()];
        let problem = FrameProblem {
            targets: &zeros,
            ..self.problem()
        };
        let sol = problem.solve(init);
        (sol.residual <= FRAME_ACCEPT_RESIDUAL)
            .then(|| self.finish(&sol.vectors))
            .flatten()
    }
}

/// Heuristic search for a mixed-unitary decomposition. Any returned
/// decomposition has passed [`verify_diag_zero_isometry`] and reconstructs
/// the channel's Choi matrix to within [`RECONSTRUCTION_TOL`].
pub fn search_mixed_unitary(
    phi: &Channel,
    config: &SearchConfig,
    tol: &Tolerance,
) -> Result<Option<MixedUnitaryDecomposition>> {
    let (s, t) = traceless_complement_range(phi, tol)?;
    let d = t.n();
    if t.dim() == 1 && d > 1 {
        return Ok(None);
    }
    let search = Search { phi, tol, s: &s, d };

    // Kraus operators that are already multiples of unitaries.
    if let Some(dec) = search.finish(&(0..d).map(|i| crate::operator::basis_vector(d, i)).collect::<Vec<_>>()) {
        return Ok(Some(dec));
    }

    let mut rng = random::rng(config.seed);

    // Rank-one elements of T by alternating projections.
    let mut directions: Vec<CVector> = Vec::new();
    for _ in 0..config.restarts {
        let start = random::unit_vector(&mut rng, d);
        if let Some((x, _)) = alternating_projection(&s, start) {
            let duplicate = directions
                .iter()
                .any(|y| y.dotc(&x).norm_sqr() >= DUPLICATE_OVERLAP);
            if !duplicate {
                directions.push(x);
            }
        }
    }

    // Nonnegative weights with Σ c_i x_i x_i* = I.
    if !directions.is_empty() {
        let hb = hermitian_basis(d);
        let a = DMatrix::from_fn(hb.len(), directions.len(), |r, c| {
            hs(&outer(&directions[c], &directions[c]), &hb[r]).re
        });
        let b = hermitian_coordinates(&hb, &identity(d));
        let c = nnls(&a, &b);
        let residual = (&a * &c - &b).norm();
        if residual <= ASSEMBLY_RESIDUAL {
            let frame: Vec<CVector> = directions
                .iter()
                .zip(c.iter())
                .filter(|(_, &ci)| ci > 0.0)
                .map(|(x, &ci)| x.scale(ci.sqrt()))
                .collect();
            if let Some(dec) = search.polish(frame) {
                return Ok(Some(dec));
            }
        }
    }

    // Direct solve for the frame, r from d upward.
    let max_terms = config.max_terms.unwrap_or(phi.n_in() * phi.n_in()).max(d);
    let attempts = config.restarts.clamp(1, 32);
    for r in d..=max_terms {
        for attempt in 0..attempts {
            let scale = (d as f64 / r as f64).sqrt();
            let init: Vec<CVector> = (0..r)
                .map(|i| {
                    let seeded = attempt % 2 == 0 && !directions.is_empty();
                    if seeded && i < directions.len() {
                        let k = (i + attempt / 2) % directions.len();
                        directions[k].scale(scale)
                    } else {
                        random::unit_vector(&mut rng, d).scale(scale)
                    }
                })
                .collect();
            if let Some(dec) = search.polish(init) {
                return Ok(Some(dec));
            }
        }
        // Keep the generator stream independent of how far a trial ran.
        let _: u64 = rng.random();
    }
    Ok(None)
}

/// Upper bound on `max_{‖x‖ = 1} ‖P_T(xx*)‖_F` for `d ≤ 3` by branch and
/// bound over a spherical parameterization. Returns `None` when a unit `x`
/// with `xx* ∈ T` is found, or the cell budget runs out before the bound
/// drops below one.
pub fn rank_one_exclusion_bound(t: &OperatorSubspace) -> Option<f64> {
    let d = t.n();
    if d == 0 || d > 3 {
        return None;
    }
    if d == 1 {
        return t.basis().is_empty().then_some(0.0);
    }
    use std::f64::consts::{FRAC_PI_2, PI};
    let (lo, hi): (Vec<f64>, Vec<f64>) = if d == 2 {
        (vec![0.0, 0.0], vec![FRAC_PI_2, 2.0 * PI])
    } else {
        (vec![0.0, 0.0, 0.0, 0.0], vec![FRAC_PI_2, FRAC_PI_2, 2.0 * PI, 2.0 * PI])
    };
    let point = |p: &[f64]| -> CVector {
        let cis = |phi: f64| crate::C64::from_polar(1.0, phi);
        if d == 2 {
            CVector::from_vec(vec![crate::C64::new(p[0].cos(), 0.0), cis(p[1]) * p[0].sin()])
        } else {
            CVector::from_vec(vec![
                crate::C64::new(p[0].cos(), 0.0),
                cis(p[2]) * (p[0].sin() * p[1].cos()),
                cis(p[3]) * (p[0].sin() * p[1].sin()),
            ])
        }
    };
    let f = |x: &CVector| t.project(&outer(x, x)).norm();
    let lipschitz = std::f64::consts::SQRT_2;

    let dims = lo.len();
    let split = 8usize;
    let mut stack: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let total = split.pow(dims as u32);
    for idx in 0..total {
        let mut a = vec![0.0; dims];
        let mut b = vec![0.0; dims];
        let mut rem = idx;
        for k in 0..dims {
            let i = rem % split;
            rem /= split;
            let w = (hi[k] - lo[k]) / split as f64;
            a[k] = lo[k] + w * i as f64;
            b[k] = a[k] + w;
        }
        stack.push((a, b));
    }
    // The parameterization has a diagonal metric; `g` bounds each metric
    // coefficient over a cell, so the cell's image lies within Euclidean
    // distance `sqrt(Σ g_k h_k²)` of the image of its center.
    let metric = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let s1 = b[0].sin().powi(2);
        if d == 2 {
            vec![1.0, s1]
        } else {
            vec![1.0, s1, s1 * a[1].cos().powi(2), s1 * b[1].sin().powi(2)]
        }
    };
    let mut cells = 0usize;
    let mut bound = 0.0_f64;
    while let Some((a, b)) = stack.pop() {
        cells += 1;
        if cells > CERTIFICATE_MAX_CELLS {
            return None;
        }
        let center: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let fc = f(&point(&center));
        if fc >= 1.0 - 1e-9 {
            return None;
        }
        let g = metric(&a, &b);
        let widths: Vec<f64> = (0..dims).map(|k| g[k].sqrt() * 0.5 * (b[k] - a[k])).collect();
        let radius = widths.iter().map(|w| w * w).sum::<f64>().sqrt();
        let upper = fc + lipschitz * radius;
        if upper < 1.0 {
            bound = bound.max(upper);
            continue;
        }
        let k = (0..dims)
            .max_by(|&i, &j| widths[i].total_cmp(&widths[j]))
            .expect("nonempty box");
        let mid = 0.5 * (a[k] + b[k]);
        let mut b1 = b.clone();
        b1[k] = mid;
        let mut a2 = a.clone();
        a2[k] = mid;
        stack.push((a, b1));
        stack.push((a2, b));
    }
    Some(bound)
}

pub fn obstruction_report(phi: &Channel, config: &SearchConfig, tol: &Tolerance) -> Result<ObstructionReport> {
    let (s, t) = traceless_complement_range(phi, tol)?;
    let d = t.n();
    if t.dim() == 1 && d > 1 {
        return Ok(ObstructionReport {
            witness: format!(
                "T = span{{I_{d}}}: no rank-one positive element lies in T, so no isometry has a vanishing diagonal"
            ),
            s,
            t,
            verdict: MuVerdict::NotMixedUnitary,
            decomposition: None,
            rank_one_bound: None,
        });
    }
    if let Some(dec) = search_mixed_unitary(phi, config, tol)? {
        return Ok(ObstructionReport {
            witness: format!("verified decomposition with {} unitaries", dec.len()),
            s,
            t,
            verdict: MuVerdict::CandidateFound,
            decomposition: Some(dec),
            rank_one_bound: None,
        });
    }
    if d <= 3 {
        if let Some(bound) = rank_one_exclusion_bound(&t) {
            return Ok(ObstructionReport {
                witness: format!(
                    "every unit x has ‖P_T(xx*)‖ ≤ {bound:.6} < 1, so T holds no rank-one positive element"
                ),
                s,
                t,
                verdict: MuVerdict::NotMixedUnitary,
                decomposition: None,
                rank_one_bound: Some(bound),
            });
        }
    }
    Ok(ObstructionReport {
        witness: format!("search with {} restarts found no decomposition", config.restarts),
        s,
        t,
        verdict: MuVerdict::Inconclusive,
        decomposition: None,
        rank_one_bound: None,
    })
}

/// The map `E: M_d → M_r` of a decomposition, with Kraus operators
/// `e_i ω_i* / √(r p_i)`, and its verification `E(Φ^C(X)) = tr(X) I_r / r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivatizingChannel {
    pub map: KrausMap,
    pub r: usize,
    pub residual: f64,
    pub choi_rank: usize,
}

pub fn build_privatizing_channel(
    phi: &Channel,
    dec: &MixedUnitaryDecomposition,
    tol: &Tolerance,
) -> Result<PrivatizingChannel> {
    let comp = canonical_complement(phi, tol)?;
    let w = &dec.isometry;
    let (r, d) = w.shape();
    if d != comp.n_out() || r == 0 {
        return Err(Error::dims(format!("r × {}", comp.n_out()), format!("{r} × {d}")));
    }
    let n = phi.n_in();
    let omega_i = comp.map().apply_unchecked(&identity(n));
    let mut kraus = Vec::with_capacity(r);
    for i in 0..r {
        let omega: CVector = w.row(i).adjoint();
        let p = omega.dotc(&(&omega_i * &omega)).re / n as f64;
        if p <= 0.0 {
            return Err(Error::InvalidDecomposition(format!("term {i} has weight {p:.3e}")));
        }
        let e = crate::operator::basis_vector(r, i).unscale((r as f64 * p).sqrt());
        kraus.push(outer(&e, &omega));
    }
    let map = KrausMap::with_dims(d, r, kraus)?;
    let mut residual = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            let x = matrix_unit(n, a, b);
            let out = map.apply_unchecked(&comp.map().apply_unchecked(&x));
            let expected = identity(r) * (x.trace() / crate::C64::new(r as f64, 0.0));
            residual = residual.max((out - expected).norm());
        }
    }
    if residual > PRIVATIZATION_TOL {
        return Err(Error::Verification(format!(
            "E(Φ^C(X)) deviates from tr(X) I/r by {residual:.3e}"
        )));
    }
    let choi_rank = map.choi_rank(tol);
    if choi_rank != r {
        return Err(Error::Verification(format!("privatizing map has Choi rank {choi_rank}, expected {r}")));
    }
    Ok(PrivatizingChannel {
        map,
        r,
        residual,
        choi_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::builtins::*;
    use crate::operator::{pauli_x, pauli_y, pauli_z, vec_op};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn bell_isometry() -> CMatrix {
        let paulis = [identity(2), pauli_x(), pauli_y(), pauli_z()];
        let mut u = CMatrix::zeros(4, 4);
        for (j, p) in paulis.iter().enumerate() {
            u.set_column(j, &vec_op(p).scale(std::f64::consts::FRAC_1_SQRT_2));
        }
        u
    }

    #[test]
    fn complement_range_dimensions() {
        let (s, t) = traceless_complement_range(&depolarizing(2), &tol()).unwrap();
        assert_eq!((s.dim(), t.dim()), (3, 13));
        let (_, t) = traceless_complement_range(&werner_holevo3(), &tol()).unwrap();
        assert_eq!(t.dim(), 1);
        let (s, t) = traceless_complement_range(&identity_channel(3), &tol()).unwrap();
        assert_eq!((s.dim(), t.dim(), t.n()), (0, 1, 1));
    }

    #[test]
    fn bell_isometry_recovers_paulis() {
        // Columns of the Bell unitary index the Kraus E_ij/√2; the rows of its
        // adjoint give W.
        let w = bell_isometry().adjoint();
        let check = verify_diag_zero_isometry(&depolarizing(2), &w, &tol()).unwrap();
        assert!(check.passed);
        let dec = check.decomposition.unwrap();
        assert_eq!(dec.len(), 4);
        for &p in &dec.probs {
            assert!((p - 0.25).abs() < 1e-12);
        }
        assert!(dec.is_verified(&depolarizing(2), &tol()));
    }

    #[test]
    fn biunitary_with_identity_isometry() {
        let ch = biunitary(&pauli_z(), 1.0 / 3.0, &tol()).unwrap();
        let check = verify_diag_zero_isometry(&ch, &identity(2), &tol()).unwrap();
        let dec = check.decomposition.unwrap();
        assert!((dec.probs[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((&dec.unitaries[1] - pauli_z()).norm() < 1e-12);
    }

    #[test]
    fn werner_holevo_fails_for_sampled_isometries() {
        let mut rng = random::rng(3);
        for _ in 0..5 {
            let u = random::unitary(&mut rng, 3);
            let check = verify_diag_zero_isometry(&werner_holevo3(), &u, &tol()).unwrap();
            assert!(!check.passed);
        }
        assert!(matches!(
            verify_diag_zero_isometry(&werner_holevo3(), &identity(3).scale(2.0), &tol()),
            Err(Error::NotIsometry { .. })
        ));
    }

    #[test]
    fn verdicts() {
        let cfg = SearchConfig::default();
        assert_eq!(
            obstruction_report(&werner_holevo3(), &cfg, &tol()).unwrap().verdict,
            MuVerdict::NotMixedUnitary
        );
        assert_eq!(
            obstruction_report(&identity_channel(2), &cfg, &tol()).unwrap().verdict,
            MuVerdict::CandidateFound
        );
        let dep = obstruction_report(&depolarizing(2), &cfg, &tol()).unwrap();
        assert_eq!(dep.verdict, MuVerdict::CandidateFound);
        assert!(dep.decomposition.unwrap().is_verified(&depolarizing(2), &tol()));
    }

    #[test]
    fn search_from_scrambled_kraus() {
        let mut rng = random::rng(5);
        let u = random::unitary(&mut rng, 2);
        let ch = biunitary(&u, 0.3, &tol()).unwrap();
        let scrambled = Channel::from_kraus(ch.minimal_kraus(&tol()).unwrap(), &tol()).unwrap();
        let dec = search_mixed_unitary(&scrambled, &SearchConfig::default(), &tol())
            .unwrap()
            .expect("planted decomposition");
        assert!(dec.is_verified(&scrambled, &tol()));
        let e = build_privatizing_channel(&scrambled, &dec, &tol()).unwrap();
        assert_eq!(e.choi_rank, dec.len());
    }

    #[test]
    fn privatizing_depolarizing() {
        let w = bell_isometry().adjoint();
        let dec = verify_diag_zero_isometry(&depolarizing(2), &w, &tol())
            .unwrap()
            .decomposition
            .unwrap();
        let e = build_privatizing_channel(&depolarizing(2), &dec, &tol()).unwrap();
        assert_eq!((e.r, e.choi_rank), (4, 4));
        assert!(e.residual < 1e-12);
    }

    #[test]
    fn privatizing_identity_channel() {
        let dec = search_mixed_unitary(&identity_channel(2), &SearchConfig::default(), &tol())
            .unwrap()
            .unwrap();
        let e = build_privatizing_channel(&identity_channel(2), &dec, &tol()).unwrap();
        assert_eq!(e.r, 1);
    }

    #[test]
    fn nnls_recovers_nonnegative_solution() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        let x_true = DVector::from_vec(vec![0.5, 0.0, 2.0]);
        let b = &a * &x_true;
        let x = nnls(&a, &b);
        assert!((x - x_true).norm() < 1e-12);
        let b = DVector::from_vec(vec![-1.0, -1.0, -1.0]);
        assert!(nnls(&a, &b).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exclusion_bound_examples() {
        let tol = tol();
        // span{I, diag(1, -1, 0)} has no rank-one positive element.
        let mut h = CMatrix::zeros(3, 3);
        h[(0, 0)] = crate::C64::new(1.0, 0.0);
        h[(1, 1)] = crate::C64::new(-1.0, 0.0);
        let t = orthonormalize_hermitian(3, &[identity(3), h], &tol).unwrap();
        let bound = rank_one_exclusion_bound(&t).expect("certificate");
        assert!(bound < 1.0);
        // span{I, Z} contains E_11.
        let t = orthonormalize_hermitian(2, &[identity(2), pauli_z()], &tol).unwrap();
        assert!(rank_one_exclusion_bound(&t).is_none());
    }
}
