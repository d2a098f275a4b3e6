//! Channel nullspaces and entanglement-breaking channels with a prescribed
//! nullspace.

use crate::channel::builtins::{biunitary, depolarizing};
use crate::channel::{holevo_to_kraus, Channel, HolevoForm};
use crate::error::{Error, Result};
use crate::operator::{
    eigh, hs, identity, kernel_of_linear_map, min_eigenvalue, orthogonal_complement,
    orthonormalize_hermitian, outer, unitarity_residual, CMatrix, OperatorSubspace, Tolerance,
};
use crate::random;

/// Largest relative containment residual accepted when comparing nullspaces.
pub const NULLSPACE_MATCH_TOL: f64 = 1e-7;
/// Minimum eigenvalue of the Gram matrix of unit-normalized states.
pub const STATE_INDEPENDENCE_THRESHOLD: f64 = 1e-6;
pub const MAX_STATE_DRAWS: usize = 50;
/// Eigenvalue pairing tolerance `|w_i + w_j|` for bi-unitary nullspaces.
pub const PHASE_PAIR_TOL: f64 = 1e-8;

/// Everything the construction produced, kept for auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisRecipe {
    pub target: OperatorSubspace,
    /// `H_1, …, H_m` spanning the traceless part of the complement of the
    /// target, followed by `H_{m+1} = −Σ H_k`.
    pub hermitian_basis: Vec<CMatrix>,
    pub lambdas: Vec<f64>,
    pub lambda: f64,
    pub povm: Vec<CMatrix>,
    pub states: Vec<CMatrix>,
    pub seed: u64,
    /// Number of state draws used (1 when the first draw was independent).
    pub state_draws: usize,
    /// Smallest eigenvalue of the Gram matrix of the normalized states.
    pub state_gram_min_eigenvalue: f64,
    /// Smallest nonzero singular value of the Gram matrix `tr(F_k F_l)`.
    pub povm_gram_min_singular_value: f64,
}

/// `{X : Φ(X) = 0}` with a Hermitian basis.
pub fn channel_nullspace(phi: &Channel, tol: &Tolerance) -> OperatorSubspace {
    let n = phi.n_in();
    let kernel = kernel_of_linear_map(&phi.natural_matrix(), n, tol)
        .expect("natural matrix has n_in² columns");
    let kernel = kernel.to_hermitian(tol).unwrap_or(kernel);
    debug_assert!(kernel.is_self_adjoint(), "nullspace of a channel is self-adjoint");
    debug_assert!(kernel.is_traceless(), "nullspace of a channel is traceless");
    kernel
}

fn validate_target(target: &OperatorSubspace, tol: &Tolerance) -> Result<()> {
    let n = target.n();
    let residual = target.self_adjoint_residual();
    if residual > tol.check() {
        return Err(Error::NotSelfAdjoint { residual });
    }
    let residual = target.trace_residual();
    if residual > tol.check() {
        return Err(Error::NotTraceless { residual });
    }
    if n == 0 || target.dim() > n * n - 1 {
        return Err(Error::DimensionOverflow {
            dim: target.dim(),
            max: (n * n).saturating_sub(1),
        });
    }
    Ok(())
}

/// Gram matrix of unit-normalized matrices.
fn normalized_gram(mats: &[CMatrix]) -> CMatrix {
    let k = mats.len();
    let normed: Vec<CMatrix> = mats.iter().map(|m| m.unscale(m.norm())).collect();
    CMatrix::from_fn(k, k, |i, j| hs(&normed[j], &normed[i]))
}

fn independent_states(
    rng: &mut random::SeededRng,
    n: usize,
    count: usize,
) -> Result<(Vec<CMatrix>, usize, f64)> {
    let mut best = f64::NEG_INFINITY;
    for draw in 1..=MAX_STATE_DRAWS {
        let states: Vec<CMatrix> = (0..count).map(|_| random::density(rng, n)).collect();
        let min = min_eigenvalue(&normalized_gram(&states));
        if min >= STATE_INDEPENDENCE_THRESHOLD {
            return Ok((states, draw, min));
        }
        best = best.max(min);
    }
    Err(Error::Verification(format!(
        "no linearly independent states after {MAX_STATE_DRAWS} draws (best Gram eigenvalue {best:.3e})"
    )))
}

/// An entanglement-breaking channel `Φ(ρ) = Σ tr(ρ F_k) R_k` whose nullspace
/// is exactly `target`, a self-adjoint subspace of traceless matrices.
pub fn synthesize_annihilator(
    target: &OperatorSubspace,
    seed: u64,
    tol: &Tolerance,
) -> Result<(Channel, SynthesisRecipe)> {
    validate_target(target, tol)?;
    let n = target.n();
    let traceless = OperatorSubspace::traceless(n);
    let target_h = target.to_hermitian(tol).ok_or(Error::NotSelfAdjoint {
        residual: target.self_adjoint_residual(),
    })?;

    if target_h.dim() == n * n - 1 {
        let ch = depolarizing(n);
        let recipe = SynthesisRecipe {
            target: target_h,
            hermitian_basis: Vec::new(),
            lambdas: Vec::new(),
            lambda: 1.0,
            povm: vec![identity(n)],
            states: vec![identity(n).scale(1.0 / n as f64)],
            seed,
            state_draws: 0,
            state_gram_min_eigenvalue: 1.0,
            povm_gram_min_singular_value: n as f64,
        };
        return Ok((ch, recipe));
    }

    let complement = orthogonal_complement(&target_h, &traceless, tol)?;
    let mut hs_basis = complement.into_basis();
    let m = hs_basis.len();
    let mut last = CMatrix::zeros(n, n);
    for h in &hs_basis {
        last -= h;
    }
    hs_basis.push(last);

    let lambdas: Vec<f64> = hs_basis
        .iter()
        .map(|h| {
            let min = min_eigenvalue(h);
            if min < -tol.abs {
                min
            } else {
                -1.0
            }
        })
        .collect();
    let lambda: f64 = -lambdas.iter().sum::<f64>();
    let povm: Vec<CMatrix> = hs_basis
        .iter()
        .zip(&lambdas)
        .map(|(h, &l)| (h - identity(n).scale(l)).unscale(lambda))
        .collect();

    let mut rng = random::rng(seed);
    let (states, state_draws, state_gram_min_eigenvalue) = independent_states(&mut rng, n, m + 1)?;

    let povm_gram = CMatrix::from_fn(m + 1, m + 1, |i, j| hs(&povm[j], &povm[i]));
    let (gvals, _) = eigh(&povm_gram);
    let gmax = gvals.first().copied().unwrap_or(0.0);
    let povm_gram_min_singular_value = gvals
        .iter()
        .map(|v| v.abs())
        .filter(|&v| v > tol.rank_gap * gmax)
        .fold(f64::INFINITY, f64::min);

    let h = HolevoForm::new(povm.clone(), states.clone());
    let ch = holevo_to_kraus(&h, tol)?;

    let found = channel_nullspace(&ch, tol);
    let distance = found.span_distance(&target_h);
    if distance > NULLSPACE_MATCH_TOL {
        return Err(Error::Verification(format!(
            "synthesized nullspace has dimension {} (target {}), containment residual {distance:.3e}",
            found.dim(),
            target_h.dim()
        )));
    }

    let recipe = SynthesisRecipe {
        target: target_h,
        hermitian_basis: hs_basis,
        lambdas,
        lambda,
        povm,
        states,
        seed,
        state_draws,
        state_gram_min_eigenvalue,
        povm_gram_min_singular_value,
    };
    Ok((ch, recipe))
}

/// Nullspace of `X ↦ (1 − p) X + p U X U*`, read off the eigen-decomposition
/// of `U`. It is nonzero only for `p = 1/2`, where it is spanned by `u_i u_j*`
/// over eigenvalue pairs with `w_i = −w_j`.
pub fn biunitary_nullspace(u: &CMatrix, p: f64, tol: &Tolerance) -> Result<OperatorSubspace> {
    if !u.is_square() {
        return Err(Error::dims("square matrix", format!("{:?}", u.shape())));
    }
    let residual = unitarity_residual(u);
    if residual > tol.check() {
        return Err(Error::NotUnitary { residual });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let n = u.nrows();
    let explicit = channel_nullspace(&biunitary(u, p, tol)?, tol);

    let result = if (p - 0.5).abs() > tol.abs {
        OperatorSubspace::zero(n)
    } else {
        let (q, t) = u.clone().schur().unpack();
        let w: Vec<_> = (0..n).map(|i| t[(i, i)]).collect();
        let mut spanners = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if (w[i] + w[j]).norm() <= PHASE_PAIR_TOL {
                    spanners.push(outer(&q.column(i).into_owned(), &q.column(j).into_owned()));
                }
            }
        }
        orthonormalize_hermitian(n, &spanners, tol)?
    };

    let distance = result.span_distance(&explicit);
    if distance > NULLSPACE_MATCH_TOL {
        return Err(Error::Verification(format!(
            "eigenvalue pairing gives dimension {}, explicit kernel {} (residual {distance:.3e})",
            result.dim(),
            explicit.dim()
        )));
    }
    Ok(result)
}
