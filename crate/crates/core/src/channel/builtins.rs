//! Named channels used throughout the examples and tests.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{Channel, HolevoForm, KrausMap, RankOneTerm};
use crate::error::{Error, Result};
use crate::operator::{basis_vector, identity, matrix_unit, unitarity_residual, CMatrix, Tolerance};

fn trusted(kraus: Vec<CMatrix>) -> Channel {
    Channel::from_map(KrausMap::new(kraus).expect("consistent shapes"), &Tolerance::default())
        .expect("trace preserving")
}

/// `X ↦ tr(X) I/n` with Kraus `E_ij/√n` in lexicographic `(i, j)` order.
pub fn depolarizing(n: usize) -> Channel {
    assert!(n > 0, "dimension must be positive");
    let s = 1.0 / (n as f64).sqrt();
    let mut terms = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            terms.push(RankOneTerm {
                v: basis_vector(n, i),
                w: basis_vector(n, j).scale(s),
            });
        }
    }
    let holevo = HolevoForm::new(vec![identity(n)], vec![identity(n).scale(1.0 / n as f64)]);
    Channel::from_rank_one(terms, &Tolerance::default())
        .expect("valid rank-one form")
        .with_holevo(holevo)
}

/// `X ↦ (tr(X) I − Xᵗ)/2` on `M_3` with cyclically signed Kraus operators
/// `(E_23 − E_32)/√2, (E_31 − E_13)/√2, (E_12 − E_21)/√2`. With this choice
/// the canonical complement equals the channel exactly.
pub fn werner_holevo3() -> Channel {
    let k = |a: (usize, usize), b: (usize, usize)| {
        (matrix_unit(3, a.0, a.1) - matrix_unit(3, b.0, b.1)).scale(FRAC_1_SQRT_2)
    };
    trusted(vec![k((1, 2), (2, 1)), k((2, 0), (0, 2)), k((0, 1), (1, 0))])
}

/// Werner–Holevo channel with Kraus `(E_23 − E_32)/√2, (E_13 − E_31)/√2,
/// (E_12 − E_21)/√2`. Its canonical complement is `DΦ(·)D` for
/// `D = diag(1, −1, 1)`.
pub fn werner_holevo3_listed() -> Channel {
    let k = |a: (usize, usize), b: (usize, usize)| {
        (matrix_unit(3, a.0, a.1) - matrix_unit(3, b.0, b.1)).scale(FRAC_1_SQRT_2)
    };
    trusted(vec![k((1, 2), (2, 1)), k((0, 2), (2, 0)), k((0, 1), (1, 0))])
}

/// `ρ ↦ tr(ρ) E_11` with Kraus `e_1 e_k*`.
pub fn spontaneous_emission(n: usize) -> Channel {
    assert!(n > 0, "dimension must be positive");
    let terms = (0..n)
        .map(|k| RankOneTerm {
            v: basis_vector(n, 0),
            w: basis_vector(n, k),
        })
        .collect();
    Channel::from_rank_one(terms, &Tolerance::default()).expect("valid rank-one form")
}

pub fn identity_channel(n: usize) -> Channel {
    trusted(vec![identity(n)])
}

/// `X ↦ Σ_i E_ii X E_ii`.
pub fn dephasing(n: usize) -> Channel {
    trusted((0..n).map(|i| matrix_unit(n, i, i)).collect())
}

fn check_unitary(u: &CMatrix, tol: &Tolerance) -> Result<()> {
    if !u.is_square() {
        return Err(Error::dims("square matrix", format!("{:?}", u.shape())));
    }
    let residual = unitarity_residual(u);
    if residual > tol.check() {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

pub fn unitary_channel(u: &CMatrix, tol: &Tolerance) -> Result<Channel> {
    check_unitary(u, tol)?;
    Channel::from_kraus(vec![u.clone()], tol)
}

/// `X ↦ (1 − p) X + p U X U*`.
pub fn biunitary(u: &CMatrix, p: f64, tol: &Tolerance) -> Result<Channel> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidProbability(p));
    }
    check_unitary(u, tol)?;
    let n = u.nrows();
    Channel::from_kraus(vec![identity(n).scale((1.0 - p).sqrt()), u.scale(p.sqrt())], tol)
}

/// `X ↦ Σ p_i U_i X U_i*`.
pub fn mixed_unitary_channel(probs: &[f64], unitaries: &[CMatrix], tol: &Tolerance) -> Result<Channel> {
    if probs.len() != unitaries.len() || probs.is_empty() {
        return Err(Error::dims(
            format!("{} unitaries", probs.len()),
            format!("{}", unitaries.len()),
        ));
    }
    let mut kraus = Vec::with_capacity(probs.len());
    for (&p, u) in probs.iter().zip(unitaries) {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::InvalidProbability(p));
        }
        check_unitary(u, tol)?;
        kraus.push(u.scale(p.sqrt()));
    }
    Channel::from_kraus(kraus, tol)
}
