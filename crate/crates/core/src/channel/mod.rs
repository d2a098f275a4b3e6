//! Channel representations and conversions.
//!
//! A [`KrausMap`] is any completely positive map given by Kraus operators; a
//! [`Channel`] is a validated trace-preserving one, optionally carrying a
//! Holevo form `Φ(ρ) = Σ tr(F_k ρ) R_k` and a rank-one form `V_i = v_i w_i*`.
//!
//! Conventions: the Choi matrix is `J(Φ) = Σ_ij E_ij ⊗ Φ(E_ij)`, which equals
//! `Σ_i vec(V_i) vec(V_i)*` under column stacking, and the natural matrix is
//! `Σ_i conj(V_i) ⊗ V_i`.

pub mod builtins;
mod report;

pub use report::{eb_check, ChannelReport, EbVerdict};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{
    eigh, hermiticity_residual, identity, matrix_unit, outer, unvec, vec_op, CMatrix, CVector,
    Tolerance, ONE,
};

#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    n_in: usize,
    n_out: usize,
    kraus: Vec<CMatrix>,
}

impl KrausMap {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::dims("at least one Kraus operator", "none"))?;
        let (n_out, n_in) = first.shape();
        Self::with_dims(n_in, n_out, kraus)
    }

    /// Allows an empty Kraus list (the zero map).
    pub fn with_dims(n_in: usize, n_out: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        for k in &kraus {
            if k.shape() != (n_out, n_in) {
                return Err(Error::dims(format!("({n_out}, {n_in})"), format!("{:?}", k.shape())));
            }
        }
        Ok(KrausMap { n_in, n_out, kraus })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.n_in, self.n_in) {
            return Err(Error::dims(
                format!("({0}, {0})", self.n_in),
                format!("{:?}", x.shape()),
            ));
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.n_out, self.n_out);
        for v in &self.kraus {
            out += v * x * v.adjoint();
        }
        out
    }

    /// The map with Kraus operators `V_i*`, i.e. the Hilbert–Schmidt adjoint.
    pub fn adjoint(&self) -> KrausMap {
        KrausMap {
            n_in: self.n_out,
            n_out: self.n_in,
            kraus: self.kraus.iter().map(|k| k.adjoint()).collect(),
        }
    }

    pub fn choi(&self) -> CMatrix {
        let dim = self.n_in * self.n_out;
        let mut j = CMatrix::zeros(dim, dim);
        for v in &self.kraus {
            let x = vec_op(v);
            j += &x * x.adjoint();
        }
        j
    }

    pub fn choi_rank(&self, tol: &Tolerance) -> usize {
        let (vals, _) = eigh(&self.choi());
        let max = vals.first().copied().unwrap_or(0.0);
        if max <= 0.0 {
            return 0;
        }
        vals.iter().filter(|&&v| v > tol.rank_gap * max).count()
    }

    /// `M` with `M vec(X) = vec(Φ(X))`.
    pub fn natural_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n_out * self.n_out, self.n_in * self.n_in);
        for v in &self.kraus {
            m += v.conjugate().kronecker(v);
        }
        m
    }

    /// `‖Σ V_i* V_i − I‖_F`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut s = -identity(self.n_in);
        for v in &self.kraus {
            s += v.adjoint() * v;
        }
        s.norm()
    }

    /// `‖Σ V_i V_i* − I‖_F`.
    pub fn unitality_residual(&self) -> f64 {
        let mut s = -identity(self.n_out);
        for v in &self.kraus {
            s += v * v.adjoint();
        }
        s.norm()
    }

    /// Kraus operators from the eigen-decomposition of the Choi matrix,
    /// ordered by descending eigenvalue; the largest-magnitude entry of each
    /// vectorized operator is made real and positive.
    pub fn minimal_kraus(&self, tol: &Tolerance) -> Result<Vec<CMatrix>> {
        let (vals, vecs) = eigh(&self.choi());
        let max = vals.first().copied().unwrap_or(0.0);
        let min = vals.last().copied().unwrap_or(0.0);
        if min < -tol.check() * max.max(1.0) {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min });
        }
        if max <= 0.0 {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for (k, &lambda) in vals.iter().enumerate() {
            if lambda <= tol.rank_gap * max {
                break;
            }
            let mut psi: CVector = vecs.column(k).into_owned();
            fix_phase(&mut psi);
            out.push(unvec(&psi, self.n_out, self.n_in).scale(lambda.sqrt()));
        }
        Ok(out)
    }

    /// Frobenius distance between Choi matrices.
    pub fn choi_distance(&self, other: &KrausMap) -> f64 {
        if self.n_in != other.n_in || self.n_out != other.n_out {
            return f64::INFINITY;
        }
        (self.choi() - other.choi()).norm()
    }
}

/// Rotates `v` so its largest-magnitude entry (first one on ties) is real
/// and positive.
pub(crate) fn fix_phase(v: &mut CVector) {
    let max = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .expect("nonempty vector");
    let phase = v[pivot].conj() / v[pivot].norm();
    *v *= phase;
}

/// POVM elements `{F_k}` paired with density matrices `{R_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolevoForm {
    pub povm: Vec<CMatrix>,
    pub states: Vec<CMatrix>,
}

impl HolevoForm {
    pub fn new(povm: Vec<CMatrix>, states: Vec<CMatrix>) -> Self {
        HolevoForm { povm, states }
    }

    pub fn n_in(&self) -> usize {
        self.povm.first().map_or(0, |f| f.nrows())
    }

    pub fn n_out(&self) -> usize {
        self.states.first().map_or(0, |r| r.nrows())
    }

    pub fn validate(&self, tol: &Tolerance) -> Result<()> {
        if self.povm.is_empty() || self.povm.len() != self.states.len() {
            return Err(Error::InvalidHolevo(format!(
                "need equal nonzero numbers of POVM elements and states, got {} and {}",
                self.povm.len(),
                self.states.len()
            )));
        }
        let (n_in, n_out) = (self.n_in(), self.n_out());
        let mut sum = -identity(n_in);
        for (k, f) in self.povm.iter().enumerate() {
            if f.shape() != (n_in, n_in) {
                return Err(Error::InvalidHolevo(format!("F_{k} has shape {:?}", f.shape())));
            }
            if hermiticity_residual(f) > tol.check() {
                return Err(Error::InvalidHolevo(format!("F_{k} is not Hermitian")));
            }
            if f.norm() <= tol.abs {
                return Err(Error::InvalidHolevo(format!("F_{k} is zero")));
            }
            let min = crate::operator::min_eigenvalue(f);
            if min < -tol.check() {
                return Err(Error::InvalidHolevo(format!("F_{k} has eigenvalue {min:.3e}")));
            }
            sum += f;
        }
        if sum.norm() > tol.check() {
            return Err(Error::InvalidHolevo(format!(
                "POVM does not sum to the identity (residual {:.3e})",
                sum.norm()
            )));
        }
        for (k, r) in self.states.iter().enumerate() {
            if r.shape() != (n_out, n_out) {
                return Err(Error::InvalidHolevo(format!("R_{k} has shape {:?}", r.shape())));
            }
            if hermiticity_residual(r) > tol.check() {
                return Err(Error::InvalidHolevo(format!("R_{k} is not Hermitian")));
            }
            let min = crate::operator::min_eigenvalue(r);
            if min < -tol.check() {
                return Err(Error::InvalidHolevo(format!("R_{k} has eigenvalue {min:.3e}")));
            }
            if (r.trace() - ONE).norm() > tol.check() {
                return Err(Error::InvalidHolevo(format!("R_{k} does not have unit trace")));
            }
        }
        Ok(())
    }

    /// `Σ_k tr(F_k X) R_k`.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.n_out(), self.n_out());
        for (f, r) in self.povm.iter().zip(&self.states) {
            out += r * (f * x).trace();
        }
        out
    }
}

/// One rank-one Kraus operator `v w*` with `‖v‖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneTerm {
    pub v: CVector,
    pub w: CVector,
}

impl RankOneTerm {
    pub fn kraus(&self) -> CMatrix {
        outer(&self.v, &self.w)
    }

    /// Splits a numerically rank-one matrix as `v w*` with unit `v`, or
    /// returns `None` if the matrix is not rank one.
    pub fn from_matrix(m: &CMatrix, tol: &Tolerance) -> Option<RankOneTerm> {
        let svd = m.clone().svd(true, true);
        let sigma = &svd.singular_values;
        let (top, &s0) = sigma
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))?;
        if s0 == 0.0 {
            return None;
        }
        if sigma.iter().enumerate().any(|(i, &s)| i != top && s > tol.rank_gap * s0) {
            return None;
        }
        let u = svd.u.as_ref()?;
        let v_t = svd.v_t.as_ref()?;
        let mut v: CVector = u.column(top).into_owned();
        let mut w: CVector = v_t.row(top).adjoint().scale(s0);
        let before = v.clone();
        fix_phase(&mut v);
        // v_new = phase · v_old, so w must pick up the same phase to keep v w*.
        let idx = before.iter().position(|z| z.norm() > 0.0).unwrap_or(0);
        let phase = v[idx] / before[idx];
        w *= phase;
        Some(RankOneTerm { v, w })
    }
}

/// A validated completely positive trace-preserving map.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    map: KrausMap,
    holevo: Option<HolevoForm>,
    rank_one: Option<Vec<RankOneTerm>>,
}

impl Channel {
    pub fn from_kraus(kraus: Vec<CMatrix>, tol: &Tolerance) -> Result<Self> {
        Self::from_map(KrausMap::new(kraus)?, tol)
    }

    pub fn from_map(map: KrausMap, tol: &Tolerance) -> Result<Self> {
        let residual = map.trace_preservation_residual();
        if residual > tol.check() {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Channel {
            map,
            holevo: None,
            rank_one: None,
        })
    }

    /// Builds the channel with Kraus operators `v_i w_i*`.
    pub fn from_rank_one(terms: Vec<RankOneTerm>, tol: &Tolerance) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidRankOne("no terms".into()))?;
        let (n_out, n_in) = (first.v.len(), first.w.len());
        for (i, t) in terms.iter().enumerate() {
            if t.v.len() != n_out || t.w.len() != n_in {
                return Err(Error::InvalidRankOne(format!("term {i} has inconsistent dimensions")));
            }
            if (t.v.norm() - 1.0).abs() > tol.check() {
                return Err(Error::InvalidRankOne(format!("v_{i} is not a unit vector")));
            }
            if t.w.norm() <= tol.abs {
                return Err(Error::InvalidRankOne(format!("w_{i} is zero")));
            }
        }
        let kraus = terms.iter().map(RankOneTerm::kraus).collect();
        let mut ch = Self::from_map(KrausMap::with_dims(n_in, n_out, kraus)?, tol)?;
        ch.rank_one = Some(terms);
        Ok(ch)
    }

    pub fn from_holevo(h: HolevoForm, tol: &Tolerance) -> Result<Self> {
        holevo_to_kraus(&h, tol)
    }

    pub fn map(&self) -> &KrausMap {
        &self.map
    }

    pub fn kraus(&self) -> &[CMatrix] {
        self.map.kraus()
    }

    pub fn n_in(&self) -> usize {
        self.map.n_in
    }

    pub fn n_out(&self) -> usize {
        self.map.n_out
    }

    pub fn holevo(&self) -> Option<&HolevoForm> {
        self.holevo.as_ref()
    }

    pub fn rank_one_terms(&self) -> Option<&[RankOneTerm]> {
        self.rank_one.as_deref()
    }

    pub(crate) fn with_holevo(mut self, h: HolevoForm) -> Self {
        self.holevo = Some(h);
        self
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        self.map.apply(x)
    }

    /// The unital completely positive dual `X ↦ Σ V_i* X V_i`.
    pub fn dual(&self) -> KrausMap {
        self.map.adjoint()
    }

    pub fn choi(&self) -> CMatrix {
        self.map.choi()
    }

    pub fn choi_rank(&self, tol: &Tolerance) -> usize {
        self.map.choi_rank(tol)
    }

    pub fn natural_matrix(&self) -> CMatrix {
        self.map.natural_matrix()
    }

    pub fn minimal_kraus(&self, tol: &Tolerance) -> Result<Vec<CMatrix>> {
        self.map.minimal_kraus(tol)
    }

    pub fn choi_distance(&self, other: &Channel) -> f64 {
        self.map.choi_distance(&other.map)
    }

    /// A rank-one form: the attached one, else the given Kraus operators if
    /// each is rank one, else the minimal Kraus operators if each is rank one.
    pub fn rank_one_form(&self, tol: &Tolerance) -> Option<Vec<RankOneTerm>> {
        if let Some(terms) = &self.rank_one {
            return Some(terms.clone());
        }
        let split = |ks: &[CMatrix]| -> Option<Vec<RankOneTerm>> {
            ks.iter().map(|k| RankOneTerm::from_matrix(k, tol)).collect()
        };
        // Zero Kraus operators contribute nothing and are skipped.
        let given: Vec<CMatrix> = self
            .kraus()
            .iter()
            .filter(|k| k.norm() > tol.abs)
            .cloned()
            .collect();
        split(&given).or_else(|| split(&self.minimal_kraus(tol).ok()?))
    }
}

/// Kraus operators used for the canonical complement: the given ones when
/// they are already minimal (as many as the Choi rank), otherwise the
/// eigen-decomposition Kraus operators.
pub fn complement_kraus(phi: &Channel, tol: &Tolerance) -> Result<Vec<CMatrix>> {
    if phi.kraus().len() == phi.choi_rank(tol) {
        Ok(phi.kraus().to_vec())
    } else {
        phi.minimal_kraus(tol)
    }
}

/// `Φ^C(ρ) = Σ_ij tr(V_j* V_i ρ) E_ij` for minimal Kraus `{V_i}_{i=1}^d`.
pub fn canonical_complement(phi: &Channel, tol: &Tolerance) -> Result<Channel> {
    let kraus = complement_kraus(phi, tol)?;
    complement_from_kraus(phi.n_in(), &kraus, tol)
}

/// Complement for an explicit Kraus list. Its Kraus operators are
/// `K_a = Σ_i e_i (row a of V_i)`, one per output basis vector.
pub fn complement_from_kraus(n_in: usize, kraus: &[CMatrix], tol: &Tolerance) -> Result<Channel> {
    let d = kraus.len();
    let n_out = kraus.first().map_or(0, |k| k.nrows());
    let mut ks = Vec::with_capacity(n_out);
    for a in 0..n_out {
        let mut k = CMatrix::zeros(d, n_in);
        for (i, v) in kraus.iter().enumerate() {
            k.set_row(i, &v.row(a));
        }
        ks.push(k);
    }
    let ch = Channel::from_map(KrausMap::with_dims(n_in, d, ks)?, tol)?;
    Ok(ch)
}

/// Rank-one Kraus operators `√(f r) b a*` from the spectral decompositions
/// `F_k = Σ f a a*` and `R_k = Σ r b b*`.
pub fn holevo_to_kraus(h: &HolevoForm, tol: &Tolerance) -> Result<Channel> {
    h.validate(tol)?;
    let mut terms = Vec::new();
    for (f, r) in h.povm.iter().zip(&h.states) {
        let (fv, fa) = eigh(f);
        let (rv, rb) = eigh(r);
        let fmax = fv.first().copied().unwrap_or(0.0);
        let rmax = rv.first().copied().unwrap_or(0.0);
        for (i, &fi) in fv.iter().enumerate() {
            if fi <= tol.rank_gap * fmax {
                continue;
            }
            for (j, &rj) in rv.iter().enumerate() {
                if rj <= tol.rank_gap * rmax {
                    continue;
                }
                let mut b: CVector = rb.column(j).into_owned();
                fix_phase(&mut b);
                let b = b.unscale(b.norm());
                let a: CVector = fa.column(i).into_owned();
                let w = a.scale((fi * rj).sqrt());
                terms.push(RankOneTerm { v: b, w });
            }
        }
    }
    let ch = Channel::from_rank_one(terms, tol)?;
    Ok(ch.with_holevo(h.clone()))
}

/// Holevo form `F_i = E†(u_i u_i*)`, `R_i = u_i u_i*` of a channel whose range
/// lies in `span{u_i u_i*}`. Terms with `F_i = 0` are omitted.
pub fn diagonal_range_to_holevo(e: &Channel, basis: &[CVector], tol: &Tolerance) -> Result<HolevoForm> {
    let r = e.n_out();
    if basis.len() != r || basis.iter().any(|u| u.len() != r) {
        return Err(Error::dims(format!("{r} vectors of length {r}"), format!("{} vectors", basis.len())));
    }
    let mut u = CMatrix::zeros(r, r);
    for (j, b) in basis.iter().enumerate() {
        u.set_column(j, b);
    }
    let residual = crate::operator::unitarity_residual(&u);
    if residual > tol.check() {
        return Err(Error::NotUnitary { residual });
    }
    let n = e.n_in();
    let mut worst = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            let y = u.adjoint() * e.map.apply_unchecked(&matrix_unit(n, a, b)) * &u;
            let mut off = y.clone();
            for i in 0..r {
                off[(i, i)] = Complex64::new(0.0, 0.0);
            }
            worst = worst.max(off.norm());
        }
    }
    if worst > tol.check() {
        return Err(Error::RangeNotDiagonal { residual: worst });
    }
    let dual = e.dual();
    let mut povm = Vec::new();
    let mut states = Vec::new();
    for b in basis {
        let proj = outer(b, b);
        let f = crate::operator::hermitian_part(&dual.apply_unchecked(&proj));
        if f.norm() > tol.abs {
            povm.push(f);
            states.push(proj);
        }
    }
    let h = HolevoForm::new(povm, states);
    h.validate(tol)?;
    Ok(h)
}
