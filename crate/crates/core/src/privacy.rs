//! Private algebras of entanglement-breaking channels.
//!
//! An algebra `𝒜` is private for `Φ` when `Φ(A) = tr(A) ρ₀` for a fixed
//! density `ρ₀`, equivalently when the traceless part of `𝒜` lies in the
//! nullspace of `Φ`. The constructions here start from projections `P` whose
//! images `Φ†(P)` under the unital dual are again projections, i.e. `P` lies
//! in the multiplicative domain of `Φ†`.

use std::f64::consts::PI;

use crate::channel::{Channel, RankOneTerm};
use crate::error::{Error, Result};
use crate::frame::FrameProblem;
use crate::operator::{
    eigh, hermitian_basis, hermitian_part, hermiticity_residual, identity, matrix_unit,
    orthonormalize, outer, projection_onto_span, projection_residual, projection_range,
    unitarity_residual, CMatrix, CVector, OperatorSubspace, Tolerance,
};
use crate::random;
use crate::C64;

/// Bound on the lemma identities, relative to `‖X‖_F`.
pub const LEMMA_TOL: f64 = 1e-8;
pub const LEMMA_SAMPLES: usize = 20;
const LEMMA_SEED: u64 = 0x5eed;
/// `|v_i* v_j|` at or above which two unit vectors count as collinear.
pub const COLLINEAR_TOL: f64 = 1.0 - 1e-9;
pub const CONSTANT_DIAGONAL_TOL: f64 = 1e-9;
const CONSTANT_DIAGONAL_SEED: u64 = 0xd1a6;
const CONSTANT_DIAGONAL_ATTEMPTS: usize = 64;

/// Index classes `R_k` with projections `P_k` onto `span{v_i : i ∈ R_k}` and
/// `Q_k = Φ†(P_k)`. The last entries of `p` and `q` belong to the residual
/// projection onto `span{v_i}^⊥`, which may be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausPartition {
    pub classes: Vec<Vec<usize>>,
    pub p: Vec<CMatrix>,
    pub q: Vec<CMatrix>,
    /// Number of merges applied to the finest candidate partition.
    pub merges: usize,
    /// Largest lemma-identity residual seen during validation.
    pub lemma_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivatizationCertificate {
    pub algebra_basis: Vec<CMatrix>,
    pub rho0: CMatrix,
    pub residual: f64,
    pub structure: String,
}

fn check_projection(p: &CMatrix, n: usize, tol: &Tolerance) -> Result<()> {
    if p.shape() != (n, n) {
        return Err(Error::dims(format!("({n}, {n})"), format!("{:?}", p.shape())));
    }
    let residual = projection_residual(p).max(hermiticity_residual(p));
    if residual > tol.check() {
        return Err(Error::NotProjection { residual });
    }
    Ok(())
}

fn is_projection(q: &CMatrix, tol: &Tolerance) -> bool {
    projection_residual(q) <= tol.check() && hermiticity_residual(q) <= tol.check()
}

/// Whether `Φ†(P)` is a projection, which for the unital map `Φ†` is
/// equivalent to `P` lying in its multiplicative domain.
pub fn is_projection_in_mult_domain(phi: &Channel, p: &CMatrix, tol: &Tolerance) -> Result<bool> {
    check_projection(p, phi.n_out(), tol)?;
    Ok(is_projection(&phi.dual().apply_unchecked(p), tol))
}

fn lemma_samples(n: usize) -> Vec<CMatrix> {
    let mut rng = random::rng(LEMMA_SEED);
    (0..LEMMA_SAMPLES).map(|_| random::ginibre(&mut rng, n, n)).collect()
}

struct Components {
    parent: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut j = i;
        while self.parent[j] != root {
            let next = self.parent[j];
            self.parent[j] = root;
            j = next;
        }
        root
    }

    fn union(&mut self, i: usize, j: usize) {
        let (a, b) = (self.find(i), self.find(j));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let root = self.find(i);
            if slot[root] == usize::MAX {
                slot[root] = out.len();
                out.push(Vec::new());
            }
            out[slot[root]].push(i);
        }
        out
    }
}

enum PartitionFailure {
    /// Two classes whose `Q` projections overlap or which violate a
    /// cross-class identity.
    Pair(usize, usize, String),
    /// A single class whose `Q` is not a projection.
    Class(usize, String),
}

struct Candidate {
    p: Vec<CMatrix>,
    q: Vec<CMatrix>,
    lemma_residual: f64,
}

fn evaluate_partition(
    phi: &Channel,
    terms: &[RankOneTerm],
    classes: &[Vec<usize>],
    tol: &Tolerance,
) -> std::result::Result<Candidate, PartitionFailure> {
    let n_out = phi.n_out();
    let n_in = phi.n_in();
    let dual = phi.dual();
    let mut p: Vec<CMatrix> = classes
        .iter()
        .map(|c| {
            let vs: Vec<CVector> = c.iter().map(|&i| terms[i].v.clone()).collect();
            projection_onto_span(n_out, &vs, tol).expect("consistent lengths")
        })
        .collect();
    let mut residual = identity(n_out);
    for pk in &p {
        residual -= pk;
    }
    p.push(hermitian_part(&residual));
    let q: Vec<CMatrix> = p
        .iter()
        .map(|pk| hermitian_part(&dual.apply_unchecked(pk)))
        .collect();

    let k = classes.len();
    for a in 0..k {
        let mut sum_ww = CMatrix::zeros(n_in, n_in);
        for &j in &classes[a] {
            sum_ww += outer(&terms[j].w, &terms[j].w);
        }
        if (&q[a] - &sum_ww).norm() > tol.check() {
            return Err(PartitionFailure::Class(a, "Φ†(P_k) differs from Σ w_j w_j*".into()));
        }
    }
    for a in 0..=k {
        for b in (a + 1)..=k {
            if (&p[a] * &p[b]).norm() > tol.check() {
                return Err(PartitionFailure::Pair(a.min(k - 1), b.min(k - 1), "P_k not orthogonal".into()));
            }
            if (&q[a] * &q[b]).norm() > tol.check() {
                return Err(PartitionFailure::Pair(a.min(k - 1), b.min(k - 1), "Q_k not orthogonal".into()));
            }
        }
        if !is_projection(&q[a], tol) {
            return Err(PartitionFailure::Class(a.min(k - 1), "Q_k is not a projection".into()));
        }
    }
    let mut sum_q = -identity(n_in);
    for qk in &q {
        sum_q += qk;
    }
    if sum_q.norm() > tol.check() {
        return Err(PartitionFailure::Class(0, "Σ Q_k differs from I".into()));
    }

    let mut worst = 0.0_f64;
    for x in lemma_samples(n_in) {
        let scale = x.norm();
        let fx = phi.map().apply_unchecked(&x);
        for a in 0..=k {
            let left = (phi.map().apply_unchecked(&(&q[a] * &x)) - &p[a] * &fx).norm() / scale;
            let right = (phi.map().apply_unchecked(&(&x * &q[a])) - &fx * &p[a]).norm() / scale;
            let commute = (&p[a] * &fx - &fx * &p[a]).norm() / scale;
            worst = worst.max(left).max(right).max(commute);
            if left.max(right).max(commute) > LEMMA_TOL {
                return Err(PartitionFailure::Class(a.min(k - 1), "Φ(Q_k X) differs from P_k Φ(X)".into()));
            }
            for b in 0..=k {
                if a == b {
                    continue;
                }
                let off = phi.map().apply_unchecked(&(&q[a] * &x * &q[b])).norm() / scale;
                worst = worst.max(off);
                if off > LEMMA_TOL {
                    return Err(PartitionFailure::Pair(a.min(k - 1), b.min(k - 1), "Φ(Q_k X Q_l) is nonzero".into()));
                }
            }
        }
    }
    Ok(Candidate {
        p,
        q,
        lemma_residual: worst,
    })
}

/// Partition of the Kraus indices by connected components of the graph with
/// an edge wherever `|v_i* v_j| > tol`, coarsened until every invariant and
/// lemma identity holds.
pub fn kraus_partition(phi: &Channel, tol: &Tolerance) -> Result<KrausPartition> {
    let terms = phi.rank_one_form(tol).ok_or(Error::NoRankOneForm)?;
    let d = terms.len();
    let mut comp = Components::new(d);
    for i in 0..d {
        for j in (i + 1)..d {
            if terms[i].v.dotc(&terms[j].v).norm() > tol.check() {
                comp.union(i, j);
            }
        }
    }
    let mut classes = comp.classes();
    let mut merges = 0;
    loop {
        match evaluate_partition(phi, &terms, &classes, tol) {
            Ok(c) => {
                return Ok(KrausPartition {
                    classes,
                    p: c.p,
                    q: c.q,
                    merges,
                    lemma_residual: c.lemma_residual,
                })
            }
            Err(failure) => {
                let (a, b, reason) = match failure {
                    PartitionFailure::Pair(a, b, reason) if a != b => (a, b, reason),
                    PartitionFailure::Pair(a, _, reason) | PartitionFailure::Class(a, reason) => {
                        if classes.len() < 2 {
                            return Err(Error::PartitionInvalid(reason));
                        }
                        (a, most_overlapping(phi, &terms, &classes, a), reason)
                    }
                };
                if classes.len() < 2 {
                    return Err(Error::PartitionInvalid(reason));
                }
                let (lo, hi) = (a.min(b), a.max(b));
                let moved = classes.remove(hi);
                classes[lo].extend(moved);
                classes[lo].sort_unstable();
                merges += 1;
            }
        }
    }
}

/// The class whose `w` span overlaps class `a` the most.
fn most_overlapping(phi: &Channel, terms: &[RankOneTerm], classes: &[Vec<usize>], a: usize) -> usize {
    let n = phi.n_in();
    let frame = |c: &[usize]| {
        let mut m = CMatrix::zeros(n, n);
        for &j in c {
            m += outer(&terms[j].w, &terms[j].w);
        }
        m
    };
    let qa = frame(&classes[a]);
    (0..classes.len())
        .filter(|&b| b != a)
        .max_by(|&x, &y| {
            let ox = (&qa * frame(&classes[x])).norm();
            let oy = (&qa * frame(&classes[y])).norm();
            ox.total_cmp(&oy)
        })
        .expect("at least two classes")
}

/// `Φ(X) = Σ_k P_k Φ(X) P_k` and `Φ(Q_j X Q_k) = 0` for `j ≠ k` on random `X`.
pub fn offdiag_annihilation_check(phi: &Channel, partition: &KrausPartition, _tol: &Tolerance) -> bool {
    let k = partition.p.len();
    lemma_samples(phi.n_in()).iter().all(|x| {
        let scale = x.norm();
        let fx = phi.map().apply_unchecked(x);
        let mut block = CMatrix::zeros(fx.nrows(), fx.ncols());
        for pk in &partition.p {
            block += pk * &fx * pk;
        }
        if (&fx - block).norm() / scale > LEMMA_TOL {
            return false;
        }
        (0..k).all(|a| {
            (0..k).filter(|&b| b != a).all(|b| {
                let y = &partition.q[a] * x * &partition.q[b];
                phi.map().apply_unchecked(&y).norm() / scale <= LEMMA_TOL
            })
        })
    })
}

/// For each cluster of collinear `v_i = v` with `vv*` in the multiplicative
/// domain of `Φ†`, the algebra `span{w_i w_j*}` privatized to `vv*`.
/// Singleton clusters are skipped.
pub fn rank_one_private_algebra(phi: &Channel, tol: &Tolerance) -> Vec<PrivatizationCertificate> {
    let Some(terms) = phi.rank_one_form(tol) else {
        return Vec::new();
    };
    let n = phi.n_in();
    let mut assigned = vec![false; terms.len()];
    let mut out = Vec::new();
    for i in 0..terms.len() {
        if assigned[i] {
            continue;
        }
        let v = &terms[i].v;
        let mut ws = Vec::new();
        for (j, t) in terms.iter().enumerate().skip(i) {
            if assigned[j] {
                continue;
            }
            let c = v.dotc(&t.v);
            if c.norm() >= COLLINEAR_TOL {
                assigned[j] = true;
                // v_j w_j* = v (conj(c) w_j)* with c the unit phase of v_j = c v.
                ws.push(t.w.scale(1.0) * (c.conj() / c.norm()));
            }
        }
        if ws.len() < 2 {
            continue;
        }
        let rho0 = outer(v, v);
        if !is_projection_in_mult_domain(phi, &rho0, tol).unwrap_or(false) {
            continue;
        }
        let products: Vec<CMatrix> = ws
            .iter()
            .flat_map(|a| ws.iter().map(move |b| outer(a, b)))
            .collect();
        let Ok(span) = orthonormalize(n, &products, tol) else {
            continue;
        };
        let k = (span.dim() as f64).sqrt().round() as usize;
        if let Ok(mut cert) = verify_private(phi, span.basis(), Some(&rho0), tol) {
            cert.structure = format!("M_{k}");
            out.push(cert);
        }
    }
    out
}

/// A unitary `U` and a basis of `U (⊕_k I_{a_k} ⊗ M_{b_k}) U*` in which every
/// element has all diagonal entries equal to `tr/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantDiagonalAlgebra {
    pub r: usize,
    /// `(a_k, b_k)` with `a_k ≥ b_k`.
    pub blocks: Vec<(usize, usize)>,
    pub unitary: CMatrix,
    pub basis: Vec<CMatrix>,
    pub construction: &'static str,
    /// Largest deviation of a diagonal entry from `tr/r` over the basis.
    pub deviation: f64,
}

fn block_offsets(blocks: &[(usize, usize)]) -> Vec<usize> {
    let mut off = Vec::with_capacity(blocks.len());
    let mut acc = 0;
    for &(a, b) in blocks {
        off.push(acc);
        acc += a * b;
    }
    off
}

/// `I_a ⊗ G` placed at `offset` in an `r × r` zero matrix.
fn embed(r: usize, offset: usize, a: usize, g: &CMatrix) -> CMatrix {
    let b = g.nrows();
    let mut m = CMatrix::zeros(r, r);
    m.view_mut((offset, offset), (a * b, a * b))
        .copy_from(&identity(a).kronecker(g));
    m
}

fn root_of_unity(k: usize, m: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k % m) as f64 / m as f64)
}

/// Columns `vec(X^α Z^β)/√m`.
fn weyl_basis(m: usize) -> CMatrix {
    let mut u = CMatrix::zeros(m * m, m * m);
    for alpha in 0..m {
        for beta in 0..m {
            // (X^α Z^β)_{row, col} = ω^{β col} when row = col + α.
            let mut w = CMatrix::zeros(m, m);
            for col in 0..m {
                w[((col + alpha) % m, col)] = root_of_unity(beta * col, m);
            }
            let v = crate::operator::vec_op(&w).unscale((m as f64).sqrt());
            u.set_column(alpha * m + beta, &v);
        }
    }
    u
}

/// Columns `(1/√b) Σ_t ω_b^{lt} e_{(t+k) mod a} ⊗ e_t`.
fn fourier_twisted_basis(a: usize, b: usize) -> CMatrix {
    let mut u = CMatrix::zeros(a * b, a * b);
    let s = 1.0 / (b as f64).sqrt();
    for k in 0..a {
        for l in 0..b {
            let col = k * b + l;
            for t in 0..b {
                let row = ((t + k) % a) * b + t;
                u[(row, col)] = root_of_unity(l * t, b) * s;
            }
        }
    }
    u
}

fn dft(r: usize) -> CMatrix {
    let s = 1.0 / (r as f64).sqrt();
    CMatrix::from_fn(r, r, |x, y| root_of_unity(x * y, r) * s)
}

fn numerical_constant_diagonal(r: usize, blocks: &[(usize, usize)], offsets: &[usize]) -> Option<CMatrix> {
    let mut constraints = Vec::new();
    let mut targets = Vec::new();
    for (&(a, b), &off) in blocks.iter().zip(offsets) {
        for g in hermitian_basis(b) {
            let c = embed(r, off, a, &g);
            targets.push(c.trace().re / r as f64);
            constraints.push(c);
        }
    }
    let problem = FrameProblem {
        d: r,
        constraints: &constraints,
        targets: &targets,
    };
    let mut rng = random::rng(CONSTANT_DIAGONAL_SEED);
    for _ in 0..CONSTANT_DIAGONAL_ATTEMPTS {
        let init = (0..r).map(|_| random::unit_vector(&mut rng, r)).collect();
        let sol = problem.solve(init);
        if sol.residual <= 1e-12 {
            let mut m = CMatrix::zeros(r, r);
            for (x, v) in sol.vectors.iter().enumerate() {
                m.set_column(x, v);
            }
            let svd = m.svd(true, true);
            return Some(svd.u.expect("requested") * svd.v_t.expect("requested"));
        }
    }
    None
}

/// Constant-diagonal algebra for a partition `Σ i_k j_k = r`.
///
/// The columns `u_x = U* e_x` must have reduced state `(a_k/r) I_{b_k}` on
/// every block. A single square block uses the Weyl (generalized Bell) basis,
/// a single rectangular block a Fourier-twisted basis, all-scalar blocks the
/// discrete Fourier transform; other partitions are solved numerically.
pub fn constant_diagonal_algebra(
    r: usize,
    partition: &[(usize, usize)],
    tol: &Tolerance,
) -> Result<ConstantDiagonalAlgebra> {
    if partition.is_empty() || partition.iter().any(|&(i, j)| i == 0 || j == 0) {
        return Err(Error::InvalidPartition(format!("{partition:?} has an empty block")));
    }
    let total: usize = partition.iter().map(|&(i, j)| i * j).sum();
    if total != r {
        return Err(Error::InvalidPartition(format!("{partition:?} sums to {total}, not {r}")));
    }
    let blocks: Vec<(usize, usize)> = partition.iter().map(|&(i, j)| (i.max(j), i.min(j))).collect();
    let offsets = block_offsets(&blocks);

    let (ustar, construction) = if blocks.len() == 1 && blocks[0].0 == blocks[0].1 {
        (weyl_basis(blocks[0].0), "weyl")
    } else if blocks.len() == 1 {
        (fourier_twisted_basis(blocks[0].0, blocks[0].1), "fourier")
    } else if blocks.iter().all(|&(_, b)| b == 1) {
        (dft(r), "dft")
    } else {
        let u = numerical_constant_diagonal(r, &blocks, &offsets)
            .ok_or(Error::ConstructionUnverified { residual: f64::INFINITY })?;
        (u, "numerical")
    };
    let unitary = ustar.adjoint();

    let mut basis = Vec::new();
    for (&(a, b), &off) in blocks.iter().zip(&offsets) {
        for p in 0..b {
            for q in 0..b {
                let e = embed(r, off, a, &matrix_unit(b, p, q));
                basis.push(&unitary * e * &ustar);
            }
        }
    }
    let mut deviation = unitarity_residual(&unitary);
    for m in &basis {
        let mean = m.trace() / C64::new(r as f64, 0.0);
        for x in 0..r {
            deviation = deviation.max((m[(x, x)] - mean).norm());
        }
    }
    if deviation > CONSTANT_DIAGONAL_TOL.max(tol.abs) {
        return Err(Error::ConstructionUnverified { residual: deviation });
    }
    Ok(ConstantDiagonalAlgebra {
        r,
        blocks,
        unitary,
        basis,
        construction,
        deviation,
    })
}

fn gram_schmidt_vectors(vs: &[CVector], threshold: f64) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::new();
    for v in vs {
        let mut u = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dotc(&u);
                u -= q * c;
            }
        }
        let norm = u.norm();
        if norm > threshold {
            out.push(u.unscale(norm));
        }
    }
    out
}

/// Orthonormal basis of `range Q_k`: Gram–Schmidt of the `w_j` with `v_j` in
/// `range P_k`, in Kraus order, when a rank-one form is available.
fn range_basis(
    terms: Option<&[RankOneTerm]>,
    pk: &CMatrix,
    qk: &CMatrix,
    s: usize,
    tol: &Tolerance,
) -> CMatrix {
    if let Some(terms) = terms {
        let ws: Vec<CVector> = terms
            .iter()
            .filter(|t| (pk * &t.v).norm_squared() >= 0.5)
            .map(|t| t.w.clone())
            .collect();
        let scale = ws.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let basis = gram_schmidt_vectors(&ws, tol.rank_gap * scale);
        if basis.len() == s {
            let mut m = CMatrix::zeros(qk.nrows(), s);
            for (j, b) in basis.iter().enumerate() {
                m.set_column(j, b);
            }
            if (&m * m.adjoint() - qk).norm() <= tol.check() {
                return m;
            }
        }
    }
    projection_range(qk)
}

/// Embeds `algebra ⊆ M_r` through `Ψ(A) = Σ a_kl B_k B_l*`, where `B_k` is
/// an orthonormal basis of `range Φ†(P_k)`, and certifies
/// `Φ(Ψ(A)) = (tr(A)/r) P Φ(I)` with `P = Σ P_k`.
pub fn same_rank_private_algebra(
    phi: &Channel,
    p_list: &[CMatrix],
    algebra: &[CMatrix],
    tol: &Tolerance,
) -> Result<PrivatizationCertificate> {
    let r = p_list.len();
    if r == 0 {
        return Err(Error::PartitionInvalid("no projections".into()));
    }
    for a in algebra {
        if a.shape() != (r, r) {
            return Err(Error::dims(format!("({r}, {r})"), format!("{:?}", a.shape())));
        }
    }
    let n_out = phi.n_out();
    for (k, pk) in p_list.iter().enumerate() {
        check_projection(pk, n_out, tol)?;
        if !is_projection_in_mult_domain(phi, pk, tol)? {
            return Err(Error::NotInMultiplicativeDomain { index: k });
        }
        for pl in &p_list[k + 1..] {
            if (pk * pl).norm() > tol.check() {
                return Err(Error::PartitionInvalid("projections are not mutually orthogonal".into()));
            }
        }
    }
    let dual = phi.dual();
    let q: Vec<CMatrix> = p_list
        .iter()
        .map(|pk| hermitian_part(&dual.apply_unchecked(pk)))
        .collect();
    let ranks: Vec<usize> = q
        .iter()
        .map(|qk| eigh(qk).0.iter().filter(|&&v| v > 0.5).count())
        .collect();
    if ranks.iter().any(|&s| s != ranks[0]) || ranks[0] == 0 {
        return Err(Error::RankMismatch(ranks));
    }
    let s = ranks[0];
    let terms = phi.rank_one_form(tol);
    let bases: Vec<CMatrix> = p_list
        .iter()
        .zip(&q)
        .map(|(pk, qk)| range_basis(terms.as_deref(), pk, qk, s, tol))
        .collect();

    let n = phi.n_in();
    let psi = |a: &CMatrix| {
        let mut out = CMatrix::zeros(n, n);
        for k in 0..r {
            for l in 0..r {
                if a[(k, l)] != C64::new(0.0, 0.0) {
                    out += &bases[k] * bases[l].adjoint() * a[(k, l)];
                }
            }
        }
        out
    };
    let mapped: Vec<CMatrix> = algebra.iter().map(psi).collect();

    let mut p_total = CMatrix::zeros(n_out, n_out);
    for pk in p_list {
        p_total += pk;
    }
    let p_phi_i = &p_total * phi.map().apply_unchecked(&identity(n));
    let rho0 = &p_phi_i / p_phi_i.trace();
    let mut cert = verify_private(phi, &mapped, Some(&rho0), tol)?;

    for a in &mapped {
        let fa = phi.map().apply_unchecked(a);
        for pk in p_list {
            let c = (pk * &fa - &fa * pk).norm();
            if c > tol.check() * a.norm().max(1.0) {
                return Err(Error::Verification(format!(
                    "Φ(Ψ(A)) fails to commute with a projection (residual {c:.3e})"
                )));
            }
        }
    }
    cert.structure = format!("Psi(A) for A in M_{r}, embedded as M_{r} ⊗ I_{s}");
    Ok(cert)
}

/// Entanglement-breaking channel on `M_{rs}` with Kraus `v_{i,k} w_{i,k}*`:
/// the `w_{i,k}` form one orthonormal basis, and for each `k` the `v_{i,k}`
/// are unit vectors drawn inside the `k`-th of `r` mutually orthogonal
/// `s`-dimensional subspaces.
pub fn example_family(r: usize, s: usize, seed: u64) -> Result<Channel> {
    if r == 0 || s == 0 {
        return Err(Error::InvalidPartition(format!("n = r·s needs r, s ≥ 1 (got {r}, {s})")));
    }
    let n = r * s;
    let mut rng = random::rng(seed);
    let w = random::unitary(&mut rng, n);
    let v_frame = random::unitary(&mut rng, n);
    let mut terms = Vec::with_capacity(n);
    for k in 0..r {
        let sub = v_frame.columns(k * s, s);
        for i in 0..s {
            let coeffs = random::gaussian_vector(&mut rng, s);
            let v: CVector = &sub * coeffs;
            terms.push(RankOneTerm {
                v: v.unscale(v.norm()),
                w: w.column(k * s + i).into_owned(),
            });
        }
    }
    Channel::from_rank_one(terms, &Tolerance::default())
}

fn trace_pivot(basis: &[CMatrix], tol: &Tolerance) -> Option<usize> {
    basis.iter().position(|a| a.trace().norm() > tol.check() * a.norm())
}

/// Orthonormal basis of `span(basis) ∩ M_n(ℂ)₀`, obtained by subtracting
/// multiples of the first element with nonzero trace.
pub fn traceless_part(n: usize, basis: &[CMatrix], tol: &Tolerance) -> Result<OperatorSubspace> {
    let traceless: Vec<CMatrix> = match trace_pivot(basis, tol) {
        Some(k) => {
            let tk = basis[k].trace();
            basis
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, a)| a - &basis[k] * (a.trace() / tk))
                .collect()
        }
        None => basis.to_vec(),
    };
    orthonormalize(n, &traceless, tol)
}

/// Certifies privacy of the algebra spanned by `basis`. Two equivalent checks
/// run and must agree: the traceless part of the algebra is annihilated, and
/// `Φ(A) = tr(A) ρ̂₀` with `ρ̂₀ = Φ(A_*)/tr(A_*)` for the first basis element
/// of nonzero trace. Closure under adjoints and products is checked last.
pub fn verify_private(
    phi: &Channel,
    basis: &[CMatrix],
    rho0: Option<&CMatrix>,
    tol: &Tolerance,
) -> Result<PrivatizationCertificate> {
    let n = phi.n_in();
    if basis.is_empty() {
        return Err(Error::dims("a nonempty algebra basis", "none"));
    }
    for a in basis {
        if a.shape() != (n, n) {
            return Err(Error::dims(format!("({n}, {n})"), format!("{:?}", a.shape())));
        }
    }
    let images: Vec<CMatrix> = basis.iter().map(|a| phi.map().apply_unchecked(a)).collect();
    let pivot = trace_pivot(basis, tol);

    // (a) the traceless part of the algebra lies in the nullspace.
    let traceless_span = traceless_part(n, basis, tol)?;
    let worst_a = traceless_span
        .basis()
        .iter()
        .map(|b| phi.map().apply_unchecked(b).norm())
        .fold(0.0_f64, f64::max);

    // (b) Φ(A) = tr(A) ρ̂₀ on the basis.
    let rho_hat = match (pivot, rho0) {
        (Some(k), _) => &images[k] / basis[k].trace(),
        (None, Some(r)) => r.clone(),
        (None, None) => CMatrix::zeros(phi.n_out(), phi.n_out()),
    };
    let (mut worst_b, mut worst_b_idx) = (0.0_f64, 0usize);
    for (i, (a, fa)) in basis.iter().zip(&images).enumerate() {
        let r = (fa - &rho_hat * a.trace()).norm() / a.norm();
        if r > worst_b {
            worst_b = r;
            worst_b_idx = i;
        }
    }

    let pass_a = worst_a <= tol.check();
    let pass_b = worst_b <= tol.check();
    if pass_a != pass_b {
        return Err(Error::Verification(format!(
            "nullspace containment ({worst_a:.3e}) and privacy ({worst_b:.3e}) checks disagree"
        )));
    }
    if !pass_b {
        return Err(Error::PrivacyViolation {
            index: worst_b_idx,
            residual: worst_b,
        });
    }
    if let Some(expected) = rho0 {
        let mismatch = (&rho_hat - expected).norm();
        if mismatch > tol.check() {
            return Err(Error::PrivacyViolation {
                index: pivot.unwrap_or(0),
                residual: mismatch,
            });
        }
    }

    let span = orthonormalize(n, basis, tol)?;
    let mut closure = 0.0_f64;
    for a in basis {
        closure = closure.max(span.relative_distance(&a.adjoint()));
        for b in basis {
            let prod = a * b;
            let scale = a.norm() * b.norm();
            if scale > 0.0 {
                closure = closure.max(span.distance(&prod) / scale);
            }
        }
    }
    if closure > tol.check() {
        return Err(Error::AlgebraNotClosed { residual: closure });
    }

    let residual = basis
        .iter()
        .zip(&images)
        .map(|(a, fa)| (fa - &rho_hat * a.trace()).norm())
        .fold(0.0, f64::max);
    Ok(PrivatizationCertificate {
        algebra_basis: basis.to_vec(),
        rho0: rho_hat,
        residual,
        structure: format!("{}-dimensional algebra", span.dim()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::builtins::*;
    use crate::operator::{basis_vector, pauli_x, pauli_y, pauli_z};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn full_algebra(n: usize) -> Vec<CMatrix> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                out.push(matrix_unit(n, i, j));
            }
        }
        out
    }

    #[test]
    fn mult_domain_examples() {
        let se = spontaneous_emission(2);
        assert!(is_projection_in_mult_domain(&se, &matrix_unit(2, 0, 0), &tol()).unwrap());
        assert!(is_projection_in_mult_domain(&se, &matrix_unit(2, 1, 1), &tol()).unwrap());
        assert!(!is_projection_in_mult_domain(&depolarizing(2), &matrix_unit(2, 0, 0), &tol()).unwrap());
        assert!(matches!(
            is_projection_in_mult_domain(&se, &pauli_x(), &tol()),
            Err(Error::NotProjection { .. })
        ));
    }

    #[test]
    fn partition_of_spontaneous_emission() {
        let part = kraus_partition(&spontaneous_emission(2), &tol()).unwrap();
        assert_eq!(part.classes, vec![vec![0, 1]]);
        assert!((&part.p[0] - matrix_unit(2, 0, 0)).norm() < 1e-12);
        assert!((&part.p[1] - matrix_unit(2, 1, 1)).norm() < 1e-12);
        assert!((&part.q[0] - identity(2)).norm() < 1e-12);
        assert!(part.q[1].norm() < 1e-12);
        assert!(offdiag_annihilation_check(&spontaneous_emission(2), &part, &tol()));
    }

    #[test]
    fn partition_of_depolarizing() {
        let part = kraus_partition(&depolarizing(2), &tol()).unwrap();
        assert_eq!(part.classes.len(), 1);
        assert!((&part.p[0] - identity(2)).norm() < 1e-12);
        assert!((&part.q[0] - identity(2)).norm() < 1e-12);
    }

    #[test]
    fn partition_of_example_family() {
        for (r, s) in [(2, 2), (3, 2), (1, 2)] {
            let ch = example_family(r, s, 7).unwrap();
            let part = kraus_partition(&ch, &tol()).unwrap();
            assert_eq!(part.classes.len(), r);
            for qk in &part.q[..r] {
                let rank = eigh(qk).0.iter().filter(|&&v| v > 0.5).count();
                assert_eq!(rank, s);
            }
            assert!(offdiag_annihilation_check(&ch, &part, &tol()));
        }
    }

    #[test]
    fn partition_coarsens_overlapping_frames() {
        // v_1 ⊥ v_2 but w_1, w_2 are not orthogonal across the classes, so
        // the finest partition fails and the classes merge.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let e = |i| basis_vector(2, i);
        let plus = (e(0) + e(1)).scale(h);
        let minus = (e(0) - e(1)).scale(h);
        let terms = vec![
            RankOneTerm { v: e(0), w: e(0).scale(h) },
            RankOneTerm { v: e(1), w: plus.scale(h) },
            RankOneTerm { v: e(1), w: minus.scale(h) },
            RankOneTerm { v: e(0), w: e(1).scale(h) },
        ];
        let ch = Channel::from_rank_one(terms, &tol()).unwrap();
        let part = kraus_partition(&ch, &tol()).unwrap();
        assert!(part.merges >= 1);
        assert_eq!(part.classes.len(), 1);
    }

    #[test]
    fn rank_one_algebras() {
        for n in [2, 3] {
            let certs = rank_one_private_algebra(&spontaneous_emission(n), &tol());
            assert_eq!(certs.len(), 1);
            assert_eq!(certs[0].algebra_basis.len(), n * n);
            assert!((&certs[0].rho0 - matrix_unit(n, 0, 0)).norm() < 1e-12);
            assert_eq!(certs[0].structure, format!("M_{n}"));
        }
        // Pauli channel in its minimal rank-one form has no collinear v's.
        assert!(rank_one_private_algebra(&depolarizing(2), &tol()).is_empty());
    }

    #[test]
    fn constant_diagonal_examples() {
        let cd = constant_diagonal_algebra(4, &[(2, 2)], &tol()).unwrap();
        assert_eq!(cd.construction, "weyl");
        assert!(cd.deviation <= CONSTANT_DIAGONAL_TOL);
        // Columns of U* are vec(P)/√2 for the Weyl operators.
        let ustar = cd.unitary.adjoint();
        for (j, p) in [identity(2), pauli_z(), pauli_x(), &pauli_x() * &pauli_z()].iter().enumerate() {
            let v = crate::operator::vec_op(p).scale(std::f64::consts::FRAC_1_SQRT_2);
            assert!((ustar.column(j) - v).norm() < 1e-12, "column {j}");
        }
        let scalars = constant_diagonal_algebra(1, &[(1, 1)], &tol()).unwrap();
        assert_eq!(scalars.basis.len(), 1);
        let two = constant_diagonal_algebra(2, &[(2, 1)], &tol()).unwrap();
        assert!((&two.basis[0] - identity(2)).norm() < 1e-12);
        let dft = constant_diagonal_algebra(3, &[(1, 1), (1, 1), (1, 1)], &tol()).unwrap();
        assert_eq!((dft.construction, dft.basis.len()), ("dft", 3));
        let rect = constant_diagonal_algebra(6, &[(3, 2)], &tol()).unwrap();
        assert_eq!(rect.construction, "fourier");
        assert!(constant_diagonal_algebra(4, &[(2, 1)], &tol()).is_err());
    }

    #[test]
    fn constant_diagonal_mixed_partition() {
        let cd = constant_diagonal_algebra(5, &[(2, 2), (1, 1)], &tol()).unwrap();
        assert_eq!(cd.construction, "numerical");
        assert!(cd.deviation <= CONSTANT_DIAGONAL_TOL);
        assert_eq!(cd.basis.len(), 5);
    }

    #[test]
    fn same_rank_examples() {
        let ch = example_family(2, 2, 3).unwrap();
        let part = kraus_partition(&ch, &tol()).unwrap();
        let cd = constant_diagonal_algebra(2, &[(1, 1), (1, 1)], &tol()).unwrap();
        let cert = same_rank_private_algebra(&ch, &part.p[..2], &cd.basis, &tol()).unwrap();
        assert!(cert.residual <= 1e-8);

        let dep = depolarizing(2);
        let cert = same_rank_private_algebra(&dep, &[identity(2)], &[identity(1)], &tol()).unwrap();
        assert!((&cert.rho0 - identity(2).scale(0.5)).norm() < 1e-12);
        assert!(matches!(
            same_rank_private_algebra(&dep, &[matrix_unit(2, 0, 0)], &[identity(1)], &tol()),
            Err(Error::NotInMultiplicativeDomain { index: 0 })
        ));
    }

    #[test]
    fn verify_private_examples() {
        let cert = verify_private(&depolarizing(3), &full_algebra(3), None, &tol()).unwrap();
        assert!((&cert.rho0 - identity(3).scale(1.0 / 3.0)).norm() < 1e-12);
        let cert = verify_private(&spontaneous_emission(2), &full_algebra(2), None, &tol()).unwrap();
        assert!((&cert.rho0 - matrix_unit(2, 0, 0)).norm() < 1e-12);
        assert!(matches!(
            verify_private(&identity_channel(2), &full_algebra(2), None, &tol()),
            Err(Error::PrivacyViolation { .. })
        ));
    }

    #[test]
    fn verify_private_rejects_unclosed_span() {
        // span{I, X} is an algebra; span{I, X, Y} is not (XY = iZ).
        let paulis = [identity(2), pauli_x(), pauli_y()];
        assert!(matches!(
            verify_private(&depolarizing(2), &paulis, None, &tol()),
            Err(Error::AlgebraNotClosed { .. })
        ));
    }
}
