use serde::Serialize;

use super::{Channel, RankOneTerm};
use crate::operator::{eigh, CMatrix, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EbVerdict {
    #[serde(rename = "EB")]
    EntanglementBreaking,
    #[serde(rename = "NOT_EB")]
    NotEntanglementBreaking,
    #[serde(rename = "UNDECIDED")]
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub is_tp: bool,
    pub tp_residual: f64,
    pub is_cp: bool,
    pub choi_min_eigenvalue: f64,
    pub choi_rank: usize,
    pub ppt: bool,
    pub partial_transpose_min_eigenvalue: f64,
    pub eb_certificate: Option<Vec<RankOneTerm>>,
    pub verdict: EbVerdict,
}

/// `(T ⊗ id)(J)`: block `(i, j)` of the result is block `(j, i)` of `J`.
pub fn partial_transpose_first(j: &CMatrix, n_in: usize, n_out: usize) -> CMatrix {
    let mut out = CMatrix::zeros(j.nrows(), j.ncols());
    for bi in 0..n_in {
        for bj in 0..n_in {
            let block = j.view((bj * n_out, bi * n_out), (n_out, n_out));
            out.view_mut((bi * n_out, bj * n_out), (n_out, n_out)).copy_from(&block);
        }
    }
    out
}

/// Rank-one Kraus certificates are sufficient for entanglement breaking and
/// a positive partial transpose of the Choi matrix is necessary.
pub fn eb_check(phi: &Channel, tol: &Tolerance) -> ChannelReport {
    let tp_residual = phi.map().trace_preservation_residual();
    let j = phi.choi();
    let (vals, _) = eigh(&j);
    let max = vals.first().copied().unwrap_or(0.0);
    let choi_min_eigenvalue = vals.last().copied().unwrap_or(0.0);
    let choi_rank = if max > 0.0 {
        vals.iter().filter(|&&v| v > tol.rank_gap * max).count()
    } else {
        0
    };
    let is_cp = choi_min_eigenvalue >= -tol.check() * max.max(1.0);
    let pt = partial_transpose_first(&j, phi.n_in(), phi.n_out());
    let pt_min = eigh(&pt).0.last().copied().unwrap_or(0.0);
    let ppt = pt_min >= -tol.check() * max.max(1.0);
    let eb_certificate = phi.rank_one_form(tol);
    let verdict = if eb_certificate.is_some() {
        EbVerdict::EntanglementBreaking
    } else if !ppt {
        EbVerdict::NotEntanglementBreaking
    } else {
        EbVerdict::Undecided
    };
    ChannelReport {
        is_tp: tp_residual <= tol.check(),
        tp_residual,
        is_cp,
        choi_min_eigenvalue,
        choi_rank,
        ppt,
        partial_transpose_min_eigenvalue: pt_min,
        eb_certificate,
        verdict,
    }
}
