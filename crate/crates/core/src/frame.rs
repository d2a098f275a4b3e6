//! Levenberg–Marquardt solver for tight frames with prescribed quadratic
//! moments: vectors `w_1, …, w_r ∈ ℂ^d` with `Σ w_i w_i* = I_d` and
//! `w_i* C_t w_i = γ_t` for every Hermitian constraint `C_t` and every `i`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::operator::{CMatrix, CVector};

pub(crate) struct FrameProblem<'a> {
    pub d: usize,
    pub constraints: &'a [CMatrix],
    pub targets: &'a [f64],
}

pub(crate) struct FrameSolution {
    pub vectors: Vec<CVector>,
    /// Euclidean norm of the residual vector.
    pub residual: f64,
}

const MAX_ITERATIONS: usize = 300;
const STOP_RESIDUAL: f64 = 1e-14;

impl FrameProblem<'_> {
    fn unknowns(&self, r: usize) -> usize {
        2 * self.d * r
    }

    fn pack(&self, vectors: &[CVector]) -> DVector<f64> {
        let d = self.d;
        let mut x = DVector::zeros(self.unknowns(vectors.len()));
        for (i, w) in vectors.iter().enumerate() {
            for k in 0..d {
                x[2 * (i * d + k)] = w[k].re;
                x[2 * (i * d + k) + 1] = w[k].im;
            }
        }
        x
    }

    fn unpack(&self, x: &DVector<f64>) -> Vec<CVector> {
        let d = self.d;
        let r = x.len() / (2 * d);
        (0..r)
            .map(|i| CVector::from_fn(d, |k, _| Complex64::new(x[2 * (i * d + k)], x[2 * (i * d + k) + 1])))
            .collect()
    }

    /// Residuals and Jacobian. Rows: the moment constraints for each vector,
    /// then the frame operator entries (diagonal, then `√2·Re`, `√2·Im` of
    /// the strict upper triangle).
    fn evaluate(&self, x: &DVector<f64>, with_jacobian: bool) -> (DVector<f64>, Option<DMatrix<f64>>) {
        let d = self.d;
        let ws = self.unpack(x);
        let r = ws.len();
        let nc = self.constraints.len();
        let rows = r * nc + d * d;
        let mut f = DVector::zeros(rows);
        let mut jac = with_jacobian.then(|| DMatrix::zeros(rows, x.len()));

        for (i, w) in ws.iter().enumerate() {
            for (t, c) in self.constraints.iter().enumerate() {
                let cw = c * w;
                let row = i * nc + t;
                f[row] = w.dotc(&cw).re - self.targets[t];
                if let Some(j) = jac.as_mut() {
                    for k in 0..d {
                        j[(row, 2 * (i * d + k))] = 2.0 * cw[k].re;
                        j[(row, 2 * (i * d + k) + 1)] = 2.0 * cw[k].im;
                    }
                }
            }
        }

        let mut frame = CMatrix::zeros(d, d);
        for w in &ws {
            frame += w * w.adjoint();
        }
        let sqrt2 = std::f64::consts::SQRT_2;
        let base = r * nc;
        let mut row = base;
        for p in 0..d {
            f[row] = frame[(p, p)].re - 1.0;
            if let Some(j) = jac.as_mut() {
                for (i, w) in ws.iter().enumerate() {
                    j[(row, 2 * (i * d + p))] = 2.0 * w[p].re;
                    j[(row, 2 * (i * d + p) + 1)] = 2.0 * w[p].im;
                }
            }
            row += 1;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let e = frame[(p, q)];
                f[row] = sqrt2 * e.re;
                f[row + 1] = sqrt2 * e.im;
                if let Some(j) = jac.as_mut() {
                    // E_pq = Σ_i w_ip conj(w_iq)
                    for (i, w) in ws.iter().enumerate() {
                        let (wp, wq) = (w[p], w[q]);
                        let cp = 2 * (i * d + p);
                        let cq = 2 * (i * d + q);
                        // d/dRe w_p: conj(w_q); d/dIm w_p: i conj(w_q)
                        // d/dRe w_q: w_p;       d/dIm w_q: -i w_p
                        j[(row, cp)] += sqrt2 * wq.re;
                        j[(row + 1, cp)] += sqrt2 * -wq.im;
                        j[(row, cp + 1)] += sqrt2 * wq.im;
                        j[(row + 1, cp + 1)] += sqrt2 * wq.re;
                        j[(row, cq)] += sqrt2 * wp.re;
                        j[(row + 1, cq)] += sqrt2 * wp.im;
                        j[(row, cq + 1)] += sqrt2 * wp.im;
                        j[(row + 1, cq + 1)] += sqrt2 * -wp.re;
                    }
                }
                row += 2;
            }
        }
        (f, jac)
    }

    pub fn solve(&self, init: Vec<CVector>) -> FrameSolution {
        let mut x = self.pack(&init);
        let (mut f, mut jac) = self.evaluate(&x, true);
        let mut cost = f.norm_squared();
        let mut mu = {
            let j = jac.as_ref().expect("jacobian requested");
            let diag_max = j.column_iter().map(|c| c.norm_squared()).fold(0.0, f64::max);
            1e-3 * diag_max.max(1e-12)
        };
        for _ in 0..MAX_ITERATIONS {
            if cost.sqrt() <= STOP_RESIDUAL {
                break;
            }
            let j = jac.as_ref().expect("jacobian requested");
            // Solve in whichever of the normal-equation spaces is smaller.
            let step = if j.nrows() < j.ncols() {
                let mut a = j * j.transpose();
                for k in 0..a.nrows() {
                    a[(k, k)] += mu;
                }
                a.cholesky().map(|ch| -(j.transpose() * ch.solve(&f)))
            } else {
                let mut a = j.transpose() * j;
                for k in 0..a.nrows() {
                    a[(k, k)] += mu;
                }
                let g = j.transpose() * &f;
                a.cholesky().map(|ch| -ch.solve(&g))
            };
            let Some(step) = step else {
                mu *= 10.0;
                continue;
            };
            let candidate = &x + &step;
            let (fc, _) = self.evaluate(&candidate, false);
            let cc = fc.norm_squared();
            if cc < cost {
                x = candidate;
                let (nf, nj) = self.evaluate(&x, true);
                f = nf;
                jac = nj;
                cost = cc;
                mu = (mu * 0.3).max(1e-15);
            } else {
                mu *= 10.0;
                if mu > 1e12 {
                    break;
                }
            }
            if step.norm() <= 1e-16 * (1.0 + x.norm()) {
                break;
            }
        }
        FrameSolution {
            vectors: self.unpack(&x),
            residual: cost.sqrt(),
        }
    }
}
