//! Small dense complex-matrix kernels: LU solves, Hermitian eigenvalues, and
//! the matrix exponential. Everything here operates on `ndarray` storage and
//! is sized for the few-hundred-dimensional spaces this crate works with.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) fn max_abs(m: &ArrayView2<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub(crate) fn fro_norm_slice(vals: &[C64]) -> f64 {
    vals.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    fro_norm_slice(v)
}

/// Solve `a x = b` by LU decomposition with partial pivoting, in place.
///
/// Reports a singular matrix when a pivot falls below `n * eps * max|a|`,
/// which is how a degenerate steady-state kernel shows up after the trace
/// row replacement.
pub(crate) fn solve_dense(mut a: Array2<C64>, mut b: Vec<C64>) -> Result<Vec<C64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve_dense: matrix {}x{}, rhs {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    let scale = max_abs(&a.view());
    let tiny = (n as f64) * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    let am = a
        .as_slice_mut()
        .expect("solve_dense requires standard layout");

    for k in 0..n {
        let mut piv = k;
        let mut piv_val = am[k * n + k].norm();
        for r in (k + 1)..n {
            let v = am[r * n + k].norm();
            if v > piv_val {
                piv = r;
                piv_val = v;
            }
        }
        if piv_val <= tiny {
            return Err(Error::SingularSteadyState(format!(
                "singular pivot {:.3e} at column {} (threshold {:.3e})",
                piv_val, k, tiny
            )));
        }
        if piv != k {
            for c in 0..n {
                am.swap(k * n + c, piv * n + c);
            }
            b.swap(k, piv);
        }
        let pivot = am[k * n + k];
        for r in (k + 1)..n {
            let factor = am[r * n + k] / pivot;
            if factor == C64::ZERO {
                continue;
            }
            am[r * n + k] = factor;
            let (head, tail) = am.split_at_mut(r * n);
            let krow = &head[k * n..k * n + n];
            let rrow = &mut tail[..n];
            for c in (k + 1)..n {
                rrow[c] -= factor * krow[c];
            }
            let bk = b[k];
            b[r] -= factor * bk;
        }
    }

    // back substitution
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in (k + 1)..n {
            acc -= am[k * n + c] * b[c];
        }
        b[k] = acc / am[k * n + k];
    }
    Ok(b)
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns the eigenvalues sorted ascending. The input is only read; the
/// Hermitian part `(m + m†)/2` is what gets diagonalized.
pub(crate) fn hermitian_eigenvalues(m: &ArrayView2<C64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigenvalues: square input required");
    let mut a = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)].conj());
        }
    }
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tol = 1e-14 * norm.max(f64::MIN_POSITIVE);

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // columns: A <- A J with J[p,p]=c, J[q,q]=c, J[p,q]=s*phase, J[q,p]=-s*conj(phase)
                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - s * phase.conj() * arq;
                    a[(r, q)] = s * phase * arp + c * arq;
                }
                // rows: A <- J† A
                for r in 0..n {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr - s * phase * aqr;
                    a[(q, r)] = s * phase.conj() * apr + c * aqr;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Matrix exponential by scaling-and-squaring with a Taylor series.
pub(crate) fn expm(m: &ArrayView2<C64>) -> Array2<C64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm: square input required");
    // 1-norm scaling so the Taylor series converges quickly
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let s = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.mapv(|z| z / C64::from(2f64.powi(s as i32)));

    let mut result = Array2::<C64>::eye(n);
    let mut term = Array2::<C64>::eye(n);
    for k in 1..60 {
        term = term.dot(&scaled) / C64::from(k as f64);
        result += &term;
        let tnorm = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if tnorm < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}
