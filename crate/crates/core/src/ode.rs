//! Adaptive embedded Runge-Kutta propagation for complex state vectors.
//!
//! The Dormand-Prince 5(4) pair with a standard proportional step controller;
//! the tolerance contract (relative 1e-9, absolute 1e-12 by default) is what
//! the master-equation module is written against, not the method itself.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 20_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau; the stage times are not needed because every
// right-hand side in this crate is autonomous.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `dy/dt = f(y)` from `t0` to `t1` (autonomous right-hand side).
///
/// `f(y, dy)` writes the derivative into `dy`. Returns the state at `t1`.
pub fn integrate<F>(f: F, y0: Vec<C64>, t0: f64, t1: f64, opts: &OdeOptions) -> Result<Vec<C64>>
where
    F: Fn(&[C64], &mut [C64]),
{
    let n = y0.len();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    assert!(span > 0.0, "integrate: t1 must be >= t0");

    let mut y = y0;
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::ZERO; n]).collect();
    let mut ytmp = vec![C64::ZERO; n];
    let mut y5 = vec![C64::ZERO; n];

    f(&y, &mut k[0]);

    // initial step from derivative magnitude
    let sc0: f64 = opts.atol + opts.rtol * linfty(&y);
    let d1 = linfty(&k[0]);
    let mut h = if d1 > 0.0 {
        (0.01 * sc0 / d1).min(span / 10.0)
    } else {
        span / 100.0
    }
    .max(span * 1e-12);

    let mut t = t0;
    let h_min = span * 1e-14;
    let mut steps = 0usize;

    while t < t1 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::StepSizeUnderflow { t });
        }
        if h < h_min {
            return Err(Error::StepSizeUnderflow { t });
        }
        if t + h > t1 {
            h = t1 - t;
        }

        for stage in 1..7 {
            for i in 0..n {
                let mut acc = C64::ZERO;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let a = A[stage - 1][j];
                    if a != 0.0 {
                        acc += kj[i] * C64::from(a);
                    }
                }
                ytmp[i] = y[i] + acc * C64::from(h);
            }
            f(&ytmp, &mut k[stage]);
        }

        // 5th-order solution and embedded error estimate
        let mut err_sq = 0.0f64;
        for i in 0..n {
            let mut acc5 = C64::ZERO;
            let mut acc4 = C64::ZERO;
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    acc5 += kj[i] * C64::from(B5[j]);
                }
                if B4[j] != 0.0 {
                    acc4 += kj[i] * C64::from(B4[j]);
                }
            }
            y5[i] = y[i] + acc5 * C64::from(h);
            let e = (acc5 - acc4) * C64::from(h);
            let sc = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
            let r = e.norm() / sc;
            err_sq += r * r;
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut y5);
            // FSAL: the 7th stage was evaluated at the accepted solution
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Ok(y)
}

fn linfty(v: &[C64]) -> f64 {
    v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_analytic() {
        let y0 = vec![C64::new(1.0, 0.0)];
        let y = integrate(|y, dy| dy[0] = -y[0], y0, 0.0, 1.0, &OdeOptions::default()).unwrap();
        assert!((y[0].re - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rotation_conserves_norm() {
        // dy/dt = i*y, |y| conserved
        let y = integrate(
            |y, dy| dy[0] = C64::new(0.0, 1.0) * y[0],
            vec![C64::new(1.0, 0.0)],
            0.0,
            10.0,
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((y[0].norm() - 1.0).abs() < 1e-8);
        assert!((y[0].re - 10f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn zero_span_returns_input() {
        let y = integrate(
            |_, dy| dy[0] = C64::ZERO,
            vec![C64::new(0.5, 0.5)],
            2.0,
            2.0,
            &OdeOptions::default(),
        )
        .unwrap();
        assert_eq!(y[0], C64::new(0.5, 0.5));
    }

    #[test]
    fn exhausted_step_budget_reports_stiff_failure() {
        let opts = OdeOptions {
            max_steps: 4,
            ..OdeOptions::default()
        };
        let got = integrate(
            |y, dy| dy[0] = C64::from(-2000.0) * y[0],
            vec![C64::new(1.0, 0.0)],
            0.0,
            50.0,
            &opts,
        );
        assert!(matches!(
            got,
            Err(crate::error::Error::StepSizeUnderflow { .. })
        ));
    }
}
