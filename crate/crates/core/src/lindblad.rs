//! Lindblad master-equation machinery: vectorized Liouvillian construction,
//! steady states, adaptive time evolution, photon statistics, and two-time
//! correlations via the quantum regression theorem.
//!
//! Density matrices are vectorized row-major, `vec(rho)[r*d + c] = rho[r][c]`,
//! so `vec(A rho B) = (A ⊗ B^T) vec(rho)`. The generator of
//! `drho/dt = -i[H, rho] + sum_k rate_k D[L_k] rho` is assembled sparsely from
//! the nonzero entries of `H` and the collapse operators.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, Operator};
use crate::linalg;
use crate::ode::{self, OdeOptions};
use crate::sparse::CsrMatrix;

/// A jump operator together with its nonnegative rate (units of kappa).
#[derive(Debug, Clone)]
pub struct CollapseChannel {
    pub operator: Operator,
    pub rate: f64,
}

impl CollapseChannel {
    pub fn new(operator: Operator, rate: f64) -> Self {
        CollapseChannel { operator, rate }
    }
}

/// Generator of open-system dynamics on vectorized density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    generator: CsrMatrix,
    fro_norm: f64,
}

/// Dimension above which steady states are found by time propagation instead
/// of a dense linear solve of the vectorized generator.
pub const DIRECT_SOLVE_MAX_DIM: usize = 32;

/// Relative population allowed on the top truncated level of any solve.
pub const TRUNCATION_TOL: f64 = 1e-9;

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self) -> &CsrMatrix {
        &self.generator
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.fro_norm
    }

    /// `out = L x` on vectorized density matrices.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        self.generator.matvec(x, out);
    }

    /// Trace-preservation defect: the adjoint generator applied to the
    /// identity, reported as the largest column magnitude. Zero for any valid
    /// Lindblad generator up to roundoff.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut w = vec![C64::ZERO; d * d];
        for (row, col, v) in self.generator.iter_entries() {
            let (r, c) = (row / d, row % d);
            if r == c {
                w[col] += v.conj();
            }
        }
        w.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }
}

/// Build the generator of
/// `drho/dt = -i[H, rho] + sum rate (L rho L† - {L†L, rho}/2)`.
pub fn build_liouvillian(h: &Operator, channels: &[CollapseChannel]) -> Result<Liouvillian> {
    let d = h.dim();
    for ch in channels {
        if ch.operator.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "collapse operator dim {} does not match Hamiltonian dim {}",
                ch.operator.dim(),
                d
            )));
        }
        if !ch.rate.is_finite() || ch.rate < 0.0 {
            return Err(Error::NegativeRate(ch.rate));
        }
    }

    let mut trips: Vec<(usize, usize, C64)> = Vec::new();
    let i_unit = C64::new(0.0, 1.0);

    let hm = h.matrix();
    for ((r, k), &v) in hm.indexed_iter() {
        if v == C64::ZERO {
            continue;
        }
        for m in 0..d {
            // -i (H ⊗ I)
            trips.push((r * d + m, k * d + m, -i_unit * v));
            // +i (I ⊗ H^T): entry H[r,k] lands at rows (m, k), cols (m, r)
            trips.push((m * d + k, m * d + r, i_unit * v));
        }
    }

    for ch in channels {
        if ch.rate == 0.0 {
            continue;
        }
        let rate = C64::from(ch.rate);
        let l = ch.operator.matrix();
        let nz: Vec<(usize, usize, C64)> = l
            .indexed_iter()
            .filter(|(_, v)| **v != C64::ZERO)
            .map(|((r, c), v)| (r, c, *v))
            .collect();
        // rate * (L ⊗ conj(L))
        for &(r, k, v1) in &nz {
            for &(c, l_, v2) in &nz {
                trips.push((r * d + c, k * d + l_, rate * v1 * v2.conj()));
            }
        }
        // -(rate/2) (L†L ⊗ I + I ⊗ (L†L)^T)
        let m = ch.operator.dagger().matrix().dot(l);
        for ((r, k), &v) in m.indexed_iter() {
            if v == C64::ZERO {
                continue;
            }
            for q in 0..d {
                trips.push((r * d + q, k * d + q, -0.5 * rate * v));
                trips.push((q * d + k, q * d + r, -0.5 * rate * v));
            }
        }
    }

    let generator = CsrMatrix::from_triplets(d * d, d * d, trips);
    let fro_norm = generator.frobenius_norm();
    let liouv = Liouvillian {
        dim: d,
        generator,
        fro_norm,
    };

    let entry_scale = liouv
        .generator
        .iter_entries()
        .fold(1.0f64, |acc, (_, _, v)| acc.max(v.norm()));
    let defect = liouv.trace_defect();
    if defect > 1e-9 * entry_scale {
        return Err(Error::SingularSteadyState(format!(
            "generator is not trace preserving (defect {defect:.3e})"
        )));
    }
    Ok(liouv)
}

fn vec_of(rho: &DensityMatrix) -> Vec<C64> {
    rho.matrix().iter().cloned().collect()
}

fn matrix_of(vec: &[C64], d: usize) -> Array2<C64> {
    Array2::from_shape_vec((d, d), vec.to_vec()).expect("length checked by caller")
}

fn vec_trace(vec: &[C64], d: usize) -> C64 {
    (0..d).map(|r| vec[r * d + r]).sum()
}

fn hermitize(m: &Array2<C64>) -> Array2<C64> {
    let d = m.nrows();
    let mut out = Array2::<C64>::zeros((d, d));
    for r in 0..d {
        for c in 0..d {
            out[(r, c)] = 0.5 * (m[(r, c)] + m[(c, r)].conj());
        }
    }
    out
}

fn check_truncation(vec: &[C64], d: usize) -> Result<()> {
    let trace = vec_trace(vec, d).re.abs().max(f64::MIN_POSITIVE);
    let top = vec[(d - 1) * d + (d - 1)].re;
    if top > TRUNCATION_TOL * trace {
        return Err(Error::TruncationLeakage {
            population: top / trace,
        });
    }
    Ok(())
}

/// Steady state of the generator: dense kernel solve with a trace constraint
/// for small systems, time propagation to residual tolerance for large ones.
///
/// A degenerate kernel shows up as a singular pivot in the constrained solve
/// and is reported rather than resolved arbitrarily.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let d = l.dim();
    let vec = if d <= DIRECT_SOLVE_MAX_DIM {
        steady_state_direct(l)?
    } else {
        steady_state_propagated(l)?
    };

    let residual_tol = 1e-10 * l.frobenius_norm();
    let mut resid = vec![C64::ZERO; d * d];
    l.apply(&vec, &mut resid);
    let rnorm = linalg::vec_norm(&resid);
    if rnorm > residual_tol {
        return Err(Error::SingularSteadyState(format!(
            "residual {rnorm:.3e} exceeds {residual_tol:.3e}"
        )));
    }
    check_truncation(&vec, d)?;

    let m = hermitize(&matrix_of(&vec, d));
    let trace = m.diag().iter().map(|z| z.re).sum::<f64>();
    DensityMatrix::from_matrix(m.mapv(|z| z / C64::from(trace)))
}

fn steady_state_direct(l: &Liouvillian) -> Result<Vec<C64>> {
    let d = l.dim();
    let n = d * d;
    let mut a = l.generator().to_dense();
    // replace the d(rho_00)/dt row with the trace constraint
    for c in 0..n {
        a[(0, c)] = C64::ZERO;
    }
    for r in 0..d {
        a[(0, r * d + r)] = C64::from(1.0);
    }
    let mut b = vec![C64::ZERO; n];
    b[0] = C64::from(1.0);
    linalg::solve_dense(a, b)
}

fn steady_state_propagated(l: &Liouvillian) -> Result<Vec<C64>> {
    let d = l.dim();
    let n = d * d;
    let mut y = vec![C64::ZERO; n];
    y[0] = C64::from(1.0); // vacuum seed
    let opts = OdeOptions::default();
    let target = 1e-10 * l.frobenius_norm();
    let chunk = 5.0;
    let max_time = 2000.0;
    let mut t = 0.0;
    let mut resid = vec![C64::ZERO; n];
    while t < max_time {
        y = ode::integrate(|x, dx| l.apply(x, dx), y, t, t + chunk, &opts)?;
        t += chunk;
        l.apply(&y, &mut resid);
        if linalg::vec_norm(&resid) <= 0.5 * target {
            return Ok(y);
        }
    }
    Err(Error::SingularSteadyState(format!(
        "propagation did not reach residual {target:.3e} by t = {max_time}"
    )))
}

/// Propagate a density matrix for a duration `t` (units 1/kappa).
pub fn evolve(l: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    evolve_with(l, rho0, t, &OdeOptions::default())
}

/// [`evolve`] with explicit integrator tolerances.
pub fn evolve_with(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t: f64,
    opts: &OdeOptions,
) -> Result<DensityMatrix> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs generator dim {}",
            rho0.dim(),
            l.dim()
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let d = l.dim();
    let y = ode::integrate(|x, dx| l.apply(x, dx), vec_of(rho0), 0.0, t, opts)?;

    let trace_drift = (vec_trace(&y, d) - C64::from(1.0)).norm();
    if trace_drift > 1e-8 {
        return Err(Error::InvalidDensityMatrix {
            property: "trace preservation along evolve",
            defect: trace_drift,
        });
    }
    let m = matrix_of(&y, d);
    let mut herm_drift = 0.0f64;
    for r in 0..d {
        for c in r..d {
            herm_drift = herm_drift.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    if herm_drift > 1e-9 {
        return Err(Error::InvalidDensityMatrix {
            property: "hermiticity along evolve",
            defect: herm_drift,
        });
    }
    check_truncation(&y, d)?;
    DensityMatrix::from_matrix(hermitize(&m))
}

/// Diagonal of the density matrix in the Fock basis.
pub fn fock_probabilities(rho: &DensityMatrix) -> Vec<f64> {
    rho.diagonal()
}

/// Mean photon number from the Fock-basis diagonal.
pub fn mean_photons(rho: &DensityMatrix) -> f64 {
    rho.diagonal()
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

/// Equal-time second-order correlation `<a†a†aa> / <a†a>^2`.
pub fn g2_zero(rho: &DensityMatrix) -> Result<f64> {
    let probs = rho.diagonal();
    let nbar: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    if nbar <= 1e-12 {
        return Err(Error::VacuumState("g2(0) needs a populated mode"));
    }
    let pairs: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| (n * n.saturating_sub(1)) as f64 * p)
        .sum();
    Ok(pairs / (nbar * nbar))
}

/// A sampled curve over a strictly increasing grid (time or frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "time series: {} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "time series grid must be strictly increasing".into(),
            ));
        }
        Ok(TimeSeries { times, values })
    }
}

/// Delayed second-order correlation `g2(tau)` at the steady state via the
/// quantum regression theorem: propagate `a rho_ss a†` under the same
/// generator and read out `<a†a>` along the way, normalized by `<a†a>_ss^2`.
pub fn g2_tau(l: &Liouvillian, rho_ss: &DensityMatrix, tau_grid: &[f64]) -> Result<TimeSeries> {
    if rho_ss.dim() != l.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs generator dim {}",
            rho_ss.dim(),
            l.dim()
        )));
    }
    if tau_grid.is_empty() || tau_grid[0] != 0.0 {
        return Err(Error::InvalidParameter("tau grid must start at 0".into()));
    }
    let d = l.dim();
    let nbar = mean_photons(rho_ss);
    if nbar <= 1e-12 {
        return Err(Error::VacuumState("g2(tau) needs a populated steady state"));
    }

    // X(0) = a rho a†, built directly from the ladder structure:
    // (a rho a†)[r,c] = sqrt(r+1) sqrt(c+1) rho[r+1, c+1]
    let rm = rho_ss.matrix();
    let mut x = vec![C64::ZERO; d * d];
    for r in 0..d - 1 {
        for c in 0..d - 1 {
            let w = (((r + 1) * (c + 1)) as f64).sqrt();
            x[r * d + c] = C64::from(w) * rm[(r + 1, c + 1)];
        }
    }

    let expect_n = |v: &[C64]| -> f64 { (0..d).map(|n| n as f64 * v[n * d + n].re).sum::<f64>() };

    let opts = OdeOptions::default();
    let mut values = Vec::with_capacity(tau_grid.len());
    values.push(expect_n(&x) / (nbar * nbar));
    for w in tau_grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        x = ode::integrate(|v, dv| l.apply(v, dv), x, t0, t1, &opts)?;
        values.push(expect_n(&x) / (nbar * nbar));
    }
    TimeSeries::new(tau_grid.to_vec(), values)
}

/// Right-hand side of the Fock-probability rate equations for one-photon loss
/// at `kappa_lin` and pair loss at `kappa_nonlin`:
/// `dPn/dt = kL[(n+1)P(n+1) - n Pn] + kNL[(n+2)(n+1)P(n+2) - n(n-1)Pn]`.
pub fn fock_rate_step(probs: &[f64], kappa_lin: f64, kappa_nonlin: f64) -> Vec<f64> {
    let len = probs.len();
    let p = |n: usize| if n < len { probs[n] } else { 0.0 };
    (0..len)
        .map(|n| {
            let nf = n as f64;
            kappa_lin * ((nf + 1.0) * p(n + 1) - nf * p(n))
                + kappa_nonlin * ((nf + 2.0) * (nf + 1.0) * p(n + 2) - nf * (nf - 1.0) * p(n))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{annihilation_op, number_op, FockSpace};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fock_state(dim: usize, n: usize) -> DensityMatrix {
        let mut m = Array2::<C64>::zeros((dim, dim));
        m[(n, n)] = c(1.0, 0.0);
        DensityMatrix::from_matrix(m).unwrap()
    }

    #[test]
    fn one_photon_decay_is_exponential() {
        let sp = FockSpace::new(4).unwrap();
        let a = annihilation_op(sp);
        let l = build_liouvillian(&Operator::zeros(4), &[CollapseChannel::new(a, 1.0)]).unwrap();
        let rho1 = fock_state(4, 1);
        for t in [0.3, 1.0, 2.5] {
            let rho_t = evolve(&l, &rho1, t).unwrap();
            let p1 = rho_t.diagonal()[1];
            assert!((p1 - (-t).exp()).abs() < 1e-7, "t={t}: {p1}");
        }
    }

    #[test]
    fn number_conserving_hamiltonian_keeps_diagonal_states_diagonal() {
        let sp = FockSpace::new(5).unwrap();
        let h = Operator::from_matrix(number_op(sp).matrix() * c(0.7, 0.0)).unwrap();
        let l = build_liouvillian(&h, &[]).unwrap();
        let mut m = Array2::<C64>::zeros((5, 5));
        m[(0, 0)] = c(0.25, 0.0);
        m[(2, 2)] = c(0.75, 0.0);
        let rho = DensityMatrix::from_matrix(m).unwrap();
        let rho_t = evolve(&l, &rho, 1.7).unwrap();
        for r in 0..5 {
            for cc in 0..5 {
                if r != cc {
                    assert!(rho_t.matrix()[(r, cc)].norm() < 1e-10);
                }
            }
        }
        assert!((rho_t.diagonal()[2] - 0.75).abs() < 1e-9);
    }

    #[test]
    fn pair_decay_matches_rate_equation_solution() {
        // two-photon channel on |2><2|: P2(t) = exp(-2 kNL t), P0 = 1 - P2
        let sp = FockSpace::new(5).unwrap();
        let a = annihilation_op(sp);
        let a2 = Operator::from_matrix(a.matrix().dot(a.matrix())).unwrap();
        let k_nl = 0.8;
        let l = build_liouvillian(&Operator::zeros(5), &[CollapseChannel::new(a2, k_nl)]).unwrap();
        let rho2 = fock_state(5, 2);
        let t = 0.9;
        let rho_t = evolve(&l, &rho2, t).unwrap();
        let p = rho_t.diagonal();
        assert!((p[2] - (-2.0 * k_nl * t).exp()).abs() < 1e-7);
        assert!((p[0] - (1.0 - (-2.0 * k_nl * t).exp())).abs() < 1e-7);
        assert!(p[1].abs() < 1e-9);
    }

    #[test]
    fn evolve_at_zero_time_returns_input() {
        let sp = FockSpace::new(3).unwrap();
        let a = annihilation_op(sp);
        let l = build_liouvillian(&Operator::zeros(3), &[CollapseChannel::new(a, 1.0)]).unwrap();
        let rho = fock_state(3, 1);
        let same = evolve(&l, &rho, 0.0).unwrap();
        assert_eq!(same.matrix(), rho.matrix());
    }

    #[test]
    fn driven_cavity_steady_state_matches_input_output() {
        // drive eps_d = sqrt(kappa_e1) eps_p, linear decay kappa_t:
        // <n> = 4 kappa_e1 eps_p^2 / kappa_t^2
        let dim = 12;
        let sp = FockSpace::new(dim).unwrap();
        let a = annihilation_op(sp);
        let ad = a.dagger();
        let (kappa_e1, eps_p, kappa_t): (f64, f64, f64) = (0.45, 0.08, 1.0);
        let eps_d = kappa_e1.sqrt() * eps_p;
        let h =
            Operator::from_matrix((ad.matrix() - a.matrix()).mapv(|z| z * c(0.0, eps_d))).unwrap();
        let l = build_liouvillian(&h, &[CollapseChannel::new(a, kappa_t)]).unwrap();
        let rho = steady_state(&l).unwrap();
        let nbar = mean_photons(&rho);
        let expect = 4.0 * kappa_e1 * eps_p * eps_p / (kappa_t * kappa_t);
        assert!(
            (nbar - expect).abs() < 1e-9 * expect.max(1.0),
            "nbar {nbar} vs {expect}"
        );
        // coherent state: g2 = 1
        assert!((g2_zero(&rho).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn undriven_cavity_steady_state_is_vacuum() {
        let sp = FockSpace::new(6).unwrap();
        let a = annihilation_op(sp);
        let l = build_liouvillian(&Operator::zeros(6), &[CollapseChannel::new(a, 0.7)]).unwrap();
        let rho = steady_state(&l).unwrap();
        assert!((rho.diagonal()[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn no_decay_channel_reports_degenerate_kernel() {
        // pure Hamiltonian dynamics: every diagonal state is stationary
        let sp = FockSpace::new(3).unwrap();
        let h = Operator::from_matrix(number_op(sp).matrix() * c(1.0, 0.0)).unwrap();
        let l = build_liouvillian(&h, &[]).unwrap();
        assert!(matches!(
            steady_state(&l),
            Err(Error::SingularSteadyState(_))
        ));
    }

    #[test]
    fn long_time_evolution_agrees_with_steady_state() {
        let dim = 10;
        let sp = FockSpace::new(dim).unwrap();
        let a = annihilation_op(sp);
        let ad = a.dagger();
        let eps_d = 0.06;
        let h =
            Operator::from_matrix((ad.matrix() - a.matrix()).mapv(|z| z * c(0.0, eps_d))).unwrap();
        let a2 = Operator::from_matrix(a.matrix().dot(a.matrix())).unwrap();
        let l = build_liouvillian(
            &h,
            &[CollapseChannel::new(a, 1.0), CollapseChannel::new(a2, 5.0)],
        )
        .unwrap();
        let ss = steady_state(&l).unwrap();
        let evolved = evolve(&l, &DensityMatrix::vacuum(dim), 40.0).unwrap();
        assert!(ss.trace_distance(&evolved) < 1e-6);
    }

    #[test]
    fn fock_probabilities_of_coherent_state_are_poissonian() {
        let sp = FockSpace::new(20).unwrap();
        let rho = DensityMatrix::coherent(sp, c(0.6f64.sqrt(), 0.0));
        let p = fock_probabilities(&rho);
        // e^-0.6 * 0.6^n / n!
        assert!((p[0] - 0.5488116360940264).abs() < 1e-10);
        assert!((p[1] - 0.3292869816564158).abs() < 1e-10);
        assert!((p[2] - 0.0987860944969247).abs() < 1e-10);
        assert!(p.iter().all(|x| *x > -1e-9));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fock_state_probabilities_are_sharp() {
        let rho = fock_state(6, 2);
        let p = fock_probabilities(&rho);
        assert_eq!(p[2], 1.0);
        assert!(p
            .iter()
            .enumerate()
            .filter(|(n, _)| *n != 2)
            .all(|(_, x)| *x == 0.0));
    }

    #[test]
    fn g2_values_for_reference_states() {
        let sp = FockSpace::new(15).unwrap();
        let coherent = DensityMatrix::coherent(sp, c(0.9, 0.2));
        assert!((g2_zero(&coherent).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(g2_zero(&fock_state(5, 1)).unwrap(), 0.0);
        assert_eq!(g2_zero(&fock_state(5, 2)).unwrap(), 0.5);
        assert!(matches!(
            g2_zero(&DensityMatrix::vacuum(4)),
            Err(Error::VacuumState(_))
        ));
    }

    #[test]
    fn fock_rate_step_reference_values() {
        let mut p = vec![0.0; 6];
        p[1] = 1.0;
        let dp = fock_rate_step(&p, 1.0, 0.0);
        assert_eq!(dp[0], 1.0);
        assert_eq!(dp[1], -1.0);

        let mut p = vec![0.0; 6];
        p[2] = 1.0;
        let dp = fock_rate_step(&p, 0.0, 1.0);
        assert_eq!(dp[0], 2.0);
        assert_eq!(dp[2], -2.0);
        assert_eq!(dp[1], 0.0);

        let p = [0.3, 0.3, 0.2, 0.2];
        assert!(fock_rate_step(&p, 0.0, 0.0).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn fock_rate_step_conserves_probability() {
        let p = [0.2, 0.25, 0.3, 0.15, 0.07, 0.03];
        let dp = fock_rate_step(&p, 1.3, 0.7);
        assert!(dp.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn diagonal_dynamics_match_rate_equations() {
        // bridge between the full dissipator and the probability rate equations:
        // for H = 0 and channels sqrt(kL) a, sqrt(kNL) a², the diagonal of
        // L vec(rho) equals fock_rate_step of the diagonal, exactly
        let dim = 9;
        let sp = FockSpace::new(dim).unwrap();
        let a = annihilation_op(sp);
        let a2 = Operator::from_matrix(a.matrix().dot(a.matrix())).unwrap();
        let (k_l, k_nl) = (0.9, 2.3);
        let l = build_liouvillian(
            &Operator::zeros(dim),
            &[CollapseChannel::new(a, k_l), CollapseChannel::new(a2, k_nl)],
        )
        .unwrap();
        let probs = [0.25, 0.2, 0.18, 0.12, 0.1, 0.07, 0.05, 0.02, 0.01];
        let mut vec = vec![C64::ZERO; dim * dim];
        for (n, p) in probs.iter().enumerate() {
            vec[n * dim + n] = c(*p, 0.0);
        }
        let mut out = vec![C64::ZERO; dim * dim];
        l.apply(&vec, &mut out);
        let expected = fock_rate_step(&probs, k_l, k_nl);
        for n in 0..dim {
            assert!(
                (out[n * dim + n].re - expected[n]).abs() < 1e-12,
                "n={n}: {} vs {}",
                out[n * dim + n].re,
                expected[n]
            );
        }
    }

    #[test]
    fn g2_tau_of_linear_cavity_stays_at_one() {
        let dim = 12;
        let sp = FockSpace::new(dim).unwrap();
        let a = annihilation_op(sp);
        let ad = a.dagger();
        let h =
            Operator::from_matrix((ad.matrix() - a.matrix()).mapv(|z| z * c(0.0, 0.1))).unwrap();
        let l = build_liouvillian(&h, &[CollapseChannel::new(a, 1.0)]).unwrap();
        let ss = steady_state(&l).unwrap();
        let taus: Vec<f64> = (0..9).map(|k| k as f64 * 0.5).collect();
        let series = g2_tau(&l, &ss, &taus).unwrap();
        for (tau, g2) in series.times.iter().zip(&series.values) {
            assert!((g2 - 1.0).abs() < 1e-6, "tau={tau}: g2={g2}");
        }
        // tau = 0 consistency with the equal-time estimator
        assert!((series.values[0] - g2_zero(&ss).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn truncation_leakage_is_reported() {
        // strong drive against a tiny cutoff pushes population to the top level
        let dim = 3;
        let sp = FockSpace::new(dim).unwrap();
        let a = annihilation_op(sp);
        let ad = a.dagger();
        let h =
            Operator::from_matrix((ad.matrix() - a.matrix()).mapv(|z| z * c(0.0, 2.0))).unwrap();
        let l = build_liouvillian(&h, &[CollapseChannel::new(a, 1.0)]).unwrap();
        assert!(matches!(
            steady_state(&l),
            Err(Error::TruncationLeakage { .. })
        ));
    }

    #[test]
    fn negative_rate_rejected() {
        let sp = FockSpace::new(3).unwrap();
        let a = annihilation_op(sp);
        assert!(matches!(
            build_liouvillian(&Operator::zeros(3), &[CollapseChannel::new(a, -0.1)]),
            Err(Error::NegativeRate(_))
        ));
    }

    #[test]
    fn time_series_requires_increasing_grid() {
        assert!(TimeSeries::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(TimeSeries::new(vec![0.0, 0.5, 1.5], vec![0.0; 3]).is_ok());
    }
}
