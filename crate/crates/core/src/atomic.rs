//! Closed-form response of the adiabatically eliminated N-type ensemble.
//!
//! The four-level scheme has ground states |1>, |3> and excited states |2>,
//! |4>. A strong coupling laser dresses 3<->2 while the cavity mode couples
//! 1<->2 and 3<->4. Eliminating the fast atomic variables leaves the cavity
//! with a frequency pull, a residual one-photon absorption rate, a two-photon
//! absorption rate, and a Kerr coefficient, all functions of the probe
//! detuning through two complex response functions F1 and F2.
//!
//! All rates are expressed in units of the total cavity linewidth kappa.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Ensemble and level-scheme constants, in units of the cavity linewidth.
#[derive(Debug, Clone, PartialEq)]
pub struct NTypeEnsembleParams {
    /// Number of atoms participating with identical coupling. Zero is allowed
    /// and turns every atomic rate off (bare cavity).
    pub n_atoms: f64,
    /// Cavity coupling on the 1<->2 transition.
    pub g1: f64,
    /// Cavity coupling on the 3<->4 transition.
    pub g2: f64,
    /// Half Rabi frequency of the coupling laser on 3<->2.
    pub omega_c: f64,
    pub gamma21: f64,
    pub gamma23: f64,
    pub gamma31: f64,
    pub gamma41: f64,
    pub gamma42: f64,
    pub gamma43: f64,
    /// Detuning of the coupling laser from the 3<->2 transition.
    pub delta23: f64,
    /// omega_21 - omega'_cav: 1<->2 transition relative to the pulled cavity resonance.
    pub delta21_res: f64,
    /// omega_43 - omega'_cav: 3<->4 transition relative to the pulled cavity resonance.
    pub delta43_res: f64,
}

impl NTypeEnsembleParams {
    pub fn validate(&self) -> Result<()> {
        if !self.n_atoms.is_finite() || self.n_atoms < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "atom number must be nonnegative, got {}",
                self.n_atoms
            )));
        }
        if !self.omega_c.is_finite() || self.omega_c < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling Rabi frequency must be nonnegative, got {}",
                self.omega_c
            )));
        }
        for (name, v) in [
            ("g1", self.g1),
            ("g2", self.g2),
            ("gamma21", self.gamma21),
            ("gamma23", self.gamma23),
            ("gamma31", self.gamma31),
            ("gamma41", self.gamma41),
            ("gamma42", self.gamma42),
            ("gamma43", self.gamma43),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// The two-photon-resonant operating point with the Kerr coefficient
    /// tuned to zero: a large purely absorptive two-photon nonlinearity with
    /// negligible linear atomic effects.
    pub fn operating_point() -> Self {
        NTypeEnsembleParams {
            n_atoms: 12.5e6,
            g1: 0.15,
            g2: 0.15,
            omega_c: 10.0,
            gamma21: 4.5,
            gamma23: 4.5,
            gamma31: 1e-5,
            gamma41: 0.0,
            gamma42: 0.0,
            gamma43: 4.5,
            delta23: 4560.0,
            delta21_res: 4560.0,
            delta43_res: -0.0219,
        }
    }
}

/// Coherence decay rates `gamma_mn = (Gamma_m + Gamma_n)/2` derived from the
/// total population decay rate of each level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingTable {
    pub gamma12: f64,
    pub gamma13: f64,
    pub gamma34: f64,
    pub gamma24: f64,
    pub gamma23: f64,
    pub gamma14: f64,
}

/// Level totals: the ground level |1> does not decay, |2> empties through
/// Gamma21 + Gamma23, |3> through Gamma31, |4> through Gamma41 + Gamma42 + Gamma43.
pub fn dephasing_rates(p: &NTypeEnsembleParams) -> DephasingTable {
    let g_level1 = 0.0;
    let g_level2 = p.gamma21 + p.gamma23;
    let g_level3 = p.gamma31;
    let g_level4 = p.gamma41 + p.gamma42 + p.gamma43;
    let pair = |a: f64, b: f64| 0.5 * (a + b);
    DephasingTable {
        gamma12: pair(g_level1, g_level2),
        gamma13: pair(g_level1, g_level3),
        gamma34: pair(g_level3, g_level4),
        gamma24: pair(g_level2, g_level4),
        gamma23: pair(g_level2, g_level3),
        gamma14: pair(g_level1, g_level4),
    }
}

/// The complex linear-response functions and the population-redistribution
/// weights entering the third-order rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearResponse {
    pub f1: C64,
    pub f2: C64,
    /// (Gamma23 + 2 Gamma31) / (Gamma31 (Gamma21 + Gamma23)), units 1/kappa.
    pub y1: f64,
    /// Gamma23 / (Gamma31 (Gamma21 + Gamma23)), units 1/kappa.
    pub y2: f64,
}

/// EIT-dressed response of a ladder: `i Delta + gamma + |Omega_c|^2 / (i (Delta - Delta23) + gamma')`.
fn dressed_response(delta: f64, gamma: f64, omega_c: f64, delta23: f64, gamma_prime: f64) -> C64 {
    C64::new(gamma, delta) + C64::from(omega_c * omega_c) / C64::new(gamma_prime, delta - delta23)
}

/// Evaluate F1, F2, Y1, Y2 at probe detuning `delta_prime` from the pulled
/// cavity resonance. The transition detunings shift together:
/// `Delta21 = delta21_res - delta_prime`, `Delta43 = delta43_res - delta_prime`.
pub fn linear_responses(p: &NTypeEnsembleParams, delta_prime: f64) -> Result<LinearResponse> {
    p.validate()?;
    if p.gamma31 == 0.0 {
        return Err(Error::InvalidParameter(
            "gamma31 = 0 makes the Y1/Y2 weights singular".into(),
        ));
    }
    if p.gamma21 + p.gamma23 == 0.0 {
        return Err(Error::InvalidParameter(
            "gamma21 + gamma23 = 0 makes the Y1/Y2 weights singular".into(),
        ));
    }
    let gm = dephasing_rates(p);
    let d21 = p.delta21_res - delta_prime;
    let d43 = p.delta43_res - delta_prime;
    let f1 = dressed_response(d21, gm.gamma12, p.omega_c, p.delta23, gm.gamma13);
    let f2 = dressed_response(d43, gm.gamma34, p.omega_c, p.delta23, gm.gamma24);
    let denom = p.gamma31 * (p.gamma21 + p.gamma23);
    Ok(LinearResponse {
        f1,
        f2,
        y1: (p.gamma23 + 2.0 * p.gamma31) / denom,
        y2: p.gamma23 / denom,
    })
}

/// The four effective cavity rates at one probe detuning, units of kappa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    /// Pull of the cavity resonance from the linear atomic dispersion.
    pub delta_omega_cav: f64,
    /// Residual atomic one-photon absorption rate.
    pub kappa_a_lin: f64,
    /// Two-photon absorption rate (the blockade mechanism).
    pub kappa_a_nonlin: f64,
    /// Kerr coefficient of the a†a†aa term.
    pub eta: f64,
}

fn linear_parts(lr: &LinearResponse, g1: f64, n: f64) -> (f64, f64) {
    let f1_sq = lr.f1.norm_sqr();
    let g1_sq = g1 * g1;
    (
        -g1_sq * n * lr.f1.im / f1_sq,
        2.0 * g1_sq * n * lr.f1.re / f1_sq,
    )
}

/// Just the pull and the one-photon absorption rate `(delta_omega_cav,
/// kappa_a_lin)`; these involve only F1 and stay meaningful where the
/// third-order rates leave their validity range.
pub fn linear_rates(p: &NTypeEnsembleParams, delta_prime: f64) -> Result<(f64, f64)> {
    let lr = linear_responses(p, delta_prime)?;
    Ok(linear_parts(&lr, p.g1, p.n_atoms))
}

/// Assemble the effective rates from the closed forms, with the ensemble sum
/// replaced by multiplication with the atom number (identical atoms).
///
/// Negative absorption rates mean the parameter set has left the validity
/// range of the perturbative elimination; they are reported as errors rather
/// than silently accepted.
pub fn effective_params(p: &NTypeEnsembleParams, delta_prime: f64) -> Result<EffectiveParams> {
    let lr = linear_responses(p, delta_prime)?;
    let f1_sq = lr.f1.norm_sqr();
    let f2_sq = lr.f2.norm_sqr();
    let g1_sq = p.g1 * p.g1;
    let g2_sq = p.g2 * p.g2;
    let n = p.n_atoms;

    let (delta_omega_cav, kappa_a_lin) = linear_parts(&lr, p.g1, n);
    let kappa_a_nonlin = 4.0
        * g1_sq
        * n
        * (-g1_sq * lr.y1 * lr.f1.re * lr.f1.re / (f1_sq * f1_sq)
            + g2_sq * lr.y2 * lr.f2.re * lr.f1.re / (f2_sq * f1_sq));
    let eta = 2.0
        * g1_sq
        * n
        * (g1_sq * lr.y1 * lr.f1.im * lr.f1.re / (f1_sq * f1_sq)
            - g2_sq * lr.y2 * lr.f2.im * lr.f1.re / (f2_sq * f1_sq));

    if kappa_a_lin < 0.0 {
        return Err(Error::UnphysicalRate {
            name: "kappa_a_lin",
            value: kappa_a_lin,
        });
    }
    if kappa_a_nonlin < 0.0 {
        return Err(Error::UnphysicalRate {
            name: "kappa_a_nonlin",
            value: kappa_a_nonlin,
        });
    }
    Ok(EffectiveParams {
        delta_omega_cav,
        kappa_a_lin,
        kappa_a_nonlin,
        eta,
    })
}

/// Dispersive shift of the effective resonance seen by a scanning probe:
/// `d[delta_omega_cav](delta') = delta_omega_cav(delta') - delta_omega_cav(0)`.
pub fn dispersive_shift(p: &NTypeEnsembleParams, delta_prime: f64) -> Result<f64> {
    if delta_prime == 0.0 {
        return Ok(0.0);
    }
    let at = effective_params(p, delta_prime)?.delta_omega_cav;
    let ref0 = effective_params(p, 0.0)?.delta_omega_cav;
    Ok(at - ref0)
}
