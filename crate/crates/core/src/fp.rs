//! Classical Fabry-Perot optics with an intracavity dispersive medium:
//! round-trip gain, the Airy intensity spectrum, and the narrowed linewidth
//! produced by steep normal dispersion.
//!
//! The half-intensity condition is solved in the detuning variable
//! `u = omega - omega_cav`, where the round-trip phase relative to the bare
//! resonance is `u L / 2c + omega chi'(omega) l_m / 4c`; working relative to
//! the resonance keeps full precision at optical frequencies, where the
//! absolute phase is ~1e6 rad but the features of interest are sub-mrad.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lindblad::TimeSeries;

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Mirror and path constants of the cavity. Lengths in meters, `alpha_loss`
/// in 1/m; `mode_index` is the longitudinal order q of the working resonance.
#[derive(Debug, Clone, Copy)]
pub struct FpGeometry {
    /// Round-trip length L (twice the mirror spacing).
    pub round_trip_length: f64,
    /// Path traveled inside the atomic medium per round trip.
    pub medium_path: f64,
    pub r1: f64,
    pub t1: f64,
    pub r2: f64,
    pub alpha_loss: f64,
    pub mode_index: u64,
}

impl FpGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.r1 > 0.0 && self.r1 < 1.0 && self.r2 > 0.0 && self.r2 < 1.0) {
            return Err(Error::InvalidParameter(
                "mirror reflectivities must lie strictly between 0 and 1".into(),
            ));
        }
        if self.r1 * self.r1 + self.t1 * self.t1 > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(
                "input mirror must satisfy r1^2 + t1^2 <= 1".into(),
            ));
        }
        if !(self.medium_path > 0.0 && self.round_trip_length >= self.medium_path) {
            return Err(Error::InvalidParameter(
                "need round_trip_length >= medium_path > 0".into(),
            ));
        }
        if self.alpha_loss < 0.0 {
            return Err(Error::InvalidParameter(
                "attenuation constant must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// 0.4 m mirror spacing with 99% reflectivity mirrors, lossless, and the
    /// longitudinal order nearest the probe wavelength (795 nm).
    pub fn default_cavity() -> Self {
        let round_trip: f64 = 0.8;
        let wavelength: f64 = 795e-9;
        let q = (round_trip / wavelength).round() as u64;
        FpGeometry {
            round_trip_length: round_trip,
            medium_path: 0.1,
            r1: 0.99f64.sqrt(),
            t1: 0.01f64.sqrt(),
            r2: 0.99f64.sqrt(),
            alpha_loss: 0.0,
            mode_index: q,
        }
    }

    /// Bare resonance `omega_cav = q 2 pi c / L` in rad/s.
    pub fn bare_resonance(&self) -> f64 {
        self.mode_index as f64 * 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT
            / self.round_trip_length
    }

    /// Magnitude of the round-trip amplitude gain, independent of dispersion.
    pub fn gain_magnitude(&self) -> f64 {
        self.r1 * self.r2 * (-self.alpha_loss * self.round_trip_length).exp()
    }

    /// Bare linewidth `4c/L arcsin((1 - g)/(2 sqrt(g)))` in rad/s.
    pub fn bare_linewidth(&self) -> f64 {
        let g = self.gain_magnitude();
        4.0 * SPEED_OF_LIGHT / self.round_trip_length * ((1.0 - g) / (2.0 * g.sqrt())).asin()
    }
}

/// Real part of the linear susceptibility as a function of absolute angular
/// frequency. Pure and deterministic by contract.
pub trait DispersionProfile {
    fn chi_prime(&self, omega: f64) -> f64;
}

impl<F: Fn(f64) -> f64> DispersionProfile for F {
    fn chi_prime(&self, omega: f64) -> f64 {
        self(omega)
    }
}

/// Complex round-trip gain
/// `r1 r2 exp(-alpha L) exp(-i (omega L / c + omega chi'(omega) l_m / 2c))`.
pub fn round_trip_gain(geom: &FpGeometry, chi: &dyn DispersionProfile, omega: f64) -> C64 {
    let phase = omega * geom.round_trip_length / SPEED_OF_LIGHT
        + omega * chi.chi_prime(omega) * geom.medium_path / (2.0 * SPEED_OF_LIGHT);
    C64::from_polar(geom.gain_magnitude(), -phase)
}

/// Relative intracavity intensity
/// `|t1|^2 / ((1-g)^2 + 4 g sin^2(omega L / 2c + omega chi' l_m / 4c))`,
/// sampled over a frequency grid.
pub fn intensity_spectrum(
    geom: &FpGeometry,
    chi: &dyn DispersionProfile,
    omegas: &[f64],
) -> Result<TimeSeries> {
    geom.validate()?;
    let g = geom.gain_magnitude();
    let values = omegas
        .iter()
        .map(|&w| {
            let half_phase = w * geom.round_trip_length / (2.0 * SPEED_OF_LIGHT)
                + w * chi.chi_prime(w) * geom.medium_path / (4.0 * SPEED_OF_LIGHT);
            let s = half_phase.sin();
            geom.t1 * geom.t1 / ((1.0 - g) * (1.0 - g) + 4.0 * g * s * s)
        })
        .collect();
    TimeSeries::new(omegas.to_vec(), values)
}

/// The half-intensity frequencies and the resulting linewidth.
#[derive(Debug, Clone, Copy)]
pub struct NarrowedLinewidth {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub delta_omega: f64,
}

/// Solve the half-intensity condition
/// `omega L / 2c + omega chi'(omega) l_m / 4c = q pi ± arcsin((1-g)/(2 sqrt g))`
/// for the two frequencies around the working resonance by bracketed
/// bisection, and return their separation.
pub fn narrowed_linewidth(
    geom: &FpGeometry,
    chi: &dyn DispersionProfile,
) -> Result<NarrowedLinewidth> {
    geom.validate()?;
    let g = geom.gain_magnitude();
    let half_arc = ((1.0 - g) / (2.0 * g.sqrt())).asin();
    let omega_c = geom.bare_resonance();
    let bare_width = geom.bare_linewidth();

    // phase relative to the bare resonance, in the detuning variable
    let phase = |u: f64| -> f64 {
        let w = omega_c + u;
        u * geom.round_trip_length / (2.0 * SPEED_OF_LIGHT)
            + w * chi.chi_prime(w) * geom.medium_path / (4.0 * SPEED_OF_LIGHT)
    };

    let solve_side = |target: f64, side: f64| -> Result<f64> {
        let f = |u: f64| phase(u) - target;
        // Walk outward geometrically and bracket the first sign change: steep
        // dispersion confines the crossing to a window orders of magnitude
        // narrower than the bare linewidth, and the condition can recross
        // further out, so endpoint checks alone are unreliable.
        let bracket = |limit: f64| -> Option<(f64, f64)> {
            let mut prev = 0.0f64;
            let mut fprev = f(0.0);
            let mut step = 1e-9 * bare_width;
            while step <= limit {
                let u = side * step;
                let fu = f(u);
                if fu == 0.0 || fu * fprev < 0.0 {
                    return Some((prev, u));
                }
                prev = u;
                fprev = fu;
                step *= 1.2;
            }
            None
        };
        let (mut lo, mut hi) = bracket(2.0 * bare_width)
            .or_else(|| bracket(16.0 * bare_width))
            .ok_or_else(|| {
                Error::Bracketing(format!(
                    "no half-intensity crossing within {:.3e} rad/s of the resonance",
                    16.0 * bare_width
                ))
            })?;
        let mut flo = f(lo);
        let tol = 1e-12 * bare_width.max(1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid);
            if fm == 0.0 || (hi - lo).abs() <= tol {
                return Ok(mid);
            }
            if fm * flo > 0.0 {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };

    let u_plus = solve_side(half_arc, 1.0)?;
    let u_minus = solve_side(-half_arc, -1.0)?;
    Ok(NarrowedLinewidth {
        omega_plus: omega_c + u_plus,
        omega_minus: omega_c + u_minus,
        delta_omega: u_plus - u_minus,
    })
}

/// Dispersion profile realized by the quantum model: inverts the resonance
/// pull relation `delta_omega_cav = -(l_m / 2L) omega_cav chi'` so the
/// classical cavity sees the same frequency-dependent pull as the effective
/// cavity. `pull_of_detuning` maps the probe detuning (kappa units, relative
/// to the working resonance) to the pull (kappa units); `kappa_rad_s` converts
/// to physical frequency.
pub struct PullDispersion<F: Fn(f64) -> f64> {
    pub geom_ratio: f64,
    pub omega_center: f64,
    pub kappa_rad_s: f64,
    pub pull_of_detuning: F,
}

impl<F: Fn(f64) -> f64> PullDispersion<F> {
    pub fn new(geom: &FpGeometry, kappa_rad_s: f64, pull_of_detuning: F) -> Self {
        PullDispersion {
            geom_ratio: 2.0 * geom.round_trip_length / geom.medium_path,
            omega_center: geom.bare_resonance(),
            kappa_rad_s,
            pull_of_detuning,
        }
    }
}

impl<F: Fn(f64) -> f64> DispersionProfile for PullDispersion<F> {
    fn chi_prime(&self, omega: f64) -> f64 {
        let detuning_kappa = (omega - self.omega_center) / self.kappa_rad_s;
        let pull_kappa = (self.pull_of_detuning)(detuning_kappa);
        -self.geom_ratio * pull_kappa * self.kappa_rad_s / self.omega_center
    }
}
