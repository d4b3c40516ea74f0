//! Cascaded two-cavity system: a coherently driven source cavity feeding the
//! nonlinearly dissipative target cavity through a unidirectional channel.
//!
//! The master equation (propagation delay taken to zero) is
//!
//! ```text
//! drho/dt = -i[H_sys, rho] + kappa_d D[d] + kappa_a D[a] + kappa_nl D[a²]
//!           - sqrt(kappa_d2 kappa_e1) ([a†, d rho] - [a, rho d†])
//!           - sqrt(kappa_d1) [alpha d† - alpha* d, rho]
//! ```
//!
//! Internally the cross term is assembled in its algebraically identical
//! Lindblad form: a combined jump `sqrt(kappa_d2) d + sqrt(kappa_e1) a`
//! (with the per-mode rates reduced accordingly) plus the hopping Hamiltonian
//! `i sqrt(kappa_d2 kappa_e1)/2 (d†a - a†d)`, which makes trace preservation
//! and complete positivity manifest and reuses the generic generator builder.
//!
//! Mode ordering: the source mode `d` is the first (slowest) tensor factor.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{
    annihilation_op, beam_splitter_unitary, partial_trace, tensor, DensityMatrix, FockSpace,
    Operator,
};
use crate::lindblad::{self, CollapseChannel, Liouvillian};

/// Weight allowed on rotation blocks that the joint truncation leaves
/// incomplete (total photon number at or above the single-mode cutoff). This
/// bounds the distortion of the reflected-mode statistics.
pub const ROTATION_LEAKAGE_TOL: f64 = 1e-4;

/// Configuration of the cascaded pair, rates in units of the target's total
/// linear linewidth.
#[derive(Debug, Clone)]
pub struct CascadeConfig {
    /// Source input port (carries the coherent drive).
    pub kappa_d1: f64,
    /// Source output port (feeds the target).
    pub kappa_d2: f64,
    /// Target input port (receives the source output).
    pub kappa_e1: f64,
    /// Target transmission port.
    pub kappa_e2: f64,
    /// Target intrinsic loss.
    pub kappa_i: f64,
    /// Atomic one-photon absorption added to the target's linear decay.
    pub kappa_a_lin: f64,
    /// Two-photon absorption rate of the target.
    pub kappa_a_nonlin: f64,
    /// Kerr coefficient of the target.
    pub eta: f64,
    /// Coherent drive amplitude at the source input port.
    pub alpha: f64,
    /// Optional mean photon number of the isolated source; when set, the
    /// drive amplitude is derived from it instead of `alpha`.
    pub target_nbar: Option<f64>,
    pub dim_source: usize,
    pub dim_target: usize,
}

impl CascadeConfig {
    /// The validation case: matched source and target ports, no
    /// nonlinearity, incident mean photon number 0.6. A lossless matched
    /// cascade transmits the coherent input completely.
    pub fn matched_linear() -> Self {
        CascadeConfig {
            kappa_d1: 0.5,
            kappa_d2: 0.5,
            kappa_e1: 0.5,
            kappa_e2: 0.5,
            kappa_i: 0.0,
            kappa_a_lin: 0.0,
            kappa_a_nonlin: 0.0,
            eta: 0.0,
            alpha: 0.0,
            target_nbar: Some(0.6),
            dim_source: 8,
            dim_target: 8,
        }
    }

    /// The blockade demonstration: same ports, pair absorption switched on.
    pub fn blockade() -> Self {
        CascadeConfig {
            kappa_a_nonlin: 28.0,
            ..Self::matched_linear()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa_d1", self.kappa_d1),
            ("kappa_d2", self.kappa_d2),
            ("kappa_e1", self.kappa_e1),
            ("kappa_e2", self.kappa_e2),
            ("kappa_i", self.kappa_i),
            ("kappa_a_lin", self.kappa_a_lin),
            ("kappa_a_nonlin", self.kappa_a_nonlin),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        if self.dim_source < 4 || self.dim_target < 4 {
            return Err(Error::InvalidParameter(
                "cascade cutoffs must be at least 4".into(),
            ));
        }
        if self.dim_source * self.dim_target > 4096 {
            return Err(Error::InvalidParameter(format!(
                "composite dimension {} exceeds the 4096 guard",
                self.dim_source * self.dim_target
            )));
        }
        if let Some(nbar) = self.target_nbar {
            if !nbar.is_finite() || nbar < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "target_nbar must be nonnegative, got {nbar}"
                )));
            }
        }
        Ok(())
    }

    /// Total source decay rate.
    pub fn kappa_d(&self) -> f64 {
        self.kappa_d1 + self.kappa_d2
    }

    /// Total linear decay rate of the target, ports plus intrinsic plus
    /// atomic one-photon absorption.
    pub fn kappa_a(&self) -> f64 {
        self.kappa_e1 + self.kappa_e2 + self.kappa_i + self.kappa_a_lin
    }

    /// Drive amplitude actually used: `alpha`, or the calibrated value when
    /// `target_nbar` is set.
    pub fn resolved_alpha(&self) -> Result<f64> {
        match self.target_nbar {
            Some(nbar) => calibrate_drive(self, nbar),
            None => Ok(self.alpha),
        }
    }
}

/// Drive amplitude giving the isolated source cavity a steady mean photon
/// number `nbar`: the linear steady state has `<d> = -2 sqrt(kappa_d1) alpha / kappa_d`,
/// so `alpha = sqrt(nbar) kappa_d / (2 sqrt(kappa_d1))`.
pub fn calibrate_drive(cfg: &CascadeConfig, nbar: f64) -> Result<f64> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "calibration mean photon number must be nonnegative, got {nbar}"
        )));
    }
    if cfg.kappa_d1 <= 0.0 {
        return Err(Error::InvalidParameter(
            "drive calibration needs kappa_d1 > 0".into(),
        ));
    }
    Ok(nbar.sqrt() * cfg.kappa_d() / (2.0 * cfg.kappa_d1.sqrt()))
}

fn mode_operators(cfg: &CascadeConfig) -> Result<(Operator, Operator)> {
    let sp_d = FockSpace::new(cfg.dim_source)?;
    let sp_a = FockSpace::new(cfg.dim_target)?;
    let d = tensor(&annihilation_op(sp_d), &Operator::identity(cfg.dim_target));
    let a = tensor(&Operator::identity(cfg.dim_source), &annihilation_op(sp_a));
    Ok((d, a))
}

/// Build the trace-preserving generator of the cascaded pair.
pub fn build_cascade_liouvillian(cfg: &CascadeConfig) -> Result<Liouvillian> {
    cfg.validate()?;
    let alpha = cfg.resolved_alpha()?;
    let (d, a) = mode_operators(cfg)?;
    let dim = cfg.dim_source * cfg.dim_target;

    let i_unit = C64::new(0.0, 1.0);
    let mut h = ndarray::Array2::<C64>::zeros((dim, dim));

    // Kerr term on the target
    if cfg.eta != 0.0 {
        let a2 = a.matrix().dot(a.matrix());
        let a2d = a2.t().mapv(|z| z.conj());
        h += &(a2d.dot(&a2) * C64::from(cfg.eta));
    }

    // hopping Hamiltonian completing the combined-jump form of the cascaded
    // cross term: (i s / 2)(d†a - a†d), s = sqrt(kappa_d2 kappa_e1)
    let s = (cfg.kappa_d2 * cfg.kappa_e1).sqrt();
    if s != 0.0 {
        let hop = d.dagger().matrix().dot(a.matrix());
        h += &((&hop - &hop.t().mapv(|z| z.conj())) * (C64::from(0.5 * s) * i_unit));
    }

    // coherent drive on the source: -i [ -i sqrt(kappa_d1) (alpha d† - alpha d), . ]
    if alpha != 0.0 && cfg.kappa_d1 > 0.0 {
        let amp = -i_unit * C64::from(cfg.kappa_d1.sqrt() * alpha);
        h += &((d.dagger().matrix() - d.matrix()) * amp);
    }

    // combined unidirectional jump sqrt(kappa_d2) d + sqrt(kappa_e1) a; the
    // per-mode dissipators keep only their remaining rates
    let combined = Operator::from_matrix(
        d.matrix() * C64::from(cfg.kappa_d2.sqrt()) + a.matrix() * C64::from(cfg.kappa_e1.sqrt()),
    )?;
    let a2 = Operator::from_matrix(a.matrix().dot(a.matrix()))?;
    let kappa_a_rest = cfg.kappa_a() - cfg.kappa_e1;

    let channels = vec![
        CollapseChannel::new(combined, 1.0),
        CollapseChannel::new(d.clone(), cfg.kappa_d1),
        CollapseChannel::new(a.clone(), kappa_a_rest),
        CollapseChannel::new(a2, cfg.kappa_a_nonlin),
    ];
    lindblad::build_liouvillian(&Operator::from_matrix(h)?, &channels)
}

/// Steady state of the cascade (by propagation for the usual cutoffs).
pub fn cascade_steady_state(cfg: &CascadeConfig) -> Result<DensityMatrix> {
    let liouv = build_cascade_liouvillian(cfg)?;
    lindblad::steady_state(&liouv)
}

/// Which mode's Fock statistics to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeMode {
    /// Source-cavity marginal (the quantized input field).
    Incident,
    /// Target-cavity marginal; with the output port as the only exit for
    /// intracavity photons, its statistics are the transmitted statistics.
    Transmitted,
    /// Superposition mode `c = (sqrt(kappa_d2) d + sqrt(kappa_e1) a) / sqrt(kappa_d2 + kappa_e1)`.
    Reflected,
}

impl CascadeMode {
    pub fn label(&self) -> &'static str {
        match self {
            CascadeMode::Incident => "incident",
            CascadeMode::Transmitted => "transmitted",
            CascadeMode::Reflected => "reflected",
        }
    }
}

/// Fock-state probabilities of one mode of the cascade.
#[derive(Debug, Clone)]
pub struct ModeStatistics {
    pub mode: CascadeMode,
    pub probabilities: Vec<f64>,
    pub mean_photons: f64,
}

/// Reduced state of the reflected mode: rotate the composite state so the
/// reflected superposition becomes the first mode, then trace the orthogonal
/// partner out.
///
/// The rotation generator conserves total photon number, so blocks with total
/// n below the cutoff transform exactly; the weight on incomplete blocks is
/// required to stay below [`ROTATION_LEAKAGE_TOL`].
pub fn reflected_mode_state(rho: &DensityMatrix, cfg: &CascadeConfig) -> Result<DensityMatrix> {
    cfg.validate()?;
    if cfg.dim_source != cfg.dim_target {
        return Err(Error::DimensionMismatch(format!(
            "reflected-mode extraction needs equal cutoffs, got {} and {}",
            cfg.dim_source, cfg.dim_target
        )));
    }
    let dim = cfg.dim_source;
    if rho.dim() != dim * dim {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} does not match composite dim {}",
            rho.dim(),
            dim * dim
        )));
    }
    if cfg.kappa_d2 <= 0.0 && cfg.kappa_e1 <= 0.0 {
        return Err(Error::InvalidParameter(
            "reflected mode undefined with kappa_d2 = kappa_e1 = 0".into(),
        ));
    }

    let leakage: f64 = rho
        .diagonal()
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx / dim + idx % dim >= dim)
        .map(|(_, p)| *p)
        .sum();
    if leakage > ROTATION_LEAKAGE_TOL {
        return Err(Error::TruncationLeakage {
            population: leakage,
        });
    }

    let theta = cfg.kappa_e1.sqrt().atan2(cfg.kappa_d2.sqrt());
    let sp = FockSpace::new(dim)?;
    let u = beam_splitter_unitary(sp, sp, theta)?;
    let rotated = u.matrix().dot(rho.matrix()).dot(&u.dagger().into_matrix());
    let rotated = DensityMatrix::from_matrix(rotated)?;
    partial_trace(&rotated, &[dim, dim], 0)
}

/// Fock statistics of one mode of a composite cascade state.
pub fn mode_fock_statistics(
    rho: &DensityMatrix,
    cfg: &CascadeConfig,
    mode: CascadeMode,
) -> Result<ModeStatistics> {
    cfg.validate()?;
    let dims = [cfg.dim_source, cfg.dim_target];
    let reduced = match mode {
        CascadeMode::Incident => partial_trace(rho, &dims, 0)?,
        CascadeMode::Transmitted => partial_trace(rho, &dims, 1)?,
        CascadeMode::Reflected => reflected_mode_state(rho, cfg)?,
    };
    let probabilities = reduced.diagonal();
    let mean_photons = probabilities
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum();
    Ok(ModeStatistics {
        mode,
        probabilities,
        mean_photons,
    })
}
