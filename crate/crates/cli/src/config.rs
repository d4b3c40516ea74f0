//! Layered configuration: built-in defaults, then an optional named preset,
//! then the optional TOML config file, then command-line flags. Every value
//! that reaches a solver is echoed into the run manifest.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use blockade_core::atomic::NTypeEnsembleParams;
use blockade_core::cascade::CascadeConfig;

use crate::preset;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<PresetSection>,
    pub ensemble: Option<EnsembleSection>,
    pub cavity: Option<CavitySection>,
    pub grid: Option<GridSection>,
    pub tau: Option<TauSection>,
    pub cascade: Option<CascadeSection>,
    pub fp: Option<FpSection>,
    pub oracle: Option<OracleSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSection {
    pub name: Option<String>,
    pub input_power_watts: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n_atoms: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub omega_c: Option<f64>,
    pub gamma21: Option<f64>,
    pub gamma23: Option<f64>,
    pub gamma31: Option<f64>,
    pub gamma41: Option<f64>,
    pub gamma42: Option<f64>,
    pub gamma43: Option<f64>,
    pub delta23: Option<f64>,
    pub delta21_res: Option<f64>,
    pub delta43_res: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub kappa_e1: Option<f64>,
    pub kappa_e2: Option<f64>,
    pub kappa_i: Option<f64>,
    pub eps_p: Option<f64>,
    pub fock_cutoff: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Geometric grids (spectrum-g2): innermost |detuning| and outer span.
    pub min_abs: Option<f64>,
    pub max_abs: Option<f64>,
    pub points_per_side: Option<usize>,
    /// Linear scans (rates-linear, rates-nonlinear): half span and count.
    pub span: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauSection {
    pub max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeSection {
    pub kappa_d1: Option<f64>,
    pub kappa_d2: Option<f64>,
    pub kappa_e1: Option<f64>,
    pub kappa_e2: Option<f64>,
    pub kappa_i: Option<f64>,
    pub kappa_a_lin: Option<f64>,
    pub kappa_a_nonlin: Option<f64>,
    pub eta: Option<f64>,
    pub nbar: Option<f64>,
    pub alpha: Option<f64>,
    pub dim: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FpSection {
    pub round_trip_length: Option<f64>,
    pub medium_path: Option<f64>,
    pub reflectivity: Option<f64>,
    pub alpha_loss: Option<f64>,
    /// Physical linewidth used to translate kappa-unit pulls, as 2 pi x MHz.
    pub kappa_mhz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub g1: Option<f64>,
    pub omega_c: Option<f64>,
    pub delta21_res: Option<f64>,
    pub window: Option<f64>,
    pub points: Option<usize>,
    pub eps_p: Option<f64>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, String> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            toml::from_str(&text).map_err(|e| format!("config parse error: {e}"))
        }
    }
}

/// Ensemble constants after preset and file-section resolution.
pub fn resolve_ensemble(
    file: &FileConfig,
    preset: Option<&preset::PhysicalPreset>,
) -> NTypeEnsembleParams {
    let mut p = match preset {
        Some(pp) => pp.ensemble(),
        None => NTypeEnsembleParams::operating_point(),
    };
    if let Some(e) = &file.ensemble {
        if let Some(v) = e.n_atoms {
            p.n_atoms = v;
        }
        if let Some(v) = e.g1 {
            p.g1 = v;
        }
        if let Some(v) = e.g2 {
            p.g2 = v;
        }
        if let Some(v) = e.omega_c {
            p.omega_c = v;
        }
        if let Some(v) = e.gamma21 {
            p.gamma21 = v;
        }
        if let Some(v) = e.gamma23 {
            p.gamma23 = v;
        }
        if let Some(v) = e.gamma31 {
            p.gamma31 = v;
        }
        if let Some(v) = e.gamma41 {
            p.gamma41 = v;
        }
        if let Some(v) = e.gamma42 {
            p.gamma42 = v;
        }
        if let Some(v) = e.gamma43 {
            p.gamma43 = v;
        }
        if let Some(v) = e.delta23 {
            p.delta23 = v;
        }
        if let Some(v) = e.delta21_res {
            p.delta21_res = v;
        }
        if let Some(v) = e.delta43_res {
            p.delta43_res = v;
        }
    }
    p
}

/// Port rates and probe drive after preset and file-section resolution.
/// Without a power figure the probe defaults to the weak-drive convention
/// `sqrt(kappa_e1) eps_p = 0.05`.
pub fn resolve_cavity(
    file: &FileConfig,
    preset: Option<&preset::PhysicalPreset>,
) -> (f64, f64, f64, f64, usize) {
    let (mut e1, mut e2, mut i) = match preset {
        Some(pp) => pp.port_rates(),
        None => (0.45, 0.45, 0.10),
    };
    let mut eps_p: Option<f64> = None;
    if let (Some(pp), Some(ps)) = (preset, &file.preset) {
        if let Some(power) = ps.input_power_watts {
            eps_p = Some(pp.eps_p_from_power(power));
        }
    }
    let mut cutoff = 20usize;
    if let Some(c) = &file.cavity {
        if let Some(v) = c.kappa_e1 {
            e1 = v;
        }
        if let Some(v) = c.kappa_e2 {
            e2 = v;
        }
        if let Some(v) = c.kappa_i {
            i = v;
        }
        if let Some(v) = c.eps_p {
            eps_p = Some(v);
        }
        if let Some(v) = c.fock_cutoff {
            cutoff = v;
        }
    }
    let eps_p = eps_p.unwrap_or(0.05 / e1.max(f64::MIN_POSITIVE).sqrt());
    (e1, e2, i, eps_p, cutoff)
}

/// Cascade parameters with the matched lossless linear pair as the base.
pub fn resolve_cascade(file: &FileConfig) -> CascadeConfig {
    let mut cfg = CascadeConfig::matched_linear();
    if let Some(c) = &file.cascade {
        if let Some(v) = c.kappa_d1 {
            cfg.kappa_d1 = v;
        }
        if let Some(v) = c.kappa_d2 {
            cfg.kappa_d2 = v;
        }
        if let Some(v) = c.kappa_e1 {
            cfg.kappa_e1 = v;
        }
        if let Some(v) = c.kappa_e2 {
            cfg.kappa_e2 = v;
        }
        if let Some(v) = c.kappa_i {
            cfg.kappa_i = v;
        }
        if let Some(v) = c.kappa_a_lin {
            cfg.kappa_a_lin = v;
        }
        if let Some(v) = c.kappa_a_nonlin {
            cfg.kappa_a_nonlin = v;
        }
        if let Some(v) = c.eta {
            cfg.eta = v;
        }
        if let Some(v) = c.nbar {
            cfg.target_nbar = Some(v);
        }
        if let Some(v) = c.alpha {
            cfg.alpha = v;
            cfg.target_nbar = None;
        }
        if let Some(v) = c.dim {
            cfg.dim_source = v;
            cfg.dim_target = v;
        }
    }
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_without_file_or_preset() {
        let file = FileConfig::default();
        let ens = resolve_ensemble(&file, None);
        assert_eq!(ens.omega_c, 10.0);
        let (e1, e2, i, eps, cutoff) = resolve_cavity(&file, None);
        assert!((e1 + e2 + i - 1.0).abs() < 1e-12);
        assert!((e1.sqrt() * eps - 0.05).abs() < 1e-12);
        assert_eq!(cutoff, 20);
    }

    #[test]
    fn file_overrides_preset() {
        let file: FileConfig = toml::from_str(
            r#"
            [ensemble]
            omega_c = 5.0
            [cavity]
            eps_p = 0.2
            "#,
        )
        .unwrap();
        let pp = preset::rb87_d1();
        let ens = resolve_ensemble(&file, Some(&pp));
        assert_eq!(ens.omega_c, 5.0);
        assert!((ens.g1 - 0.1515151515).abs() < 1e-8);
        let (_, _, _, eps, _) = resolve_cavity(&file, Some(&pp));
        assert_eq!(eps, 0.2);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad: Result<FileConfig, _> = toml::from_str("[ensemble]\ntypo_field = 1.0\n");
        assert!(bad.is_err());
    }
}
