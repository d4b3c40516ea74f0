//! Named physical presets converting laboratory numbers into the internal
//! kappa units at load time.

use blockade_core::atomic::NTypeEnsembleParams;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// A laboratory parameter set; every rate is quoted as `2 pi x MHz`.
#[derive(Debug, Clone)]
pub struct PhysicalPreset {
    pub name: &'static str,
    /// Total cavity linewidth.
    pub kappa_mhz: f64,
    pub kappa_e1_mhz: f64,
    pub kappa_e2_mhz: f64,
    pub kappa_i_mhz: f64,
    /// Single-atom coupling on both cavity transitions.
    pub coupling_mhz: f64,
    /// Splitting between the two cavity-coupled transitions.
    pub splitting_mhz: f64,
    /// Spontaneous decay of the excited hyperfine levels.
    pub atomic_decay_mhz: f64,
    /// Probe wavelength, for converting input power to a drive amplitude.
    pub wavelength_m: f64,
    /// Remaining operating-point values with no laboratory counterpart,
    /// already in kappa units.
    pub n_atoms: f64,
    pub omega_c_kappa: f64,
    pub gamma31_kappa: f64,
    pub delta43_res_kappa: f64,
}

/// Rubidium D1-line cavity: 0.4 m cavity with 99% mirrors, the N-type
/// hyperfine scheme, and the two-photon-resonant Kerr-nulled operating point.
pub fn rb87_d1() -> PhysicalPreset {
    PhysicalPreset {
        name: "rb87-d1",
        kappa_mhz: 1.32,
        kappa_e1_mhz: 0.6,
        kappa_e2_mhz: 0.6,
        kappa_i_mhz: 0.12,
        coupling_mhz: 0.2,
        splitting_mhz: 6020.0,
        atomic_decay_mhz: 6.0,
        wavelength_m: 795e-9,
        n_atoms: 12.5e6,
        omega_c_kappa: 10.0,
        gamma31_kappa: 1e-5,
        delta43_res_kappa: -0.0219,
    }
}

pub fn by_name(name: &str) -> Option<PhysicalPreset> {
    match name {
        "rb87-d1" => Some(rb87_d1()),
        _ => None,
    }
}

impl PhysicalPreset {
    /// Total linewidth in rad/s.
    pub fn kappa_rad_s(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.kappa_mhz * 1e6
    }

    /// Ensemble constants in kappa units.
    pub fn ensemble(&self) -> NTypeEnsembleParams {
        let g = self.coupling_mhz / self.kappa_mhz;
        let gamma = self.atomic_decay_mhz / self.kappa_mhz;
        let splitting = self.splitting_mhz / self.kappa_mhz;
        NTypeEnsembleParams {
            n_atoms: self.n_atoms,
            g1: g,
            g2: g,
            omega_c: self.omega_c_kappa,
            gamma21: gamma,
            gamma23: gamma,
            gamma31: self.gamma31_kappa,
            gamma41: 0.0,
            gamma42: 0.0,
            gamma43: gamma,
            delta23: splitting,
            delta21_res: splitting,
            delta43_res: self.delta43_res_kappa,
        }
    }

    /// Port rates `(kappa_e1, kappa_e2, kappa_i)` in kappa units.
    pub fn port_rates(&self) -> (f64, f64, f64) {
        (
            self.kappa_e1_mhz / self.kappa_mhz,
            self.kappa_e2_mhz / self.kappa_mhz,
            self.kappa_i_mhz / self.kappa_mhz,
        )
    }

    /// Probe amplitude in sqrt(kappa) units from the input power:
    /// `eps_p = sqrt(P / hbar omega_p)` converted by `sqrt(kappa)`.
    pub fn eps_p_from_power(&self, power_watts: f64) -> f64 {
        let omega_p = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.wavelength_m;
        (power_watts / (HBAR * omega_p)).sqrt() / self.kappa_rad_s().sqrt()
    }
}
