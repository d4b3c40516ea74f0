//! Scenario implementations. Each resolves its parameters, runs the grid
//! (in parallel where the work is per-point), writes deterministic CSV plus a
//! manifest echoing every resolved value, and reports per-point failures.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use blockade_core::atomic::{self, NTypeEnsembleParams};
use blockade_core::cascade::{self, CascadeMode};
use blockade_core::effective::{self, EffectiveCavityConfig};
use blockade_core::fp::{self, FpGeometry, PullDispersion};
use blockade_core::lindblad;
use blockade_core::microscopic::{self, MicroscopicConfig};
use blockade_core::par;

use crate::config::FileConfig;
use crate::output::{manifest_path, side_table_path, write_csv, Manifest, Table};
use crate::preset::PhysicalPreset;
use crate::{config, RunError};

pub struct RunContext {
    pub file: FileConfig,
    pub preset: Option<PhysicalPreset>,
    pub fock_cutoff: Option<usize>,
    pub out: PathBuf,
}

impl RunContext {
    fn ensemble(&self) -> NTypeEnsembleParams {
        config::resolve_ensemble(&self.file, self.preset.as_ref())
    }

    fn cavity(&self) -> (f64, f64, f64, f64, usize) {
        let (e1, e2, i, eps, mut cutoff) = config::resolve_cavity(&self.file, self.preset.as_ref());
        if let Some(c) = self.fock_cutoff {
            cutoff = c;
        }
        (e1, e2, i, eps, cutoff)
    }

    fn linear_grid(&self, default_span: f64, default_points: usize) -> (f64, usize) {
        let g = self.file.grid.as_ref();
        (
            g.and_then(|g| g.span).unwrap_or(default_span),
            g.and_then(|g| g.points).unwrap_or(default_points),
        )
    }

    fn geometric_grid(&self) -> (f64, f64, usize) {
        let g = self.file.grid.as_ref();
        (
            g.and_then(|g| g.min_abs).unwrap_or(1e-6),
            g.and_then(|g| g.max_abs).unwrap_or(2e-2),
            g.and_then(|g| g.points_per_side).unwrap_or(100),
        )
    }

    fn manifest(&self, scenario: &str) -> Manifest {
        let mut m = Manifest::new(scenario);
        m.set_str(
            "preset",
            self.preset.as_ref().map(|p| p.name).unwrap_or("none"),
        );
        m.set_str("output", &self.out.to_string_lossy());
        m.set_int("workers", rayon::current_num_threads() as i64);
        m
    }
}

fn record_ensemble(m: &mut Manifest, p: &NTypeEnsembleParams) {
    m.set("ensemble.n_atoms", p.n_atoms);
    m.set("ensemble.g1", p.g1);
    m.set("ensemble.g2", p.g2);
    m.set("ensemble.omega_c", p.omega_c);
    m.set("ensemble.gamma21", p.gamma21);
    m.set("ensemble.gamma23", p.gamma23);
    m.set("ensemble.gamma31", p.gamma31);
    m.set("ensemble.gamma41", p.gamma41);
    m.set("ensemble.gamma42", p.gamma42);
    m.set("ensemble.gamma43", p.gamma43);
    m.set("ensemble.delta23", p.delta23);
    m.set("ensemble.delta21_res", p.delta21_res);
    m.set("ensemble.delta43_res", p.delta43_res);
}

fn linear_span_grid(span: f64, points: usize) -> Result<Vec<f64>, RunError> {
    let span_valid = span.is_finite() && span > 0.0;
    if !span_valid || points < 2 {
        return Err(RunError::Config(format!(
            "need span > 0 and at least 2 points, got span {span} with {points} points"
        )));
    }
    Ok((0..points)
        .map(|k| -span + 2.0 * span * k as f64 / (points - 1) as f64)
        .collect())
}

fn checked_geometric_grid(
    min_abs: f64,
    max_abs: f64,
    per_side: usize,
) -> Result<Vec<f64>, RunError> {
    let bounds_valid =
        min_abs.is_finite() && max_abs.is_finite() && min_abs > 0.0 && max_abs > min_abs;
    if !bounds_valid || per_side < 2 {
        return Err(RunError::Config(format!(
            "geometric grid needs 0 < min_abs < max_abs and points_per_side >= 2, \
             got ({min_abs}, {max_abs}, {per_side})"
        )));
    }
    Ok(effective::geometric_detuning_grid(
        min_abs, max_abs, per_side,
    ))
}

fn finish(
    out: &Path,
    table: &Table,
    manifest: &Manifest,
    failed_points: usize,
) -> Result<(), RunError> {
    write_csv(out, table)
        .map_err(|e| RunError::Numeric(format!("writing {}: {e}", out.display())))?;
    manifest
        .write(&manifest_path(out))
        .map_err(|e| RunError::Numeric(format!("writing manifest: {e}")))?;
    if failed_points > 0 {
        return Err(RunError::Numeric(format!(
            "{failed_points} grid point(s) failed; rows recorded as nan"
        )));
    }
    Ok(())
}

/// Pull and one-photon absorption against the working resonance position,
/// with the coupling laser resonant (the transparency trace).
pub fn rates_linear(
    ctx: &RunContext,
    span: Option<f64>,
    points: Option<usize>,
) -> Result<(), RunError> {
    let mut params = ctx.ensemble();
    params.delta23 = 0.0; // coupling laser on resonance for this scan
    params
        .validate()
        .map_err(|e| RunError::Config(e.to_string()))?;
    let (default_span, default_points) = ctx.linear_grid(30.0, 301);
    let span = span.unwrap_or(default_span);
    let points = points.unwrap_or(default_points);
    let offsets = linear_span_grid(span, points)?;

    let results = par::par_map(&offsets, |x| {
        let mut p = params.clone();
        p.delta21_res = -x; // omega'_cav sits x above the 1<->2 line
        atomic::linear_rates(&p, 0.0)
    });

    let mut rows = Vec::with_capacity(offsets.len());
    let mut failed = 0;
    for (x, r) in offsets.iter().zip(results) {
        match r {
            Ok((pull, lin)) => rows.push(vec![*x, pull, lin]),
            Err(e) => {
                eprintln!("point {x}: {e}");
                failed += 1;
                rows.push(vec![*x, f64::NAN, f64::NAN]);
            }
        }
    }
    let table = Table {
        headers: vec!["omega_cav_offset", "delta_omega_cav", "kappa_a_lin"],
        rows,
    };
    let mut m = ctx.manifest("rates-linear");
    record_ensemble(&mut m, &params);
    m.set("grid.span", span);
    m.set_int("grid.points", points as i64);
    finish(&ctx.out, &table, &m, failed)
}

/// Kerr coefficient and two-photon absorption against the 3<->4 detuning at
/// two-photon resonance.
pub fn rates_nonlinear(
    ctx: &RunContext,
    span: Option<f64>,
    points: Option<usize>,
) -> Result<(), RunError> {
    let params = ctx.ensemble();
    params
        .validate()
        .map_err(|e| RunError::Config(e.to_string()))?;
    let (default_span, default_points) = ctx.linear_grid(0.2, 401);
    let span = span.unwrap_or(default_span);
    let points = points.unwrap_or(default_points);
    let offsets = linear_span_grid(span, points)?;

    let results = par::par_map(&offsets, |d43| {
        let mut p = params.clone();
        p.delta43_res = *d43;
        atomic::effective_params(&p, 0.0)
    });

    let mut rows = Vec::with_capacity(offsets.len());
    let mut failed = 0;
    for (d43, r) in offsets.iter().zip(results) {
        match r {
            Ok(eff) => rows.push(vec![*d43, eff.eta, eff.kappa_a_nonlin]),
            Err(e) => {
                eprintln!("point {d43}: {e}");
                failed += 1;
                rows.push(vec![*d43, f64::NAN, f64::NAN]);
            }
        }
    }
    let table = Table {
        headers: vec!["delta43_offset", "eta", "kappa_a_nonlin"],
        rows,
    };
    let mut m = ctx.manifest("rates-nonlinear");
    record_ensemble(&mut m, &params);
    m.set("grid.span", span);
    m.set_int("grid.points", points as i64);
    finish(&ctx.out, &table, &m, failed)
}

fn effective_config(
    ctx: &RunContext,
    eps_p_flag: Option<f64>,
) -> Result<(EffectiveCavityConfig, (f64, f64, usize)), RunError> {
    let params = ctx.ensemble();
    let (e1, e2, i, eps_default, cutoff) = ctx.cavity();
    let (min_abs, max_abs, per_side) = ctx.geometric_grid();
    let cfg = EffectiveCavityConfig {
        kappa_e1: e1,
        kappa_e2: e2,
        kappa_i: i,
        eps_p: eps_p_flag.unwrap_or(eps_default),
        detuning_grid: checked_geometric_grid(min_abs, max_abs, per_side)?,
        atom_params: params,
        fock_cutoff: cutoff,
    };
    Ok((cfg, (min_abs, max_abs, per_side)))
}

fn record_effective(m: &mut Manifest, cfg: &EffectiveCavityConfig) {
    record_ensemble(m, &cfg.atom_params);
    m.set("cavity.kappa_e1", cfg.kappa_e1);
    m.set("cavity.kappa_e2", cfg.kappa_e2);
    m.set("cavity.kappa_i", cfg.kappa_i);
    m.set("cavity.eps_p", cfg.eps_p);
    m.set_int("cavity.fock_cutoff", cfg.fock_cutoff as i64);
}

/// Transmission and equal-time correlation across the narrowed resonance.
pub fn spectrum_g2(ctx: &RunContext, eps_p: Option<f64>) -> Result<(), RunError> {
    let (cfg, (min_abs, max_abs, per_side)) = effective_config(ctx, eps_p)?;
    let outcomes =
        effective::transmission_sweep(&cfg).map_err(|e| RunError::Config(e.to_string()))?;

    let mut rows = Vec::with_capacity(outcomes.len());
    let mut failed = 0;
    for (dp, outcome) in cfg.detuning_grid.iter().zip(outcomes) {
        match outcome {
            Ok(p) => rows.push(vec![
                p.delta_prime,
                p.transmission,
                p.g2_zero,
                p.mean_photons,
                p.rates.kappa_a_lin,
                p.rates.kappa_a_nonlin,
                p.rates.eta,
                p.shift,
            ]),
            Err(e) => {
                eprintln!("point {dp}: {e}");
                failed += 1;
                rows.push(vec![
                    *dp,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                ]);
            }
        }
    }
    let table = Table {
        headers: vec![
            "delta_prime",
            "transmission",
            "g2_0",
            "mean_n",
            "kappa_a_lin",
            "kappa_a_nonlin",
            "eta",
            "shift",
        ],
        rows,
    };
    let mut m = ctx.manifest("spectrum-g2");
    record_effective(&mut m, &cfg);
    m.set("grid.min_abs", min_abs);
    m.set("grid.max_abs", max_abs);
    m.set_int("grid.points_per_side", per_side as i64);
    finish(&ctx.out, &table, &m, failed)
}

/// Delayed second-order correlation of the resonantly driven blockade model.
pub fn g2_tau(
    ctx: &RunContext,
    eps_p: Option<f64>,
    tau_max: Option<f64>,
    points: Option<usize>,
) -> Result<(), RunError> {
    let (cfg, _) = effective_config(ctx, eps_p)?;
    let tau_section = ctx.file.tau.as_ref();
    let tau_max = tau_max
        .or_else(|| tau_section.and_then(|t| t.max))
        .unwrap_or(20.0);
    let points = points
        .or_else(|| tau_section.and_then(|t| t.points))
        .unwrap_or(201);
    if points < 2 || tau_max <= 0.0 {
        return Err(RunError::Config(
            "need tau_max > 0 and at least 2 points".into(),
        ));
    }

    let (h, channels) =
        effective::build_effective_model(&cfg, 0.0).map_err(|e| RunError::Config(e.to_string()))?;
    let run = || -> blockade_core::Result<lindblad::TimeSeries> {
        let liouv = lindblad::build_liouvillian(&h, &channels)?;
        let rho_ss = lindblad::steady_state(&liouv)?;
        let taus: Vec<f64> = (0..points)
            .map(|k| tau_max * k as f64 / (points - 1) as f64)
            .collect();
        lindblad::g2_tau(&liouv, &rho_ss, &taus)
    };
    let series = run().map_err(|e| RunError::Numeric(e.to_string()))?;

    let table = Table {
        headers: vec!["tau", "g2"],
        rows: series
            .times
            .iter()
            .zip(&series.values)
            .map(|(t, v)| vec![*t, *v])
            .collect(),
    };
    let mut m = ctx.manifest("g2-tau");
    record_effective(&mut m, &cfg);
    m.set("tau.max", tau_max);
    m.set_int("tau.points", points as i64);
    finish(&ctx.out, &table, &m, 0)
}

/// Fock statistics of the incident, transmitted, and reflected modes of the
/// cascaded pair.
pub fn cascade_fock(
    ctx: &RunContext,
    kappa_nl: Option<f64>,
    nbar: Option<f64>,
    dim: Option<usize>,
    rates_from_ensemble: bool,
) -> Result<(), RunError> {
    let mut cfg = config::resolve_cascade(&ctx.file);
    if rates_from_ensemble {
        // target rates derived from the resolved atomic constants at the
        // working resonance instead of taken as free configuration
        let params = ctx.ensemble();
        let eff =
            atomic::effective_params(&params, 0.0).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.kappa_a_lin = eff.kappa_a_lin;
        cfg.kappa_a_nonlin = eff.kappa_a_nonlin;
        cfg.eta = eff.eta;
    }
    if let Some(v) = kappa_nl {
        cfg.kappa_a_nonlin = v;
    }
    if let Some(v) = nbar {
        cfg.target_nbar = Some(v);
    }
    if let Some(v) = dim {
        cfg.dim_source = v;
        cfg.dim_target = v;
    }
    cfg.validate()
        .map_err(|e| RunError::Config(e.to_string()))?;

    let run = || -> blockade_core::Result<_> {
        let rho = cascade::cascade_steady_state(&cfg)?;
        let incident = cascade::mode_fock_statistics(&rho, &cfg, CascadeMode::Incident)?;
        let transmitted = cascade::mode_fock_statistics(&rho, &cfg, CascadeMode::Transmitted)?;
        let reflected = cascade::mode_fock_statistics(&rho, &cfg, CascadeMode::Reflected)?;
        Ok((incident, transmitted, reflected))
    };
    let (incident, transmitted, reflected) = run().map_err(|e| RunError::Numeric(e.to_string()))?;

    let len = incident
        .probabilities
        .len()
        .max(transmitted.probabilities.len())
        .max(reflected.probabilities.len());
    let at = |v: &[f64], n: usize| v.get(n).copied().unwrap_or(0.0);
    let rows = (0..len)
        .map(|n| {
            vec![
                n as f64,
                at(&incident.probabilities, n),
                at(&transmitted.probabilities, n),
                at(&reflected.probabilities, n),
            ]
        })
        .collect();
    let table = Table {
        headers: vec!["n", "p_incident", "p_transmitted", "p_reflected"],
        rows,
    };

    let mut m = ctx.manifest("cascade-fock");
    m.set("cascade.kappa_d1", cfg.kappa_d1);
    m.set("cascade.kappa_d2", cfg.kappa_d2);
    m.set("cascade.kappa_e1", cfg.kappa_e1);
    m.set("cascade.kappa_e2", cfg.kappa_e2);
    m.set("cascade.kappa_i", cfg.kappa_i);
    m.set("cascade.kappa_a_lin", cfg.kappa_a_lin);
    m.set("cascade.kappa_a_nonlin", cfg.kappa_a_nonlin);
    m.set("cascade.eta", cfg.eta);
    m.set(
        "cascade.alpha",
        cfg.resolved_alpha()
            .map_err(|e| RunError::Config(e.to_string()))?,
    );
    m.set_int("cascade.dim_source", cfg.dim_source as i64);
    m.set_int("cascade.dim_target", cfg.dim_target as i64);
    m.set("cascade.mean_n.incident", incident.mean_photons);
    m.set("cascade.mean_n.transmitted", transmitted.mean_photons);
    m.set("cascade.mean_n.reflected", reflected.mean_photons);
    finish(&ctx.out, &table, &m, 0)
}

/// The rate panels against probe detuning plus the classical narrowed
/// linewidth computed from the same dispersion.
pub fn linewidth(ctx: &RunContext, medium_path: Option<f64>) -> Result<(), RunError> {
    let params = ctx.ensemble();
    params
        .validate()
        .map_err(|e| RunError::Config(e.to_string()))?;
    let (min_abs, max_abs, per_side) = ctx.geometric_grid();
    let grid = checked_geometric_grid(min_abs, max_abs, per_side)?;

    let results = par::par_map(&grid, |dp| {
        let eff = atomic::effective_params(&params, *dp)?;
        let shift = atomic::dispersive_shift(&params, *dp)?;
        Ok::<_, blockade_core::Error>((eff, shift))
    });
    let mut rows = Vec::with_capacity(grid.len());
    let mut failed = 0;
    for (dp, r) in grid.iter().zip(results) {
        match r {
            Ok((eff, shift)) => rows.push(vec![
                *dp,
                shift,
                eff.kappa_a_lin,
                eff.eta,
                eff.kappa_a_nonlin,
            ]),
            Err(e) => {
                eprintln!("point {dp}: {e}");
                failed += 1;
                rows.push(vec![*dp, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
            }
        }
    }
    let table = Table {
        headers: vec![
            "delta_prime",
            "shift",
            "kappa_a_lin",
            "eta",
            "kappa_a_nonlin",
        ],
        rows,
    };

    // classical cavity fed by the same pull
    let fp_section = ctx.file.fp.as_ref();
    let mut geom = FpGeometry::default_cavity();
    if let Some(f) = fp_section {
        if let Some(v) = f.round_trip_length {
            geom.round_trip_length = v;
        }
        if let Some(v) = f.medium_path {
            geom.medium_path = v;
        }
        if let Some(r) = f.reflectivity {
            geom.r1 = r.sqrt();
            geom.r2 = r.sqrt();
            geom.t1 = (1.0 - r).sqrt();
        }
        if let Some(v) = f.alpha_loss {
            geom.alpha_loss = v;
        }
    }
    if let Some(v) = medium_path {
        geom.medium_path = v;
    }
    geom.validate()
        .map_err(|e| RunError::Config(e.to_string()))?;
    let kappa_mhz = fp_section
        .and_then(|f| f.kappa_mhz)
        .or_else(|| ctx.preset.as_ref().map(|p| p.kappa_mhz))
        .unwrap_or(1.32);
    let kappa_rad_s = 2.0 * std::f64::consts::PI * kappa_mhz * 1e6;

    let pull_params = params.clone();
    let profile = PullDispersion::new(&geom, kappa_rad_s, move |dp: f64| {
        atomic::dispersive_shift(&pull_params, dp).unwrap_or(0.0)
    });
    let narrowed =
        fp::narrowed_linewidth(&geom, &profile).map_err(|e| RunError::Numeric(e.to_string()))?;
    let bare = geom.bare_linewidth();
    let classical = Table {
        headers: vec![
            "delta_omega_bare_rad_s",
            "delta_omega_narrowed_rad_s",
            "omega_plus_rad_s",
            "omega_minus_rad_s",
            "narrowing_ratio",
        ],
        rows: vec![vec![
            bare,
            narrowed.delta_omega,
            narrowed.omega_plus,
            narrowed.omega_minus,
            narrowed.delta_omega / bare,
        ]],
    };
    write_csv(&side_table_path(&ctx.out, "classical"), &classical)
        .map_err(|e| RunError::Numeric(format!("writing classical table: {e}")))?;

    let mut m = ctx.manifest("linewidth");
    record_ensemble(&mut m, &params);
    m.set("grid.min_abs", min_abs);
    m.set("grid.max_abs", max_abs);
    m.set_int("grid.points_per_side", per_side as i64);
    m.set("fp.round_trip_length", geom.round_trip_length);
    m.set("fp.medium_path", geom.medium_path);
    m.set("fp.r1", geom.r1);
    m.set("fp.t1", geom.t1);
    m.set("fp.r2", geom.r2);
    m.set("fp.alpha_loss", geom.alpha_loss);
    m.set_int("fp.mode_index", geom.mode_index as i64);
    m.set("fp.kappa_mhz", kappa_mhz);
    finish(&ctx.out, &table, &m, failed)
}

/// Weak-drive scan of the one-atom full model with the spectroscopic fit,
/// against the closed-form lineshape under the identical fit.
pub fn oracle(
    ctx: &RunContext,
    window: Option<f64>,
    points: Option<usize>,
) -> Result<(), RunError> {
    let section = ctx.file.oracle.as_ref();
    let g1 = section.and_then(|o| o.g1).unwrap_or(0.15);
    let omega_c = section.and_then(|o| o.omega_c).unwrap_or(2.0);
    let delta21_res = section.and_then(|o| o.delta21_res).unwrap_or(3.0);
    let window = window
        .or_else(|| section.and_then(|o| o.window))
        .unwrap_or(0.12);
    let points = points
        .or_else(|| section.and_then(|o| o.points))
        .unwrap_or(25);
    let eps_p = section.and_then(|o| o.eps_p).unwrap_or(1e-3);

    let cfg = MicroscopicConfig {
        n_atoms: 1,
        fock_cutoff: ctx.fock_cutoff.unwrap_or(3),
        atom_params: NTypeEnsembleParams {
            n_atoms: 1.0,
            g1,
            g2: 0.0,
            omega_c,
            gamma21: 4.5,
            gamma23: 4.5,
            gamma31: 1e-5,
            gamma41: 0.0,
            gamma42: 0.0,
            gamma43: 4.5,
            delta23: 0.0,
            delta21_res,
            delta43_res: 0.0,
        },
        delta: 0.0,
        eps_p,
        kappa_e1: 0.45,
        kappa_e2: 0.45,
        kappa_i: 0.10,
    };
    cfg.validate()
        .map_err(|e| RunError::Config(e.to_string()))?;
    if points < 5 {
        return Err(RunError::Config(
            "oracle scan needs at least 5 points".into(),
        ));
    }

    let deltas = linear_span_grid(window, points)?;
    let scan = microscopic::transmission_scan(&cfg, &deltas)
        .map_err(|e| RunError::Config(e.to_string()))?;

    // closed-form route: reduced single-mode lineshape from F1
    let eps_d = cfg.kappa_e1.sqrt() * cfg.eps_p;
    let closed_form: Vec<f64> = deltas
        .iter()
        .map(|d| {
            let lr = atomic::linear_responses(&cfg.atom_params, *d).expect("validated parameters");
            let sigma = C64::from(g1 * g1) / lr.f1;
            (C64::from(eps_d) / (C64::new(0.5, -d) + sigma)).norm_sqr()
        })
        .collect();

    let mut rows = Vec::with_capacity(deltas.len());
    let mut micro_ns = Vec::with_capacity(deltas.len());
    let mut failed = 0;
    for ((d, r), cf) in deltas.iter().zip(scan).zip(&closed_form) {
        match r {
            Ok(n) => {
                micro_ns.push(n);
                rows.push(vec![*d, n, *cf]);
            }
            Err(e) => {
                eprintln!("point {d}: {e}");
                failed += 1;
                rows.push(vec![*d, f64::NAN, *cf]);
            }
        }
    }
    let table = Table {
        headers: vec!["delta", "mean_n_full_model", "mean_n_closed_form"],
        rows,
    };

    if failed == 0 {
        let micro_fit = microscopic::fit_lorentzian(&deltas, &micro_ns)
            .map_err(|e| RunError::Numeric(e.to_string()))?;
        let cf_fit = microscopic::fit_lorentzian(&deltas, &closed_form)
            .map_err(|e| RunError::Numeric(e.to_string()))?;
        let fit_table = Table {
            headers: vec![
                "pull",
                "added_loss",
                "closed_form_pull",
                "closed_form_added_loss",
            ],
            rows: vec![vec![
                micro_fit.center,
                micro_fit.fwhm - 1.0,
                cf_fit.center,
                cf_fit.fwhm - 1.0,
            ]],
        };
        write_csv(&side_table_path(&ctx.out, "fit"), &fit_table)
            .map_err(|e| RunError::Numeric(format!("writing fit table: {e}")))?;
    }

    let mut m = ctx.manifest("oracle");
    record_ensemble(&mut m, &cfg.atom_params);
    m.set_int("oracle.n_atoms", cfg.n_atoms as i64);
    m.set_int("oracle.fock_cutoff", cfg.fock_cutoff as i64);
    m.set("oracle.eps_p", cfg.eps_p);
    m.set("oracle.window", window);
    m.set_int("oracle.points", points as i64);
    m.set("cavity.kappa_e1", cfg.kappa_e1);
    m.set("cavity.kappa_e2", cfg.kappa_e2);
    m.set("cavity.kappa_i", cfg.kappa_i);
    finish(&ctx.out, &table, &m, failed)
}
