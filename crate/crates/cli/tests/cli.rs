//! End-to-end tests of the command-line surface: exit codes, CSV structure,
//! determinism across worker counts, and the config-file/flag layering.

use std::fs;
use std::path::Path;
use std::process::Command;

fn blockade() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blockade"))
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let headers: Vec<String> = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|cell| cell.parse::<f64>().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    (headers, rows)
}

#[test]
fn help_exits_zero() {
    let status = blockade().arg("--help").status().unwrap();
    assert!(status.success());
}

#[test]
fn rates_linear_crosses_the_transparency_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rl.csv");
    let status = blockade()
        .args(["rates-linear", "--span", "2", "--points", "5", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let (headers, rows) = read_rows(&out);
    assert_eq!(
        headers,
        ["omega_cav_offset", "delta_omega_cav", "kappa_a_lin"]
    );
    assert_eq!(rows.len(), 5);
    let centre = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!(
        (centre[2] - 0.02812).abs() < 2e-4,
        "kappa_a_lin {}",
        centre[2]
    );
    // manifest echoes the resolved grid and ensemble, and is valid TOML
    let manifest = fs::read_to_string(dir.path().join("rl.manifest.toml")).unwrap();
    assert!(manifest.contains("scenario = \"rates-linear\""));
    assert!(manifest.contains("ensemble.g1 = 0.15"));
    assert!(manifest.contains("grid.points = 5"));
    let parsed: toml::Value = toml::from_str(&manifest).unwrap();
    assert_eq!(
        parsed["ensemble"]["delta23"].as_float(),
        Some(0.0),
        "coupling laser is forced to resonance in this scan"
    );
}

#[test]
fn spectrum_is_byte_identical_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.toml");
    fs::write(
        &cfg_path,
        r#"
[grid]
min_abs = 1e-5
max_abs = 1e-2
points_per_side = 6

[cavity]
fock_cutoff = 8
"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("sg_{workers}.csv"));
        let status = blockade()
            .args(["spectrum-g2", "--workers", workers, "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "CSV differs with worker count");
    let (headers, rows) = read_rows(&dir.path().join("sg_1.csv"));
    assert_eq!(rows.len(), 13); // 6 per side plus the resonance point
    assert_eq!(headers[0], "delta_prime");
    let resonant = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!(resonant[2] < 0.01, "g2(0) = {}", resonant[2]);
}

#[test]
fn flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.toml");
    fs::write(
        &cfg_path,
        r#"
[oracle]
points = 7
window = 0.1
"#,
    )
    .unwrap();
    let out = dir.path().join("orc.csv");
    let status = blockade()
        .args(["oracle", "--points", "9", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let (_, rows) = read_rows(&out);
    assert_eq!(rows.len(), 9, "flag should win over the file value");
    assert!(dir.path().join("orc_fit.csv").exists());
}

#[test]
fn cascade_statistics_are_normalized_poisson() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cf.csv");
    let status = blockade()
        .args(["cascade-fock", "--dim", "5", "--nbar", "0.1", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let (headers, rows) = read_rows(&out);
    assert_eq!(headers, ["n", "p_incident", "p_transmitted", "p_reflected"]);
    for col in 1..4 {
        let total: f64 = rows.iter().map(|r| r[col]).sum();
        assert!((total - 1.0).abs() < 1e-6, "column {col} sums to {total}");
    }
    // incident mode is Poisson(0.1)
    assert!((rows[1][1] - 0.1 * (-0.1f64).exp()).abs() < 1e-4);
}

#[test]
fn cascade_rates_can_be_derived_from_the_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cfe.csv");
    let status = blockade()
        .args([
            "cascade-fock",
            "--rates-from-ensemble",
            "--dim",
            "6",
            "--nbar",
            "0.3",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let manifest: toml::Value =
        toml::from_str(&fs::read_to_string(dir.path().join("cfe.manifest.toml")).unwrap()).unwrap();
    let nl = manifest["cascade"]["kappa_a_nonlin"].as_float().unwrap();
    assert!((nl - 28.12).abs() < 0.15, "derived kappa_a_nonlin {nl}");
    // pair absorption visibly blocks two-photon transmission
    let (_, rows) = read_rows(&out);
    assert!(
        rows[2][2] < 0.01 * rows[2][1],
        "transmitted P2 {}",
        rows[2][2]
    );
}

#[test]
fn default_cascade_reproduces_the_matched_validation_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cf8.csv");
    let status = blockade()
        .args(["cascade-fock", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let (_, rows) = read_rows(&out);
    // incident mode carries Poisson(0.6): P1 = 0.3293
    assert!(
        (rows[1][1] - 0.3293).abs() < 1e-3,
        "incident P1 {}",
        rows[1][1]
    );
    // matched lossless linear cascade reflects nothing
    assert!(rows[0][3] > 0.999, "reflected P0 {}", rows[0][3]);
}

#[test]
fn preset_replaces_dimensionless_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rn.csv");
    let status = blockade()
        .args([
            "rates-nonlinear",
            "--preset",
            "rb87-d1",
            "--points",
            "5",
            "--span",
            "0.05",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let manifest = fs::read_to_string(dir.path().join("rn.manifest.toml")).unwrap();
    assert!(manifest.contains("preset = \"rb87-d1\""));
    assert!(
        manifest.contains("ensemble.g1 = 0.1515151515"),
        "converted coupling missing: {manifest}"
    );
}

#[test]
fn configuration_errors_exit_one() {
    // malformed config file
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    fs::write(&cfg_path, "[ensemble]\nnot_a_field = 3\n").unwrap();
    let status = blockade()
        .args(["rates-linear", "--config"])
        .arg(&cfg_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // unknown preset
    let status = blockade()
        .args(["rates-linear", "--preset", "does-not-exist"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // unknown flag (usage error)
    let status = blockade()
        .args(["rates-linear", "--no-such-flag"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // nonsensical grid bounds
    let cfg_path = dir.path().join("grid.toml");
    fs::write(&cfg_path, "[grid]\nmin_abs = 1e-2\nmax_abs = 1e-6\n").unwrap();
    let status = blockade()
        .args(["spectrum-g2", "--config"])
        .arg(&cfg_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // degenerate linear scan
    let status = blockade()
        .args(["rates-linear", "--span", "-3", "--points", "5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_two() {
    // a cutoff far too small for the requested drive trips the truncation guard
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gt.csv");
    let status = blockade()
        .args([
            "g2-tau",
            "--fock-cutoff",
            "3",
            "--eps-p",
            "1.0",
            "--points",
            "5",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn linewidth_writes_the_classical_side_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.toml");
    fs::write(
        &cfg_path,
        r#"
[grid]
points_per_side = 8
"#,
    )
    .unwrap();
    let out = dir.path().join("lw.csv");
    let status = blockade()
        .args(["linewidth", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let (headers, _) = read_rows(&out);
    assert_eq!(
        headers,
        [
            "delta_prime",
            "shift",
            "kappa_a_lin",
            "eta",
            "kappa_a_nonlin"
        ]
    );
    let (cheaders, crows) = read_rows(&dir.path().join("lw_classical.csv"));
    assert_eq!(cheaders[0], "delta_omega_bare_rad_s");
    assert_eq!(crows.len(), 1);
    // the dispersion narrows the line
    assert!(crows[0][1] < crows[0][0]);
}
