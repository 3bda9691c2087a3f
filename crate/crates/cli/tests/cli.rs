use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use vfcfc_cli::config::ScenarioConfig;
use vfcfc_core::presets::preset;

fn vfcfc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vfcfc"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn nominal_preset_writes_full_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfcfc(
        &["run", "--preset", "pvtol_p1_nominal", "--out-dir", "res"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));

    let res = dir.path().join("res");
    let mut reader = csv::Reader::from_path(res.join("pvtol_p1_nominal_trajectory.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "t",
            "q1",
            "q2",
            "q3",
            "qdot1",
            "qdot2",
            "qdot3",
            "w",
            "tau1",
            "tau2",
            "beta_norm",
            "phi_norm",
            "dist_hgh",
            "dist_phys"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 30001);
    let mantissa = rows[1][1]
        .split('e')
        .next()
        .unwrap()
        .replace(['-', '.'], "");
    assert!(mantissa.len() >= 12, "{}", &rows[1][1]);
    let t_end: f64 = rows[30000][0].parse().unwrap();
    assert!((t_end - 30.0).abs() < 1e-9);

    let metrics: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(res.join("pvtol_p1_nominal_metrics.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(metrics["samples"], 30001);
    assert!(metrics["terminal"]["beta_norm"].as_f64().unwrap() < 1e-3);
    assert!(metrics["bound"].is_null());

    let svg = fs::read_to_string(res.join("pvtol_p1_nominal_path.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["a", "b"] {
        let out = vfcfc(
            &[
                "run",
                "--preset",
                "pvtol_p2_adaptive_robust",
                "--duration",
                "2",
                "--out-dir",
                sub,
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{}", text(&out.stderr));
    }
    for file in [
        "pvtol_p2_adaptive_robust_trajectory.csv",
        "pvtol_p2_adaptive_robust_metrics.json",
        "pvtol_p2_adaptive_robust_path.svg",
    ] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert!(a == b, "{file} differs");
    }
}

#[test]
fn exported_presets_run_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfcfc(&["list-presets", "--out-dir", "cfg"], dir.path());
    assert!(out.status.success());
    assert!(text(&out.stdout).contains("manipulator_p5_adaptive_robust"));

    let path = dir.path().join("cfg/pvtol_p3_adaptive_robust.toml");
    let cfg = ScenarioConfig::load(&path).unwrap();
    assert_eq!(
        cfg.to_spec().unwrap(),
        preset("pvtol_p3_adaptive_robust").unwrap()
    );

    let out = vfcfc(
        &[
            "run",
            "--config",
            "cfg/pvtol_p3_adaptive_robust.toml",
            "--duration",
            "1",
            "--step",
            "0.01",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    let csv = fs::read_to_string(
        dir.path()
            .join("out/pvtol_p3_adaptive_robust_trajectory.csv"),
    )
    .unwrap();
    assert_eq!(csv.lines().count(), 1 + 101);
    let metrics =
        fs::read_to_string(dir.path().join("out/pvtol_p3_adaptive_robust_metrics.json")).unwrap();
    assert!(metrics.contains("\"dbar\""));
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let spec = preset("pvtol_p1_nominal").unwrap();
    let good = ScenarioConfig::from(&spec).to_toml();
    fs::write(
        dir.path().join("bad.toml"),
        good.replace("kappa = 5.0", "kappa = \"five\""),
    )
    .unwrap();
    let out = vfcfc(&["run", "--config", "bad.toml"], dir.path());
    assert!(!out.status.success());
    let err = text(&out.stderr);
    assert!(err.contains("kappa"), "{err}");

    fs::write(
        dir.path().join("typo.toml"),
        good.replace("eps_dz", "eps_deadzone"),
    )
    .unwrap();
    let out = vfcfc(&["run", "--config", "typo.toml"], dir.path());
    assert!(!out.status.success());
    assert!(text(&out.stderr).contains("eps_deadzone"));
}

#[test]
fn unknown_path_lists_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let spec = preset("pvtol_p1_nominal").unwrap();
    let toml = ScenarioConfig::from(&spec)
        .to_toml()
        .replace("name = \"sinusoid\"", "name = \"spiral\"");
    fs::write(dir.path().join("spiral.toml"), toml).unwrap();
    let out = vfcfc(
        &["check-assumptions", "--config", "spiral.toml"],
        dir.path(),
    );
    assert!(!out.status.success());
    let err = text(&out.stderr);
    for name in [
        "sinusoid",
        "cassini",
        "lemniscate",
        "cylinder_intersection",
        "torus_knot",
    ] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn certificates_for_pvtol_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfcfc(
        &["check-assumptions", "--preset", "pvtol_p1_adaptive_robust"],
        dir.path(),
    );
    assert!(out.status.success());
    let report = text(&out.stdout);
    assert!(report.contains("lambda_low = 1.000000e0"), "{report}");
    assert!(report.contains("rho_w = -2.307692e-1"), "{report}");
    assert!(report.contains("max_residual = 0.000000e0"), "{report}");
}

#[test]
fn conventional_constraint_certificate_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfcfc(
        &["check-assumptions", "--preset", "ccfc_cassini_demo"],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(text(&out.stdout).contains("probe_residual = 3.600000e1"));
}

#[test]
fn manipulator_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfcfc(
        &[
            "check-assumptions",
            "--preset",
            "manipulator_p5_adaptive_robust",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stdout));

    // the cylinder intersection leaves the arm's reach
    let out = vfcfc(
        &[
            "check-assumptions",
            "--preset",
            "manipulator_p4_adaptive_robust",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(text(&out.stdout).contains("reach"));
}

#[test]
fn missing_selection_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfcfc(&["run"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
