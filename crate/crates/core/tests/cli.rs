use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use photonmix::cli::CsvTable;
use photonmix::TransverseMode;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_photonmix"));
    c.env_remove("PHOTONMIX_QUAD_ORDER");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let path = dir.path().join("scenario.conf");
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout_table(out: &Output) -> CsvTable {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    CsvTable::parse(&String::from_utf8(out.stdout.clone()).unwrap()).unwrap()
}

#[test]
fn every_subcommand_emits_a_table() {
    let cases = [
        ("point-scan", "point_scan.conf", vec!["x2", "lo_term", "het_term", "total"], 121),
        ("misalignment", "hom_misalignment.conf", vec!["x_d", "total"], 141),
        ("visibility", "visibility_sweep.conf", vec!["alpha_sq", "visibility", "depth"], 20),
        ("array", "array_tem10.conf", vec!["x_m", "y_m", "w2m"], 64),
    ];
    for (cmd, file, header, rows) in cases {
        let t = stdout_table(&run(&[cmd, "--config", config(file).to_str().unwrap()]));
        assert_eq!(t.header, header, "{cmd}");
        assert_eq!(t.rows.len(), rows, "{cmd}");
        assert_eq!(t.get_meta("photonmix"), Some(cmd));
    }
}

#[test]
fn array_then_reconstruct_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("array.csv");
    let cfg = config("array_tem10_clean.conf");
    let out = run(&["array", "--config", cfg.to_str().unwrap(), "--out", data.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let t = stdout_table(&run(&[
        "reconstruct",
        "--config",
        cfg.to_str().unwrap(),
        "--input",
        data.to_str().unwrap(),
    ]));
    let truth = TransverseMode::centered(1, 0, 1.0).unwrap();
    let (xs, ys, us) = (t.column("x_m").unwrap(), t.column("y_m").unwrap(), t.column("u_ph_est").unwrap());
    for i in 0..xs.len() {
        assert!((us[i] - truth.eval(xs[i], ys[i])).abs() <= 1e-6);
    }
    assert!(t.get_meta("residual").unwrap().parse::<f64>().unwrap() <= 1e-12);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = config("array_tem10.conf");
    let a = run(&["array", "--config", cfg.to_str().unwrap()]);
    let b = run(&["array", "--config", cfg.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["array", "--config", cfg.to_str().unwrap(), "--seed", "99"]);
    assert_ne!(a.stdout, c.stdout);
    let d = run(&["array", "--config", cfg.to_str().unwrap(), "--seed", "99"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.conf");
    assert_eq!(run(&["misalignment", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let cases = [
        "lo_state.kind = fock\nlo_mode.wiast = 1\n",
        "lo_state.kind = fock\nphoton_mode.waist = -1\n",
        "lo_state.kind = squeezed\n",
        "lo_state.kind = fock\nlo_state.kind = fock\n",
        "photon_mode.waist = 1\n",
        "lo_state.kind = fock\nscan.parameter = x_d\nscan.start = 0\nscan.stop = 1\nscan.count = 0\n",
        "lo_state.kind = fock\nbeam_splitter.preset = custom\nbeam_splitter.s11 = 1, 0\nbeam_splitter.s12 = 1, 0\nbeam_splitter.s21 = 0, 0\nbeam_splitter.s22 = 1, 0\n",
    ];
    for body in cases {
        let cfg = write_config(&dir, body);
        let out = run(&["point-scan", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{body}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }

    let cfg = write_config(&dir, "lo_state.kind = fock\n");
    let out = bin()
        .env("PHOTONMIX_QUAD_ORDER", "many")
        .args(["misalignment", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    // Vacuum LO: the plateau is zero, so visibility is undefined.
    let cfg = write_config(&dir, "lo_state.kind = fock\nlo_state.n = 0\n");
    let out = run(&["visibility", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    // Reference aperture on the nodal line of a TEM10 LO.
    let cfg = write_config(&dir, "lo_state.kind = fock\nlo_mode.order_x = 1\narray.ref_x = 0\n");
    let out = run(&["array", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fock_visibility_is_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "lo_state.kind = fock\nlo_state.n = 1\n");
    let t = stdout_table(&run(&["visibility", "--config", cfg.to_str().unwrap()]));
    assert_eq!(t.rows.len(), 1);
    assert!((t.rows[0][1] - 1.0).abs() < 1e-9);
}

#[test]
fn quadrature_order_can_be_overridden() {
    let cfg = config("hom_misalignment.conf");
    let out = bin()
        .env("PHOTONMIX_QUAD_ORDER", "96")
        .args(["misalignment", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    let t = stdout_table(&out);
    assert_eq!(t.get_meta("quadrature_order"), Some("96"));
    let base = stdout_table(&run(&["misalignment", "--config", cfg.to_str().unwrap()]));
    for (a, b) in t.rows.iter().zip(&base.rows) {
        assert!((a[1] - b[1]).abs() < 1e-9);
    }
}

#[test]
fn reconstruct_rejects_malformed_measurement() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    std::fs::write(&data, "# ref_x=0.7\n# ref_y=0\n# n_mean=1\nx_m,y_m,w2m\n0,0,oops\n").unwrap();
    let cfg = config("array_tem10_clean.conf");
    let out = run(&["reconstruct", "--config", cfg.to_str().unwrap(), "--input", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));
}
