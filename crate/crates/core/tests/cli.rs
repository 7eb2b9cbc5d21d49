use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use deltaprop::config::RunConfig;
use deltaprop::kernels::spectral::general_kernel;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deltaprop"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("deltaprop-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn rows(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let data = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, data)
}

#[test]
fn uncoupled_two_level_kernel_has_no_off_diagonal() {
    let dir = scratch("v0");
    let cfg = dir.join("k.toml");
    std::fs::write(
        &cfg,
        "natural_units = true\n[system]\nconfiguration = \"two-level\"\ncouplings = [0.0]\nxi = 0.5\n\
         [grid]\nx_min = -2.0\nx_max = 2.0\nn_points = 9\ntimes = [0.3, 1.0]\n",
    )
    .unwrap();
    let out = run(&["kernel", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, data) = rows(&out);
    assert_eq!(data.len(), 2 * 9 * 9);
    for name in ["re_K_12", "im_K_12", "re_K_21", "im_K_21"] {
        let c = header.iter().position(|h| h == name).unwrap();
        assert!(data.iter().all(|r| r[c] == 0.0), "{name}");
    }
}

#[test]
fn star_kernel_file_matches_spectral_oracle() {
    let path = configs().join("kernel_star5.toml");
    let out = run(&["kernel", "--config", path.to_str().unwrap()]);
    assert!(out.status.success());
    let (_, data) = rows(&out);
    let sys = RunConfig::load(&path).unwrap().laser_system().unwrap();
    assert_eq!(data.len(), 2 * 5 * 4);
    for r in &data {
        let k = general_kernel(&sys, r[0], r[2], r[1], 0.0).unwrap();
        let scale = k.max_abs();
        for i in 0..5 {
            for j in 0..5 {
                let c = 3 + 2 * (5 * i + j);
                let e = k.get(i, j);
                assert!((r[c] - e.re).abs() <= 1e-12 * scale && (r[c + 1] - e.im).abs() <= 1e-12 * scale);
            }
        }
    }
}

#[test]
fn malformed_config_names_the_key() {
    let dir = scratch("bad");
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "[beam]\nvelocty = 0.01\n").unwrap();
    let out = run(&["shutter", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("velocty"));
}

#[test]
fn unknown_configuration_is_a_validation_error() {
    let dir = scratch("conf");
    let cfg = dir.join("c.toml");
    std::fs::write(
        &cfg,
        "[system]\nconfiguration = \"triangle\"\ncouplings = [1.0]\nxi = 1e-5\n\
         [grid]\nx_min = 0.0\nx_max = 1e-5\nn_points = 2\ntimes = [1e-3]\n",
    )
    .unwrap();
    let out = run(&["kernel", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle"));
}

#[test]
fn non_positive_time_is_rejected() {
    let dir = scratch("time");
    let cfg = dir.join("t.toml");
    std::fs::write(
        &cfg,
        "natural_units = true\n[system]\nconfiguration = \"two-level\"\ncouplings = [1.0]\nxi = 0.0\n\
         [grid]\nx_min = 0.0\nx_max = 1.0\nn_points = 2\ntimes = [0.0]\n",
    )
    .unwrap();
    assert_eq!(run(&["kernel", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn unknown_subcommand_and_figure_fail_validation() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["figure", "fig9"]).status.code(), Some(1));
    assert_eq!(run(&["shutter"]).status.code(), Some(1));
}

#[test]
fn shutter_output_is_byte_stable() {
    let path = configs().join("shutter_fig3.toml");
    let a = run(&["shutter", "--config", path.to_str().unwrap()]);
    let b = run(&["shutter", "--config", path.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (header, data) = rows(&a);
    assert_eq!(header, ["x", "t", "rho_1", "rho_2", "rho_total", "rho_free"]);
    assert_eq!(data.len(), 801);
    // SI axes.
    assert_eq!(data[0][0], -1e-4);
    assert_eq!(data[0][1], 0.05);
}

#[test]
fn natural_units_flag_bypasses_si() {
    let path = configs().join("packet_fig6.toml");
    let dir = scratch("nat");
    let cfg = dir.join("p.toml");
    let text = std::fs::read_to_string(&path).unwrap();
    // Same packet in natural units: L = 50, q = k, t in units of m·(1 μm)²/ħ.
    let k = 13.684801971149206;
    let tau = 0.1 / 1.3684801971149206e-3;
    let nat = text
        .replace("couplings = [0.01]", &format!("couplings = [{k}]"))
        .replace("couplings_as_velocity = true\n", "")
        .replace("xi = 1e-4", "xi = 100.0")
        .replace("length = 5e-5", "length = 50.0")
        .replace("velocity = 0.01", &format!("velocity = {k}"))
        .replace("x_min = -1.1e-3", "x_min = -1100.0")
        .replace("x_max = 1.3e-3", "x_max = 1300.0")
        .replace("times = [0.1]", &format!("times = [{tau}]"));
    std::fs::write(&cfg, nat).unwrap();
    let si = rows(&run(&["wavepacket", "--config", path.to_str().unwrap()])).1;
    let out = run(&["wavepacket", "--natural-units", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let natural = rows(&out).1;
    assert_eq!(si.len(), natural.len());
    for (a, b) in si.iter().zip(&natural) {
        assert!((a[0] * 1e6 - b[0]).abs() <= 1e-9 * b[0].abs().max(1.0));
        // Probability per metre against per micrometre.
        assert!((a[4] * 1e-6 - b[4]).abs() <= 1e-9 * b[4].abs().max(1e-6), "{} {}", a[4], b[4]);
    }
}

#[test]
fn scatter_reports_the_quarter_point() {
    let path = configs().join("shutter_fig3.toml");
    let (header, data) = rows(&run(&["scatter", "--config", path.to_str().unwrap()]));
    assert_eq!(header, ["k", "r1", "r2", "t1", "t2", "total"]);
    for c in 1..5 {
        assert!((data[0][c] - 0.25).abs() <= 1e-12);
    }
}

#[test]
fn figure_writes_to_out_path() {
    let dir = scratch("fig");
    let path = dir.join("fig4.csv");
    let out = run(&["figure", "fig4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,t,rho_1,rho_2,rho_total,rho_free\n"));
}

#[test]
fn oracle_config_run_writes_convergence_table() {
    let path = configs().join("oracle_small.toml");
    let out = run(&["oracle", "--config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, data) = rows(&out);
    assert_eq!(header, ["sigma", "dt", "l2_error"]);
    assert_eq!(data.len(), 3);
    assert!(data[0][2] > data[1][2] && data[1][2] > data[2][2]);
}

fn copy_fixtures(to: &Path) {
    let from = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for e in std::fs::read_dir(from).unwrap() {
        let e = e.unwrap();
        std::fs::copy(e.path(), to.join(e.file_name())).unwrap();
    }
}

#[test]
fn specfun_suite_passes_on_pristine_fixtures() {
    let dir = scratch("fix-ok");
    copy_fixtures(&dir);
    let out = bin().args(["verify", "specfun"]).env("DELTAPROP_FIXTURES", &dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("suite,test,measured,tolerance,pass\n"));
}

#[test]
fn perturbed_fixture_fails_the_specfun_suite() {
    let dir = scratch("fix-bad");
    copy_fixtures(&dir);
    let grid = dir.join("faddeyeva_grid.csv");
    let text = std::fs::read_to_string(&grid).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut cells: Vec<String> = lines[1].split(',').map(String::from).collect();
    let re: f64 = cells[2].parse().unwrap();
    cells[2] = format!("{:e}", re * (1.0 + 1e-6));
    lines[1] = cells.join(",");
    std::fs::write(&grid, lines.join("\n") + "\n").unwrap();
    let out = bin().args(["verify", "specfun"]).env("DELTAPROP_FIXTURES", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("faddeyeva_vs_fixture_grid"));
}

#[test]
fn missing_fixtures_are_reported() {
    let dir = scratch("fix-none");
    let out = bin().args(["verify", "specfun"]).env("DELTAPROP_FIXTURES", &dir).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing fixture"));
}
