use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
mass_amu = 11.5

[grid]
r_min = 2.0
r_max = 10.0
n = 128
units = "angstrom"

[curves.x]
kind = "harmonic"
omega_cm1 = 150.0
r_eq_angstrom = 3.0

[curves.a]
kind = "morse"
depth_cm1 = 8000.0
omega_e_cm1 = 120.0
r_eq_angstrom = 3.6

[curves.pi]
kind = "harmonic"
omega_cm1 = 100.0
r_eq_angstrom = 4.5
offset_cm1 = 10.0

[drive]
delta1_cm1 = 2010.0
delta2_cm1 = -2010.0

[drive.pulse1]
omega_cm1 = 200.0
center_ps = 0.6
width_ps = 0.3

[drive.pulse2]
omega_cm1 = 200.0
center_ps = 0.4
width_ps = 0.3

[initial]
well = "left"
nu = 0

[propagation]
dt_fs = 1.0
t_start_ps = 0.0
t_end_ps = 1.0
record_stride = 10

[outputs]
lip_energies = true

[analysis]
lip_sampling_ps = 0.1
"#;

fn lipdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipdyn")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn run_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out_dir = dir.path().join("out");
    let out = lipdyn(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("dominant state: (left, 0)"), "{stdout}");
    for f in ["populations.csv", "lip_energies.csv", "events.csv", "density.bin", "transfer_report.csv", "config_echo.toml", "metadata.toml"] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }
}

#[test]
fn quiet_run_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = lipdyn(&["run", &cfg, "--quiet", "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&lipdyn(&["run", &cfg, "--quiet", "--threads", "1", "--out", a.to_str().unwrap()])), 0);
    assert_eq!(code(&lipdyn(&["run", &cfg, "--quiet", "--threads", "3", "--out", b.to_str().unwrap()])), 0);
    for f in ["populations.csv", "lip_energies.csv", "events.csv", "transfer_report.csv", "final_weights.csv", "density.bin"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn dt_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let o = dir.path().join("o");
    assert_eq!(code(&lipdyn(&["run", &cfg, "--quiet", "--dt", "0.5", "--out", o.to_str().unwrap()])), 0);
    let echo = fs::read_to_string(o.join("config_echo.toml")).unwrap();
    assert!(echo.contains("dt_fs = 0.5"), "{echo}");
    let rows = fs::read_to_string(o.join("populations.csv")).unwrap().lines().count();
    // record_stride counts steps, so halving dt doubles the sampling density
    assert_eq!(rows, 1 + 201);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &CONFIG.replace("nu = 0", "nu = 0\nspin = 1"));
    let out = lipdyn(&["run", &cfg]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("spin"));
    let missing = lipdyn(&["run", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = lipdyn(&["eigen", &cfg, "--surface", "A", "--count", "100000"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unwritable_output_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = lipdyn(&["run", &cfg, "--quiet", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn boundary_contamination_exits_with_five() {
    let dir = tempfile::tempdir().unwrap();
    let text = CONFIG.replace("r_min = 2.0", "r_min = 2.8").replace("[analysis]", "[analysis]\nprojection_count = 1")
        .replace("lip_energies = true", "lip_energies = false");
    let cfg = write_config(dir.path(), &text);
    let o = dir.path().join("o");
    let out = lipdyn(&["run", &cfg, "--quiet", "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("boundary"));
    assert!(o.join("populations.csv").is_file());
}

#[test]
fn eigen_lists_ascending_energies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let o = dir.path().join("e");
    let out = lipdyn(&["eigen", &cfg, "--surface", "X", "--count", "7", "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let energies: Vec<f64> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(energies.len(), 7);
    assert!(energies.windows(2).all(|w| w[0] < w[1]));
    assert!((energies[0] - 75.0).abs() < 1e-3, "{energies:?}");
    let csv = fs::read_to_string(o.join("energies.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("index,E_cm1"));
    assert!(o.join("states.csv").is_file());
    assert_eq!(code(&lipdyn(&["eigen", &cfg, "--surface", "active@0.5", "--count", "3", "--quiet"])), 0);
    assert_eq!(code(&lipdyn(&["eigen", &cfg, "--surface", "B"])), 2);
}

#[test]
fn lip_writes_surfaces_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let o = dir.path().join("l");
    let out = lipdyn(&["lip", &cfg, "--times", "0,0.5", "--quiet", "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let surfaces = fs::read_to_string(o.join("lip_surfaces.csv")).unwrap();
    assert_eq!(surfaces.lines().count(), 1 + 128);
    let energies = fs::read_to_string(o.join("lip_energies.csv")).unwrap();
    assert_eq!(energies.lines().count(), 1 + 11);
    assert!(o.join("lip_states.csv").is_file());
    assert!(!o.join("populations.csv").exists());
}

#[test]
fn scan_writes_ordered_table() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), CONFIG);
    let scan = dir.path().join("scan.toml");
    fs::write(
        &scan,
        "base = \"scenario.toml\"\nobjective = \"final_population_pi\"\n\n[[axes]]\npath = \"drive.delta2_cm1\"\nvalues = [-2010.0, -1990.0, -1970.0]\n",
    )
    .unwrap();
    let o = dir.path().join("s");
    let run = |threads: &str, o: &Path| lipdyn(&["scan", scan.to_str().unwrap(), "--quiet", "--threads", threads, "--out", o.to_str().unwrap()]);
    assert_eq!(code(&run("2", &o)), 0);
    let table = fs::read_to_string(o.join("scan.csv")).unwrap();
    let first: Vec<&str> = table.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(first.len(), 3);
    let values: Vec<f64> = first.iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(values, [-2010.0, -1990.0, -1970.0]);
    let serial = dir.path().join("s1");
    assert_eq!(code(&run("1", &serial)), 0);
    assert_eq!(table, fs::read_to_string(serial.join("scan.csv")).unwrap());
}
