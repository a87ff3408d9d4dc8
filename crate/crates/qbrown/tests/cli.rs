use std::path::Path;
use std::process::{Command, Output};

const FREE: &str = r#"
[particle]
mass = 1.0
gamma = 1.0

[environment]
kind = "non_thermal"
energy = 1.0

[kernel]
t_c = 0.5

[run]
scenario = "classical_noninertial_free"

[run.time_grid]
min = 0.5
max = 2.0
points = 4

[run.sde]
dt = 0.01
t_end = 2.0
n_paths = 2000
seed = 17
"#;

const QUANTUM: &str = r#"
[particle]
mass = 1e-26
gamma = 1e12

[environment]
kind = "oscillator_bath"
omega = 1e13
temperature = 10.0

[kernel]
t_c = 1e-13

[initial]
kind = "minimal_gaussian"
a = 1e-14

[run]
scenario = "quantum_smoluchowski_free"

[run.time_grid]
min = 1e-16
max = 1e-10
points = 50
spacing = "log"
"#;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_qbrown")).args(args).arg("--config").arg(&path).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(|s| s.split('(').next().unwrap().to_string()).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i]).collect()
}

#[test]
fn simulate_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = stdout(&run(dir.path(), FREE, &["simulate", "--threads", "1"]));
    let b = stdout(&run(dir.path(), FREE, &["simulate", "--threads", "3"]));
    assert_eq!(a, b);
    assert!(a.starts_with("# provenance"));
}

#[test]
fn misspelled_key_is_rejected_by_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &FREE.replace("mass = 1.0", "masss = 1.0\nmass = 1.0"), &["moments"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("particle.masss"));
}

#[test]
fn quantum_smoluchowski_product_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let (h, rows) = csv_rows(&stdout(&run(dir.path(), QUANTUM, &["moments"])));
    let xp = column(&h, &rows, "heisenberg_product");
    assert_eq!(xp.len(), 50);
    for v in xp {
        assert!((v / (qbrown::HBAR / 2.0) - 1.0).abs() < 1e-12, "{v}");
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let (_, rows) = csv_rows(&stdout(&run(dir.path(), FREE, &["simulate"])));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&run(dir.path(), FREE, &["simulate", "--format", "json"]))).unwrap();
    let jrows = json["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (c, j) in rows.iter().zip(jrows) {
        let j = j.as_array().unwrap();
        assert_eq!(c.len(), j.len());
        for (a, b) in c.iter().zip(j) {
            match b.as_f64() {
                Some(b) => assert_eq!(a.to_bits(), b.to_bits()),
                None => assert!(a.is_nan()),
            }
        }
    }
    assert_eq!(json["provenance"]["seed"], 17);
}

#[test]
fn empty_sweep_fails() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{FREE}\n[run.sweep]\nparameter_path = \"kernel.t_c\"\nvalues = []\nmode = \"analytic\"\n");
    let o = run(dir.path(), &text, &["sweep"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn t_c_sweep_emits_one_block_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{FREE}\n[run.sweep]\nparameter_path = \"kernel.t_c\"\nvalues = [0.1, 0.5, 2.0]\nmode = \"analytic\"\n"
    );
    let (h, rows) = csv_rows(&stdout(&run(dir.path(), &text, &["sweep"])));
    assert_eq!(h[0], "sweep_value");
    assert_eq!(rows.len(), 12);
    let sv = column(&h, &rows, "sweep_value");
    assert_eq!(&sv[..4], &[0.1; 4]);
    assert_eq!(&sv[8..], &[2.0; 4]);
    // longer correlation time suppresses early spreading
    let x = column(&h, &rows, "X");
    assert!(x[0] > x[4] && x[4] > x[8]);
}

#[test]
fn lambda_sweep_recovers_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[particle]
mass = 1.0
gamma = 1.0

[environment]
kind = "non_thermal"
energy = 1.0

[kernel]
t_c = 1.0
lambda = 2.0

[run.time_grid]
min = 50.0
max = 2000.0
points = 20
spacing = "log"

[run.sde]
dt = 0.025
t_end = 2000.0
n_paths = 400
seed = 3
dynamics = "noninertial"
fit_window = [50.0, 2000.0]

[run.sweep]
parameter_path = "kernel.lambda"
values = [2.0, 3.0, 4.0]
mode = "simulate"
"#;
    let (h, rows) = csv_rows(&stdout(&run(dir.path(), text, &["sweep"])));
    let sv = column(&h, &rows, "sweep_value");
    let fit = column(&h, &rows, "lambda_hat");
    for lambda in [2.0, 3.0, 4.0] {
        let i = sv.iter().position(|&v| v == lambda).unwrap();
        assert!((fit[i] / lambda - 1.0).abs() < 0.05, "lambda {lambda}: {}", fit[i]);
    }
}

#[test]
fn width_bound_violation_is_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[particle]
mass = 1.0
gamma = 1.0

[environment]
kind = "non_thermal"
energy = 1.0

[kernel]
t_c = 0.5

[run.rates]
formula = "quantum_noninertial"
omega_a = 1.0
omega_b = 1.0
delta_V = 2.0
a_param = 1e40
"#;
    let o = run(dir.path(), text, &["rates"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn anomalous_quantum_scenario_is_unsupported() {
    let dir = tempfile::tempdir().unwrap();
    let text = QUANTUM.replace("t_c = 1e-13", "t_c = 1e-13\nlambda = 2.0");
    let o = run(dir.path(), &text, &["moments"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    let o = run(dir.path(), FREE, &["moments", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let printed = stdout(&run(dir.path(), FREE, &["moments"]));
    assert_eq!(std::fs::read_to_string(out).unwrap(), printed);
}
