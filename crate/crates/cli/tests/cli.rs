//! End-to-end checks of the `aoinet` binary: exit codes, output format,
//! determinism, and the validate verdict on scenarios engineered to pass
//! or fail.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn aoinet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aoinet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Interference-free pair-less deployment; noise tuned so the direct link
/// succeeds with probability exp(-1e-10 * 200^4) on average-unit fading.
const NOISE_ONLY: &str = r#"
schema_version = 1

[network]
coverage_radius = 500.0
pr_distance = 200.0
eh_radius = 80.0
gz_radius = 120.0
st_density = 0.0
pair_distance = 20.0
access_probability = 0.5

[radio]
primary_power = 1.0
secondary_power = 1e-3
pathloss_exponent = 4.0
noise_power = 1.3946471958e-10
sinr_threshold = 1.0

[traffic]
policy = "fcfs"
arrival_rate = 0.2

[sim]
slots = 400000
replications = 2
seed = 11
"#;

/// Harvesting gated on actual data attempts starves the batteries, so the
/// measured charge rate falls far below the model that assumes a
/// continuously radiating source. Used to exercise the failing verdict.
const STARVED_HARVEST: &str = r#"
schema_version = 1

[network]
coverage_radius = 500.0
pr_distance = 200.0
eh_radius = 80.0
gz_radius = 120.0
st_density = 5e-5
pair_distance = 20.0
access_probability = 0.5
strict_harvest = true

[radio]
primary_power = 1.0
secondary_power = 1e-3
pathloss_exponent = 4.0
noise_power = 1e-10
sinr_threshold_db = 0.0

[traffic]
policy = "fcfs"
arrival_rate = 0.2

[sim]
slots = 60000
replications = 1
seed = 3
"#;

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn analyze_default_prints_reference_numbers() {
    let out = aoinet(&["analyze"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("policy=fcfs"), "{text}");
    assert!(text.contains("mu_p=0.84497020542"), "{text}");
    assert!(text.contains("throughput=0.0000207696966886"), "{text}");
    assert!(text.contains("mean_age=6.19694011925"), "{text}");
}

#[test]
fn analyze_policy_override_switches_formula() {
    let out = aoinet(&["analyze", "--policy", "gw"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("policy=gw"), "{text}");
    assert!(text.contains("mean_age=5.9173684088565"), "{text}");
}

#[test]
fn simulate_same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "noise.toml", NOISE_ONLY);
    let args = [
        "simulate",
        "--scenario",
        &scenario,
        "--slots",
        "5000",
        "--replications",
        "1",
    ];
    let first = aoinet(&args);
    let second = aoinet(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let mut reseeded_args = args.to_vec();
    reseeded_args.extend(["--seed", "9"]);
    let reseeded = aoinet(&reseeded_args);
    assert_eq!(exit_code(&reseeded), 0);
    assert_ne!(first.stdout, reseeded.stdout);

    let text = stdout_of(&first);
    assert!(text.contains("mean_age="), "{text}");
    assert!(text.contains("mu_p="), "{text}");
    assert!(text.contains("occupancy_3plus="), "{text}");
}

#[test]
fn simulate_trace_writes_one_row_per_slot() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "noise.toml", NOISE_ONLY);
    let trace = dir.path().join("trace.csv");
    let out = aoinet(&[
        "simulate",
        "--scenario",
        &scenario,
        "--slots",
        "500",
        "--replications",
        "2",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("slot,age,queue_len,"), "{header}");
    assert_eq!(lines.count(), 500, "one row per slot of the first replication");
}

#[test]
fn unknown_scenario_key_is_reported_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let broken = NOISE_ONLY.replace("access_probability", "access_probabillity");
    let scenario = write(dir.path(), "broken.toml", &broken);
    let out = aoinet(&["analyze", "--scenario", &scenario]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr_of(&out);
    assert!(err.contains("access_probabillity"), "{err}");
}

#[test]
fn bad_flag_is_usage_error() {
    let out = aoinet(&["analyze", "--frobnicate"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn missing_scenario_file_names_the_path() {
    let out = aoinet(&["analyze", "--scenario", "/no/such/file.toml"]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr_of(&out);
    assert!(err.contains("/no/such/file.toml"), "{err}");
}

#[test]
fn too_few_slots_is_config_error() {
    let out = aoinet(&["simulate", "--slots", "50"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_of(&out).contains("slots"), "{}", stderr_of(&out));
}

#[test]
fn validate_passes_on_noise_only_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "noise.toml", NOISE_ONLY);
    let out = aoinet(&["validate", "--scenario", &scenario]);
    let text = stdout_of(&out);
    assert_eq!(exit_code(&out), 0, "{text}");
    assert!(text.contains("verdict: PASS"), "{text}");
    assert!(text.contains("mu_p"), "{text}");
}

#[test]
fn validate_fails_when_model_assumption_is_broken() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "starved.toml", STARVED_HARVEST);
    let out = aoinet(&["validate", "--scenario", &scenario]);
    let text = stdout_of(&out);
    assert_eq!(exit_code(&out), 1, "{text}");
    assert!(text.contains("verdict: FAIL"), "{text}");
    assert!(
        text.lines()
            .any(|l| l.starts_with("FAIL") && l.contains("p_ch")),
        "{text}"
    );
}

#[test]
fn sweep_csv_is_deterministic_and_annotated() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "noise.toml", NOISE_ONLY);
    let sweep = write(
        dir.path(),
        "sweep.toml",
        r#"
schema_version = 1

[axis1]
param = "arrival_rate"
values = [0.1, 0.2, 0.3]
"#,
    );
    let out_path = dir.path().join("grid.csv");
    let args = [
        "sweep",
        "--scenario",
        &scenario,
        "--sweep",
        &sweep,
        "--out",
        out_path.to_str().unwrap(),
    ];
    let first = aoinet(&args);
    assert_eq!(exit_code(&first), 0, "{}", stderr_of(&first));
    let first_bytes = fs::read(&out_path).unwrap();

    let second = aoinet(&args);
    assert_eq!(exit_code(&second), 0);
    let second_bytes = fs::read(&out_path).unwrap();
    assert_eq!(first_bytes, second_bytes);

    let text = String::from_utf8(first_bytes).unwrap();
    assert!(text.starts_with('#'), "manifest comes first");
    let data_lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data_lines.len(), 4, "header plus three grid rows");
    assert!(data_lines[0].starts_with("arrival_rate,"), "{}", data_lines[0]);
    assert!(stderr_of(&first).contains("3 rows"), "{}", stderr_of(&first));
}

#[test]
fn shipped_default_scenario_matches_builtin() {
    let repo_root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let shipped = repo_root.join("scenarios/default.toml");
    let from_file = aoinet(&["analyze", "--scenario", shipped.to_str().unwrap()]);
    let builtin = aoinet(&["analyze"]);
    assert_eq!(exit_code(&from_file), 0, "{}", stderr_of(&from_file));
    assert_eq!(from_file.stdout, builtin.stdout);

    // The other shipped inputs must at least load and run.
    let noise = repo_root.join("scenarios/noise-only.toml");
    let out = aoinet(&[
        "analyze",
        "--scenario",
        noise.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("mu_p=0.79999999998"), "{}", stdout_of(&out));

    for sweep in ["access-probability.toml", "zone-radii.toml"] {
        let path = repo_root.join("scenarios/sweeps").join(sweep);
        let out = aoinet(&["sweep", "--sweep", path.to_str().unwrap()]);
        assert_eq!(exit_code(&out), 0, "{sweep}: {}", stderr_of(&out));
    }
}

#[test]
fn sweep_to_stdout_matches_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write(dir.path(), "noise.toml", NOISE_ONLY);
    let sweep = write(
        dir.path(),
        "sweep.toml",
        r#"
schema_version = 1

[axis1]
param = "access_probability"
linspace = { start = 0.1, stop = 0.9, count = 5 }
"#,
    );
    let out_path = dir.path().join("grid.csv");
    let to_file = aoinet(&[
        "sweep",
        "--scenario",
        &scenario,
        "--sweep",
        &sweep,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&to_file), 0);
    let to_stdout = aoinet(&["sweep", "--scenario", &scenario, "--sweep", &sweep]);
    assert_eq!(exit_code(&to_stdout), 0);
    assert_eq!(fs::read(&out_path).unwrap(), to_stdout.stdout);
}
