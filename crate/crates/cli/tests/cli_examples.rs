use std::process::{Command, Output};

use qtqft_cli::CliError;

fn qtqft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtqft"))
        .args(args)
        .env_remove("QTQFT_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn verlinde_of_the_projective_line() {
    // Gr(1,2) = P^1: two points, so V_g = 2^g.
    for (g, want) in [(1, "2"), (2, "4"), (3, "8")] {
        let o = qtqft(&["--r", "1", "--s", "1", "verlinde", &g.to_string()]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), want);
    }
}

#[test]
fn classical_pieri_product() {
    let o = qtqft(&["--r", "2", "--s", "2", "product", "1,0", "1,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "s(1,1) + s(2,0)");

    let o = qtqft(&["--r", "2", "--s", "2", "--json", "product", "1", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let want = serde_json::json!([
        { "partition": [1, 1], "laurent": { "0": "1" } },
        { "partition": [2, 0], "laurent": { "0": "1" } },
    ]);
    assert_eq!(v["product"], want);
    assert_eq!((v["r"].as_u64(), v["s"].as_u64()), (Some(2), Some(2)));
}

#[test]
fn quantum_product_carries_q() {
    // σ_1 * σ_{2,1} in Gr(2,4): classical part σ_{2,2}, quantum part q·σ_∅.
    let o = qtqft(&["--r", "2", "--s", "2", "product", "1", "2,1"]);
    assert_eq!(stdout(&o).trim(), "q*s(0,0) + s(2,2)");
    let o = qtqft(&["--r", "2", "--s", "2", "--q-at-one", "product", "1", "2,1"]);
    assert_eq!(stdout(&o).trim(), "s(0,0) + s(2,2)");
}

#[test]
fn fast_check_suite_passes() {
    let o = qtqft(&["--r", "2", "--s", "2", "check", "--suite", "fast"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let last = stdout(&o).lines().last().unwrap().to_string();
    assert!(last.contains("0 failed"), "{last}");
    assert!(!stdout(&o).contains("[FAIL]"));
}

#[test]
fn check_report_json_lists_every_invariant() {
    let o = qtqft(&["--r", "1", "--s", "2", "--json", "check"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(v["failed"], 0);
    assert_eq!(checks.len() as u64, v["passed"].as_u64().unwrap());
    assert!(checks.iter().all(|c| c["deviation"].is_number() && c["passed"] == true));
}

#[test]
fn negative_degrees_are_accepted() {
    // P^1, genus 0, d = −1: counit(σ_1) = 1 at q^0.
    let o = qtqft(&["--r", "1", "--s", "1", "closed", "0", "-1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1");
    let o = qtqft(&["--r", "1", "--s", "1", "gw", "0", "-1"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn gw_three_point_line_count() {
    // Two points in P^2 are joined by one line: ⟨σ_2, σ_2, σ_1⟩ at d = 1 is q.
    let o = qtqft(&["--r", "1", "--s", "2", "gw", "0", "0", "2", "2", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "q");
}

#[test]
fn holla_matches_exact_count() {
    let o = qtqft(&["--r", "2", "--s", "2", "--json", "holla", "3", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], "224");
    assert!((v["spectral"].as_f64().unwrap() - 224.0).abs() < 1e-6);
}

#[test]
fn argument_errors_exit_one_with_distinct_messages() {
    let cases: [(&[&str], &str); 5] = [
        (&["frobnicate"], "unrecognized subcommand"),
        (&["product", "1,x", "1"], "invalid partition syntax"),
        (&["product", "3", "1"], "not a partition in the 2x2 box"),
        (&["--max-entries", "10", "tensor", "0", "0", "2", "2"], "above the cap of 10"),
        (&["holla", "2", "5"], "gamma 5"),
    ];
    for (args, needle) in cases {
        let o = qtqft(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
    let o = qtqft(&["--r", "0", "verlinde", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let o = qtqft(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verlinde"));
}

#[test]
fn integrity_errors_map_to_exit_two() {
    assert_eq!(CliError::Core(qtqft_core::Error::Integrity("x".into())).exit_code(), 2);
    assert_eq!(CliError::Integrity("x".into()).exit_code(), 2);
    assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    assert_eq!(CliError::Core(qtqft_core::Error::ResourceCap { entries: 2, cap: 1 }).exit_code(), 1);
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = qtqft_cli::run(["qtqft", "--r", "1", "--s", "1", "verlinde", "2"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), "4\n");
}
