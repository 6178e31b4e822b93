use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nearrack")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

#[test]
fn enumerates_the_dihedral_near_rack() {
    for file in ["dihedral3.json", "dihedral-rack.json"] {
        let o = run(&["enum-near-racks", &data(file)]);
        assert!(o.status.success());
        assert!(stdout(&o).starts_with("1 class: tau=(2,3)\n"), "{}", stdout(&o));
    }
}

#[test]
fn verify_reports_and_fails_on_broken_solutions() {
    let o = run(&["verify", &data("dihedral3.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("near-rack: yes"));
    let o = run(&["verify", &data("not-braided.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("braid relation fails"));
}

#[test]
fn derive_prints_the_rack_table() {
    let o = run(&["--json", "derive", &data("dihedral3.json")]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rack"], serde_json::json!([[1, 3, 2], [3, 2, 1], [2, 1, 3]]));
}

#[test]
fn solves_coefficients() {
    let o = run(&["--json", "solve-coefficients", &data("dihedral3.json")]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["free"].as_array().unwrap().len(), 3);
    assert_eq!(v["torsion"], serde_json::json!(["eps1[3]"]));
    let o = run(&["solve-coefficients", "--conditions-only", &data("two-dim.json")]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("no conditions"));
}

#[test]
fn twists_the_two_dimensional_braiding() {
    let o = run(&["t-equiv", &data("two-dim.json")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("tau: (1,2)"));
    assert!(text.contains("verified at the default point: yes"));
}

#[test]
fn nichols_totals_and_budget() {
    let file = data("two-dim.json");
    let o = run(&["nichols", &file, "--R", "a=1,e=zeta3^2,b=zeta3", "--cutoff", "12", "--mode", "exact"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("total: 27\n"));
    let o = run(&["nichols", &file, "--R", "a=1,e=1,b=zeta3", "--cutoff", "8"]);
    assert!(stdout(&o).contains("total: 9\n"));
    let cfg = std::env::temp_dir().join(format!("nearrack-budget-{}.toml", std::process::id()));
    std::fs::write(&cfg, "max_words = 10\ncutoff = 6\n").unwrap();
    let o = run(&["nichols", &file, "--R", "a=1,e=1,b=zeta3", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "budget");
    // the cutoff flag wins over the file
    let o = run(&["nichols", &file, "--R", "a=1,e=1,b=zeta3", "--config", cfg.to_str().unwrap(), "--cutoff", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("dims: 1 2 3"));
    std::fs::remove_file(cfg).ok();
}

#[test]
fn gdd_of_the_twisted_braiding() {
    let o = run(&["gdd", &data("two-dim.json")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "(1) b\n(2) b\n(1) --[a * e]-- (2)\ntau-symmetric: yes\n");
    let o = run(&["gdd", &data("two-dim.json"), "--format", "dot"]);
    assert!(stdout(&o).starts_with("graph gdd {"));
}

#[test]
fn classify_names_the_diagram() {
    let o = run(&["classify", &data("cartan-a2.json")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Cartan A (rank 2)"));
    assert!(stdout(&o).contains("dim=27"));
}

#[test]
fn fixtures_run_selected_and_all() {
    let o = run(&["fixtures", "run", "--id", "dihedral3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1 passed, 0 with known failures, 0 failed"));
    let o = run(&["fixtures", "run"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains(" FAIL "));
    let o = run(&["fixtures", "run", "--id", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_are_json_on_stderr() {
    for args in [vec!["bogus"], vec!["verify", "/nonexistent/file.json"], vec!["nichols", "x", "--mode", "fast"]] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_json(&o)["error"], "usage");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [vec!["--json", "fixtures", "run"], vec!["solve-coefficients", "x"]] {
        let args: Vec<String> = args.iter().map(|a| if *a == "x" { data("dihedral3.json") } else { a.to_string() }).collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
}
