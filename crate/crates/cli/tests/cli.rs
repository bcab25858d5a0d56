use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smooth-moments"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn psi_prints_count() {
    let out = run(&["psi", "10", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "4\n");
}

#[test]
fn sieve_lists_members() {
    let out = run(&["sieve", "10", "3"]);
    assert_eq!(stdout(&out), "1\n2\n3\n4\n6\n8\n9\n");
}

#[test]
fn identities_print_exact_values_and_pass() {
    let out = run(&["identities", "13", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in ["eta = 3/38", "zeta = 1/228", "xi = 16/19", "3 - zeta = 683/228", "PASS"] {
        assert!(text.lines().any(|l| l == line), "missing {line:?} in\n{text}");
    }
}

#[test]
fn identities_fail_where_zeta_is_undefined() {
    let out = run(&["identities", "1", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn exact_moment_of_small_case() {
    let out = run(&["moment", "4", "4", "4", "--exact"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next(), Some("44"));
    let grid = run(&["moment", "4", "4", "4", "--grid", "7"]);
    let v: f64 = stdout(&grid).lines().next().unwrap().parse().unwrap();
    assert!((v - 44.0).abs() < 1e-9);
}

#[test]
fn energy_of_sidon_set() {
    let out = run(&["energy", "8", "2"]);
    assert_eq!(stdout(&out).lines().next(), Some("28"));
}

#[test]
fn expsum_at_zero_is_psi() {
    let out = run(&["expsum", "0", "100", "5"]);
    let text = stdout(&out);
    assert!(text.contains("modulus = 3.4000000000000000e1"), "{text}");
}

#[test]
fn arcs_classify_and_decompose() {
    let out = run(&["arcs", "classify", "1/3", "10", "100"]);
    assert_eq!(stdout(&out).lines().next(), Some("1/3"));
    let out = run(&["arcs", "decompose", "200", "200", "4", "opt", "--split", "thm2", "--k", "13"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let get = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((get("part1") + get("part2") - get("total")).abs() <= 1e-9 * get("total"));
}

#[test]
fn strict_bounds_exit_codes() {
    let ok = run(&["bounds", "report", "2000", "100", "4", "13", "--bound", "THM2", "--strict"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let out_of_theory = run(&["bounds", "report", "2000", "100", "4", "3", "--bound", "TRIVIAL", "--strict"]);
    assert_eq!(out_of_theory.status.code(), Some(3));
    let invalid = run(&["bounds", "report", "2000", "100", "4", "12", "--bound", "COR_ENERGY", "--strict"]);
    assert_eq!(invalid.status.code(), Some(3));
    let lenient = run(&["bounds", "report", "2000", "100", "4", "12", "--bound", "COR_ENERGY"]);
    assert_eq!(lenient.status.code(), Some(0));
    assert!(stdout(&lenient).contains("fails: K > 12"));
}

#[test]
fn invalid_arguments_exit_2() {
    assert_eq!(run(&["psi", "ten", "2"]).status.code(), Some(2));
    assert_eq!(run(&["moment", "10", "5", "3", "--exact"]).status.code(), Some(2));
    assert_eq!(run(&["moment", "10", "5", "4", "--exact", "--grid", "9"]).status.code(), Some(2));
    assert_eq!(run(&["identities", "0", "4"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "/nonexistent/config.json"]).status.code(), Some(1));
}

#[test]
fn capacity_exits_4() {
    assert_eq!(run(&["psi", "1000000000", "3"]).status.code(), Some(4));
    assert_eq!(run(&["moment", "100", "100", "3", "--grid", "100000000"]).status.code(), Some(4));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"x_values": [100, 10], "smoothness": {"y_values": [5]}, "rho_values": [2]}"#).unwrap();
    let out = run(&["sweep", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(run(&["sweep", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn sweep_then_plot_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"x_values": [100, 1000], "smoothness": {"y_values": [7, 50]}, "rho_values": [2, 4],
            "bounds": ["TRIVIAL", "HARPER_MVT"]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&["sweep", config.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = out_dir.join("results.csv");
    assert!(csv.exists());

    let svg = dir.path().join("figure.svg");
    let out = run(&["plot", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("polyline") && text.contains("rho=4 y=50 moment"));

    let gp = dir.path().join("figure.gp");
    let out = run(&["plot", csv.to_str().unwrap(), "--out", gp.to_str().unwrap()]);
    assert!(out.status.success());
    let script = std::fs::read_to_string(&gp).unwrap();
    assert!(script.contains("set logscale xy") && script.contains("EOD"));
}
