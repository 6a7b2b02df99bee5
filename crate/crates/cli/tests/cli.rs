use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lambert-tsallis")).args(args).env_remove("LT_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn classify_exit_codes() {
    let o = run(&["classify", "--kappa", "inf", "--gamma", "0"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("class: v"));
    assert!(s.contains("cut: (-inf, -0.367879441171442]"));

    let o = run(&["classify", "--kappa", "1", "--gamma", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("identity"));

    let o = run(&["classify", "--kappa", "0.5", "--gamma", "0.1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("domain_obstruction"));

    assert_eq!(code(&run(&["classify", "--kappa", "0", "--gamma", "1"])), 64);
    assert_eq!(code(&run(&["classify", "--kappa", "abc", "--gamma", "1"])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn eval_modes() {
    let o = run(&["eval", "--mode", "w", "--kappa", "inf", "--gamma", "0", "1", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("value: 0.567143290409784\n"));

    let o = run(&["eval", "--mode", "f", "--kappa", "2", "--gamma", "0.1", "0", "0"]);
    assert_eq!(stdout(&o), "value: 0\n");

    assert_eq!(code(&run(&["eval", "--mode", "w", "--kappa", "inf", "--gamma", "0", "-5", "0"])), 3);
    assert_eq!(code(&run(&["eval", "--mode", "f", "--kappa", "2", "--gamma", "0.5", "-2", "0"])), 3);
    assert_eq!(code(&run(&["eval", "--mode", "w", "--kappa", "2", "--gamma", "1", "1", "1"])), 2);
}

#[test]
fn eval_json_round_trips() {
    let o = run(&["eval", "--kappa", "2", "--gamma", "-0.5", "--format", "json", "-0.3", "0.2"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let z = (v["value"]["re"].as_f64().unwrap(), v["value"]["im"].as_f64().unwrap());
    let back = run(&["eval", "--mode", "f", "--kappa", "2", "--gamma", "-0.5", "--format", "csv", &z.0.to_string(), &z.1.to_string()]);
    let row = stdout(&back).lines().nth(1).unwrap().to_string();
    let cols: Vec<f64> = row.split(',').skip(3).take(2).map(|c| c.parse().unwrap()).collect();
    assert!((cols[0] + 0.3).abs() < 1e-12 && (cols[1] - 0.2).abs() < 1e-12, "{row}");
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_lambert-tsallis"))
        .args(["eval", "--kappa", "3", "--gamma", "0.4", "1", "2"])
        .env("LT_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn boundary_csv() {
    let o = run(&["boundary", "--kappa", "1", "--gamma", "-1", "--samples", "256", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next().unwrap(), "theta,r_minus,r_plus,x_minus,y_minus,x_plus,y_plus");
    assert_eq!(lines.count(), 256);
}

#[test]
fn boundary_json_metadata() {
    let o = run(&["boundary", "--kappa", "inf", "--gamma", "0.2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["case"], "infty_half_strip");
    assert!(v.get("y0").is_none());
    assert_eq!(v["samples"].as_array().unwrap().len(), 512);

    let o = run(&["boundary", "--kappa", "1", "--gamma", "-1", "--format", "json", "--samples", "8"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["case"], "kappa_one_circle");

    let o = run(&["boundary", "--kappa", "2", "--gamma", "-0.5", "--format", "json", "--samples", "8"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["case"], "bounded_lens");
    assert!(v["theta_star"].is_number());
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let dir = std::env::temp_dir().join(format!("lt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("b.csv");
    let args = ["boundary", "--kappa", "3", "--gamma", "0.4", "--format", "csv"];
    let a = run(&args);
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let b = run(&with_out);
    assert_eq!(code(&b), 0);
    assert!(b.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    std::fs::remove_dir_all(&dir).unwrap();

    let v1 = run(&["verify", "--kappa", "0.5", "--gamma", "-1", "--format", "json", "--seed", "3"]);
    let v2 = run(&["verify", "--kappa", "0.5", "--gamma", "-1", "--format", "json", "--seed", "3"]);
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn verify_single_pairs() {
    let o = run(&["verify", "--kappa", "2", "--gamma", "0.25"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("result: consistent"));

    let o = run(&["verify", "--kappa", "2", "--gamma", "0.7"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("class: two_to_one"));
    assert!(s.contains("winding at 0.5+0.5i: 2"));

    assert_eq!(code(&run(&["verify", "--kappa", "2"])), 64);
    assert_eq!(code(&run(&["verify"])), 64);
}

#[test]
fn verify_default_grid() {
    let o = run(&["verify", "--grid", "default", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 1 + 40 * 40);
    // rows come out in cell order
    for (i, line) in s.lines().skip(1).enumerate() {
        assert!(line.starts_with(&format!("{i},")));
    }
}
