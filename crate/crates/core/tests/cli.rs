use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iga-contact"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("IGA_CONTACT_THREADS", "1").output().expect("spawn binary")
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn unknown_subcommand_exits_2() {
    assert_eq!(run(&["hertz4d"]).status.code(), Some(2));
}

#[test]
fn unknown_benchmark_in_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "benchmark = hertz5d\n").unwrap();
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
}

#[test]
fn invalid_settings_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    assert_eq!(run(&["hertz2d", "--base-spans", "0", "--out", o]).status.code(), Some(2));
    assert_eq!(run(&["hertz2d", "--grading", "1.5,0.2", "--out", o]).status.code(), Some(2));
    assert_eq!(run(&["hertz2d", "--base-spans", "2", "--out", o]).status.code(), Some(2));
    let cfg = dir.path().join("typo.cfg");
    fs::write(&cfg, "benchmark = hertz2d\npresure = 0.01\n").unwrap();
    assert_eq!(run(&["run", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bad_thread_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["infsup", "--levels", "1", "--out", dir.path().to_str().unwrap()])
        .env("IGA_CONTACT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infsup_single_level_has_no_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["infsup", "--levels", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("infsup.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert_eq!(csv.lines().next(), Some("h,beta"));
    let rates = fs::read_to_string(dir.path().join("rates.txt")).unwrap();
    assert!(!rates.contains("beta_ratio"));
}

fn small_run(out: &Path) -> Output {
    let dir = out.parent().unwrap();
    let cfg = dir.join("small.cfg");
    fs::write(&cfg, "benchmark = hertz2d\n# coarse sweep\nlevels = 3\nbase_spans = 4\nreference_offset = 1\n").unwrap();
    run(&["run", cfg.to_str().unwrap(), "--pressure", "0.003", "--out", out.to_str().unwrap()])
}

#[test]
fn outputs_have_exact_headers_and_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let oa = small_run(&a);
    assert!(oa.status.success(), "{}", String::from_utf8_lossy(&oa.stderr));
    assert!(small_run(&b).status.success());
    assert_eq!(header(&a.join("disp.csv")), "h,L2_abs,H1_abs");
    assert_eq!(header(&a.join("mult.csv")), "h_mult_ana,L2_mult_abs_ana,h_mult_ref,L2_mult_abs_ref");
    assert_eq!(header(&a.join("pressure_profile.csv")), "r_over_a,p_over_p0");
    assert_eq!(header(&a.join("contact_state.csv")), "K,lambda,weighted_gap,status,measure");
    let disp = fs::read_to_string(a.join("disp.csv")).unwrap();
    assert_eq!(disp.lines().count(), 3);
    for field in disp.lines().nth(1).unwrap().split(',') {
        let (mantissa, _) = field.split_once('e').expect("scientific notation");
        assert!(mantissa.trim_start_matches('-').replace('.', "").len() >= 6, "{field}");
    }
    let rates = fs::read_to_string(a.join("rates.txt")).unwrap();
    for key in ["L2_disp", "H1_disp", "L2_mult_ana", "L2_mult_ref", "contact_half_width", "peak_pressure"] {
        assert!(rates.lines().any(|l| l.starts_with(key)), "{key}");
    }
    for f in ["disp.csv", "mult.csv", "rates.txt", "pressure_profile.csv", "contact_state.csv", "levels.csv", "solver_log.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs between runs");
    }
}
