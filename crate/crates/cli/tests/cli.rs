use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_torus-greens"));
    c.env_remove("TORUS_GREENS_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn eval3_reports_value_and_diagnostics() {
    let o = run(&["eval3", "--s", "2.0", "--lattice", "1,0,1,0,0,1", "--x", "0.5,0.5,0.5", "--xi", "0,0,0", "--mode", "ewald"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert!(v["value"]["re"].as_f64().unwrap() > 0.0);
    assert_eq!(v["value"]["im"].as_f64(), Some(0.0));
    assert!(v["shells_used"].as_u64().unwrap() >= 1);
    assert_eq!(v["strategy"], "ewald");
    assert_eq!(v["pole_flag"], false);
}

#[test]
fn strategies_agree_through_the_cli() {
    let args = ["eval3", "--s", "2.3,0.4", "--lattice", "1,0.2,1.1,-0.3,0.1,0.9", "--x", "0.3,0.7,0.1", "--xi", "0.2,0.5,0.9"];
    let e = json(&run(&[&args[..], &["--mode", "ewald"]].concat()));
    let d = json(&run(&[&args[..], &["--strategy", "direct"]].concat()));
    for part in ["re", "im"] {
        let (a, b) = (e["value"][part].as_f64().unwrap(), d["value"][part].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{part}: {a} vs {b}");
    }
    assert_eq!(d["strategy"], "direct");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["eval3", "--s", "abc", "--x", "0.5,0.5,0.5"][..],
        &["eval3", "--s", "2", "--x", "0.5,0.5"],
        &["eval3", "--s", "2", "--x", "0.5,0.5,0.5", "--frobnicate"],
        &["eval3", "--x", "0.5,0.5,0.5"],
        &["eval3", "--s", "2", "--x", "0.1,0.1,0.1", "--lattice", "1,0,0,0,0,1"],
        &["eval3", "--s", "2", "--x", "0.1,0.1,0.1", "--w", "2,0,0,0,1,0,0,0,1"],
        &["verify", "--suite", "lemma9"],
        &["verify", "--suite", "lemma1", "--jobs", "0"],
        &["limit", "--c", "16,8"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    let o = run(&["eval3", "--s", "abc", "--x", "0.5,0.5,0.5"]);
    assert!(stderr(&o).contains("--s"));
}

#[test]
fn evaluator_errors_exit_3_with_a_tag() {
    let o = run(&["eval3", "--s", "2", "--x", "1,0,-2"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("SingularPoint"));
    let o = run(&["eval3", "--s", "1.5", "--x", "0.2,0.1,0.3"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("PoleAtS"));
    let o = run(&["eval3", "--s", "2", "--x", "0.2,0.1,0.3", "--xi", "0.3,0,0", "--mode", "ewald", "--max-shells", "2", "--tol", "1e-14"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("NotConverged"));
}

#[test]
fn verify_suite_passes_and_failures_exit_1() {
    let o = run(&["verify", "--suite", "lemma2", "--count", "3", "--seed", "7", "--tol", "1e-9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 6);

    let o = run(&["verify", "--suite", "lemma2", "--count", "3", "--tol", "1e-30"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["passed"], false);
    assert!(v["reports"].as_array().unwrap().iter().any(|r| r["passed"] == false));
}

#[test]
fn tolerance_comes_from_the_environment_unless_overridden() {
    let env = |tol: &str, extra: &[&str]| {
        let o = bin().env("TORUS_GREENS_TOL", tol).args([&["verify", "--suite", "quasi"][..], extra].concat()).output().unwrap();
        code(&o)
    };
    assert_eq!(env("1e-30", &[]), 1);
    assert_eq!(env("1e-30", &["--tol", "1e-10"]), 0);
}

#[test]
fn jobs_never_change_the_output() {
    let cases: [&[&str]; 3] = [
        &["verify", "--suite", "lemma2", "--count", "4", "--seed", "11"],
        &["eval3", "--s", "2.7,1.1", "--x", "0.3,0.6,0.2", "--xi", "0.1,0.2,0.3", "--mode", "direct"],
        &["green", "--x", "0.2,0.2,0.2", "--xi", "0.3,0.1,0.7", "--mode", "fourier"],
    ];
    for args in cases {
        let one = run(&[args, &["--jobs", "1"]].concat());
        let four = run(&[args, &["--jobs", "4"]].concat());
        assert_eq!(code(&one), 0, "{args:?}: {}", stderr(&one));
        assert_eq!(one.stdout, four.stdout, "{args:?}");
        assert_eq!(run(args).stdout, one.stdout, "{args:?}");
    }
}

#[test]
fn csv_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let o = run(&["verify", "--suite", "modular2d", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "name,lhs_re,lhs_im,rhs_re,rhs_im,abs_residual,rel_residual,tolerance,passed");
    assert!(lines.all(|l| l.ends_with(",true")));

    let o = run(&["eval2", "--s", "1.3,0.2", "--x", "0.1,0.2", "--xi", "0.3,0.4", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("value_re,value_im,shells_used"));
}

#[test]
fn icont_and_completion() {
    let base = ["icont", "--s", "1.2", "--x", "0.4,0.1", "--xi", "0.2,0.3", "--y", "0.5"];
    let r = json(&run(&base));
    let i = json(&run(&[&base[..], &["--complete"]].concat()));
    // Γ(1.2) = 0.918168742399761
    let g = 0.918_168_742_399_761;
    let ratio = i["value"]["re"].as_f64().unwrap() / r["value"]["re"].as_f64().unwrap();
    assert!((ratio - g).abs() < 1e-12, "{ratio}");
}

#[test]
fn limit_command_reports_the_ladder() {
    let o = run(&["limit"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = json(&o)["reports"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 4);
    let last = rows[3]["rel_residual"].as_f64().unwrap();
    assert!(last <= 1e-3);
    let o = run(&["limit", "--tol", "1e-6"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn monopole_sampling() {
    let o = run(&["monopole", "--m", "2", "--tau", "0,1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["config"]["quantized"], true);
    assert!((v["jump"]["times_z"]["re"].as_f64().unwrap() - 2.0).abs() < 1e-14);
    assert!(v["bogomolny"]["r1"].as_f64().unwrap() < 1e-2);
    assert_eq!(v["modular"]["passed"], true);

    let o = run(&["monopole", "--tau", "0.5,0.9"]);
    assert_eq!(code(&o), 1);

    let o = run(&["monopole", "--format", "csv", "--h", "0.25"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "re_z,im_z,y,re_phi,im_phi,re_Az,im_Az");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 27);

    // a grid through the jump plane y = 0
    let o = run(&["monopole", "--lo", "0.5,0.5,-0.5", "--hi", "1,1,0.5"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("OnJumpLocus"), "{}", stderr(&o));
}

#[test]
fn every_command_has_help() {
    for cmd in ["eval2", "eval3", "green", "icont", "verify", "limit", "monopole"] {
        let o = run(&[cmd, "--help"]);
        assert_eq!(code(&o), 0);
        let text = String::from_utf8(o.stdout).unwrap();
        for flag in ["--format", "--output", "--jobs"] {
            assert!(text.contains(flag), "{cmd} help lacks {flag}");
        }
    }
    let text = String::from_utf8(run(&["eval3", "--help"]).stdout).unwrap();
    for flag in ["--s", "--lattice", "--metric", "--x", "--xi", "--w", "--mode", "--tol"] {
        assert!(text.contains(flag), "eval3 help lacks {flag}");
    }
}
