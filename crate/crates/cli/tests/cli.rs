//! End-to-end checks of the `bessel` binary: output shape, exit codes, CSV
//! structure. Everything runs on small inputs so the suite stays fast.

use std::process::Command;

fn bessel() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bessel"))
}

#[test]
fn eval_prints_value_and_method() {
    let out = bessel()
        .args(["eval", "300", "150", "--oracle-digits", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("J_300(150)"), "{text}");
    assert!(text.contains("method       = meissel1"), "{text}");
    let rel: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("rel_error    = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(rel < 1e-8);
}

#[test]
fn eval_forced_method_matches_auto_in_regime() {
    let auto = bessel().args(["eval", "300", "400"]).output().unwrap();
    let forced = bessel()
        .args(["eval", "300", "400", "--method", "meissel2"])
        .output()
        .unwrap();
    assert!(auto.status.success() && forced.status.success());
    let value = |o: &std::process::Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .next()
            .unwrap()
            .split(" = ")
            .nth(1)
            .unwrap()
            .to_string()
    };
    assert_eq!(value(&auto), value(&forced));
}

#[test]
fn bad_input_exits_2() {
    let out = bessel().args(["eval", "-3", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn wrong_regime_method_exits_3() {
    // below-order expansion forced above the order
    let out = bessel()
        .args(["eval", "300", "400", "--method", "meissel1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_method_exits_2() {
    let out = bessel()
        .args(["eval", "300", "150", "--method", "nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_emits_csv_grid() {
    let out = bessel()
        .args(["scan", "--nu", "300", "--x", "250:260:2", "--methods", "meissel1,auto"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "x,meissel1_value,auto_value,auto_method,auto_elapsed_us,flags");
    assert_eq!(data.len(), 1 + 6); // header + 250,252,...,260
    assert!(data[1].starts_with("250,"));
    assert!(data[1].contains("meissel1"));
}

#[test]
fn scan_bad_grid_exits_2() {
    let out = bessel()
        .args(["scan", "--nu", "300", "--x", "260:250:2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_refuses_oracle_beyond_cap() {
    let out = bessel()
        .args(["scan", "--nu", "1e6", "--x", "1100000:1200000:50000", "--oracle", "on"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("oracle"), "{err}");
}

#[test]
fn bench_reports_latency_lines() {
    let out = bessel()
        .args(["bench", "--nu", "300", "--x", "150:250:50", "--methods", "meissel1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("meissel1"), "{text}");
    assert!(text.contains("median"), "{text}");
}

#[test]
fn gw_runs_from_parameter_file() {
    let dir = std::env::temp_dir().join("bessel-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let params = dir.join("small.params");
    // a deliberately small configuration so the triple sum is quick
    std::fs::write(
        &params,
        "f0 = 0.05\nalpha = 0.7853981633974483\ntheta = 1.0471975511965976\n\
         phi = 1.0\nrotations = 3\nn_min = -5\nn_max = 5\nl_max = 3\n",
    )
    .unwrap();
    let out_csv = dir.join("terms.csv");
    let out = bessel()
        .args([
            "gw",
            params.to_str().unwrap(),
            "--out",
            out_csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("h_tilde"), "{text}");
    assert!(text.contains("terms ="), "{text}");
    let csv = std::fs::read_to_string(&out_csv).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("n,l,m,")));
    assert!(csv.lines().filter(|l| !l.starts_with('#')).count() > 2);
}

#[test]
fn gw_rejects_unknown_parameter() {
    let dir = std::env::temp_dir().join("bessel-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let params = dir.join("bad.params");
    std::fs::write(&params, "f0 = 0.05\nbogus_knob = 1\n").unwrap();
    let out = bessel().args(["gw", params.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn policy_file_overrides_term_count() {
    let dir = std::env::temp_dir().join("bessel-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let policy = dir.join("short.policy");
    std::fs::write(&policy, "meissel_first_terms = 2\n").unwrap();
    let full = bessel().args(["eval", "300", "150"]).output().unwrap();
    let short = bessel()
        .args(["eval", "300", "150", "--policy-file", policy.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(full.status.success() && short.status.success());
    let terms = |o: &std::process::Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .find(|l| l.starts_with("terms_used"))
            .unwrap()
            .to_string()
    };
    assert_ne!(terms(&full), terms(&short));
}
