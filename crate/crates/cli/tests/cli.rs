//! End-to-end tests of the `convact` binary: exit codes, diagnostics,
//! determinism, and the one-shot convolve pipeline.

use std::path::Path;
use std::process::{Command, Output};

fn convact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn convact_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_convact"));
    cmd.current_dir(dir).args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn builtin_verify_passes_with_exit_zero() {
    let out = convact(&["verify", "--config", "z2-swap", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("associativity"));
    assert!(!text.contains("false"));
}

#[test]
fn unknown_config_is_a_usage_error() {
    let out = convact(&["verify", "--config", "no-such-scenario"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no-such-scenario"), "{err}");
}

#[test]
fn corrupted_table_fails_construction() {
    let dir = tempfile::tempdir().unwrap();
    // non-bijective action row
    std::fs::write(
        dir.path().join("bad.tbl"),
        "2 2\n0\n0 1\n1 0\n0 1\n0 0\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("bad.toml"),
        "command = \"verify\"\n[system]\ntable = \"bad.tbl\"\n",
    )
    .unwrap();
    let out = convact_in(dir.path(), &["verify", "--config", "bad.toml"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("compatibility axiom"), "{err}");
}

#[test]
fn config_parse_errors_carry_line_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("broken.toml"),
        "command = \"verify\"\n[system\nbuiltin = \"z2-swap\"\n",
    )
    .unwrap();
    let out = convact_in(dir.path(), &["verify", "--config", "broken.toml"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn float_mode_with_zero_tolerance_is_misconfiguration() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("zero-tol.toml"),
        "command = \"verify\"\nmode = \"float\"\n[system]\nbuiltin = \"z2-swap\"\n\
         [verify]\ntolerance = 0.0\n",
    )
    .unwrap();
    let out = convact_in(dir.path(), &["verify", "--config", "zero-tol.toml"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("misconfiguration"), "{err}");
}

#[test]
fn scenario_dir_env_resolves_names() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("mine.toml"),
        "command = \"verify\"\nseed = 3\n[system]\nbuiltin = \"z3-rotation\"\n\
         [verify]\ncases = 20\n",
    )
    .unwrap();
    let out = convact_in(
        Path::new("."),
        &["verify", "--config", "mine"],
        &[("CONVACT_SCENARIO_DIR", dir.path().to_str().unwrap())],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unsolvable_approximation_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // ε of 0.2 leaves no room in a band of width 0.2
    std::fs::write(
        dir.path().join("unsolvable.toml"),
        "command = \"approximate\"\nmode = \"float\"\n[system]\nbuiltin = \"circle-rotation-uniform\"\n\
         [approximate]\nepsilon = 0.2\ndelta = 0.05\n\
         [[approximate.constraint]]\ntest_fn = \"cos:1\"\nlower = \"-0.1\"\nupper = \"0.1\"\n\
         [approximate.constraint.anchor]\npoints = [\"0.0\"]\nweights = [\"1.0\"]\n",
    )
    .unwrap();
    let out = convact_in(dir.path(), &["approximate", "--config", "unsolvable.toml"], &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unsolvable"), "{err}");
}

#[test]
fn statistical_scenarios_write_reports_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = convact(&[
        "approximate",
        "--config",
        "circle-rotation-uniform",
        "--seed",
        "9",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(&out_path).unwrap();
    assert!(report.contains("\"samples_per_attempt\": 3506"), "{report}");
    assert!(report.contains("config_hash"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = convact(&[
            "verify",
            "--config",
            "s3-natural",
            "--seed",
            "31",
            "--format",
            "csv",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn parallel_batch_matches_sequential() {
    let dir = tempfile::tempdir().unwrap();
    for (tag, extra) in [("seq", None), ("par", Some("--parallel"))] {
        for name in ["z2-swap", "z3-rotation"] {
            std::fs::write(
                dir.path().join(format!("{name}-{tag}.toml")),
                format!(
                    "command = \"verify\"\nseed = 5\n[system]\nbuiltin = \"{name}\"\n\
                     [verify]\ncases = 30\n[output]\npath = \"{name}-{tag}.csv\"\nformat = \"csv\"\n"
                ),
            )
            .unwrap();
        }
        let mut args = vec![
            "verify",
            "--config",
        ];
        let c1 = format!("z2-swap-{tag}.toml");
        let c2 = format!("z3-rotation-{tag}.toml");
        args.push(&c1);
        args.push(&c2);
        if let Some(flag) = extra {
            args.push(flag);
        }
        let out = convact_in(dir.path(), &args, &[]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["z2-swap", "z3-rotation"] {
        let seq = std::fs::read(dir.path().join(format!("{name}-seq.csv"))).unwrap();
        let par = std::fs::read(dir.path().join(format!("{name}-par.csv"))).unwrap();
        // scenario label differs only in the file name embedded in the report
        let seq = String::from_utf8(seq).unwrap().replace("-seq.toml", "");
        let par = String::from_utf8(par).unwrap().replace("-par.toml", "");
        assert_eq!(seq, par);
    }
}

#[test]
fn convolve_round_trips_measures() {
    let dir = tempfile::tempdir().unwrap();
    let mu = dir.path().join("mu.measure");
    let nu = dir.path().join("nu.measure");
    std::fs::write(&mu, "rational\n0 1 2\n1 1 2\n").unwrap();
    std::fs::write(&nu, "rational\n0 1 1\n").unwrap();
    let out = convact(&[
        "convolve",
        "--system",
        "z2-swap",
        "--mu",
        mu.to_str().unwrap(),
        "--nu",
        nu.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "rational\n0 1 2\n1 1 2\n");
    // circle variant with float angles
    std::fs::write(&mu, "float\n0.25 1\n").unwrap();
    std::fs::write(&nu, "float\n0.5 0.5\n0.125 0.5\n").unwrap();
    let out = convact(&[
        "convolve",
        "--system",
        "circle-rotation",
        "--mu",
        mu.to_str().unwrap(),
        "--nu",
        nu.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "float\n0.375 0.5\n0.75 0.5\n");
    // mode mismatch is an error
    std::fs::write(&nu, "rational\n0 1 1\n").unwrap();
    let out = convact(&[
        "convolve",
        "--system",
        "circle-rotation",
        "--mu",
        mu.to_str().unwrap(),
        "--nu",
        nu.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
