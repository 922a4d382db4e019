use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qpd::cli::RunReport;

fn qpd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpd"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn report(out: &Output) -> Vec<(String, String)> {
    RunReport::parse_entries(&String::from_utf8_lossy(&out.stdout))
}

fn value<'a>(entries: &'a [(String, String)], key: &str) -> &'a str {
    entries
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .unwrap_or_else(|| panic!("no {key}"))
}

const FIG1: &str = "\
[model]
kind = coherent
coherent.a = 1

[run]
mode = trajectory
x0 = 0
v0 = 0, 0.25, -0.25

[integrator]
t_end = 25.132741228718345
escape_radius = 5
stop_on_escape = false
sample_times = 0, 5, 10, 15, 20, 25

[output]
dir = out
stem = fig1
";

#[test]
fn fig1_scenario_writes_three_trajectories() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "fig1.ini", FIG1);
    let out = qpd(tmp.path(), &["--config", "fig1.ini", "run"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert_eq!(value(&r, "runs"), "3");
    assert_eq!(value(&r, "status"), "ok");
    assert!(!value(&r, "traj.0.events").contains("escaped"));
    assert!(value(&r, "traj.1.events").contains("escaped"));
    assert!(value(&r, "traj.2.events").contains("escaped"));
    let dev: f64 = value(&r, "traj.1.oracle_max_rel_dev").parse().unwrap();
    assert!(dev < 1e-6);
    for k in 0..3 {
        let csv = fs::read_to_string(tmp.path().join(format!("out/fig1_traj_{k}.csv"))).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,x,y,z,vx,vy,vz,Q,Etilde,residual");
        assert_eq!(lines.len(), 7);
    }
    let last_x = |k: usize| -> f64 {
        let csv = fs::read_to_string(tmp.path().join(format!("out/fig1_traj_{k}.csv"))).unwrap();
        csv.lines()
            .last()
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(last_x(0).abs() < 5.0);
    assert!(last_x(1).abs() > 5.0 && last_x(2).abs() > 5.0);
    assert!(tmp.path().join("out/fig1_report.txt").exists());
}

#[test]
fn sweep_matches_classify_on_every_point() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "sw.ini",
        "[sweep]\netilde_n = 9\nC_n = 7\n[output]\ndir = o\nstem = fig2\n",
    );
    let out = qpd(tmp.path(), &["--config", "sw.ini", "--quiet", "sweep"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = fs::read_to_string(tmp.path().join("o/fig2_regimes.csv")).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (e, c): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let cls = qpd::central::classify(e, c);
        assert_eq!(f[2], cls.regime.name());
        assert_eq!(
            f[3],
            cls.turning_radius.map_or(String::new(), |r| r.to_string())
        );
        rows += 1;
    }
    assert_eq!(rows, 63);
}

#[test]
fn radial_scenario_matches_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "r.ini",
        "[run]\nmode = radial\n[radial]\nr0 = 1\nm0 = 2\nrdot0 = 1, 0, -1\nC = 0.5, -0.5, -0.5\nt_end = 3\nsamples = 61\n[output]\ndir = o\nstem = fig4\n",
    );
    let out = qpd(tmp.path(), &["--config", "r.ini", "run"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for (k, (rdot0, c)) in [(1.0, 0.5), (0.0, -0.5), (-1.0, -0.5)]
        .into_iter()
        .enumerate()
    {
        let csv = fs::read_to_string(tmp.path().join(format!("o/fig4_radial_{k}.csv"))).unwrap();
        let e = qpd::central::radial_energy(1.0, rdot0, c, 2.0);
        for line in csv.lines().skip(1) {
            let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            match qpd::central::radial_trajectory(1.0, rdot0, e, 2.0, f[0]) {
                Ok(r) => assert_eq!(f[1], r),
                Err(_) => assert!(f[1].is_nan()),
            }
        }
    }
}

#[test]
fn classify_and_oracle_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qpd(tmp.path(), &["classify", "-1", "-2"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(value(&r, "regime"), "bounded_oscillating");
    assert_eq!(value(&r, "turning_radius"), 2f64.sqrt().to_string());

    let out = qpd(
        tmp.path(),
        &[
            "oracle",
            "coherent_trajectory",
            "0",
            "0",
            "1",
            "3.141592653589793",
        ],
    );
    assert!(out.status.success());
    assert_eq!(value(&report(&out), "value"), "-2");

    let out = qpd(tmp.path(), &["oracle", "free_gaussian_escape", "1.5", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "unknown.ini",
        "[model]\nkind = coherent\nfoo = 1\n",
    );
    let out = qpd(tmp.path(), &["--config", "unknown.ini", "run"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("model.foo"), "{err}");

    write(
        tmp.path(),
        "step.ini",
        "[model]\nkind = step\nstep.E = 2\nstep.V = 1\n",
    );
    let out = qpd(tmp.path(), &["--config", "step.ini", "run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E < V required"));
}

#[test]
fn check_reports_invariants() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "c.ini",
        "[model]\nkind = harmonic\nharmonic.n = 1\n[run]\nx0 = 0.5, -1.3\n[ensemble]\nn = 500\nseed = 3\n[output]\ndir = o\nstem = chk\n",
    );
    let out = qpd(tmp.path(), &["--config", "c.ini", "check"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let r = report(&out);
    for key in [
        "eigenstate_identity",
        "fd_vs_closed_form",
        "constraint_residual",
        "dbb_coincidence",
        "etilde_drift",
        "ks_worst_ratio",
    ] {
        assert_eq!(value(&r, &format!("check.{key}.status")), "pass", "{key}");
    }
}

#[test]
fn seeded_ensemble_is_reproducible_and_seed_flag_applies() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "e.ini",
        "[model]\nkind = free_gaussian\n[run]\nmode = ensemble\n[ensemble]\nn = 300\nlaw = gaussian\nv0 = 1\nsigma_tilde = 0.5\nsample_times = 0.5, 1\n[output]\nstem = e\n",
    );
    let run = |out_dir: &str, seed: &str| {
        let out = qpd(
            tmp.path(),
            &[
                "--config", "e.ini", "--out", out_dir, "--seed", seed, "--quiet", "run",
            ],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        fs::read(tmp.path().join(out_dir).join("e_ensemble.csv")).unwrap()
    };
    let a = run("a", "5");
    let b = run("b", "5");
    let c = run("c", "6");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let report = fs::read_to_string(tmp.path().join("a/e_report.txt")).unwrap();
    assert!(report.contains("config.ensemble.seed: 5"));
}
