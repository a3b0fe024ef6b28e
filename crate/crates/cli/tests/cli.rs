use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use priorsens_cli::{run, run_cli};

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn argv(parts: &[&str], out: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::iter::once("simulate").chain(parts.iter().copied()).map(String::from).collect();
    v.push("--out".into());
    v.push(out.display().to_string());
    v
}

#[test]
fn lowerbound_row_has_analytic_tv() {
    let dir = tempfile::tempdir().unwrap();
    let args = argv(&["lowerbound", "--eps", "0.01", "--horizon", "5", "--k", "1", "--trials", "2000"], dir.path());
    assert_eq!(run_cli(args), 0);
    let (header, rows) = read_csv(&dir.path().join("lowerbound.csv"));
    assert_eq!(
        header,
        ["eps", "H", "k", "analytic_tv", "empirical_tv", "empirical_stderr", "reward_gap", "gap_stderr"]
    );
    assert_eq!(rows.len(), 1);
    let analytic: f64 = rows[0][3].parse().unwrap();
    assert!((analytic - 0.04901).abs() < 1e-5);
}

#[test]
fn missing_field_is_config_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let e = run(argv(&["lowerbound", "--eps", "0.01", "--k", "1"], dir.path())).unwrap_err();
    assert_eq!(e.exit_code(), 1);
    assert!(e.to_string().contains("`horizon`"), "{e}");

    let e = run(argv(&["meta-gaussian", "--episodes", "10", "--explore", "2"], dir.path())).unwrap_err();
    assert!(e.to_string().contains("`replicates`"), "{e}");
}

#[test]
fn unknown_flag_and_bad_values_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_cli(argv(&["lowerbound", "--bogus"], dir.path())), 1);
    assert_eq!(run_cli(argv(&["meta-gaussian", "--preset", "nope", "--episodes", "5", "--explore", "1", "--replicates", "1"], dir.path())), 1);
    let e = run(argv(
        &["meta-gaussian", "--episodes", "5", "--explore", "9", "--replicates", "1"],
        dir.path(),
    ))
    .unwrap_err();
    assert_eq!(e.exit_code(), 1);
    assert!(e.to_string().contains("explore_episodes"), "{e}");
    assert_eq!(run_cli(["simulate", "--help"]), 0);
}

#[test]
fn unreadable_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.toml");
    let e = run(argv(&["estimate", "--config", missing.to_str().unwrap()], dir.path())).unwrap_err();
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let e = run(argv(&["lowerbound", "--eps", "0.1", "--horizon", "2", "--k", "1", "--trials", "10"], &blocker.join("sub")))
        .unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn meta_gaussian_is_deterministic_given_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("appA.toml");
    std::fs::write(
        &cfg,
        "experiment = \"meta-gaussian\"\nnum_episodes = 40\nexplore_episodes = [5, 20]\nreplicates = 3\njobs = 2\n",
    )
    .unwrap();
    let outputs: Vec<_> = ["a", "b"]
        .iter()
        .map(|sub| {
            let out = dir.path().join(sub);
            let args = argv(&["meta-gaussian", "--config", cfg.to_str().unwrap(), "--seed", "7"], &out);
            assert_eq!(run_cli(args), 0);
            (
                std::fs::read(out.join("learning_curve.csv")).unwrap(),
                std::fs::read(out.join("first_action.csv")).unwrap(),
            )
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);

    let out = dir.path().join("c");
    assert_eq!(run_cli(argv(&["meta-gaussian", "--config", cfg.to_str().unwrap(), "--seed", "8"], &out)), 0);
    assert_ne!(std::fs::read(out.join("learning_curve.csv")).unwrap(), outputs[0].0);
}

#[test]
fn learning_curve_has_t_rows_per_series_and_one_envelope_flag() {
    let dir = tempfile::tempdir().unwrap();
    let t = 30;
    let args = argv(
        &["meta-discrete", "--episodes", &t.to_string(), "--explore", "5,10", "--replicates", "2", "--k1", "3", "--k2", "3"],
        dir.path(),
    );
    assert_eq!(run_cli(args), 0);
    let (header, rows) = read_csv(&dir.path().join("learning_curve.csv"));
    assert_eq!(header, ["algorithm", "config_id", "episode", "mean_reward", "stderr", "envelope_flag"]);
    let mut per_series: HashMap<(String, String), usize> = HashMap::new();
    let mut flags: HashMap<(String, String), usize> = HashMap::new();
    for r in &rows {
        *per_series.entry((r[0].clone(), r[1].clone())).or_default() += 1;
        *flags.entry((r[0].clone(), r[2].clone())).or_default() += r[5].parse::<usize>().unwrap();
    }
    // Oracle/Mis TS and KG once each, MetaTS and MetaKG at two exploration lengths.
    assert_eq!(per_series.len(), 8);
    assert!(per_series.values().all(|&n| n == t));
    assert!(flags.values().all(|&n| n == 1));

    let (header, rows) = read_csv(&dir.path().join("first_action.csv"));
    assert_eq!(header, ["algorithm", "arm", "frequency"]);
    let mut sums: HashMap<String, f64> = HashMap::new();
    for r in &rows {
        *sums.entry(r[0].clone()).or_default() += r[2].parse::<f64>().unwrap();
    }
    assert_eq!(sums.len(), 8);
    for (alg, s) in sums {
        assert!((s - 1.0).abs() <= 1e-9, "{alg}: {s}");
    }
}

#[test]
fn sensitivity_empty_grid_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "eps_grid = []\nhorizon_grid = [5]\n").unwrap();
    assert_eq!(run_cli(argv(&["sensitivity", "--config", cfg.to_str().unwrap()], dir.path())), 0);
    let text = std::fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert_eq!(text, "instance,n,H,eps,B,bound,measured_gap,gap_stderr\n");
}

#[test]
fn sensitivity_rows_respect_bound() {
    let dir = tempfile::tempdir().unwrap();
    let args = argv(
        &["sensitivity", "--eps-grid", "0.05", "--horizon-grid", "5", "--trials", "2000", "--base-policy", "kts", "--k", "2"],
        dir.path(),
    );
    assert_eq!(run_cli(args), 0);
    let (_, rows) = read_csv(&dir.path().join("bounds.csv"));
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r[1], "2");
        let f = |i: usize| r[i].parse::<f64>().unwrap();
        assert!(f(6) <= f(5) + 3.0 * f(7));
    }
}

#[test]
fn estimate_writes_estimates_next_to_truth() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_cli(argv(&["estimate", "--preset", "appA-discrete", "--episodes", "300"], dir.path())), 0);
    let (header, rows) = read_csv(&dir.path().join("estimates.csv"));
    assert_eq!(header, ["estimator", "parameter", "row", "col", "estimate", "truth"]);
    assert_eq!(rows.len(), 16);
    let total: f64 = rows.iter().map(|r| r[4].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_simulate");
    let dir = tempfile::tempdir().unwrap();
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    let missing = Command::new(bin)
        .args(["lowerbound", "--eps", "0.01", "--horizon", "5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("`k`"));
}

#[test]
fn sim_seed_is_default_seed() {
    let bin = env!("CARGO_BIN_EXE_simulate");
    let dir = tempfile::tempdir().unwrap();
    let go = |sub: &str, env: Option<&str>, flag: Option<&str>| {
        let out = dir.path().join(sub);
        let mut cmd = Command::new(bin);
        cmd.args(["lowerbound", "--eps", "0.2", "--horizon", "3", "--k", "1", "--trials", "500", "--out"])
            .arg(&out)
            .env_remove("SIM_SEED");
        if let Some(e) = env {
            cmd.env("SIM_SEED", e);
        }
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        assert!(cmd.output().unwrap().status.success());
        std::fs::read(out.join("lowerbound.csv")).unwrap()
    };
    let env5 = go("a", Some("5"), None);
    assert_eq!(env5, go("b", None, Some("5")));
    assert_eq!(go("c", Some("9"), Some("5")), env5);
    assert_ne!(go("d", None, None), env5);
}
