use std::path::Path;
use std::process::{Command, Output};

use ppsf_cli::config::RunConfig;

fn ppsf(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppsf"))
        .args(args)
        .current_dir(cwd)
        .env_remove("PPSF_OUT_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn verify_passes_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ppsf(&["verify"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = String::from_utf8_lossy(&o.stdout);
    for suite in [
        "mixing-orthogonality",
        "row-energy",
        "eigen-gram",
        "trace",
        "construction",
        "backend-agreement",
    ] {
        assert!(table.contains(suite), "{table}");
    }
    assert!(!table.contains("FAIL"));
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn verify_names_failing_suite() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[tolerances]\ngram = 0.0\n");
    let o = ppsf(&["verify", "--config", &cfg], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("eigen-gram"), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn invalid_config_lists_every_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[geometry]\nt_half = -1.0\n[budget]\nepsilon = 2.0\n[sweep]\nr_list = [16.0, 8.0]\n",
    );
    let o = ppsf(&["eig", "--config", &cfg], tmp.path());
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    for field in ["geometry.t_half", "budget.epsilon", "sweep.r_list"] {
        assert!(err.contains(field), "{err}");
    }
}

#[test]
fn sigma_above_budget_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ppsf(&["construct", "--sigma", "0.5", "--r", "8"], tmp.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("budget.sigma"));
}

#[test]
fn missing_config_is_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ppsf(&["eig", "--config", "no-such-file.toml"], tmp.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn output_directory_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_ppsf"))
        .args(["eig", "--r", "4"])
        .current_dir(tmp.path())
        .env("PPSF_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("spectrum_r4.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,lambda"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[1].split('.').nth(1).unwrap().len(), 12);
}

#[test]
fn construct_writes_residual_table_and_functions() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[output]\nemit_functions = true\ncsv_precision = 10\n",
    );
    let o = ppsf(
        &["construct", "--config", &cfg, "--r", "16", "--out", "out"],
        tmp.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(tmp.path().join("out/pseudoprolates_r16.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("j,rho_norm_sq,residual_sq,bound"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert!(!rows.is_empty());
    for row in &rows {
        assert!(row[2] <= row[3] + 1e-6);
    }
    let phi = tmp
        .path()
        .join(format!("out/functions_r16/phi_{}.csv", rows.len() - 1));
    assert!(phi.exists());
}

#[test]
fn empty_family_gives_hint() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ppsf(
        &[
            "construct",
            "--r",
            "0.25",
            "--sigma",
            "1e-6",
            "--out",
            "out",
        ],
        tmp.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(
        stderr(&o).contains("increase budget.sigma"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn sweep_rejects_single_dilation() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ppsf(&["sweep", "--r", "8"], tmp.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn sweep_outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[sweep]\nr_list = [4.0, 8.0]\n");
    for d in ["a", "b"] {
        let o = ppsf(
            &["sweep", "--config", &cfg, "--out", d, "--plots"],
            tmp.path(),
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for f in ["sweep.csv", "sweep.svg"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let csv = std::fs::read_to_string(tmp.path().join("a/sweep.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "r,epsilon,sigma,gamma,n,m,count,lp_count,slope,target,lp_slope,lp_target,max_residual,valid"
    );
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn slepian_all_excluded_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[slepian]\nj_max = 3\n");
    let o = ppsf(
        &["slepian", "--config", &cfg, "--r", "32", "--out", "out"],
        tmp.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("excluded"));
}

#[test]
fn slepian_writes_samples() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ppsf(&["slepian", "--r", "4", "--out", "out"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(tmp.path().join("out/slepian_g.csv")).unwrap();
    assert!(csv.starts_with("x,g_0,"));
    assert!(tmp.path().join("out/slepian_excluded.csv").exists());
}

#[test]
fn config_file_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let text = "[geometry]\nt_half = 0.5\nomega_half = 3.0\n\n[budget]\nepsilon = 0.25\nsigma = \"auto\"\n";
    let path = write_config(tmp.path(), text);
    let a = RunConfig::load(Path::new(&path)).unwrap();
    let b = RunConfig::from_toml(&a.to_toml()).unwrap();
    assert_eq!(a, b);
}
