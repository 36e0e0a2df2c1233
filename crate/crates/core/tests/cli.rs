//! End-to-end runs of the `gilbert` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gilbert::cli::sha256_hex;

fn out_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("gilbert-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

fn gilbert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gilbert")).args(args).env_remove("GILBERT_OUT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(dir: &Path) -> Vec<(String, String)> {
    fs::read_to_string(dir.join("manifest.txt"))
        .unwrap()
        .lines()
        .filter_map(|l| l.strip_prefix("artifact "))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[0].to_string(), f[2].to_string())
        })
        .collect()
}

#[test]
fn simulate_writes_hashed_artifacts_reproducibly() {
    let (a, b) = (out_dir("sim-a"), out_dir("sim-b"));
    for d in [&a, &b] {
        let o = gilbert(&["simulate", "--model", "tropical-lines", "--lambda", "10", "--k", "1", "--window", "1", "--seed", "7", "--out", d.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let m = manifest(&a);
    let names: Vec<&str> = m.iter().map(|x| x.0.as_str()).collect();
    for f in ["sites.csv", "events.csv", "trails.csv", "mosaic.svg", "census.txt"] {
        assert!(names.contains(&f), "{f} missing from {names:?}");
    }
    for (name, hash) in &m {
        assert_eq!(&sha256_hex(&fs::read(a.join(name)).unwrap()), hash);
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name} differs between runs");
    }
    let text = fs::read_to_string(a.join("manifest.txt")).unwrap();
    for line in ["command = simulate", "lambda = 10", "k = 1", "window = 1", "seed = 7", "model = tropical-lines"] {
        assert!(text.contains(line), "{line} missing");
    }
    assert!(fs::read_to_string(a.join("census.txt")).unwrap().contains("euler_holds = true"));
}

#[test]
fn usage_errors_exit_2() {
    let d = out_dir("usage");
    let o = gilbert(&["simulate", "--model", "rectangular", "--k", "3", "--out", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--lambda"));
    assert_eq!(gilbert(&["simulate", "--lambda", "x"]).status.code(), Some(2));
    assert_eq!(gilbert(&["nonsense"]).status.code(), Some(2));
    fs::create_dir_all(&d).unwrap();
    let conf = d.join("bad.conf");
    fs::write(&conf, "lambda = 1\nlamda = 2\n").unwrap();
    let o = gilbert(&["simulate", "--config", conf.to_str().unwrap(), "--out", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lamda"));
}

#[test]
fn invalid_spec_names_the_assumption() {
    let d = out_dir("parallel");
    let o = gilbert(&["limit", "--model", "custom", "--angles", "0,180", "--out", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-parallel-line"));
}

#[test]
fn flags_override_config_file_and_env_sets_output() {
    let d = out_dir("precedence");
    fs::create_dir_all(&d).unwrap();
    let conf = d.join("run.conf");
    fs::write(&conf, "# rectangular run\nmodel = rectangular\nlambda = 2\nk = 2\nwindow = 3\n").unwrap();
    let target = d.join("env-out");
    let o = Command::new(env!("CARGO_BIN_EXE_gilbert"))
        .args(["simulate", "--config", conf.to_str().unwrap(), "--k", "1"])
        .env("GILBERT_OUT", &target)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(target.join("manifest.txt")).unwrap();
    assert!(text.contains("k = 1") && text.contains("lambda = 2") && text.contains("model = rectangular"));
}

#[test]
fn limit_reports_closed_forms() {
    let d = out_dir("limit");
    let o = gilbert(&["limit", "--out", d.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip_while(|l| !l.starts_with("quantity")).skip(1).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let diff: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!(diff < 1e-9, "{r}");
    }
    let o = gilbert(&["limit", "--model", "rectangular", "--out", d.to_str().unwrap()]);
    for l in stdout(&o).lines().skip(1).take(4) {
        let w: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!((w - 1.0).abs() < 1e-9);
    }
}

#[test]
fn polytropes_without_diagonals_are_rectangles() {
    let d = out_dir("poly");
    let o = gilbert(&["polytropes", "--mu-rect", "1.2", "--mu-diag", "0", "--replicates", "4", "--out", d.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let p: Vec<f64> = text.lines().skip(1).take(4).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(p[0], 0.0);
    assert!((p[1] - 1.44).abs() < 1e-9);
    assert!(p[2] == 0.0 && p[3] == 0.0);
}

#[test]
fn tropical_and_armbody_exports() {
    let d = out_dir("tropical");
    fs::create_dir_all(&d).unwrap();
    let poly = d.join("line.txt");
    fs::write(&poly, "# tropical line\n0 0 0\n1 0 0\n0 1 0\n").unwrap();
    let o = gilbert(&["tropical", "--poly", poly.to_str().unwrap(), "--out", d.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("arm_census = 1 1 1"));
    assert!(fs::read_to_string(d.join("curve.svg")).unwrap().starts_with("<svg"));
    let o = gilbert(&["armbody", "--degree", "3", "--spread", "2", "--replicates", "400", "--arm-samples", "2000", "--out", d.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let z: f64 = stdout(&o).lines().find_map(|l| l.strip_prefix("z = ")).unwrap().parse().unwrap();
    assert!(z.abs() < 4.0, "z = {z}");
}

#[test]
fn converge_runs_with_a_thread_pool() {
    let d = out_dir("converge");
    let o = gilbert(&["converge", "--ks", "1,3", "--replicates", "2", "--window", "6", "--tiles", "2", "--threads", "2", "--out", d.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1 + 2 * 3);
}
