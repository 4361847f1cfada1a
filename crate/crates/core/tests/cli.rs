use std::io::Write;
use std::process::{Command, Output};

fn mlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlc"))
        .args(args)
        .env_remove("MLC_THREADS")
        .output()
        .expect("mlc runs")
}

fn mlc_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlc"))
        .args(args)
        .env("MLC_THREADS", threads)
        .output()
        .expect("mlc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Value columns of the single data row of an ML or gamma CSV.
fn row_fields(o: &Output) -> Vec<String> {
    let text = stdout(o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let row: Vec<String> = lines.next().expect("row").split(',').map(String::from).collect();
    assert_eq!(header.len(), row.len(), "{text}");
    row
}

fn column(o: &Output, name: &str) -> String {
    let text = stdout(o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).expect("column");
    row_fields(o)[idx].clone()
}

fn value(o: &Output) -> (f64, f64) {
    (column(o, "value_re").parse().unwrap(), column(o, "value_im").parse().unwrap())
}

#[test]
fn eval_contour_gives_exp_minus_one() {
    let o = mlc(&["eval", "--rho", "1", "--z-mod", "1", "--z-arg-pi", "1", "--method", "contour"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (re, im) = value(&o);
    assert!((re - (-1.0f64).exp()).abs() < 1e-12);
    assert!(im.abs() < 1e-12);
    assert_eq!(column(&o, "status"), "ok");
    assert_eq!(column(&o, "method"), "zetaContour");
}

#[test]
fn eval_outside_window_is_rejected() {
    let o = mlc(&["eval", "--rho", "2", "--z-mod", "1", "--z-arg", "0", "--method", "contour"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    let msg = stderr(&o);
    assert!(msg.contains("arg-z-window"), "{msg}");
    assert!(msg.contains("arg z"), "{msg}");
}

#[test]
fn auto_falls_back_to_series() {
    let o = mlc(&["eval", "--rho", "2", "--z-mod", "1", "--z-arg", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let (re, _) = value(&o);
    // Σ zⁿ/Γ(1 + n/2) = exp(z²) erfc(−z)
    assert!((re - 5.008_980_080_762_283_5).abs() < 1e-13);
    assert_eq!(column(&o, "method"), "series");
    assert!(column(&o, "flags").contains("outside_window"));
}

#[test]
fn eval_gamma_methods_agree() {
    let mut values = Vec::new();
    for method in ["contour", "lambda", "oracle"] {
        let o = mlc(&["eval", "--target", "gamma", "--s-re", "0.5", "--method", method]);
        assert_eq!(o.status.code(), Some(0), "{method}: {}", stderr(&o));
        values.push(value(&o).0);
    }
    let expected = 1.0 / std::f64::consts::PI.sqrt();
    for v in values {
        assert!((v - expected).abs() < 1e-13, "{v}");
    }
}

#[test]
fn window_values() {
    let o = mlc(&["window", "--rho", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let pi = std::f64::consts::PI;
    assert!((v["low"].as_f64().unwrap() - pi / 2.0).abs() < 1e-15);
    assert!((v["high"].as_f64().unwrap() - 1.5 * pi).abs() < 1e-15);
    assert_eq!(v["inclusive"], false);

    let o = mlc(&["window", "--rho", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["low"].as_f64().unwrap() - 0.75 * pi).abs() < 1e-15);
    assert!((v["high"].as_f64().unwrap() - 1.25 * pi).abs() < 1e-15);
}

#[test]
fn window_rejects_bad_delta() {
    let o = mlc(&["window", "--rho", "2", "--delta1rho", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("delta1rho"));
}

#[test]
fn invariance_thresholds() {
    let args = ["invariance", "--target", "gamma", "--s-re", "2.5", "--s-im", "1"];
    let o = mlc(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "psi");
    let spread: f64 = row[3].parse().unwrap();
    assert!(spread < 1e-12);
    assert_eq!(row[5], "true");

    let mut strict = args.to_vec();
    strict.extend(["--threshold", "1e-17"]);
    let o = mlc(&strict);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invariance_ml_epsilon_sweep() {
    let o = mlc(&[
        "invariance", "--rho", "0.75", "--mu-re", "0.5", "--z-mod", "2", "--z-arg-pi", "1", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["spread"].as_f64().unwrap() < 1e-8);
}

#[test]
fn invariance_without_admissible_points() {
    let o = mlc(&["invariance", "--rho", "0.5", "--z-mod", "2", "--z-arg-pi", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("notice:"));
}

#[test]
fn single_point_grid_matches_eval() {
    let point = ["--rho", "0.8", "--mu-re", "1.5", "--mu-im", "0.25"];
    let mut eval = vec!["eval"];
    eval.extend(point);
    eval.extend(["--z-mod", "1.5", "--z-arg", "3"]);
    let mut grid = vec!["grid"];
    grid.extend(point);
    grid.extend([
        "--z-mod-min", "1.5", "--z-mod-max", "1.5", "--z-mod-step", "1", "--z-arg-min", "3", "--z-arg-max", "3",
        "--z-arg-step", "1",
    ]);
    let a = mlc(&eval);
    let b = mlc(&grid);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn gamma_grid_rows() {
    let o = mlc(&[
        "grid", "--target", "gamma", "--s-re-min", "-2.5", "--s-re-max", "3.5", "--s-re-step", "3", "--s-im-min", "-2",
        "--s-im-max", "2", "--s-im-step", "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.ends_with(",ok")), "{text}");
}

#[test]
fn full_gamma_grid_is_all_ok() {
    let o = mlc(&[
        "grid", "--target", "gamma", "--s-re-min", "-3.5", "--s-re-max", "4.5", "--s-re-step", "1", "--s-im-min", "-3",
        "--s-im-max", "3", "--s-im-step", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    // 9 real parts by 7 imaginary parts
    assert_eq!(rows.len(), 63);
    assert!(rows.iter().all(|r| r.ends_with(",ok")), "{text}");
}

#[test]
fn grid_marks_points_outside_window() {
    let o = mlc(&[
        "grid", "--rho", "1.5", "--z-mod-min", "1", "--z-mod-max", "1", "--z-mod-step", "1", "--z-arg-min", "0",
        "--z-arg-max", "3.14", "--z-arg-step", "1", "--method", "contour",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let statuses: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(statuses, ["window_violation", "window_violation", "window_violation", "ok"]);
}

#[test]
fn grid_is_deterministic_across_processes() {
    let args: Vec<&str> = mlcontour::acceptance::DETERMINISM_GRID.to_vec();
    let a = mlc_threads(&args, "8");
    let b = mlc_threads(&args, "8");
    let c = mlc_threads(&args, "1");
    assert_eq!(a.status.code(), Some(0));
    assert!(stdout(&a).lines().count() > 10);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = std::env::temp_dir().join(format!("mlc-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("point.cfg");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# E_1,1 at -1\nrho = 1\nz_mod = 1\nz-arg-pi = 1\nmethod = series").unwrap();
    drop(f);
    let p = path.to_str().unwrap();

    let from_file = mlc(&["eval", "--config", p]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    assert_eq!(column(&from_file, "method"), "series");

    let overridden = mlc(&["eval", "--config", p, "--method", "contour"]);
    assert_eq!(overridden.status.code(), Some(0), "{}", stderr(&overridden));
    assert_eq!(column(&overridden, "method"), "zetaContour");
    let (a, _) = value(&from_file);
    let (b, _) = value(&overridden);
    assert!((a - b).abs() < 1e-14);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_output() {
    let o = mlc(&["eval", "--rho", "1", "--z-mod", "1", "--z-arg-pi", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value_re"].as_f64().unwrap() - (-1.0f64).exp()).abs() < 1e-12);
    assert_eq!(v["status"], "ok");
}

#[test]
fn compare_lists_every_route() {
    let o = mlc(&["compare", "--rho", "0.75", "--mu-re", "1", "--z-mod", "1", "--z-arg-pi", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for m in ["series", "zetaContour", "bateman", "dzhrbashyan"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("method,{m},"))), "{m}: {text}");
    }
}

#[test]
fn selftest_subset() {
    let o = mlc(&["selftest", "--only", "gamma"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains(" PASS: ")).count(), 5);
    assert!(text.contains("5/5 criteria passed"));

    let o = mlc(&["selftest", "--only", "9", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"][0]["id"], 9);
    assert_eq!(v["results"][0]["passed"], true);
}

#[test]
fn unknown_selftest_group_is_an_error() {
    let o = mlc(&["selftest", "--only", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}
