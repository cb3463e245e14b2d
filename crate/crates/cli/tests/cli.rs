use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kicktop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kicktop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = kicktop(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

fn csv_files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let n = e.unwrap().file_name().into_string().unwrap();
            n.ends_with(".csv").then_some(n)
        })
        .collect();
    v.sort();
    v
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(kicktop(&["--help"]).status.code(), Some(0));
    assert_eq!(kicktop(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["spectrum", "--bogus"],
        vec!["spectrum", "--kappa", "abc", "--out", out],
        vec!["spectrum", "--kappa", "-1", "--out", out],
        vec!["spectrum", "--j", "2.5", "--out", out],
        vec!["lyapunov", "--mode", "sideways", "--out", out],
        vec!["multifractal", "--mode", "scaling", "--j", "10,20,30", "--out", out],
        vec!["coeffdist", "--nu", "3", "--out", out],
        vec!["portrait", "--kappa", "1:0:0.1", "--out", out],
    ] {
        let o = kicktop(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn numerical_failure_exits_two() {
    // the odd sector of j = 1 holds a single level, too few for spacings
    let dir = tempfile::tempdir().unwrap();
    let o = kicktop(&["spectrum", "--j", "1", "--parity", "odd", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn identical_runs_write_identical_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        run_ok(&[
            "coeffdist", "--j", "30", "--kappa", "0.4,7", "--samples", "50", "--threads", "2",
            "--no-cache", "--out", d.path().to_str().unwrap(),
        ]);
    }
    let files = csv_files(a.path());
    assert_eq!(files, csv_files(b.path()));
    assert_eq!(files.len(), 5);
    for f in files {
        let (x, y) = (fs::read(a.path().join(&f)).unwrap(), fs::read(b.path().join(&f)).unwrap());
        // the config line records the output directory, which differs
        let strip = |v: Vec<u8>| -> Vec<String> {
            String::from_utf8(v)
                .unwrap()
                .lines()
                .filter(|l| !l.starts_with("# config"))
                .map(String::from)
                .collect()
        };
        assert_eq!(strip(x), strip(y), "{f}");
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (d, t) in [(&a, "1"), (&b, "3")] {
        run_ok(&[
            "lyapunov", "--mode", "scan", "--kappa", "0:6:2", "--alpha", "pi/2", "--samples", "40",
            "--kicks", "300", "--threads", t, "--out", d.path().to_str().unwrap(),
        ]);
    }
    for f in ["lyapunov-scan.csv", "lyapunov-kappa-c.csv"] {
        assert_eq!(data_lines(&a.path().join(f)), data_lines(&b.path().join(f)));
    }
}

#[test]
fn flags_override_config_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 3\nkappa = 7\n[spectrum]\nj = 40\nparity = \"both\"\n").unwrap();
    let out = dir.path().join("o");
    run_ok(&[
        "spectrum", "--config", cfg.to_str().unwrap(), "--seed", "11", "--out", out.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(out.join("spectrum-summary.csv")).unwrap();
    assert!(text.contains("# seed: 11"));
    let rows = data_lines(&out.join("spectrum-summary.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("40,7,") && rows[1].contains(",even,41,"));
    assert!(rows[2].contains(",odd,40,"));
}

#[test]
fn every_file_has_metadata_and_the_manifest_lists_it() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "multifractal", "--j", "20", "--kappa", "3", "--grid", "6", "--q", "0.5,1,2,inf", "--out",
        dir.path().to_str().unwrap(),
    ]);
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("manifest-multifractal.json")).unwrap(),
    )
    .unwrap();
    let listed: Vec<String> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(listed, csv_files(dir.path()));
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    for f in listed {
        let text = fs::read_to_string(dir.path().join(&f)).unwrap();
        let head: Vec<&str> = text.lines().take(5).collect();
        assert!(head[0].starts_with("# kicktop "));
        assert_eq!(head[1], "# command: multifractal");
        assert_eq!(head[2], "# seed: 0");
        assert!(head[3].starts_with("# config: {"));
        assert_eq!(head[4], "phi,theta,D_0.5,D_1,D_2,D_inf");
        let rows = data_lines(&dir.path().join(&f));
        assert_eq!(rows.len(), 1 + 36);
        for r in &rows[1..] {
            let d: Vec<f64> = r.split(',').skip(2).map(|x| x.parse().unwrap()).collect();
            assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
    }
}

#[test]
fn cached_eigensystems_reproduce_fresh_ones() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["multifractal", "--mode", "average", "--j", "25", "--kappa", "5", "--samples", "64", "--out", out];
    run_ok(&args);
    let cached: Vec<_> = fs::read_dir(dir.path().join("cache")).unwrap().collect();
    assert_eq!(cached.len(), 1);
    let first = data_lines(&dir.path().join("multifractal-average.csv"));
    run_ok(&args);
    assert_eq!(first, data_lines(&dir.path().join("multifractal-average.csv")));
    let mut fresh = args.to_vec();
    fresh.push("--no-cache");
    run_ok(&fresh);
    assert_eq!(first, data_lines(&dir.path().join("multifractal-average.csv")));
}

#[test]
fn trivial_portrait_is_stationary() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "portrait", "--kappa", "0", "--alpha", "0", "--orbits", "7", "--kicks", "20", "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rows = data_lines(&dir.path().join("portrait-k0-a0.csv"));
    assert_eq!(rows[0], "orbit,kick,phi,theta");
    assert_eq!(rows.len(), 1 + 7 * 21);
    for orbit in rows[1..].chunks(21) {
        let first: Vec<&str> = orbit[0].split(',').skip(2).collect();
        for r in orbit {
            let v: Vec<&str> = r.split(',').skip(2).collect();
            assert_eq!(v, first);
        }
    }
}

#[test]
fn coefficient_summary_has_one_row_per_law() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "coeffdist", "--j", "30", "--kappa", "7", "--samples", "200", "--nu", "1,2,4", "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rows = data_lines(&dir.path().join("coeffdist-summary.csv"));
    assert_eq!(rows.len(), 4);
    let skld: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    // chaotic overlaps are far from chi^2_4
    assert!(skld[2] > skld[1]);
}
