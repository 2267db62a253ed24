use std::path::Path;
use std::process::{Command, Output};

fn slsolve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slsolve"))
        .args(args)
        .output()
        .expect("slsolve runs")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const HEADER: &str = "method,problem,n,M,N,h,size,eig_index,mu,abs_error,succ_error,runtime_ms";

#[test]
fn laguerre_balanced_study() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("laguerre.csv");
    let o = slsolve(&[
        "--problem",
        "laguerre",
        "--param",
        "alpha=3",
        "--method",
        "de",
        "--balanced",
        "--n-min",
        "5",
        "--n-max",
        "40",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), HEADER);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 37);
    let last = rows.last().unwrap();
    assert_eq!(last[0], "de-balanced");
    assert_eq!(last[2], "40");
    let abs_error: f64 = last[9].parse().unwrap();
    assert!(abs_error <= 1e-8);
    assert!(last[10].is_empty());
    let descm_records = descm::read_csv(text.as_bytes()).unwrap();
    assert_eq!(descm_records.len(), 36);
}

#[test]
fn compare_with_rate_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bessel.csv");
    let o = slsolve(&[
        "--problem",
        "bessel",
        "--n-min",
        "1",
        "--n-max",
        "30",
        "--compare",
        "--rate-fit",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    for method in ["se", "de", "de-balanced"] {
        assert!(
            stdout.contains(&format!("rate fit {method}: kappa_hat")),
            "{stdout}"
        );
    }
    let methods: std::collections::BTreeSet<String> =
        csv_rows(&out)[1..].iter().map(|r| r[0].clone()).collect();
    assert_eq!(methods.len(), 3);
}

#[test]
fn singular_without_reference_uses_successive_differences() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("singular.csv");
    let o = slsolve(&[
        "--problem",
        "singular",
        "--method",
        "de",
        "--kappa",
        "1",
        "--n-min",
        "4",
        "--n-max",
        "6",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out);
    assert!(rows[1][10].is_empty() && rows[1][9].is_empty());
    assert!(!rows[2][10].is_empty() && rows[2][9].is_empty());
}

#[test]
fn problem_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bessel.cfg");
    std::fs::write(
        &cfg,
        "param n = 1\ninterval = unit\nq = (4*n^2-1)/(4*x^2)\nrho = 1\nd = pi/2\nbeta_l = n\nbeta_r = 0.5\ngamma_l = 1\ngamma_r = 1\n",
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    let o = slsolve(&[
        "--problem",
        cfg.to_str().unwrap(),
        "--balanced",
        "--n-min",
        "20",
        "--n-max",
        "20",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out);
    let mu: f64 = rows[1][8].parse().unwrap();
    assert!((mu - 3.8317059702075123f64.powi(2)).abs() < 1e-9);
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    let cases: &[&[&str]] = &[
        &["--problem", "cubic", "--output", out],
        &["--problem", "bessel", "--param", "n=0", "--output", out],
        &["--problem", "bessel", "--param", "n", "--output", out],
        &["--problem", "laguerre", "--kappa", "0.5", "--output", out],
        &[
            "--problem",
            "bessel",
            "--n-min",
            "5",
            "--n-max",
            "2",
            "--output",
            out,
        ],
        &[
            "--problem",
            "bessel",
            "--method",
            "se",
            "--balanced",
            "--output",
            out,
        ],
        &["--problem", "bessel", "--method", "fe", "--output", out],
        &["--problem", "/nonexistent/problem.cfg", "--output", out],
        &[
            "--problem",
            "bessel",
            "--n-max",
            "3",
            "--output",
            "/nonexistent/dir/out.csv",
        ],
    ];
    for args in cases {
        let o = slsolve(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn parse_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "interval = unit\nq = 1 + foo(x)\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = slsolve(&[
        "--problem",
        cfg.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("2:9"), "{stderr}");
}

#[test]
fn solver_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("overflow.cfg");
    // q overflows far out on the coarse SE mesh
    std::fs::write(
        &cfg,
        "interval = realline\nq = exp(x^2/2)\nrho = 1\nmap = se\nalpha_se = 1e-4\nd = 1\nbeta_l = 1\nbeta_r = 1\ngamma_l = 1\ngamma_r = 1\n",
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    let o = slsolve(&[
        "--problem",
        cfg.to_str().unwrap(),
        "--n-min",
        "1",
        "--n-max",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("n = 1"), "{stderr}");
}
