use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_uncertain-pricing");

fn run(dir: &Path, name: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join(name);
    fs::write(&path, config).unwrap();
    Command::new(BIN).arg(&path).args(extra).output().unwrap()
}

const PRICE_BS: &str = "command = price-bs
spot = 100
strike = 100
maturity = 1
vol = 0.2
vol_bias = 0
vol_var = 4e-4
alpha = 0.01
method = gaussian
";

#[test]
fn price_bs_writes_the_reference_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = run(
        dir.path(),
        "bs.cfg",
        PRICE_BS,
        &["--output", csv.to_str().unwrap()],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    let printed: Vec<f64> = stdout
        .lines()
        .nth(1)
        .unwrap()
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    for (v, e) in printed[2..]
        .iter()
        .zip([6.118274, 7.965170, 9.812066, 3.693792])
    {
        assert!((v - e).abs() < 1e-5, "{stdout}");
    }
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "strike,maturity,price,bias,variance,bid,mid,ask,spread"
    );
    let row: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((row[6] - 7.965170).abs() < 1e-5);
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn input_errors_exit_with_one_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "a.cfg",
        &PRICE_BS.replace("alpha = 0.01", "alpha = 0.7"),
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("line 8") && err.contains("alpha must lie in (0, 0.5)"),
        "{err}"
    );
    assert_eq!(err.trim().lines().count(), 1);

    let out = run(
        dir.path(),
        "b.cfg",
        &PRICE_BS.replace("vol_var = 4e-4", "vol_var = -1e-4"),
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("semi-definite"));

    let out = Command::new(BIN)
        .arg(dir.path().join("missing.cfg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn same_config_and_seed_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "command = price-cev
spot = 1
maturity = 1
vol = 0.2
beta = 0.7
vol_var = 4e-4
beta_var = 1e-4
steps = 32
paths = 4000
seed = 3
";
    let mut outputs = Vec::new();
    for (i, seed) in ["3", "3", "4"].iter().enumerate() {
        let csv = dir.path().join(format!("cev{i}.csv"));
        let out = run(
            dir.path(),
            "cev.cfg",
            cfg,
            &["--output", csv.to_str().unwrap(), "--seed", seed],
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_ne!(outputs[0], outputs[2]);

    let hedge = "command = hedge-sim
spot = 100
strike = 100
maturity = 1
vol = 0.2
vol_var = 4e-4
steps = 16
paths = 500
lattice_time_nodes = 9
lattice_spot_nodes = 17
lattice_paths = 64
";
    let a = dir.path().join("h1.csv");
    let b = dir.path().join("h2.csv");
    run(
        dir.path(),
        "h.cfg",
        hedge,
        &["--output", a.to_str().unwrap()],
    );
    run(
        dir.path(),
        "h.cfg",
        hedge,
        &["--output", b.to_str().unwrap()],
    );
    let (a, b) = (fs::read(a).unwrap(), fs::read(b).unwrap());
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 501);
}

#[test]
fn smile_and_pnl_commands_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("smile.csv");
    let out = run(
        dir.path(),
        "smile.cfg",
        "command = smile\nspot = 100\nstrike = 90,95,100,105,110\nmaturity = 0.25,1,2\nvol = 0.2\nvol_bias = atm-neutral\nvol_var = 4e-4\n",
        &["--output", csv.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 16);

    let out = run(
        dir.path(),
        "pnl.cfg",
        "command = pnl\nspot = 100\nstrike = 100\nmaturity = 1\nvol = 0.2\nvol_bias = 0.01\nvol_var = 4e-4\nsteps = 32\npaths = 5000\n",
        &[],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.contains("variance") && stdout.contains("tail_bound_k3"),
        "{stdout}"
    );

    let out = run(
        dir.path(),
        "d.cfg",
        "command = pnl\nspot = 100\nstrike = 100\nmaturity = 1\nvol = 0.2\npayoff = digital\n",
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "st.cfg", "command = selftest\n", &[]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(!stdout.contains("FAIL"));
}
