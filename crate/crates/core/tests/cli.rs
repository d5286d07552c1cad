use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polar-detect"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_owned)
        .collect()
}

const FEW_BLOCKS: [&str; 6] = ["--min-blocks", "300", "--min-errors", "0", "--max-blocks", "300"];

#[test]
fn bler_sweep_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["bler", "--decoder", "sc", "--ebn0", "3.0:6.0:0.5"];
    args.extend(FEW_BLOCKS);
    let o = run(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = data_rows(&dir.path().join("bler_sc.csv"));
    assert_eq!(rows.len(), 7);
    assert!(rows[0].starts_with("3,"));
    assert!(rows[6].starts_with("6,"));
}

#[test]
fn bler_default_set_writes_five_files_and_noiseless_is_error_free() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["bler", "--noiseless"];
    args.extend(FEW_BLOCKS);
    let o = run(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["sc", "bp15", "bp50", "scl2", "scl4"] {
        let path = dir.path().join(format!("bler_{name}.csv"));
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains(&format!("# decoder={name}")));
        for row in data_rows(&path) {
            assert_eq!(row.split(',').nth(1), Some("0"), "{row}");
        }
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 5);
}

#[test]
fn bad_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bler", "--decoder", "viterbi"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown decoder"));

    let o = run(&["mdr", "--method", "fs", "--B", "3:1"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["mdr", "--method", "fs", "--B", "45", "--ebn0", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["mdr", "--method", "ls", "--iters", "1", "--ebn0", "4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least two decoding iterations are required"));

    let o = run(&["no-such-command"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mdr_rows_and_efforts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["mdr", "--method", "fs", "--iters", "3", "--B", "1:44", "--trials", "40", "--ebn0", "4.3"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let path = dir.path().join("mdr_fs.csv");
    let rows = data_rows(&path);
    assert_eq!(rows.len(), 44);
    assert!(rows.iter().all(|r| r.starts_with("fs,3,")));
    assert_eq!(rows.last().unwrap().split(',').nth(3), Some("0"));

    let o = run(
        &["mdr", "--method", "fastssc", "--no-spc", "--t", "1:14", "--B", "4,33", "--trials", "30", "--ebn0", "4.3"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = data_rows(&dir.path().join("mdr_fastssc-nospc.csv"));
    let mut efforts: Vec<&str> = rows.iter().map(|r| r.split(',').nth(1).unwrap()).collect();
    efforts.dedup();
    assert_eq!(efforts.len(), 14);
    assert_eq!(rows.len(), 28);
}

#[test]
fn mdr_reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["mdr", "--method", "re", "--iters", "2:4", "--trials", "40", "--ebn0", "4.0", "--seed", "5"];
    let o = run(&args, a.path());
    assert!(o.status.success());
    let mut args2 = args.to_vec();
    args2.extend(["--threads", "3"]);
    assert!(run(&args2, b.path()).status.success());
    let (x, y) = (fs::read(a.path().join("mdr_re.csv")).unwrap(), fs::read(b.path().join("mdr_re.csv")).unwrap());
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    for key in ["# N=256", "# K=24", "# C=16", "# seed=5", "# ebn0_db=4", "# trials=40", "# M=44", "# efforts=2,3,4"] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "seed = 8\n[mdr]\nmethod = \"fs\"\niters = [2, 3]\nB = \"1:4\"\ntrials = 25\nebn0 = 4.5\n",
    )
    .unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "mdr", "--iters", "5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("mdr_fs.csv")).unwrap();
    assert!(text.contains("# seed=8"));
    assert!(text.contains("# efforts=5\n"));
    assert!(text.contains("# trials=25"));
    assert_eq!(data_rows(&dir.path().join("mdr_fs.csv")).len(), 4);

    fs::write(&cfg, "unknown_key = 1\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "code-info"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn calibrate_is_monotone_in_target_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "calibrate", "-N", "64", "-K", "8", "--decoder", "sc", "--lo", "0", "--hi", "10", "--min-blocks", "2000",
        "--min-errors", "50", "--max-blocks", "20000",
    ];
    let mut hi_target = base.to_vec();
    hi_target.extend(["--target", "0.5"]);
    let mut lo_target = base.to_vec();
    lo_target.extend(["--target", "0.01"]);
    let db = |o: &Output| -> f64 {
        assert!(o.status.success(), "{}", stderr(o));
        let s = stdout(o);
        let line = s.lines().find(|l| l.starts_with("ebn0_db=")).unwrap();
        assert!(s.contains("ci95=["));
        line["ebn0_db=".len()..].parse().unwrap()
    };
    let a = run(&lo_target, dir.path());
    let b = run(&lo_target, dir.path());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(db(&run(&hi_target, dir.path())) < db(&a));

    let mut unreachable = base.to_vec();
    unreachable[8] = "9";
    unreachable.extend(["--target", "0.01"]);
    assert_eq!(run(&unreachable, dir.path()).status.code(), Some(1));
}

fn code_info(args: &[&str]) -> String {
    let dir = tempfile::tempdir().unwrap();
    let mut all = vec!["code-info"];
    all.extend(args);
    let o = run(&all, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o)
}

#[test]
fn code_info_listings() {
    let s = code_info(&["-N", "4", "-K", "1", "-C", "0"]);
    assert!(s.contains("leaves (1): start size kind\n0 4 REP\n"), "{s}");
    assert!(s.contains("info_set (1):\n3\n"));
    assert!(s.contains("frozen_set (3):\n0\n1\n2\n"));

    let s = code_info(&["-N", "8", "-K", "0", "-C", "0"]);
    assert!(s.contains("leaves (1): start size kind\n0 8 RATE0\n"), "{s}");

    let s = code_info(&[]);
    assert!(s.contains("N=256\nK=24\nC=16\n"));
    assert!(s.contains("info_set (40):"));
    assert!(s.contains("frozen_set (216):"));
    assert!(s.contains("contributing_leaves_without_spc=14\n"));
    assert_eq!(s, code_info(&[]));
}
