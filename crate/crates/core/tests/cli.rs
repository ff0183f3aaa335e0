use std::path::Path;
use std::process::{Command, Output};

fn qconv(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qconv"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gencode(dir: &Path, seed: &str) {
    let o = qconv(&["gencode", "--n", "4", "--k", "1", "--m", "1", "--seed", seed, "--out", "c.qcc"], dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gencode_then_decode_zeros_gives_identity() {
    let dir = tempfile::tempdir().unwrap();
    gencode(dir.path(), "7");
    let o = qconv(&["decode", "--code", "c.qcc", "--tau", "3", "--p", "0.05", "--syndrome", "zeros"], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("degenerate labels I I I"), "{out}");
    assert!(out.contains("nondegenerate labels I I I"), "{out}");
    assert!(out.starts_with("# decode"), "config is logged first: {out}");
}

#[test]
fn decode_reads_syndrome_file_and_dumps_trellis() {
    let dir = tempfile::tempdir().unwrap();
    gencode(dir.path(), "3");
    std::fs::write(dir.path().join("s.txt"), "101\n000\n1\n").unwrap();
    let o = qconv(
        &["decode", "--code", "c.qcc", "--tau", "2", "--px", "0.02", "--py", "0.01", "--pz", "0.03", "--syndrome", "s.txt",
          "--mode", "degenerate", "--dump-trellis", "t.txt"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dump = std::fs::read_to_string(dir.path().join("t.txt")).unwrap();
    let edges: Vec<_> = dump.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(!edges.is_empty());
    for l in edges {
        let f: Vec<_> = l.split_whitespace().collect();
        assert_eq!(f.len(), 5, "{l}");
        assert!(f[0] == "1" || f[0] == "2");
        f[4].parse::<f64>().unwrap();
    }
}

#[test]
fn decode_rejects_mismatched_syndrome() {
    let dir = tempfile::tempdir().unwrap();
    gencode(dir.path(), "3");
    std::fs::write(dir.path().join("s.txt"), "101\n1\n").unwrap();
    let o = qconv(&["decode", "--code", "c.qcc", "--tau", "2", "--p", "0.05", "--syndrome", "s.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--syndrome"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = qconv(&["bench", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn invalid_value_names_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    gencode(dir.path(), "1");
    let o = qconv(&["decode", "--code", "c.qcc", "--p", "0.5", "--syndrome", "zeros"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--p"));
    let o = qconv(&["gencode", "--n", "1", "--k", "1", "--m", "1", "--out", "x.qcc"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--n"));
}

#[test]
fn oracle_check_small_codes_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = qconv(&["oracle-check", "--n", "2", "--k", "1", "--m", "1", "--tau", "2", "--trials", "50", "--seed", "1"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("merged path matches 50/50"));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = qconv(&["selftest"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn bench_writes_csv_and_plot_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    gencode(dir.path(), "309");
    let run = |out: &str, workers: &str| {
        let o = qconv(
            &["bench", "--code", "c.qcc", "--tau", "100", "--p-list", "0.005,0.01", "--min-failures", "5",
              "--max-trials", "2000", "--seed", "3", "--workers", workers, "--out", out, "--plot", "p.svg"],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "3");
    assert_eq!(a, b);
    let lines: Vec<_> = a.lines().collect();
    assert_eq!(lines[0], "code_id,n,k,m,tau,p,seed,trials,failures_deg,failures_nondeg,ber_deg,ber_nondeg,ratio,ratio_db,resolved");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("c,4,1,1,100,0.005,3,"));
    let svg = std::fs::read_to_string(dir.path().join("p.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}
