use std::path::Path;
use std::process::{Command, Output};

use kf_steiner::metrics::{d1, epsilon_grid};
use kf_steiner::planar_sets::io::{parse_pgm, parse_polygon, write_pgm};
use kf_steiner::planar_sets::{rasterize_ball, Ball, ConvexPolygon, GridSpec, Point};
use kf_steiner::sequences::GAMMA;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kf-steiner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Fails with a diagnostic whose first line starts with `error:`.
fn fails(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} should fail");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error:"), "{err}");
    err
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn col(csv: &str, name: &str) -> Vec<f64> {
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    rows(csv).iter().map(|r| r[i].parse().unwrap()).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn seq_kinds() {
    let kf = ok(&["seq", "--kind", "kf", "--n", "12"]);
    assert_eq!(kf.lines().next(), Some("k,x,theta"));
    let xs = col(&kf, "x");
    assert_eq!(xs.len(), 12);
    assert!((xs[0] - GAMMA).abs() < 1e-14);
    let vdc = ok(&["seq", "--kind", "vdc", "--base", "2", "--n", "4"]);
    assert_eq!(col(&vdc, "x"), vec![0.5, 0.25, 0.75, 0.125]);
    let kr = ok(&["seq", "--kind", "kronecker", "--alpha", "gamma", "--n", "2"]);
    assert!((col(&kr, "x")[1] - (2.0 * GAMMA).fract()).abs() < 1e-14);
    fails(&["seq", "--kind", "kf", "--n", "0"]);
    fails(&["seq", "--kind", "halton", "--n", "3"]);
}

#[test]
fn partition_rows() {
    let out = ok(&["partition", "--alpha", "gamma", "--level", "5"]);
    assert_eq!(out.lines().last(), Some("5,13,8,5"));
    let out = ok(&["partition", "--alpha", "0.5", "--level", "3"]);
    assert_eq!(out.lines().last(), Some("3,8,8,0"));
    let out = ok(&["partition", "--alpha", "0.3", "--level", "4"]);
    assert!(out.lines().last().unwrap().ends_with(",,"));
    fails(&["partition", "--alpha", "1.2", "--level", "3"]);
    let err = fails(&["partition", "--alpha", "gamma", "--level", "60", "--cap", "1000"]);
    assert!(err.contains("1000"), "{err}");
    let dump = ok(&["partition", "--alpha", "gamma", "--level", "2", "--dump-breakpoints"]);
    assert_eq!(dump.lines().next(), Some("level,index,breakpoint"));
    assert_eq!(dump.lines().count(), 1 + 4);
    assert_eq!(dump.lines().nth(2), Some("2,1,0.381966011250105"));
}

#[test]
fn disc_rows() {
    let out = ok(&["disc", "--kind", "kf", "--ns", "100,1000,10000"]);
    let norm = col(&out, "normalized");
    assert_eq!(norm.len(), 3);
    assert!(norm.iter().all(|&c| c <= 3.0));
    let out = ok(&["disc", "--kind", "kronecker", "--alpha", "0.5", "--ns", "100"]);
    assert!(col(&out, "d_star")[0] >= 0.49);
    let out = ok(&["disc", "--kind", "vdc", "--ns", "64", "--extreme"]);
    let (ds, de) = (col(&out, "d_star")[0], col(&out, "d_extreme")[0]);
    assert!(de >= ds);
    fails(&["disc", "--kind", "kf"]);
}

#[test]
fn symmetrize_sets() {
    let dir = tempfile::tempdir().unwrap();
    let square = dir.path().join("square.txt");
    std::fs::write(&square, "0 0\n1 0\n1 1\n0 1\n").unwrap();
    let out = dir.path().join("out.txt");
    ok(&["symmetrize", "--in", s(&square), "--x", "0.5", "--out", s(&out)]);
    let got = parse_polygon(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let want = ConvexPolygon::rectangle(0.0, 1.0, -0.5, 0.5).unwrap();
    assert!(got.symmetric_difference_area(&want) < 1e-12);

    let grid = GridSpec::new(64, 64, 0.05, Point::new(0.0, 0.0)).unwrap();
    let ball = rasterize_ball(&Ball { radius: 1.2 }, &grid).unwrap();
    let pgm = dir.path().join("ball.pgm");
    write_pgm(&ball, &pgm).unwrap();
    let sym = dir.path().join("sym.pgm");
    ok(&["symmetrize", "--in", s(&pgm), "--theta", "0.7", "--out", s(&sym)]);
    let back = parse_pgm(&std::fs::read(&sym).unwrap()).unwrap();
    let reread = parse_pgm(&std::fs::read(&pgm).unwrap()).unwrap();
    assert!(d1(&back, &reread).unwrap() <= epsilon_grid(&reread));

    fails(&["symmetrize", "--in", s(&square), "--x", "0.5", "--theta", "1", "--out", s(&out)]);
    let junk = dir.path().join("junk.dat");
    std::fs::write(&junk, "hello\n").unwrap();
    let err = fails(&["symmetrize", "--in", s(&junk), "--x", "0.5", "--out", s(&out)]);
    assert!(err.contains("PGM") && err.contains("polygon"), "{err}");
}

#[test]
fn process_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    ok(&["process", "--seed", "builtin:square", "--kind", "kf", "--steps", "60", "--out", s(&out)]);
    let csv = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(kf_steiner::process::TRACE_HEADER));
    let mu = col(&csv, "mu");
    assert_eq!(mu.len(), 61);
    assert!(mu.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    let area = col(&csv, "area");
    assert!(area.iter().all(|a| (a - 1.0).abs() < 1e-9));

    let err = fails(&["process", "--seed", "builtin:hexagon", "--steps", "3"]);
    assert!(err.contains("l-shape") && err.contains("annulus"), "{err}");
    fails(&["process", "--seed", "builtin:square", "--steps", "3", "--frames"]);
}

#[test]
fn process_frames_on_a_raster_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let args = [
        "process", "--seed", "builtin:two-component", "--grid", "96x96:0.04", "--steps", "6", "--cadence", "3",
        "--frames", "--out", s(&out),
    ];
    ok(&args);
    let steps: Vec<f64> = col(&std::fs::read_to_string(out.join("trace.csv")).unwrap(), "step");
    assert_eq!(steps, vec![0.0, 3.0, 6.0]);
    for step in [0, 3, 6] {
        assert!(out.join(format!("frame_{step}.pgm")).exists());
    }
}

#[test]
fn compare_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    ok(&[
        "compare", "--seed", "builtin:square", "--kinds", "kf,vdc2", "--steps", "30", "--jobs", "2", "--out", s(&out),
    ]);
    let csv = std::fs::read_to_string(out.join("compare.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("step,d1_to_ball:kf,mu:kf,d1_to_ball:vdc:2,mu:vdc:2")
    );
    assert_eq!(col(&csv, "step"), (0..=30).map(f64::from).collect::<Vec<_>>());
    fails(&["compare", "--seed", "builtin:square", "--kinds", "kf,nope", "--steps", "3"]);
}

#[test]
fn identical_argv_gives_identical_bytes() {
    let args = ["process", "--seed", "builtin:l-shape", "--grid", "64x64:0.05", "--steps", "12", "--kind", "random:9"];
    assert_eq!(ok(&args), ok(&args));
    let args = ["disc", "--kind", "kf", "--ns", "10,100,1000", "--extreme"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn every_subcommand_has_help() {
    let flags: &[(&str, &[&str])] = &[
        ("seq", &["--kind", "--n", "--base", "--alpha", "--out"]),
        ("partition", &["--alpha", "--level", "--out", "--dump-breakpoints"]),
        ("disc", &["--kind", "--ns", "--out", "--extreme"]),
        ("symmetrize", &["--in", "--theta", "--x", "--out"]),
        ("process", &["--seed", "--kind", "--steps", "--cadence", "--grid", "--out", "--frames"]),
        ("compare", &["--seed", "--kinds", "--steps", "--cadence", "--grid", "--out", "--jobs"]),
        ("checkpoints", &["--seed", "--max-k", "--out"]),
    ];
    for (cmd, names) in flags {
        let help = ok(&[cmd, "--help"]);
        for f in *names {
            assert!(help.contains(f), "{cmd} --help lacks {f}");
        }
    }
}

#[test]
fn checkpoints_csv() {
    let out = ok(&["checkpoints", "--max-k", "6"]);
    assert_eq!(out.lines().next(), Some("k,step,theta,direction_ok,defect"));
    assert_eq!(col(&out, "step"), vec![1.0, 2.0, 3.0, 5.0, 8.0, 13.0]);
    assert!(col(&out, "defect").iter().all(|d| *d < 1e-9));
    fails(&["checkpoints", "--max-k", "40"]);
}
