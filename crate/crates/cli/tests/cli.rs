use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn advectlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_advectlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn efficiency_writes_csv_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eff");
    let run = advectlab(&[
        "efficiency",
        "--schemes",
        "jet,weno-nolimit",
        "--h",
        "1/10,1/20",
        "--T",
        "1",
        "--out",
        path(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));

    let csv = fs::read_to_string(out.join("efficiency.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# generated "));
    assert_eq!(
        lines[1],
        "scheme,h,n_nodes,steps,linf_error,wall_seconds,velocity_evals"
    );
    assert_eq!(lines.len(), 2 + 4);
    let jet_coarse: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(&jet_coarse[..4], ["jet", "0.1", "100", "10"]);
    assert_eq!(jet_coarse[6], "3000");
    for plot in ["error_vs_h.svg", "time_vs_h.svg", "time_vs_error.svg"] {
        assert!(fs::read_to_string(out.join(plot)).unwrap().contains("<svg"));
    }
}

#[test]
fn contours_writes_every_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let run = advectlab(&[
        "contours",
        "--schemes",
        "jet,dg",
        "--h",
        "1/10",
        "--T",
        "1",
        "--reference-h",
        "1/20",
        "--subgrid",
        "4",
        "--out",
        path(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let csv = fs::read_to_string(out.join("contours.csv")).unwrap();
    assert_eq!(
        csv.lines().nth(1),
        Some("scheme,level,polyline_id,point_index,x,y,closed")
    );
    for scheme in ["jet", "dg", "reference"] {
        assert!(
            csv.lines().any(|l| l.starts_with(&format!("{scheme},"))),
            "{scheme} missing"
        );
        assert!(out.join(format!("contours_{scheme}.svg")).exists());
    }
    assert!(out.join("contour_metrics.csv").exists());
}

#[test]
fn blow_up_exits_with_abort_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let run = advectlab(&[
        "efficiency",
        "--schemes",
        "weno",
        "--h",
        "1/40",
        "--T",
        "40",
        "--dt-factor",
        "8",
        "--out",
        path(&out),
    ]);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stdout).contains("FAILED"));
    let csv = fs::read_to_string(out.join("efficiency.csv")).unwrap();
    assert!(csv.lines().nth(2).unwrap().contains("NaN"));
}

#[test]
fn invalid_configuration_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    for args in [
        vec!["efficiency", "--h", "0.3", "--out", path(&out)],
        vec!["efficiency", "--h", "1/10", "--eps=-1", "--out", path(&out)],
        vec!["efficiency", "--schemes", "upwind", "--out", path(&out)],
        vec![
            "contours",
            "--h",
            "1/10",
            "--subgrid",
            "1",
            "--out",
            path(&out),
        ],
        vec!["efficiency"],
    ] {
        assert_eq!(code(&advectlab(&args)), 3, "{args:?}");
    }
}

#[test]
fn help_exits_cleanly() {
    let run = advectlab(&["--help"]);
    assert_eq!(code(&run), 0);
    let text = String::from_utf8_lossy(&run.stdout);
    for sub in ["efficiency", "contours", "verify"] {
        assert!(text.contains(sub));
    }
}

#[test]
fn verify_prints_one_line_per_check() {
    let run = advectlab(&["verify", "--seed", "3"]);
    let text = String::from_utf8_lossy(&run.stdout);
    assert_eq!(text.lines().count(), 8);
    assert!(text
        .lines()
        .all(|l| l.starts_with("pass ") || l.starts_with("FAIL ")));
    assert!(text.contains("pass  swirl derivatives"));
    // the eps-FD value gap sits just above its tolerance
    assert!(text.contains("FAIL  eps-FD"));
    assert_eq!(code(&run), 1);
}
