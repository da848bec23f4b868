//! End-to-end checks of the command-line interface: output formats,
//! determinism, thread equivalence and error reporting.

use std::path::Path;
use std::process::Command;

use lattice_landau::lattice::Lattice;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lattice-landau"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn run_err(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        !out.status.success(),
        "command {:?} unexpectedly passed",
        args
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_lattice(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("fixture written");
    path.to_str().expect("utf8 path").to_owned()
}

#[test]
fn count_matches_frozen_square_lattice_values() {
    let dir = tempfile::tempdir().expect("tempdir");
    let z2 = write_lattice(dir.path(), "z2.txt", "2\n1 0\n0 1\n");
    let strict = run_ok(&[
        "count",
        "--lattice",
        &z2,
        "--radius",
        "2",
        "--mode",
        "strict",
    ]);
    assert_eq!(strict, "9\n");
    let inclusive = run_ok(&["count", "--lattice", &z2, "--radius", "2"]);
    assert_eq!(inclusive, "13\n");
    let fractional = run_ok(&["count", "--lattice", &z2, "--radius", "3/2"]);
    assert_eq!(fractional, "9\n");
}

#[test]
fn count_is_thread_count_invariant() {
    let dir = tempfile::tempdir().expect("tempdir");
    let skew = write_lattice(dir.path(), "skew.txt", "3\n1 4 0\n0 1 7\n2 0 1\n");
    let single = run_ok(&["count", "--lattice", &skew, "--radius", "9"]);
    let multi = run_ok(&[
        "count",
        "--lattice",
        &skew,
        "--radius",
        "9",
        "--threads",
        "3",
    ]);
    assert_eq!(single, multi);
    let out = bin()
        .args(["count", "--lattice", &skew, "--radius", "9"])
        .env("LATTICE_LANDAU_THREADS", "4")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).expect("utf8"), single);
}

#[test]
fn malformed_lattice_reports_one_error_line() {
    let dir = tempfile::tempdir().expect("tempdir");
    let bad = write_lattice(dir.path(), "bad.txt", "2\n1 0\n0 x\n");
    let stderr = run_err(&["count", "--lattice", &bad, "--radius", "2"]);
    assert!(stderr.starts_with("error:"), "stderr was {:?}", stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1);
    assert!(stderr.contains("line 3"), "stderr was {:?}", stderr);

    let singular = write_lattice(dir.path(), "singular.txt", "2\n1 1\n1 1\n");
    let stderr = run_err(&["count", "--lattice", &singular, "--radius", "2"]);
    assert!(stderr.starts_with("error:"), "stderr was {:?}", stderr);
}

#[test]
fn spectrum_lists_squared_norms_with_multiplicities() {
    let dir = tempfile::tempdir().expect("tempdir");
    let z2 = write_lattice(dir.path(), "z2.txt", "2\n1 0\n0 1\n");
    let out = run_ok(&["spectrum", "--lattice", &z2, "--cutoff", "2"]);
    assert_eq!(out, "lambda,count\n1,4\n2,4\n");
}

#[test]
fn reduce_preserves_the_point_set() {
    let dir = tempfile::tempdir().expect("tempdir");
    let text = "2\n1 100\n0 1\n";
    let skew = write_lattice(dir.path(), "skew.txt", text);
    let out = run_ok(&["reduce", "--lattice", &skew]);
    let reduced = Lattice::parse_text(&out).expect("reduced basis parses");
    let original = Lattice::parse_text(text).expect("fixture parses");
    assert!(reduced.same_point_set(&original));
    let gram = reduced.gram();
    assert!(gram[0][0] <= gram[1][1]);
    assert_eq!(
        *gram[1][1].numer(),
        1.into(),
        "unimodular basis reduces to unit vectors"
    );
}

#[test]
fn minima_and_dual_print_exact_values() {
    let dir = tempfile::tempdir().expect("tempdir");
    let lat = write_lattice(dir.path(), "diag.txt", "2\n2 0\n0 2\n");
    let minima = run_ok(&["minima", "--lattice", &lat]);
    assert_eq!(
        minima,
        "lambda_sq,lambda\n4,2.0000000000000000e0\n4,2.0000000000000000e0\n"
    );
    let dual = run_ok(&["dual", "--lattice", &lat]);
    assert_eq!(dual, "2\n1/2 0\n0 1/2\n");
}

#[test]
fn output_flag_writes_the_file_and_keeps_stdout_empty() {
    let dir = tempfile::tempdir().expect("tempdir");
    let z2 = write_lattice(dir.path(), "z2.txt", "2\n1 0\n0 1\n");
    let target = dir.path().join("count.txt");
    let out = bin()
        .args([
            "count",
            "--lattice",
            &z2,
            "--radius",
            "2",
            "--output",
            target.to_str().expect("utf8 path"),
        ])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(&target).expect("file written"),
        "13\n"
    );
}

#[test]
fn epstein_experiment_is_deterministic_and_annotated() {
    let dir = tempfile::tempdir().expect("tempdir");
    let z2 = write_lattice(dir.path(), "z2.txt", "2\n1 0\n0 1\n");
    let args = [
        "epstein-experiment",
        "--lattice",
        &z2,
        "--rgrid",
        "10:100:5",
    ];
    let first = run_ok(&args);
    let second = run_ok(&args);
    assert_eq!(first, second, "identical runs must be byte-identical");
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], "radius,exact,main,error,envelope,ratio");
    assert_eq!(lines.len(), 7, "header, five rows, one summary comment");
    assert!(
        lines[6].starts_with("# slope="),
        "summary was {:?}",
        lines[6]
    );
    assert!(lines[6].contains("max_ratio="));
    for row in &lines[1..6] {
        assert_eq!(row.split(',').count(), 6);
    }
}

#[test]
fn epstein_experiment_random_family_is_seeded() {
    let args = [
        "epstein-experiment",
        "--random",
        "d=2,count=2,entry-bound=5",
        "--rgrid",
        "20:40:3",
        "--seed",
        "7",
    ];
    let first = run_ok(&args);
    let second = run_ok(&args);
    assert_eq!(first, second);
    let markers = first
        .lines()
        .filter(|l| l.starts_with("# lattice="))
        .count();
    assert_eq!(markers, 2);
}

#[test]
fn epstein_experiment_rejects_ambiguous_input() {
    let dir = tempfile::tempdir().expect("tempdir");
    let z2 = write_lattice(dir.path(), "z2.txt", "2\n1 0\n0 1\n");
    let out = bin()
        .args([
            "epstein-experiment",
            "--lattice",
            &z2,
            "--random",
            "d=2",
            "--rgrid",
            "10:20:2",
        ])
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
}

#[test]
fn dedekind_experiment_flags_crossover_rows() {
    let out = run_ok(&[
        "dedekind-experiment",
        "--disc-range",
        "-20:20",
        "--xgrid",
        "100:10000:3",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "disc,x,count,main,error,envelope,ratio");
    assert!(lines.last().expect("nonempty").starts_with("# flagged="));
    assert!(lines.iter().any(|l| l.starts_with("-4,")));
    assert!(lines.iter().any(|l| l.starts_with("5,")));
    for row in &lines[1..lines.len() - 1] {
        assert_eq!(row.split(',').count(), 7);
    }
}

#[test]
fn landau_check_reports_envelope_and_order() {
    let dir = tempfile::tempdir().expect("tempdir");
    // Constant coefficients with the pole data of their generating
    // Dirichlet series: residue 1 at s = 1 and value -1/2 at s = 0.
    let series = dir.path().join("series.csv");
    let mut rows = String::from("lambda,coefficient\n");
    for n in 1..=40 {
        rows.push_str(&format!("{},1\n", n));
    }
    std::fs::write(&series, rows).expect("series written");
    let polar = dir.path().join("polar.csv");
    std::fs::write(&polar, "xi,c0\n1,1\n0,-0.5\n").expect("polar written");
    let shape = dir.path().join("shape.json");
    std::fs::write(
        &shape,
        "{\"delta\": 1.0, \"factors\": [{\"alpha\": 0.5, \"beta\": [0.0, 0.0]}]}",
    )
    .expect("shape written");
    let dual = dir.path().join("dual.json");
    std::fs::write(
        &dual,
        "{\"c_psi\": 1.0, \"c_psi_prime\": 0.0, \"r\": 1.6, \"r_prime\": 0.0}",
    )
    .expect("dual written");

    let args = [
        "landau-check",
        "--series",
        series.to_str().expect("utf8"),
        "--polar",
        polar.to_str().expect("utf8"),
        "--shape",
        shape.to_str().expect("utf8"),
        "--dual-bound",
        dual.to_str().expect("utf8"),
        "--xgrid",
        "10:30:4",
    ];
    let out = run_ok(&args);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,partial_sum,main_term,abs_error,envelope,ratio");
    assert_eq!(lines.len(), 7, "header, four rows, two summary comments");
    assert!(lines[5].starts_with("# eta="));
    assert!(lines[6].starts_with("# smoothing_order="));
    for row in &lines[1..5] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 6);
        let envelope: f64 = fields[4].parse().expect("numeric envelope");
        assert!(envelope > 0.0);
    }
    assert_eq!(run_ok(&args), out, "auto eta is deterministic");

    let fixed: Vec<&str> = args.iter().copied().chain(["--eta", "0.1"]).collect();
    let fixed_out = run_ok(&fixed);
    assert!(fixed_out
        .lines()
        .any(|l| l.starts_with("# eta=1.0000000000000001e-1")));
}

#[test]
fn invalid_grid_reports_error() {
    let dir = tempfile::tempdir().expect("tempdir");
    let z2 = write_lattice(dir.path(), "z2.txt", "2\n1 0\n0 1\n");
    let stderr = run_err(&["epstein-experiment", "--lattice", &z2, "--rgrid", "10:100"]);
    assert!(stderr.starts_with("error:"), "stderr was {:?}", stderr);
}
