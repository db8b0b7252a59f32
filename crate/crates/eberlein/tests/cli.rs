//! End-to-end checks of the command-line interface.

use std::path::Path;
use std::process::{Command, Output};

fn eberlein(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eberlein"))
        .args(args)
        .current_dir(dir)
        .env_remove("EBERLEIN_SEED")
        .output()
        .expect("binary runs")
}

#[test]
fn solve_generated_input_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = eberlein(
        &[
            "solve",
            "--input",
            "gen:a1",
            "--n",
            "40",
            "--block-size",
            "5",
            "--tol",
            "1e-10",
            "--seed",
            "11",
            "--out",
            "result.json",
            "--trace",
            "trace.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next().unwrap(), "cycle,off_A,off_B,normC,frob_A,cum_delta");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|tok| tok.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 2);
    let frob0 = rows[0][4];
    // off(B) decreases after the first cycle and ends below 1e-10 * ||A||
    for pair in rows.windows(2) {
        assert!(
            pair[1][2] <= pair[0][2] + 1e-12 * frob0,
            "off_B increased: {} -> {}",
            pair[0][2],
            pair[1][2]
        );
    }
    assert!(rows.last().unwrap()[2] <= 1e-10 * frob0);

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("result.json")).unwrap())
            .unwrap();
    assert_eq!(json["status"], "converged");
    assert_eq!(json["eigenvalues"].as_array().unwrap().len(), 40);
    assert_eq!(json["config"]["seed"], 11);
}

#[test]
fn orderings_subcommand_prints_row_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = eberlein(&["orderings", "--m", "4", "--kind", "row"], dir.path());
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "* 0 1 2\n* * 3 4\n* * * 5\n* * * *\n"
    );

    let col = eberlein(&["orderings", "--m", "4", "--kind", "col"], dir.path());
    assert_eq!(
        String::from_utf8_lossy(&col.stdout),
        "* 0 1 3\n* * 2 4\n* * * 5\n* * * *\n"
    );
}

#[test]
fn oversized_block_size_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = eberlein(
        &["solve", "--input", "gen:a1", "--n", "10", "--block-size", "11"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("block size"));
}

#[test]
fn gen_writes_matrix_and_spectrum_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = eberlein(
        &["gen", "--kind", "a0", "--n", "12", "--seed", "3", "--out", "matrix.mtx"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let matrix = eberlein::io::read_matrix_market(&dir.path().join("matrix.mtx")).unwrap();
    assert_eq!(matrix.dim(), 12);

    let sidecar: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("matrix.spectrum.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(sidecar.as_array().unwrap().len(), 12);

    // generation is seed-deterministic across invocations
    let again = eberlein(
        &["gen", "--kind", "a0", "--n", "12", "--seed", "3", "--out", "again.mtx"],
        dir.path(),
    );
    assert!(again.status.success());
    let a = std::fs::read_to_string(dir.path().join("matrix.mtx")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("again.mtx")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn solve_reads_matrix_market_files() {
    let dir = tempfile::tempdir().unwrap();
    let gen = eberlein(
        &["gen", "--kind", "a2", "--n", "20", "--mult", "4,2,2,2,2", "--seed", "9", "--out", "a2.mtx"],
        dir.path(),
    );
    assert!(gen.status.success(), "stderr: {}", String::from_utf8_lossy(&gen.stderr));

    let out = eberlein(
        &[
            "solve",
            "--input",
            "a2.mtx",
            "--block-size",
            "4",
            "--precondition",
            "--seed",
            "21",
            "--out",
            "result.json",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("result.json")).unwrap())
            .unwrap();
    assert_eq!(json["eigenvalues"].as_array().unwrap().len(), 20);
    assert!(json["precondition_scalar"].is_object());
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = eberlein(
        &["solve", "--input", "nope.mtx", "--block-size", "2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_file_is_reported_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.mtx"),
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n7 1 1.0\n",
    )
    .unwrap();
    let out = eberlein(&["solve", "--input", "bad.mtx", "--block-size", "1"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn env_seed_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["one.mtx", "two.mtx"] {
        let out = Command::new(env!("CARGO_BIN_EXE_eberlein"))
            .args(["gen", "--kind", "a1", "--n", "6", "--out", name])
            .current_dir(dir.path())
            .env("EBERLEIN_SEED", "777")
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = std::fs::read_to_string(dir.path().join("one.mtx")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("two.mtx")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn custom_ordering_file_and_explicit_partition() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ord.txt"), "1 2\n1 3\n2 3\n").unwrap();
    let out = eberlein(
        &[
            "solve",
            "--input",
            "gen:a1",
            "--n",
            "12",
            "--partition",
            "4,4,4",
            "--ordering",
            "file:ord.txt",
            "--seed",
            "5",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // ordering with the wrong block count is a usage error
    let bad = eberlein(
        &[
            "solve",
            "--input",
            "gen:a1",
            "--n",
            "12",
            "--partition",
            "4,4,4",
            "--ordering",
            "serial-perm:abc",
        ],
        dir.path(),
    );
    assert_eq!(bad.status.code(), Some(1));
}
