use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fanocoeff::TableRow;
use fanocoeff_core::{Certificate, ChernExpansion, Rational};

fn fanocoeff(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fanocoeff"))
        .args(args)
        .env("FANOCOEFF_OUT_DIR", dir)
        .env_remove("FANOCOEFF_SHARDS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// The certificate without its timestamp.
fn untimed(mut cert: Certificate) -> Certificate {
    cert.produced_at.clear();
    cert
}

#[test]
fn documented_values() {
    let dir = tempfile::tempdir().unwrap();
    for (args, want) in [
        (&["seq", "bern", "2"][..], "1/6\n"),
        (&["seq", "stirling2", "2", "2"], "1\n"),
        (&["seq", "harmsum", "2", "2"], "11/12\n"),
        (&["bcoeff", "2", "1", "1"], "1/3\n"),
        (&["bcoeff", "3", "1", "7"], "0\n"),
        (&["--method", "recurrence", "bcoeff", "3", "1", "7"], "0\n"),
    ] {
        let out = fanocoeff(dir.path(), args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(stdout(&out), want, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["seq", "bern"][..],
        &["seq", "bern", "x"],
        &["seq", "stirling2", "2", "5"],
        &["seq", "harmsum", "0", "1"],
        &["bcoeff", "0", "1", "1"],
        &["--method", "fast", "bcoeff", "1", "1", "1"],
        &["--format", "xml", "seq", "bern", "1"],
        &["--shards", "0", "certify", "10"],
        &["certify", "1"],
        &["chern", "0", "1"],
        &["verify", "nonsense"],
        &["verify", "--bound", "no_such_bound=1"],
        &["frobnicate"],
    ] {
        let out = fanocoeff(dir.path(), args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let target = blocker.join("sub");
    let out = fanocoeff(
        dir.path(),
        &["--out", target.to_str().unwrap(), "certify", "5"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn injected_fault_exits_one_with_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let out = fanocoeff(
        dir.path(),
        &[
            "--seed-bernoulli",
            "1,1/2",
            "--format",
            "json",
            "certify",
            "12",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let cert: Certificate = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!cert.passed());
    assert!(cert.witnesses.iter().any(|w| w.index() == (1, 1, 1)));

    let out = fanocoeff(
        dir.path(),
        &["--seed-bernoulli", "1,1/2", "verify", "method-agreement"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certificate_files_are_append_only() {
    let dir = tempfile::tempdir().unwrap();
    for _ in 0..3 {
        assert_eq!(
            fanocoeff(dir.path(), &["certify", "20"]).status.code(),
            Some(0)
        );
    }
    let mut names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "certify-N20-closed-1.json",
            "certify-N20-closed-2.json",
            "certify-N20-closed.json"
        ]
    );
    let read = |name: &str| -> Certificate {
        serde_json::from_str(&fs::read_to_string(dir.path().join(name)).unwrap()).unwrap()
    };
    let first = read("certify-N20-closed.json");
    assert_eq!(first.checked_count, (1..20).map(|i| 2 * i + 3).sum::<u64>());
    assert_eq!(untimed(first), untimed(read("certify-N20-closed-2.json")));
}

#[test]
fn explicit_out_dir_wins_over_env() {
    let dir = tempfile::tempdir().unwrap();
    let other = dir.path().join("elsewhere");
    let out = fanocoeff(
        dir.path(),
        &[
            "--out",
            other.to_str().unwrap(),
            "--method",
            "recurrence",
            "certify",
            "6",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(other.join("certify-N6-recurrence.json").exists());
}

#[test]
fn shard_counts_give_identical_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let run = |shards: &str, seed: bool| {
        let mut args = vec!["--format", "json", "--shards", shards];
        if seed {
            args.extend(["--seed-bernoulli", "1,1/2,1/5"]);
        }
        args.extend(["certify", "40"]);
        let out = fanocoeff(dir.path(), &args);
        untimed(serde_json::from_str::<Certificate>(&stdout(&out)).unwrap())
    };
    for seed in [false, true] {
        let single = run("1", seed);
        assert_eq!(single.passed(), !seed);
        for shards in ["2", "5"] {
            assert_eq!(run(shards, seed), single);
        }
    }
}

#[test]
fn shards_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fanocoeff"))
        .args(["verify", "vanishing", "endpoint"])
        .env("FANOCOEFF_OUT_DIR", dir.path())
        .env("FANOCOEFF_SHARDS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("vanishing: pass (330 checked"), "{text}");
    assert!(dir.path().join("verify-vanishing+endpoint.json").exists());
}

#[test]
fn table_csv_and_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    let out = fanocoeff(
        dir.path(),
        &[
            "--format",
            "csv",
            "--out",
            csv_path.to_str().unwrap(),
            "table",
            "5",
            "4",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("i,j,k,b,d,method\n"));
    let rows: Vec<TableRow> = csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(Result::unwrap)
        .collect();

    let json = stdout(&fanocoeff(
        dir.path(),
        &["--format", "json", "table", "5", "4"],
    ));
    let from_json: Vec<TableRow> = serde_json::from_str(&json).unwrap();
    assert_eq!(rows, from_json);
    assert_eq!(
        rows.len(),
        (1..=5)
            .flat_map(|i| (0..=4).map(move |j| i + j))
            .sum::<usize>()
    );

    // every value is an exact fraction string
    let raw: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    for row in &raw {
        for field in ["b", "d"] {
            let s = row[field].as_str().unwrap();
            assert!(!s.contains('.') && !s.contains('e'), "{s}");
            let _: Rational = s.parse().unwrap();
        }
    }

    let recurrence = stdout(&fanocoeff(
        dir.path(),
        &[
            "--format",
            "json",
            "--method",
            "recurrence",
            "table",
            "5",
            "4",
        ],
    ));
    let by_recurrence: Vec<TableRow> = serde_json::from_str(&recurrence).unwrap();
    for (a, b) in rows.iter().zip(&by_recurrence) {
        assert_eq!((a.i, a.j, a.k, &a.b, &a.d), (b.i, b.j, b.k, &b.b, &b.d));
    }
}

#[test]
fn chern_formats_agree() {
    let dir = tempfile::tempdir().unwrap();
    let latex = stdout(&fanocoeff(dir.path(), &["chern", "3", "2"]));
    let json = stdout(&fanocoeff(
        dir.path(),
        &["--format", "json", "chern", "3", "2"],
    ));
    let from_json: ChernExpansion = serde_json::from_str(&json).unwrap();
    assert_eq!(
        ChernExpansion::from_latex(latex.trim_end()).unwrap(),
        from_json
    );
    assert_eq!(from_json.terms.len(), 5);
    assert!(!json.contains("zero_coefficient"));
}

#[test]
fn sequence_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&fanocoeff(
        dir.path(),
        &["--format", "json", "seq", "daehee", "2", "1"],
    )))
    .unwrap();
    assert_eq!(v["value"], "2/3");
    assert_eq!(v["args"]["q"], "2");
    let csv_out = stdout(&fanocoeff(
        dir.path(),
        &["--format", "csv", "seq", "stirling2", "5", "2"],
    ));
    assert_eq!(csv_out, "sequence,args,value\nstirling2,5 2,15\n");
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let out = fanocoeff(
            dir.path(),
            &[
                "--format",
                "json",
                "verify",
                "daehee",
                "log-series",
                "--bound",
                "daehee_q_max=6",
            ],
        );
        assert_eq!(out.status.code(), Some(0));
        untimed(serde_json::from_str::<Certificate>(&stdout(&out)).unwrap())
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a.checked_count, 7 * 6 + 66);
}

#[test]
fn explore_is_not_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = fanocoeff(dir.path(), &["explore", "3", "4", "--i-max", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 2);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}
