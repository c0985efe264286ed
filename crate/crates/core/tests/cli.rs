use std::fs;
use std::process::{Command, Output};

fn netfair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netfair"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn audit_requires_seed_trials_and_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["audit", "--trials", "2", "--out-dir", out],
        vec!["audit", "--master-seed", "1", "--out-dir", out],
        vec!["audit", "--master-seed", "1", "--trials", "2"],
    ] {
        assert_eq!(netfair(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn generate_then_audit_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("messages.tsv");
    let edges = dir.path().join("edges.csv");
    let out = dir.path().join("report");
    let gen = netfair(&["generate", "--out", corpus.to_str().unwrap()]);
    assert!(
        gen.status.success(),
        "{}",
        String::from_utf8_lossy(&gen.stderr)
    );
    assert_eq!(fs::read_to_string(&corpus).unwrap().lines().count(), 5000);
    fs::write(&edges, "u000,u001\nu001,u000\n").unwrap();

    let run = netfair(&[
        "audit",
        "--master-seed",
        "4",
        "--trials",
        "3",
        "--out-dir",
        out.to_str().unwrap(),
        "--messages",
        corpus.to_str().unwrap(),
        "--edges",
        edges.to_str().unwrap(),
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let text = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(text.contains("Deltas across high/low centrality groups"));
    assert_eq!(String::from_utf8(run.stdout).unwrap(), text);
    let json = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(json.contains("\"kind\": \"files\""));
}

#[test]
fn features_dump_has_one_row_per_message() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("m.tsv");
    fs::write(&corpus, "m1\talice\tbob\tyou are SO stupid!!\t1\nm2\tbob\tcarol\tsee you later :)\t0\nm3\tcarol\talice\thi\t0\n").unwrap();
    let out = netfair(&["features", "--messages", corpus.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.len() == 3 + 18));
    assert_eq!(
        rows[0][..4],
        ["message_id", "label", "deg_out_receiver", "node_count"]
    );
    assert_eq!(rows[1][0], "m1");
    assert_eq!(rows[1][1], "1");
}

#[test]
fn malformed_corpus_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.tsv");
    fs::write(&corpus, "m1\ta\tb\thello\t0\nm2\ta\tc\thello\n").unwrap();
    let out = netfair(&["features", "--messages", corpus.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2: missing field 'label'"));
}

#[test]
fn aborted_experiment_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("few.tsv");
    // Three positives: a test split never has positives in both groups.
    let mut text = String::new();
    for i in 0..200 {
        let label = u8::from(i < 3);
        text.push_str(&format!(
            "m{i}\tu{}\tu{}\thello there\t{label}\n",
            i % 17,
            (i * 7 + 3) % 23 + 17
        ));
    }
    fs::write(&corpus, text).unwrap();
    let out = netfair(&[
        "audit",
        "--master-seed",
        "1",
        "--trials",
        "5",
        "--out-dir",
        dir.path().join("r").to_str().unwrap(),
        "--messages",
        corpus.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment aborted"));
}
