use std::path::Path;
use std::process::{Command, Output};

fn smitask(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smitask"))
        .args(args)
        .env_remove("SMITASK_TEMPLATES")
        .env_remove("SMITASK_GROUPS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn corpus(dir: &Path, n: usize) -> String {
    let path = dir.join("corpus.smi");
    let out = smitask(&[
        "synth",
        "--count",
        &n.to_string(),
        "--seed",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    path.to_str().unwrap().to_string()
}

#[test]
fn generate_then_curate_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 1500);
    let out = dir.path().join("train.jsonl");
    let o = smitask(&[
        "generate",
        "--input",
        &input,
        "--out",
        out.to_str().unwrap(),
        "--per-task",
        "100",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("wrote 500 records"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 500);
    assert!(dir.path().join("train.jsonl.manifest.json").exists());

    // worker count does not change the bytes
    let out2 = dir.path().join("again.jsonl");
    let o = smitask(&[
        "--jobs",
        "2",
        "generate",
        "--input",
        &input,
        "--out",
        out2.to_str().unwrap(),
        "--per-task",
        "100",
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&out2).unwrap(), text);

    let pruned = dir.path().join("pruned.jsonl");
    let o = smitask(&[
        "prune",
        "--input",
        out.to_str().unwrap(),
        "--out",
        pruned.to_str().unwrap(),
        "--band",
        "0:1",
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&pruned).unwrap(), text);

    let sorted = dir.path().join("sorted.jsonl");
    let o = smitask(&[
        "curriculum",
        "--input",
        out.to_str().unwrap(),
        "--out",
        sorted.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&sorted).unwrap(), text);

    // gold answers as predictions, in shuffled order
    let mut preds: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            serde_json::json!({"id": i, "raw_output": format!("Answer: {}", v["answer"].as_str().unwrap())}).to_string()
        })
        .collect();
    preds.reverse();
    let pred_path = dir.path().join("pred.jsonl");
    std::fs::write(&pred_path, preds.join("\n") + "\n").unwrap();
    let report = dir.path().join("report.json");
    let o = smitask(&[
        "eval",
        "--gold",
        out.to_str().unwrap(),
        "--pred",
        pred_path.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["accuracy"], 1.0);
    for t in [
        "functional_group",
        "ring_count",
        "chain_length",
        "canonicalization",
        "fragment_assembly",
    ] {
        assert_eq!(r["tasks"][t]["accuracy"], 1.0, "{t}");
    }
    assert!(stdout(&o).contains("overall"));

    std::fs::write(&pred_path, "{\"id\": 9999, \"raw_output\": \"1\"}\n").unwrap();
    let o = smitask(&[
        "eval",
        "--gold",
        out.to_str().unwrap(),
        "--pred",
        pred_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn single_task_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 400);
    let out = dir.path().join("rings.jsonl");
    let o = smitask(&[
        "generate",
        "--input",
        &input,
        "--out",
        out.to_str().unwrap(),
        "--task",
        "ring_count",
        "--per-task",
        "100",
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 100);
    assert!(text
        .lines()
        .all(|l| l.starts_with("{\"task\":\"ring_count\"")));
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(
        smitask(&["generate", "--out", "x.jsonl"]).status.code(),
        Some(2)
    );
    assert_eq!(
        smitask(&["generate", "--input", "a", "--out", "b", "--band", "0.9:0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(smitask(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let input = corpus(dir.path(), 50);
    let out = dir.path().join("x.jsonl");
    let o = smitask(&[
        "generate",
        "--input",
        &input,
        "--out",
        out.to_str().unwrap(),
        "--per-task",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("corpus too small"));
    let o = smitask(&[
        "generate",
        "--input",
        "/nonexistent.smi",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn canon_command() {
    let a = smitask(&["canon", "OCC"]);
    let b = smitask(&["canon", "CCO"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let c = stdout(&a);
    assert_eq!(stdout(&smitask(&["canon", c.trim()])), c);
    assert_eq!(smitask(&["canon", "C(("]).status.code(), Some(1));

    let mut child = Command::new(env!("CARGO_BIN_EXE_smitask"))
        .arg("canon")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"OCC\nC((\nc1ccccc1\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn parse_debug_command() {
    let o = smitask(&["parse-debug", "c1ccccc1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("atoms 6"));
    assert_eq!(
        s.lines()
            .filter(|l| l.contains(" C ") && l.contains("yes"))
            .count(),
        6
    );
    assert!(s.contains("rings 1\n  size 6:"));
    assert!(s.contains("chain 0"));

    let s = stdout(&smitask(&["parse-debug", "CCO"]));
    assert!(s.contains("rings 0"));
    assert!(s.contains("chain 2"));
    assert!(s
        .lines()
        .any(|l| l.starts_with("groups") && l.contains("hydroxyl")));

    let o = smitask(&["parse-debug", "C1CC"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset 1"));
}

#[test]
fn environment_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let groups = dir.path().join("groups.txt");
    std::fs::write(&groups, "[only_oxygen]\natom = O\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_smitask"))
        .args(["parse-debug", "CCO"])
        .env("SMITASK_GROUPS", &groups)
        .output()
        .unwrap();
    assert!(stdout(&o).contains("groups only_oxygen"));

    let templates = dir.path().join("templates.txt");
    std::fs::write(&templates, "[ring_count]\n{smiles}\n").unwrap();
    let input = corpus(dir.path(), 100);
    let o = Command::new(env!("CARGO_BIN_EXE_smitask"))
        .args([
            "generate",
            "--input",
            &input,
            "--out",
            dir.path().join("o.jsonl").to_str().unwrap(),
            "--per-task",
            "5",
        ])
        .env("SMITASK_TEMPLATES", &templates)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("template"));
}
