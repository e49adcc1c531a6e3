mod common;

use std::collections::HashSet;

use common::*;
use smitask::curation::is_curriculum_ordered;
use smitask::dataset::{
    build, build_from_corpus, load_jsonl, manifest_path, to_jsonl, write_output, BuildConfig,
    Corpus, DatasetError, Split,
};
use smitask::synth::to_smi;
use smitask::tasks::TaskGenerator;
use smitask::TaskKind;

fn small_corpus(n: usize) -> Corpus {
    Corpus::from_lines(&corpus(n, 77, Default::default()))
}

fn config(per_task: usize) -> BuildConfig {
    BuildConfig {
        per_task,
        ..BuildConfig::new("unused.smi")
    }
}

#[test]
fn build_is_deterministic_and_thread_independent() {
    let corpus = small_corpus(1500);
    let cfg = config(200);
    let a = build_from_corpus(&cfg, &corpus).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| build_from_corpus(&cfg, &corpus).unwrap());
    assert_eq!(a.manifest.content_sha256, b.manifest.content_sha256);
    assert_eq!(a.records, b.records);
    let other_seed = build_from_corpus(&BuildConfig { seed: 7, ..cfg }, &corpus).unwrap();
    assert_ne!(
        a.manifest.content_sha256,
        other_seed.manifest.content_sha256
    );
}

#[test]
fn build_output_properties() {
    let corpus = small_corpus(1500);
    let out = build_from_corpus(&config(200), &corpus).unwrap();
    assert_eq!(out.records.len(), 1000);
    assert_eq!(out.manifest.total, 1000);
    for t in TaskKind::ALL {
        assert_eq!(out.manifest.counts[&t], 200);
    }
    // fixed task order, one block each
    let tasks: Vec<TaskKind> = out.records.iter().map(|r| r.task).collect();
    let mut blocks = tasks.clone();
    blocks.dedup();
    assert_eq!(blocks, TaskKind::ALL);
    assert!(is_curriculum_ordered(&out.records));
    let keys: HashSet<_> = out
        .records
        .iter()
        .map(|r| {
            (
                r.task,
                r.source_smiles.clone(),
                serde_json::to_string(&r.meta).unwrap(),
            )
        })
        .collect();
    assert_eq!(keys.len(), out.records.len());
    let generator = TaskGenerator::default();
    for r in &out.records {
        assert_eq!(generator.regenerate_answer(r).unwrap(), r.answer, "{r:?}");
        assert!(r.prompt.contains(&r.source_smiles));
    }
    assert_eq!(out.manifest.content_sha256.len(), 64);
}

#[test]
fn interleaved_layout() {
    let corpus = small_corpus(800);
    let out = build_from_corpus(
        &BuildConfig {
            interleave: true,
            ..config(50)
        },
        &corpus,
    )
    .unwrap();
    let head: Vec<TaskKind> = out.records.iter().take(10).map(|r| r.task).collect();
    assert_eq!(&head[..5], TaskKind::ALL);
    assert_eq!(&head[5..], TaskKind::ALL);
    assert!(is_curriculum_ordered(&out.records));
}

#[test]
fn single_task_build() {
    let corpus = small_corpus(600);
    let cfg = BuildConfig {
        tasks: vec![TaskKind::RingCount],
        ..config(100)
    };
    let out = build_from_corpus(&cfg, &corpus).unwrap();
    assert_eq!(out.records.len(), 100);
    assert!(out.records.iter().all(|r| r.task == TaskKind::RingCount));
}

#[test]
fn too_small_corpus_reports_shortfall() {
    let corpus = small_corpus(100);
    match build_from_corpus(&config(500), &corpus) {
        Err(DatasetError::Insufficient(e)) => {
            assert_eq!(e.shortfall.len(), 5);
            assert!(e
                .shortfall
                .iter()
                .all(|&(_, want, have)| want == 500 && have < 500));
        }
        other => panic!("expected shortfall, got {other:?}"),
    }
}

#[test]
fn test_split_samples_fixed_molecules() {
    let corpus = small_corpus(500);
    let cfg = BuildConfig {
        split: Split::Test,
        test_size: 120,
        ..config(1)
    };
    let a = build_from_corpus(&cfg, &corpus).unwrap();
    let b = build_from_corpus(&cfg, &corpus).unwrap();
    assert_eq!(a.records, b.records);
    // every applicable molecule is used, nothing pruned
    assert_eq!(a.manifest.counts[&TaskKind::RingCount], 120);
    assert_eq!(a.manifest.counts[&TaskKind::Canonicalization], 120);
    let skipped: usize = a.manifest.skips[&TaskKind::ChainLength].values().sum();
    assert_eq!(a.manifest.counts[&TaskKind::ChainLength] + skipped, 120);
}

#[test]
fn hash_holdout_is_disjoint() {
    let corpus = small_corpus(1000);
    let train = BuildConfig {
        holdout: Some(0.2),
        tasks: vec![TaskKind::Canonicalization],
        ..config(100)
    };
    let test = BuildConfig {
        split: Split::Test,
        test_size: 10_000,
        ..train.clone()
    };
    let a = build_from_corpus(&train, &corpus).unwrap();
    let b = build_from_corpus(&test, &corpus).unwrap();
    let molecules = |recs: &[smitask::TaskRecord]| -> HashSet<String> {
        recs.iter().map(|r| r.answer.clone()).collect()
    };
    assert!(molecules(&a.records).is_disjoint(&molecules(&b.records)));
    let held = b.records.len() as f64 / 1000.0;
    assert!((0.1..0.3).contains(&held), "{held}");
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let smi = dir.path().join("corpus.smi");
    let mut text = to_smi(&corpus(400, 5, Default::default()));
    text.push_str("C1CC broken\n\n");
    std::fs::write(&smi, text).unwrap();
    let cfg = BuildConfig {
        per_task: 40,
        ..BuildConfig::new(&smi)
    };
    let out = build(&cfg).unwrap();
    assert_eq!(out.manifest.input_skips["parse_error"], 1);
    let path = dir.path().join("train.jsonl");
    write_output(&out, &path).unwrap();
    let bytes = std::fs::read_to_string(&path).unwrap();
    assert_eq!(bytes, to_jsonl(&out.records));
    assert_eq!(bytes.lines().count(), out.manifest.total);
    for line in bytes.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 6);
        assert!(line.starts_with("{\"task\":"));
        let order = [
            "\"task\"",
            "\"source_smiles\"",
            "\"prompt\"",
            "\"answer\"",
            "\"difficulty\"",
            "\"meta\"",
        ];
        let pos: Vec<usize> = order.iter().map(|k| line.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }
    assert_eq!(load_jsonl(&path).unwrap(), out.records);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(manifest_path(&path)).unwrap()).unwrap();
    assert_eq!(
        manifest["content_sha256"],
        out.manifest.content_sha256.as_str()
    );
    assert_eq!(manifest["total"], out.manifest.total);

    let empty = dir.path().join("empty.jsonl");
    smitask::dataset::emit_jsonl(&[], &empty).unwrap();
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), "");
    assert!(load_jsonl(&empty).unwrap().is_empty());
}

#[test]
fn invalid_configs() {
    let corpus = small_corpus(10);
    for cfg in [
        BuildConfig {
            tasks: vec![],
            ..config(1)
        },
        BuildConfig {
            per_task: 0,
            ..config(1)
        },
        BuildConfig {
            holdout: Some(1.5),
            ..config(1)
        },
    ] {
        assert!(matches!(
            build_from_corpus(&cfg, &corpus),
            Err(DatasetError::Config(_))
        ));
    }
}
