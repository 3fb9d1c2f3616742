mod common;

use archrecover::pipeline::{SNAPSHOT_FILE, TRACE_FILE};
use archrecover::{run_pipeline, Analysis, ArchitectureSnapshot, Error, RunConfig};
use tempfile::TempDir;

#[test]
fn shop_search_matches_brute_force_optimum() {
    let dir = TempDir::new().unwrap();
    let out = common::analyze("shop", dir.path());
    let g = &out.analysis.graph;
    assert_eq!(g.len(), 6);
    let best = common::set_partitions(6)
        .iter()
        .map(|l| common::scratch_mqc(g, l))
        .fold(f64::NEG_INFINITY, f64::max);
    approx::assert_relative_eq!(out.snapshot.architecture.quality.mqc, best, epsilon = 1e-9);
    let names: Vec<Vec<String>> = out
        .snapshot
        .architecture
        .clusters
        .iter()
        .map(|c| c.names.clone())
        .collect();
    assert_eq!(
        names,
        [
            ["InvoiceFormatter", "InvoiceService", "PaymentGateway"],
            ["JobQueue", "JobScheduler", "ProcessRunner"]
        ]
    );
}

#[test]
fn utility_package_is_reported_not_clustered() {
    let dir = TempDir::new().unwrap();
    let out = common::analyze("shop", dir.path());
    assert!(out.snapshot.entities.iter().all(|e| e.name != "Clock"));
    let json = serde_json::to_string(&out.snapshot.architecture.cross_layer).unwrap();
    assert!(json.contains("Clock"), "{json}");
}

#[test]
fn snapshot_round_trips_and_reopens() {
    let dir = TempDir::new().unwrap();
    let out = common::analyze("shop", dir.path());
    let loaded = ArchitectureSnapshot::load(&dir.path().join(SNAPSHOT_FILE)).unwrap();
    assert_eq!(loaded, out.snapshot);

    let (analysis, snap) = Analysis::open(dir.path()).unwrap();
    assert!(snap.same_content(&out.snapshot));
    assert_eq!(analysis.graph.len(), out.analysis.graph.len());
    let a = analysis.query("job queue").unwrap();
    let b = out.analysis.query("job queue").unwrap();
    assert_eq!(a, b);
}

#[test]
fn unknown_schema_version_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = common::analyze("shop", dir.path());
    let mut v: serde_json::Value = serde_json::from_str(&out.snapshot.to_json()).unwrap();
    v["schemaVersion"] = 999.into();
    let path = dir.path().join("future.json");
    std::fs::write(&path, v.to_string()).unwrap();
    assert!(ArchitectureSnapshot::load(&path).is_err());
}

#[test]
fn reassign_to_new_cluster_and_reject_unknown() {
    use archrecover::architecture::{ClassMove, ClusterRef};
    let dir = TempDir::new().unwrap();
    let out = common::analyze("shop", dir.path());
    let (next, rejected) = out
        .snapshot
        .reassign(
            &out.analysis,
            &[
                ClassMove {
                    entity: 0,
                    target: ClusterRef::New,
                },
                ClassMove {
                    entity: 42,
                    target: ClusterRef::Existing(0),
                },
            ],
        )
        .unwrap();
    assert_eq!(rejected.len(), 1);
    assert_eq!(rejected[0].class_move.entity, 42);
    assert_eq!(next.architecture.clusters.len(), 3);
    assert_eq!(next.meta.revision, out.snapshot.meta.revision + 1);
    let labels = {
        let mut l = vec![0; 6];
        for c in &next.architecture.clusters {
            for &m in &c.members {
                l[m] = c.id;
            }
        }
        l
    };
    approx::assert_relative_eq!(
        next.architecture.quality.mqc,
        common::scratch_mqc(&out.analysis.graph, &labels),
        epsilon = 1e-9
    );
}

#[test]
fn trace_is_written_on_request() {
    let dir = TempDir::new().unwrap();
    let cfg = RunConfig {
        trace: true,
        ..common::config("shop", dir.path())
    };
    run_pipeline(&cfg).unwrap();
    let trace = std::fs::read_to_string(dir.path().join(TRACE_FILE)).unwrap();
    assert!(trace.lines().count() > 0);
    assert!(!dir.path().join("other").join(TRACE_FILE).exists());
}

#[test]
fn auto_factors_still_find_both_components() {
    let dir = TempDir::new().unwrap();
    let cfg = RunConfig {
        factors: archrecover::FactorChoice::Auto,
        ..common::config("shop", dir.path())
    };
    let out = run_pipeline(&cfg).unwrap();
    assert_eq!(out.snapshot.architecture.clusters.len(), 2);
    assert!(out.snapshot.settings.factors.as_array().iter().all(|f| *f >= 0.0));
}

#[test]
fn trees_without_clusterable_classes_fail() {
    let src = TempDir::new().unwrap();
    let out = TempDir::new().unwrap();
    let cfg = RunConfig {
        corpus: Some(src.path().to_path_buf()),
        output: out.path().to_path_buf(),
        ..RunConfig::default()
    };
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(err, Error::Ingest(_)), "{err}");
    assert_eq!(err.exit_code(), 2);

    // only a utility class, which scoping removes
    let util = src.path().join("com/acme/util");
    std::fs::create_dir_all(&util).unwrap();
    std::fs::write(
        util.join("Strings.java"),
        "package com.acme.util;\npublic class Strings {}\n",
    )
    .unwrap();
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(err, Error::NothingToCluster), "{err}");
    assert_eq!(err.exit_code(), 2);
}
