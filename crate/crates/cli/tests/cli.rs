use std::process::{Command, Output};

use serde_json::Value;

fn mub6(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mub6")).args(args).output().expect("binary runs")
}

fn document(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn triplet_document_shape() {
    let out = mub6(&["triplet", "--t", "0.6"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = document(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "triplet");
    assert_eq!(doc["verified"], true);
    assert!(doc["results"]["unbiasedness_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(doc["results"]["c"].as_array().unwrap().len(), 6);
    assert!(doc["timing"]["wall_time_secs"].as_f64().is_some());
}

#[test]
fn domain_and_usage_errors_exit_2() {
    for args in [
        &["triplet", "--t", "0.1"][..],
        &["triplet", "--t", "nan"],
        &["triplet", "--t", "1/0"],
        &["frobnicate"],
        &["vectors", "--a", "0"],
        &["vectors", "--a", "0", "--b", "0", "--trials", "0"],
        &["certify", "--cells", "40,0", "--generations", "3"],
        &["certify", "--Nprime", "15", "--generations", "3"],
    ] {
        let out = mub6(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn vectors_at_the_origin_and_the_degenerate_edge() {
    let doc = document(&mub6(&["vectors", "--a", "0", "--b", "0", "--trials", "3000"]));
    assert_eq!(doc["results"]["vector_count"], 48);
    assert_eq!(doc["results"]["basis_count"], 16);
    assert_eq!(doc["results"]["quartet_extension"], false);

    let doc = document(&mub6(&["vectors", "--a", "1/6", "--b", "0"]));
    assert_eq!(doc["results"]["basis_count_with_multiplicity"], 70);
}

#[test]
fn zauner_and_haagerup() {
    let doc = document(&mub6(&["zauner", "--x", "0.3"]));
    assert_eq!(doc["verified"], true);
    assert!(doc["results"]["factorization_residual"].as_f64().unwrap() < 1e-12);

    let out = mub6(&["haagerup", "--t", "0.6", "--x", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &document(&out)["results"];
    assert!(r["triplet_distinct"].as_u64().unwrap() > r["zauner_distinct"].as_u64().unwrap());
}

#[test]
fn orbit_and_continue() {
    let doc = document(&mub6(&["orbit", "--a", "0.05", "--b", "0.01", "--trials", "2000"]));
    assert_eq!(doc["verified"], true);
    assert!(doc["results"]["max_unbiasedness_residual"].as_f64().unwrap() < 1e-8);

    let doc = document(&mub6(&["continue", "--a", "0.01", "--b", "0.005", "--threads", "2"]));
    assert_eq!(doc["verified"], true);
    assert_eq!(doc["results"]["distinct_endpoints"], 48);
}

#[test]
fn out_flag_writes_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.json");
    let out = mub6(&["zauner", "--x", "0.4", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "zauner");
}

#[test]
fn ort_table_then_certify_with_resume() {
    let dir = tempfile::tempdir().unwrap();
    let ort = dir.path().join("ort.bin");
    let ckpt = dir.path().join("cells");
    let ort_s = ort.to_str().unwrap();

    let doc = document(&mub6(&["ort-table", "--table", ort_s]));
    assert_eq!(doc["results"]["count"], 322040);

    let args = ["certify", "--cells", "20,5", "--ort", ort_s, "--checkpoint-dir", ckpt.to_str().unwrap()];
    let out = mub6(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let first = document(&out);
    assert_eq!(first["verified"], true);
    assert_eq!(first["results"]["manifest"]["ort_count"], 322040);
    assert!(ckpt.join("manifest.json").exists());

    let mut resumed = args.to_vec();
    resumed.push("--resume");
    let second = document(&mub6(&resumed));
    assert_eq!(second["results"]["manifest"], first["results"]["manifest"]);
    assert!(second["timing"]["wall_time_secs"].as_f64().unwrap() < first["timing"]["wall_time_secs"].as_f64().unwrap());
}
