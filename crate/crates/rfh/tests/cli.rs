use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rfh::io::{self, ModelJson};
use rfh::pipeline;
use rfh_core::rf::synth::{random_energy_data, SynthOptions};
use serde_json::Value;

fn rfh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfh")).args(args).env_remove("RFH_SEED").output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn homology_of_examples() {
    let o = rfh(&["homology", "--example", "s2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["betti"], serde_json::json!({"0": 1, "2": 1}));
    let o = rfh(&["homology", "--example", "t2"]);
    assert_eq!(json(&o)["betti"], serde_json::json!({"0": 1, "1": 2, "2": 1}));
}

#[test]
fn malformed_boundary_is_an_input_error_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "c.json",
        r#"{"degrees": {"0": ["a"], "1": ["b"], "2": ["c"]}, "boundary": {"c": ["b"], "b": ["a"]}}"#,
    );
    let o = rfh(&["homology", &p]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("boundary squared") && err.contains("\"c\""), "{err}");
    let p = write(dir.path(), "d.json", "{\"degrees\": {\"0\": [\"a\"]},\n \"boundary\": 3}");
    let o = rfh(&["homology", &p]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn morse_complex_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let o = rfh(&["example", "t2", "--morse-complex"]);
    assert_eq!(code(&o), 0);
    let p = write(dir.path(), "t2.json", std::str::from_utf8(&o.stdout).unwrap());
    let h = rfh(&["homology", &p]);
    assert_eq!(json(&h)["betti"], serde_json::json!({"0": 1, "1": 2, "2": 1}));
    let e = rfh(&["example", "t2"]);
    let m = write(dir.path(), "t2m.json", std::str::from_utf8(&e.stdout).unwrap());
    assert_eq!(json(&rfh(&["homology", "--morse", &m]))["betti"], json(&h)["betti"]);
}

#[test]
fn gysin_examples() {
    let o = rfh(&["gysin", "--example", "s2"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["betti_bundle"], serde_json::json!([1, 1, 1, 1]));
    assert_eq!(j["long_exact_sequence"]["exact"], true);
    let j = json(&rfh(&["gysin", "--example", "rp2"]));
    assert_eq!(j["top_connecting_rank"], 1);
    assert_eq!(j["delta"]["images"], serde_json::json!({"max": ["min"]}));
    assert_eq!(j["pass"], true);
}

#[test]
fn gysin_rejects_wrong_euler_parity() {
    let dir = tempfile::tempdir().unwrap();
    let mut m: Value = serde_json::from_str(rfh::fixtures::Example::Rp2.text()).unwrap();
    m["euler"] = 0.into();
    let p = write(dir.path(), "m.json", &m.to_string());
    let o = rfh(&["gysin", &p]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Euler number"));
}

#[test]
fn rf_examples_pass() {
    for e in ["s2-rf", "rp2-rf"] {
        for cmd in ["validate", "verify-main", "hrf"] {
            let o = rfh(&["rf", cmd, "--example", e]);
            assert_eq!(code(&o), 0, "{e} {cmd}: {}", String::from_utf8_lossy(&o.stdout));
        }
    }
    let j = json(&rfh(&["rf", "verify-main", "--example", "rp2-rf"]));
    assert_eq!(j["delta_q_max"], serde_json::json!(["min"]));
    assert_eq!(j["delta_q_max_is_q_min"], true);
    assert_eq!(j["identities"].as_array().unwrap().len(), 8);
    let j = json(&rfh(&["rf", "verify-main", "--example", "s2-rf"]));
    assert_eq!(j["delta_q_max"], serde_json::json!([]));
}

#[test]
fn hrf_window() {
    let j = json(&rfh(&["rf", "hrf", "--example", "s2-rf", "--window", "0.5:inf"]));
    assert_eq!(j["window"]["hi"], "inf");
    assert_eq!(j["window"]["betti"], serde_json::json!({"1": 1, "2": 1, "3": 1, "4": 1}));
    let all = json(&rfh(&["rf", "hrf", "--example", "s2-rf", "--window", "-inf:inf"]));
    assert_eq!(all["window"]["betti"], all["hrf_by_class"]["0"]);
    assert_eq!(code(&rfh(&["rf", "hrf", "--example", "s2-rf", "--window", "3:1"])), 2);
    assert_eq!(code(&rfh(&["rf", "hrf", "--example", "s2-rf", "--window", "3"])), 2);
}

/// A random model with a tampered `P` that is no longer a homotopy.
fn tampered_model() -> ModelJson {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0.. {
        let data = random_energy_data(&mut rng, 6);
        let base = pipeline::synth(&ModelJson::from_data(&data), seed, SynthOptions::default()).unwrap();
        let run = pipeline::rf_run(&base).unwrap();
        let (x, z) = (&run.model.x, &run.model.z);
        for i in 0..x.len() {
            for t in z.block(x.degree(i) + 1) {
                let src = x.id(i).to_string();
                let mut m = base.clone();
                let p = m.p.get_or_insert_with(Default::default);
                p.entry(src).or_default().push(z.id(t).to_string());
                if let Ok(r) = pipeline::verify_main(&m) {
                    if !r.theorem.identities[0].ok() {
                        return m;
                    }
                }
            }
        }
    }
    unreachable!()
}

#[test]
fn tampered_homotopy_fails_first_identity() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "m.json", &io::to_string(&tampered_model()));
    let o = rfh(&["rf", "verify-main", &p]);
    assert_eq!(code(&o), 1);
    let j = json(&o);
    assert_eq!(j["identities"][0]["pass"], false);
    assert!(j["identities"][0]["witness"]["generator"].is_string());
    assert_eq!(j["pass"], false);
}

#[test]
fn synth_output_is_a_valid_model() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "d.json", include_str!("../fixtures/s2-rf.data.json"));
    let o = rfh(&["rf", "synth", &data, "--seed", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::str::from_utf8(&o.stdout).unwrap(), rfh::fixtures::Example::S2Rf.text());
    let data = write(dir.path(), "r.json", include_str!("../fixtures/rp2-rf.data.json"));
    let o = rfh(&["rf", "synth", &data, "--seed", "16"]);
    let m = write(dir.path(), "m.json", std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(code(&rfh(&["rf", "verify-main", &m])), 0);
}

#[test]
fn maps_file_overrides_model_maps() {
    let dir = tempfile::tempdir().unwrap();
    let model = rfh::fixtures::Example::Rp2Rf.model().unwrap();
    let maps = serde_json::json!({ "phi": model.phi, "psi": model.psi });
    let p = write(dir.path(), "maps.json", &maps.to_string());
    let j = json(&rfh(&["rf", "verify-main", "--example", "rp2-rf", "--maps", &p]));
    assert_eq!(j["model"]["p_derived"], true);
    assert_eq!(j["pass"], true);
}

#[test]
fn checks_are_deterministic_and_honour_the_seed_variable() {
    let a = rfh(&["check", "levrel", "--n-loops", "30", "--samples", "256", "--seed", "9"]);
    let b = rfh(&["check", "levrel", "--n-loops", "30", "--samples", "256", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_rfh"))
        .args(["check", "levrel", "--n-loops", "30", "--samples", "256"])
        .env("RFH_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
    let d = rfh(&["check", "levrel", "--n-loops", "30", "--samples", "256", "--seed", "10"]);
    assert_ne!(a.stdout, d.stdout);
    let j = json(&a);
    assert_eq!(j["margins"].as_array().unwrap().len(), 30);
    assert_eq!(j["pass"], true);
}

#[test]
fn small_batteries_pass() {
    for args in [
        &["check", "fenchel", "--trials", "40", "--samples", "256"][..],
        &["check", "gradient", "--eps", "1e-5", "--trials", "5"],
        &["check", "aleksandrov", "--grid", "48", "--trials", "8"],
        &["check", "transport", "--trials", "1", "--points", "200"],
    ] {
        let o = rfh(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stdout));
        assert_eq!(json(&o)["pass"], true);
    }
}

#[test]
fn bad_parameters_are_input_errors() {
    assert_eq!(code(&rfh(&["check", "gradient", "--eps", "1e-2"])), 2);
    assert_eq!(code(&rfh(&["check", "levrel", "--samples", "4", "--n-loops", "1"])), 2);
    assert_eq!(code(&rfh(&["check", "levrel", "--bogus"])), 2);
    assert_eq!(code(&rfh(&["homology"])), 2);
    assert_eq!(code(&rfh(&["gysin", "--example", "s2-rf"])), 2);
}

#[test]
fn output_file_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.txt");
    let o = rfh(&["gysin", "--example", "rp2", "--format", "text", "--output", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(p).unwrap();
    assert!(text.contains("b_k(S*M)") && text.contains("rank H_n(M) -> H_0(M)     1"));
}

#[test]
fn coarse_levrel_grids_fail_the_witness_tolerance() {
    let o = rfh(&["check", "levrel", "--n-loops", "30", "--samples", "64", "--seed", "9"]);
    assert_eq!(code(&o), 1);
    let j = json(&o);
    assert!(j["min_margin"].as_f64().unwrap() >= -1e-9);
    assert!(j["max_witness_residual"].as_f64().unwrap() > 1e-6);
}
