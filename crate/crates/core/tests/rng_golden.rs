//! Pins the random streams to stored vectors so that seeded results stay
//! reproducible across versions. Regenerate with `PCMCTS_BLESS=1`.
//!
//! Format (`golden/rng_vectors.json`): a list of
//! `{root_seed, path: [[label, index]...], digest, seed, u64: [..8], f64_bits: [..4]}`
//! where `u64` and `f64_bits` (IEEE-754 bit patterns) are the first draws of
//! the derived stream.

use pcmcts::rng::{derive_stream, StreamKey};
use serde_json::{json, Value};

const PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/rng_vectors.json");

fn cases() -> Vec<(u64, Vec<(&'static str, u64)>)> {
    vec![
        (42, vec![("tree", 0)]),
        (0, vec![]),
        (42, vec![("worker", 3), ("rollout", 0)]),
        (u64::MAX, vec![("combination", 7), ("rep", 49)]),
    ]
}

fn vector(root_seed: u64, path: &[(&str, u64)]) -> Value {
    let key = path
        .iter()
        .fold(StreamKey::new(root_seed), |k, (label, i)| k.child(label, *i));
    let mut s = derive_stream(&key);
    let u: Vec<u64> = (0..8).map(|_| s.next_u64()).collect();
    let f: Vec<u64> = (0..4).map(|_| s.next_f64().to_bits()).collect();
    json!({
        "root_seed": root_seed,
        "path": path,
        "digest": key.digest(),
        "seed": key.to_seed(),
        "u64": u,
        "f64_bits": f,
    })
}

#[test]
fn streams_match_stored_vectors() {
    let current: Vec<Value> = cases().iter().map(|(seed, path)| vector(*seed, path)).collect();
    if std::env::var_os("PCMCTS_BLESS").is_some() {
        std::fs::write(PATH, serde_json::to_string_pretty(&current).unwrap()).unwrap();
    }
    let stored: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(PATH).unwrap()).unwrap();
    assert_eq!(stored.len(), current.len());
    for (s, c) in stored.iter().zip(&current) {
        assert_eq!(s, c, "stream for {} {} changed", s["root_seed"], s["path"]);
    }
}

#[test]
fn f64_draws_are_the_top_53_bits() {
    let key = StreamKey::new(42).child("tree", 0);
    let (mut a, mut b) = (derive_stream(&key), derive_stream(&key));
    for _ in 0..1000 {
        let u = a.next_u64();
        assert_eq!(b.next_f64(), (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64));
    }
}
