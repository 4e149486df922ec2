//! Writes the bundled problem files into `fixtures/`.
//!
//! `cargo run -p qdisc-cli --example gen_fixtures`

use std::f64::consts::PI;
use std::path::Path;

use qdisc::{random, ComplexMatrix, ComplexVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn matrix(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| Value::from((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect::<Vec<_>>()))
        .collect();
    Value::from(rows)
}

fn vector(v: &ComplexVector) -> Value {
    Value::from(v.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>())
}

fn real_matrix(rows: &[&[f64]]) -> Value {
    Value::from(
        rows.iter()
            .map(|r| Value::from(r.iter().map(|&x| json!([x, 0.0])).collect::<Vec<_>>()))
            .collect::<Vec<_>>(),
    )
}

fn real_vector(xs: &[f64]) -> Value {
    Value::from(xs.iter().map(|&x| json!([x, 0.0])).collect::<Vec<_>>())
}

fn write(dir: &Path, name: &str, doc: Value) {
    let text = serde_json::to_string_pretty(&doc).unwrap() + "\n";
    std::fs::write(dir.join(name), text).unwrap();
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();

    let ket0 = real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let mixed = real_matrix(&[&[0.5, 0.0], &[0.0, 0.5]]);
    write(&dir, "pure_vs_mixed_minimax.json", json!({
        "schema_version": "1",
        "mode": "minimax",
        "states": [{ "matrix": ket0 }, { "matrix": mixed }],
    }));
    write(&dir, "pure_vs_mixed_bayes.json", json!({
        "schema_version": "1",
        "mode": "bayes",
        "states": [{ "matrix": ket0 }, { "matrix": mixed }],
        "prior": [0.25, 0.75],
    }));
    write(&dir, "identical_states.json", json!({
        "schema_version": "1",
        "mode": "minimax",
        "states": [{ "matrix": mixed }, { "matrix": mixed }],
    }));

    let trine: Vec<Value> = (0..3)
        .map(|k| {
            let th = k as f64 * PI / 3.0;
            json!({ "vector": real_vector(&[th.cos(), th.sin()]) })
        })
        .collect();
    write(&dir, "trine_minimax.json", json!({
        "schema_version": "1",
        "mode": "minimax",
        "states": trine,
    }));
    let rotations: Vec<Value> = (0..3)
        .map(|k| {
            let (s, c) = (k as f64 * PI / 3.0).sin_cos();
            real_matrix(&[&[c, -s], &[s, c]])
        })
        .collect();
    write(&dir, "trine_covariant.json", json!({
        "schema_version": "1",
        "mode": "covariant",
        "states": [{ "vector": real_vector(&[1.0, 0.0]) }],
        "group": rotations,
    }));

    write(&dir, "three_state_unambiguous.json", json!({
        "schema_version": "1",
        "mode": "unambiguous",
        "states": [
            { "vector": real_vector(&[1.0, 0.0, 0.0]) },
            { "vector": real_vector(&[0.5, 0.75f64.sqrt(), 0.0]) },
            { "vector": real_vector(&[0.0, 0.0, 1.0]) },
        ],
    }));
    write(&dir, "orthonormal_unambiguous.json", json!({
        "schema_version": "1",
        "mode": "unambiguous",
        "states": [
            { "vector": real_vector(&[1.0, 0.0]) },
            { "vector": real_vector(&[0.0, 1.0]) },
        ],
    }));

    for seed in [1u64, 2, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::density_matrix(2, 2, &mut rng);
        let b = random::density_matrix(2, 1 + (seed as usize % 2), &mut rng);
        write(&dir, &format!("qubit_pair_seed{seed}.json"), json!({
            "schema_version": "1",
            "mode": "minimax",
            "states": [{ "matrix": matrix(a.matrix()) }, { "matrix": matrix(b.matrix()) }],
        }));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let states: Vec<Value> = (0..3)
        .map(|_| json!({ "vector": vector(&random::pure_state(3, &mut rng)) }))
        .collect();
    write(&dir, "weighted_qutrit_bayes.json", json!({
        "schema_version": "1",
        "mode": "bayes",
        "states": states,
        "weights": [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
        "prior": [0.5, 0.3, 0.2],
    }));
    write(&dir, "weighted_qutrit_minimax.json", json!({
        "schema_version": "1",
        "mode": "minimax",
        "states": states,
        "weights": [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]],
    }));
}
