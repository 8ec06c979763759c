#![allow(dead_code)]

use mapsolve::PowerCostMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random feasible matrix: integer-ish or continuous powers, some infinities,
/// optional operational offset.
pub fn random_matrix(seed: u64, m: usize, n: usize, inf_prob: f64, p0: f64) -> PowerCostMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let integer = rng.random_bool(0.3);
    let mut rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.random_bool(inf_prob) {
                        f64::INFINITY
                    } else if integer {
                        p0 + rng.random_range(1..10) as f64
                    } else {
                        p0 + rng.random::<f64>() * 0.1
                    }
                })
                .collect()
        })
        .collect();
    for row in &mut rows {
        if row.iter().all(|v| v.is_infinite()) {
            let j = rng.random_range(0..n);
            row[j] = p0 + rng.random::<f64>();
        }
    }
    PowerCostMatrix::from_f64(&rows).unwrap()
}

/// Random shape in m ∈ [1, max_m], n ∈ [1, max_n] and a random matrix of it.
pub fn random_instance(seed: u64, max_m: usize, max_n: usize) -> PowerCostMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let m = rng.random_range(1..=max_m);
    let n = rng.random_range(1..=max_n);
    let inf_prob = [0.0, 0.2, 0.5][rng.random_range(0..3)];
    let p0 = if rng.random_bool(0.5) { 0.0 } else { 12.0 };
    random_matrix(seed, m, n, inf_prob, p0)
}

/// Independent oracle: minimal per-cluster-max total over all n^m assignments.
pub fn enumerate_optimum(p: &PowerCostMatrix) -> f64 {
    let (m, n) = (p.mobiles(), p.stations());
    let mut best = f64::INFINITY;
    let mut a = vec![0usize; m];
    'outer: loop {
        let mut maxima = vec![0.0f64; n];
        let mut ok = true;
        for (i, &j) in a.iter().enumerate() {
            let v = p.get(i, j).value();
            if v.is_infinite() {
                ok = false;
                break;
            }
            maxima[j] = maxima[j].max(v);
        }
        if ok {
            best = best.min(maxima.iter().sum());
        }
        for k in (0..m).rev() {
            a[k] += 1;
            if a[k] < n {
                continue 'outer;
            }
            a[k] = 0;
        }
        return best;
    }
}

/// Feasible matrices up to `max_m × max_n`: two-decimal powers in (0, 10),
/// roughly one entry in four infinite, operational offset 0 or 12.
pub fn matrix_strategy(max_m: usize, max_n: usize) -> impl Strategy<Value = PowerCostMatrix> {
    (1..=max_m, 1..=max_n, prop_oneof![Just(0.0), Just(12.0)]).prop_flat_map(|(m, n, p0)| {
        let cell =
            prop_oneof![3 => (1u32..1000).prop_map(|v| Some(v as f64 / 100.0)), 1 => Just(None)];
        proptest::collection::vec(proptest::collection::vec(cell, n), m).prop_map(move |rows| {
            let rows: Vec<Vec<f64>> = rows
                .into_iter()
                .map(|row| {
                    let mut r: Vec<f64> = row
                        .iter()
                        .map(|c| c.map_or(f64::INFINITY, |v| v + p0))
                        .collect();
                    if r.iter().all(|v| v.is_infinite()) {
                        r[0] = p0 + 1.0;
                    }
                    r
                })
                .collect();
            PowerCostMatrix::from_f64(&rows).unwrap()
        })
    })
}
