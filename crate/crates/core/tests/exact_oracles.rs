mod common;

use common::{enumerate_optimum, random_instance, random_matrix};
use mapsolve::exact::{brute_force, hold_minimum, set_cover_exact, BruteForceBudget};
use mapsolve::{reduce_collection, PowerCostMatrix};

/// Best cover that takes at most one reduced candidate per station. Candidates
/// of one station are nested, so a second one at the same station never helps.
fn cover_optimum_from_collection(p: &PowerCostMatrix) -> f64 {
    let coll = reduce_collection(p).unwrap();
    let n = p.stations();
    let per_bs: Vec<Vec<&mapsolve::CandidateSet>> = (0..n)
        .map(|j| coll.iter().filter(|c| c.bs == j).collect())
        .collect();
    for sets in &per_bs {
        for w in sets.windows(2) {
            assert!(
                w[0].mobiles.iter().all(|i| w[1].contains(*i)),
                "prefixes must be nested"
            );
            assert!(w[0].cost < w[1].cost);
        }
    }
    let mut best = f64::INFINITY;
    let mut pick = vec![0usize; n]; // 0 = none, k = k-th candidate
    loop {
        let mut covered = vec![false; p.mobiles()];
        let mut cost = 0.0;
        for j in 0..n {
            if pick[j] > 0 {
                let c = per_bs[j][pick[j] - 1];
                cost += c.cost.value();
                for &i in &c.mobiles {
                    covered[i] = true;
                }
            }
        }
        if covered.iter().all(|&c| c) {
            best = best.min(cost);
        }
        let mut k = 0;
        loop {
            if k == n {
                return best;
            }
            pick[k] += 1;
            if pick[k] <= per_bs[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn dominance_reduction_keeps_the_optimum() {
    for seed in 0..300 {
        let p = random_instance(seed, 6, 4);
        let opt = enumerate_optimum(&p);
        let cover = cover_optimum_from_collection(&p);
        assert!(
            (opt - cover).abs() <= 1e-12 * opt.max(1.0),
            "seed {seed}: partition {opt} vs cover {cover}"
        );
        assert!(reduce_collection(&p).unwrap().len() <= p.mobiles() * p.stations());
    }
}

#[test]
fn brute_force_matches_independent_enumeration() {
    for seed in 0..200 {
        let p = random_instance(seed, 6, 4);
        let r = brute_force(&p, BruteForceBudget::default()).unwrap();
        assert_eq!(r.total(), enumerate_optimum(&p), "seed {seed}");
    }
}

#[test]
fn set_cover_equals_brute_force_on_six_by_four() {
    for seed in 0..200 {
        let p = random_matrix(
            1000 + seed,
            6,
            4,
            0.2,
            if seed % 2 == 0 { 0.0 } else { 12.0 },
        );
        let bf = brute_force(&p, BruteForceBudget::default()).unwrap();
        let sc = set_cover_exact(&p).unwrap();
        assert_eq!(sc.total(), bf.total(), "seed {seed}");
        assert_eq!(
            sc.total_power,
            mapsolve::total_cost(&sc.assignment, &p).unwrap()
        );
    }
}

#[test]
fn hold_minimum_equals_independent_enumeration() {
    for seed in 0..2000 {
        let p = random_instance(5000 + seed, 7, 4);
        let r = hold_minimum(&p).unwrap();
        assert_eq!(r.total(), enumerate_optimum(&p), "seed {seed}");
    }
}

#[test]
fn hold_minimum_terminates_within_step_bound() {
    for seed in 0..200 {
        let p = random_instance(seed, 6, 4);
        let r = hold_minimum(&p).unwrap();
        assert!(r.total().is_finite());
        r.assignment.validate(&p).unwrap();
    }
}
