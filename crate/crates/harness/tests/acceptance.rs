//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mapsolve::distributed::dcc;
use mapsolve::exact::{brute_force, hold_minimum, set_cover_exact, BruteForceBudget};
use mapsolve::fixtures::{cc_example, three_by_three, three_by_two, two_by_two};
use mapsolve::game::{
    hedonic_decision, improving_deviations, player_utility, potential, GameConfig, InitPolicy,
    StrategyTuple,
};
use mapsolve::heuristics::{column_control, greedy_set_cover, nearest_bs};
use mapsolve::propagation::{Area, PropagationParams};
use mapsolve::PowerCostMatrix;
use mapsolve_harness::experiment::{mean_stderr, trial_instance};
use mapsolve_harness::report::COMPARE_COLUMNS;
use mapsolve_harness::{
    rounds_vs_area, run_trials, sweep, sweep_theta, Algorithm, ExperimentConfig, SweepParam,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(cond: bool, failures: &mut Vec<String>, what: impl Into<String>) {
    if !cond {
        failures.push(what.into());
    }
}

fn verdict(failures: Vec<String>, detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail }
    } else {
        Outcome {
            pass: false,
            detail: format!("{detail}; failed: {}", failures.join("; ")),
        }
    }
}

fn worked_examples() -> Outcome {
    let mut f = Vec::new();
    let b = BruteForceBudget::default();
    let e1 = two_by_two();
    check(
        brute_force(&e1, b).unwrap().total() == 4.0,
        &mut f,
        "brute 2x2",
    );
    check(
        set_cover_exact(&e1).unwrap().total() == 4.0,
        &mut f,
        "sc 2x2",
    );
    check(hold_minimum(&e1).unwrap().total() == 4.0, &mut f, "hm 2x2");
    check(
        column_control(&e1).unwrap().total() == 5.0,
        &mut f,
        "cc 2x2",
    );
    check(nearest_bs(&e1).unwrap().total() == 4.0, &mut f, "nbs 2x2");

    let e2 = three_by_three();
    for (name, r) in [
        ("brute", brute_force(&e2, b).unwrap()),
        ("sc", set_cover_exact(&e2).unwrap()),
    ] {
        check(
            r.total() == 31.0 && r.assignment.serving_bs() == [1, 1, 1],
            &mut f,
            format!("{name} 3x3"),
        );
    }

    let hm = hold_minimum(&three_by_two()).unwrap();
    check(
        hm.total() == 5.0 && hm.assignment.serving_bs() == [1, 0, 0],
        &mut f,
        "hm 3x2",
    );

    let cc = column_control(&cc_example()).unwrap();
    check(
        (cc.total() - 24.72).abs() <= 1e-9 && cc.assignment.serving_bs() == [2, 2, 2, 2, 3],
        &mut f,
        "cc 5x4",
    );
    check(
        dcc(&cc_example()).unwrap().assignment.bs_of(0) == 2,
        &mut f,
        "dcc mobile 1",
    );
    verdict(f, "all worked examples checked".into())
}

/// Feasible random matrix with a mix of infinity patterns.
fn oracle_matrix(seed: u64) -> PowerCostMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=7);
    let n = rng.random_range(1..=4);
    let p0 = if seed.is_multiple_of(2) { 0.0 } else { 12.0 };
    let inf_prob = [0.0, 0.15, 0.35, 0.6][rng.random_range(0..4)];
    let integer = rng.random_bool(0.3);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let mut row: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random_bool(inf_prob) {
                        f64::INFINITY
                    } else if integer {
                        p0 + rng.random_range(1..6) as f64
                    } else {
                        p0 + 0.1 * rng.random::<f64>()
                    }
                })
                .collect();
            if row.iter().all(|v| v.is_infinite()) {
                row[rng.random_range(0..n)] = p0 + rng.random::<f64>();
            }
            row
        })
        .collect();
    PowerCostMatrix::from_f64(&rows).unwrap()
}

fn oracle_sweep() -> Outcome {
    let mut f = Vec::new();
    let count = 1000u64;
    let mut hm_mismatch = Vec::new();
    for seed in 0..count {
        let p = oracle_matrix(seed);
        let opt = brute_force(&p, BruteForceBudget::default())
            .unwrap()
            .total();
        if set_cover_exact(&p).unwrap().total() != opt {
            f.push(format!("sc != brute at seed {seed}"));
        }
        if hold_minimum(&p).unwrap().total() != opt {
            hm_mismatch.push(seed);
        }
        let mut others = vec![
            ("greedy", greedy_set_cover(&p).unwrap().total()),
            ("cc", column_control(&p).unwrap().total()),
            ("dcc", dcc(&p).unwrap().total()),
            ("nbs", nearest_bs(&p).unwrap().total()),
        ];
        for theta in [0.0, 0.003, 0.1] {
            others.push((
                "hd",
                hedonic_decision(&p, &GameConfig::new(theta, seed))
                    .unwrap()
                    .0
                    .total(),
            ));
        }
        for (name, total) in others {
            if total < opt {
                f.push(format!("{name} {total} below optimum {opt} at seed {seed}"));
            }
        }
    }
    if !hm_mismatch.is_empty() {
        f.push(format!("hold-minimum mismatches at seeds {hm_mismatch:?}"));
    }
    verdict(
        f,
        format!(
            "{count} instances, {} hold-minimum mismatches",
            hm_mismatch.len()
        ),
    )
}

fn potential_suite() -> Outcome {
    let mut f = Vec::new();
    let samples = 500u64;
    let mut worst = 0.0f64;
    for seed in 0..samples {
        let p = oracle_matrix(10_000 + seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = [0.0, 0.003, 0.05, 1.0][seed as usize % 4];
        let choice = (0..p.mobiles())
            .map(|x| {
                let ok: Vec<usize> = (0..p.stations())
                    .filter(|&j| p.get(x, j).is_finite())
                    .collect();
                ok[rng.random_range(0..ok.len())]
            })
            .collect();
        let sigma = StrategyTuple::new(choice, &p).unwrap();
        let x = rng.random_range(0..p.mobiles());
        let ok: Vec<usize> = (0..p.stations())
            .filter(|&j| p.get(x, j).is_finite())
            .collect();
        let to = ok[rng.random_range(0..ok.len())];
        let du = player_utility(x, to, &sigma, theta, &p).unwrap()
            - player_utility(x, sigma.choice_of(x), &sigma, theta, &p).unwrap();
        let phi = potential(&sigma, theta, &p);
        let err = (potential(&sigma.moved(x, to), theta, &p) - phi - du).abs() / phi.abs().max(1.0);
        worst = worst.max(err);
        if err > 1e-12 {
            f.push(format!(
                "potential identity off by {err:e} at sample {seed}"
            ));
        }
    }

    let runs = 300u64;
    for seed in 0..runs {
        let p = oracle_matrix(20_000 + seed);
        let theta = [0.0, 0.002, 0.05, 2.0][seed as usize % 4];
        let mut cfg = GameConfig::new(theta, seed);
        if seed % 3 == 0 {
            cfg.init = InitPolicy::UniformRandomFeasible;
        }
        let (r, trace) = hedonic_decision(&p, &cfg).unwrap();
        let mut last = trace.initial_potential;
        if trace.potential_values.iter().any(|&v| {
            let up = v > last;
            last = v;
            !up
        }) {
            f.push(format!("potential not strictly increasing on run {seed}"));
        }
        if trace.converged {
            let sigma = StrategyTuple::new(r.assignment.serving_bs().to_vec(), &p).unwrap();
            if !improving_deviations(&sigma, theta, &p).unwrap().is_empty() {
                f.push(format!("endpoint of run {seed} is not an equilibrium"));
            }
        } else {
            f.push(format!("run {seed} did not converge"));
        }
        let zero = hedonic_decision(&p, &GameConfig::new(0.0, seed)).unwrap().0;
        if zero.assignment != nearest_bs(&p).unwrap().assignment {
            f.push(format!(
                "theta 0 differs from nearest station on run {seed}"
            ));
        }
    }
    verdict(
        f,
        format!("{samples} moves (worst relative error {worst:.1e}), {runs} dynamics runs"),
    )
}

fn round_counts() -> Outcome {
    let cfg = ExperimentConfig::ppp(
        Area::square_km2(1.0).unwrap(),
        0.10e-3,
        1.11e-3,
        PropagationParams::small_cell(),
        vec![Algorithm::Hd],
    )
    .with_trials(60)
    .with_seed(2024)
    .with_theta(0.008);
    let points = rounds_vs_area(&cfg, &[0.98, 1.28, 1.62, 2.00]).unwrap();
    let mut f = Vec::new();
    let mut shown = Vec::new();
    for p in points.iter().filter(|p| p.op_power == 12.0) {
        shown.push(format!("{} km2: {:.2}", p.area_km2, p.mean_rounds));
        check(
            (2.0..=5.0).contains(&p.mean_rounds),
            &mut f,
            format!("{} km2 mean {}", p.area_km2, p.mean_rounds),
        );
        check(
            p.trials >= 50,
            &mut f,
            format!("{} km2 has {} trials", p.area_km2, p.trials),
        );
    }
    verdict(f, format!("mean rounds {}", shown.join(", ")))
}

fn trends() -> Outcome {
    let grid = [2e-6, 4e-6, 6e-6, 8e-6];
    let mut f = Vec::new();
    let mut shown = Vec::new();
    for p0 in [0.0, 12.0] {
        let params = PropagationParams {
            op_power: p0,
            ..PropagationParams::small_cell()
        };
        let cfg = ExperimentConfig::ppp(
            Area::square_km2(4.0).unwrap(),
            grid[0],
            1e-4,
            params,
            vec![Algorithm::Nbs, Algorithm::Cc],
        )
        .with_trials(500)
        .with_seed(2024);
        let s = sweep(&cfg, SweepParam::LambdaB, &grid).unwrap();
        let of = |alg: Algorithm| -> Vec<f64> {
            s.rows
                .iter()
                .filter(|r| r.alg == alg)
                .map(|r| r.mean_w)
                .collect()
        };
        let (nbs, cc) = (of(Algorithm::Nbs), of(Algorithm::Cc));
        for r in &s.rows {
            check(
                r.trials >= 400,
                &mut f,
                format!("only {} feasible trials at P0 {p0}", r.trials),
            );
        }
        let fmt = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.4}"))
                .collect::<Vec<_>>()
                .join("/")
        };
        if p0 == 0.0 {
            check(
                nbs.windows(2).all(|w| w[1] < w[0]),
                &mut f,
                "NBS not decreasing without P0",
            );
            shown.push(format!("NBS P0=0 {}", fmt(&nbs)));
        } else {
            check(
                nbs.windows(2).all(|w| w[1] > w[0]),
                &mut f,
                "NBS not increasing with P0",
            );
            check(
                cc.iter().zip(&nbs).all(|(c, n)| c <= n),
                &mut f,
                "CC above NBS",
            );
            shown.push(format!("NBS P0=12 {} CC {}", fmt(&nbs), fmt(&cc)));
        }
    }
    verdict(f, shown.join("; "))
}

fn theta_shape() -> Outcome {
    let grid = [0.0, 0.00025, 0.0005, 0.001, 0.002, 0.004, 0.008, 0.016];
    let cfg = ExperimentConfig::ppp(
        Area::square_km2(6.25).unwrap(),
        1.11e-5,
        8e-6,
        PropagationParams::small_cell(),
        vec![Algorithm::Hd],
    )
    .with_trials(2000)
    .with_seed(2024);
    let s = sweep_theta(&cfg, &grid).unwrap();
    let means: Vec<f64> = s.points.iter().map(|p| p.mean_w).collect();
    let (first, last) = (means[0], means[means.len() - 1]);
    let interior = (1..grid.len() - 1)
        .filter(|&k| means[k] < first && means[k] < last)
        .min_by(|&a, &b| means[a].total_cmp(&means[b]));

    // paired gap between the best interior point and the grid maximum
    let gap = interior.map(|k| {
        let diffs: Vec<f64> = (0..cfg.trials)
            .filter_map(|t| {
                let inst = trial_instance(&cfg, t).unwrap();
                let p = inst
                    .matrix
                    .filter(|p| p.check_feasibility().is_feasible())?;
                let run = |theta| {
                    hedonic_decision(&p, &GameConfig::new(theta, inst.seed))
                        .unwrap()
                        .0
                        .total()
                };
                Some(run(grid[grid.len() - 1]) - run(grid[k]))
            })
            .collect();
        mean_stderr(&diffs)
    });
    let normalized: Vec<String> = s
        .points
        .iter()
        .map(|p| format!("{:.4}", p.normalized))
        .collect();
    let detail = match (interior, gap) {
        (Some(k), Some((g, se))) => format!(
            "normalized {} ; minimum at theta {} ; gap to theta max {g:.3} W (paired stderr {se:.3})",
            normalized.join(" "),
            grid[k]
        ),
        _ => format!("normalized {}", normalized.join(" ")),
    };
    let mut f = Vec::new();
    check(interior.is_some(), &mut f, "no interior minimum");
    verdict(f, detail)
}

fn table_two_pattern() -> Outcome {
    let mut cfg = ExperimentConfig::ppp(
        Area::square_km2(4.0).unwrap(),
        6.0 / 4e6,
        18.0 / 4e6,
        PropagationParams::small_cell(),
        COMPARE_COLUMNS.to_vec(),
    )
    .with_trials(200)
    .with_seed(2024)
    .with_theta(0.003);
    cfg.hm_max_calls = 100_000;
    let recs = run_trials(&cfg).unwrap();
    let solved: Vec<_> = recs.iter().filter(|r| r.is_solved()).collect();
    let k = solved.len() as f64;
    let nbs_worse = solved
        .iter()
        .filter(|r| r.total(Algorithm::Nbs).unwrap() > r.total(Algorithm::Cc).unwrap())
        .count();
    let hd_close = solved
        .iter()
        .filter(|r| r.total(Algorithm::Hd).unwrap() <= 2.0 * r.total(Algorithm::Sc).unwrap())
        .count();
    let mut f = Vec::new();
    check(
        solved.len() >= 100,
        &mut f,
        format!("only {} feasible instances", solved.len()),
    );
    check(
        nbs_worse as f64 >= 0.8 * k,
        &mut f,
        "NBS not worse than CC often enough",
    );
    check(
        hd_close as f64 >= 0.9 * k,
        &mut f,
        "HD beyond twice the optimum too often",
    );
    verdict(
        f,
        format!(
            "{} instances: NBS > CC on {:.1}%, HD <= 2x optimum on {:.1}%",
            solved.len(),
            100.0 * nbs_worse as f64 / k,
            100.0 * hd_close as f64 / k
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 7] = [
        ("worked examples", Duration::from_secs(1), worked_examples),
        ("oracle sweep", Duration::from_secs(120), oracle_sweep),
        ("potential game", Duration::from_secs(30), potential_suite),
        ("round counts", Duration::from_secs(120), round_counts),
        ("power trends", Duration::from_secs(300), trends),
        ("theta sweep shape", Duration::from_secs(300), theta_shape),
        (
            "comparison pattern",
            Duration::from_secs(300),
            table_two_pattern,
        ),
    ];
    let mut all = true;
    for (k, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut out = run();
        let took = start.elapsed();
        if took > limit {
            out.pass = false;
            out.detail += &format!("; took {took:.1?}, limit {limit:?}");
        }
        all &= out.pass;
        println!(
            "criterion {} ({name}): {} [{took:.2?}] {}",
            k + 1,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
