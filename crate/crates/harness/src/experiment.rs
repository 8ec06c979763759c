//! Seeded trials and their aggregation.

use mapsolve::distributed::dcc;
use mapsolve::exact::{brute_force, enumeration_size, hold_minimum_with, set_cover_exact};
use mapsolve::game::{hedonic_decision, GameConfig};
use mapsolve::heuristics::{column_control, greedy_set_cover, nearest_bs};
use mapsolve::propagation::{build_cost_matrix, Area, Deployment, Scenario};
use mapsolve::{MapError, PowerCostMatrix};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, ExperimentConfig, InstanceSource};
use crate::error::{HarnessError, Result};

/// Seed of trial `index`: the first word of ChaCha8 stream `index` under
/// `root_seed`. Every trial owns its stream, so trials can run in any order and
/// the set of enabled algorithms never shifts scenario generation.
pub fn trial_seed(root_seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// One generated (or injected) instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub trial: u64,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    /// `None` when the scenario drew no mobile or no station.
    pub matrix: Option<PowerCostMatrix>,
}

pub fn trial_instance(cfg: &ExperimentConfig, trial: u64) -> Result<Instance> {
    let seed = trial_seed(cfg.root_seed, trial);
    match &cfg.source {
        InstanceSource::Matrix { matrix } => Ok(Instance {
            trial,
            seed,
            m: matrix.mobiles(),
            n: matrix.stations(),
            matrix: Some(matrix.clone()),
        }),
        InstanceSource::Scenario {
            deployment,
            area,
            params,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scn = Scenario::generate(*deployment, *area, &mut rng)?;
            let (m, n) = (scn.mobiles.len(), scn.bs.len());
            let matrix = if m == 0 || n == 0 {
                None
            } else {
                Some(build_cost_matrix(&scn, params, &mut rng)?)
            };
            Ok(Instance {
                trial,
                seed,
                m,
                n,
                matrix,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgRun {
    pub alg: Algorithm,
    pub total_w: Option<f64>,
    pub active_bs: Option<usize>,
    /// HD only.
    pub rounds: Option<u64>,
    pub converged: Option<bool>,
    /// Why no result was produced (over budget).
    pub skipped: Option<String>,
}

impl AlgRun {
    fn skipped(alg: Algorithm, why: String) -> Self {
        AlgRun {
            alg,
            total_w: None,
            active_bs: None,
            rounds: None,
            converged: None,
            skipped: Some(why),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrialStatus {
    Solved,
    /// Mobiles no station can serve.
    Infeasible {
        uncovered: Vec<usize>,
    },
    /// No mobile or no station was drawn.
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub status: TrialStatus,
    pub runs: Vec<AlgRun>,
}

impl TrialRecord {
    pub fn run(&self, alg: Algorithm) -> Option<&AlgRun> {
        self.runs.iter().find(|r| r.alg == alg)
    }

    pub fn total(&self, alg: Algorithm) -> Option<f64> {
        self.run(alg).and_then(|r| r.total_w)
    }

    pub fn is_solved(&self) -> bool {
        self.status == TrialStatus::Solved
    }
}

/// Runs one algorithm on `p`. Budget overruns become skipped runs.
pub fn solve_with(
    alg: Algorithm,
    p: &PowerCostMatrix,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<AlgRun> {
    let mut rounds = None;
    let mut converged = None;
    let result = match alg {
        Algorithm::Brute => {
            let states = enumeration_size(p);
            if states > cfg.brute_budget.max_enumeration as u128 {
                return Ok(AlgRun::skipped(
                    alg,
                    format!("{states} assignments over budget"),
                ));
            }
            brute_force(p, cfg.brute_budget)
        }
        Algorithm::Sc => set_cover_exact(p),
        Algorithm::Hm => match hold_minimum_with(p, cfg.hm_limits()) {
            Err(e @ MapError::BudgetExceeded { .. }) => {
                return Ok(AlgRun::skipped(alg, e.to_string()))
            }
            other => other,
        },
        Algorithm::Greedy => greedy_set_cover(p),
        Algorithm::Cc => column_control(p),
        Algorithm::Dcc => dcc(p),
        Algorithm::Nbs => nearest_bs(p),
        Algorithm::Hd => {
            let game = GameConfig {
                theta: cfg.theta,
                max_rounds: cfg.hd_max_rounds,
                seed,
                init: cfg.hd_init,
            };
            hedonic_decision(p, &game).map(|(r, trace)| {
                rounds = Some(trace.rounds);
                converged = Some(trace.converged);
                r
            })
        }
    }?;
    Ok(AlgRun {
        alg,
        total_w: Some(result.total()),
        active_bs: Some(result.active_bs.len()),
        rounds,
        converged,
        skipped: None,
    })
}

fn near(a: f64, b: f64) -> f64 {
    1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// No run may beat a proven optimum, and proven optima must agree.
fn check_sanity(record: &TrialRecord, p: &PowerCostMatrix) -> Result<()> {
    let exact: Vec<f64> = record
        .runs
        .iter()
        .filter(|r| r.alg.is_exact())
        .filter_map(|r| r.total_w)
        .collect();
    let Some(optimum) = exact.iter().copied().reduce(f64::min) else {
        return Ok(());
    };
    for run in &record.runs {
        let Some(total) = run.total_w else { continue };
        let below = total < optimum - near(total, optimum);
        let exact_above = run.alg.is_exact() && total > optimum + near(total, optimum);
        if below || exact_above {
            return Err(HarnessError::Sanity {
                trial: record.trial,
                seed: record.seed,
                alg: run.alg.to_string(),
                total,
                optimum,
                matrix_csv: p.to_csv_string(),
            });
        }
    }
    Ok(())
}

/// Solves one instance with every enabled algorithm.
///
/// Infeasible and empty instances are recorded without runs.
pub fn run_trial(cfg: &ExperimentConfig, trial: u64) -> Result<TrialRecord> {
    let inst = trial_instance(cfg, trial)?;
    let mut record = TrialRecord {
        trial,
        seed: inst.seed,
        m: inst.m,
        n: inst.n,
        status: TrialStatus::Solved,
        runs: Vec::new(),
    };
    let Some(p) = inst.matrix else {
        record.status = if inst.m > 0 {
            TrialStatus::Infeasible {
                uncovered: (0..inst.m).collect(),
            }
        } else {
            TrialStatus::Empty
        };
        return Ok(record);
    };
    let report = p.check_feasibility();
    if !report.is_feasible() {
        record.status = TrialStatus::Infeasible {
            uncovered: report.uncoverable,
        };
        return Ok(record);
    }
    for &alg in &cfg.algorithms {
        record.runs.push(solve_with(alg, &p, cfg, inst.seed)?);
    }
    check_sanity(&record, &p)?;
    Ok(record)
}

/// All trials of `cfg`, in trial order. Trials run in parallel.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect()
}

/// Per-algorithm aggregate at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    /// The swept parameters and their values at this point.
    pub params: Vec<(String, f64)>,
    pub alg: Algorithm,
    /// Mean total power over the trials that produced a result; NaN if none did.
    pub mean_w: f64,
    pub stderr_w: f64,
    pub mean_active_bs: f64,
    pub mean_rounds: Option<f64>,
    /// Trials contributing to the means.
    pub trials: u64,
    pub infeasible: u64,
    /// Feasible trials where the algorithm was skipped for budget reasons.
    pub skipped: u64,
}

impl SummaryRow {
    pub fn is_empty(&self) -> bool {
        self.trials == 0
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

pub fn summarize(
    records: &[TrialRecord],
    algorithms: &[Algorithm],
    params: &[(String, f64)],
) -> Vec<SummaryRow> {
    let infeasible = records.iter().filter(|r| !r.is_solved()).count() as u64;
    algorithms
        .iter()
        .map(|&alg| {
            let runs: Vec<&AlgRun> = records.iter().filter_map(|r| r.run(alg)).collect();
            let done: Vec<&AlgRun> = runs
                .iter()
                .copied()
                .filter(|r| r.total_w.is_some())
                .collect();
            let totals: Vec<f64> = done.iter().filter_map(|r| r.total_w).collect();
            let (mean_w, stderr_w) = mean_stderr(&totals);
            let active: Vec<f64> = done
                .iter()
                .filter_map(|r| r.active_bs)
                .map(|a| a as f64)
                .collect();
            let rounds: Vec<f64> = done
                .iter()
                .filter_map(|r| r.rounds)
                .map(|r| r as f64)
                .collect();
            SummaryRow {
                params: params.to_vec(),
                alg,
                mean_w,
                stderr_w,
                mean_active_bs: mean_stderr(&active).0,
                mean_rounds: (!rounds.is_empty()).then(|| mean_stderr(&rounds).0),
                trials: totals.len() as u64,
                infeasible,
                skipped: (runs.len() - done.len()) as u64,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarlo {
    pub rows: Vec<SummaryRow>,
    pub trials: Vec<TrialRecord>,
}

pub fn monte_carlo(cfg: &ExperimentConfig) -> Result<MonteCarlo> {
    let trials = run_trials(cfg)?;
    Ok(MonteCarlo {
        rows: summarize(&trials, &cfg.algorithms, &[]),
        trials,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    LambdaB,
    LambdaM,
    /// Side of a square area, given as its size in km².
    AreaKm2,
    Theta,
    OpPower,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::LambdaB => "lambda_b",
            SweepParam::LambdaM => "lambda_m",
            SweepParam::AreaKm2 => "area_km2",
            SweepParam::Theta => "theta",
            SweepParam::OpPower => "p0",
        }
    }
}

/// `cfg` with one parameter replaced.
pub fn with_param(
    cfg: &ExperimentConfig,
    param: SweepParam,
    value: f64,
) -> Result<ExperimentConfig> {
    let mut out = cfg.clone();
    let not_scenario =
        || HarnessError::Config(format!("{} needs a generated scenario", param.name()));
    match param {
        SweepParam::Theta => out.theta = value,
        _ => {
            let InstanceSource::Scenario {
                deployment,
                area,
                params,
            } = &mut out.source
            else {
                return Err(not_scenario());
            };
            match param {
                SweepParam::LambdaB => match deployment {
                    Deployment::Ppp { lambda_b, .. } => *lambda_b = value,
                    Deployment::Honeycomb { .. } => {
                        return Err(HarnessError::Config(
                            "honeycomb stations have no intensity".into(),
                        ))
                    }
                },
                SweepParam::LambdaM => match deployment {
                    Deployment::Ppp { lambda_m, .. } | Deployment::Honeycomb { lambda_m, .. } => {
                        *lambda_m = value
                    }
                },
                SweepParam::AreaKm2 => *area = Area::square_km2(value)?,
                SweepParam::OpPower => {
                    params.op_power = value;
                    params.op_power_per_bs = None;
                }
                SweepParam::Theta => unreachable!(),
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub rows: Vec<SummaryRow>,
    /// Trial records per grid value, in grid order.
    pub trials: Vec<(f64, Vec<TrialRecord>)>,
}

/// Monte Carlo at each grid value. Every point reuses the same trial seeds.
pub fn sweep(cfg: &ExperimentConfig, param: SweepParam, grid: &[f64]) -> Result<Sweep> {
    if grid.is_empty() {
        return Err(HarnessError::Config("empty sweep grid".into()));
    }
    let mut rows = Vec::new();
    let mut trials = Vec::new();
    for &v in grid {
        let point = with_param(cfg, param, v)?;
        let records = run_trials(&point)?;
        rows.extend(summarize(
            &records,
            &point.algorithms,
            &[(param.name().to_string(), v)],
        ));
        trials.push((v, records));
    }
    Ok(Sweep {
        param,
        rows,
        trials,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    pub theta: f64,
    pub mean_w: f64,
    pub stderr_w: f64,
    /// `mean_w` over the largest mean on the grid.
    pub normalized: f64,
    pub mean_rounds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSweep {
    pub points: Vec<ThetaPoint>,
    /// First grid value with the smallest mean.
    pub argmin_theta: f64,
    /// NBS mean on the same instances.
    pub nbs_mean_w: f64,
    pub trials: u64,
    pub infeasible: u64,
}

/// HD mean power per θ over shared instances.
pub fn sweep_theta(cfg: &ExperimentConfig, grid: &[f64]) -> Result<ThetaSweep> {
    cfg.validate()?;
    if grid.is_empty() {
        return Err(HarnessError::Config("empty theta grid".into()));
    }
    if let Some(t) = grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(HarnessError::Config(format!(
            "theta must be a finite value >= 0, got {t}"
        )));
    }
    // per trial: (nbs, [(total, rounds) per θ]), None when infeasible
    type PerTrial = Option<(f64, Vec<(f64, u64)>)>;
    let per_trial: Vec<PerTrial> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<PerTrial> {
            let inst = trial_instance(cfg, t)?;
            let Some(p) = inst.matrix.filter(|p| p.check_feasibility().is_feasible()) else {
                return Ok(None);
            };
            let nbs = nearest_bs(&p)?.total();
            let hd = grid
                .iter()
                .map(|&theta| {
                    let game = GameConfig {
                        theta,
                        max_rounds: cfg.hd_max_rounds,
                        seed: inst.seed,
                        init: cfg.hd_init,
                    };
                    hedonic_decision(&p, &game).map(|(r, tr)| (r.total(), tr.rounds))
                })
                .collect::<mapsolve::Result<Vec<_>>>()?;
            Ok(Some((nbs, hd)))
        })
        .collect::<Result<_>>()?;

    let solved: Vec<&(f64, Vec<(f64, u64)>)> = per_trial.iter().flatten().collect();
    let nbs: Vec<f64> = solved.iter().map(|s| s.0).collect();
    let mut points: Vec<ThetaPoint> = grid
        .iter()
        .enumerate()
        .map(|(k, &theta)| {
            let totals: Vec<f64> = solved.iter().map(|s| s.1[k].0).collect();
            let rounds: Vec<f64> = solved.iter().map(|s| s.1[k].1 as f64).collect();
            let (mean_w, stderr_w) = mean_stderr(&totals);
            ThetaPoint {
                theta,
                mean_w,
                stderr_w,
                normalized: f64::NAN,
                mean_rounds: mean_stderr(&rounds).0,
            }
        })
        .collect();
    let top = points.iter().map(|p| p.mean_w).fold(f64::NAN, f64::max);
    for p in &mut points {
        p.normalized = p.mean_w / top;
    }
    let argmin_theta = points
        .iter()
        .fold(None::<&ThetaPoint>, |best, p| match best {
            Some(b) if b.mean_w <= p.mean_w => Some(b),
            _ if p.mean_w.is_nan() => best,
            _ => Some(p),
        })
        .map_or(f64::NAN, |p| p.theta);
    Ok(ThetaSweep {
        points,
        argmin_theta,
        nbs_mean_w: mean_stderr(&nbs).0,
        trials: solved.len() as u64,
        infeasible: (per_trial.len() - solved.len()) as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundsPoint {
    pub area_km2: f64,
    pub op_power: f64,
    pub mean_rounds: f64,
    pub stderr_rounds: f64,
    pub trials: u64,
    /// Runs stopped by the round cap.
    pub unconverged: u64,
}

/// Mean HD rounds per square area, at the configured operational power and at zero.
pub fn rounds_vs_area(cfg: &ExperimentConfig, areas_km2: &[f64]) -> Result<Vec<RoundsPoint>> {
    if areas_km2.is_empty() {
        return Err(HarnessError::Config("empty area grid".into()));
    }
    let InstanceSource::Scenario { params, .. } = &cfg.source else {
        return Err(HarnessError::Config(
            "rounds need a generated scenario".into(),
        ));
    };
    let mut op_powers = vec![params.op_power];
    if params.op_power != 0.0 || params.op_power_per_bs.is_some() {
        op_powers.push(0.0);
    }
    let mut base = cfg.clone();
    base.algorithms = vec![Algorithm::Hd];

    let mut out = Vec::new();
    for &a in areas_km2 {
        for (k, &p0) in op_powers.iter().enumerate() {
            let mut point = with_param(&base, SweepParam::AreaKm2, a)?;
            if k > 0 {
                point = with_param(&point, SweepParam::OpPower, p0)?;
            }
            let records = run_trials(&point)?;
            let runs: Vec<&AlgRun> = records
                .iter()
                .filter_map(|r| r.run(Algorithm::Hd))
                .collect();
            let rounds: Vec<f64> = runs
                .iter()
                .filter_map(|r| r.rounds)
                .map(|r| r as f64)
                .collect();
            let (mean_rounds, stderr_rounds) = mean_stderr(&rounds);
            out.push(RoundsPoint {
                area_km2: a,
                op_power: p0,
                mean_rounds,
                stderr_rounds,
                trials: rounds.len() as u64,
                unconverged: runs.iter().filter(|r| r.converged == Some(false)).count() as u64,
            });
        }
    }
    Ok(out)
}
