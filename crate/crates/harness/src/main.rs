use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mapsolve::exact::BruteForceBudget;
use mapsolve::propagation::{
    dbm_to_watts, Area, Deployment, PropagationParams, Scenario, ScenarioRecord,
};
use mapsolve::{MapError, PowerCostMatrix};
use mapsolve_harness::experiment::{solve_with, with_param};
use mapsolve_harness::report::{
    compare_csv, rounds_csv, summary_csv, theta_csv, trial_log_csv, TrialGroup, COMPARE_COLUMNS,
};
use mapsolve_harness::{
    rounds_vs_area, run_trials, sweep, sweep_theta, trial_seed, Algorithm, ExperimentConfig,
    HarnessError, InstanceSource, SweepParam,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "mapsolve",
    version,
    about = "Broadcast mobile assignment experiments"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// PPP small cells: cutoff 20 dBm, 12 W operational power.
    Small,
    /// Macro cells: cutoff 48 dBm, no operational power.
    Macro,
}

#[derive(Args)]
struct Global {
    /// Root seed; all randomness derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    trials: u64,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Comma-separated algorithms: brute,sc,hm,greedy,cc,dcc,nbs,hd.
    #[arg(long, global = true, value_delimiter = ',')]
    alg: Option<Vec<String>>,
    /// Clustering weight for HD.
    #[arg(long, global = true, default_value_t = 0.003)]
    theta: f64,
    #[arg(long, global = true, default_value_t = 1000)]
    max_rounds: u64,
    /// Largest n^m brute force will enumerate.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    brute_budget: u64,
    /// Recursive-call cap for hold-minimum.
    #[arg(long, global = true, default_value_t = 200_000)]
    hm_max_calls: u64,

    #[arg(long, global = true, value_enum, default_value_t = Preset::Small)]
    preset: Preset,
    /// Stations on a PPP (default).
    #[arg(long, global = true, conflicts_with = "honeycomb")]
    ppp: bool,
    /// Stations on a hexagonal lattice.
    #[arg(long, global = true)]
    honeycomb: bool,
    /// Honeycomb cell radius in meters.
    #[arg(long, global = true, default_value_t = 4000.0)]
    cell_radius: f64,
    /// Station intensity, points/m².
    #[arg(long, global = true)]
    lambda_b: Option<f64>,
    /// Mobile intensity, points/m².
    #[arg(long, global = true)]
    lambda_m: Option<f64>,
    /// Square area in km².
    #[arg(long, global = true, conflicts_with_all = ["width", "height"])]
    area_km2: Option<f64>,
    /// Area width in meters (with --height).
    #[arg(long, global = true, requires = "height")]
    width: Option<f64>,
    #[arg(long, global = true, requires = "width")]
    height: Option<f64>,
    /// Required receive power, dBm.
    #[arg(long, global = true)]
    pr_dbm: Option<f64>,
    /// Path-loss exponent.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Shadowing standard deviation, dB.
    #[arg(long, global = true)]
    sigma_db: Option<f64>,
    /// Shadowing mean, dB.
    #[arg(long, global = true)]
    shadow_mean_db: Option<f64>,
    /// Transmission cutoff, dBm.
    #[arg(long, global = true)]
    pmax_dbm: Option<f64>,
    /// Operational power per active station, W.
    #[arg(long, global = true)]
    p0: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit one scenario (json) or its cost matrix (csv).
    Gen {
        /// Trial index whose scenario is emitted.
        #[arg(long, default_value_t = 0)]
        index: u64,
    },
    /// Solve one matrix read from CSV.
    Solve {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Per-instance totals over random instances.
    Compare {
        #[arg(long)]
        trial_log: Option<PathBuf>,
    },
    /// Monte Carlo summary over a parameter grid.
    Sweep {
        #[arg(long, value_enum)]
        param: ParamArg,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        trial_log: Option<PathBuf>,
    },
    /// Mean HD rounds per area, with and without operational power.
    Rounds {
        #[arg(long, value_delimiter = ',', default_value = "0.98,1.28,1.62,2.0")]
        areas: Vec<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParamArg {
    LambdaB,
    LambdaM,
    Area,
    Theta,
    P0,
}

impl Global {
    fn params(&self) -> PropagationParams {
        let mut p = match self.preset {
            Preset::Small => PropagationParams::small_cell(),
            Preset::Macro => PropagationParams::macro_cell(),
        };
        if let Some(v) = self.pr_dbm {
            p.receive_power = dbm_to_watts(v);
        }
        if let Some(v) = self.alpha {
            p.path_loss_exponent = v;
        }
        if let Some(v) = self.sigma_db {
            p.shadowing_sigma_db = v;
        }
        if let Some(v) = self.shadow_mean_db {
            p.shadowing_mean_db = v;
        }
        if let Some(v) = self.pmax_dbm {
            p.max_tx_power = dbm_to_watts(v);
        }
        if let Some(v) = self.p0 {
            p.op_power = v;
        }
        p
    }

    fn area(&self) -> Result<Area, HarnessError> {
        let area = match (self.width, self.height, self.area_km2) {
            (Some(w), Some(h), _) => Area::new(w, h),
            (_, _, Some(a)) => Area::square_km2(a),
            _ => Area::square_km2(match self.preset {
                Preset::Small => 4.0,
                Preset::Macro => 3600.0,
            }),
        };
        Ok(area?)
    }

    fn deployment(&self) -> Deployment {
        // defaults: the small-cell comparison (6 stations, 18 mobiles per 4 km²)
        // and the macro-cell comparison (80 sites, 1 mobile per 25 km²)
        let (lb, lm) = match self.preset {
            Preset::Small => (6.0 / 4e6, 18.0 / 4e6),
            Preset::Macro => (80.0 / 3600e6, 1.0 / 25e6),
        };
        let lambda_m = self.lambda_m.unwrap_or(lm);
        if self.honeycomb {
            Deployment::Honeycomb {
                cell_radius: self.cell_radius,
                lambda_m,
            }
        } else {
            Deployment::Ppp {
                lambda_b: self.lambda_b.unwrap_or(lb),
                lambda_m,
            }
        }
    }

    fn algorithms(&self, default: &[Algorithm]) -> Result<Vec<Algorithm>, HarnessError> {
        match &self.alg {
            None => Ok(default.to_vec()),
            Some(names) => names.iter().map(|s| s.parse()).collect(),
        }
    }

    fn config(
        &self,
        source: InstanceSource,
        default_algs: &[Algorithm],
    ) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = ExperimentConfig::new(source, self.algorithms(default_algs)?)
            .with_trials(self.trials)
            .with_seed(self.seed)
            .with_theta(self.theta);
        cfg.hd_max_rounds = self.max_rounds;
        cfg.brute_budget = BruteForceBudget::new(self.brute_budget)?;
        cfg.hm_max_calls = self.hm_max_calls;
        cfg.validate()?;
        Ok(cfg)
    }

    fn scenario_source(&self) -> Result<InstanceSource, HarnessError> {
        Ok(InstanceSource::Scenario {
            deployment: self.deployment(),
            area: self.area()?,
            params: self.params(),
        })
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, HarnessError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    let g = &cli.global;
    let out = g.out.as_deref();
    match &cli.command {
        Command::Gen { index } => {
            let InstanceSource::Scenario {
                deployment,
                area,
                params,
            } = g.scenario_source()?
            else {
                unreachable!()
            };
            params.validate()?;
            let seed = trial_seed(g.seed, *index);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let scn = Scenario::generate(deployment, area, &mut rng)?;
            match g.format {
                Format::Json => emit(
                    out,
                    &json(&ScenarioRecord {
                        area: scn.area,
                        deployment: scn.deployment,
                        bs: scn.bs,
                        mobiles: scn.mobiles,
                        params,
                        seed,
                    })?,
                ),
                Format::Csv => {
                    let p = mapsolve::propagation::build_cost_matrix(&scn, &params, &mut rng)?;
                    emit(out, &p.to_csv_string())
                }
            }
        }
        Command::Solve { matrix } => {
            let file = fs::File::open(matrix)?;
            let p = PowerCostMatrix::read_csv(file)?;
            p.ensure_feasible()?;
            let cfg = g.config(
                InstanceSource::Matrix { matrix: p.clone() },
                &[Algorithm::Cc, Algorithm::Nbs, Algorithm::Hd],
            )?;
            let mut runs = Vec::new();
            for &alg in &cfg.algorithms {
                runs.push(solve_with(alg, &p, &cfg, g.seed)?);
            }
            match g.format {
                Format::Json => emit(out, &json(&runs)?),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["alg", "total_w", "active_bs", "rounds"])?;
                    for r in &runs {
                        let cell = |v: Option<String>| v.unwrap_or_default();
                        w.write_record([
                            r.alg.to_string(),
                            cell(r.total_w.map(|x| x.to_string())),
                            cell(r.active_bs.map(|x| x.to_string())),
                            cell(r.rounds.map(|x| x.to_string())),
                        ])?;
                    }
                    let bytes = w.into_inner().map_err(|e| e.into_error())?;
                    emit(out, &String::from_utf8_lossy(&bytes))
                }
            }
        }
        Command::Compare { trial_log } => {
            let cfg = g.config(g.scenario_source()?, &COMPARE_COLUMNS)?;
            let records = run_trials(&cfg)?;
            if let Some(path) = trial_log {
                fs::write(path, trial_log_csv(&[(vec![], &records)])?)?;
            }
            match g.format {
                Format::Json => emit(out, &json(&records)?),
                Format::Csv => emit(out, &compare_csv(&records)?),
            }
        }
        Command::Sweep {
            param,
            values,
            trial_log,
        } => {
            let cfg = g.config(
                g.scenario_source()?,
                &[Algorithm::Cc, Algorithm::Nbs, Algorithm::Hd],
            )?;
            if *param == ParamArg::Theta {
                let s = sweep_theta(&cfg, values)?;
                return match g.format {
                    Format::Json => emit(out, &json(&s)?),
                    Format::Csv => emit(out, &theta_csv(&s)?),
                };
            }
            let param = match param {
                ParamArg::LambdaB => SweepParam::LambdaB,
                ParamArg::LambdaM => SweepParam::LambdaM,
                ParamArg::Area => SweepParam::AreaKm2,
                ParamArg::P0 => SweepParam::OpPower,
                ParamArg::Theta => unreachable!(),
            };
            // reject a bad grid before any trial runs
            for &v in values {
                with_param(&cfg, param, v)?.validate()?;
            }
            let s = sweep(&cfg, param, values)?;
            if let Some(path) = trial_log {
                let groups: Vec<TrialGroup> = s
                    .trials
                    .iter()
                    .map(|(v, recs)| (vec![(param.name().to_string(), *v)], recs.as_slice()))
                    .collect();
                fs::write(path, trial_log_csv(&groups)?)?;
            }
            match g.format {
                Format::Json => emit(out, &json(&s.rows)?),
                Format::Csv => emit(out, &summary_csv(&s.rows)?),
            }
        }
        Command::Rounds { areas } => {
            let cfg = g.config(g.scenario_source()?, &[Algorithm::Hd])?;
            let points = rounds_vs_area(&cfg, areas)?;
            match g.format {
                Format::Json => emit(out, &json(&points)?),
                Format::Csv => emit(out, &rounds_csv(&points)?),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(HarnessError::Solver(e @ MapError::Infeasible { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
