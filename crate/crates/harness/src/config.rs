use std::fmt;
use std::str::FromStr;

use mapsolve::exact::{BruteForceBudget, HoldMinimumLimits};
use mapsolve::game::InitPolicy;
use mapsolve::propagation::{Area, Deployment, PropagationParams};
use mapsolve::PowerCostMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Brute,
    Sc,
    Hm,
    Greedy,
    Cc,
    Dcc,
    Nbs,
    Hd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Brute,
        Algorithm::Sc,
        Algorithm::Hm,
        Algorithm::Greedy,
        Algorithm::Cc,
        Algorithm::Dcc,
        Algorithm::Nbs,
        Algorithm::Hd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Brute => "brute",
            Algorithm::Sc => "sc",
            Algorithm::Hm => "hm",
            Algorithm::Greedy => "greedy",
            Algorithm::Cc => "cc",
            Algorithm::Dcc => "dcc",
            Algorithm::Nbs => "nbs",
            Algorithm::Hd => "hd",
        }
    }

    /// Solvers whose answer is a guaranteed optimum.
    pub fn is_exact(self) -> bool {
        matches!(self, Algorithm::Brute | Algorithm::Sc)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| HarnessError::Config(format!("unknown algorithm '{s}'")))
    }
}

/// Where a trial's cost matrix comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSource {
    Scenario {
        deployment: Deployment,
        area: Area,
        params: PropagationParams,
    },
    /// The same matrix for every trial.
    Matrix { matrix: PowerCostMatrix },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: InstanceSource,
    pub algorithms: Vec<Algorithm>,
    /// θ used by HD in plain runs; sweeps override it.
    pub theta: f64,
    pub hd_max_rounds: u64,
    pub hd_init: InitPolicy,
    pub trials: u64,
    pub root_seed: u64,
    pub brute_budget: BruteForceBudget,
    /// Hold-minimum is skipped on a trial once it needs more recursive calls.
    pub hm_max_calls: u64,
}

impl ExperimentConfig {
    pub fn new(source: InstanceSource, algorithms: Vec<Algorithm>) -> Self {
        ExperimentConfig {
            source,
            algorithms,
            theta: 0.0,
            hd_max_rounds: 1000,
            hd_init: InitPolicy::Nearest,
            trials: 1,
            root_seed: 0,
            brute_budget: BruteForceBudget::default(),
            hm_max_calls: 200_000,
        }
    }

    pub fn ppp(
        area: Area,
        lambda_b: f64,
        lambda_m: f64,
        params: PropagationParams,
        algorithms: Vec<Algorithm>,
    ) -> Self {
        Self::new(
            InstanceSource::Scenario {
                deployment: Deployment::Ppp { lambda_b, lambda_m },
                area,
                params,
            },
            algorithms,
        )
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, root_seed: u64) -> Self {
        self.root_seed = root_seed;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn hm_limits(&self) -> HoldMinimumLimits {
        HoldMinimumLimits {
            max_recursive_calls: self.hm_max_calls,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithm selected".into());
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return bad(format!(
                "theta must be a finite value >= 0, got {}",
                self.theta
            ));
        }
        if self.hd_max_rounds == 0 {
            return bad("HD round cap must be >= 1".into());
        }
        if let InstanceSource::Scenario {
            deployment, params, ..
        } = &self.source
        {
            params.validate()?;
            let ok = match *deployment {
                Deployment::Ppp { lambda_b, lambda_m } => lambda_b >= 0.0 && lambda_m >= 0.0,
                Deployment::Honeycomb {
                    cell_radius,
                    lambda_m,
                } => cell_radius > 0.0 && lambda_m >= 0.0,
            };
            if !ok {
                return bad(format!("invalid deployment {deployment:?}"));
            }
        }
        Ok(())
    }
}
