use mapsolve::MapError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] MapError),
    /// A heuristic beat a proven optimum. Carries the instance for reproduction.
    #[error("trial {trial} (seed {seed}): {alg} total {total} is below the optimum {optimum}\n{matrix_csv}")]
    Sanity {
        trial: u64,
        seed: u64,
        alg: String,
        total: f64,
        optimum: f64,
        matrix_csv: String,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
