//! Candidate (mobile set; station) pairs and the dominance-reduced collection.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::PowerCostMatrix;
use crate::power::ExtendedPower;

/// A nonempty set of mobiles served together by one station, with its finite cost.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    /// Ascending mobile indices.
    pub mobiles: Vec<usize>,
    pub bs: usize,
    pub cost: ExtendedPower,
}

impl CandidateSet {
    pub fn contains(&self, mobile: usize) -> bool {
        self.mobiles.binary_search(&mobile).is_ok()
    }
}

/// Mobiles servable by `bs`, ordered by increasing cost then index.
pub(crate) fn sorted_servable(p: &PowerCostMatrix, bs: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.mobiles())
        .filter(|&i| p.get(i, bs).is_finite())
        .collect();
    order.sort_by(|&a, &b| p.get(a, bs).cmp(&p.get(b, bs)).then(a.cmp(&b)));
    order
}

/// Reduced collection: for each station, the cost-sorted prefixes of its
/// servable mobiles, keeping only the largest prefix for each distinct cost.
///
/// A set that is a strict subset of another set at the same station with the
/// same cost is dominated and dropped, so at most `m` candidates survive per
/// station. Output is grouped by station, then by increasing cost.
pub fn reduce_collection(p: &PowerCostMatrix) -> Result<Vec<CandidateSet>> {
    p.ensure_feasible()?;
    let mut out = Vec::new();
    for bs in 0..p.stations() {
        let order = sorted_servable(p, bs);
        for (k, &i) in order.iter().enumerate() {
            let cost = p.get(i, bs);
            let last_of_run = order.get(k + 1).is_none_or(|&next| p.get(next, bs) != cost);
            if last_of_run {
                let mut mobiles = order[..=k].to_vec();
                mobiles.sort_unstable();
                out.push(CandidateSet { mobiles, bs, cost });
            }
        }
    }
    Ok(out)
}
