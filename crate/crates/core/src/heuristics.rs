//! Polynomial-time heuristics: column control, nearest station, greedy set cover.

use crate::assignment::{Assignment, OpStats, SolveResult};
use crate::collection::reduce_collection;
use crate::error::Result;
use crate::matrix::PowerCostMatrix;
use crate::power::ExtendedPower;

/// One column-control step: station `bs` takes all `mobiles` it can still serve.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnStep {
    pub bs: usize,
    pub mobiles: Vec<usize>,
    pub cost: ExtendedPower,
    /// Servable-unassigned count of every station at this step.
    pub counts: Vec<usize>,
}

pub fn column_control(p: &PowerCostMatrix) -> Result<SolveResult> {
    column_control_traced(p).map(|(r, _)| r)
}

/// Column control with its step log.
///
/// Until every mobile is placed: count, per station, the unassigned mobiles it
/// can serve; among the stations with the largest count take the one whose
/// cluster maximum is smallest (lowest index on ties) and give it all of them.
pub fn column_control_traced(p: &PowerCostMatrix) -> Result<(SolveResult, Vec<ColumnStep>)> {
    p.ensure_feasible()?;
    let (m, n) = (p.mobiles(), p.stations());
    let mut serving: Vec<Option<usize>> = vec![None; m];
    let mut remaining = m;
    let mut steps = Vec::new();
    let mut stats = OpStats::default();

    while remaining > 0 {
        stats.steps += 1;
        let mut counts = vec![0usize; n];
        let mut maxima = vec![ExtendedPower::ZERO; n];
        for i in (0..m).filter(|&i| serving[i].is_none()) {
            for j in 0..n {
                let v = p.get(i, j);
                stats.comparisons += 1;
                if v.is_finite() {
                    counts[j] += 1;
                    maxima[j] = maxima[j].max(v);
                }
            }
        }
        let most = *counts.iter().max().expect("n >= 1");
        let bs = (0..n)
            .filter(|&j| counts[j] == most)
            .min_by(|&a, &b| maxima[a].cmp(&maxima[b]).then(a.cmp(&b)))
            .expect("feasible rows keep a servable station");
        let mobiles: Vec<usize> = (0..m)
            .filter(|&i| serving[i].is_none() && p.get(i, bs).is_finite())
            .collect();
        for &i in &mobiles {
            serving[i] = Some(bs);
        }
        remaining -= mobiles.len();
        steps.push(ColumnStep {
            bs,
            mobiles,
            cost: maxima[bs],
            counts,
        });
    }

    let assignment = Assignment::new(serving.into_iter().map(|s| s.expect("placed")).collect());
    Ok((SolveResult::from_assignment(assignment, p, stats)?, steps))
}

/// Cheapest station for mobile `i`, lowest index on ties. `None` if none can serve it.
pub fn nearest_of(p: &PowerCostMatrix, i: usize) -> Option<usize> {
    let row = p.row(i);
    (0..row.len())
        .filter(|&j| row[j].is_finite())
        .min_by(|&a, &b| row[a].cmp(&row[b]).then(a.cmp(&b)))
}

/// Every mobile takes its cheapest station.
pub fn nearest_bs(p: &PowerCostMatrix) -> Result<SolveResult> {
    p.ensure_feasible()?;
    let serving = (0..p.mobiles())
        .map(|i| nearest_of(p, i).expect("feasible"))
        .collect();
    let stats = OpStats {
        comparisons: (p.mobiles() * p.stations()) as u64,
        ..OpStats::default()
    };
    SolveResult::from_assignment(Assignment::new(serving), p, stats)
}

/// Chvátal's greedy cover over the reduced collection.
///
/// Repeatedly takes the candidate with the lowest cost per newly covered
/// mobile (then lower cost, lower station, larger set) and hands the newly
/// covered mobiles to its station. The result is re-priced per final cluster.
pub fn greedy_set_cover(p: &PowerCostMatrix) -> Result<SolveResult> {
    let candidates = reduce_collection(p)?;
    let m = p.mobiles();
    let mut serving: Vec<Option<usize>> = vec![None; m];
    let mut remaining = m;
    let mut stats = OpStats::default();

    while remaining > 0 {
        stats.steps += 1;
        let mut best: Option<(f64, usize)> = None;
        for (k, c) in candidates.iter().enumerate() {
            let fresh = c.mobiles.iter().filter(|&&i| serving[i].is_none()).count();
            if fresh == 0 {
                continue;
            }
            stats.comparisons += 1;
            let ratio = c.cost.value() / fresh as f64;
            let better = match best {
                None => true,
                Some((r, b)) => {
                    let other = &candidates[b];
                    ratio
                        .total_cmp(&r)
                        .then(c.cost.cmp(&other.cost))
                        .then(c.bs.cmp(&other.bs))
                        .then(other.mobiles.len().cmp(&c.mobiles.len()))
                        .is_lt()
                }
            };
            if better {
                best = Some((ratio, k));
            }
        }
        let (_, k) = best.expect("reduced collection covers every feasible mobile");
        let chosen = &candidates[k];
        for &i in &chosen.mobiles {
            if serving[i].is_none() {
                serving[i] = Some(chosen.bs);
                remaining -= 1;
            }
        }
    }

    let assignment = Assignment::new(serving.into_iter().map(|s| s.expect("covered")).collect());
    SolveResult::from_assignment(assignment, p, stats)
}
