//! Ground-truth solvers: exhaustive enumeration, branch-and-bound set cover
//! over the reduced collection, and the recursive hold-minimum elimination.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::assignment::{total_cost, Assignment, OpStats, SolveResult};
use crate::collection::reduce_collection;
use crate::error::{MapError, Result};
use crate::heuristics::nearest_bs;
use crate::matrix::PowerCostMatrix;
use crate::power::ExtendedPower;

/// Cap on the `n^m` assignments brute force may enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForceBudget {
    pub max_enumeration: u64,
}

impl BruteForceBudget {
    pub fn new(max_enumeration: u64) -> Result<Self> {
        if max_enumeration == 0 {
            return Err(MapError::InvalidValue(
                "brute-force budget must be >= 1".into(),
            ));
        }
        Ok(BruteForceBudget { max_enumeration })
    }
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        BruteForceBudget {
            max_enumeration: 10_000_000,
        }
    }
}

/// `n^m`, saturating.
pub fn enumeration_size(p: &PowerCostMatrix) -> u128 {
    let mut states: u128 = 1;
    for _ in 0..p.mobiles() {
        states = states.saturating_mul(p.stations() as u128);
    }
    states
}

/// Enumerates every assignment in lexicographic order of the serving vector
/// and keeps the first one with minimal total cost.
pub fn brute_force(p: &PowerCostMatrix, budget: BruteForceBudget) -> Result<SolveResult> {
    p.ensure_feasible()?;
    let states = enumeration_size(p);
    if states > budget.max_enumeration as u128 {
        return Err(MapError::BudgetExceeded {
            states,
            budget: budget.max_enumeration,
        });
    }

    let (m, n) = (p.mobiles(), p.stations());
    let mut stats = OpStats::default();
    let mut current = vec![0usize; m];
    let mut maxima = vec![ExtendedPower::ZERO; n];
    let mut best: Option<(ExtendedPower, Vec<usize>)> = None;
    loop {
        stats.nodes += 1;
        maxima.fill(ExtendedPower::ZERO);
        for (i, &j) in current.iter().enumerate() {
            maxima[j] = maxima[j].max(p.get(i, j));
        }
        // summed in station order, same as total_cost
        let total: ExtendedPower = maxima.iter().copied().sum();
        stats.comparisons += 1;
        if total.is_finite() && best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, current.clone()));
        }

        // odometer, last mobile fastest
        let mut k = m;
        loop {
            if k == 0 {
                let (_, serving) = best.expect("feasible matrix has a finite assignment");
                return SolveResult::from_assignment(Assignment::new(serving), p, stats);
            }
            k -= 1;
            current[k] += 1;
            if current[k] < n {
                break;
            }
            current[k] = 0;
        }
    }
}

/// Per-station ladder of reduced candidates: `levels[j][l]` is the cost of the
/// `l`-th prefix and `level_of[i][j]` the first prefix of `j` containing `i`.
struct Ladder {
    levels: Vec<Vec<ExtendedPower>>,
    level_of: Vec<Vec<Option<usize>>>,
}

impl Ladder {
    fn new(p: &PowerCostMatrix) -> Result<Self> {
        let (m, n) = (p.mobiles(), p.stations());
        let mut levels = vec![Vec::new(); n];
        let mut level_of = vec![vec![None; n]; m];
        for cand in reduce_collection(p)? {
            let j = cand.bs;
            let l = levels[j].len();
            levels[j].push(cand.cost);
            for &i in &cand.mobiles {
                if level_of[i][j].is_none() {
                    level_of[i][j] = Some(l);
                }
            }
        }
        Ok(Ladder { levels, level_of })
    }

    fn cost(&self, j: usize, level: Option<usize>) -> ExtendedPower {
        level.map_or(ExtendedPower::ZERO, |l| self.levels[j][l])
    }

    fn covers(&self, chosen: &[Option<usize>], i: usize, j: usize) -> bool {
        matches!((chosen[j], self.level_of[i][j]), (Some(c), Some(need)) if c >= need)
    }
}

struct CoverSearch<'a> {
    p: &'a PowerCostMatrix,
    ladder: Ladder,
    best_total: ExtendedPower,
    best: Option<Vec<Option<usize>>>,
    stats: OpStats,
}

impl CoverSearch<'_> {
    fn threshold_sum(&self, chosen: &[Option<usize>]) -> ExtendedPower {
        chosen
            .iter()
            .enumerate()
            .map(|(j, &l)| self.ladder.cost(j, l))
            .sum()
    }

    fn to_assignment(&self, chosen: &[Option<usize>]) -> Assignment {
        // cheapest covering station; re-pricing can only lower the threshold sum
        let serving = (0..self.p.mobiles())
            .map(|i| {
                (0..self.p.stations())
                    .filter(|&j| self.ladder.covers(chosen, i, j))
                    .min_by(|&a, &b| self.p.get(i, a).cmp(&self.p.get(i, b)).then(a.cmp(&b)))
                    .expect("leaf covers every mobile")
            })
            .collect();
        Assignment::new(serving)
    }

    fn search(&mut self, chosen: &mut Vec<Option<usize>>) {
        self.stats.nodes += 1;
        let partial = self.threshold_sum(chosen);
        self.stats.comparisons += 1;
        if partial >= self.best_total {
            return;
        }

        // pick the uncovered mobile that is most expensive to cover
        let mut pick: Option<(usize, f64)> = None;
        for i in 0..self.p.mobiles() {
            if (0..self.p.stations()).any(|j| self.ladder.covers(chosen, i, j)) {
                continue;
            }
            let cheapest = (0..self.p.stations())
                .filter_map(|j| {
                    let need = self.ladder.level_of[i][j]?;
                    Some(
                        self.ladder.levels[j][need].value()
                            - self.ladder.cost(j, chosen[j]).value(),
                    )
                })
                .fold(f64::INFINITY, f64::min);
            if pick.is_none_or(|(_, c)| cheapest > c) {
                pick = Some((i, cheapest));
            }
        }

        let Some((mobile, increment)) = pick else {
            let a = self.to_assignment(chosen);
            let total = total_cost(&a, self.p).expect("cover assignment is valid");
            if total < self.best_total {
                self.best_total = total;
                self.best = Some(chosen.clone());
            }
            return;
        };

        // the bound uses a float difference; keep a small slack so rounding never cuts a tie
        let bound = partial.value() + increment;
        if bound - self.best_total.value() > 1e-9 * self.best_total.value().max(1.0) {
            return;
        }

        let mut branches: Vec<(f64, usize, usize)> = (0..self.p.stations())
            .filter_map(|j| {
                let need = self.ladder.level_of[mobile][j]?;
                let delta =
                    self.ladder.levels[j][need].value() - self.ladder.cost(j, chosen[j]).value();
                Some((delta, j, need))
            })
            .collect();
        branches.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, j, need) in branches {
            let saved = chosen[j];
            chosen[j] = Some(need);
            self.search(chosen);
            chosen[j] = saved;
        }
    }
}

/// Minimum-cost cover of all mobiles by candidates of the reduced collection,
/// turned into an assignment without increasing the cost.
///
/// Depth-first branch and bound: each node picks the uncovered mobile that is
/// most expensive to cover and branches over the cheapest candidate of every
/// station containing it (upgrading that station's current candidate). The
/// nearest-station assignment seeds the incumbent.
pub fn set_cover_exact(p: &PowerCostMatrix) -> Result<SolveResult> {
    p.ensure_feasible()?;
    let ladder = Ladder::new(p)?;
    let seed = nearest_bs(p)?;
    let mut search = CoverSearch {
        p,
        ladder,
        best_total: seed.total_power,
        best: None,
        stats: OpStats::default(),
    };
    let mut chosen = vec![None; p.stations()];
    search.search(&mut chosen);

    let assignment = match &search.best {
        Some(chosen) => search.to_assignment(chosen),
        None => seed.assignment,
    };
    SolveResult::from_assignment(assignment, p, search.stats)
}

/// Options for [`hold_minimum_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HoldMinimumLimits {
    /// Abort with `BudgetExceeded` after this many non-memoized recursive calls.
    pub max_recursive_calls: u64,
}

impl Default for HoldMinimumLimits {
    fn default() -> Self {
        HoldMinimumLimits {
            max_recursive_calls: u64::MAX,
        }
    }
}

/// Working copy of a (sub-)matrix whose entries only ever turn infinite.
#[derive(Clone)]
struct Grid {
    m: usize,
    n: usize,
    cells: Vec<f64>,
}

impl Grid {
    fn from_matrix(p: &PowerCostMatrix) -> Self {
        Grid {
            m: p.mobiles(),
            n: p.stations(),
            cells: p.rows().flatten().map(|v| v.value()).collect(),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.n + j]
    }

    fn finite_in_row(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.at(i, j).is_finite()).count()
    }

    fn key(&self) -> GridKey {
        (
            self.m,
            self.n,
            self.cells.iter().map(|v| v.to_bits()).collect(),
        )
    }

    /// Rows with infinity in column `j`, restricted to the other columns.
    fn excluded_by(&self, j: usize) -> Option<Grid> {
        let rows: Vec<usize> = (0..self.m)
            .filter(|&i| self.at(i, j).is_infinite())
            .collect();
        if rows.is_empty() {
            return None;
        }
        let cells = rows
            .iter()
            .flat_map(|&i| {
                (0..self.n)
                    .filter(move |&k| k != j)
                    .map(move |k| self.at(i, k))
            })
            .collect();
        Some(Grid {
            m: rows.len(),
            n: self.n - 1,
            cells,
        })
    }

    fn column_max(&self, j: usize) -> Option<(usize, f64)> {
        (0..self.m)
            .filter(|&i| self.at(i, j).is_finite())
            .map(|i| (i, self.at(i, j)))
            .fold(None, |acc, (i, v)| match acc {
                Some((_, best)) if best >= v => acc,
                _ => Some((i, v)),
            })
    }
}

/// A column's price, the content it was computed from, and the row-to-column
/// plan that achieves it.
struct ColumnPrice {
    signature: Vec<u64>,
    value: f64,
    plan: Vec<usize>,
}

type GridKey = (usize, usize, Vec<u64>);

struct HoldMinimum {
    limits: HoldMinimumLimits,
    max_depth: usize,
    memo: HashMap<GridKey, (f64, Vec<usize>)>,
    stats: OpStats,
}

impl HoldMinimum {
    /// Optimal total and per-row column for `grid`. Every row must have a finite entry.
    #[allow(clippy::needless_range_loop)]
    fn solve(&mut self, grid: &Grid, depth: usize) -> Result<(f64, Vec<usize>)> {
        let key = grid.key();
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        self.stats.recursive_calls += 1;
        if self.stats.recursive_calls > self.limits.max_recursive_calls {
            return Err(MapError::BudgetExceeded {
                states: self.stats.recursive_calls as u128,
                budget: self.limits.max_recursive_calls,
            });
        }
        if depth > self.max_depth {
            return Err(MapError::Internal(format!(
                "hold-minimum recursion depth {depth}"
            )));
        }

        let mut g = grid.clone();
        // reused while neither the column nor its excluded rows change
        let mut kept: Vec<Option<ColumnPrice>> = (0..g.n).map(|_| None).collect();
        let mut steps = 0usize;
        while (0..g.m).any(|i| g.finite_in_row(i) > 1) {
            steps += 1;
            self.stats.steps += 1;
            if steps > g.m * g.n {
                return Err(MapError::Internal("hold-minimum did not converge".into()));
            }

            let mut winner: Option<(usize, f64)> = None;
            for j in 0..g.n {
                let Some((_, col_max)) = g.column_max(j) else {
                    continue;
                };
                let sub = g.excluded_by(j);
                let mut signature: Vec<u64> = (0..g.m).map(|i| g.at(i, j).to_bits()).collect();
                if let Some(s) = &sub {
                    signature.extend(s.cells.iter().map(|v| v.to_bits()));
                }
                let candidate = match &kept[j] {
                    Some(c) if c.signature == signature => c.value,
                    _ => {
                        let mut plan = vec![j; g.m];
                        let rest = match &sub {
                            Some(s) => {
                                let (rest, inner) = self.solve(s, depth + 1)?;
                                let excluded = (0..g.m).filter(|&i| g.at(i, j).is_infinite());
                                for (i, k) in excluded.zip(inner) {
                                    plan[i] = if k < j { k } else { k + 1 };
                                }
                                rest
                            }
                            None => 0.0,
                        };
                        let v = col_max + rest;
                        kept[j] = Some(ColumnPrice {
                            signature,
                            value: v,
                            plan,
                        });
                        v
                    }
                };
                self.stats.comparisons += 1;
                if winner.is_none_or(|(_, w)| candidate < w) {
                    winner = Some((j, candidate));
                }
            }
            let (held, _) = winner.ok_or_else(|| MapError::Internal("no live column".into()))?;
            // entries the held plan relies on are never eliminated
            let plan = kept[held]
                .as_ref()
                .map(|c| c.plan.clone())
                .expect("held column has a plan");
            let removable = |g: &Grid, i: usize, j: usize| plan[i] != j && g.finite_in_row(i) > 1;

            let mut eliminated = false;
            for j in (0..g.n).filter(|&j| j != held) {
                let Some((_, col_max)) = g.column_max(j) else {
                    continue;
                };
                for i in 0..g.m {
                    if g.at(i, j) == col_max && removable(&g, i, j) {
                        g.cells[i * g.n + j] = f64::INFINITY;
                        eliminated = true;
                    }
                }
            }
            if !eliminated {
                // every losing column's maximum sits on a row it alone serves:
                // drop the largest entry of each losing column that a row can spare
                for j in (0..g.n).filter(|&j| j != held) {
                    let spare = (0..g.m)
                        .filter(|&i| g.at(i, j).is_finite() && removable(&g, i, j))
                        .max_by(|&a, &b| g.at(a, j).total_cmp(&g.at(b, j)).then(b.cmp(&a)));
                    if let Some(i) = spare {
                        g.cells[i * g.n + j] = f64::INFINITY;
                        eliminated = true;
                    }
                }
                if !eliminated {
                    return Err(MapError::Internal(
                        "hold-minimum step removed nothing".into(),
                    ));
                }
            }
        }

        let serving: Vec<usize> = (0..g.m)
            .map(|i| {
                (0..g.n)
                    .find(|&j| g.at(i, j).is_finite())
                    .expect("row keeps one entry")
            })
            .collect();
        let mut maxima = vec![0.0f64; g.n];
        for (i, &j) in serving.iter().enumerate() {
            maxima[j] = maxima[j].max(g.at(i, j));
        }
        let total = maxima.iter().sum();
        self.memo.insert(key, (total, serving.clone()));
        Ok((total, serving))
    }
}

/// Recursive hold-minimum elimination.
///
/// Each step prices every live column `j` as its largest finite entry plus the
/// recursive optimum of the rows `j` cannot serve, holds the cheapest column,
/// and removes the current maximum of every other column unless that would
/// leave a mobile with no station or the held column's plan (its own rows plus
/// the recursive assignment of the rest) uses that entry. Column prices are
/// reused while neither the column nor its excluded rows change.
pub fn hold_minimum(p: &PowerCostMatrix) -> Result<SolveResult> {
    hold_minimum_with(p, HoldMinimumLimits::default())
}

pub fn hold_minimum_with(p: &PowerCostMatrix, limits: HoldMinimumLimits) -> Result<SolveResult> {
    p.ensure_feasible()?;
    let mut hm = HoldMinimum {
        limits,
        max_depth: p.mobiles() * p.stations(),
        memo: HashMap::new(),
        stats: OpStats::default(),
    };
    let (_, serving) = hm.solve(&Grid::from_matrix(p), 0)?;
    SolveResult::from_assignment(Assignment::new(serving), p, hm.stats)
}
