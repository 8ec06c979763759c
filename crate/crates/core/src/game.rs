//! Group-formation game between mobiles and its best-reply dynamics.
//!
//! A mobile `x` choosing station `j` gets
//! `u_x(j) = θ Σ_{y ∈ G_j, y ≠ x} min(p_xj, p_yj) − p_xj`, where `G_j` is the
//! current group of `j`. The pairwise term is symmetric, so
//! `Φ(σ) = Σ_j [−Σ_{a∈G_j} p_aj + θ/2 Σ_{a≠b∈G_j} min(p_aj, p_bj)]` is an exact
//! potential: a unilateral move changes `Φ` by exactly the mover's utility
//! change. Strict best replies therefore climb `Φ` and stop at a pure Nash
//! equilibrium.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, OpStats, SolveResult};
use crate::error::{MapError, Result};
use crate::heuristics::nearest_of;
use crate::matrix::PowerCostMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitPolicy {
    #[default]
    Nearest,
    UniformRandomFeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Clustering weight θ.
    pub theta: f64,
    pub max_rounds: u64,
    pub seed: u64,
    pub init: InitPolicy,
}

impl GameConfig {
    pub fn new(theta: f64, seed: u64) -> Self {
        GameConfig {
            theta,
            max_rounds: 1000,
            seed,
            init: InitPolicy::Nearest,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(MapError::InvalidValue(format!(
                "theta must be >= 0, got {}",
                self.theta
            )));
        }
        if self.max_rounds == 0 {
            return Err(MapError::InvalidValue("max_rounds must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-mobile station choice and the groups it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyTuple {
    choice: Vec<usize>,
    groups: Vec<Vec<usize>>,
}

impl StrategyTuple {
    /// Fails if some mobile picks a station that cannot serve it.
    pub fn new(choice: Vec<usize>, p: &PowerCostMatrix) -> Result<Self> {
        Assignment::new(choice.clone()).validate(p)?;
        let mut groups = vec![Vec::new(); p.stations()];
        for (x, &j) in choice.iter().enumerate() {
            groups[j].push(x);
        }
        Ok(StrategyTuple { choice, groups })
    }

    pub fn choice(&self) -> &[usize] {
        &self.choice
    }

    pub fn choice_of(&self, x: usize) -> usize {
        self.choice[x]
    }

    pub fn group(&self, j: usize) -> &[usize] {
        &self.groups[j]
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Unilateral move of `x` to `to`. The caller guarantees `p[x][to]` is finite.
    pub fn moved(&self, x: usize, to: usize) -> StrategyTuple {
        let mut next = self.clone();
        next.apply(x, to);
        next
    }

    fn apply(&mut self, x: usize, to: usize) {
        let from = self.choice[x];
        if from == to {
            return;
        }
        self.groups[from].retain(|&y| y != x);
        let pos = self.groups[to].partition_point(|&y| y < x);
        self.groups[to].insert(pos, x);
        self.choice[x] = to;
    }

    pub fn to_assignment(&self) -> Assignment {
        Assignment::new(self.choice.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub round: u64,
    pub mobile: usize,
    pub from_bs: usize,
    pub to_bs: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    /// Completed rounds, including the final round without moves.
    pub rounds: u64,
    pub converged: bool,
    pub initial_potential: f64,
    /// Potential after each accepted move.
    pub potential_values: Vec<f64>,
    pub moves: Vec<Move>,
}

impl ConvergenceTrace {
    /// CSV with header `round,mover,from_bs,to_bs,potential`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,mover,from_bs,to_bs,potential\n");
        for (mv, phi) in self.moves.iter().zip(&self.potential_values) {
            let _ = writeln!(
                out,
                "{},{},{},{},{:?}",
                mv.round, mv.mobile, mv.from_bs, mv.to_bs, phi
            );
        }
        out
    }
}

fn finite_pair(p: &PowerCostMatrix, x: usize, j: usize) -> Result<f64> {
    p.try_get(x, j)?
        .finite()
        .ok_or(MapError::InvalidPair { mobile: x, bs: j })
}

/// `Δ(x, y; j) = min(p_xj, p_yj)`, the power saved by serving both together.
pub fn clustering_profit(x: usize, y: usize, j: usize, p: &PowerCostMatrix) -> Result<f64> {
    if x == y {
        return Err(MapError::InvalidValue(
            "clustering profit needs two distinct mobiles".into(),
        ));
    }
    Ok(finite_pair(p, x, j)?.min(finite_pair(p, y, j)?))
}

/// `θΔ(x, y; j)` for distinct mobiles, `−p_xj` for the self term.
pub fn bipartite_utility(
    x: usize,
    y: usize,
    j: usize,
    theta: f64,
    p: &PowerCostMatrix,
) -> Result<f64> {
    if x == y {
        Ok(-finite_pair(p, x, j)?)
    } else {
        Ok(theta * clustering_profit(x, y, j, p)?)
    }
}

/// Utility of `x` at `j` against the current groups (with `x` itself excluded).
pub fn player_utility(
    x: usize,
    j: usize,
    sigma: &StrategyTuple,
    theta: f64,
    p: &PowerCostMatrix,
) -> Result<f64> {
    let own = finite_pair(p, x, j)?;
    let profit: f64 = sigma
        .group(j)
        .iter()
        .filter(|&&y| y != x)
        .map(|&y| own.min(p.get(y, j).value()))
        .sum();
    Ok(theta * profit - own)
}

/// Pairwise form of the potential.
pub fn potential(sigma: &StrategyTuple, theta: f64, p: &PowerCostMatrix) -> f64 {
    sigma
        .groups()
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let own: f64 = g.iter().map(|&a| p.get(a, j).value()).sum();
            let mut pairs = 0.0;
            for &a in g {
                for &b in g {
                    if a != b {
                        pairs += p.get(a, j).value().min(p.get(b, j).value());
                    }
                }
            }
            -own + theta / 2.0 * pairs
        })
        .sum()
}

/// Ordered form: with a group's powers ascending `p_(1) ≤ … ≤ p_(k)`, the pair
/// sum is `θ Σ_{i<k} (k − i) p_(i)`.
pub fn potential_ordered(sigma: &StrategyTuple, theta: f64, p: &PowerCostMatrix) -> f64 {
    sigma
        .groups()
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let mut vals: Vec<f64> = g.iter().map(|&a| p.get(a, j).value()).collect();
            vals.sort_by(f64::total_cmp);
            let k = vals.len();
            let own: f64 = vals.iter().sum();
            let pairs: f64 = vals
                .iter()
                .enumerate()
                .map(|(i, v)| (k - 1 - i) as f64 * v)
                .sum();
            -own + theta * pairs
        })
        .sum()
}

/// Smallest utility gain accepted as a strict improvement.
fn improvement_tolerance(current: f64) -> f64 {
    1e-12 * current.abs().max(1.0)
}

/// Utility-maximizing station for `x`. Stays put unless some station is
/// strictly better than the current one; otherwise lowest index among the best.
pub fn best_reply(
    x: usize,
    sigma: &StrategyTuple,
    theta: f64,
    p: &PowerCostMatrix,
) -> Result<usize> {
    let current = sigma.choice_of(x);
    let u_cur = player_utility(x, current, sigma, theta, p)?;
    let mut best: Option<(usize, f64)> = None;
    for j in (0..p.stations()).filter(|&j| p.get(x, j).is_finite()) {
        let u = player_utility(x, j, sigma, theta, p)?;
        if best.is_none_or(|(_, b)| u > b) {
            best = Some((j, u));
        }
    }
    match best {
        Some((j, u)) if u - u_cur > improvement_tolerance(u_cur) => Ok(j),
        _ => Ok(current),
    }
}

/// Sorted powers of each group at its station, with prefix sums, for
/// `O(log |G|)` profit queries during the dynamics.
struct GroupIndex {
    sorted: Vec<Vec<f64>>,
    prefix: Vec<Vec<f64>>,
}

impl GroupIndex {
    fn new(sigma: &StrategyTuple, p: &PowerCostMatrix) -> Self {
        let n = p.stations();
        let mut idx = GroupIndex {
            sorted: vec![Vec::new(); n],
            prefix: vec![Vec::new(); n],
        };
        for j in 0..n {
            let mut v: Vec<f64> = sigma
                .group(j)
                .iter()
                .map(|&a| p.get(a, j).value())
                .collect();
            v.sort_by(f64::total_cmp);
            idx.sorted[j] = v;
            idx.rebuild(j);
        }
        idx
    }

    fn rebuild(&mut self, j: usize) {
        let mut acc = 0.0;
        let mut pre = Vec::with_capacity(self.sorted[j].len() + 1);
        pre.push(0.0);
        for &v in &self.sorted[j] {
            acc += v;
            pre.push(acc);
        }
        self.prefix[j] = pre;
    }

    /// `Σ_{y ∈ G_j} min(v, p_yj)`.
    fn profit(&self, j: usize, v: f64) -> f64 {
        let s = &self.sorted[j];
        let k = s.partition_point(|&w| w < v);
        self.prefix[j][k] + v * (s.len() - k) as f64
    }

    fn remove(&mut self, j: usize, v: f64) {
        let s = &mut self.sorted[j];
        let k = s.partition_point(|&w| w < v);
        debug_assert!(s[k] == v);
        s.remove(k);
        self.rebuild(j);
    }

    fn insert(&mut self, j: usize, v: f64) {
        let s = &mut self.sorted[j];
        let k = s.partition_point(|&w| w < v);
        s.insert(k, v);
        self.rebuild(j);
    }
}

fn initial_profile(
    p: &PowerCostMatrix,
    cfg: &GameConfig,
    rng: &mut ChaCha8Rng,
) -> Result<StrategyTuple> {
    let choice = (0..p.mobiles())
        .map(|x| match cfg.init {
            InitPolicy::Nearest => nearest_of(p, x).expect("feasible"),
            InitPolicy::UniformRandomFeasible => {
                let options: Vec<usize> = (0..p.stations())
                    .filter(|&j| p.get(x, j).is_finite())
                    .collect();
                options[rng.random_range(0..options.len())]
            }
        })
        .collect();
    StrategyTuple::new(choice, p)
}

/// Best-reply dynamics from the configured initial profile.
///
/// Each round visits the mobiles in a fresh seeded random order; a visited
/// mobile moves to its best reply if that strictly raises its utility. The
/// run stops after the first round without a move, or after `max_rounds`
/// (then `converged` is false). The result prices the final groups.
pub fn hedonic_decision(
    p: &PowerCostMatrix,
    cfg: &GameConfig,
) -> Result<(SolveResult, ConvergenceTrace)> {
    cfg.validate()?;
    p.ensure_feasible()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sigma = initial_profile(p, cfg, &mut rng)?;
    let mut index = GroupIndex::new(&sigma, p);
    let theta = cfg.theta;
    let feasible: Vec<Vec<usize>> = (0..p.mobiles())
        .map(|x| {
            (0..p.stations())
                .filter(|&j| p.get(x, j).is_finite())
                .collect()
        })
        .collect();

    let mut phi = potential(&sigma, theta, p);
    let mut trace = ConvergenceTrace {
        initial_potential: phi,
        ..ConvergenceTrace::default()
    };
    let mut stats = OpStats::default();
    let mut order: Vec<usize> = (0..p.mobiles()).collect();

    while trace.rounds < cfg.max_rounds {
        trace.rounds += 1;
        order.shuffle(&mut rng);
        let mut moved = false;
        for &x in &order {
            let current = sigma.choice_of(x);
            let utility = |j: usize| {
                let own = p.get(x, j).value();
                // x's own entry contributes min(own, own) when it sits in G_j
                let self_term = if j == current { own } else { 0.0 };
                theta * (index.profit(j, own) - self_term) - own
            };
            let u_cur = utility(current);
            let mut best = (current, u_cur);
            for &j in &feasible[x] {
                stats.comparisons += 1;
                let u = utility(j);
                if u > best.1 {
                    best = (j, u);
                }
            }
            let (to, u_new) = best;
            if to != current && u_new - u_cur > improvement_tolerance(u_cur) {
                let own_from = p.get(x, current).value();
                index.remove(current, own_from);
                index.insert(to, p.get(x, to).value());
                sigma.apply(x, to);
                phi += u_new - u_cur;
                trace.potential_values.push(phi);
                trace.moves.push(Move {
                    round: trace.rounds,
                    mobile: x,
                    from_bs: current,
                    to_bs: to,
                });
                moved = true;
            }
        }
        if !moved {
            trace.converged = true;
            break;
        }
    }

    stats.rounds = trace.rounds;
    stats.steps = trace.moves.len() as u64;
    let result = SolveResult::from_assignment(sigma.to_assignment(), p, stats)?;
    Ok((result, trace))
}

/// Mobiles that still have a strictly improving deviation under `sigma`.
pub fn improving_deviations(
    sigma: &StrategyTuple,
    theta: f64,
    p: &PowerCostMatrix,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for x in 0..p.mobiles() {
        let cur = player_utility(x, sigma.choice_of(x), sigma, theta, p)?;
        for j in (0..p.stations()).filter(|&j| p.get(x, j).is_finite()) {
            if player_utility(x, j, sigma, theta, p)? - cur > improvement_tolerance(cur) {
                out.push(x);
                break;
            }
        }
    }
    Ok(out)
}
