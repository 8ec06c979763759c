//! Distributed column control: stations broadcast the costs of the mobiles
//! they can serve, each mobile rebuilds a local matrix from what it hears and
//! runs column control on it to pick its own station.

use serde::{Deserialize, Serialize};

use crate::assignment::{Assignment, OpStats, SolveResult};
use crate::error::{MapError, Result};
use crate::heuristics::column_control;
use crate::matrix::PowerCostMatrix;
use crate::power::ExtendedPower;

/// What station `bs` broadcasts: the finite entries of its column and the
/// mobiles they belong to, in increasing mobile order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BroadcastMessage {
    pub bs: usize,
    pub powers: Vec<ExtendedPower>,
    pub identities: Vec<usize>,
}

impl BroadcastMessage {
    pub fn lists(&self, mobile: usize) -> Option<ExtendedPower> {
        self.identities
            .binary_search(&mobile)
            .ok()
            .map(|k| self.powers[k])
    }
}

/// A mobile's reconstruction of the part of the network it can hear.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalView {
    pub owner: usize,
    pub matrix: PowerCostMatrix,
    /// Local row → global mobile.
    pub row_index: Vec<usize>,
    /// Local column → global station.
    pub col_index: Vec<usize>,
}

/// `None` for a station that can serve nobody (it stays silent).
pub fn bs_broadcast(bs: usize, p: &PowerCostMatrix) -> Result<Option<BroadcastMessage>> {
    p.check_bs(bs)?;
    let (identities, powers): (Vec<usize>, Vec<ExtendedPower>) = p
        .column(bs)
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .unzip();
    if identities.is_empty() {
        return Ok(None);
    }
    Ok(Some(BroadcastMessage {
        bs,
        powers,
        identities,
    }))
}

/// Broadcast phase: one message per non-silent station.
pub fn broadcast_all(p: &PowerCostMatrix) -> Vec<BroadcastMessage> {
    (0..p.stations())
        .filter_map(|j| bs_broadcast(j, p).expect("index in range"))
        .collect()
}

/// Builds the local matrix of `mobile` from the messages it received.
///
/// Rows are every mobile named by some message, columns are the senders, both
/// ascending. A cell is infinite where the sender did not list that mobile.
pub fn build_local_matrix(mobile: usize, msgs: &[&BroadcastMessage]) -> Result<LocalView> {
    if !msgs.iter().any(|m| m.lists(mobile).is_some()) {
        return Err(MapError::UncoveredMobile(mobile));
    }
    let mut col_index: Vec<usize> = msgs.iter().map(|m| m.bs).collect();
    col_index.sort_unstable();
    col_index.dedup();
    let mut row_index: Vec<usize> = msgs
        .iter()
        .flat_map(|m| m.identities.iter().copied())
        .collect();
    row_index.sort_unstable();
    row_index.dedup();

    let by_col: Vec<&BroadcastMessage> = col_index
        .iter()
        .map(|&j| *msgs.iter().find(|m| m.bs == j).expect("sender present"))
        .collect();
    let rows = row_index
        .iter()
        .map(|&i| {
            by_col
                .iter()
                .map(|m| m.lists(i).unwrap_or(ExtendedPower::INFINITY))
                .collect()
        })
        .collect();
    Ok(LocalView {
        owner: mobile,
        matrix: PowerCostMatrix::new(rows)?,
        row_index,
        col_index,
    })
}

/// Per-mobile outcome of a DCC run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DccReport {
    pub messages: usize,
    /// Mobiles whose local plan puts some other mobile on a different station
    /// than that mobile actually chose.
    pub divergent_mobiles: usize,
    pub switched_off: Vec<usize>,
}

/// Distributed column control.
///
/// Each mobile hears exactly the stations that can serve it, runs column
/// control on its local view, and keeps the station that plan gives it. The
/// realized clusters are then priced; stations nobody picked are off.
pub fn dcc(p: &PowerCostMatrix) -> Result<SolveResult> {
    dcc_with_report(p).map(|(r, _)| r)
}

pub fn dcc_with_report(p: &PowerCostMatrix) -> Result<(SolveResult, DccReport)> {
    p.ensure_feasible()?;
    let msgs = broadcast_all(p);
    let mut serving = Vec::with_capacity(p.mobiles());
    let mut plans = Vec::with_capacity(p.mobiles());
    let mut stats = OpStats::default();
    for i in 0..p.mobiles() {
        let heard: Vec<&BroadcastMessage> = msgs.iter().filter(|m| m.lists(i).is_some()).collect();
        let view = build_local_matrix(i, &heard)?;
        let local = column_control(&view.matrix)?;
        stats.comparisons += local.stats.comparisons;
        stats.steps += local.stats.steps;
        let row = view.row_index.binary_search(&i).expect("owner is a row");
        serving.push(view.col_index[local.assignment.bs_of(row)]);
        plans.push((view, local.assignment));
    }

    let divergent_mobiles = plans
        .iter()
        .filter(|(view, plan)| {
            view.row_index
                .iter()
                .enumerate()
                .any(|(r, &g)| view.col_index[plan.bs_of(r)] != serving[g])
        })
        .count();
    let assignment = Assignment::new(serving);
    let active = assignment.active_bs();
    let report = DccReport {
        messages: msgs.len(),
        divergent_mobiles,
        switched_off: (0..p.stations())
            .filter(|j| active.binary_search(j).is_err())
            .collect(),
    };
    Ok((SolveResult::from_assignment(assignment, p, stats)?, report))
}

/// JSON array of the broadcast phase, for protocol traces.
pub fn message_log_json(p: &PowerCostMatrix) -> String {
    serde_json::to_string(&broadcast_all(p)).expect("messages serialize")
}
