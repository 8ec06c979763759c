//! Assignments of mobiles to base stations and their power cost.

use serde::{Deserialize, Serialize};

use crate::error::{MapError, Result};
use crate::matrix::PowerCostMatrix;
use crate::power::ExtendedPower;

/// Total mapping mobile → serving base station (both 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    serving_bs: Vec<usize>,
}

impl Assignment {
    pub fn new(serving_bs: Vec<usize>) -> Self {
        Assignment { serving_bs }
    }

    pub fn serving_bs(&self) -> &[usize] {
        &self.serving_bs
    }

    pub fn bs_of(&self, mobile: usize) -> usize {
        self.serving_bs[mobile]
    }

    pub fn len(&self) -> usize {
        self.serving_bs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.serving_bs.is_empty()
    }

    /// Checks shape and that every pair is finite in `p`.
    pub fn validate(&self, p: &PowerCostMatrix) -> Result<()> {
        if self.serving_bs.len() != p.mobiles() {
            return Err(MapError::InvalidValue(format!(
                "assignment covers {} mobiles, matrix has {}",
                self.serving_bs.len(),
                p.mobiles()
            )));
        }
        for (i, &j) in self.serving_bs.iter().enumerate() {
            p.check_bs(j)?;
            if p.get(i, j).is_infinite() {
                return Err(MapError::InvalidAssignment { mobile: i, bs: j });
            }
        }
        Ok(())
    }

    /// Member lists per base station, indexed by station; empty for switched-off ones.
    pub fn clusters(&self, stations: usize) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); stations];
        for (i, &j) in self.serving_bs.iter().enumerate() {
            groups[j].push(i);
        }
        groups
    }

    /// Stations with at least one mobile, ascending.
    pub fn active_bs(&self) -> Vec<usize> {
        let mut active = self.serving_bs.clone();
        active.sort_unstable();
        active.dedup();
        active
    }
}

/// `max_{i∈S} p_ij`, the power station `j` needs to reach every mobile of `S`.
pub fn cluster_cost(mobiles: &[usize], bs: usize, p: &PowerCostMatrix) -> Result<ExtendedPower> {
    p.check_bs(bs)?;
    if mobiles.is_empty() {
        return Err(MapError::InvalidValue("cluster must be nonempty".into()));
    }
    let mut cost = ExtendedPower::ZERO;
    for &i in mobiles {
        p.check_mobile(i)?;
        cost = cost.max(p.get(i, bs));
    }
    Ok(cost)
}

/// Sum over active stations of the cluster maximum. Switched-off stations cost nothing.
pub fn total_cost(a: &Assignment, p: &PowerCostMatrix) -> Result<ExtendedPower> {
    a.validate(p)?;
    Ok(cluster_maxima(a, p).into_iter().sum())
}

/// Per-station cluster maximum (zero for empty clusters). Assumes `a` is valid.
pub(crate) fn cluster_maxima(a: &Assignment, p: &PowerCostMatrix) -> Vec<ExtendedPower> {
    let mut maxima = vec![ExtendedPower::ZERO; p.stations()];
    for (i, &j) in a.serving_bs().iter().enumerate() {
        maxima[j] = maxima[j].max(p.get(i, j));
    }
    maxima
}

/// Operation counters reported by the solvers. Only the fields an algorithm
/// uses are nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpStats {
    pub comparisons: u64,
    pub recursive_calls: u64,
    pub rounds: u64,
    pub steps: u64,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub assignment: Assignment,
    pub total_power: ExtendedPower,
    pub active_bs: Vec<usize>,
    pub stats: OpStats,
}

impl SolveResult {
    /// Prices `assignment` against `p` and records the active stations.
    pub fn from_assignment(
        assignment: Assignment,
        p: &PowerCostMatrix,
        stats: OpStats,
    ) -> Result<Self> {
        let total_power = total_cost(&assignment, p)?;
        let active_bs = assignment.active_bs();
        Ok(SolveResult {
            assignment,
            total_power,
            active_bs,
            stats,
        })
    }

    pub fn total(&self) -> f64 {
        self.total_power.value()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("SolveResult serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{three_by_three, two_by_two};

    #[test]
    fn cluster_cost_examples() {
        let p = three_by_three();
        assert_eq!(cluster_cost(&[0, 1, 2], 0, &p).unwrap().value(), 32.0);
        assert_eq!(cluster_cost(&[0], 0, &p).unwrap().value(), 10.0);
        assert_eq!(cluster_cost(&[0, 1], 2, &p).unwrap().value(), 33.0);
    }

    #[test]
    fn cluster_cost_index_errors() {
        let p = two_by_two();
        assert!(matches!(
            cluster_cost(&[2], 0, &p),
            Err(MapError::IndexOutOfRange { what: "mobile", .. })
        ));
        assert!(matches!(
            cluster_cost(&[0], 5, &p),
            Err(MapError::IndexOutOfRange { what: "bs", .. })
        ));
        assert!(cluster_cost(&[], 0, &p).is_err());
    }

    #[test]
    fn total_cost_examples() {
        let a = Assignment::new(vec![0, 1]);
        assert_eq!(total_cost(&a, &two_by_two()).unwrap().value(), 4.0);

        let a = Assignment::new(vec![2, 2, 0]);
        assert_eq!(total_cost(&a, &three_by_three()).unwrap().value(), 65.0);

        let p = PowerCostMatrix::from_f64(&[[7.25]]).unwrap();
        assert_eq!(
            total_cost(&Assignment::new(vec![0]), &p).unwrap().value(),
            7.25
        );
    }

    #[test]
    fn total_cost_rejects_infinite_pair() {
        let p = PowerCostMatrix::from_f64(&[[1.0, f64::INFINITY]]).unwrap();
        assert_eq!(
            total_cost(&Assignment::new(vec![1]), &p),
            Err(MapError::InvalidAssignment { mobile: 0, bs: 1 })
        );
        assert!(total_cost(&Assignment::new(vec![0, 0]), &p).is_err());
    }

    #[test]
    fn solve_result_json_shape() {
        let r = SolveResult::from_assignment(
            Assignment::new(vec![0, 1]),
            &two_by_two(),
            OpStats::default(),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["total_power"], 4.0);
        assert_eq!(v["assignment"]["serving_bs"], serde_json::json!([0, 1]));
        assert_eq!(v["active_bs"], serde_json::json!([0, 1]));
    }
}
