//! Deployments (Poisson small cells, hexagonal macro cells), path loss with
//! log-normal shadowing, and power cost matrix construction.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{MapError, Result};
use crate::matrix::PowerCostMatrix;
use crate::power::ExtendedPower;

pub type Point = [f64; 2];

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Axis-aligned rectangle `[0, width] × [0, height]`, in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(MapError::InvalidValue(format!(
                "area must be nonempty, got {width} x {height}"
            )));
        }
        Ok(Area { width, height })
    }

    /// Square of the given size in km².
    pub fn square_km2(km2: f64) -> Result<Self> {
        let side = (km2 * 1e6).sqrt();
        Area::new(side, side)
    }

    pub fn size(&self) -> f64 {
        self.width * self.height
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p[0]) && (0.0..=self.height).contains(&p[1])
    }

    pub fn center(&self) -> Point {
        [self.width / 2.0, self.height / 2.0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Deployment {
    /// Intensities in points/m².
    Ppp {
        lambda_b: f64,
        lambda_m: f64,
    },
    Honeycomb {
        cell_radius: f64,
        lambda_m: f64,
    },
}

/// Link-budget parameters. All powers in watts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationParams {
    /// Required power at the receiver, `P_r`.
    pub receive_power: f64,
    pub path_loss_exponent: f64,
    pub shadowing_sigma_db: f64,
    pub shadowing_mean_db: f64,
    /// Transmission powers at or above this are unservable.
    pub max_tx_power: f64,
    /// Operational power of every station unless `op_power_per_bs` is set.
    pub op_power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op_power_per_bs: Option<Vec<f64>>,
}

impl PropagationParams {
    /// Small cells: `P_r` −80 dBm, α 3, cutoff 20 dBm, 12 W operational, σ 8 dB.
    pub fn small_cell() -> Self {
        PropagationParams {
            receive_power: dbm_to_watts(-80.0),
            path_loss_exponent: 3.0,
            shadowing_sigma_db: 8.0,
            shadowing_mean_db: 0.0,
            max_tx_power: dbm_to_watts(20.0),
            op_power: 12.0,
            op_power_per_bs: None,
        }
    }

    /// Macro cells: cutoff 48 dBm, no operational power.
    pub fn macro_cell() -> Self {
        PropagationParams {
            max_tx_power: dbm_to_watts(48.0),
            op_power: 0.0,
            ..Self::small_cell()
        }
    }

    // negated comparisons so that NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(MapError::InvalidValue(what.to_string()));
        if !(self.path_loss_exponent > 0.0) {
            return bad("path loss exponent must be > 0");
        }
        if !(self.receive_power > 0.0) {
            return bad("receive power must be > 0");
        }
        if !(self.max_tx_power > 0.0) {
            return bad("max transmit power must be > 0");
        }
        if !(self.shadowing_sigma_db >= 0.0) || !self.shadowing_mean_db.is_finite() {
            return bad("shadowing sigma must be >= 0 and mean finite");
        }
        if !(self.op_power >= 0.0) {
            return bad("operational power must be >= 0");
        }
        if let Some(v) = &self.op_power_per_bs {
            if v.iter().any(|&x| !(x >= 0.0)) {
                return bad("operational power must be >= 0");
            }
        }
        Ok(())
    }

    fn op_power_of(&self, bs: usize) -> Result<f64> {
        match &self.op_power_per_bs {
            None => Ok(self.op_power),
            Some(v) => v.get(bs).copied().ok_or(MapError::IndexOutOfRange {
                what: "op_power_per_bs",
                index: bs,
                size: v.len(),
            }),
        }
    }
}

/// `P_r · d^α / Ψ`. Distances below 1 m are clamped to 1 m.
pub fn transmit_power(distance: f64, shadowing_gain: f64, params: &PropagationParams) -> f64 {
    let d = distance.max(1.0);
    params.receive_power * d.powf(params.path_loss_exponent) / shadowing_gain
}

/// Homogeneous Poisson point process on `area`.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, area: &Area, rng: &mut R) -> Result<Vec<Point>> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(MapError::InvalidValue(format!(
            "intensity must be >= 0, got {lambda}"
        )));
    }
    let mean = lambda * area.size();
    if mean == 0.0 {
        return Ok(Vec::new());
    }
    let count = Poisson::new(mean)
        .map_err(|e| MapError::InvalidValue(e.to_string()))?
        .sample(rng) as usize;
    Ok((0..count)
        .map(|_| {
            [
                rng.random::<f64>() * area.width,
                rng.random::<f64>() * area.height,
            ]
        })
        .collect())
}

/// Centers of a pointy-top hexagonal tiling whose first cell touches the
/// origin corner, clipped to `area`. An area no larger than one cell's
/// bounding box gets a single station at its center.
pub fn honeycomb_layout(cell_radius: f64, area: &Area) -> Result<Vec<Point>> {
    if !(cell_radius > 0.0 && cell_radius.is_finite()) {
        return Err(MapError::InvalidValue(format!(
            "cell radius must be > 0, got {cell_radius}"
        )));
    }
    let spacing = 3f64.sqrt() * cell_radius;
    let row_step = 1.5 * cell_radius;
    if area.width <= spacing && area.height <= 2.0 * cell_radius {
        return Ok(vec![area.center()]);
    }
    let mut sites = Vec::new();
    let mut row = 0usize;
    loop {
        let y = cell_radius + row as f64 * row_step;
        if y > area.height {
            break;
        }
        let offset = if row.is_multiple_of(2) {
            spacing / 2.0
        } else {
            spacing
        };
        let mut x = offset;
        while x <= area.width {
            sites.push([x, y]);
            x += spacing;
        }
        row += 1;
    }
    if sites.is_empty() {
        sites.push(area.center());
    }
    Ok(sites)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub area: Area,
    pub deployment: Deployment,
    pub bs: Vec<Point>,
    pub mobiles: Vec<Point>,
}

impl Scenario {
    pub fn generate<R: Rng + ?Sized>(
        deployment: Deployment,
        area: Area,
        rng: &mut R,
    ) -> Result<Self> {
        let (bs, lambda_m) = match deployment {
            Deployment::Ppp { lambda_b, lambda_m } => (sample_ppp(lambda_b, &area, rng)?, lambda_m),
            Deployment::Honeycomb {
                cell_radius,
                lambda_m,
            } => (honeycomb_layout(cell_radius, &area)?, lambda_m),
        };
        let mobiles = sample_ppp(lambda_m, &area, rng)?;
        Ok(Scenario {
            area,
            deployment,
            bs,
            mobiles,
        })
    }
}

/// Scenario interchange record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub area: Area,
    pub deployment: Deployment,
    pub bs: Vec<Point>,
    pub mobiles: Vec<Point>,
    pub params: PropagationParams,
    pub seed: u64,
}

fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Power cost matrix of a scenario: `p_ij = P_ij + P_0^j` when the
/// transmission power `P_ij` is below the cutoff, infinite otherwise.
/// Shadowing gains are drawn i.i.d. per pair, row by row.
pub fn build_cost_matrix<R: Rng + ?Sized>(
    scn: &Scenario,
    params: &PropagationParams,
    rng: &mut R,
) -> Result<PowerCostMatrix> {
    params.validate()?;
    let (m, n) = (scn.mobiles.len(), scn.bs.len());
    if m == 0 || n == 0 {
        return Err(MapError::InvalidValue(format!(
            "scenario has {m} mobiles and {n} stations; need at least one of each"
        )));
    }
    let op: Vec<f64> = (0..n)
        .map(|j| params.op_power_of(j))
        .collect::<Result<_>>()?;
    let shadow = (params.shadowing_sigma_db > 0.0)
        .then(|| Normal::new(params.shadowing_mean_db, params.shadowing_sigma_db))
        .transpose()
        .map_err(|e| MapError::InvalidValue(e.to_string()))?;
    let fixed_gain = 10f64.powf(params.shadowing_mean_db / 10.0);

    let mut entries = Vec::with_capacity(m * n);
    for mobile in &scn.mobiles {
        for (j, bs) in scn.bs.iter().enumerate() {
            let gain = match &shadow {
                Some(normal) => 10f64.powf(normal.sample(rng) / 10.0),
                None => fixed_gain,
            };
            let tx = transmit_power(distance(*mobile, *bs), gain, params);
            entries.push(if tx < params.max_tx_power {
                ExtendedPower::new(tx + op[j])?
            } else {
                ExtendedPower::INFINITY
            });
        }
    }
    Ok(PowerCostMatrix::from_parts(m, n, entries))
}
