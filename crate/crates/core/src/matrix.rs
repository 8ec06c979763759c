//! The mobiles × base-stations power cost matrix.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{MapError, Result};
use crate::power::ExtendedPower;

/// `m × n` grid of total powers `p_ij` (transmission plus operational cost),
/// row `i` for mobile `i`, column `j` for base station `j`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<ExtendedPower>>", into = "Vec<Vec<ExtendedPower>>")]
pub struct PowerCostMatrix {
    m: usize,
    n: usize,
    entries: Vec<ExtendedPower>,
}

/// Result of [`PowerCostMatrix::check_feasibility`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub uncoverable: Vec<usize>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.uncoverable.is_empty()
    }
}

impl PowerCostMatrix {
    pub fn new(rows: Vec<Vec<ExtendedPower>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(MapError::InvalidValue(
                "matrix needs at least one mobile and one base station".into(),
            ));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(MapError::InvalidValue(format!(
                "row {i} has {} columns, expected {n}",
                rows[i].len()
            )));
        }
        Ok(PowerCostMatrix {
            m,
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds from plain floats; `f64::INFINITY` marks an unservable pair.
    pub fn from_f64<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| ExtendedPower::new(v)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::new(rows)
    }

    pub(crate) fn from_parts(m: usize, n: usize, entries: Vec<ExtendedPower>) -> Self {
        debug_assert_eq!(entries.len(), m * n);
        PowerCostMatrix { m, n, entries }
    }

    pub fn mobiles(&self) -> usize {
        self.m
    }

    pub fn stations(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, mobile: usize, bs: usize) -> ExtendedPower {
        self.entries[mobile * self.n + bs]
    }

    pub fn try_get(&self, mobile: usize, bs: usize) -> Result<ExtendedPower> {
        self.check_mobile(mobile)?;
        self.check_bs(bs)?;
        Ok(self.get(mobile, bs))
    }

    pub fn row(&self, mobile: usize) -> &[ExtendedPower] {
        &self.entries[mobile * self.n..(mobile + 1) * self.n]
    }

    pub fn column(&self, bs: usize) -> impl Iterator<Item = ExtendedPower> + '_ {
        (0..self.m).map(move |i| self.get(i, bs))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[ExtendedPower]> {
        self.entries.chunks(self.n)
    }

    pub(crate) fn check_mobile(&self, mobile: usize) -> Result<()> {
        if mobile >= self.m {
            return Err(MapError::IndexOutOfRange {
                what: "mobile",
                index: mobile,
                size: self.m,
            });
        }
        Ok(())
    }

    pub(crate) fn check_bs(&self, bs: usize) -> Result<()> {
        if bs >= self.n {
            return Err(MapError::IndexOutOfRange {
                what: "bs",
                index: bs,
                size: self.n,
            });
        }
        Ok(())
    }

    /// Lists mobiles whose row has no finite entry.
    pub fn check_feasibility(&self) -> FeasibilityReport {
        FeasibilityReport {
            uncoverable: (0..self.m)
                .filter(|&i| self.row(i).iter().all(|p| p.is_infinite()))
                .collect(),
        }
    }

    pub fn ensure_feasible(&self) -> Result<()> {
        let report = self.check_feasibility();
        if report.is_feasible() {
            Ok(())
        } else {
            Err(MapError::Infeasible {
                mobiles: report.uncoverable,
            })
        }
    }

    /// Sub-matrix with the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PowerCostMatrix {
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j)))
            .collect();
        PowerCostMatrix::from_parts(rows.len(), cols.len(), entries)
    }

    /// Writes the interchange CSV: header `mobile,bs_1,..,bs_n`, one row per
    /// mobile labelled from 1, `inf` for unservable pairs.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["mobile".to_string()];
        header.extend((1..=self.n).map(|j| format!("bs_{j}")));
        wtr.write_record(&header).map_err(csv_err)?;
        for (i, row) in self.rows().enumerate() {
            let mut rec = vec![(i + 1).to_string()];
            rec.extend(row.iter().map(|p| p.to_string()));
            wtr.write_record(&rec).map_err(csv_err)?;
        }
        wtr.flush().map_err(|e| MapError::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(r);
        let header = rdr.headers().map_err(csv_err)?.clone();
        if header.get(0) != Some("mobile") {
            return Err(MapError::Parse(
                "first header column must be `mobile`".into(),
            ));
        }
        for (k, h) in header.iter().enumerate().skip(1) {
            if h != format!("bs_{k}") {
                return Err(MapError::Parse(format!("unexpected header column {h:?}")));
            }
        }
        let n = header.len() - 1;
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != n + 1 {
                return Err(MapError::Parse(format!(
                    "row has {} cells, expected {}",
                    rec.len(),
                    n + 1
                )));
            }
            let row = rec
                .iter()
                .skip(1)
                .map(str::parse)
                .collect::<Result<Vec<ExtendedPower>>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }
}

fn csv_err(e: csv::Error) -> MapError {
    MapError::Parse(e.to_string())
}

impl TryFrom<Vec<Vec<ExtendedPower>>> for PowerCostMatrix {
    type Error = MapError;

    fn try_from(rows: Vec<Vec<ExtendedPower>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<PowerCostMatrix> for Vec<Vec<ExtendedPower>> {
    fn from(p: PowerCostMatrix) -> Self {
        p.rows().map(<[ExtendedPower]>::to_vec).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::fixtures::cc_example;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn feasibility_reports() {
        let p = PowerCostMatrix::from_f64(&[[3.0, 6.0], [5.0, 1.0]]).unwrap();
        assert!(p.check_feasibility().is_feasible());

        let p = PowerCostMatrix::from_f64(&[[INF, INF]]).unwrap();
        assert_eq!(p.check_feasibility().uncoverable, vec![0]);
        assert_eq!(
            p.ensure_feasible(),
            Err(MapError::Infeasible { mobiles: vec![0] })
        );

        assert!(cc_example().check_feasibility().is_feasible());
    }

    #[test]
    fn rejects_ragged_and_empty() {
        assert!(PowerCostMatrix::from_f64::<[f64; 0]>(&[]).is_err());
        assert!(PowerCostMatrix::new(vec![vec![]]).is_err());
        assert!(PowerCostMatrix::from_f64(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let p = cc_example();
        let text = p.to_csv_string();
        assert!(text.starts_with("mobile,bs_1,bs_2,bs_3,bs_4\n1,12.5,12.4,12.32,inf\n"));
        let back = PowerCostMatrix::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(PowerCostMatrix::read_csv("m,bs_1\n1,2\n".as_bytes()).is_err());
        assert!(PowerCostMatrix::read_csv("mobile,bs_2\n1,2\n".as_bytes()).is_err());
        assert!(PowerCostMatrix::read_csv("mobile,bs_1\n1,-2\n".as_bytes()).is_err());
    }

    #[test]
    fn submatrix_selects_in_order() {
        let p = cc_example();
        let s = p.submatrix(&[3, 0], &[1, 0]);
        assert_eq!(s.get(0, 0), ExtendedPower::watts(12.43));
        assert_eq!(s.get(0, 1), ExtendedPower::INFINITY);
        assert_eq!(s.get(1, 1), ExtendedPower::watts(12.50));
    }
}
