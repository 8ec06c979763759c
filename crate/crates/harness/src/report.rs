//! CSV renderings. Numbers use the shortest round-trip form, empty cells mean
//! "not run".

use crate::config::Algorithm;
use crate::error::Result;
use crate::experiment::{RoundsPoint, SummaryRow, ThetaSweep, TrialRecord};

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Trial records sharing one parameter point.
pub type TrialGroup<'a> = (Vec<(String, f64)>, &'a [TrialRecord]);

/// `param...,trial,seed,m,n,alg,total_w,active_bs,rounds`, one row per run.
/// Trials without a feasible instance have no rows.
pub fn trial_log_csv(groups: &[TrialGroup]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let names: Vec<String> = groups
        .first()
        .map(|g| g.0.iter().map(|p| p.0.clone()).collect())
        .unwrap_or_default();
    let mut header = names.clone();
    header.extend(
        [
            "trial",
            "seed",
            "m",
            "n",
            "alg",
            "total_w",
            "active_bs",
            "rounds",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for (params, records) in groups {
        for r in records.iter() {
            for run in &r.runs {
                let mut row: Vec<String> = params.iter().map(|p| p.1.to_string()).collect();
                row.extend([
                    r.trial.to_string(),
                    r.seed.to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    run.alg.to_string(),
                    opt(run.total_w),
                    opt(run.active_bs),
                    opt(run.rounds),
                ]);
                w.write_record(&row)?;
            }
        }
    }
    finish(w)
}

/// `param...,alg,mean_w,stderr_w,trials,mean_active_bs,mean_rounds,infeasible`.
pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = rows
        .first()
        .map(|r| r.params.iter().map(|p| p.0.clone()).collect())
        .unwrap_or_default();
    header.extend(
        [
            "alg",
            "mean_w",
            "stderr_w",
            "trials",
            "mean_active_bs",
            "mean_rounds",
            "infeasible",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for r in rows {
        let mut row: Vec<String> = r.params.iter().map(|p| p.1.to_string()).collect();
        row.extend([
            r.alg.to_string(),
            r.mean_w.to_string(),
            r.stderr_w.to_string(),
            r.trials.to_string(),
            r.mean_active_bs.to_string(),
            opt(r.mean_rounds),
            r.infeasible.to_string(),
        ]);
        w.write_record(&row)?;
    }
    finish(w)
}

pub const COMPARE_COLUMNS: [Algorithm; 6] = [
    Algorithm::Hm,
    Algorithm::Sc,
    Algorithm::Cc,
    Algorithm::Dcc,
    Algorithm::Nbs,
    Algorithm::Hd,
];

/// Comparison table `Ex,m,n,HM,SC,CC,DCC,NBS,HD`, one row per feasible instance.
pub fn compare_csv(records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["Ex".to_string(), "m".into(), "n".into()];
    header.extend(COMPARE_COLUMNS.iter().map(|a| a.name().to_uppercase()));
    w.write_record(&header)?;
    for r in records.iter().filter(|r| r.is_solved()) {
        let mut row = vec![(r.trial + 1).to_string(), r.m.to_string(), r.n.to_string()];
        row.extend(COMPARE_COLUMNS.iter().map(|&a| opt(r.total(a))));
        w.write_record(&row)?;
    }
    finish(w)
}

/// `theta,mean_w,stderr_w,normalized,mean_rounds`.
pub fn theta_csv(s: &ThetaSweep) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theta", "mean_w", "stderr_w", "normalized", "mean_rounds"])?;
    for p in &s.points {
        w.write_record([
            p.theta.to_string(),
            p.mean_w.to_string(),
            p.stderr_w.to_string(),
            p.normalized.to_string(),
            p.mean_rounds.to_string(),
        ])?;
    }
    finish(w)
}

/// `area_km2,p0,mean_rounds,stderr_rounds,trials,unconverged`.
pub fn rounds_csv(points: &[RoundsPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "area_km2",
        "p0",
        "mean_rounds",
        "stderr_rounds",
        "trials",
        "unconverged",
    ])?;
    for p in points {
        w.write_record([
            p.area_km2.to_string(),
            p.op_power.to_string(),
            p.mean_rounds.to_string(),
            p.stderr_rounds.to_string(),
            p.trials.to_string(),
            p.unconverged.to_string(),
        ])?;
    }
    finish(w)
}
