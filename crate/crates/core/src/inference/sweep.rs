use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{Engine, EngineKind};
use super::metrics::{evaluate, Metrics};
use super::oracle::{OracleConfig, OracleKind, OracleTarget};
use crate::error::{Error, Result};
use crate::taskgen::{CompiledTask, Dataset, Split};

pub const DEFAULT_NOISE_LEVELS: [f64; 4] = [0.0, 0.05, 0.1, 0.2];

/// One oracle setting without its seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSetting {
    pub target: OracleTarget,
    pub kind: OracleKind,
    pub p: f64,
}

/// Both targets × {flip, confidence} × the nonzero levels, plus the
/// perfect oracle per target when 0 is listed.
pub fn default_grid(levels: &[f64]) -> Result<Vec<OracleSetting>> {
    let mut out = Vec::new();
    for target in OracleTarget::ALL {
        if levels.contains(&0.0) {
            out.push(OracleSetting {
                target,
                kind: OracleKind::Perfect,
                p: 0.0,
            });
        }
        for kind in [OracleKind::Flip, OracleKind::Confidence] {
            for &p in levels.iter().filter(|&&p| p != 0.0) {
                OracleConfig::new(target, kind, p, 0)?;
                out.push(OracleSetting { target, kind, p });
            }
        }
    }
    Ok(out)
}

/// `n` consecutive seeds starting at `base`.
pub fn sweep_seeds(base: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| base.wrapping_add(i)).collect()
}

/// One line of the long-format report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub task: String,
    pub engine: String,
    pub oracle_target: String,
    pub oracle_kind: String,
    pub p: f64,
    pub seed: u64,
    pub ic_acc: Option<f64>,
    pub cc_acc: f64,
    pub nsp_acc: f64,
    pub sc_acc: f64,
    pub avg_acc: f64,
}

impl ReportRow {
    pub fn new(task: &str, engine: EngineKind, oracle: &OracleConfig, m: &Metrics) -> Self {
        ReportRow {
            task: task.to_string(),
            engine: engine.as_str().to_string(),
            oracle_target: oracle.target.as_str().to_string(),
            oracle_kind: oracle.kind.as_str().to_string(),
            p: oracle.p,
            seed: oracle.seed,
            ic_acc: m.ic_acc,
            cc_acc: m.cc_acc,
            nsp_acc: m.nsp_acc,
            sc_acc: m.sc_acc,
            avg_acc: m.avg_acc,
        }
    }
}

/// Evaluates every (setting, engine, seed) on the test split. Rows come
/// back in grid order regardless of scheduling.
pub fn oracle_sweep(
    task: &CompiledTask,
    ds: &Dataset,
    grid: &[OracleSetting],
    engines: &[EngineKind],
    seeds: &[u64],
    calibrate: bool,
) -> Result<Vec<ReportRow>> {
    let built: Vec<Engine> = engines
        .iter()
        .map(|&k| Engine::new(k, task.dfa()))
        .collect::<Result<_>>()?;
    let mut jobs = Vec::new();
    for g in grid {
        for e in &built {
            for &seed in seeds {
                jobs.push((OracleConfig::new(g.target, g.kind, g.p, seed)?, e));
            }
        }
    }
    jobs.par_iter()
        .map(|(o, e)| {
            let ev = evaluate(task, ds, Split::Test, e, o, calibrate)?;
            Ok(ReportRow::new(&task.spec().name, e.kind(), o, &ev.metrics))
        })
        .collect()
}

pub fn write_report<W: Write>(rows: &[ReportRow], w: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report<R: Read>(r: R) -> Result<Vec<ReportRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single seed.
    pub std: f64,
}

impl Stat {
    fn of(xs: &[f64]) -> Option<Stat> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Some(Stat { mean, std: var.sqrt() })
    }
}

/// Mean ± std across seeds for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub task: String,
    pub engine: String,
    pub oracle_target: String,
    pub oracle_kind: String,
    pub p: f64,
    pub seeds: usize,
    pub ic_acc: Option<Stat>,
    pub cc_acc: Stat,
    pub nsp_acc: Stat,
    pub sc_acc: Stat,
    pub avg_acc: Stat,
}

/// Groups rows by configuration in order of first appearance.
pub fn summarize(rows: &[ReportRow]) -> Vec<SummaryRow> {
    type Key = (String, String, String, String, u64);
    let key = |r: &ReportRow| -> Key {
        (
            r.task.clone(),
            r.engine.clone(),
            r.oracle_target.clone(),
            r.oracle_kind.clone(),
            r.p.to_bits(),
        )
    };
    let mut groups: Vec<(Key, Vec<&ReportRow>)> = Vec::new();
    for r in rows {
        let k = key(r);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, v)) => v.push(r),
            None => groups.push((k, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(_, rs)| {
            let col = |f: fn(&ReportRow) -> f64| Stat::of(&rs.iter().map(|r| f(r)).collect::<Vec<_>>()).unwrap();
            let ic: Vec<f64> = rs.iter().filter_map(|r| r.ic_acc).collect();
            SummaryRow {
                task: rs[0].task.clone(),
                engine: rs[0].engine.clone(),
                oracle_target: rs[0].oracle_target.clone(),
                oracle_kind: rs[0].oracle_kind.clone(),
                p: rs[0].p,
                seeds: rs.len(),
                ic_acc: Stat::of(&ic),
                cc_acc: col(|r| r.cc_acc),
                nsp_acc: col(|r| r.nsp_acc),
                sc_acc: col(|r| r.sc_acc),
                avg_acc: col(|r| r.avg_acc),
            }
        })
        .collect()
}
