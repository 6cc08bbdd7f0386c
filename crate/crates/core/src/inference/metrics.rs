use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::calibration::{apply_temperature, calibrate_temperature, Calibration};
use super::engine::{argmax, Engine};
use super::oracle::{OracleConfig, OracleTarget};
use crate::error::{Error, Result};
use crate::taskgen::{derive_seed, CompiledTask, Dataset, SequenceSample, Split};

/// Decision threshold for constraint and sequence beliefs; ties are positive.
pub const THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    /// Only present when the oracle simulates the IC stage alone.
    pub ic_acc: Option<f64>,
    pub cc_acc: f64,
    pub nsp_acc: f64,
    pub sc_acc: f64,
    /// Mean of the sub-accuracies present.
    pub avg_acc: f64,
    pub mp_successor: Option<f64>,
    pub mp_sequence: Option<f64>,
}

/// Metrics plus diagnostics of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub metrics: Metrics,
    /// Mean per-sequence semantic loss of the acceptance probabilities.
    pub semantic_loss: f64,
    pub calibration: Option<Calibration>,
    /// Range of pre-normalization belief mass over all steps.
    pub mass_range: (f64, f64),
    pub sequences: usize,
}

/// `(a + b − ab)(1 − ab)`.
pub fn soft_xor(a: f64, b: f64) -> f64 {
    (a + b - a * b) * (1.0 - a * b)
}

/// `1 − ⊕{pred : label = 1} + 1 − Π{1 − pred : label = 0}` with ⊕ left-folded
/// in input order; both empty reductions are 1.
pub fn semantic_loss(preds: &[f64], labels: &[u8]) -> Result<f64> {
    if preds.len() != labels.len() {
        return Err(Error::domain(format!(
            "{} predictions for {} labels",
            preds.len(),
            labels.len()
        )));
    }
    if let Some(p) = preds.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::domain(format!("prediction {p} outside [0, 1]")));
    }
    let mut pos = preds.iter().zip(labels).filter(|(_, &l)| l == 1).map(|(&p, _)| p);
    let xor = match pos.next() {
        None => 1.0,
        Some(first) => pos.fold(first, soft_xor),
    };
    let neg: f64 = preds
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l != 1)
        .map(|(&p, _)| 1.0 - p)
        .product();
    Ok(1.0 - xor + 1.0 - neg)
}

fn modal<I: Iterator<Item = usize>>(items: I) -> Option<usize> {
    let mut counts: Vec<usize> = Vec::new();
    for x in items {
        if x >= counts.len() {
            counts.resize(x + 1, 0);
        }
        counts[x] += 1;
    }
    // first maximum: ties go to the smaller value
    let best = counts.iter().copied().max().filter(|&c| c > 0)?;
    counts.iter().position(|&c| c == best)
}

/// Test accuracies of constantly predicting the train split's most common
/// next state and sequence label.
pub fn mp_baselines(ds: &Dataset) -> Result<(f64, f64)> {
    let train = ds.split(Split::Train);
    let test = ds.split(Split::Test);
    if train.is_empty() || test.is_empty() {
        return Err(Error::domain("baselines need non-empty train and test splits"));
    }
    let state = modal(train.iter().flat_map(|s| s.states.iter().copied()))
        .ok_or_else(|| Error::domain("train split has no steps"))?;
    let label = modal(train.iter().map(|s| usize::from(s.label))).unwrap_or(0);
    let steps: usize = test.iter().map(|s| s.len()).sum();
    let hits: usize = test.iter().map(|s| s.states.iter().filter(|&&x| x == state).count()).sum();
    let seq_hits = test.iter().filter(|s| usize::from(s.label) == label).count();
    Ok((hits as f64 / steps as f64, seq_hits as f64 / test.len() as f64))
}

/// Oracle constraint beliefs for one sequence, plus IC hits and trials.
pub fn oracle_beliefs(
    task: &CompiledTask,
    split: Split,
    s: &SequenceSample,
    oracle: &OracleConfig,
) -> Result<(Vec<Vec<f64>>, usize, usize)> {
    let vars = task.variables();
    let k = task.atoms().len();
    let rng = |t: usize, slot: usize| {
        ChaCha8Rng::seed_from_u64(derive_seed(&[
            oracle.seed,
            split.index() as u64,
            s.seq_id as u64,
            t as u64,
            slot as u64,
        ]))
    };
    let mut trace = Vec::with_capacity(s.len());
    let (mut hits, mut total) = (0, 0);
    for t in 0..s.len() {
        match oracle.target {
            OracleTarget::Ic => {
                let mut dists = Vec::with_capacity(vars.len());
                for (j, (v, &x)) in vars.iter().zip(&s.values[t]).enumerate() {
                    let idx = v.domain.index_of(x).ok_or_else(|| {
                        Error::domain(format!("value {x} of `{}` is outside its domain", v.name))
                    })?;
                    let d = oracle.sample(idx, v.domain.len(), &mut rng(t, j));
                    hits += usize::from(argmax(&d) == idx);
                    total += 1;
                    dists.push(d);
                }
                trace.push(task.constraint_probabilities(&dists)?);
            }
            OracleTarget::IcCc => {
                trace.push(
                    (0..k)
                        .map(|i| oracle.sample(usize::from(s.truth(t, i)), 2, &mut rng(t, vars.len() + i))[1])
                        .collect(),
                );
            }
        }
    }
    Ok((trace, hits, total))
}

#[derive(Debug, Default, Clone, Copy)]
struct Counts {
    ic: (usize, usize),
    cc: (usize, usize),
    nsp: (usize, usize),
    sc: usize,
    loss: f64,
    mass: (f64, f64),
}

fn frac((hits, total): (usize, usize)) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

/// Runs `engine` over `split` of `ds` with oracle-simulated perception.
/// With `calibrate`, a scalar temperature for the constraint beliefs is fit
/// on the validation split first.
pub fn evaluate(
    task: &CompiledTask,
    ds: &Dataset,
    split: Split,
    engine: &Engine,
    oracle: &OracleConfig,
    calibrate: bool,
) -> Result<Evaluation> {
    if engine.dfa() != task.dfa() {
        return Err(Error::domain("engine and task automata differ"));
    }
    if ds.spec_hash != task.spec().hash() {
        return Err(Error::domain("dataset was generated from a different task spec"));
    }
    let samples = ds.split(split);
    if samples.is_empty() {
        return Err(Error::domain(format!("{} split is empty", split.as_str())));
    }

    let calibration = if calibrate {
        let val = ds.split(Split::Val);
        let pairs: Vec<Vec<(f64, bool)>> = val
            .par_iter()
            .map(|s| {
                let (trace, _, _) = oracle_beliefs(task, Split::Val, s, oracle)?;
                Ok(trace
                    .iter()
                    .enumerate()
                    .flat_map(|(t, cb)| cb.iter().enumerate().map(move |(i, &p)| (p, s.truth(t, i))))
                    .collect())
            })
            .collect::<Result<_>>()?;
        Some(calibrate_temperature(&pairs.concat())?)
    } else {
        None
    };

    let per_seq: Vec<Counts> = samples
        .par_iter()
        .map(|s| {
            let (mut trace, ic_hits, ic_total) = oracle_beliefs(task, split, s, oracle)?;
            if let Some(c) = &calibration {
                for cb in &mut trace {
                    for p in cb.iter_mut() {
                        *p = apply_temperature(*p, c.temperature)?;
                    }
                }
            }
            let run = engine.run_sequence(&trace)?;
            let mut c = Counts {
                ic: (ic_hits, ic_total),
                mass: (f64::INFINITY, f64::NEG_INFINITY),
                ..Counts::default()
            };
            for (t, cb) in trace.iter().enumerate() {
                for (i, &p) in cb.iter().enumerate() {
                    c.cc.0 += usize::from((p >= THRESHOLD) == s.truth(t, i));
                    c.cc.1 += 1;
                }
                c.nsp.0 += usize::from(run.beliefs[t].argmax() == s.states[t]);
                c.nsp.1 += 1;
                c.mass = (c.mass.0.min(run.masses[t]), c.mass.1.max(run.masses[t]));
            }
            c.sc = usize::from((run.acceptance >= THRESHOLD) == (s.label == 1));
            c.loss = semantic_loss(&[run.acceptance], &[s.label])?;
            Ok(c)
        })
        .collect::<Result<_>>()?;

    let mut tot = Counts {
        mass: (f64::INFINITY, f64::NEG_INFINITY),
        ..Counts::default()
    };
    for c in &per_seq {
        tot.ic = (tot.ic.0 + c.ic.0, tot.ic.1 + c.ic.1);
        tot.cc = (tot.cc.0 + c.cc.0, tot.cc.1 + c.cc.1);
        tot.nsp = (tot.nsp.0 + c.nsp.0, tot.nsp.1 + c.nsp.1);
        tot.sc += c.sc;
        tot.loss += c.loss;
        tot.mass = (tot.mass.0.min(c.mass.0), tot.mass.1.max(c.mass.1));
    }

    let n = samples.len();
    let ic_acc = (oracle.target == OracleTarget::Ic).then(|| frac(tot.ic));
    let (cc_acc, nsp_acc, sc_acc) = (frac(tot.cc), frac(tot.nsp), tot.sc as f64 / n as f64);
    let present: Vec<f64> = ic_acc.into_iter().chain([cc_acc, nsp_acc, sc_acc]).collect();
    let avg_acc = present.iter().sum::<f64>() / present.len() as f64;
    let mp = mp_baselines(ds).ok();
    Ok(Evaluation {
        metrics: Metrics {
            ic_acc,
            cc_acc,
            nsp_acc,
            sc_acc,
            avg_acc,
            mp_successor: mp.map(|m| m.0),
            mp_sequence: mp.map(|m| m.1),
        },
        semantic_loss: tot.loss / n as f64,
        calibration,
        mass_range: tot.mass,
        sequences: n,
    })
}
