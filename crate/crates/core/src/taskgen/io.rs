use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::compile::compile_task;
use super::generate::{count_violations, Dataset, SequenceSample, Split};
use super::spec::TaskSpec;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    spec: TaskSpec,
    spec_hash: String,
    seed: u64,
    generator_version: String,
    image_epoch: Option<u64>,
    counts: HashMap<String, usize>,
    dfa: serde_json::Value,
}

/// Path of the JSON metadata written next to a dataset CSV.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes one CSV row per time step plus the JSON sidecar.
pub fn write_dataset(ds: &Dataset, csv_path: &Path) -> Result<()> {
    let task = compile_task(&ds.spec)?;
    let vars = task.variables();
    let atoms = task.atoms();

    let mut w = csv::Writer::from_path(csv_path)?;
    let mut header = vec!["split".to_string(), "seq_id".into(), "t".into()];
    header.extend(vars.iter().map(|v| format!("{}_label", v.name)));
    header.extend(vars.iter().map(|v| format!("{}_index", v.name)));
    header.extend(atoms.iter().map(|a| format!("{a}_truth")));
    header.extend(["state_after".into(), "seq_label".into()]);
    w.write_record(&header)?;

    for (split, s) in ds.samples() {
        for t in 0..s.len() {
            let mut row = vec![split.as_str().to_string(), s.seq_id.to_string(), t.to_string()];
            for (v, &x) in vars.iter().zip(&s.values[t]) {
                let label = v.domain.label_of(x).ok_or_else(|| {
                    Error::domain(format!("value {x} of `{}` is outside its domain", v.name))
                })?;
                row.push(label.to_string());
            }
            for j in 0..vars.len() {
                row.push(s.image_indices.as_ref().map_or(String::new(), |ix| ix[t][j].to_string()));
            }
            for i in 0..atoms.len() {
                row.push(u8::from(s.truth(t, i)).to_string());
            }
            row.push(s.states[t].to_string());
            row.push(s.label.to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;

    let sidecar = Sidecar {
        spec: ds.spec.clone(),
        spec_hash: ds.spec_hash.clone(),
        seed: ds.seed,
        generator_version: ds.generator_version.clone(),
        image_epoch: ds.image_epoch,
        counts: Split::ALL
            .iter()
            .map(|s| (s.as_str().to_string(), ds.split(*s).len()))
            .collect(),
        dfa: serde_json::from_str(&task.dfa().to_json())?,
    };
    let mut text = serde_json::to_string_pretty(&sidecar)?;
    text.push('\n');
    fs::write(sidecar_path(csv_path), text)?;
    Ok(())
}

/// Reads a dataset written by [`write_dataset`]. With `verify`, the stored
/// spec hash must match the spec and every sample must replay correctly.
pub fn read_dataset(csv_path: &Path, verify: bool) -> Result<Dataset> {
    let side_path = sidecar_path(csv_path);
    let side_text = fs::read_to_string(&side_path)?;
    let side: Sidecar = serde_json::from_str(&side_text).map_err(|e| Error::Parse {
        location: format!("{}:{}:{}", side_path.display(), e.line(), e.column()),
        message: e.to_string(),
    })?;
    if verify && side.spec.hash() != side.spec_hash {
        return Err(Error::Integrity(format!(
            "spec hash mismatch: stored {}, computed {}",
            side.spec_hash,
            side.spec.hash()
        )));
    }
    let resolved = side.spec.resolve()?;
    let vars = &resolved.variables;
    let atoms = side.spec.atoms();

    let mut rdr = csv::Reader::from_path(csv_path)?;
    let headers = rdr.headers()?.clone();
    let loc = |line: u64| format!("{}:{}", csv_path.display(), line);
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            location: loc(1),
            message: format!("missing column `{name}`"),
        })
    };
    let c_split = col("split")?;
    let c_seq = col("seq_id")?;
    let c_t = col("t")?;
    let c_label: Vec<usize> = vars.iter().map(|v| col(&format!("{}_label", v.name))).collect::<Result<_>>()?;
    let c_index: Vec<usize> = vars.iter().map(|v| col(&format!("{}_index", v.name))).collect::<Result<_>>()?;
    let c_truth: Vec<usize> = atoms.iter().map(|a| col(&format!("{a}_truth"))).collect::<Result<_>>()?;
    let c_state = col("state_after")?;
    let c_seq_label = col("seq_label")?;

    let mut splits: [Vec<SequenceSample>; 3] = Default::default();
    let mut with_images = None;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |m: String| Error::Parse {
            location: loc(line),
            message: m,
        };
        let field = |c: usize| rec.get(c).ok_or_else(|| bad(format!("missing field {}", c + 1)));
        let num = |c: usize| -> Result<u64> {
            let f = field(c)?;
            f.parse().map_err(|_| bad(format!("`{f}` is not a non-negative integer")))
        };

        let split_name = field(c_split)?;
        let split = Split::parse(split_name).ok_or_else(|| bad(format!("unknown split `{split_name}`")))?;
        let seq_id = num(c_seq)? as usize;
        let t = num(c_t)? as usize;
        let seq_label = num(c_seq_label)?;
        if seq_label > 1 {
            return Err(bad(format!("sequence label {seq_label} is not 0 or 1")));
        }

        let samples = &mut splits[split.index()];
        if t == 0 {
            samples.push(SequenceSample {
                seq_id,
                values: vec![],
                letters: vec![],
                states: vec![],
                label: seq_label as u8,
                image_indices: None,
            });
        }
        let s = match samples.last_mut() {
            Some(s) if s.seq_id == seq_id && s.len() == t && s.label == seq_label as u8 => s,
            _ => return Err(bad(format!("row is out of order for sequence {seq_id}, step {t}"))),
        };

        let mut values = Vec::with_capacity(vars.len());
        for (v, &c) in vars.iter().zip(&c_label) {
            let label = field(c)?;
            values.push(
                v.domain
                    .value_of(label)
                    .ok_or_else(|| bad(format!("`{label}` is not a class of `{}`", v.name)))?,
            );
        }
        let raw_idx: Vec<&str> = c_index.iter().map(|&c| field(c)).collect::<Result<_>>()?;
        let has = raw_idx.iter().all(|x| !x.is_empty());
        if !has && raw_idx.iter().any(|x| !x.is_empty()) {
            return Err(bad("image indices must be all present or all empty".into()));
        }
        if *with_images.get_or_insert(has) != has {
            return Err(bad("image indices must be all present or all empty".into()));
        }
        if has {
            let idx = c_index.iter().map(|&c| num(c)).collect::<Result<Vec<_>>>()?;
            s.image_indices.get_or_insert_with(Vec::new).push(idx);
        }
        let mut letter = 0;
        for (i, &c) in c_truth.iter().enumerate() {
            match field(c)? {
                "0" => {}
                "1" => letter |= 1 << i,
                other => return Err(bad(format!("truth value `{other}` is not 0 or 1"))),
            }
        }
        s.values.push(values);
        s.letters.push(letter);
        s.states.push(num(c_state)? as usize);
    }

    for split in Split::ALL {
        let want = side.counts.get(split.as_str()).copied().unwrap_or(0);
        if splits[split.index()].len() != want {
            return Err(Error::Integrity(format!(
                "{} split has {} sequences, metadata says {want}",
                split.as_str(),
                splits[split.index()].len()
            )));
        }
    }

    let ds = Dataset {
        spec: side.spec,
        spec_hash: side.spec_hash,
        seed: side.seed,
        generator_version: side.generator_version,
        image_epoch: side.image_epoch,
        splits,
    };
    if verify {
        let task = compile_task(&ds.spec)?;
        let bad = count_violations(&task, &ds);
        if bad > 0 {
            return Err(Error::Integrity(format!("{bad} sequences fail DFA replay")));
        }
    }
    Ok(ds)
}
