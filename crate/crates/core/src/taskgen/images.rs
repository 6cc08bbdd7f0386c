use std::collections::BTreeMap;
use std::path::Path;

use super::generate::{derive_seed, Dataset, Split};
use crate::error::{Error, Result};

/// Image index pools per (pool, source, class label). Train and val draw
/// from the training pool; test draws from the test pool.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImagePools {
    pools: BTreeMap<(bool, String, String), Vec<u64>>,
}

fn is_test(split: Split) -> bool {
    split == Split::Test
}

impl ImagePools {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `indices` to the pool used by `split` for `(source, label)`.
    pub fn insert(&mut self, split: Split, source: &str, label: &str, indices: impl IntoIterator<Item = u64>) {
        self.pools
            .entry((is_test(split), source.to_string(), label.to_string()))
            .or_default()
            .extend(indices);
    }

    pub fn get(&self, split: Split, source: &str, label: &str) -> Option<&[u64]> {
        self.pools
            .get(&(is_test(split), source.to_string(), label.to_string()))
            .map(Vec::as_slice)
            .filter(|p| !p.is_empty())
    }

    /// Reads a CSV with columns `split,source,label,index`; `split` is
    /// `train` or `test`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut pools = ImagePools::new();
        for (i, rec) in rdr.deserialize::<(String, String, String, u64)>().enumerate() {
            let (split, source, label, index) = rec?;
            let split = match split.as_str() {
                "train" | "val" => Split::Train,
                "test" => Split::Test,
                other => {
                    return Err(Error::Parse {
                        location: format!("{}: record {}", path.display(), i + 1),
                        message: format!("unknown pool split `{other}`"),
                    })
                }
            };
            pools.insert(split, &source, &label, [index]);
        }
        Ok(pools)
    }
}

/// Assigns every variable of every step an image index drawn from the
/// pool of its class, keyed by (seed, split, sequence, step, variable,
/// epoch). Class labels are unchanged.
pub fn attach_image_indices(ds: &Dataset, pools: &ImagePools, epoch: u64) -> Result<Dataset> {
    let vars = ds.spec.resolve()?.variables;
    let mut out = ds.clone();
    out.image_epoch = Some(epoch);
    for split in Split::ALL {
        for s in &mut out.splits[split.index()] {
            let mut indices = Vec::with_capacity(s.len());
            for (t, row) in s.values.iter().enumerate() {
                let mut step = Vec::with_capacity(row.len());
                for (j, (&v, var)) in row.iter().zip(&vars).enumerate() {
                    let label = var.domain.label_of(v).ok_or_else(|| {
                        Error::domain(format!("value {v} of `{}` is outside its domain", var.name))
                    })?;
                    let source = var.source.as_deref().unwrap_or("");
                    let pool = pools.get(split, source, label).ok_or_else(|| {
                        Error::domain(format!(
                            "no {} image pool for class `{label}` (source `{source}`)",
                            if is_test(split) { "test" } else { "train" }
                        ))
                    })?;
                    let h = derive_seed(&[ds.seed, split.index() as u64, s.seq_id as u64, t as u64, j as u64, epoch]);
                    step.push(pool[(h % pool.len() as u64) as usize]);
                }
                indices.push(step);
            }
            s.image_indices = Some(indices);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taskgen::{builtin_task, generate_dataset};

    fn small() -> Dataset {
        let mut spec = builtin_task("task6").unwrap();
        spec.splits.train = 20;
        spec.splits.val = 5;
        spec.splits.test = 5;
        generate_dataset(&spec).unwrap()
    }

    fn pools(size: u64) -> ImagePools {
        let mut p = ImagePools::new();
        for c in 0..10u64 {
            p.insert(Split::Train, "mnist", &c.to_string(), (0..size).map(|i| c * 1000 + i));
            p.insert(Split::Test, "mnist", &c.to_string(), (0..size).map(|i| 100_000 + c * 1000 + i));
        }
        p
    }

    #[test]
    fn epochs_resample_indices_only() {
        let ds = small();
        let a = attach_image_indices(&ds, &pools(50), 0).unwrap();
        let b = attach_image_indices(&ds, &pools(50), 1).unwrap();
        assert_ne!(a.splits, b.splits);
        for (x, y) in a.samples().zip(b.samples()) {
            assert_eq!(x.1.values, y.1.values);
        }
        assert_eq!(a, attach_image_indices(&ds, &pools(50), 0).unwrap());
    }

    #[test]
    fn singleton_pools_and_test_split() {
        let ds = attach_image_indices(&small(), &pools(1), 3).unwrap();
        for (split, s) in ds.samples() {
            for (row, idx) in s.values.iter().zip(s.image_indices.as_ref().unwrap()) {
                for (&v, &i) in row.iter().zip(idx) {
                    let base = if split == Split::Test { 100_000 } else { 0 };
                    assert_eq!(i, base + v as u64 * 1000);
                }
            }
        }
    }

    #[test]
    fn missing_pool_names_class() {
        let mut p = pools(3);
        p.pools.retain(|k, _| k.2 != "0");
        match attach_image_indices(&small(), &p, 0) {
            Err(Error::Domain(msg)) => assert!(msg.contains("`0`"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }
}
