use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::compile::{compile_task, CompiledTask};
use super::spec::TaskSpec;
use crate::automata::{Letter, StateId};
use crate::error::{Error, Result};

pub const GENERATOR_VERSION: &str = concat!("ltlzinc-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn parse(s: &str) -> Option<Split> {
        Split::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic seed derived from an ordered tuple of integers.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6C74_6C7A_696E_6321, |h, &p| mix(h ^ mix(p)))
}

pub fn sequence_rng(seed: u64, split: Split, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(&[seed, split.index() as u64, index as u64]))
}

/// One annotated sequence. `values[t][j]` is variable `j`'s integer value
/// at step `t`; `states[t]` is the DFA state after step `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSample {
    pub seq_id: usize,
    pub values: Vec<Vec<i64>>,
    pub letters: Vec<Letter>,
    pub states: Vec<StateId>,
    pub label: u8,
    pub image_indices: Option<Vec<Vec<u64>>>,
}

impl SequenceSample {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Truth of atom `i` at step `t`.
    pub fn truth(&self, t: usize, i: usize) -> bool {
        self.letters[t] >> i & 1 == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub spec: TaskSpec,
    pub spec_hash: String,
    pub seed: u64,
    pub generator_version: String,
    pub image_epoch: Option<u64>,
    pub splits: [Vec<SequenceSample>; 3],
}

impl Dataset {
    pub fn split(&self, s: Split) -> &[SequenceSample] {
        &self.splits[s.index()]
    }

    pub fn samples(&self) -> impl Iterator<Item = (Split, &SequenceSample)> {
        Split::ALL
            .into_iter()
            .flat_map(move |s| self.splits[s.index()].iter().map(move |x| (s, x)))
    }
}

/// Number of positives in a split of size `n`.
pub fn positive_count(n: usize, ratio: f64) -> usize {
    ((n as f64 * ratio).round() as usize).min(n)
}

/// Random walk of `length` steps ending accepting iff `label == 1`: each
/// step picks uniformly among usable letters that keep the target outcome
/// reachable, then a uniform concrete assignment for that letter.
pub fn generate_sequence<R: Rng + ?Sized>(
    task: &CompiledTask,
    label: u8,
    length: usize,
    rng: &mut R,
) -> Result<SequenceSample> {
    if length == 0 || !task.reachable(label, length, 0) {
        return Err(Error::domain(format!(
            "no sequence with label {label} and length {length} exists"
        )));
    }
    let dfa = task.dfa();
    let mut state = dfa.initial();
    let mut sample = SequenceSample {
        seq_id: 0,
        values: Vec::with_capacity(length),
        letters: Vec::with_capacity(length),
        states: Vec::with_capacity(length),
        label,
        image_indices: None,
    };
    for t in 0..length {
        let remaining = length - t - 1;
        let choices: Vec<Letter> = task
            .usable_letters()
            .iter()
            .copied()
            .filter(|&l| task.reachable(label, remaining, dfa.next(state, l)))
            .collect();
        let letter = *choices.choose(rng).expect("reachability guarantees a choice");
        let values = task.solutions().sample_values(letter, rng)?.to_vec();
        state = dfa.next(state, letter);
        sample.values.push(values);
        sample.letters.push(letter);
        sample.states.push(state);
    }
    debug_assert_eq!(dfa.is_accepting(state), label == 1);
    Ok(sample)
}

pub fn generate_dataset(spec: &TaskSpec) -> Result<Dataset> {
    generate_dataset_compiled(&compile_task(spec)?)
}

/// Generates every split; sequences run in parallel with per-sequence
/// generators, so output does not depend on scheduling.
pub fn generate_dataset_compiled(task: &CompiledTask) -> Result<Dataset> {
    let spec = task.spec();
    let sizes = [spec.splits.train, spec.splits.val, spec.splits.test];
    let mut splits: [Vec<SequenceSample>; 3] = Default::default();
    for split in Split::ALL {
        let n = sizes[split.index()];
        let pos = positive_count(n, spec.positive_ratio);
        let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < pos)).collect();
        let mut shuffle_rng = ChaCha8Rng::seed_from_u64(derive_seed(&[spec.seed, split.index() as u64, u64::MAX]));
        labels.shuffle(&mut shuffle_rng);
        splits[split.index()] = labels
            .par_iter()
            .enumerate()
            .map(|(i, &label)| {
                let mut rng = sequence_rng(spec.seed, split, i);
                let length = rng.gen_range(spec.length.min..=spec.length.max);
                let mut s = generate_sequence(task, label, length, &mut rng)?;
                s.seq_id = i;
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(Dataset {
        spec: spec.clone(),
        spec_hash: spec.hash(),
        seed: spec.seed,
        generator_version: GENERATOR_VERSION.to_string(),
        image_epoch: None,
        splits,
    })
}

/// Checks replay, label/acceptance consistency and that stored letters
/// match the constraint values. Returns the number of violations.
pub fn count_violations(task: &CompiledTask, ds: &Dataset) -> usize {
    ds.samples()
        .filter(|(_, s)| {
            let replay = task.dfa().run(&s.letters).ok();
            let ok = !s.is_empty()
                && replay.as_deref() == Some(s.states.as_slice())
                && task.dfa().is_accepting(*s.states.last().unwrap()) == (s.label == 1)
                && s.values.iter().zip(&s.letters).all(|(v, &l)| task.letter_of_values(v) == l);
            !ok
        })
        .count()
}
