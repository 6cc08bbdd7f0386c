use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which stages the oracle replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OracleTarget {
    /// Per-variable label distributions, pushed through the constraints.
    #[serde(rename = "IC")]
    Ic,
    /// Constraint truth values directly.
    #[serde(rename = "IC+CC")]
    IcCc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Perfect,
    Flip,
    Confidence,
}

impl OracleTarget {
    pub const ALL: [OracleTarget; 2] = [OracleTarget::Ic, OracleTarget::IcCc];

    pub fn as_str(self) -> &'static str {
        match self {
            OracleTarget::Ic => "IC",
            OracleTarget::IcCc => "IC+CC",
        }
    }
}

impl OracleKind {
    pub const ALL: [OracleKind; 3] = [OracleKind::Perfect, OracleKind::Flip, OracleKind::Confidence];

    pub fn as_str(self) -> &'static str {
        match self {
            OracleKind::Perfect => "perfect",
            OracleKind::Flip => "flip",
            OracleKind::Confidence => "confidence",
        }
    }
}

impl fmt::Display for OracleTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OracleTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ic" => Ok(OracleTarget::Ic),
            "ic+cc" | "ic-cc" | "iccc" => Ok(OracleTarget::IcCc),
            _ => Err(Error::domain(format!("unknown oracle target `{s}`; valid targets: IC, IC+CC"))),
        }
    }
}

impl FromStr for OracleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OracleKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| {
            Error::domain(format!("unknown oracle `{s}`; valid oracles: perfect, flip, confidence"))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub target: OracleTarget,
    pub kind: OracleKind,
    pub p: f64,
    pub seed: u64,
}

impl OracleConfig {
    pub fn new(target: OracleTarget, kind: OracleKind, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("oracle noise {p} outside [0, 1]")));
        }
        if kind == OracleKind::Perfect && p != 0.0 {
            return Err(Error::domain("the perfect oracle requires p = 0"));
        }
        Ok(OracleConfig { target, kind, p, seed })
    }

    pub fn perfect(target: OracleTarget) -> Self {
        OracleConfig {
            target,
            kind: OracleKind::Perfect,
            p: 0.0,
            seed: 0,
        }
    }

    /// Noisy distribution over `k` classes for the true class `label`.
    pub fn sample<R: Rng + ?Sized>(&self, label: usize, k: usize, rng: &mut R) -> Vec<f64> {
        match self.kind {
            OracleKind::Perfect => one_hot(k, label),
            OracleKind::Flip => flip_oracle(label, k, self.p, rng),
            OracleKind::Confidence => confidence_oracle(label, k, self.p, rng),
        }
    }
}

fn one_hot(k: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[i] = 1.0;
    v
}

/// One-hot at the true label with probability `1 − p`, otherwise one-hot at
/// a label drawn uniformly from all `k`. Always consumes two draws, so runs
/// at different `p` share random numbers and corrupt nested sets of slots.
pub fn flip_oracle<R: Rng + ?Sized>(label: usize, k: usize, p: f64, rng: &mut R) -> Vec<f64> {
    let u: f64 = rng.gen();
    let other = rng.gen_range(0..k);
    one_hot(k, if u < p { other } else { label })
}

/// Mass `m ~ U[1 − p, 1]` on the true label, `(1 − m)/(k − 1)` elsewhere.
pub fn confidence_oracle<R: Rng + ?Sized>(label: usize, k: usize, p: f64, rng: &mut R) -> Vec<f64> {
    let u: f64 = rng.gen();
    let m = 1.0 - p * u;
    let rest = if k > 1 { (1.0 - m) / (k - 1) as f64 } else { 0.0 };
    let mut v = vec![rest; k];
    v[label] = m;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::argmax;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_oracles_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(flip_oracle(3, 10, 0.0, &mut rng), one_hot(10, 3));
            assert_eq!(confidence_oracle(3, 10, 0.0, &mut rng), one_hot(10, 3));
        }
    }

    #[test]
    fn flip_uniform_at_full_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let mut counts = [0usize; 10];
        for _ in 0..n {
            counts[argmax(&flip_oracle(0, 10, 1.0, &mut rng))] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.1).abs() < 0.01);
        }
    }

    #[test]
    fn flip_accuracy_matches_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (n, k, p) = (100_000, 10, 0.2);
        let hits = (0..n).filter(|_| argmax(&flip_oracle(4, k, p, &mut rng)) == 4).count();
        let want = 1.0 - p + p / k as f64;
        let sigma = (want * (1.0 - want) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - want).abs() < 3.0 * sigma);
    }

    #[test]
    fn confidence_bounds_and_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100_000 {
            let d = confidence_oracle(7, 10, 0.2, &mut rng);
            assert!(d[7] >= 0.8);
            assert!(d.iter().enumerate().all(|(i, &x)| i == 7 || x <= 0.2 / 9.0 + 1e-15));
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(argmax(&d), 7);
        }
        for _ in 0..100_000 {
            assert_eq!(argmax(&confidence_oracle(2, 10, 0.5, &mut rng)), 2);
        }
    }

    #[test]
    fn config_validation() {
        assert!(OracleConfig::new(OracleTarget::Ic, OracleKind::Perfect, 0.1, 0).is_err());
        assert!(OracleConfig::new(OracleTarget::Ic, OracleKind::Flip, 1.5, 0).is_err());
        assert!(OracleConfig::new(OracleTarget::IcCc, OracleKind::Flip, 0.2, 0).is_ok());
        assert_eq!("IC+CC".parse::<OracleTarget>().unwrap(), OracleTarget::IcCc);
        assert!("noisy".parse::<OracleKind>().is_err());
    }
}
