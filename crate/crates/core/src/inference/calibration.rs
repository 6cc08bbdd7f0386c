use serde::Serialize;

use crate::error::{Error, Result};

/// Clamp applied to probabilities before taking logits or logs.
pub const EPSILON: f64 = 1e-7;

const LOG_TEMP_RANGE: (f64, f64) = (-5.0, 5.0);
const SEARCH_TOLERANCE: f64 = 1e-7;

fn check_temp(temp: f64) -> Result<()> {
    if temp > 0.0 && temp.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("temperature must be positive, got {temp}")))
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(EPSILON, 1.0 - EPSILON);
    (p / (1.0 - p)).ln()
}

/// `σ(σ⁻¹(p) / temp)` with `p` clamped to `[ε, 1 − ε]`.
pub fn apply_temperature(p: f64, temp: f64) -> Result<f64> {
    check_temp(temp)?;
    Ok(sigmoid(logit(p) / temp))
}

/// `softmax(log(b) / temp)` with entries clamped below at `ε`.
pub fn apply_temperature_vector(b: &[f64], temp: f64) -> Result<Vec<f64>> {
    check_temp(temp)?;
    if b.is_empty() {
        return Err(Error::domain("empty belief vector"));
    }
    let z: Vec<f64> = b.iter().map(|&x| x.max(EPSILON).ln() / temp).collect();
    let hi = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|x| (x - hi).exp()).collect();
    let sum: f64 = e.iter().sum();
    Ok(e.into_iter().map(|x| x / sum).collect())
}

/// Fitted temperature. `degenerate` is set when the likelihood does not
/// depend on the temperature (every logit is zero); the temperature is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub temperature: f64,
    pub nll: f64,
    pub degenerate: bool,
}

/// Mean negative log-likelihood of `(prob, truth)` pairs at `temp`.
pub fn calibration_nll(values: &[(f64, bool)], temp: f64) -> f64 {
    let sum: f64 = values
        .iter()
        .map(|&(p, y)| {
            let z = logit(p) / temp;
            // -log σ(z) = softplus(-z)
            let s = if y { -z } else { z };
            s.max(0.0) + (-s.abs()).exp().ln_1p()
        })
        .sum();
    sum / values.len() as f64
}

/// Golden-section search for the NLL-minimizing temperature over
/// `log temp ∈ [−5, 5]`.
pub fn calibrate_temperature(values: &[(f64, bool)]) -> Result<Calibration> {
    if values.is_empty() {
        return Err(Error::domain("calibration needs at least one sample"));
    }
    if let Some(&(p, _)) = values.iter().find(|(p, _)| !(0.0..=1.0).contains(p)) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    if values.iter().all(|&(p, _)| logit(p) == 0.0) {
        return Ok(Calibration {
            temperature: 1.0,
            nll: calibration_nll(values, 1.0),
            degenerate: true,
        });
    }
    let f = |lt: f64| calibration_nll(values, lt.exp());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = LOG_TEMP_RANGE;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > SEARCH_TOLERANCE {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let lt = (a + b) / 2.0;
    Ok(Calibration {
        temperature: lt.exp(),
        nll: f(lt),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::argmax;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scalar_values() {
        assert!((apply_temperature(0.9, 2.0).unwrap() - 0.75).abs() < 1e-12);
        for p in [0.01, 0.3, 0.5, 0.77] {
            assert!((apply_temperature(p, 1.0).unwrap() - p).abs() < 1e-12);
        }
        assert!((apply_temperature(0.99, 1e6).unwrap() - 0.5).abs() < 1e-5);
        assert!(apply_temperature(0.5, 0.0).is_err());
        assert!(apply_temperature(0.5, -1.0).is_err());
        // boundary inputs are clamped
        assert!(apply_temperature(1.0, 1.0).unwrap() < 1.0);
    }

    #[test]
    fn vector_limits() {
        let b = [0.7, 0.2, 0.1];
        let same = apply_temperature_vector(&b, 1.0).unwrap();
        for (x, y) in same.iter().zip(b) {
            assert!((x - y).abs() < 1e-12);
        }
        for x in apply_temperature_vector(&b, 1e6).unwrap() {
            assert!((x - 1.0 / 3.0).abs() < 1e-5);
        }
    }

    #[test]
    fn argmax_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let n = rng.gen_range(2..9);
            let mut b: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let z: f64 = b.iter().sum();
            b.iter_mut().for_each(|x| *x /= z);
            for t in [0.1, 0.5, 2.0, 10.0] {
                assert_eq!(argmax(&apply_temperature_vector(&b, t).unwrap()), argmax(&b));
            }
        }
    }

    #[test]
    fn underconfident_predictions_sharpen() {
        let values = vec![(0.6, true); 50];
        let c = calibrate_temperature(&values).unwrap();
        assert!(c.temperature < 1.0);
        // grid scan agrees with the search
        let best = (-500..=500)
            .map(|i| f64::from(i) / 100.0)
            .min_by(|a, b| calibration_nll(&values, a.exp()).total_cmp(&calibration_nll(&values, b.exp())))
            .unwrap();
        assert!((c.temperature.ln() - best).abs() < 0.02);
    }

    #[test]
    fn confident_correct_predictions() {
        let values: Vec<(f64, bool)> = (0..20).map(|i| if i % 2 == 0 { (0.99, true) } else { (0.01, false) }).collect();
        let c = calibrate_temperature(&values).unwrap();
        assert!(c.nll <= calibration_nll(&values, 1.0));
        assert!(c.temperature <= 1.0);
    }

    #[test]
    fn refit_is_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let values: Vec<(f64, bool)> = (0..400)
            .map(|_| {
                let q: f64 = rng.gen();
                (0.5 + (q - 0.5) * 0.6, rng.gen::<f64>() < q)
            })
            .collect();
        let c = calibrate_temperature(&values).unwrap();
        let calibrated: Vec<(f64, bool)> = values
            .iter()
            .map(|&(p, y)| (apply_temperature(p, c.temperature).unwrap(), y))
            .collect();
        let again = calibrate_temperature(&calibrated).unwrap();
        assert!((again.temperature - 1.0).abs() < 1e-3, "{}", again.temperature);
    }

    #[test]
    fn degenerate_inputs() {
        let c = calibrate_temperature(&[(0.5, true), (0.5, false)]).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.temperature, 1.0);
        assert!(calibrate_temperature(&[]).is_err());
    }
}
