use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::SignedFunction;
use crate::bits::{dot, low_mask, Bits};
use crate::error::{Error, Result};
use crate::rng::{self, Op};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoefficientEstimate {
    pub value: f64,
    pub samples: u64,
}

/// `K = ceil(4 q^2 ln(2/delta))` with `q = 1/accuracy`: the Chernoff-Hoeffding
/// count for `|A - g^(s)| <= 1/q` with probability at least `1 - delta`.
pub fn coefficient_sample_count(accuracy: f64, delta: f64) -> u64 {
    let k = 4.0 * (2.0 / delta).ln() / (accuracy * accuracy);
    if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        k.ceil() as u64
    }
}

/// Empirical mean of `g(x) (-1)^{s.x}` over uniform `x`.
pub fn estimate_fourier_coefficient(
    g: &SignedFunction,
    s: &Bits,
    accuracy: f64,
    delta: f64,
    seed: u64,
) -> Result<CoefficientEstimate> {
    if !(accuracy > 0.0 && accuracy <= 1.0) {
        return Err(Error::invalid(format!("accuracy {accuracy} not in (0, 1]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta {delta} not in (0, 1)")));
    }
    let m = g.m();
    if s.len() != m {
        return Err(Error::DimensionMismatch(format!("index {s} for an {m}-bit function")));
    }
    let samples = coefficient_sample_count(accuracy, delta);
    let item = rng::derive(m as u64, &[s.value()]);
    let mask = low_mask(m);
    let sv = s.value();
    let partial: Vec<i64> = rng::chunks(samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(chunk, count)| {
            let mut r = rng::stream(seed, Op::Coefficient, item, chunk);
            let mut acc = 0i64;
            for _ in 0..count {
                let x = r.random::<u64>() & mask;
                let v = g.eval(x);
                acc += if dot(sv, x) == 0 { v } else { -v } as i64;
            }
            acc
        })
        .collect();
    let total: i64 = partial.iter().sum();
    Ok(CoefficientEstimate {
        value: total as f64 / samples as f64,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{lift_to_signed, BooleanFunction};
    use super::*;

    #[test]
    fn sample_count_formula() {
        // q = 10, delta = 1e-6: 4 * 100 * ln(2e6)
        assert_eq!(coefficient_sample_count(0.1, 1e-6), (400.0 * (2e6f64).ln()).ceil() as u64);
    }

    #[test]
    fn character_coefficient_is_one() {
        let s: Bits = "1011".parse().unwrap();
        let g = lift_to_signed(&BooleanFunction::inner_product(s).unwrap());
        let est = estimate_fourier_coefficient(&g, &s, 0.1, 1e-6, 3).unwrap();
        // every sample equals (-1)^{s.x} (-1)^{s.x} = 1
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn constant_minus_one() {
        let g = lift_to_signed(&BooleanFunction::constant_one(5).unwrap());
        let est = estimate_fourier_coefficient(&g, &Bits::zeros(5), 0.2, 0.01, 9).unwrap();
        assert_eq!(est.value, -1.0);
    }

    #[test]
    fn and_zero_coefficient() {
        let g = lift_to_signed(&BooleanFunction::and(2).unwrap());
        let est = estimate_fourier_coefficient(&g, &Bits::zeros(2), 0.1, 1e-3, 11).unwrap();
        assert!((est.value - 0.5).abs() <= 0.1);
    }

    #[test]
    fn deterministic_under_seed() {
        let g = lift_to_signed(&BooleanFunction::and(3).unwrap());
        let s: Bits = "110".parse().unwrap();
        let a = estimate_fourier_coefficient(&g, &s, 0.01, 0.05, 42).unwrap();
        let b = estimate_fourier_coefficient(&g, &s, 0.01, 0.05, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.samples > rng::CHUNK);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = lift_to_signed(&BooleanFunction::parity(2).unwrap());
        let s = Bits::zeros(2);
        assert!(estimate_fourier_coefficient(&g, &s, 0.0, 0.1, 0).is_err());
        assert!(estimate_fourier_coefficient(&g, &s, 0.1, 1.0, 0).is_err());
        assert!(estimate_fourier_coefficient(&g, &Bits::zeros(3), 0.1, 0.1, 0).is_err());
    }
}
