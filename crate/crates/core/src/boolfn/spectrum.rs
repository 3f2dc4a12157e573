use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{RealFunction, MAX_EXACT_BITS, MAX_EXHAUSTIVE_SUM_BITS};
use crate::bits::{sign_of_dot, Bits};
use crate::error::{Error, Result};

/// Coefficients smaller than this are treated as exact zeros in transformed spectra.
pub const ZERO_CUTOFF: f64 = 1e-12;

/// Sparse map from index strings to Fourier coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FourierSpectrum {
    m: usize,
    coeffs: BTreeMap<Bits, f64>,
}

impl FourierSpectrum {
    pub fn empty(m: usize) -> Self {
        FourierSpectrum {
            m,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn insert(&mut self, s: Bits, c: f64) {
        debug_assert_eq!(s.len(), self.m);
        self.coeffs.insert(s, c);
    }

    /// Coefficient at `s`; zero when absent.
    pub fn get(&self, s: &Bits) -> f64 {
        self.coeffs.get(s).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bits, f64)> {
        self.coeffs.iter().map(|(s, &c)| (s, c))
    }

    pub fn support(&self) -> Vec<Bits> {
        self.coeffs.keys().copied().collect()
    }

    /// Sum of squared coefficients.
    pub fn energy(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum()
    }

    /// Largest absolute entrywise difference over the union of supports.
    pub fn max_abs_diff(&self, other: &FourierSpectrum) -> f64 {
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .map(|s| (self.get(s) - other.get(s)).abs())
            .fold(0.0, f64::max)
    }
}

impl Serialize for FourierSpectrum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (s, c) in &self.coeffs {
            map.serialize_entry(&s.to_string(), c)?;
        }
        map.end()
    }
}

/// `2^{-m} sum_x f(x) (-1)^{s.x}` by direct summation.
pub fn fourier_coefficient_exact<F: RealFunction + ?Sized>(f: &F, s: &Bits) -> Result<f64> {
    let m = f.arity();
    if m > MAX_EXHAUSTIVE_SUM_BITS {
        return Err(Error::Capacity(format!(
            "exact Fourier coefficient needs m <= {MAX_EXHAUSTIVE_SUM_BITS}, got {m}"
        )));
    }
    if s.len() != m {
        return Err(Error::DimensionMismatch(format!("index {s} for an {m}-bit function")));
    }
    let total: f64 = (0..(1u64 << m))
        .map(|x| f.value(x) * sign_of_dot(s.value(), x))
        .sum();
    Ok(total * (-(m as f64)).exp2())
}

/// Unnormalised fast Walsh-Hadamard transform: `v[s] <- sum_x v[x] (-1)^{s.x}`.
pub fn wht_in_place(v: &mut [f64]) {
    let n = v.len();
    assert!(n.is_power_of_two(), "transform length must be a power of two");
    let mut h = 1;
    while h < n {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Full Fourier spectrum of `f` (m <= 20) with near-zero entries dropped.
pub fn wht_spectrum<F: RealFunction + ?Sized>(f: &F) -> Result<FourierSpectrum> {
    let m = f.arity();
    if m > MAX_EXACT_BITS {
        return Err(Error::Capacity(format!(
            "Walsh-Hadamard spectrum needs m <= {MAX_EXACT_BITS}, got {m}"
        )));
    }
    let mut vals: Vec<f64> = (0..(1u64 << m)).map(|x| f.value(x)).collect();
    wht_in_place(&mut vals);
    let scale = (-(m as f64)).exp2();
    let mut spec = FourierSpectrum::empty(m);
    for (s, v) in vals.into_iter().enumerate() {
        let c = v * scale;
        if c.abs() >= ZERO_CUTOFF {
            spec.insert(Bits::new(m, s as u64)?, c);
        }
    }
    Ok(spec)
}

/// Maximum Hamming weight over the support.
pub fn degree(spec: &FourierSpectrum) -> Result<usize> {
    spec.coeffs
        .keys()
        .map(Bits::weight)
        .max()
        .ok_or_else(|| Error::invalid("degree of the zero function is undefined"))
}

#[cfg(test)]
mod tests {
    use super::super::{BooleanFunction, Tabulated};
    use super::*;

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let parity = BooleanFunction::parity(3).unwrap();
        assert_eq!(fourier_coefficient_exact(&parity, &bits("111")).unwrap(), -0.5);
        assert_eq!(fourier_coefficient_exact(&parity, &bits("000")).unwrap(), 0.5);

        let zero = Tabulated::new(4, vec![0.0; 16]).unwrap();
        for s in 0..16 {
            assert_eq!(fourier_coefficient_exact(&zero, &Bits::new(4, s).unwrap()).unwrap(), 0.0);
        }

        // AND on two bits: (0 + 0 + 0 + 1 * (-1)^{11.11}) / 4
        let and = BooleanFunction::and(2).unwrap();
        assert_eq!(fourier_coefficient_exact(&and, &bits("11")).unwrap(), 0.25);
    }

    #[test]
    fn coefficient_capacity() {
        let f = BooleanFunction::parity(25).unwrap();
        assert!(matches!(
            fourier_coefficient_exact(&f, &Bits::zeros(25)),
            Err(Error::Capacity(_))
        ));
        assert!(matches!(wht_spectrum(&BooleanFunction::parity(21).unwrap()), Err(Error::Capacity(_))));
    }

    #[test]
    fn spectrum_examples() {
        let spec = wht_spectrum(&BooleanFunction::parity(2).unwrap()).unwrap();
        assert_eq!(spec.len(), 2);
        assert_eq!(spec.get(&bits("00")), 0.5);
        assert_eq!(spec.get(&bits("11")), -0.5);

        let one = Tabulated::new(3, vec![1.0; 8]).unwrap();
        let spec = wht_spectrum(&one).unwrap();
        assert_eq!(spec.support(), vec![bits("000")]);
        assert_eq!(spec.get(&bits("000")), 1.0);

        let spec = wht_spectrum(&BooleanFunction::and(2).unwrap()).unwrap();
        for (s, want) in [("00", 0.25), ("01", -0.25), ("10", -0.25), ("11", 0.25)] {
            assert_eq!(spec.get(&bits(s)), want);
        }
    }

    #[test]
    fn inner_product_spectrum() {
        let h = BooleanFunction::inner_product(bits("101")).unwrap();
        let spec = wht_spectrum(&h).unwrap();
        assert_eq!(spec.support(), vec![bits("000"), bits("101")]);
        assert_eq!(spec.get(&bits("101")), -0.5);
    }

    #[test]
    fn transform_agrees_with_direct_sum() {
        let vals: Vec<f64> = (0..32).map(|i| ((i * 7 + 3) % 11) as f64 - 4.0).collect();
        let f = Tabulated::new(5, vals).unwrap();
        let spec = wht_spectrum(&f).unwrap();
        for s in 0..32 {
            let s = Bits::new(5, s).unwrap();
            assert!((spec.get(&s) - fourier_coefficient_exact(&f, &s).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_examples() {
        let spec = wht_spectrum(&BooleanFunction::parity(5).unwrap()).unwrap();
        assert_eq!(degree(&spec).unwrap(), 5);
        let spec = wht_spectrum(&Tabulated::new(3, vec![1.0; 8]).unwrap()).unwrap();
        assert_eq!(degree(&spec).unwrap(), 0);
        let spec = wht_spectrum(&BooleanFunction::and(2).unwrap()).unwrap();
        assert_eq!(degree(&spec).unwrap(), 2);
        assert!(degree(&FourierSpectrum::empty(3)).is_err());
    }
}
