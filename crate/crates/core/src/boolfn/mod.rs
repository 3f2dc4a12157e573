//! Boolean post-processing functions and their Fourier analysis.
//!
//! A [`BooleanFunction`] is an `m`-bit predicate `f: {0,1}^m -> {0,1}` with a
//! declared bound on its Fourier sparsity. Its signed lift
//! `g(x) = (-1)^{f(x)} = 1 - 2 f(x)` is a [`SignedFunction`]; the simulator
//! works with the spectrum of `g`, which relates to that of `f` by
//! `g^(0) = 1 - 2 f^(0)` and `g^(s) = -2 f^(s)` for `s != 0`.
//!
//! Fourier coefficients use the normalisation
//! `f^(s) = 2^{-m} sum_x f(x) (-1)^{s.x}`.

mod estimate;
mod format;
mod km;
mod spectrum;

pub use estimate::{coefficient_sample_count, estimate_fourier_coefficient, CoefficientEstimate};
pub use format::{parse_function, render_function};
pub use km::{km_significant_set, km_weight_budget, KmMode, KmOutcome, KmParams};
pub use spectrum::{degree, fourier_coefficient_exact, wht_in_place, wht_spectrum, FourierSpectrum, ZERO_CUTOFF};

use crate::bits::{bit_of, low_mask, Bits};
use crate::error::{Error, Result};

/// Largest `m` for which functions are tabulated and transformed exhaustively.
pub const MAX_EXACT_BITS: usize = 20;
/// Largest `m` for the single-coefficient exhaustive sum.
pub const MAX_EXHAUSTIVE_SUM_BITS: usize = 24;

/// A real-valued function on `m`-bit strings.
pub trait RealFunction: Sync {
    fn arity(&self) -> usize;
    fn value(&self, x: u64) -> f64;
}

/// Real function given by its full table, indexed by packed input.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabulated {
    m: usize,
    values: Vec<f64>,
}

impl Tabulated {
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 || m > MAX_EXHAUSTIVE_SUM_BITS {
            return Err(Error::Capacity(format!("tabulated function on {m} bits")));
        }
        if values.len() != 1usize << m {
            return Err(Error::DimensionMismatch(format!(
                "table of length {} for m = {m}",
                values.len()
            )));
        }
        Ok(Tabulated { m, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl RealFunction for Tabulated {
    fn arity(&self) -> usize {
        self.m
    }

    fn value(&self, x: u64) -> f64 {
        self.values[x as usize]
    }
}

/// How a function is represented; also its serialisation tag.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Parity,
    InnerProduct { s: Bits },
    And,
    /// Depends only on `vars`; `table` is indexed with `vars[0]` as the most significant bit.
    Junta { vars: Vec<usize>, table: Vec<bool> },
    TruthTable { table: Vec<bool> },
    /// `f(x) = sum_s c_s (-1)^{s.x}`, required to be {0,1}-valued.
    SparsePoly { terms: Vec<(Bits, f64)> },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Parity => "parity",
            Family::InnerProduct { .. } => "inner_product",
            Family::And => "and",
            Family::Junta { .. } => "junta",
            Family::TruthTable { .. } => "truth_table",
            Family::SparsePoly { .. } => "sparse_poly",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BooleanFunction {
    m: usize,
    family: Family,
    sparsity_bound: u64,
    // Packed-bit masks of the junta variables, cached for fast evaluation.
    junta_masks: Vec<u64>,
}

impl BooleanFunction {
    fn build(m: usize, family: Family, sparsity_bound: u64) -> Result<Self> {
        if m == 0 || m > 64 {
            return Err(Error::invalid(format!("function arity {m} not in 1..=64")));
        }
        let junta_masks = match &family {
            Family::Junta { vars, .. } => vars.iter().map(|&v| bit_of(m, v)).collect(),
            _ => Vec::new(),
        };
        let f = BooleanFunction {
            m,
            family,
            sparsity_bound,
            junta_masks,
        };
        f.check_nonzero()?;
        Ok(f)
    }

    /// Parity `x_1 xor ... xor x_m`.
    pub fn parity(m: usize) -> Result<Self> {
        Self::build(m, Family::Parity, 2)
    }

    /// `h^s(x) = s.x mod 2`; rejects `s = 0^m` (the zero function).
    pub fn inner_product(s: Bits) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::invalid("inner-product function needs s != 0^m"));
        }
        Self::build(s.len(), Family::InnerProduct { s }, 2)
    }

    /// AND of all `m` inputs. Every Fourier coefficient is non-zero.
    pub fn and(m: usize) -> Result<Self> {
        Self::build(m, Family::And, 1u64.checked_shl(m as u32).unwrap_or(u64::MAX))
    }

    /// Function of the inputs listed in `vars`, given by a `2^k`-entry table.
    pub fn junta(m: usize, vars: Vec<usize>, table: Vec<bool>) -> Result<Self> {
        let k = vars.len();
        if k > MAX_EXACT_BITS {
            return Err(Error::Capacity(format!("junta on {k} variables")));
        }
        for (i, &v) in vars.iter().enumerate() {
            if v >= m {
                return Err(Error::invalid(format!("junta variable {v} out of range for m = {m}")));
            }
            if vars[..i].contains(&v) {
                return Err(Error::invalid(format!("junta variable {v} repeated")));
            }
        }
        if table.len() != 1usize << k {
            return Err(Error::DimensionMismatch(format!(
                "junta table has {} entries, expected {}",
                table.len(),
                1usize << k
            )));
        }
        Self::build(m, Family::Junta { vars, table }, 1u64 << k)
    }

    /// Explicit truth table, `x` in lexicographic order with `x_1` most significant.
    /// The sparsity bound is the exact Fourier sparsity.
    pub fn truth_table(m: usize, table: Vec<bool>) -> Result<Self> {
        if m > MAX_EXACT_BITS {
            return Err(Error::Capacity(format!("truth table on {m} bits")));
        }
        if table.len() != 1usize << m {
            return Err(Error::DimensionMismatch(format!(
                "truth table has {} entries, expected {}",
                table.len(),
                1usize << m
            )));
        }
        let mut f = Self::build(m, Family::TruthTable { table }, 1)?;
        f.sparsity_bound = wht_spectrum(&f)?.len() as u64;
        Ok(f)
    }

    /// `f(x) = sum_s c_s (-1)^{s.x}`. The terms must describe a {0,1}-valued
    /// function; this is verified exhaustively when `m <= 20`.
    pub fn sparse_poly(m: usize, terms: Vec<(Bits, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("sparse polynomial with no terms"));
        }
        for (i, (s, _)) in terms.iter().enumerate() {
            if s.len() != m {
                return Err(Error::DimensionMismatch(format!("term index {s} is not {m} bits")));
            }
            if terms[..i].iter().any(|(t, _)| t == s) {
                return Err(Error::invalid(format!("term index {s} repeated")));
            }
        }
        let n = terms.len() as u64;
        let f = Self::build(m, Family::SparsePoly { terms }, n)?;
        if m <= MAX_EXACT_BITS {
            for x in 0..(1u64 << m) {
                let v = f.poly_value(x);
                if (v - v.round()).abs() > 1e-9 || !(v.round() == 0.0 || v.round() == 1.0) {
                    return Err(Error::invalid(format!(
                        "sparse polynomial takes value {v} at {}, not a Boolean",
                        Bits::new(m, x)?
                    )));
                }
            }
        }
        Ok(f)
    }

    /// The constant function 1.
    pub fn constant_one(m: usize) -> Result<Self> {
        Self::sparse_poly(m, vec![(Bits::zeros(m.clamp(1, 64)), 1.0)])
    }

    /// Replaces the declared sparsity bound.
    pub fn with_sparsity_bound(mut self, bound: u64) -> Result<Self> {
        if bound == 0 {
            return Err(Error::invalid("sparsity bound must be positive"));
        }
        self.sparsity_bound = bound;
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn sparsity_bound(&self) -> u64 {
        self.sparsity_bound
    }

    fn poly_value(&self, x: u64) -> f64 {
        match &self.family {
            Family::SparsePoly { terms } => terms
                .iter()
                .map(|(s, c)| c * crate::bits::sign_of_dot(s.value(), x))
                .sum(),
            _ => unreachable!(),
        }
    }

    /// `f(x)` for packed input `x`.
    #[inline]
    pub fn eval(&self, x: u64) -> bool {
        debug_assert!(x & !low_mask(self.m) == 0);
        match &self.family {
            Family::Parity => x.count_ones() & 1 == 1,
            Family::InnerProduct { s } => (s.value() & x).count_ones() & 1 == 1,
            Family::And => x == low_mask(self.m),
            Family::Junta { table, .. } => {
                let mut idx = 0usize;
                for &mask in &self.junta_masks {
                    idx = (idx << 1) | usize::from(x & mask != 0);
                }
                table[idx]
            }
            Family::TruthTable { table } => table[x as usize],
            Family::SparsePoly { .. } => self.poly_value(x) > 0.5,
        }
    }

    /// Full truth table; `m <= 24`.
    pub fn table(&self) -> Result<Vec<bool>> {
        if self.m > MAX_EXHAUSTIVE_SUM_BITS {
            return Err(Error::Capacity(format!("tabulating a {}-bit function", self.m)));
        }
        Ok((0..(1u64 << self.m)).map(|x| self.eval(x)).collect())
    }

    /// The spectrum implied by the family, when it is known in closed form.
    pub fn declared_spectrum(&self) -> Option<FourierSpectrum> {
        let m = self.m;
        let mut spec = FourierSpectrum::empty(m);
        match &self.family {
            Family::Parity => {
                spec.insert(Bits::zeros(m), 0.5);
                spec.insert(Bits::ones(m), -0.5);
            }
            Family::InnerProduct { s } => {
                spec.insert(Bits::zeros(m), 0.5);
                spec.insert(*s, -0.5);
            }
            Family::And => {
                if m > MAX_EXACT_BITS {
                    return None;
                }
                let c = (-(m as f64)).exp2();
                for s in 0..(1u64 << m) {
                    let sign = if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    spec.insert(Bits::new(m, s).ok()?, sign * c);
                }
            }
            Family::Junta { vars, table } => {
                let k = vars.len();
                let mut vals: Vec<f64> = table.iter().map(|&b| f64::from(u8::from(b))).collect();
                wht_in_place(&mut vals);
                let scale = (-(k as f64)).exp2();
                for (t, v) in vals.into_iter().enumerate() {
                    let c = v * scale;
                    if c.abs() < ZERO_CUTOFF {
                        continue;
                    }
                    let mut s = 0u64;
                    for (i, &var) in vars.iter().enumerate() {
                        if (t >> (k - 1 - i)) & 1 == 1 {
                            s |= bit_of(m, var);
                        }
                    }
                    spec.insert(Bits::new(m, s).ok()?, c);
                }
            }
            Family::SparsePoly { terms } => {
                for &(s, c) in terms {
                    if c.abs() >= ZERO_CUTOFF {
                        spec.insert(s, c);
                    }
                }
            }
            Family::TruthTable { .. } => return None,
        }
        Some(spec)
    }

    fn check_nonzero(&self) -> Result<()> {
        let nonzero = match &self.family {
            Family::Parity | Family::InnerProduct { .. } | Family::And => true,
            Family::Junta { table, .. } | Family::TruthTable { table } => table.iter().any(|&b| b),
            // The mean of f equals the constant term, so f != 0 iff c_0 > 0.
            Family::SparsePoly { terms } => terms
                .iter()
                .find(|(s, _)| s.is_zero())
                .map(|&(_, c)| c > 1e-12)
                .unwrap_or(false),
        };
        if nonzero {
            Ok(())
        } else {
            Err(Error::invalid("post-processing function must be non-zero"))
        }
    }
}

impl RealFunction for BooleanFunction {
    fn arity(&self) -> usize {
        self.m
    }

    fn value(&self, x: u64) -> f64 {
        f64::from(u8::from(self.eval(x)))
    }
}

/// `g(x) = (-1)^{f(x)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedFunction {
    f: BooleanFunction,
}

impl SignedFunction {
    pub fn m(&self) -> usize {
        self.f.m
    }

    /// `f.sparsity_bound + 1`.
    pub fn sparsity_bound(&self) -> u64 {
        self.f.sparsity_bound.saturating_add(1)
    }

    pub fn base(&self) -> &BooleanFunction {
        &self.f
    }

    #[inline]
    pub fn eval(&self, x: u64) -> i32 {
        if self.f.eval(x) {
            -1
        } else {
            1
        }
    }

    /// Spectrum derived from the base function's closed form via
    /// `g^(0) = 1 - 2 f^(0)`, `g^(s) = -2 f^(s)`.
    pub fn declared_spectrum(&self) -> Option<FourierSpectrum> {
        self.f.declared_spectrum().map(|fs| signed_spectrum_from(&fs))
    }
}

impl RealFunction for SignedFunction {
    fn arity(&self) -> usize {
        self.f.m
    }

    fn value(&self, x: u64) -> f64 {
        f64::from(self.eval(x))
    }
}

/// Lifts `f` to `g = (-1)^f`.
pub fn lift_to_signed(f: &BooleanFunction) -> SignedFunction {
    SignedFunction { f: f.clone() }
}

/// Maps the spectrum of `f` to the spectrum of `(-1)^f`.
pub fn signed_spectrum_from(f_spec: &FourierSpectrum) -> FourierSpectrum {
    let m = f_spec.m();
    let zero = Bits::zeros(m);
    let mut out = FourierSpectrum::empty(m);
    let c0 = 1.0 - 2.0 * f_spec.get(&zero);
    if c0.abs() >= ZERO_CUTOFF {
        out.insert(zero, c0);
    }
    for (s, c) in f_spec.iter() {
        if !s.is_zero() {
            out.insert(*s, -2.0 * c);
        }
    }
    out
}

/// `h^s(x) = s.x`, whose spectrum is `{0^m: 1/2, s: -1/2}`.
pub fn make_inner_product_function(s: Bits) -> Result<BooleanFunction> {
    BooleanFunction::inner_product(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn inner_product_evaluates_by_definition() {
        let h = make_inner_product_function(bits("10")).unwrap();
        assert!(!h.eval(0b01));
        assert!(h.eval(0b11));
        assert!(make_inner_product_function(bits("000")).is_err());
    }

    #[test]
    fn all_ones_inner_product_is_parity() {
        let h = make_inner_product_function(Bits::ones(5)).unwrap();
        let p = BooleanFunction::parity(5).unwrap();
        assert_eq!(h.table().unwrap(), p.table().unwrap());
    }

    #[test]
    fn zero_functions_are_rejected() {
        assert!(BooleanFunction::truth_table(2, vec![false; 4]).is_err());
        assert!(BooleanFunction::junta(4, vec![1], vec![false, false]).is_err());
        assert!(BooleanFunction::sparse_poly(2, vec![(bits("11"), 0.5)]).is_err());
    }

    #[test]
    fn sparse_poly_must_be_boolean() {
        let ok = BooleanFunction::sparse_poly(2, vec![(bits("00"), 0.5), (bits("11"), -0.5)]).unwrap();
        assert_eq!(ok.table().unwrap(), BooleanFunction::parity(2).unwrap().table().unwrap());
        assert!(BooleanFunction::sparse_poly(2, vec![(bits("00"), 0.5), (bits("11"), 0.25)]).is_err());
    }

    #[test]
    fn junta_validation() {
        assert!(BooleanFunction::junta(3, vec![0, 0], vec![true; 4]).is_err());
        assert!(BooleanFunction::junta(3, vec![3], vec![true; 2]).is_err());
        assert!(BooleanFunction::junta(3, vec![0, 2], vec![true; 3]).is_err());
        let j = BooleanFunction::junta(3, vec![2, 0], vec![false, true, false, false]).unwrap();
        // index = x_2 x_0 -> only (x_2, x_0) = (0, 1) is accepted
        assert!(j.eval(0b100));
        assert!(!j.eval(0b001));
        assert_eq!(j.sparsity_bound(), 4);
    }

    #[test]
    fn signed_lift_values_and_bound() {
        let f = BooleanFunction::and(2).unwrap();
        let g = lift_to_signed(&f);
        assert_eq!(g.eval(0b11), -1);
        assert_eq!(g.eval(0b10), 1);
        assert_eq!(g.sparsity_bound(), 5);
    }

    #[test]
    fn lift_spectrum_examples() {
        let g = lift_to_signed(&BooleanFunction::parity(2).unwrap());
        let spec = wht_spectrum(&g).unwrap();
        assert_eq!(spec.len(), 1);
        assert_eq!(spec.get(&bits("11")), 1.0);

        let g = lift_to_signed(&BooleanFunction::constant_one(3).unwrap());
        let spec = wht_spectrum(&g).unwrap();
        assert_eq!(spec.len(), 1);
        assert_eq!(spec.get(&bits("000")), -1.0);

        // AND: f^ = {1/4, -1/4, -1/4, 1/4} so g^ = {1 - 1/2, 1/2, 1/2, -1/2}
        let g = lift_to_signed(&BooleanFunction::and(2).unwrap());
        let spec = wht_spectrum(&g).unwrap();
        for (s, want) in [("00", 0.5), ("01", 0.5), ("10", 0.5), ("11", -0.5)] {
            assert!((spec.get(&bits(s)) - want).abs() < 1e-15, "{s}");
        }
        let declared = g.declared_spectrum().unwrap();
        assert!(declared.max_abs_diff(&spec) < 1e-12);
    }
}
