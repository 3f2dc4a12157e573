//! Brute-force statevector ground truth.
//!
//! Amplitude index `x` has qubit 0 as its most significant bit, matching
//! [`crate::bits`].

pub mod dense;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::Serialize;

use crate::bits::{bit_of, dot, Bits};
use crate::boolfn::{wht_in_place, BooleanFunction};
use crate::circuit::{Gate, GateKind, QuantumCircuit};
use crate::error::{Error, Result};

/// Largest qubit count the oracle will allocate a statevector for.
pub const MAX_ORACLE_QUBITS: usize = 24;

/// `e^{i pi k / 4}` for `k` in `0..8`.
pub fn eighth_root(k: u8) -> Complex64 {
    Complex64::from_polar(1.0, FRAC_PI_4 * f64::from(k % 8))
}

/// Applies one gate in place to an `n`-qubit amplitude vector.
pub fn apply_gate(amps: &mut [Complex64], n: usize, gate: &Gate) {
    debug_assert_eq!(amps.len(), 1usize << n);
    match gate.kind() {
        GateKind::H => {
            let b = bit_of(n, gate.qubits()[0]) as usize;
            for i in (0..amps.len()).filter(|i| i & b == 0) {
                let (a0, a1) = (amps[i], amps[i | b]);
                amps[i] = (a0 + a1) * FRAC_1_SQRT_2;
                amps[i | b] = (a0 - a1) * FRAC_1_SQRT_2;
            }
        }
        GateKind::X => {
            let b = bit_of(n, gate.qubits()[0]) as usize;
            for i in (0..amps.len()).filter(|i| i & b == 0) {
                amps.swap(i, i | b);
            }
        }
        kind => {
            let phase = eighth_root(kind.diagonal_eighths().expect("remaining kinds are diagonal"));
            let mask = gate.mask(n) as usize;
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mask == mask {
                    *a *= phase;
                }
            }
        }
    }
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::Capacity(format!(
            "statevector oracle supports n <= {MAX_ORACLE_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0^n>`.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, x: u64) -> Result<Self> {
        check_capacity(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[x as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_capacity(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for {n} qubits", amps.len())));
        }
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, x: u64) -> Complex64 {
        self.amps[x as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn apply(&mut self, gate: &Gate) {
        apply_gate(&mut self.amps, self.n, gate);
    }

    pub fn apply_circuit(&mut self, c: &QuantumCircuit) -> Result<()> {
        if c.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit circuit on a {}-qubit state",
                c.n(),
                self.n
            )));
        }
        for g in c.gates() {
            self.apply(g);
        }
        Ok(())
    }

    /// `<psi|phi>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `<psi| P_Z(mask) |psi>` for a packed Z-mask on all `n` qubits.
    pub fn z_expectation(&self, zmask: u64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| if dot(i as u64, zmask) == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }

    /// Marginal distribution of the first `m` qubits.
    pub fn marginal(&self, m: usize) -> OutputDistribution {
        let shift = self.n - m;
        let mut probs = vec![0.0; 1 << m];
        for (i, a) in self.amps.iter().enumerate() {
            probs[i >> shift] += a.norm_sqr();
        }
        OutputDistribution { m, probs }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputDistribution {
    m: usize,
    probs: Vec<f64>,
}

impl OutputDistribution {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: u64) -> f64 {
        self.probs[x as usize]
    }

    /// `sum_x p(x) (-1)^{s.x}` for every `s`, indexed by `s`.
    pub fn z_expectations(&self) -> Vec<f64> {
        let mut v = self.probs.clone();
        wht_in_place(&mut v);
        v
    }

    /// Fourier coefficients `2^{-m} sum_x p(x) (-1)^{s.x}`, indexed by `s`.
    pub fn fourier(&self) -> Vec<f64> {
        let scale = (-(self.m as f64)).exp2();
        self.z_expectations().into_iter().map(|v| v * scale).collect()
    }

    /// Total-variation distance.
    pub fn tv_distance(&self, other: &OutputDistribution) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

/// `C|0^n>`.
pub fn run(c: &QuantumCircuit) -> Result<StateVector> {
    let mut psi = StateVector::zero(c.n())?;
    psi.apply_circuit(c)?;
    Ok(psi)
}

pub fn output_distribution(c: &QuantumCircuit) -> Result<OutputDistribution> {
    Ok(run(c)?.marginal(c.m()))
}

/// `<0|C^dag (Z(s) (x) I) C|0>`.
pub fn pauli_expectation_exact(c: &QuantumCircuit, s: &Bits) -> Result<f64> {
    let zmask = c.z_mask(s)?;
    Ok(run(c)?.z_expectation(zmask))
}

/// `sum_x f(x) p_m(x)`.
pub fn acceptance_probability_exact(c: &QuantumCircuit, f: &BooleanFunction) -> Result<f64> {
    if f.m() != c.m() {
        return Err(Error::DimensionMismatch(format!(
            "function on {} bits, circuit measures {}",
            f.m(),
            c.m()
        )));
    }
    let dist = output_distribution(c)?;
    Ok(dist
        .probs()
        .iter()
        .enumerate()
        .filter(|(x, _)| f.eval(*x as u64))
        .map(|(_, p)| p)
        .sum())
}
