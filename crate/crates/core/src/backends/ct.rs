//! Computationally tractable (CT) states: efficiently samplable with
//! efficiently computable amplitudes.
//!
//! A state here is a product preparation followed by a chain of phase
//! permutations. Every amplitude is either zero or `2^{-k/2} omega^e` for a
//! fixed `k`, so phases are tracked exactly as integers mod 8.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::ecs::{EcsOperation, PhasePermutation};
use crate::bits::bit_of;
use crate::circuit::Gate;
use crate::error::{Error, Result};
use crate::oracle::eighth_root;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prep {
    /// `|0>`.
    Zero,
    /// `H|0>`.
    Plus,
    /// `T H |0>`.
    Magic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CTState {
    n: usize,
    /// Qubits prepared in `H|0>` or `T H|0>`.
    free_mask: u64,
    magic_mask: u64,
    ops: Vec<PhasePermutation>,
}

pub fn product_ct_state(preps: &[Prep]) -> Result<CTState> {
    let n = preps.len();
    if n == 0 || n > 64 {
        return Err(Error::invalid(format!("product state on {n} qubits")));
    }
    let mut free_mask = 0;
    let mut magic_mask = 0;
    for (q, p) in preps.iter().enumerate() {
        match p {
            Prep::Zero => {}
            Prep::Plus => free_mask |= bit_of(n, q),
            Prep::Magic => {
                free_mask |= bit_of(n, q);
                magic_mask |= bit_of(n, q);
            }
        }
    }
    Ok(CTState {
        n,
        free_mask,
        magic_mask,
        ops: Vec::new(),
    })
}

/// `U|phi>` for a basis-preserving `U`.
pub fn apply_basis_preserving(phi: &CTState, u: &EcsOperation) -> Result<CTState> {
    match u {
        EcsOperation::BasisPreserving(p) => apply_phase_permutation(phi, p),
        EcsOperation::Table { sparsity: 1, .. } => Err(Error::UnsupportedFamily(
            "column-table operations cannot be chained into a CT state".into(),
        )),
        EcsOperation::Table { sparsity, .. } => Err(Error::invalid(format!(
            "operation of sparsity {sparsity} is not basis-preserving"
        ))),
    }
}

pub fn apply_phase_permutation(phi: &CTState, p: &PhasePermutation) -> Result<CTState> {
    if p.n() != phi.n {
        return Err(Error::DimensionMismatch(format!("{}-qubit operation on {} qubits", p.n(), phi.n)));
    }
    let mut out = phi.clone();
    out.ops.push(p.clone());
    Ok(out)
}

/// `D|phi>` for a gate sequence without `H`.
pub fn apply_gates(phi: &CTState, gates: &[Gate]) -> Result<CTState> {
    apply_phase_permutation(phi, &PhasePermutation::from_gates(phi.n, gates)?)
}

impl CTState {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Common modulus of all non-zero amplitudes.
    pub fn flat_magnitude(&self) -> Option<f64> {
        Some(FRAC_1_SQRT_2.powi(self.free_mask.count_ones() as i32))
    }

    /// Number of basis states with non-zero amplitude.
    pub fn support_size(&self) -> u64 {
        1u64 << self.free_mask.count_ones()
    }

    /// Draws `x` with probability `|<x|phi>|^2`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut x = rng.random::<u64>() & self.free_mask;
        for op in &self.ops {
            x = op.forward(x).1;
        }
        x
    }

    /// Phase of `<y|phi>` in units of `pi/4`, or `None` when the amplitude is zero.
    #[inline]
    pub fn amplitude_eighths(&self, mut y: u64) -> Option<u8> {
        let mut e = 0u8;
        for op in self.ops.iter().rev() {
            let (k, x) = op.preimage(y);
            e = e.wrapping_add(k);
            y = x;
        }
        if y & !self.free_mask != 0 {
            return None;
        }
        Some(e.wrapping_add((y & self.magic_mask).count_ones() as u8) & 7)
    }

    pub fn amplitude(&self, y: u64) -> Complex64 {
        match self.amplitude_eighths(y) {
            Some(e) => eighth_root(e) * self.flat_magnitude().expect("flat"),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// The non-zero support, for enumeration at small `n`.
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        let free: Vec<u64> = (0..self.n).map(|q| bit_of(self.n, q)).filter(|b| self.free_mask & b != 0).collect();
        (0..self.support_size()).map(move |i| {
            let mut x = 0;
            for (j, b) in free.iter().enumerate() {
                if i >> j & 1 == 1 {
                    x |= b;
                }
            }
            self.ops.iter().fold(x, |x, op| op.forward(x).1)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{random_diagonal_gates, QuantumCircuit};
    use crate::oracle;
    use crate::rng::{self, Op};

    #[test]
    fn product_examples() {
        let zero = product_ct_state(&[Prep::Zero; 3]).unwrap();
        let mut r = rng::stream(1, Op::Verify, 0, 0);
        assert!((0..100).all(|_| zero.sample(&mut r) == 0));
        assert_eq!(zero.amplitude(0), Complex64::new(1.0, 0.0));
        assert_eq!(zero.amplitude(3), Complex64::new(0.0, 0.0));

        let plus = product_ct_state(&[Prep::Plus; 4]).unwrap();
        assert!((plus.flat_magnitude().unwrap() - 0.25).abs() < 1e-15);
        assert!((0..16).all(|x| (plus.amplitude(x) - Complex64::new(0.25, 0.0)).norm() < 1e-15));

        let magic = product_ct_state(&[Prep::Magic]).unwrap();
        assert!((magic.amplitude(0) - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((magic.amplitude(1) - Complex64::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn basis_preserving_examples() {
        let phi = product_ct_state(&[Prep::Plus, Prep::Zero, Prep::Magic]).unwrap();
        let id = apply_phase_permutation(&phi, &PhasePermutation::identity(3)).unwrap();
        for x in 0..8 {
            assert_eq!(id.amplitude(x), phi.amplitude(x));
        }

        let zero = product_ct_state(&[Prep::Zero; 3]).unwrap();
        let flipped = apply_gates(&zero, &[Gate::x(0)]).unwrap();
        let mut r = rng::stream(2, Op::Verify, 0, 0);
        assert!((0..50).all(|_| flipped.sample(&mut r) == 0b100));
        assert_eq!(flipped.amplitude(0b100), Complex64::new(1.0, 0.0));

        assert!(apply_gates(&zero, &[Gate::h(1)]).is_err());
    }

    #[test]
    fn diagonal_on_plus_matches_oracle() {
        for n in [3usize, 6, 10] {
            let mut r = rng::stream(n as u64, Op::Verify, 1, 0);
            let d = random_diagonal_gates(&mut r, n, 3 * n);
            let mut gates: Vec<Gate> = (0..n).map(Gate::h).collect();
            gates.extend(d.iter().cloned());
            let psi = oracle::run(&QuantumCircuit::from_gates(n, n, gates).unwrap()).unwrap();
            let phi = apply_gates(&product_ct_state(&vec![Prep::Plus; n]).unwrap(), &d).unwrap();
            let mut norm = 0.0;
            for x in 0..1u64 << n {
                assert!((phi.amplitude(x) - psi.amplitude(x)).norm() < 1e-12);
                norm += phi.amplitude(x).norm_sqr();
            }
            assert!((norm - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn support_enumeration() {
        let phi = product_ct_state(&[Prep::Plus, Prep::Zero, Prep::Magic]).unwrap();
        let phi = apply_gates(&phi, &[Gate::x(1), Gate::cz(0, 1)]).unwrap();
        let mut s: Vec<u64> = phi.support().collect();
        s.sort_unstable();
        assert_eq!(s, vec![0b010, 0b011, 0b110, 0b111]);
    }
}
