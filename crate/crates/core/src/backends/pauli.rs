//! Pauli operators with exact phase tracking.
//!
//! An operator is stored as `i^k X^x Z^z` where `x` and `z` are packed masks
//! (qubit 0 is the most significant of the `n` low bits) and `X^x Z^z` means
//! the product over qubits of `X_q^{x_q} Z_q^{z_q}`. Since `Y = i X Z`, a qubit
//! with both bits set reads as the letter `Y` with an extra factor `-i`.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::bits::{bit_of, dot, low_mask};
use crate::circuit::{Gate, GateKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    /// Power of `i` in the `X^x Z^z` normal form.
    k: u8,
    x: u64,
    z: u64,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator { n, k: 0, x: 0, z: 0 }
    }

    /// `Z` on every qubit set in the packed mask.
    pub fn z_mask(n: usize, mask: u64) -> Self {
        PauliOperator {
            n,
            k: 0,
            x: 0,
            z: mask & low_mask(n),
        }
    }

    pub fn x_mask(n: usize, mask: u64) -> Self {
        PauliOperator {
            n,
            k: 0,
            x: mask & low_mask(n),
            z: 0,
        }
    }

    /// From a letter string over `IXYZ` and a phase `i^phase_power`.
    pub fn from_letters(phase_power: u8, letters: &str) -> Result<Self> {
        let n = letters.chars().count();
        let mut p = PauliOperator::identity(n);
        let mut ys = 0u8;
        for (q, c) in letters.chars().enumerate() {
            let b = bit_of(n, q);
            match c {
                'I' => {}
                'X' => p.x |= b,
                'Z' => p.z |= b,
                'Y' => {
                    p.x |= b;
                    p.z |= b;
                    ys += 1;
                }
                _ => return Err(Error::invalid(format!("bad Pauli letter {c:?}"))),
            }
        }
        p.k = (phase_power + ys) % 4;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    /// `k` in the normal form `i^k X^x Z^z`.
    pub fn normal_form_power(&self) -> u8 {
        self.k
    }

    /// Phase in front of the letter string, as a power of `i`.
    pub fn phase_power(&self) -> u8 {
        let ys = (self.x & self.z).count_ones() % 4;
        ((4 + u32::from(self.k) - ys) % 4) as u8
    }

    /// Hermitian exactly when the letter phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase_power().is_multiple_of(2)
    }

    /// Dense `2^n x 2^n` matrix, including the phase.
    pub fn to_dense(&self) -> Result<crate::oracle::dense::DenseOp> {
        if self.n > crate::oracle::dense::MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!("dense Pauli on {} qubits", self.n)));
        }
        let ph = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][self.phase_power() as usize];
        Ok(crate::oracle::dense::pauli_string_matrix(&self.letters()) * ph)
    }

    pub fn letters(&self) -> String {
        (0..self.n)
            .map(|q| {
                let b = bit_of(self.n, q);
                match (self.x & b != 0, self.z & b != 0) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (false, true) => 'Z',
                    (true, true) => 'Y',
                }
            })
            .collect()
    }

    /// `self * other`.
    pub fn mul(&self, other: &PauliOperator) -> PauliOperator {
        debug_assert_eq!(self.n, other.n);
        // Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
        let k = self.k as u32 + other.k as u32 + 2 * dot(self.z, other.x);
        PauliOperator {
            n: self.n,
            k: (k % 4) as u8,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    /// `self` scaled by `i^power`.
    pub fn times_i_power(mut self, power: u8) -> PauliOperator {
        self.k = (self.k + power) % 4;
        self
    }

    /// Expectation on the product state `(T H |0>)^{(x) n}`.
    pub fn magic_state_expectation(&self) -> f64 {
        // <X> = <Y> = 1/sqrt2 and <Z> = 0 on T H |0>
        if self.z & !self.x != 0 {
            return 0.0;
        }
        let sign = match self.phase_power() {
            0 => 1.0,
            2 => -1.0,
            _ => panic!("expectation of a non-Hermitian Pauli"),
        };
        sign * std::f64::consts::FRAC_1_SQRT_2.powi(self.x.count_ones() as i32)
    }

    /// Expectation on `|0^n>`.
    pub fn zero_state_expectation(&self) -> f64 {
        if self.x != 0 {
            return 0.0;
        }
        match self.phase_power() {
            0 => 1.0,
            2 => -1.0,
            _ => panic!("expectation of a non-Hermitian Pauli"),
        }
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phase = ["+", "+i", "-", "-i"][self.phase_power() as usize];
        write!(f, "{phase}{}", self.letters())
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Images of `X_q` and `Z_q` under `P -> g^dag P g`, or `None` when `g` leaves
/// `q` alone.
fn images(g: &Gate, n: usize, q: usize) -> Result<Option<(PauliOperator, PauliOperator)>> {
    let Some(pos) = g.qubits().iter().position(|&t| t == q) else {
        return Ok(None);
    };
    let b = bit_of(n, q);
    let x = PauliOperator::x_mask(n, b);
    let z = PauliOperator::z_mask(n, b);
    let xz = PauliOperator { n, k: 0, x: b, z: b };
    let imgs = match g.kind() {
        GateKind::H => (z, x),
        // S^dag X S = -Y = -i X Z
        GateKind::S => (xz.times_i_power(3), z),
        GateKind::Sdg => (xz.times_i_power(1), z),
        GateKind::X => (x, z.times_i_power(2)),
        GateKind::Z => (x.times_i_power(2), z),
        GateKind::CZ => {
            let other = g.qubits()[1 - pos];
            (x.mul(&PauliOperator::z_mask(n, bit_of(n, other))), z)
        }
        kind => return Err(Error::invalid(format!("{kind} is not a Clifford gate"))),
    };
    Ok(Some(imgs))
}

/// `g^dag P g` for one Clifford gate.
///
/// Conjugation is an algebra homomorphism, so the image is the ordered product
/// of the images of the normal-form factors.
pub fn conjugate_by_gate(p: &PauliOperator, g: &Gate) -> Result<PauliOperator> {
    if !g.kind().is_clifford() {
        return Err(Error::invalid(format!("{} is not a Clifford gate", g.kind())));
    }
    let n = p.n;
    let mut out = PauliOperator::identity(n).times_i_power(p.k);
    for q in 0..n {
        let b = bit_of(n, q);
        if (p.x | p.z) & b == 0 {
            continue;
        }
        let (ix, iz) = images(g, n, q)?.unwrap_or((PauliOperator::x_mask(n, b), PauliOperator::z_mask(n, b)));
        if p.x & b != 0 {
            out = out.mul(&ix);
        }
        if p.z & b != 0 {
            out = out.mul(&iz);
        }
    }
    Ok(out)
}

/// `E^dag P E` for a Clifford gate sequence `E` (first gate applied first).
pub fn conjugate_pauli_through_clifford(e: &[Gate], p: &PauliOperator) -> Result<PauliOperator> {
    e.iter().rev().try_fold(*p, |acc, g| conjugate_by_gate(&acc, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dense::{conjugate, gates_unitary, max_abs_diff};

    fn dense(p: &PauliOperator) -> crate::oracle::dense::DenseOp {
        p.to_dense().unwrap()
    }

    #[test]
    fn letters_and_phase() {
        let p = PauliOperator::from_letters(2, "XYZI").unwrap();
        assert_eq!(p.to_string(), "-XYZI");
        assert!(p.is_hermitian());
        let y = PauliOperator::from_letters(0, "Y").unwrap();
        assert_eq!(y.mul(&y), PauliOperator::identity(1));
        let x = PauliOperator::from_letters(0, "X").unwrap();
        let z = PauliOperator::from_letters(0, "Z").unwrap();
        // XZ = -iY
        assert_eq!(x.mul(&z).to_string(), "-iY");
        assert_eq!(z.mul(&x).to_string(), "+iY");
    }

    #[test]
    fn product_matches_dense() {
        let a = PauliOperator::from_letters(1, "XYZY").unwrap();
        let b = PauliOperator::from_letters(0, "ZZXY").unwrap();
        let got = dense(&a.mul(&b));
        assert!(max_abs_diff(&got, &(dense(&a) * dense(&b))) < 1e-12);
    }

    #[test]
    fn conjugation_examples() {
        let z0 = PauliOperator::from_letters(0, "Z").unwrap();
        let got = conjugate_pauli_through_clifford(&[Gate::h(0)], &z0).unwrap();
        assert_eq!(got.to_string(), "+X");

        let z0 = PauliOperator::from_letters(0, "ZI").unwrap();
        let got = conjugate_pauli_through_clifford(&[Gate::cz(0, 1)], &z0).unwrap();
        assert_eq!(got.to_string(), "+ZI");

        let x0 = PauliOperator::from_letters(0, "XI").unwrap();
        let got = conjugate_pauli_through_clifford(&[Gate::cz(0, 1)], &x0).unwrap();
        assert_eq!(got.to_string(), "+XZ");

        assert!(conjugate_pauli_through_clifford(&[Gate::t(0)], &x0).is_err());
    }

    #[test]
    fn single_gate_rules_match_dense() {
        let gates = [
            Gate::h(1),
            Gate::s(0),
            Gate::new(GateKind::Sdg, vec![1]).unwrap(),
            Gate::x(0),
            Gate::z(1),
            Gate::cz(0, 1),
            Gate::cz(1, 0),
        ];
        for g in &gates {
            let u = gates_unitary(2, std::slice::from_ref(g)).unwrap();
            for ph in 0..4 {
                for a in ["I", "X", "Y", "Z"] {
                    for b in ["I", "X", "Y", "Z"] {
                        let p = PauliOperator::from_letters(ph, &format!("{a}{b}")).unwrap();
                        let got = conjugate_by_gate(&p, g).unwrap();
                        let want = conjugate(&u, &dense(&p));
                        assert!(max_abs_diff(&dense(&got), &want) < 1e-12, "{g} on {p}: got {got}");
                    }
                }
            }
        }
    }

    #[test]
    fn magic_expectations() {
        let x = PauliOperator::from_letters(0, "X").unwrap();
        assert!((x.magic_state_expectation() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let mzy = PauliOperator::from_letters(2, "YY").unwrap();
        assert!((mzy.magic_state_expectation() + 0.5).abs() < 1e-15);
        assert_eq!(PauliOperator::from_letters(0, "ZX").unwrap().magic_state_expectation(), 0.0);
        assert_eq!(PauliOperator::from_letters(2, "ZI").unwrap().zero_state_expectation(), -1.0);
    }
}
