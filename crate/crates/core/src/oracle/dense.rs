//! Dense operator helpers for cross-checks at small qubit counts.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::apply_gate;
use crate::circuit::{Gate, QuantumCircuit};
use crate::error::{Error, Result};

pub type DenseOp = DMatrix<Complex64>;

/// Largest qubit count for which dense `2^n x 2^n` operators are built.
pub const MAX_DENSE_QUBITS: usize = 12;

fn check(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!("dense operators need n <= {MAX_DENSE_QUBITS}, got {n}")));
    }
    Ok(())
}

/// Matrix of a gate sequence (first gate applied first).
pub fn gates_unitary(n: usize, gates: &[Gate]) -> Result<DenseOp> {
    check(n)?;
    let dim = 1usize << n;
    let mut u = DenseOp::zeros(dim, dim);
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for x in 0..dim {
        col.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        col[x] = Complex64::new(1.0, 0.0);
        for g in gates {
            apply_gate(&mut col, n, g);
        }
        u.set_column(x, &nalgebra::DVector::from_column_slice(&col));
    }
    Ok(u)
}

pub fn circuit_unitary(c: &QuantumCircuit) -> Result<DenseOp> {
    let gates: Vec<Gate> = c.gates().cloned().collect();
    gates_unitary(c.n(), &gates)
}

/// Single-qubit Pauli matrices indexed by letter.
pub fn pauli_matrix(letter: char) -> DenseOp {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let v = match letter {
        'I' => [l, o, o, l],
        'X' => [o, l, l, o],
        'Y' => [o, -i, i, o],
        'Z' => [l, o, o, -l],
        _ => panic!("not a Pauli letter: {letter}"),
    };
    DenseOp::from_row_slice(2, 2, &v)
}

/// Kronecker product of letters, qubit 0 leftmost.
pub fn pauli_string_matrix(letters: &str) -> DenseOp {
    letters
        .chars()
        .fold(DenseOp::identity(1, 1), |acc, c| acc.kronecker(&pauli_matrix(c)))
}

/// `U^dag O U`.
pub fn conjugate(u: &DenseOp, o: &DenseOp) -> DenseOp {
    u.adjoint() * o * u
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &DenseOp, b: &DenseOp) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Qubits on which `o` acts non-trivially: those where it fails to commute with `X_q` or `Z_q`.
pub fn operator_support(o: &DenseOp, n: usize, tol: f64) -> Vec<usize> {
    (0..n)
        .filter(|&q| {
            ['X', 'Z'].iter().any(|&p| {
                let letters: String = (0..n).map(|j| if j == q { p } else { 'I' }).collect();
                let pm = pauli_string_matrix(&letters);
                max_abs_diff(&(o * &pm), &(&pm * o)) > tol
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;

    #[test]
    fn hzh_is_x() {
        let h = parse_circuit("qc n=1 m=1 / H 0").unwrap();
        let u = circuit_unitary(&h).unwrap();
        let x = conjugate(&u, &pauli_matrix('Z'));
        assert!(max_abs_diff(&x, &pauli_matrix('X')) < 1e-12);
    }

    #[test]
    fn cz_conjugates_x_to_xz() {
        let c = parse_circuit("qc n=2 m=2 / CZ 0 1").unwrap();
        let u = circuit_unitary(&c).unwrap();
        let got = conjugate(&u, &pauli_string_matrix("XI"));
        assert!(max_abs_diff(&got, &pauli_string_matrix("XZ")) < 1e-12);
    }

    #[test]
    fn support_detection() {
        assert_eq!(operator_support(&pauli_string_matrix("IZX"), 3, 1e-9), vec![1, 2]);
        assert!(operator_support(&pauli_string_matrix("II"), 2, 1e-9).is_empty());
    }
}
