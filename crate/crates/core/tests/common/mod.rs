//! Brute-force reference computations used by the integration tests.
//!
//! Nothing here calls the library's simulators or transforms: gates are
//! applied from their textbook definitions, Fourier coefficients are direct
//! sums, and Paulis are compared as explicit matrices.

#![allow(dead_code)]

use num_complex::Complex64;
use scpsim::circuit::{Gate, GateKind, QuantumCircuit};

pub type State = Vec<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Bit of qubit `q` in an `n`-qubit basis index; qubit 0 is the most significant.
pub fn qbit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

fn phase(kind: GateKind) -> Option<Complex64> {
    let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    match kind {
        GateKind::T => Some(w),
        GateKind::Tdg => Some(w.conj()),
        GateKind::S => Some(c(0.0, 1.0)),
        GateKind::Sdg => Some(c(0.0, -1.0)),
        GateKind::Z | GateKind::CZ | GateKind::CCZ => Some(c(-1.0, 0.0)),
        GateKind::H | GateKind::X => None,
    }
}

pub fn apply(psi: &State, n: usize, g: &Gate) -> State {
    let qs = g.qubits();
    let mut out = vec![c(0.0, 0.0); psi.len()];
    match g.kind() {
        GateKind::H => {
            let b = qbit(n, qs[0]);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            for (x, &a) in psi.iter().enumerate() {
                if x & b == 0 {
                    out[x] += a * r;
                    out[x | b] += a * r;
                } else {
                    out[x & !b] += a * r;
                    out[x] -= a * r;
                }
            }
        }
        GateKind::X => {
            let b = qbit(n, qs[0]);
            for (x, &a) in psi.iter().enumerate() {
                out[x ^ b] = a;
            }
        }
        kind => {
            let ph = phase(kind).expect("diagonal");
            let mask: usize = qs.iter().map(|&q| qbit(n, q)).sum();
            for (x, &a) in psi.iter().enumerate() {
                out[x] = if x & mask == mask { a * ph } else { a };
            }
        }
    }
    out
}

pub fn run_gates(n: usize, gates: &[Gate], start: usize) -> State {
    let mut psi = vec![c(0.0, 0.0); 1 << n];
    psi[start] = c(1.0, 0.0);
    for g in gates {
        psi = apply(&psi, n, g);
    }
    psi
}

pub fn run(circ: &QuantumCircuit) -> State {
    let gates: Vec<Gate> = circ.gates().cloned().collect();
    run_gates(circ.n(), &gates, 0)
}

/// Distribution of the first `m` qubits.
pub fn marginal(psi: &State, n: usize, m: usize) -> Vec<f64> {
    let mut p = vec![0.0; 1 << m];
    for (x, a) in psi.iter().enumerate() {
        p[x >> (n - m)] += a.norm_sqr();
    }
    p
}

fn sign(v: u64) -> f64 {
    if v.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `<psi| Z(s) (x) I |psi>` with `s` an `m`-bit mask on the first `m` qubits.
pub fn z_expectation(psi: &State, n: usize, m: usize, s: u64) -> f64 {
    marginal(psi, n, m).iter().enumerate().map(|(x, p)| p * sign(x as u64 & s)).sum()
}

/// `2^{-m} sum_x h(x) (-1)^{s.x}` by direct summation.
pub fn fourier_coefficient(m: usize, h: impl Fn(u64) -> f64, s: u64) -> f64 {
    let total: f64 = (0..1u64 << m).map(|x| h(x) * sign(x & s)).sum();
    total / (1u64 << m) as f64
}

pub type Matrix = Vec<Vec<Complex64>>;

/// `U[row][col]`, built column by column from basis states.
pub fn unitary(n: usize, gates: &[Gate]) -> Matrix {
    let dim = 1 << n;
    let mut u = vec![vec![c(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        for (row, a) in run_gates(n, gates, col).into_iter().enumerate() {
            u[row][col] = a;
        }
    }
    u
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.len();
    let mut out = vec![vec![c(0.0, 0.0); d]; d];
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint(a: &Matrix) -> Matrix {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| a[j][i].conj()).collect()).collect()
}

/// `i^k` times the tensor product of the letters, qubit 0 first.
pub fn pauli_matrix(k: u8, letters: &str) -> Matrix {
    let n = letters.len();
    let dim = 1 << n;
    let ik = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][k as usize % 4];
    let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let mut row = col;
        let mut amp = ik;
        for (q, l) in letters.chars().enumerate() {
            let b = qbit(n, q);
            let bit_set = col & b != 0;
            match l {
                'I' => {}
                'X' => row ^= b,
                'Z' => {
                    if bit_set {
                        amp = -amp;
                    }
                }
                'Y' => {
                    row ^= b;
                    // Y|0> = i|1>, Y|1> = -i|0>
                    amp *= if bit_set { c(0.0, -1.0) } else { c(0.0, 1.0) };
                }
                _ => panic!("bad letter {l}"),
            }
        }
        out[row][col] = amp;
    }
    out
}

/// Writes a matrix that is `i^k P` for some Pauli string `P` as `(k, letters)`.
pub fn decompose_pauli(mat: &Matrix, n: usize) -> Option<(u8, String)> {
    let dim = 1usize << n;
    for code in 0..4usize.pow(n as u32) {
        let letters: String = (0..n).map(|q| ['I', 'X', 'Y', 'Z'][(code >> (2 * (n - 1 - q))) & 3]).collect();
        let p = pauli_matrix(0, &letters);
        // tr(P^dag M) / dim
        let mut tr = c(0.0, 0.0);
        for (i, prow) in p.iter().enumerate() {
            for (j, pv) in prow.iter().enumerate() {
                tr += pv.conj() * mat[i][j];
            }
        }
        tr /= dim as f64;
        if (tr.norm() - 1.0).abs() < 1e-9 {
            let k = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]
                .iter()
                .position(|ph| (tr - ph).norm() < 1e-9)?;
            return Some((k as u8, letters));
        }
    }
    None
}

/// Input qubits that can reach qubit `j` through the layers, by a backward sweep.
pub fn lightcone(circ: &QuantumCircuit, j: usize) -> Vec<usize> {
    let mut reach = vec![false; circ.n()];
    reach[j] = true;
    for layer in circ.layers().iter().rev() {
        for g in layer {
            if g.qubits().iter().any(|&q| reach[q]) {
                for &q in g.qubits() {
                    reach[q] = true;
                }
            }
        }
    }
    (0..circ.n()).filter(|&q| reach[q]).collect()
}
