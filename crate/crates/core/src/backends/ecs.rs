//! Efficiently-computable-sparse (ECS) operations.
//!
//! Column `x` of an ECS operation has at most `sparsity` non-zero entries, at
//! rows `gamma_j(x)` with values `beta_j(x)`. Padding entries have
//! `beta_j(x) = 0` and `gamma_j(x) = 0`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::pauli::PauliOperator;
use crate::bits::{bit_of, dot, Bits};
use crate::circuit::{Gate, GateKind};
use crate::error::{Error, Result};
use crate::oracle::eighth_root;

/// One step of a phase permutation acting on a basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisStep {
    /// `x -> x ^ mask`.
    Flip(u64),
    /// Phase `omega^k` when every bit of `mask` is set.
    AllOnesPhase { mask: u64, k: u8 },
    /// Phase `omega^k` when `mask . x` is odd.
    ParityPhase { mask: u64, k: u8 },
    /// Unconditional `omega^k`.
    GlobalPhase(u8),
}

/// A unitary `U|x> = omega^{e(x)} |pi(x)>` with `omega = e^{i pi/4}` and `pi`
/// a permutation, given as a sequence of simple steps. Both `U` and the
/// preimage map are evaluated in time linear in the number of steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePermutation {
    n: usize,
    steps: Vec<BasisStep>,
}

impl PhasePermutation {
    pub fn identity(n: usize) -> Self {
        PhasePermutation { n, steps: Vec::new() }
    }

    /// Compiles a sequence of basis-preserving gates.
    pub fn from_gates(n: usize, gates: &[Gate]) -> Result<Self> {
        let steps = gates
            .iter()
            .map(|g| {
                if g.qubits().iter().any(|&q| q >= n) {
                    return Err(Error::invalid(format!("gate `{g}` outside {n} qubits")));
                }
                match g.kind() {
                    GateKind::H => Err(Error::invalid(format!("`{g}` is not basis-preserving"))),
                    GateKind::X => Ok(BasisStep::Flip(g.mask(n))),
                    kind => Ok(BasisStep::AllOnesPhase {
                        mask: g.mask(n),
                        k: kind.diagonal_eighths().expect("diagonal"),
                    }),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PhasePermutation { n, steps })
    }

    /// `i^k X^x Z^z`: the Z part acts first, then the flip.
    pub fn from_pauli(p: &PauliOperator) -> Self {
        let mut steps = vec![BasisStep::GlobalPhase(2 * p.normal_form_power())];
        if p.z_bits() != 0 {
            steps.push(BasisStep::ParityPhase { mask: p.z_bits(), k: 4 });
        }
        if p.x_bits() != 0 {
            steps.push(BasisStep::Flip(p.x_bits()));
        }
        PhasePermutation { n: p.n(), steps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[BasisStep] {
        &self.steps
    }

    #[inline]
    fn phase_at(step: &BasisStep, x: u64) -> u8 {
        match *step {
            BasisStep::Flip(_) => 0,
            BasisStep::AllOnesPhase { mask, k } => {
                if x & mask == mask {
                    k
                } else {
                    0
                }
            }
            BasisStep::ParityPhase { mask, k } => {
                if dot(x, mask) == 1 {
                    k
                } else {
                    0
                }
            }
            BasisStep::GlobalPhase(k) => k,
        }
    }

    /// `(e, y)` with `U|x> = omega^e |y>`.
    #[inline]
    pub fn forward(&self, mut x: u64) -> (u8, u64) {
        let mut e = 0u8;
        for step in &self.steps {
            if let BasisStep::Flip(m) = *step {
                x ^= m;
            } else {
                e = e.wrapping_add(Self::phase_at(step, x));
            }
        }
        (e & 7, x)
    }

    /// `(e, x)` with `U|x> = omega^e |y>`.
    #[inline]
    pub fn preimage(&self, mut y: u64) -> (u8, u64) {
        let mut e = 0u8;
        for step in self.steps.iter().rev() {
            if let BasisStep::Flip(m) = *step {
                y ^= m;
            } else {
                e = e.wrapping_add(Self::phase_at(step, y));
            }
        }
        (e & 7, y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EcsOperation {
    /// Sparsity one: a phase permutation.
    BasisPreserving(PhasePermutation),
    /// Explicit column list for small `n`; `columns[x]` has exactly `sparsity` entries.
    Table {
        n: usize,
        sparsity: usize,
        columns: Vec<Vec<(Complex64, u64)>>,
    },
}

impl EcsOperation {
    pub fn from_columns(n: usize, columns: Vec<Vec<(Complex64, u64)>>) -> Result<Self> {
        if n > 16 || columns.len() != 1 << n {
            return Err(Error::invalid("column table needs 2^n columns and n <= 16"));
        }
        let sparsity = columns.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let columns = columns
            .into_iter()
            .map(|mut col| {
                col.resize(sparsity, (Complex64::new(0.0, 0.0), 0));
                col
            })
            .collect();
        Ok(EcsOperation::Table { n, sparsity, columns })
    }

    pub fn n(&self) -> usize {
        match self {
            EcsOperation::BasisPreserving(p) => p.n(),
            EcsOperation::Table { n, .. } => *n,
        }
    }

    pub fn sparsity(&self) -> usize {
        match self {
            EcsOperation::BasisPreserving(_) => 1,
            EcsOperation::Table { sparsity, .. } => *sparsity,
        }
    }

    pub fn is_basis_preserving(&self) -> bool {
        self.sparsity() == 1
    }

    pub fn beta(&self, j: usize, x: u64) -> Complex64 {
        match self {
            EcsOperation::BasisPreserving(p) => {
                assert_eq!(j, 0);
                eighth_root(p.forward(x).0)
            }
            EcsOperation::Table { columns, .. } => columns[x as usize][j].0,
        }
    }

    pub fn gamma(&self, j: usize, x: u64) -> u64 {
        match self {
            EcsOperation::BasisPreserving(p) => {
                assert_eq!(j, 0);
                p.forward(x).1
            }
            EcsOperation::Table { columns, .. } => columns[x as usize][j].1,
        }
    }

    /// All `(beta_j(x), gamma_j(x))` for column `x`.
    pub fn column(&self, x: u64) -> Vec<(Complex64, u64)> {
        (0..self.sparsity()).map(|j| (self.beta(j, x), self.gamma(j, x))).collect()
    }

    /// Dense matrix, for checks at small `n`.
    pub fn to_dense(&self) -> Result<crate::oracle::dense::DenseOp> {
        let n = self.n();
        if n > crate::oracle::dense::MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!("dense ECS matrix for n = {n}")));
        }
        let dim = 1usize << n;
        let mut m = crate::oracle::dense::DenseOp::zeros(dim, dim);
        for x in 0..dim {
            for (b, g) in self.column(x as u64) {
                m[(g as usize, x)] += b;
            }
        }
        Ok(m)
    }
}

/// Sparsity-one ECS form of a Hermitian Pauli operator.
pub fn ecs_from_pauli(p: &PauliOperator) -> Result<EcsOperation> {
    if !p.is_hermitian() {
        return Err(Error::invalid(format!("Pauli {p} has phase +-i and is not Hermitian")));
    }
    Ok(EcsOperation::BasisPreserving(PhasePermutation::from_pauli(p)))
}

/// `H_R (Z(s) (x) I) H_R`: `X` where `s_j = 1` and `j` is in `R`, `Z` where `s_j = 1` otherwise.
pub fn simon_type_observable(r: &[usize], s: &Bits, n: usize) -> Result<PauliOperator> {
    let zs = s.extend_to(n)?.value();
    let rmask = r.iter().fold(0u64, |acc, &q| acc | bit_of(n, q));
    Ok(PauliOperator::x_mask(n, zs & rmask).mul(&PauliOperator::z_mask(n, zs & !rmask)))
}

pub fn ecs_for_simon_type(r: &[usize], s: &Bits, n: usize) -> Result<EcsOperation> {
    ecs_from_pauli(&simon_type_observable(r, s, n)?)
}

/// `(X + Z)/sqrt2` on one qubit, tensored with identity: a Hermitian unitary of sparsity two.
pub fn hadamard_observable(n: usize, q: usize) -> Result<EcsOperation> {
    if q >= n || n > 16 {
        return Err(Error::invalid("hadamard observable needs q < n <= 16"));
    }
    let b = bit_of(n, q);
    let columns = (0..1u64 << n)
        .map(|x| {
            let z = if x & b == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            vec![(Complex64::new(z, 0.0), x), (Complex64::new(FRAC_1_SQRT_2, 0.0), x ^ b)]
        })
        .collect();
    EcsOperation::from_columns(n, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dense::{gates_unitary, max_abs_diff, pauli_string_matrix, DenseOp};

    fn hermitian_unitary(m: &DenseOp) -> bool {
        let id = DenseOp::identity(m.nrows(), m.ncols());
        max_abs_diff(m, &m.adjoint()) <= 1e-9 && max_abs_diff(&(m.adjoint() * m), &id) <= 1e-9
    }

    #[test]
    fn pauli_examples() {
        let z = ecs_from_pauli(&PauliOperator::from_letters(0, "Z").unwrap()).unwrap();
        assert_eq!(z.beta(0, 0), Complex64::new(1.0, 0.0));
        assert!((z.beta(0, 1) + Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!((z.gamma(0, 0), z.gamma(0, 1)), (0, 1));

        let x = ecs_from_pauli(&PauliOperator::from_letters(0, "X").unwrap()).unwrap();
        assert_eq!((x.gamma(0, 0), x.gamma(0, 1)), (1, 0));
        assert!((x.beta(0, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        for (ph, letters) in [(0, "XZ"), (2, "YX"), (0, "ZYI"), (2, "IIY")] {
            let p = PauliOperator::from_letters(ph, letters).unwrap();
            let dense = ecs_from_pauli(&p).unwrap().to_dense().unwrap();
            let sign = if ph == 0 { 1.0 } else { -1.0 };
            let want = pauli_string_matrix(letters) * Complex64::new(sign, 0.0);
            assert!(max_abs_diff(&dense, &want) < 1e-12, "{p}");
            assert!(hermitian_unitary(&dense));
        }
        assert!(ecs_from_pauli(&PauliOperator::from_letters(1, "X").unwrap()).is_err());
    }

    #[test]
    fn simon_type_examples() {
        let s: Bits = "111".parse().unwrap();
        let all = ecs_for_simon_type(&[0, 1, 2, 3], &s, 4).unwrap();
        assert!(max_abs_diff(&all.to_dense().unwrap(), &pauli_string_matrix("XXXI")) < 1e-12);
        let none = ecs_for_simon_type(&[], &s, 4).unwrap();
        assert!(max_abs_diff(&none.to_dense().unwrap(), &pauli_string_matrix("ZZZI")) < 1e-12);

        // against H_R Z(s) H_R built densely
        let s: Bits = "110".parse().unwrap();
        let r = [1, 2];
        let hr: Vec<Gate> = r.iter().map(|&q| Gate::h(q)).collect();
        let u = gates_unitary(3, &hr).unwrap();
        let want = &u * pauli_string_matrix("ZZI") * &u;
        let got = ecs_for_simon_type(&r, &s, 3).unwrap().to_dense().unwrap();
        assert!(max_abs_diff(&got, &want) < 1e-12);
    }

    #[test]
    fn phase_permutation_matches_dense() {
        let gates = vec![
            Gate::x(0),
            Gate::cz(0, 2),
            Gate::t(1),
            Gate::ccz(0, 1, 2),
            Gate::x(2),
            Gate::s(2),
            Gate::new(GateKind::Tdg, vec![0]).unwrap(),
        ];
        let pp = PhasePermutation::from_gates(3, &gates).unwrap();
        let u = gates_unitary(3, &gates).unwrap();
        for x in 0..8u64 {
            let (e, y) = pp.forward(x);
            assert!((u[(y as usize, x as usize)] - eighth_root(e)).norm() < 1e-12);
            assert_eq!(pp.preimage(y), (e, x));
        }
        assert!(PhasePermutation::from_gates(3, &[Gate::h(0)]).is_err());
    }

    #[test]
    fn column_table_padding() {
        let a = hadamard_observable(2, 1).unwrap();
        assert_eq!(a.sparsity(), 2);
        assert!(!a.is_basis_preserving());
        assert!(hermitian_unitary(&a.to_dense().unwrap()));
        let t = EcsOperation::from_columns(1, vec![vec![(Complex64::new(1.0, 0.0), 0)], vec![]]).unwrap();
        assert_eq!(t.column(1), vec![(Complex64::new(0.0, 0.0), 0)]);
    }
}
