//! Hadamard tests regrouped as commuting circuits.
//!
//! For a circuit `C` on `n` qubits and a Z-mask `s`, the Hadamard test on
//! `n + 1` qubits applies `H` to the ancilla and `C` to the rest, then
//! `CZ(ancilla, j)` for each `j` with `s_j = 1`, then `H` on the ancilla and
//! `C^dag` on the rest. The ancilla reads 0 with probability
//! `(1 + <Z(s)>) / 2`.
//!
//! Inserting `C C^dag` between the controlled-Z gates rewrites the test as a
//! product of composite gates `G_j = |+><+| (x) I + |-><-| (x) V_j` with
//! `V_j = C^dag Z_j C`. The `V_j` commute, hence so do the `G_j`. Each `V_j`
//! only depends on the gates in the backward lightcone of qubit `j`, which
//! bounds the support of `G_j`.
//!
//! The ancilla is qubit index `n`, the least significant bit of a basis index.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::Bits;
use crate::boolfn::{degree, lift_to_signed, wht_spectrum, BooleanFunction, MAX_EXACT_BITS};
use crate::circuit::{depth, lightcone, max_arity, Gate, QuantumCircuit};
use crate::error::{Error, Result};
use crate::oracle::{self, apply_gate, OutputDistribution, StateVector, MAX_ORACLE_QUBITS};
use crate::rng::{self, Op};

/// Tolerance for the two routes to the ancilla probability to agree.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct HadamardTestCircuit {
    base: QuantumCircuit,
    s: Bits,
    circuit: QuantumCircuit,
}

pub fn build_hadamard_test(c: &QuantumCircuit, s: &Bits) -> Result<HadamardTestCircuit> {
    c.z_mask(s)?;
    if s.is_zero() {
        return Err(Error::invalid("Hadamard test for s = 0^m is unnecessary: the expectation is 1"));
    }
    let n = c.n();
    let anc = n;
    let mut gates = vec![Gate::h(anc)];
    gates.extend(c.gates().cloned());
    gates.extend(s.ones_positions().into_iter().map(|j| Gate::cz(anc, j)));
    gates.push(Gate::h(anc));
    gates.extend(c.gates().rev().map(Gate::inverse));
    let circuit = QuantumCircuit::from_gates(n + 1, n + 1, gates)?;
    Ok(HadamardTestCircuit {
        base: c.clone(),
        s: *s,
        circuit,
    })
}

impl HadamardTestCircuit {
    pub fn base(&self) -> &QuantumCircuit {
        &self.base
    }

    pub fn s(&self) -> &Bits {
        &self.s
    }

    /// The full `(n + 1)`-qubit circuit, all qubits measured.
    pub fn circuit(&self) -> &QuantumCircuit {
        &self.circuit
    }

    pub fn ancilla(&self) -> usize {
        self.base.n()
    }
}

/// Probability that the ancilla reads 0, from the marginal of `psi`.
fn ancilla_zero_marginal(psi: &StateVector) -> f64 {
    psi.amplitudes().iter().step_by(2).map(Complex64::norm_sqr).sum()
}

/// Ancilla `Prob(0)`, computed from the dense state and checked against `(1 + <Z(s)>) / 2`.
pub fn ancilla_prob0(h: &HadamardTestCircuit) -> Result<f64> {
    if h.circuit.n() > MAX_ORACLE_QUBITS {
        return Err(Error::Capacity(format!(
            "Hadamard test on {} qubits exceeds the oracle limit {MAX_ORACLE_QUBITS}",
            h.circuit.n()
        )));
    }
    let marginal = ancilla_zero_marginal(&oracle::run(&h.circuit)?);
    let closed = 0.5 * (1.0 + oracle::pauli_expectation_exact(&h.base, &h.s)?);
    if (marginal - closed).abs() > ROUTE_AGREEMENT_TOL {
        return Err(Error::invalid(format!(
            "ancilla marginal {marginal} disagrees with the closed form {closed}"
        )));
    }
    Ok(marginal)
}

/// `G_j` for one target qubit `j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompositeGate {
    pub target: usize,
    /// Ancilla plus the lightcone of `j`, ascending.
    pub support: Vec<usize>,
    /// Gates of `C` inside the lightcone of `j`, in application order.
    #[serde(skip)]
    pub cone_gates: Vec<Gate>,
}

impl CompositeGate {
    /// Applies `G_j` to an `(n + 1)`-qubit amplitude vector whose ancilla is qubit `n`.
    fn apply(&self, amps: &mut [Complex64], n_plus_1: usize, anc: usize) {
        apply_gate(amps, n_plus_1, &Gate::h(anc));
        for g in &self.cone_gates {
            apply_gate(amps, n_plus_1, g);
        }
        apply_gate(amps, n_plus_1, &Gate::cz(anc, self.target));
        for g in self.cone_gates.iter().rev() {
            apply_gate(amps, n_plus_1, &g.inverse());
        }
        apply_gate(amps, n_plus_1, &Gate::h(anc));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutingCircuit {
    pub n_plus_1: usize,
    pub s: Bits,
    pub gates: Vec<CompositeGate>,
    pub gate_count: usize,
    pub locality: usize,
}

/// Gates of `c` that can influence qubit `j`, in application order.
fn cone_gates(c: &QuantumCircuit, j: usize) -> Vec<Gate> {
    let mut cone = BTreeSet::from([j]);
    let mut picked = Vec::new();
    for layer in c.layers().iter().rev() {
        for g in layer {
            if g.qubits().iter().any(|q| cone.contains(q)) {
                cone.extend(g.qubits().iter().copied());
                picked.push(g.clone());
            }
        }
    }
    picked.reverse();
    picked
}

pub fn regroup_commuting(h: &HadamardTestCircuit) -> CommutingCircuit {
    let c = &h.base;
    let anc = c.n();
    let gates: Vec<CompositeGate> = h
        .s
        .ones_positions()
        .into_iter()
        .map(|j| {
            let mut support: Vec<usize> = lightcone(c, j).into_iter().collect();
            support.push(anc);
            CompositeGate {
                target: j,
                support,
                cone_gates: cone_gates(c, j),
            }
        })
        .collect();
    let locality = gates.iter().map(|g| g.support.len()).max().unwrap_or(0);
    CommutingCircuit {
        n_plus_1: anc + 1,
        s: h.s,
        gate_count: gates.len(),
        locality,
        gates,
    }
}

impl CommutingCircuit {
    pub fn ancilla(&self) -> usize {
        self.n_plus_1 - 1
    }

    /// Product of the composite gates applied to `|0^{n+1}>`.
    pub fn run(&self) -> Result<StateVector> {
        let mut psi = StateVector::zero(self.n_plus_1)?;
        let mut amps = psi.amplitudes().to_vec();
        for g in &self.gates {
            g.apply(&mut amps, self.n_plus_1, self.ancilla());
        }
        psi = StateVector::from_amplitudes(self.n_plus_1, amps)?;
        Ok(psi)
    }

    pub fn output_distribution(&self) -> Result<OutputDistribution> {
        Ok(self.run()?.marginal(self.n_plus_1))
    }

    /// Max-norm of `[G_a, G_b]`, as a dense operator on the union of the two supports.
    pub fn commutator_max_norm(&self, a: usize, b: usize) -> Result<f64> {
        let (ga, gb) = (&self.gates[a], &self.gates[b]);
        let union: Vec<usize> = ga
            .support
            .iter()
            .chain(&gb.support)
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let k = union.len();
        if k > crate::oracle::dense::MAX_DENSE_QUBITS {
            return Err(Error::Capacity(format!("commutator on {k} qubits")));
        }
        let local = |g: &CompositeGate| -> CompositeGate {
            let map = |q: usize| union.binary_search(&q).expect("support inside union");
            CompositeGate {
                target: map(g.target),
                support: g.support.iter().map(|&q| map(q)).collect(),
                cone_gates: g
                    .cone_gates
                    .iter()
                    .map(|gate| Gate::new(gate.kind(), gate.qubits().iter().map(|&q| map(q)).collect()).expect("valid"))
                    .collect(),
            }
        };
        let (la, lb) = (local(ga), local(gb));
        let anc = union.binary_search(&self.ancilla()).expect("ancilla in support");
        let dim = 1usize << k;
        let worst = (0..dim)
            .into_par_iter()
            .map(|x| {
                let mut ab = vec![Complex64::new(0.0, 0.0); dim];
                ab[x] = Complex64::new(1.0, 0.0);
                let mut ba = ab.clone();
                lb.apply(&mut ab, k, anc);
                la.apply(&mut ab, k, anc);
                la.apply(&mut ba, k, anc);
                lb.apply(&mut ba, k, anc);
                ab.iter().zip(&ba).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutingEstimate {
    pub value: f64,
    pub samples: u64,
}

/// `4 ceil(2 ln(2/delta) / epsilon^2)` ancilla samples.
pub fn commuting_sample_count(epsilon: f64, delta: f64) -> u64 {
    4 * (2.0 * (2.0 / delta).ln() / (epsilon * epsilon)).ceil() as u64
}

/// Estimate of `<Z(s)>` from ancilla samples of the commuting circuit.
///
/// Sample access is emulated: the ancilla marginal of the regrouped circuit is
/// computed on a statevector and then sampled as a Bernoulli variable.
pub fn estimate_expectation_commuting(
    c: &QuantumCircuit,
    s: &Bits,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<CommutingEstimate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("need epsilon > 0 and delta in (0, 1), got {epsilon}, {delta}")));
    }
    if c.n() + 1 > MAX_ORACLE_QUBITS {
        return Err(Error::Capacity(format!(
            "emulated commuting access needs n + 1 <= {MAX_ORACLE_QUBITS}"
        )));
    }
    let cc = regroup_commuting(&build_hadamard_test(c, s)?);
    let p0 = ancilla_zero_marginal(&cc.run()?);
    Ok(sample_ancilla(p0, commuting_sample_count(epsilon, delta), seed, s.value()))
}

/// `1 - 2 * (fraction of ones)` over `samples` Bernoulli draws with `Prob(0) = p0`.
pub fn sample_ancilla(p0: f64, samples: u64, seed: u64, item: u64) -> CommutingEstimate {
    let ones: u64 = rng::chunks(samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(chunk, count)| {
            let mut r = rng::stream(seed, Op::Commuting, item, chunk);
            (0..count).filter(|_| r.random::<f64>() >= p0).count() as u64
        })
        .sum();
    CommutingEstimate {
        value: 1.0 - 2.0 * ones as f64 / samples as f64,
        samples,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    /// `None` for the degenerate case where no circuit is needed.
    pub s: Option<Bits>,
    pub gate_count: usize,
    /// `deg(f)`, exact when `m <= 20` or the spectrum is declared.
    pub degree: Option<usize>,
    pub locality: usize,
    /// `1 + max_j |lightcone(C, j)|` over the queried `j`.
    pub lightcone_bound: usize,
    /// `2^d + 1`, reported when every gate of `C` touches at most two qubits.
    pub two_local_bound: Option<usize>,
    pub gate_count_ok: bool,
    pub locality_ok: bool,
    pub degenerate: bool,
    pub pass: bool,
}

fn function_degree(f: &BooleanFunction) -> Option<usize> {
    let spec = if f.m() <= MAX_EXACT_BITS {
        wht_spectrum(f).ok()?
    } else {
        f.declared_spectrum()?
    };
    degree(&spec).ok()
}

pub fn resource_report(cc: &CommutingCircuit, c: &QuantumCircuit, f: &BooleanFunction) -> ResourceReport {
    let deg = function_degree(f);
    let lightcone_bound = 1 + cc.gates.iter().map(|g| g.support.len() - 1).max().unwrap_or(0);
    let two_local_bound = (max_arity(c) <= 2).then(|| (1usize << depth(c).min(62)) + 1);
    let gate_count_ok = cc.gate_count == cc.s.weight() && deg.is_none_or(|d| cc.gate_count <= d);
    let locality_ok = cc.locality <= lightcone_bound && two_local_bound.is_none_or(|b| cc.locality <= b);
    ResourceReport {
        s: Some(cc.s),
        gate_count: cc.gate_count,
        degree: deg,
        locality: cc.locality,
        lightcone_bound,
        two_local_bound,
        gate_count_ok,
        locality_ok,
        degenerate: false,
        pass: gate_count_ok && locality_ok,
    }
}

/// Reports for every non-zero `s` in the support of `g = (-1)^f` (exact spectrum, `m <= 20`).
pub fn resource_reports(c: &QuantumCircuit, f: &BooleanFunction) -> Result<Vec<ResourceReport>> {
    if f.m() != c.m() {
        return Err(Error::DimensionMismatch(format!("function on {} bits, circuit measures {}", f.m(), c.m())));
    }
    let g = lift_to_signed(f);
    let spec = wht_spectrum(&g)?;
    let mut out = Vec::new();
    for s in spec.support().into_iter().filter(|s| !s.is_zero()) {
        let cc = regroup_commuting(&build_hadamard_test(c, &s)?);
        out.push(resource_report(&cc, c, f));
    }
    if out.is_empty() {
        out.push(ResourceReport {
            s: None,
            gate_count: 0,
            degree: function_degree(f),
            locality: 0,
            lightcone_bound: 0,
            two_local_bound: None,
            gate_count_ok: true,
            locality_ok: true,
            degenerate: true,
            pass: true,
        });
    }
    Ok(out)
}
