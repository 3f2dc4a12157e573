use std::collections::BTreeSet;

use super::{Gate, QuantumCircuit};

/// Greedy left-packing: each gate goes into the first layer after the last
/// layer touching any of its qubits.
pub fn asap_layers(n: usize, gates: &[Gate]) -> Vec<Vec<Gate>> {
    let mut next_free = vec![0usize; n];
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    for g in gates {
        let level = g.qubits().iter().map(|&q| next_free[q]).max().unwrap_or(0);
        if level == layers.len() {
            layers.push(Vec::new());
        }
        layers[level].push(g.clone());
        for &q in g.qubits() {
            next_free[q] = level + 1;
        }
    }
    layers
}

/// Number of layers after greedy re-layering of the gate sequence.
pub fn depth(c: &QuantumCircuit) -> usize {
    let gates: Vec<Gate> = c.gates().cloned().collect();
    asap_layers(c.n(), &gates).len()
}

/// Input qubits that can influence output qubit `j`.
pub fn lightcone(c: &QuantumCircuit, j: usize) -> BTreeSet<usize> {
    assert!(j < c.n(), "qubit {j} out of range for {} qubits", c.n());
    let mut cone = BTreeSet::from([j]);
    for layer in c.layers().iter().rev() {
        for g in layer {
            if g.qubits().iter().any(|q| cone.contains(q)) {
                cone.extend(g.qubits().iter().copied());
            }
        }
    }
    cone
}

/// Largest gate arity in the circuit (0 for the empty circuit).
pub fn max_arity(c: &QuantumCircuit) -> usize {
    c.gates().map(|g| g.qubits().len()).max().unwrap_or(0)
}

/// Generic lightcone size bound `min(n, a^d)` with `a` the largest gate arity.
pub fn lightcone_size_bound(c: &QuantumCircuit) -> usize {
    let a = max_arity(c).max(1);
    let d = depth(c);
    let mut bound = 1usize;
    for _ in 0..d {
        bound = bound.saturating_mul(a);
        if bound >= c.n() {
            return c.n();
        }
    }
    bound.min(c.n())
}
