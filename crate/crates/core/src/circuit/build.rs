use rand::Rng;

use super::{asap_layers, Gate, GateKind, QuantumCircuit, Section, SectionTag};
use crate::error::{Error, Result};
use crate::rng::{self, Op};

fn h_layer(qubits: &[usize], what: &str) -> Result<Vec<Gate>> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!("qubit set {what} has duplicates")));
    }
    Ok(sorted.into_iter().map(Gate::h).collect())
}

/// Appends `gates` packed into layers and records them as one section.
fn push_section(layers: &mut Vec<Vec<Gate>>, sections: &mut Vec<Section>, tag: SectionTag, n: usize, gates: &[Gate]) {
    let start = layers.len();
    layers.extend(asap_layers(n, gates));
    sections.push(Section {
        tag,
        start,
        end: layers.len(),
    });
}

/// `H_R D H_Q` with `D` a basis-preserving gate sequence.
pub fn build_simon_type(n: usize, m: usize, q: &[usize], r: &[usize], d: &[Gate]) -> Result<QuantumCircuit> {
    if let Some(g) = d.iter().find(|g| !g.kind().is_basis_preserving()) {
        return Err(Error::invalid(format!("D must be basis-preserving, found `{g}`")));
    }
    for g in d {
        g.check_range(n)?;
    }
    let hq = h_layer(q, "Q")?;
    let hr = h_layer(r, "R")?;
    for g in hq.iter().chain(&hr) {
        g.check_range(n)?;
    }
    let mut layers = Vec::new();
    let mut sections = Vec::new();
    push_section(&mut layers, &mut sections, SectionTag::Q, n, &hq);
    push_section(&mut layers, &mut sections, SectionTag::D, n, d);
    push_section(&mut layers, &mut sections, SectionTag::R, n, &hr);
    QuantumCircuit::new(n, m, layers, sections)
}

/// `E T^n H^n` with `E` over `{H, S, CZ}`.
pub fn build_clifford_magic(n: usize, m: usize, e: &[Gate]) -> Result<QuantumCircuit> {
    if let Some(g) = e
        .iter()
        .find(|g| !matches!(g.kind(), GateKind::H | GateKind::S | GateKind::CZ))
    {
        return Err(Error::invalid(format!("E may only use H, S, CZ; found `{g}`")));
    }
    for g in e {
        g.check_range(n)?;
    }
    let hs: Vec<Gate> = (0..n).map(Gate::h).collect();
    let ts: Vec<Gate> = (0..n).map(Gate::t).collect();
    let mut layers = Vec::new();
    let mut sections = Vec::new();
    push_section(&mut layers, &mut sections, SectionTag::H, n, &hs);
    push_section(&mut layers, &mut sections, SectionTag::T, n, &ts);
    push_section(&mut layers, &mut sections, SectionTag::E, n, e);
    QuantumCircuit::new(n, m, layers, sections)
}

fn random_single<R: Rng>(rng: &mut R, q: usize) -> Gate {
    match rng.random_range(0..3) {
        0 => Gate::h(q),
        1 => Gate::t(q),
        _ => Gate::s(q),
    }
}

/// Brickwork of exactly `d` layers in which every qubit is acted on in every
/// layer: CZ bricks on alternating offsets, random H/T/S elsewhere.
pub fn build_random_constant_depth(n: usize, m: usize, d: usize, seed: u64) -> Result<QuantumCircuit> {
    if d > 8 {
        return Err(Error::invalid(format!("depth {d} exceeds 8")));
    }
    let mut rng = rng::stream(seed, Op::Build, rng::derive(1, &[n as u64, m as u64, d as u64]), 0);
    let mut layers = Vec::with_capacity(d);
    for l in 0..d {
        let mut layer = Vec::new();
        let mut q = 0;
        if l % 2 == 1 && n > 1 {
            layer.push(random_single(&mut rng, 0));
            q = 1;
        }
        while q < n {
            if q + 1 < n && rng.random_bool(0.75) {
                layer.push(Gate::cz(q, q + 1));
                q += 2;
            } else {
                layer.push(random_single(&mut rng, q));
                q += 1;
            }
        }
        layers.push(layer);
    }
    QuantumCircuit::new(n, m, layers, Vec::new())
}

/// Random gate sequence over the full gate set, greedily layered.
pub fn random_circuit(n: usize, m: usize, size: usize, seed: u64) -> Result<QuantumCircuit> {
    let mut rng = rng::stream(seed, Op::Build, rng::derive(2, &[n as u64, m as u64, size as u64]), 0);
    let kinds: Vec<GateKind> = GateKind::ALL
        .iter()
        .copied()
        .filter(|k| k.arity() <= n && !matches!(k, GateKind::Tdg | GateKind::Sdg))
        .collect();
    let gates = (0..size)
        .map(|_| {
            let kind = kinds[rng.random_range(0..kinds.len())];
            Gate::new(kind, distinct_qubits(&mut rng, n, kind.arity())).expect("distinct qubits")
        })
        .collect();
    QuantumCircuit::from_gates(n, m, gates)
}

fn distinct_qubits<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, k).into_vec()
}

/// Random Clifford sequence over `{H, S, CZ}`.
pub fn random_clifford_gates<R: Rng>(rng: &mut R, n: usize, size: usize) -> Vec<Gate> {
    (0..size)
        .map(|_| match rng.random_range(0..if n > 1 { 3 } else { 2 }) {
            0 => Gate::h(rng.random_range(0..n)),
            1 => Gate::s(rng.random_range(0..n)),
            _ => {
                let qs = distinct_qubits(rng, n, 2);
                Gate::cz(qs[0], qs[1])
            }
        })
        .collect()
}

/// Random diagonal sequence over `{Z, S, T, CZ, CCZ}`.
pub fn random_diagonal_gates<R: Rng>(rng: &mut R, n: usize, size: usize) -> Vec<Gate> {
    let kinds: Vec<GateKind> = [GateKind::Z, GateKind::S, GateKind::T, GateKind::CZ, GateKind::CCZ]
        .into_iter()
        .filter(|k| k.arity() <= n)
        .collect();
    (0..size)
        .map(|_| {
            let kind = kinds[rng.random_range(0..kinds.len())];
            Gate::new(kind, distinct_qubits(rng, n, kind.arity())).expect("distinct qubits")
        })
        .collect()
}
