//! Gate-level circuit representation.
//!
//! Circuits act on `n` qubits initialised to `|0^n>`; the first `m` qubits are
//! measured. Qubit indices are 0-based. Layers hold gates with pairwise
//! disjoint supports. Optional sections record how a builder assembled the
//! circuit, which is what the sampling backends dispatch on.

mod analysis;
mod build;
mod text;

pub use analysis::{asap_layers, depth, lightcone, lightcone_size_bound, max_arity};
pub use build::{
    build_clifford_magic, build_random_constant_depth, build_simon_type, random_circuit, random_clifford_gates,
    random_diagonal_gates,
};
pub use text::{parse_circuit, render_circuit};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bits::Bits;
use crate::error::{Error, Result};

/// Largest qubit count the circuit IR accepts (basis states are packed in a `u64`).
pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GateKind {
    H,
    T,
    /// `T^dagger`; needed to invert circuits without leaving the gate set.
    Tdg,
    S,
    /// `S^dagger`.
    Sdg,
    Z,
    X,
    CZ,
    CCZ,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::H,
        GateKind::T,
        GateKind::Tdg,
        GateKind::S,
        GateKind::Sdg,
        GateKind::Z,
        GateKind::X,
        GateKind::CZ,
        GateKind::CCZ,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CZ => 2,
            GateKind::CCZ => 3,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::Z => "Z",
            GateKind::X => "X",
            GateKind::CZ => "CZ",
            GateKind::CCZ => "CCZ",
        }
    }

    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            k => k,
        }
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(self) -> bool {
        !matches!(self, GateKind::H | GateKind::X)
    }

    /// Maps basis states to (phased) basis states.
    pub fn is_basis_preserving(self) -> bool {
        self != GateKind::H
    }

    pub fn is_clifford(self) -> bool {
        !matches!(self, GateKind::T | GateKind::Tdg | GateKind::CCZ)
    }

    /// Phase `e^{i pi k / 4}` picked up when all target bits are 1, as `k`.
    /// `None` for non-diagonal gates.
    pub fn diagonal_eighths(self) -> Option<u8> {
        match self {
            GateKind::T => Some(1),
            GateKind::Tdg => Some(7),
            GateKind::S => Some(2),
            GateKind::Sdg => Some(6),
            GateKind::Z | GateKind::CZ | GateKind::CCZ => Some(4),
            GateKind::H | GateKind::X => None,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown gate {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::Arity {
                gate: kind.name().into(),
                expected: kind.arity(),
                got: qubits.len(),
            });
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::invalid(format!("gate {kind} repeats qubit {q}")));
            }
        }
        Ok(Gate { kind, qubits })
    }

    pub fn h(q: usize) -> Self {
        Gate { kind: GateKind::H, qubits: vec![q] }
    }

    pub fn t(q: usize) -> Self {
        Gate { kind: GateKind::T, qubits: vec![q] }
    }

    pub fn s(q: usize) -> Self {
        Gate { kind: GateKind::S, qubits: vec![q] }
    }

    pub fn x(q: usize) -> Self {
        Gate { kind: GateKind::X, qubits: vec![q] }
    }

    pub fn z(q: usize) -> Self {
        Gate { kind: GateKind::Z, qubits: vec![q] }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Gate::new(GateKind::CZ, vec![a, b]).expect("CZ needs distinct qubits")
    }

    pub fn ccz(a: usize, b: usize, c: usize) -> Self {
        Gate::new(GateKind::CCZ, vec![a, b, c]).expect("CCZ needs distinct qubits")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind.inverse(),
            qubits: self.qubits.clone(),
        }
    }

    /// Same gate on qubits shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        Gate {
            kind: self.kind,
            qubits: self.qubits.iter().map(|q| q + offset).collect(),
        }
    }

    /// Packed mask of the gate's qubits in an `n`-qubit basis index.
    pub fn mask(&self, n: usize) -> u64 {
        self.qubits.iter().fold(0, |acc, &q| acc | crate::bits::bit_of(n, q))
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.qubits.iter().find(|&&q| q >= n) {
            Some(&q) => Err(Error::QubitOutOfRange { qubit: q, n }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SectionTag {
    Q,
    D,
    R,
    E,
    T,
    H,
}

impl SectionTag {
    pub fn name(self) -> &'static str {
        match self {
            SectionTag::Q => "Q",
            SectionTag::D => "D",
            SectionTag::R => "R",
            SectionTag::E => "E",
            SectionTag::T => "T",
            SectionTag::H => "H",
        }
    }
}

impl FromStr for SectionTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" => Ok(SectionTag::Q),
            "D" => Ok(SectionTag::D),
            "R" => Ok(SectionTag::R),
            "E" => Ok(SectionTag::E),
            "T" => Ok(SectionTag::T),
            "H" => Ok(SectionTag::H),
            _ => Err(Error::invalid(format!("unknown section {s:?}"))),
        }
    }
}

/// Layers `start..end` were produced by one builder step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub tag: SectionTag,
    pub start: usize,
    pub end: usize,
}

/// What the sampling backends know about a circuit's structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircuitFamily {
    Generic,
    /// `H_R D H_Q` with `D` basis-preserving. `iqp` when `Q = R = all` and `D` is diagonal.
    SimonType {
        q: Vec<usize>,
        r: Vec<usize>,
        iqp: bool,
    },
    /// `E T^n H^n` with `E` over `{H, S, CZ}`.
    CliffordMagic,
}

impl CircuitFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CircuitFamily::Generic => "generic",
            CircuitFamily::SimonType { iqp: true, .. } => "iqp",
            CircuitFamily::SimonType { .. } => "simon_type",
            CircuitFamily::CliffordMagic => "clifford_magic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumCircuit {
    n: usize,
    m: usize,
    layers: Vec<Vec<Gate>>,
    sections: Vec<Section>,
    family: CircuitFamily,
}

impl QuantumCircuit {
    /// Validates qubit ranges, layer disjointness and section structure.
    pub fn new(n: usize, m: usize, layers: Vec<Vec<Gate>>, sections: Vec<Section>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::invalid(format!("qubit count {n} not in 1..={MAX_QUBITS}")));
        }
        if m == 0 || m > n {
            return Err(Error::invalid(format!("measured prefix m = {m} must satisfy 1 <= m <= n = {n}")));
        }
        for (li, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::invalid(format!("layer {li} is empty")));
            }
            let mut used = 0u64;
            for g in layer {
                g.check_range(n)?;
                let mask = g.mask(n);
                if used & mask != 0 {
                    return Err(Error::invalid(format!("gates overlap in layer {li} at `{g}`")));
                }
                used |= mask;
            }
        }
        let mut c = QuantumCircuit {
            n,
            m,
            layers,
            sections,
            family: CircuitFamily::Generic,
        };
        c.family = c.detect_family()?;
        Ok(c)
    }

    /// Packs a gate sequence greedily into layers; no section metadata.
    pub fn from_gates(n: usize, m: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.check_range(n)?;
        }
        QuantumCircuit::new(n, m, asap_layers(n, &gates), Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn family(&self) -> &CircuitFamily {
        &self.family
    }

    /// Gates in application order.
    pub fn gates(&self) -> impl DoubleEndedIterator<Item = &Gate> + '_ {
        self.layers.iter().flatten()
    }

    pub fn size(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Gates of the first section with `tag`, in order.
    pub fn section_gates(&self, tag: SectionTag) -> Option<Vec<Gate>> {
        self.sections
            .iter()
            .find(|s| s.tag == tag)
            .map(|s| self.layers[s.start..s.end].iter().flatten().cloned().collect())
    }

    /// `C^dagger` as a generic circuit.
    pub fn inverse(&self) -> QuantumCircuit {
        let gates: Vec<Gate> = self.gates().rev().map(Gate::inverse).collect();
        QuantumCircuit::from_gates(self.n, self.m, gates).expect("inverse of a valid circuit is valid")
    }

    /// The same circuit with the measured prefix changed.
    pub fn with_measured(&self, m: usize) -> Result<QuantumCircuit> {
        QuantumCircuit::new(self.n, m, self.layers.clone(), self.sections.clone())
    }

    /// `Z(s) (x) I_{n-m}` as a packed `n`-bit Z-mask, checking `|s| = m`.
    pub fn z_mask(&self, s: &Bits) -> Result<u64> {
        if s.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "Z-mask {s} has {} bits but the circuit measures {} qubits",
                s.len(),
                self.m
            )));
        }
        Ok(s.extend_to(self.n)?.value())
    }

    fn detect_family(&self) -> Result<CircuitFamily> {
        if self.sections.is_empty() {
            return Ok(CircuitFamily::Generic);
        }
        let mut next = 0;
        for s in &self.sections {
            if s.start != next || s.end < s.start || s.end > self.layers.len() {
                return Err(Error::invalid("sections must tile the layers in order"));
            }
            next = s.end;
        }
        if next != self.layers.len() {
            return Err(Error::invalid("sections must cover every layer"));
        }
        let tags: Vec<SectionTag> = self.sections.iter().map(|s| s.tag).collect();
        let gates_of = |i: usize| -> Vec<&Gate> {
            let s = self.sections[i];
            self.layers[s.start..s.end].iter().flatten().collect()
        };
        let single_layer_of = |i: usize, kind: GateKind, what: &str| -> Result<Vec<usize>> {
            let mut qs = Vec::new();
            for g in gates_of(i) {
                if g.kind != kind {
                    return Err(Error::invalid(format!("section {what} may only contain {kind} gates, found `{g}`")));
                }
                if qs.contains(&g.qubits[0]) {
                    return Err(Error::invalid(format!("section {what} repeats qubit {}", g.qubits[0])));
                }
                qs.push(g.qubits[0]);
            }
            qs.sort_unstable();
            Ok(qs)
        };
        match tags.as_slice() {
            [SectionTag::Q, SectionTag::D, SectionTag::R] => {
                let q = single_layer_of(0, GateKind::H, "Q")?;
                let r = single_layer_of(2, GateKind::H, "R")?;
                let d = gates_of(1);
                if let Some(g) = d.iter().find(|g| !g.kind.is_basis_preserving()) {
                    return Err(Error::invalid(format!("section D must be basis-preserving, found `{g}`")));
                }
                let all = q.len() == self.n && r.len() == self.n;
                let iqp = all && d.iter().all(|g| g.kind.is_diagonal());
                Ok(CircuitFamily::SimonType { q, r, iqp })
            }
            [SectionTag::H, SectionTag::T, SectionTag::E] => {
                if single_layer_of(0, GateKind::H, "H")?.len() != self.n {
                    return Err(Error::invalid("section H must apply H to every qubit"));
                }
                if single_layer_of(1, GateKind::T, "T")?.len() != self.n {
                    return Err(Error::invalid("section T must apply T to every qubit"));
                }
                if let Some(g) = gates_of(2)
                    .iter()
                    .find(|g| !matches!(g.kind, GateKind::H | GateKind::S | GateKind::CZ))
                {
                    return Err(Error::invalid(format!("section E may only use H, S, CZ; found `{g}`")));
                }
                Ok(CircuitFamily::CliffordMagic)
            }
            _ => Ok(CircuitFamily::Generic),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_validation() {
        assert!(matches!(Gate::new(GateKind::CZ, vec![0]), Err(Error::Arity { .. })));
        assert!(Gate::new(GateKind::CCZ, vec![0, 1, 1]).is_err());
        assert_eq!("ccz".parse::<GateKind>().unwrap(), GateKind::CCZ);
        assert!("W".parse::<GateKind>().is_err());
    }

    #[test]
    fn circuit_validation() {
        assert!(matches!(
            QuantumCircuit::from_gates(2, 2, vec![Gate::h(2)]),
            Err(Error::QubitOutOfRange { qubit: 2, n: 2 })
        ));
        assert!(QuantumCircuit::new(2, 2, vec![vec![Gate::h(0), Gate::cz(0, 1)]], vec![]).is_err());
        assert!(QuantumCircuit::new(2, 3, vec![], vec![]).is_err());
        assert!(QuantumCircuit::new(2, 0, vec![], vec![]).is_err());
    }

    #[test]
    fn z_mask_pads_the_unmeasured_suffix() {
        let c = QuantumCircuit::from_gates(4, 2, vec![]).unwrap();
        assert_eq!(c.z_mask(&"10".parse().unwrap()).unwrap(), 0b1000);
        assert!(c.z_mask(&"100".parse().unwrap()).is_err());
    }

    #[test]
    fn inverse_reverses_and_daggers() {
        let c = QuantumCircuit::from_gates(2, 2, vec![Gate::t(0), Gate::cz(0, 1), Gate::s(1)]).unwrap();
        let inv: Vec<String> = c.inverse().gates().map(|g| g.to_string()).collect();
        assert_eq!(inv, vec!["SDG 1", "CZ 0 1", "TDG 0"]);
    }
}
