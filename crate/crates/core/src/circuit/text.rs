//! Text format for circuits.
//!
//! ```text
//! qc n=3 m=2
//! #section H
//! H 0; H 1; H 2
//! ```
//!
//! The header may carry layers on the same line after a `/`. Layers are
//! separated by `/` or by line breaks and gates within a layer by `;`.
//! `#section <tag>` lines mark builder sections; other `#` lines are comments.

use std::fmt::Write as _;

use super::{Gate, GateKind, QuantumCircuit, Section, SectionTag};
use crate::error::{Error, Result};

fn parse_header(text: &str, line: usize) -> Result<(usize, usize)> {
    let mut tokens = text.split_whitespace();
    if tokens.next() != Some("qc") {
        return Err(Error::parse(line, "header must start with `qc`"));
    }
    let (mut n, mut m) = (None, None);
    for tok in tokens {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected key=value, found {tok:?}")))?;
        let v: usize = val
            .parse()
            .map_err(|e| Error::parse(line, format!("{key}: {e}")))?;
        match key {
            "n" => n = Some(v),
            "m" => m = Some(v),
            _ => return Err(Error::parse(line, format!("unknown header field {key:?}"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(line, "missing n=<int>"))?;
    let m = m.ok_or_else(|| Error::parse(line, "missing m=<int>"))?;
    Ok((n, m))
}

fn parse_gate(text: &str, n: usize, line: usize) -> Result<Gate> {
    let mut tokens = text.split_whitespace();
    let name = tokens.next().ok_or_else(|| Error::parse(line, "empty gate"))?;
    let kind: GateKind = name
        .parse()
        .map_err(|_| Error::parse(line, format!("unknown gate {name:?}")))?;
    let qubits = tokens
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| Error::parse(line, format!("qubit index {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let gate = Gate::new(kind, qubits).map_err(|e| match e {
        Error::Arity { .. } => e,
        other => Error::parse(line, other.to_string()),
    })?;
    gate.check_range(n)?;
    Ok(gate)
}

pub fn parse_circuit(text: &str) -> Result<QuantumCircuit> {
    let mut header: Option<(usize, usize)> = None;
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    let mut sections: Vec<Section> = Vec::new();
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("#section") {
            if header.is_none() {
                return Err(Error::parse(line, "section marker before header"));
            }
            let tag: SectionTag = rest
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(line, e.to_string()))?;
            if let Some(prev) = sections.last_mut() {
                prev.end = layers.len();
            }
            sections.push(Section {
                tag,
                start: layers.len(),
                end: layers.len(),
            });
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let body = match header {
            None => {
                let (head, rest) = trimmed.split_once('/').unwrap_or((trimmed, ""));
                header = Some(parse_header(head, line)?);
                rest
            }
            Some(_) => trimmed,
        };
        let (n, _) = header.expect("header parsed above");
        for layer_text in body.split('/') {
            let layer_text = layer_text.trim();
            if layer_text.is_empty() {
                continue;
            }
            let mut layer = Vec::new();
            let mut used = 0u64;
            for gate_text in layer_text.split(';').map(str::trim).filter(|g| !g.is_empty()) {
                let gate = parse_gate(gate_text, n, line)?;
                let mask = gate.mask(n);
                if used & mask != 0 {
                    return Err(Error::parse(line, format!("gate `{gate}` overlaps another gate in its layer")));
                }
                used |= mask;
                layer.push(gate);
            }
            layers.push(layer);
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(last_line, "missing `qc` header"))?;
    if let Some(prev) = sections.last_mut() {
        prev.end = layers.len();
    }
    QuantumCircuit::new(n, m, layers, sections).map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::parse(last_line, msg),
        other => other,
    })
}

/// One layer per line, with section markers where sections begin.
pub fn render_circuit(c: &QuantumCircuit) -> String {
    let mut out = format!("qc n={} m={}\n", c.n(), c.m());
    let layers = c.layers();
    for li in 0..=layers.len() {
        for s in c.sections().iter().filter(|s| s.start == li) {
            let _ = writeln!(out, "#section {}", s.tag.name());
        }
        if let Some(layer) = layers.get(li) {
            let gates: Vec<String> = layer.iter().map(Gate::to_string).collect();
            let _ = writeln!(out, "{}", gates.join("; "));
        }
    }
    out
}
