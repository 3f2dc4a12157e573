//! Pauli-expectation backends.
//!
//! Each backend estimates `<0|C^dag (Z(s) (x) I) C|0>` for a circuit `C` and a
//! Z-mask `s` on the measured prefix:
//!
//! * `exact`: the dense statevector oracle;
//! * `ct-ecs`: importance sampling over a CT state and an ECS observable, for
//!   Simon-type (including IQP) and Clifford Magic circuits;
//! * `clifford`: exact Pauli conjugation for Clifford Magic circuits and for
//!   circuits made only of Clifford gates;
//! * `commuting`: Hadamard-test sampling through emulated commuting-circuit access.

pub mod ct;
pub mod ecs;
pub mod estimator;
pub mod pauli;

pub use ct::{apply_basis_preserving, apply_gates, apply_phase_permutation, product_ct_state, CTState, Prep};
pub use ecs::{
    ecs_for_simon_type, ecs_from_pauli, hadamard_observable, simon_type_observable, BasisStep, EcsOperation,
    PhasePermutation,
};
pub use estimator::{
    enumerate_y, estimate_ct_ecs, hoeffding_count, median_of_means_shape, y_value, CtEcsEstimate, TailPath, YMoments,
};
pub use pauli::{conjugate_by_gate, conjugate_pauli_through_clifford, PauliOperator};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bits::Bits;
use crate::circuit::{CircuitFamily, Gate, QuantumCircuit, SectionTag};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BackendTag {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "ct-ecs")]
    CtEcs,
    #[serde(rename = "clifford")]
    Clifford,
    #[serde(rename = "commuting")]
    Commuting,
}

impl BackendTag {
    pub fn name(self) -> &'static str {
        match self {
            BackendTag::Exact => "exact",
            BackendTag::CtEcs => "ct-ecs",
            BackendTag::Clifford => "clifford",
            BackendTag::Commuting => "commuting",
        }
    }
}

impl fmt::Display for BackendTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BackendTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BackendTag::Exact),
            "ct-ecs" => Ok(BackendTag::CtEcs),
            "clifford" => Ok(BackendTag::Clifford),
            "commuting" => Ok(BackendTag::Commuting),
            _ => Err(Error::invalid(format!(
                "unknown backend {s:?} (expected exact, ct-ecs, clifford or commuting)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BackendEstimate {
    pub value: f64,
    pub samples: u64,
    /// How the value was obtained: `exact`, `identity`, `hoeffding`, `median_of_means`, `tableau`, `hadamard_test`.
    pub method: &'static str,
}

impl BackendEstimate {
    fn exact(value: f64, method: &'static str) -> Self {
        BackendEstimate {
            value,
            samples: 0,
            method,
        }
    }
}

/// The `(phi, A)` pair with `<phi|A|phi> = <0|C^dag (Z(s) (x) I) C|0>`.
pub fn ct_ecs_pair(c: &QuantumCircuit, s: &Bits) -> Result<(CTState, EcsOperation)> {
    let n = c.n();
    c.z_mask(s)?;
    match c.family() {
        CircuitFamily::SimonType { q, r, .. } => {
            let mut preps = vec![Prep::Zero; n];
            for &j in q {
                preps[j] = Prep::Plus;
            }
            let d = c.section_gates(SectionTag::D).unwrap_or_default();
            let phi = apply_gates(&product_ct_state(&preps)?, &d)?;
            Ok((phi, ecs_for_simon_type(r, s, n)?))
        }
        CircuitFamily::CliffordMagic => {
            let phi = product_ct_state(&vec![Prep::Magic; n])?;
            let p = conjugated_observable(c, s, SectionTag::E)?;
            Ok((phi, ecs_from_pauli(&p)?))
        }
        CircuitFamily::Generic => Err(Error::UnsupportedFamily(
            "the ct-ecs backend needs a Simon-type or Clifford Magic circuit; use exact or commuting".into(),
        )),
    }
}

fn conjugated_observable(c: &QuantumCircuit, s: &Bits, section: SectionTag) -> Result<PauliOperator> {
    let e = c.section_gates(section).unwrap_or_default();
    conjugate_pauli_through_clifford(&e, &PauliOperator::z_mask(c.n(), c.z_mask(s)?))
}

/// Exact expectation by Pauli conjugation.
pub fn clifford_expectation(c: &QuantumCircuit, s: &Bits) -> Result<f64> {
    if *c.family() == CircuitFamily::CliffordMagic {
        return Ok(conjugated_observable(c, s, SectionTag::E)?.magic_state_expectation());
    }
    if let Some(g) = c.gates().find(|g| !g.kind().is_clifford()) {
        return Err(Error::UnsupportedFamily(format!(
            "the clifford backend needs a Clifford Magic circuit or Clifford gates only; found `{g}`"
        )));
    }
    let gates: Vec<Gate> = c.gates().cloned().collect();
    let p = conjugate_pauli_through_clifford(&gates, &PauliOperator::z_mask(c.n(), c.z_mask(s)?))?;
    Ok(p.zero_state_expectation())
}

/// Estimate of `<0|C^dag (Z(s) (x) I) C|0>` within `epsilon` with probability at least `1 - delta`.
pub fn backend_expectation(
    tag: BackendTag,
    c: &QuantumCircuit,
    s: &Bits,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<BackendEstimate> {
    c.z_mask(s)?;
    if s.is_zero() {
        return Ok(BackendEstimate::exact(1.0, "identity"));
    }
    match tag {
        BackendTag::Exact => Ok(BackendEstimate::exact(
            crate::oracle::pauli_expectation_exact(c, s)?,
            "exact",
        )),
        BackendTag::CtEcs => {
            let (phi, a) = ct_ecs_pair(c, s)?;
            let est = estimate_ct_ecs(&phi, &a, epsilon, delta, seed)?;
            Ok(BackendEstimate {
                value: est.value,
                samples: est.samples,
                method: match est.path {
                    TailPath::Hoeffding => "hoeffding",
                    TailPath::MedianOfMeans => "median_of_means",
                },
            })
        }
        BackendTag::Clifford => Ok(BackendEstimate::exact(clifford_expectation(c, s)?, "tableau")),
        BackendTag::Commuting => {
            let est = crate::commuting::estimate_expectation_commuting(c, s, epsilon, delta, seed)?;
            Ok(BackendEstimate {
                value: est.value,
                samples: est.samples,
                method: "hadamard_test",
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_clifford_magic, build_simon_type, random_clifford_gates, random_diagonal_gates};
    use crate::oracle::pauli_expectation_exact;
    use crate::rng::{self, Op};

    #[test]
    fn tags_parse() {
        for t in ["exact", "ct-ecs", "clifford", "commuting"] {
            assert_eq!(t.parse::<BackendTag>().unwrap().name(), t);
        }
        assert!("ct".parse::<BackendTag>().is_err());
    }

    #[test]
    fn identity_observable_needs_no_samples() {
        let c = QuantumCircuit::from_gates(3, 2, vec![Gate::h(0), Gate::t(1)]).unwrap();
        let est = backend_expectation(BackendTag::CtEcs, &c, &Bits::zeros(2), 0.01, 0.01, 0).unwrap();
        assert_eq!((est.value, est.samples), (1.0, 0));
        assert!(matches!(
            backend_expectation(BackendTag::CtEcs, &c, &"01".parse().unwrap(), 0.1, 0.1, 0),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn ct_ecs_on_families() {
        let n = 10;
        let all: Vec<usize> = (0..n).collect();
        let mut r = rng::stream(4, Op::Verify, 0, 0);
        let iqp = build_simon_type(n, n, &all, &all, &random_diagonal_gates(&mut r, n, 25)).unwrap();
        let cm = build_clifford_magic(n, n, &random_clifford_gates(&mut r, n, 40)).unwrap();
        for c in [&iqp, &cm] {
            for _ in 0..3 {
                let s = Bits::new(n, rand::Rng::random_range(&mut r, 1..1u64 << n)).unwrap();
                let truth = pauli_expectation_exact(c, &s).unwrap();
                let est = backend_expectation(BackendTag::CtEcs, c, &s, 0.02, 1e-3, s.value()).unwrap();
                assert!((est.value - truth).abs() <= 0.02, "{} vs {truth}", est.value);
                assert_eq!(est.method, "hoeffding");
            }
        }
    }

    #[test]
    fn clifford_backend_is_exact() {
        let mut r = rng::stream(5, Op::Verify, 0, 0);
        let cm = build_clifford_magic(6, 4, &random_clifford_gates(&mut r, 6, 30)).unwrap();
        let pure =
            QuantumCircuit::from_gates(5, 5, random_clifford_gates(&mut r, 5, 30)).unwrap();
        for sv in 1..16u64 {
            let s = Bits::new(4, sv).unwrap();
            assert!((clifford_expectation(&cm, &s).unwrap() - pauli_expectation_exact(&cm, &s).unwrap()).abs() < 1e-12);
            let s = Bits::new(5, sv).unwrap();
            assert!((clifford_expectation(&pure, &s).unwrap() - pauli_expectation_exact(&pure, &s).unwrap()).abs() < 1e-12);
        }
        let t = QuantumCircuit::from_gates(1, 1, vec![Gate::t(0)]).unwrap();
        assert!(clifford_expectation(&t, &"1".parse().unwrap()).is_err());
    }

    #[test]
    fn clifford_magic_examples() {
        // E empty, n = 1: <Z> on T H |0> is 0
        let c = build_clifford_magic(1, 1, &[]).unwrap();
        assert!(pauli_expectation_exact(&c, &"1".parse().unwrap()).unwrap().abs() < 1e-12);
        // E = H: observable H Z H = X, and <X> on T H |0> is 1/sqrt2
        let c = build_clifford_magic(1, 1, &[Gate::h(0)]).unwrap();
        let p = conjugated_observable(&c, &"1".parse().unwrap(), SectionTag::E).unwrap();
        assert_eq!(p.to_string(), "+X");
        assert!((pauli_expectation_exact(&c, &"1".parse().unwrap()).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }
}
