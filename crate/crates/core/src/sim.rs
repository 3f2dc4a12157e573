//! Acceptance-probability estimation.
//!
//! With `g = (-1)^f`,
//! `p(C, f) = 1/2 - 1/2 p'(C, f)` and `p'(C, f) = sum_s g^(s) <Z(s)>`.
//! [`simulate`] recovers a set `L~` of significant indices of `g`, estimates
//! `A(s) ~ g^(s)` and `B(s) ~ <Z(s)>` on it, and outputs
//! `1/2 - 1/2 sum_{s in L~} A(s) B(s)`.
//!
//! The error in `p'` splits into three terms: the tail outside `L~`, the
//! backend error and the coefficient error. Each is kept below `1/(3p)`,
//! so the final estimate is within `1/(2p)` of `p(C, f)` with probability at
//! least `1 - delta`.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::backends::{backend_expectation, BackendTag};
use crate::bits::Bits;
use crate::boolfn::{
    coefficient_sample_count, estimate_fourier_coefficient, km_significant_set, lift_to_signed,
    make_inner_product_function, wht_spectrum, BooleanFunction, KmMode, KmParams,
};
use crate::circuit::{CircuitFamily, QuantumCircuit};
use crate::error::{Error, Result};
use crate::oracle;
use crate::rng::{self, Op};

/// How the per-index accuracies are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `A` at accuracy `1/q` and `B` at `1/r` with `q = 24 p theta^2`, `r = 12 p theta^2`.
    Conservative,
    /// Accuracies sized by the recovered `|L~| = l`: `A` at `1/(6 p l)` and `B` at `1/(3 p l)`.
    Adaptive,
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conservative" => Ok(Schedule::Conservative),
            "adaptive" => Ok(Schedule::Adaptive),
            _ => Err(Error::invalid(format!("unknown schedule {s:?} (expected conservative or adaptive)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AccuracyBudget {
    pub p_target: u64,
    pub q_l: u64,
    /// `3 p q_L`.
    pub theta: u64,
    /// `24 p theta^2`.
    pub q: u64,
    /// `12 p theta^2`.
    pub r: u64,
    pub delta: f64,
    pub schedule: Schedule,
    pub km_mode: KmMode,
    /// Largest total number of samples a run may plan; exceeding it is a budget error.
    pub sample_cap: u64,
}

impl AccuracyBudget {
    pub fn new(p_target: u64, q_l: u64, delta: f64) -> Result<Self> {
        if p_target == 0 || q_l == 0 {
            return Err(Error::invalid("p_target and q_L must be positive"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid(format!("delta {delta} not in (0, 1)")));
        }
        let theta = 3u64
            .checked_mul(p_target)
            .and_then(|v| v.checked_mul(q_l))
            .ok_or_else(|| Error::invalid("theta overflows"))?;
        let t2 = theta.checked_mul(theta).ok_or_else(|| Error::invalid("theta^2 overflows"))?;
        let q = 24u64
            .checked_mul(p_target)
            .and_then(|v| v.checked_mul(t2))
            .ok_or_else(|| Error::invalid("q overflows"))?;
        Ok(AccuracyBudget {
            p_target,
            q_l,
            theta,
            q,
            r: q / 2,
            delta,
            schedule: Schedule::Adaptive,
            km_mode: KmMode::Auto,
            sample_cap: crate::defaults::SAMPLE_CAP,
        })
    }

    /// `q_L = f.sparsity_bound + 1`.
    pub fn for_function(p_target: u64, f: &BooleanFunction, delta: f64) -> Result<Self> {
        Self::new(p_target, f.sparsity_bound().saturating_add(1), delta)
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_km_mode(mut self, mode: KmMode) -> Self {
        self.km_mode = mode;
        self
    }

    pub fn with_sample_cap(mut self, cap: u64) -> Self {
        self.sample_cap = cap;
        self
    }

    /// Bound on each of the three error terms of `p'`.
    pub fn term_bound(&self) -> f64 {
        1.0 / (3.0 * self.p_target as f64)
    }

    /// Guaranteed accuracy of the final estimate.
    pub fn tolerance(&self) -> f64 {
        1.0 / (2.0 * self.p_target as f64)
    }

    /// `(coefficient accuracy, backend accuracy)` once `|L~| = l` is known.
    pub fn accuracies(&self, l: usize) -> (f64, f64) {
        match self.schedule {
            Schedule::Conservative => (1.0 / self.q as f64, 1.0 / self.r as f64),
            Schedule::Adaptive => {
                let pl = self.p_target as f64 * l.max(1) as f64;
                (1.0 / (6.0 * pl), 1.0 / (3.0 * pl))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerIndex {
    pub s: Bits,
    /// `A(s)`.
    pub a: f64,
    /// `B(s)`.
    pub b: f64,
    pub backend: &'static str,
    pub a_samples: u64,
    pub b_samples: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationResult {
    pub estimate: f64,
    /// `1/2 - p'/2` before clamping to `[0, 1]`.
    pub raw_estimate: f64,
    pub clamped: bool,
    pub p_prime_estimate: f64,
    pub l_tilde: Vec<Bits>,
    pub per_s: Vec<PerIndex>,
    pub backend: BackendTag,
    pub budget: AccuracyBudget,
    pub coefficient_accuracy: f64,
    pub backend_accuracy: f64,
    pub km_exact: bool,
    pub km_samples: u64,
    pub seed: u64,
    pub wall_time_s: f64,
}

impl SimulationResult {
    /// The same record without timing, for reproducibility comparisons.
    pub fn without_timing(&self) -> SimulationResult {
        SimulationResult {
            wall_time_s: 0.0,
            ..self.clone()
        }
    }
}

/// Fails early when the backend cannot handle the circuit.
pub fn check_backend(tag: BackendTag, c: &QuantumCircuit) -> Result<()> {
    match tag {
        BackendTag::Exact | BackendTag::Commuting => {
            let need = c.n() + usize::from(tag == BackendTag::Commuting);
            if need > oracle::MAX_ORACLE_QUBITS {
                return Err(Error::Capacity(format!(
                    "the {tag} backend simulates {need} qubits; limit {}",
                    oracle::MAX_ORACLE_QUBITS
                )));
            }
            Ok(())
        }
        BackendTag::CtEcs => match c.family() {
            CircuitFamily::Generic => Err(Error::UnsupportedFamily(
                "ct-ecs needs a Simon-type or Clifford Magic circuit".into(),
            )),
            _ => Ok(()),
        },
        BackendTag::Clifford => {
            if *c.family() == CircuitFamily::CliffordMagic || c.gates().all(|g| g.kind().is_clifford()) {
                Ok(())
            } else {
                Err(Error::UnsupportedFamily(
                    "clifford needs a Clifford Magic circuit or Clifford gates only".into(),
                ))
            }
        }
    }
}

/// Estimates `p(C, f)`; see the module docs.
pub fn simulate(
    c: &QuantumCircuit,
    f: &BooleanFunction,
    backend: BackendTag,
    budget: &AccuracyBudget,
    seed: u64,
) -> Result<SimulationResult> {
    let start = Instant::now();
    if f.m() != c.m() {
        return Err(Error::DimensionMismatch(format!(
            "function on {} bits, circuit measures {}",
            f.m(),
            c.m()
        )));
    }
    check_backend(backend, c)?;
    let g = lift_to_signed(f);
    let m = f.m();
    let stage_delta = budget.delta / 3.0;

    // Step 1: significant set.
    let km = KmParams::new(budget.theta as f64, stage_delta, m)?.with_mode(budget.km_mode);
    let km_runs_mc = match budget.km_mode {
        KmMode::Exact => false,
        KmMode::MonteCarlo => true,
        KmMode::Auto => m > crate::boolfn::MAX_EXACT_BITS,
    };
    if km_runs_mc && km.sample_budget.saturating_mul(2) > budget.sample_cap {
        return Err(Error::Budget(format!(
            "one KM level needs {} samples per prefix, above the cap {}",
            km.sample_budget.saturating_mul(2),
            budget.sample_cap
        )));
    }
    let outcome = km_significant_set(&g, &km, rng::derive(seed, &[Op::Simulate as u64, 1]))?;
    let l = outcome.set.len();
    let (acc_a, acc_b) = budget.accuracies(l);
    let per_delta = stage_delta / l.max(1) as f64;

    let planned_a = coefficient_sample_count(acc_a, per_delta);
    let planned_b = if matches!(backend, BackendTag::CtEcs | BackendTag::Commuting) {
        4 * crate::backends::hoeffding_count(acc_b, per_delta)
    } else {
        0
    };
    let planned = (l as u64).saturating_mul(planned_a.saturating_add(planned_b));
    if planned > budget.sample_cap {
        return Err(Error::Budget(format!(
            "{l} indices at accuracies ({acc_a:e}, {acc_b:e}) need about {planned} samples, above the cap {}",
            budget.sample_cap
        )));
    }

    // Steps 2 and 3: per-index estimates.
    let coeff_seed = rng::derive(seed, &[Op::Simulate as u64, 2]);
    let per_s: Vec<PerIndex> = outcome
        .set
        .par_iter()
        .map(|s| {
            let a = estimate_fourier_coefficient(&g, s, acc_a, per_delta, coeff_seed)?;
            let b = if s.is_zero() {
                crate::backends::BackendEstimate {
                    value: 1.0,
                    samples: 0,
                    method: "identity",
                }
            } else {
                let bseed = rng::derive(seed, &[Op::Simulate as u64, 3, s.value()]);
                backend_expectation(backend, c, s, acc_b, per_delta, bseed)?
            };
            Ok(PerIndex {
                s: *s,
                a: a.value,
                b: b.value,
                backend: b.method,
                a_samples: a.samples,
                b_samples: b.samples,
            })
        })
        .collect::<Result<_>>()?;

    // Step 4.
    let p_prime: f64 = per_s.iter().map(|e| e.a * e.b).sum();
    let raw = 0.5 - 0.5 * p_prime;
    let estimate = raw.clamp(0.0, 1.0);
    Ok(SimulationResult {
        estimate,
        raw_estimate: raw,
        clamped: estimate != raw,
        p_prime_estimate: p_prime,
        l_tilde: outcome.set,
        per_s,
        backend,
        budget: *budget,
        coefficient_accuracy: acc_a,
        backend_accuracy: acc_b,
        km_exact: outcome.exact,
        km_samples: outcome.samples,
        seed,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRecord {
    /// `sum_{s in L \ L~} g^(s) <Z(s)>`.
    pub tail_term: f64,
    /// `sum_{s in L~} g^(s) (<Z(s)> - B(s))`.
    pub backend_term: f64,
    /// `sum_{s in L~} (g^(s) - A(s)) B(s)`.
    pub coefficient_term: f64,
    pub term_bound: f64,
    pub tail_ok: bool,
    pub backend_ok: bool,
    pub coefficient_ok: bool,
    pub exact_p: f64,
    pub exact_p_prime: f64,
    pub estimate: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
    /// `|p'_exact - p'_estimate - (sum of the three terms)|`; zero up to rounding.
    pub decomposition_residual: f64,
}

/// Largest circuit and function sizes the audit accepts.
pub const AUDIT_MAX_QUBITS: usize = 12;
pub const AUDIT_MAX_BITS: usize = 10;

/// Runs [`simulate`] and splits its error on `p'` into the three terms, exactly.
pub fn error_budget_audit(
    c: &QuantumCircuit,
    f: &BooleanFunction,
    backend: BackendTag,
    budget: &AccuracyBudget,
    seed: u64,
) -> Result<(SimulationResult, AuditRecord)> {
    if c.n() > AUDIT_MAX_QUBITS || f.m() > AUDIT_MAX_BITS {
        return Err(Error::Capacity(format!(
            "audit needs n <= {AUDIT_MAX_QUBITS} and m <= {AUDIT_MAX_BITS}"
        )));
    }
    let result = simulate(c, f, backend, budget, seed)?;
    let ghat = wht_spectrum(&lift_to_signed(f))?;
    let z = oracle::output_distribution(c)?.z_expectations();
    let zs = |s: &Bits| z[s.value() as usize];

    let in_lt = |s: &Bits| result.l_tilde.binary_search(s).is_ok();
    let tail: f64 = ghat.iter().filter(|(s, _)| !in_lt(s)).map(|(s, g)| g * zs(s)).sum();
    let backend_term: f64 = result.per_s.iter().map(|e| ghat.get(&e.s) * (zs(&e.s) - e.b)).sum();
    let coefficient_term: f64 = result.per_s.iter().map(|e| (ghat.get(&e.s) - e.a) * e.b).sum();
    let exact_p_prime: f64 = ghat.iter().map(|(s, g)| g * zs(s)).sum();
    let exact_p = oracle::acceptance_probability_exact(c, f)?;
    let bound = budget.term_bound();
    let abs_error = (exact_p - result.estimate).abs();
    let record = AuditRecord {
        tail_term: tail,
        backend_term,
        coefficient_term,
        term_bound: bound,
        tail_ok: tail.abs() < bound,
        backend_ok: backend_term.abs() < bound,
        coefficient_ok: coefficient_term.abs() < bound,
        exact_p,
        exact_p_prime,
        estimate: result.estimate,
        abs_error,
        tolerance: budget.tolerance(),
        within_tolerance: abs_error <= budget.tolerance(),
        decomposition_residual: (exact_p_prime - result.p_prime_estimate - tail - backend_term - coefficient_term).abs(),
    };
    Ok((result, record))
}

/// `<Z(s)>` recovered from the acceptance probability of the inner-product
/// function `h(x) = s.x`: `p(C, h) = 1/2 - 1/2 <Z(s)>`.
pub fn pauli_expectation_via_simulation(
    c: &QuantumCircuit,
    s: &Bits,
    backend: BackendTag,
    p_target: u64,
    delta: f64,
    seed: u64,
) -> Result<f64> {
    let h = make_inner_product_function(*s)?;
    let budget = AccuracyBudget::for_function(p_target, &h, delta)?;
    Ok(1.0 - 2.0 * simulate(c, &h, backend, &budget, seed)?.estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_simon_type, parse_circuit, random_circuit};

    #[test]
    fn schedule_arithmetic() {
        let b = AccuracyBudget::new(10, 9, 0.01).unwrap();
        assert_eq!(b.theta, 270);
        assert_eq!(b.q, 24 * 10 * 270 * 270);
        assert_eq!(b.r, 12 * 10 * 270 * 270);
        assert!(b.r < b.q);
        let (a, r) = b.with_schedule(Schedule::Conservative).accuracies(5);
        assert_eq!((a, r), (1.0 / b.q as f64, 1.0 / b.r as f64));
        let (a, r) = b.accuracies(9);
        assert_eq!((a, r), (1.0 / 540.0, 1.0 / 270.0));
        assert!(AccuracyBudget::new(0, 1, 0.1).is_err());
        assert!(AccuracyBudget::new(1, 1, 1.0).is_err());
    }

    #[test]
    fn conservative_schedule_hits_the_cap() {
        let c = QuantumCircuit::from_gates(2, 2, vec![]).unwrap();
        let f = BooleanFunction::parity(2).unwrap();
        let b = AccuracyBudget::for_function(10, &f, 0.01).unwrap().with_schedule(Schedule::Conservative);
        assert!(matches!(simulate(&c, &f, BackendTag::Exact, &b, 1), Err(Error::Budget(_))));
    }

    #[test]
    fn constant_one() {
        let c = random_circuit(3, 3, 15, 1).unwrap();
        let f = BooleanFunction::constant_one(3).unwrap();
        let b = AccuracyBudget::for_function(10, &f, 0.01).unwrap();
        let r = simulate(&c, &f, BackendTag::Exact, &b, 1).unwrap();
        assert_eq!(r.l_tilde, vec![Bits::zeros(3)]);
        assert_eq!(r.per_s[0].b, 1.0);
        assert_eq!(r.estimate, 1.0);
    }

    #[test]
    fn identity_parity() {
        let c = QuantumCircuit::from_gates(3, 3, vec![]).unwrap();
        let f = BooleanFunction::parity(3).unwrap();
        let b = AccuracyBudget::for_function(10, &f, 0.01).unwrap();
        let r = simulate(&c, &f, BackendTag::Exact, &b, 2).unwrap();
        assert_eq!(r.l_tilde, vec![Bits::ones(3)]);
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn audit_terms() {
        let c = random_circuit(8, 4, 30, 3).unwrap();
        let f = BooleanFunction::and(4).unwrap();
        let b = AccuracyBudget::for_function(5, &f, 0.01).unwrap();
        let (_, a) = error_budget_audit(&c, &f, BackendTag::Exact, &b, 3).unwrap();
        assert!(a.tail_ok && a.backend_ok && a.coefficient_ok, "{a:?}");
        assert!(a.backend_term.abs() < 1e-12);
        assert!(a.decomposition_residual < 1e-9);
        assert!(a.within_tolerance);

        let parity = BooleanFunction::parity(4).unwrap();
        let (_, a) = error_budget_audit(&c, &parity, BackendTag::Exact, &b, 3).unwrap();
        assert_eq!(a.tail_term, 0.0);
    }

    #[test]
    fn forward_examples() {
        let id = QuantumCircuit::from_gates(3, 3, vec![]).unwrap();
        let s: Bits = "101".parse().unwrap();
        assert!((pauli_expectation_via_simulation(&id, &s, BackendTag::Exact, 10, 0.01, 1).unwrap() - 1.0).abs() <= 0.2);
        let hn = parse_circuit("qc n=3 m=3 / H 0; H 1; H 2").unwrap();
        let v = pauli_expectation_via_simulation(&hn, &Bits::ones(3), BackendTag::Exact, 10, 0.01, 1).unwrap();
        assert!(v.abs() <= 0.2);
        let x0 = parse_circuit("qc n=3 m=3 / X 0").unwrap();
        let v = pauli_expectation_via_simulation(&x0, &"100".parse().unwrap(), BackendTag::Exact, 10, 0.01, 1).unwrap();
        assert!((v + 1.0).abs() <= 0.2);
    }

    #[test]
    fn generic_circuit_rejected_by_ct_ecs() {
        let c = random_circuit(3, 3, 10, 1).unwrap();
        let f = BooleanFunction::parity(3).unwrap();
        let b = AccuracyBudget::for_function(5, &f, 0.1).unwrap();
        assert!(matches!(simulate(&c, &f, BackendTag::CtEcs, &b, 1), Err(Error::UnsupportedFamily(_))));
        let all = [0, 1, 2];
        let iqp = build_simon_type(3, 3, &all, &all, &[]).unwrap();
        assert!(simulate(&iqp, &f, BackendTag::CtEcs, &b, 1).is_ok());
    }

    #[test]
    fn deterministic_under_seed() {
        let all: Vec<usize> = (0..5).collect();
        let c = build_simon_type(5, 5, &all, &all, &[crate::circuit::Gate::cz(0, 1), crate::circuit::Gate::t(3)]).unwrap();
        let f = BooleanFunction::junta(5, vec![0, 3], vec![false, true, true, true]).unwrap();
        let b = AccuracyBudget::for_function(4, &f, 0.05).unwrap();
        let x = simulate(&c, &f, BackendTag::CtEcs, &b, 9).unwrap();
        let y = simulate(&c, &f, BackendTag::CtEcs, &b, 9).unwrap();
        assert_eq!(x.without_timing(), y.without_timing());
    }
}
