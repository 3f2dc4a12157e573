//! Invariant suites run by `scpsim verify`.
//!
//! Each suite draws seeded random instances, checks one family of identities
//! against the statevector oracle, and counts violations. Statistical suites
//! allow the expected number of failures plus three binomial standard
//! deviations; exact suites allow none.

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::backends::{
    conjugate_pauli_through_clifford, ct_ecs_pair, enumerate_y, BackendTag, PauliOperator,
};
use crate::bits::Bits;
use crate::boolfn::{
    km_significant_set, lift_to_signed, wht_spectrum, BooleanFunction, KmMode, KmParams,
};
use crate::circuit::{
    build_clifford_magic, build_random_constant_depth, build_simon_type, random_circuit,
    random_clifford_gates, random_diagonal_gates, QuantumCircuit,
};
use crate::commuting::{ancilla_prob0, build_hadamard_test, regroup_commuting, resource_report};
use crate::error::Result;
use crate::oracle::{self, dense};
use crate::rng::{self, Op};
use crate::sim::{error_budget_audit, simulate, AccuracyBudget};

/// Tolerance for identities that hold exactly in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    /// Random instances per suite.
    pub cases: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            cases: 20,
            seed: rng::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: &'static str,
    pub cases: usize,
    pub violations: usize,
    pub allowed: usize,
    pub pass: bool,
    pub first_violation: Option<String>,
}

struct Tally {
    suite: &'static str,
    cases: usize,
    violations: usize,
    first: Option<String>,
}

impl Tally {
    fn new(suite: &'static str) -> Self {
        Tally {
            suite,
            cases: 0,
            violations: 0,
            first: None,
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(detail());
            }
        }
    }

    fn finish(self, allowed: usize) -> SuiteOutcome {
        SuiteOutcome {
            suite: self.suite,
            cases: self.cases,
            violations: self.violations,
            allowed,
            pass: self.violations <= allowed,
            first_violation: self.first,
        }
    }
}

/// `ceil(n delta + 3 sqrt(n delta (1 - delta)))`.
pub fn binomial_allowance(n: usize, delta: f64) -> usize {
    let mean = n as f64 * delta;
    (mean + 3.0 * (mean * (1.0 - delta)).sqrt()).ceil() as usize
}

pub fn random_truth_table<R: Rng>(r: &mut R, m: usize) -> Result<BooleanFunction> {
    BooleanFunction::truth_table(m, nonzero_table(r, 1 << m))
}

/// Uniform over tables with at least one `true` entry.
fn nonzero_table<R: Rng>(r: &mut R, len: usize) -> Vec<bool> {
    loop {
        let t: Vec<bool> = (0..len).map(|_| r.random()).collect();
        if t.contains(&true) {
            return t;
        }
    }
}

/// Junta on `k` distinct random variables with a random table.
pub fn random_junta<R: Rng>(r: &mut R, m: usize, k: usize) -> Result<BooleanFunction> {
    let mut vars = sample(r, m, k).into_vec();
    vars.sort_unstable();
    BooleanFunction::junta(m, vars, nonzero_table(r, 1 << k))
}

/// `p(C, f)`, `p_m^(s)` and the parity case against the Fourier formula.
pub fn fourier_identities(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut t = Tally::new("fourier_identities");
    let mut r = rng::stream(cfg.seed, Op::Verify, 1, 0);
    for i in 0..cfg.cases {
        let n = r.random_range(1..=6);
        let m = r.random_range(1..=n.min(5));
        let c = random_circuit(n, m, r.random_range(0..=30), rng::derive(cfg.seed, &[1, i as u64]))?;
        let f = random_truth_table(&mut r, m)?;
        let dist = oracle::output_distribution(&c)?;
        let z = dist.z_expectations();
        let ghat = wht_spectrum(&lift_to_signed(&f))?;
        let formula = 0.5 - 0.5 * ghat.iter().map(|(s, g)| g * z[s.value() as usize]).sum::<f64>();
        let exact = oracle::acceptance_probability_exact(&c, &f)?;
        t.check((formula - exact).abs() <= EXACT_TOL, || format!("case {i}: p {exact} vs {formula}"));

        let scale = (-(m as f64)).exp2();
        let fourier = dist.fourier();
        let worst = (0..1u64 << m)
            .map(|s| (fourier[s as usize] - scale * z[s as usize]).abs())
            .fold(0.0, f64::max);
        t.check(worst <= EXACT_TOL, || format!("case {i}: Fourier distribution off by {worst}"));

        let full = c.with_measured(n)?;
        let parity = oracle::acceptance_probability_exact(&full, &BooleanFunction::parity(n)?)?;
        let via_z = 0.5 - 0.5 * oracle::pauli_expectation_exact(&full, &Bits::ones(n))?;
        t.check((parity - via_z).abs() <= EXACT_TOL, || format!("case {i}: parity {parity} vs {via_z}"));
    }
    Ok(t.finish(0))
}

/// Monte Carlo KM against the exact spectrum of random 4-juntas.
pub fn km_contract(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut t = Tally::new("km_contract");
    let mut r = rng::stream(cfg.seed, Op::Verify, 2, 0);
    let (m, theta, delta) = (12, 4.0, 0.01);
    let params = KmParams::new(theta, delta, m)?.with_mode(KmMode::MonteCarlo);
    for i in 0..cfg.cases {
        let g = lift_to_signed(&random_junta(&mut r, m, 4)?);
        let spec = wht_spectrum(&g)?;
        let out = km_significant_set(&g, &params, rng::derive(cfg.seed, &[2, i as u64]))?;
        let included = out.set.iter().all(|s| spec.get(s).abs() > 1.0 / (2.0 * theta));
        let complete = spec
            .iter()
            .filter(|(_, c)| c.abs() >= 1.0 / theta)
            .all(|(s, _)| out.set.binary_search(s).is_ok());
        let small = (out.set.len() as f64) < 4.0 * theta * theta;
        t.check(included && complete && small, || {
            format!("case {i}: included={included} complete={complete} size={}", out.set.len())
        });
    }
    Ok(t.finish(binomial_allowance(cfg.cases, delta)))
}

/// Pauli conjugation against dense `U^dag P U`, letters and phase.
pub fn clifford_conjugation(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut t = Tally::new("clifford_conjugation");
    let mut r = rng::stream(cfg.seed, Op::Verify, 3, 0);
    for i in 0..cfg.cases {
        let n = r.random_range(1..=4);
        let size = r.random_range(0..=20);
        let gates = random_clifford_gates(&mut r, n, size);
        let letters: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][r.random_range(0..4)]).collect();
        let p = PauliOperator::from_letters(2 * r.random_range(0..2), &letters)?;
        let got = conjugate_pauli_through_clifford(&gates, &p)?;
        let want = dense::conjugate(&dense::gates_unitary(n, &gates)?, &p.to_dense()?);
        let diff = dense::max_abs_diff(&got.to_dense()?, &want);
        t.check(diff <= 1e-12, || format!("case {i}: {p} -> {got}, dense differs by {diff}"));
    }
    Ok(t.finish(0))
}

/// Hadamard-test ancilla statistics, regrouping and resource bounds.
pub fn commuting_structure(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut t = Tally::new("commuting_structure");
    let mut r = rng::stream(cfg.seed, Op::Verify, 4, 0);
    for i in 0..cfg.cases {
        let n = r.random_range(2..=6);
        let m = r.random_range(1..=n);
        let d = r.random_range(1..=3);
        let c = build_random_constant_depth(n, m, d, rng::derive(cfg.seed, &[4, i as u64]))?;
        let f = random_junta(&mut r, m, m.min(2))?;
        let ghat = wht_spectrum(&lift_to_signed(&f))?;
        for s in ghat.support().into_iter().filter(|s| !s.is_zero()) {
            let h = build_hadamard_test(&c, &s)?;
            let p0 = ancilla_prob0(&h);
            t.check(p0.is_ok(), || format!("case {i}: Hadamard test for {s}: {p0:?}"));
            let cc = regroup_commuting(&h);
            let tv = cc.output_distribution()?.tv_distance(&oracle::output_distribution(h.circuit())?);
            t.check(tv <= EXACT_TOL, || format!("case {i}: regrouped TV {tv} for {s}"));
            let mut worst: f64 = 0.0;
            for a in 0..cc.gates.len() {
                for b in a + 1..cc.gates.len() {
                    worst = worst.max(cc.commutator_max_norm(a, b)?);
                }
            }
            t.check(worst <= EXACT_TOL, || format!("case {i}: commutator {worst} for {s}"));
            let report = resource_report(&cc, &c, &f);
            t.check(report.pass, || format!("case {i}: resource report {report:?}"));
        }
    }
    Ok(t.finish(0))
}

fn iqp_and_clifford_magic<R: Rng>(r: &mut R, n: usize, m: usize) -> Result<[QuantumCircuit; 2]> {
    let all: Vec<usize> = (0..n).collect();
    Ok([
        build_simon_type(n, m, &all, &all, &random_diagonal_gates(r, n, 2 * n))?,
        build_clifford_magic(n, m, &random_clifford_gates(r, n, 3 * n))?,
    ])
}

/// Exact moments of `Y` for CT/ECS pairs: `E[|Y|^2] <= 1`, `|Y| <= 1` and the right mean.
pub fn ct_ecs_certificates(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut t = Tally::new("ct_ecs_certificates");
    let mut r = rng::stream(cfg.seed, Op::Verify, 5, 0);
    for i in 0..cfg.cases {
        let n = r.random_range(1..=8);
        for c in iqp_and_clifford_magic(&mut r, n, n)? {
            let s = Bits::new(n, r.random_range(1..1u64 << n))?;
            let (phi, a) = ct_ecs_pair(&c, &s)?;
            let y = enumerate_y(&phi, &a)?;
            let truth = oracle::pauli_expectation_exact(&c, &s)?;
            t.check(
                y.second_moment <= 1.0 + 1e-9 && y.max_abs <= 1.0 + 1e-12 && (y.mean_re - truth).abs() <= EXACT_TOL,
                || format!("case {i} ({}): {y:?} vs {truth}", c.family().name()),
            );
        }
    }
    Ok(t.finish(0))
}

/// `simulate` with the ct-ecs backend against the oracle, plus the audit decomposition.
pub fn end_to_end(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut t = Tally::new("end_to_end");
    let mut r = rng::stream(cfg.seed, Op::Verify, 6, 0);
    let (p_target, delta) = (10, 0.01);
    for i in 0..cfg.cases {
        let n = r.random_range(2..=8);
        let m = r.random_range(1..=n);
        let f = random_junta(&mut r, m, m.min(3))?;
        let budget = AccuracyBudget::for_function(p_target, &f, delta)?;
        for c in iqp_and_clifford_magic(&mut r, n, m)? {
            let seed = rng::derive(cfg.seed, &[6, i as u64]);
            let (res, audit) = error_budget_audit(&c, &f, BackendTag::CtEcs, &budget, seed)?;
            t.check(audit.within_tolerance && audit.decomposition_residual <= EXACT_TOL, || {
                format!("case {i} ({}): estimate {} exact {}", c.family().name(), res.estimate, audit.exact_p)
            });
        }
    }
    let trials = t.cases;
    Ok(t.finish(binomial_allowance(trials, delta)))
}

/// The exact backend reproduces the oracle up to coefficient noise only.
pub fn exact_backend(cfg: &VerifyConfig) -> Result<SuiteOutcome> {
    let mut t = Tally::new("exact_backend");
    let mut r = rng::stream(cfg.seed, Op::Verify, 7, 0);
    for i in 0..cfg.cases {
        let n = r.random_range(1..=6);
        let c = random_circuit(n, n, 20, rng::derive(cfg.seed, &[7, i as u64]))?;
        let f = BooleanFunction::parity(n)?;
        let budget = AccuracyBudget::for_function(10, &f, 0.01)?;
        let res = simulate(&c, &f, BackendTag::Exact, &budget, i as u64)?;
        let exact = oracle::acceptance_probability_exact(&c, &f)?;
        t.check((res.estimate - exact).abs() <= budget.tolerance(), || {
            format!("case {i}: {} vs {exact}", res.estimate)
        });
    }
    Ok(t.finish(binomial_allowance(cfg.cases, 0.01)))
}

pub type Suite = fn(&VerifyConfig) -> Result<SuiteOutcome>;

pub const SUITES: [(&str, Suite); 7] = [
    ("fourier_identities", fourier_identities),
    ("km_contract", km_contract),
    ("clifford_conjugation", clifford_conjugation),
    ("commuting_structure", commuting_structure),
    ("ct_ecs_certificates", ct_ecs_certificates),
    ("end_to_end", end_to_end),
    ("exact_backend", exact_backend),
];

pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteOutcome>> {
    SUITES.iter().map(|(_, suite)| suite(cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allowance() {
        assert_eq!(binomial_allowance(100, 0.05), (5.0 + 3.0 * 4.75f64.sqrt()).ceil() as usize);
        assert_eq!(binomial_allowance(0, 0.05), 0);
    }

    #[test]
    fn small_run_passes() {
        let cfg = VerifyConfig { cases: 3, seed: 11 };
        for o in run_all(&cfg).unwrap() {
            assert!(o.pass, "{o:?}");
            assert!(o.cases >= 3);
        }
    }
}
