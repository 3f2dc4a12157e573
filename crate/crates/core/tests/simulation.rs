mod common;

use rand::Rng;

use scpsim::backends::BackendTag;
use scpsim::boolfn::BooleanFunction;
use scpsim::circuit::{build_clifford_magic, random_circuit, random_clifford_gates};
use scpsim::rng::{self, Op};
use scpsim::sim::{error_budget_audit, simulate, AccuracyBudget, SimulationResult};
use scpsim::Bits;

fn exact_acceptance(c: &scpsim::circuit::QuantumCircuit, f: &BooleanFunction) -> f64 {
    let probs = common::marginal(&common::run(c), c.n(), c.m());
    (0..1u64 << c.m()).filter(|&x| f.eval(x)).map(|x| probs[x as usize]).sum()
}

fn in_pool(threads: usize, job: impl FnOnce() -> SimulationResult + Send) -> SimulationResult {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(job)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let c = random_circuit(6, 5, 30, 11).unwrap();
    let f = BooleanFunction::junta(5, vec![0, 2, 4], vec![false, true, true, false, true, false, false, true]).unwrap();
    let budget = AccuracyBudget::for_function(10, &f, 0.01).unwrap();
    for backend in [BackendTag::Exact, BackendTag::Commuting] {
        let one = in_pool(1, || simulate(&c, &f, backend, &budget, 99).unwrap()).without_timing();
        let four = in_pool(4, || simulate(&c, &f, backend, &budget, 99).unwrap()).without_timing();
        assert_eq!(
            serde_json::to_string(&one).unwrap(),
            serde_json::to_string(&four).unwrap(),
            "{backend:?}"
        );
    }
}

#[test]
fn estimates_respect_tolerance_for_each_backend() {
    let mut r = rng::stream(3, Op::Verify, 0, 0);
    for i in 0..12u64 {
        let n = r.random_range(3..=7);
        let c = build_clifford_magic(n, n, &random_clifford_gates(&mut r, n, 2 * n)).unwrap();
        let f = BooleanFunction::inner_product(Bits::new(n, r.random_range(1..1u64 << n)).unwrap()).unwrap();
        let truth = exact_acceptance(&c, &f);
        for backend in [BackendTag::Exact, BackendTag::Commuting, BackendTag::CtEcs, BackendTag::Clifford] {
            let budget = AccuracyBudget::for_function(5, &f, 0.05).unwrap();
            let res = simulate(&c, &f, backend, &budget, 100 + i).unwrap();
            assert!(
                (res.estimate - truth).abs() <= budget.tolerance(),
                "case {i} {backend:?}: {} vs {truth}",
                res.estimate
            );
            assert!((0.0..=1.0).contains(&res.estimate));
        }
    }
}

#[test]
fn error_shrinks_as_target_grows() {
    let c = random_circuit(4, 2, 25, 5).unwrap();
    let f = BooleanFunction::and(2).unwrap();
    let truth = exact_acceptance(&c, &f);
    let mean_error = |p: u64| {
        (0..8u64)
            .map(|seed| {
                let budget = AccuracyBudget::for_function(p, &f, 0.05).unwrap();
                (simulate(&c, &f, BackendTag::Commuting, &budget, seed).unwrap().estimate - truth).abs()
            })
            .sum::<f64>()
            / 8.0
    };
    let (coarse, fine) = (mean_error(2), mean_error(8));
    assert!(fine < coarse, "p=2: {coarse}, p=8: {fine}");
    assert!(fine <= 1.0 / 16.0);
}

#[test]
fn audit_terms_stay_within_their_bounds() {
    let mut r = rng::stream(4, Op::Verify, 0, 0);
    for i in 0..6u64 {
        let n = r.random_range(3..=8);
        let m = r.random_range(2..=n.min(6));
        let c = random_circuit(n, m, 30, 200 + i).unwrap();
        let f = BooleanFunction::junta(m, vec![0, m - 1], vec![false, true, true, true]).unwrap();
        let budget = AccuracyBudget::for_function(10, &f, 0.01).unwrap();
        let (res, audit) = error_budget_audit(&c, &f, BackendTag::Exact, &budget, 300 + i).unwrap();
        assert!((audit.exact_p - exact_acceptance(&c, &f)).abs() <= 1e-9);
        assert!(audit.tail_ok && audit.backend_ok && audit.coefficient_ok, "case {i}: {audit:?}");
        assert!(audit.within_tolerance);
        assert!(audit.decomposition_residual <= 1e-9);
        assert_eq!(audit.estimate, res.estimate);
    }
}
