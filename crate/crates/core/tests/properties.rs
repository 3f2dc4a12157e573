mod common;

use proptest::prelude::*;

use scpsim::backends::PauliOperator;
use scpsim::boolfn::{parse_function, render_function, wht_spectrum, BooleanFunction};
use scpsim::circuit::{parse_circuit, random_circuit, render_circuit};
use scpsim::{oracle, Bits};

fn letters(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n).prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuit_text_round_trips(n in 1usize..=8, size in 0usize..40, seed in any::<u64>()) {
        let c = random_circuit(n, n, size, seed).unwrap();
        let text = render_circuit(&c);
        let back = parse_circuit(&text).unwrap();
        prop_assert_eq!(render_circuit(&back), text);
        let gates_a: Vec<_> = c.gates().cloned().collect();
        let gates_b: Vec<_> = back.gates().cloned().collect();
        prop_assert_eq!(gates_a, gates_b);
    }

    #[test]
    fn function_text_round_trips(m in 1usize..=6, bits in any::<u64>()) {
        let table: Vec<bool> = (0..1usize << m).map(|i| bits >> (i % 64) & 1 == 1 || i == 0).collect();
        let f = BooleanFunction::truth_table(m, table).unwrap();
        let back = parse_function(&render_function(&f)).unwrap();
        prop_assert_eq!(back.table().unwrap(), f.table().unwrap());
    }

    #[test]
    fn pauli_product_matches_matrices(
        (a, b) in (1usize..=3).prop_flat_map(|n| (letters(n), letters(n))),
        ka in 0u8..4,
        kb in 0u8..4,
    ) {
        let n = a.len();
        let p = PauliOperator::from_letters(ka, &a).unwrap();
        let q = PauliOperator::from_letters(kb, &b).unwrap();
        let prod = p.mul(&q);
        let want = common::decompose_pauli(&common::matmul(&common::pauli_matrix(ka, &a), &common::pauli_matrix(kb, &b)), n).unwrap();
        prop_assert_eq!((prod.phase_power(), prod.letters()), want);
    }

    #[test]
    fn spectrum_matches_direct_sums_and_parseval(m in 1usize..=6, bits in any::<u64>()) {
        let table: Vec<bool> = (0..1usize << m).map(|i| bits >> (i % 64) & 1 == 1 || i == 0).collect();
        let f = BooleanFunction::truth_table(m, table.clone()).unwrap();
        let spec = wht_spectrum(&scpsim::boolfn::lift_to_signed(&f)).unwrap();
        let mut weight = 0.0;
        for s in 0..1u64 << m {
            let direct = common::fourier_coefficient(m, |x| if table[x as usize] { -1.0 } else { 1.0 }, s);
            let got = spec.iter().find(|(t, _)| t.value() == s).map_or(0.0, |(_, v)| v);
            prop_assert!((got - direct).abs() <= 1e-12);
            weight += got * got;
        }
        prop_assert!((weight - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn bits_text_round_trips(len in 1usize..=64, value in any::<u64>()) {
        let value = if len == 64 { value } else { value & ((1u64 << len) - 1) };
        let b = Bits::new(len, value).unwrap();
        let back: Bits = b.to_string().parse().unwrap();
        prop_assert_eq!(back, b);
        prop_assert_eq!(b.weight(), value.count_ones() as usize);
        for j in b.ones_positions() {
            prop_assert!(b.get(j));
        }
    }

    #[test]
    fn oracle_distribution_matches_reference(n in 1usize..=7, size in 0usize..30, seed in any::<u64>()) {
        let c = random_circuit(n, n, size, seed).unwrap();
        let want = common::marginal(&common::run(&c), n, n);
        let got = oracle::output_distribution(&c).unwrap();
        for (a, b) in got.probs().iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
