use std::collections::BTreeSet;

use icc_core::codes::{key_gen, sample_code};
use icc_core::gf::{space_size, FieldVector, PrimeField};
use icc_core::infometrics::{
    kl_divergence, renyi_divergence, renyi_entropy, v_distance, v_p_distance, Distribution, Order,
};
use icc_core::poly::random_poly;
use icc_core::protocol::{Scheme, SchemeParams};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 7])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn encode_then_shift_by_key_recovers_x(q in prime(), n in 1usize..6, m_frac in 0usize..6, seed: u64) {
        let f = PrimeField::new(q).unwrap();
        let m = 1 + m_frac % n;
        let code = sample_code(n, m, f, seed).unwrap();
        let key = key_gen(m, f, seed ^ 1).unwrap();
        let idx = (seed % space_size(q, n) as u64) as usize;
        let x = FieldVector::from_index(f, n, idx);
        let xt = code.encode(&x, &key).unwrap();
        prop_assert_eq!(code.shift(&xt, key.as_vector()).unwrap(), x);
    }

    #[test]
    fn vector_addition_commutes_and_inverts(q in prime(), n in 1usize..8, a: u64, b: u64) {
        let f = PrimeField::new(q).unwrap();
        let size = space_size(q, n) as u64;
        let u = FieldVector::from_index(f, n, (a % size) as usize);
        let v = FieldVector::from_index(f, n, (b % size) as usize);
        let s = u.add(&v).unwrap();
        prop_assert_eq!(&s, &v.add(&u).unwrap());
        prop_assert_eq!(s.sub(&v).unwrap(), u);
    }

    #[test]
    fn scheme_decodes_f_of_x(q in prime(), n in 2usize..5, m in 1usize..4, d in 0u32..3, st in 0usize..2, seed: u64) {
        prop_assume!((d as usize) < m * (q as usize - 1) && m <= n);
        let params = SchemeParams::new(n, q, 1, d, st).unwrap();
        let scheme = Scheme::new(params, m).unwrap();
        let f = PrimeField::new(q).unwrap();
        let code = sample_code(n, m, f, seed).unwrap();
        let idx = (seed % space_size(q, n) as u64) as usize;
        let x = FieldVector::from_index(f, n, idx);
        let mut session = scheme.storage_phase(&x, code, seed.wrapping_add(3)).unwrap();
        let poly = random_poly(n, d, f, seed);
        let workers = scheme.metrics().workers;
        let stragglers: BTreeSet<usize> = (0..st).map(|i| (seed as usize + 7 * i) % workers).collect();
        prop_assert_eq!(session.computation_phase(&poly, &stragglers).unwrap(), poly.eval(&x).unwrap());
    }

    #[test]
    fn distance_and_divergence_orderings(q in prop::sample::select(vec![2u32, 3]), n in 1usize..4, p in 2u32..5, s1: u64, s2: u64) {
        let f = PrimeField::new(q).unwrap();
        let a = Distribution::random_dirichlet(f, n, 0.7, s1).unwrap();
        let b = Distribution::random_dirichlet(f, n, 1.3, s2).unwrap();
        let p = Order::new(p).unwrap();
        prop_assert!(v_distance(&a, &b).unwrap() <= v_p_distance(&a, &b, p).unwrap() + 1e-12);
        prop_assert!(kl_divergence(&a, &b).unwrap() <= renyi_divergence(&a, &b, p).unwrap() + 1e-12);
        let h = renyi_entropy(&a, p);
        prop_assert!(h >= 0.0 && h <= n as f64 + 1e-12);
    }
}
