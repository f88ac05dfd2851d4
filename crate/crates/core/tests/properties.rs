//! Property tests over randomized inputs.

use proptest::prelude::*;

use supemb::classify::max_margin_hyperplane;
use supemb::dataset::{gen_two_class, split, Surface};
use supemb::numerics::{solve_spd, DenseMatrix};

fn point_set(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(lo..hi, 2), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn split_partitions_and_stratifies(per_class in 3usize..40, fraction in 0.15f64..0.85, seed in 0u64..1000) {
        let ds = gen_two_class(Surface::Spheres, per_class, 0.1, seed).unwrap();
        let sp = split(&ds, fraction, seed).unwrap();
        let mut all: Vec<usize> = sp.train.iter().chain(&sp.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..ds.len()).collect::<Vec<_>>());
        for class in 1..=2usize {
            let n_m = ds.class_indices(class).len();
            let got = sp.train.iter().filter(|&&i| ds.labels()[i] == class).count();
            prop_assert_eq!(got, ((fraction * n_m as f64).round() as usize).min(n_m));
        }
    }

    #[test]
    fn hull_margin_antisymmetry_and_scale(p in point_set(5, -1.0, 1.0), q in point_set(5, 2.0, 4.0), s in 0.2f64..5.0) {
        let pm = DenseMatrix::from_rows(&p).unwrap();
        let qm = DenseMatrix::from_rows(&q).unwrap();
        let h = max_margin_hyperplane(&pm, &qm).unwrap();
        let hs = max_margin_hyperplane(&pm.scaled(s), &qm.scaled(s)).unwrap();
        prop_assert!((hs.margin - s * h.margin).abs() <= 1e-6 * (1.0 + s * h.margin));
        let swapped = max_margin_hyperplane(&qm, &pm).unwrap();
        prop_assert!((swapped.margin - h.margin).abs() <= 1e-9);
        // slab condition holds on every input point
        for row in &p {
            prop_assert!(h.score(row) >= h.margin / 2.0 - 1e-8);
        }
        for row in &q {
            prop_assert!(h.score(row) <= -h.margin / 2.0 + 1e-8);
        }
    }

    #[test]
    fn spd_solve_round_trip(seed in 0u64..500) {
        let mut rng = supemb::rng::CounterRng::new(seed, 0);
        let n = 3 + (seed % 6) as usize;
        let mut g = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, rng.next_range(-1.0, 1.0));
            }
        }
        let a = g.matmul(&g.transpose()).unwrap().add(&DenseMatrix::identity(n)).unwrap();
        let mut b = DenseMatrix::zeros(n, 2);
        for i in 0..n {
            b.set(i, 0, rng.next_range(-1.0, 1.0));
            b.set(i, 1, rng.next_range(-1.0, 1.0));
        }
        let x = solve_spd(&a, &b, 0.0).unwrap();
        let resid = a.matmul(&x).unwrap().sub(&b).unwrap().frobenius_norm();
        prop_assert!(resid <= 1e-8 * b.frobenius_norm().max(1e-300));
    }
}
