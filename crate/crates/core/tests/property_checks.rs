use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use schatten_core::linalg::{c64, CMat};
use schatten_core::quantize::OperatorMatrix;
use schatten_core::spectral::{analyze_tail, schatten_report, Verdict, VerdictThresholds};
use schatten_core::symbol::{mixed_norm, InnerDualNorm, MatrixSymbol};
use schatten_core::{DualPoint, Group, TruncationWindow};

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

proptest! {
    // the lacunary gaps make the first difference collapse onto the symbol
    // value itself, whatever the decay rate
    #[test]
    fn dyadic_first_difference_is_sharp(kappa in 0.1..3.0f64, k in 1u32..=12) {
        let s = MatrixSymbol::dyadic(1, kappa).unwrap();
        let d = s.difference(&[1]).unwrap();
        let xi = DualPoint::torus(vec![1i64 << k]);
        let got = d.eval_invariant(&xi).unwrap()[(0, 0)].norm();
        let expect = xi.bracket().powf(-kappa);
        prop_assert!((got - expect).abs() <= 1e-12 * expect);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn export_import_roundtrip_is_byte_stable(seed in any::<u64>()) {
        let w = TruncationWindow::new(Group::Torus { dim: 1 }, 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = w.total_dim;
        let entries = CMat::from_fn(n, n, |_, _| {
            c64(2.0 * unit(&mut rng) - 1.0, 2.0 * unit(&mut rng) - 1.0)
        });
        let op = OperatorMatrix { window: w, entries, label: format!("prop{seed}") };

        let mut first = Vec::new();
        op.write_to(&mut first).unwrap();
        let back = OperatorMatrix::read_from(&mut std::io::Cursor::new(&first)).unwrap();
        for (a, b) in op.entries.iter().zip(back.entries.iter()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        let mut second = Vec::new();
        back.write_to(&mut second).unwrap();
        prop_assert_eq!(first, second);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn mixed_norm_shells_are_monotone(decay in 0.2..2.5f64, outer_two in any::<bool>()) {
        let g = Group::Torus { dim: 1 };
        let base = MatrixSymbol::bessel(g, -decay);
        let s = MatrixSymbol::coefficient(
            &[(vec![0], c64(1.0, 0.0)), (vec![1], c64(0.6, -0.2))],
            &base,
        ).unwrap();
        let w = TruncationWindow::new(g, 16.0).unwrap();
        let grid = g.haar_quadrature(33).unwrap();
        let outer = if outer_two { 2.0 } else { 1.0 };
        let rep = mixed_norm(&s, outer, InnerDualNorm::Schatten(1.0), &w, &grid).unwrap();
        for pair in rep.per_shell.windows(2) {
            prop_assert!(pair[1].1 >= pair[0].1 - 1e-13);
            prop_assert!(pair[1].0 > pair[0].0);
        }
        let last = rep.per_shell.last().unwrap();
        prop_assert!((last.1 - rep.value).abs() <= 1e-13 * rep.value.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]
    #[test]
    fn truncation_power_sums_monotone_for_random_modes(
        re in -1.0..1.0f64,
        im in -1.0..1.0f64,
        freq in 1i64..=3,
    ) {
        let g = Group::Torus { dim: 1 };
        let s = MatrixSymbol::coefficient(
            &[(vec![0], c64(1.0, 0.0)), (vec![freq], c64(re, im))],
            &MatrixSymbol::bessel(g, -1.0),
        ).unwrap();
        let th = VerdictThresholds::default();
        let rep = schatten_report(&s, 1.0, &[2.0, 4.0, 8.0, 16.0], &th).unwrap();
        for pair in rep.partial_power_sums.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn tail_fit_recovers_exact_geometric_slopes(
        e in prop_oneof![-2.0..-0.3f64, 0.3..2.0f64],
        rungs in 6usize..=10,
    ) {
        let mut v = 0.0;
        let pairs: Vec<(f64, f64)> = (0..rungs)
            .map(|l| {
                v += 2.0f64.powf(e * l as f64);
                (2.0f64.powi(l as i32), v)
            })
            .collect();
        let tail = analyze_tail(&pairs, &VerdictThresholds::default()).unwrap();
        let fitted = tail.exponent.unwrap();
        prop_assert!((fitted - e).abs() <= 1e-6);
        let expect = if e < 0.0 { Verdict::Convergent } else { Verdict::Divergent };
        prop_assert_eq!(tail.verdict, expect);
    }
}
