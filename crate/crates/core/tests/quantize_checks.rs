use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use schatten_core::linalg::{c64, C64, CMat};
use schatten_core::quantize::{
    apply_op, fourier_forward, fourier_inverse, schwartz_kernel, FourierCoefficients,
};
use schatten_core::symbol::MatrixSymbol;
use schatten_core::{Group, TruncationWindow};

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_coefficients(group: Group, lambda: f64, seed: u64) -> FourierCoefficients {
    let window = TruncationWindow::new(group, lambda).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks = window
        .duals()
        .iter()
        .map(|xi| {
            CMat::from_fn(xi.dim, xi.dim, |_, _| {
                c64(2.0 * unit(&mut rng) - 1.0, 2.0 * unit(&mut rng) - 1.0)
            })
        })
        .collect();
    FourierCoefficients { window, blocks }
}

// For an invariant symbol the transform diagonalizes the operator blockwise:
// (Af)^(xi) = sigma(xi) fhat(xi), with sigma acting from the left.
#[test]
fn invariant_operators_multiply_coefficients_blockwise() {
    let cases: Vec<(MatrixSymbol, f64)> = vec![
        (MatrixSymbol::bessel(Group::Torus { dim: 1 }, -1.0), 6.0),
        (
            MatrixSymbol::multiplier(
                Group::Su2,
                "diag-ramp",
                None,
                Arc::new(|xi| {
                    let scale = xi.bracket().recip();
                    CMat::from_fn(xi.dim, xi.dim, |i, j| {
                        if i == j {
                            c64((i + 1) as f64 * scale, 0.0)
                        } else {
                            c64(0.0, 0.0)
                        }
                    })
                }),
            ),
            3.0,
        ),
    ];
    for (s, lambda) in cases {
        let g = s.group;
        let coeffs = random_coefficients(g, lambda, 501);
        let w = coeffs.window.clone();
        let res = 2 * w.coordinate_band() + 1;
        let grid = g.haar_quadrature(res).unwrap();
        let out = fourier_forward(g, |x| apply_op(&s, &coeffs, x).unwrap(), &w, &grid).unwrap();
        for ((xi, got), fhat) in w.duals().iter().zip(out.blocks.iter()).zip(coeffs.blocks.iter())
        {
            let sigma = s.eval_invariant(xi).unwrap();
            let expect = sigma * fhat;
            assert!(
                (got - &expect).norm() <= 1e-10,
                "{g}: block {:?} off by {}",
                xi.index,
                (got - &expect).norm()
            );
        }
    }
}

// f = 1 + e^{ix}: hand values on both sides of the transform inequality.
#[test]
fn transform_inequality_with_hand_margins() {
    let g = Group::Torus { dim: 1 };
    let w = TruncationWindow::new(g, 2.0).unwrap();
    let f = |x: &schatten_core::GroupPoint| {
        let t = x.coords()[0];
        c64(1.0, 0.0) + c64(t.cos(), t.sin())
    };
    let grid = g.haar_quadrature(64).unwrap();
    let coeffs = fourier_forward(g, f, &w, &grid).unwrap();

    // fhat(0) = fhat(1) = 1, fhat(-1) = 0
    let mut by_k = std::collections::HashMap::new();
    for (xi, b) in w.duals().iter().zip(coeffs.blocks.iter()) {
        let k = match &xi.index {
            schatten_core::DualIndex::Torus(v) => v[0],
            _ => unreachable!(),
        };
        by_k.insert(k, b[(0, 0)]);
    }
    assert!((by_k[&0] - c64(1.0, 0.0)).norm() <= 1e-12);
    assert!((by_k[&1] - c64(1.0, 0.0)).norm() <= 1e-12);
    assert!(by_k[&-1].norm() <= 1e-12);

    // |f| has a kink where f vanishes, so the norm quadrature needs a much
    // finer grid than the transform did
    let norm_grid = g.haar_quadrature(2048).unwrap();
    let lp =
        |p: f64| norm_grid.integrate(|x| c64(f(x).norm().powf(p), 0.0)).re.powf(1.0 / p);

    // p = 1, dual sup norm: 1 <= 4/pi
    let sup = coeffs
        .blocks
        .iter()
        .map(|b| b.norm())
        .fold(0.0f64, f64::max);
    let l1 = lp(1.0);
    assert!((l1 - 4.0 / std::f64::consts::PI).abs() <= 1e-5);
    assert!(sup <= l1 + 1e-9);

    // p = 4/3, dual exponent 4: 2^{1/4} <= ||f||_{4/3} with a visible gap
    let ell4 = coeffs
        .blocks
        .iter()
        .map(|b| b.norm().powi(4))
        .sum::<f64>()
        .powf(0.25);
    assert!((ell4 - 2.0f64.powf(0.25)).abs() <= 1e-12);
    let l43 = lp(4.0 / 3.0);
    assert!(ell4 <= l43 + 1e-9);
    assert!(l43 - ell4 > 0.05, "margin collapsed: {l43} vs {ell4}");

    // p = 2 is Parseval: equality to rounding
    let l2 = lp(2.0);
    assert!((coeffs.plancherel_sum().sqrt() - l2).abs() <= 1e-12);
}

// Invariant symbol => kernel K(x, y) a function of y^{-1} x alone, hence
// invariant under left translation of both arguments.
#[test]
fn invariant_kernels_are_left_translation_invariant() {
    for (s, lambda) in [
        (MatrixSymbol::bessel(Group::Torus { dim: 1 }, -2.0), 5.0),
        (MatrixSymbol::bessel(Group::Su2, -2.0), 3.0),
    ] {
        let g = s.group;
        let w = TruncationWindow::new(g, lambda).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..10 {
            let x = g.random_point(&mut rng);
            let y = g.random_point(&mut rng);
            let t = g.random_point(&mut rng);
            let base = schwartz_kernel(&s, &w, &x, &y).unwrap();
            let moved = schwartz_kernel(
                &s,
                &w,
                &g.multiply(&t, &x).unwrap(),
                &g.multiply(&t, &y).unwrap(),
            )
            .unwrap();
            assert!((base - moved).norm() <= 1e-9 * base.norm().max(1.0), "{g}");
        }
    }
}

// Once past the aliasing bound the rule is exact, so refining the grid must
// not move band-limited coefficients.
#[test]
fn forward_transform_is_stable_across_admissible_resolutions() {
    for (g, lambda) in [(Group::Torus { dim: 1 }, 6.0), (Group::Su2, 3.0)] {
        let coeffs = random_coefficients(g, lambda, 1234);
        let w = coeffs.window.clone();
        let f = |x: &schatten_core::GroupPoint| fourier_inverse(&coeffs, x).unwrap();
        let need = 2 * w.coordinate_band() + 1;
        let a = fourier_forward(g, f, &w, &g.haar_quadrature(need).unwrap()).unwrap();
        let b = fourier_forward(g, f, &w, &g.haar_quadrature(need + 7).unwrap()).unwrap();
        for ((ba, bb), orig) in a.blocks.iter().zip(b.blocks.iter()).zip(coeffs.blocks.iter()) {
            assert!((ba - bb).norm() <= 1e-12 * orig.norm().max(1.0));
            assert!((ba - orig).norm() <= 1e-11 * orig.norm().max(1.0));
        }
    }
}
