// Acceptance gate: one test per criterion, each printing a single
// [PASS] line (run with --nocapture to see them) and enforcing its own
// wall-clock budget.

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use schatten_core::criteria::{
    condition4_sum, cosphere_average, elliptic_flag, regularity_criterion, russo_check,
    CriterionVerdict,
};
use schatten_core::linalg::{c64, frobenius_sq, CMat};
use schatten_core::quantize::{
    assemble_matrix, extract_symbol, fourier_forward, fourier_inverse, required_resolution,
    FourierCoefficients,
};
use schatten_core::spectral::{
    dyadic_ladder, schatten_report, singular_values, Verdict, VerdictThresholds,
};
use schatten_core::symbol::MatrixSymbol;
use schatten_core::{DualPoint, Group, TruncationWindow};

const T1: Group = Group::Torus { dim: 1 };

// Independent oracle: 2000 exact partial-sum terms of sum 1/(1+k^2) land
// within 2e-3 of pi*coth(pi) = 3.15334809...; the windowed r = 2 power sums
// of <k>^{-1} must reproduce that partial sum.
#[test]
fn criterion_01_bessel_trace_partial_sums() {
    let t0 = Instant::now();
    let rep = schatten_report(
        &MatrixSymbol::bessel(T1, -1.0),
        2.0,
        &[250.0, 500.0, 1000.0, 2000.0],
        &VerdictThresholds::default(),
    )
    .unwrap();
    let got = *rep.partial_power_sums.last().unwrap();
    assert!(
        (got - 3.153348).abs() <= 2e-3,
        "partial sum {got} vs oracle 3.153348"
    );
    assert_eq!(rep.verdict, Verdict::Convergent);
    assert!(t0.elapsed().as_secs_f64() < 1.0, "budget 1 s exceeded");
    println!("[PASS] criterion 1: windowed trace sum {got:.6} within 2e-3 of 3.153348");
}

// ||A||_HS^2 read off the assembled matrix agrees with
// sum_xi d_xi int ||sigma_A(x, xi)||_HS^2 dx for an x-dependent symbol.
#[test]
fn criterion_02_hilbert_schmidt_identity_for_x_dependent_symbol() {
    let t0 = Instant::now();
    let s = MatrixSymbol::coefficient(
        &[(vec![1], c64(1.0, 0.0))],
        &MatrixSymbol::bessel(T1, -1.0),
    )
    .unwrap();
    let w = TruncationWindow::new(T1, 16.0).unwrap();
    let op = assemble_matrix(&s, &w, None).unwrap();
    let matrix_side = frobenius_sq(&op.entries);

    let grid = T1
        .haar_quadrature(required_resolution(w.coordinate_band(), 0))
        .unwrap();
    let mut symbol_side = 0.0;
    for xi in w.duals() {
        let mut integral = 0.0;
        for (x, wt) in grid.nodes.iter().zip(grid.weights.iter()) {
            let sigma = extract_symbol(&op, x, &xi.index).unwrap();
            integral += wt * frobenius_sq(&sigma);
        }
        symbol_side += xi.dim as f64 * integral;
    }
    let rel = (matrix_side - symbol_side).abs() / matrix_side;
    assert!(rel <= 1e-8, "relative gap {rel}");
    assert!(t0.elapsed().as_secs_f64() < 5.0, "budget 5 s exceeded");
    println!("[PASS] criterion 2: HS identity, relative gap {rel:.2e}");
}

// Verdicts flip with the sign of m + n/r on both groups, 0.3 away from the
// borderline in either direction.
#[test]
fn criterion_03_order_threshold_detection() {
    let t0 = Instant::now();
    let th = VerdictThresholds::default();
    let ladder = dyadic_ladder(4.0, 8); // 4 .. 512
    let cases = [
        (Group::Torus { dim: 2 }, -1.3, 2.0, Verdict::Convergent),
        (Group::Torus { dim: 2 }, -0.7, 2.0, Verdict::Divergent),
        (Group::Su2, -3.5, 1.0, Verdict::Convergent),
        (Group::Su2, -2.5, 1.0, Verdict::Divergent),
    ];
    for (g, m, r, expect) in cases {
        let rep = schatten_report(&MatrixSymbol::bessel(g, m), r, &ladder, &th).unwrap();
        assert_eq!(
            rep.verdict, expect,
            "{g}, m = {m}, r = {r}: exponent {:?} growth {:?}",
            rep.fitted_tail_exponent, rep.growth_ratio
        );
    }
    assert!(t0.elapsed().as_secs_f64() < 60.0, "budget 60 s exceeded");
    println!("[PASS] criterion 3: 4/4 threshold cases classified correctly");
}

// The lacunary-support symbol: summable at every tested r, flagged
// non-elliptic with margin exactly zero, and with first differences that
// saturate the decay envelope exactly on the support.
#[test]
fn criterion_04_lacunary_symbol_reproduction() {
    let t0 = Instant::now();
    let th = VerdictThresholds::default();
    let s = MatrixSymbol::dyadic(1, 0.5).unwrap();
    for r in [0.5f64, 1.0, 2.0] {
        let c4 = condition4_sum(&s, r, &dyadic_ladder(4.0, 9), &th, None).unwrap();
        assert_eq!(c4.verdict, Verdict::Convergent, "r = {r}");
    }

    let w = TruncationWindow::new(T1, 64.0).unwrap();
    let flag = elliptic_flag(&s, &w, &[]).unwrap();
    assert_eq!(flag.verdict, CriterionVerdict::Violated);
    assert_eq!(flag.lhs.unwrap(), 0.0);

    let d = s.difference(&[1]).unwrap();
    for k in 1..=10u32 {
        let xi = DualPoint::torus(vec![1i64 << k]);
        let got = d.eval_invariant(&xi).unwrap()[(0, 0)].norm();
        let expect = xi.bracket().powf(-0.5);
        assert!(
            (got - expect).abs() <= 1e-15 * expect,
            "k = {k}: {got} vs {expect}"
        );
    }
    assert!(t0.elapsed().as_secs_f64() < 5.0, "budget 5 s exceeded");
    println!("[PASS] criterion 4: lacunary symbol summable, non-elliptic, differences sharp");
}

// Dense spectrum of the inverse-bracket multiplier on SU(2) against the
// closed-form multiset.
#[test]
fn criterion_05_su2_invariant_spectrum_oracle() {
    let t0 = Instant::now();
    let w = TruncationWindow::new(Group::Su2, 4.0).unwrap();
    assert_eq!(w.total_dim, 140);
    let op = assemble_matrix(&MatrixSymbol::bessel(Group::Su2, -1.0), &w, None).unwrap();
    let got = singular_values(&op).unwrap();

    let mut expect: Vec<f64> = Vec::new();
    for t in 0..=6u32 {
        let lam = t as f64 * (t as f64 + 2.0) / 4.0;
        let v = (1.0 + lam).powf(-0.5);
        let d = (t + 1) as usize;
        expect.extend(std::iter::repeat(v).take(d * d));
    }
    expect.sort_by(|a, b| b.total_cmp(a));
    assert_eq!(got.len(), expect.len());
    for (g, e) in got.iter().zip(expect.iter()) {
        assert!((g - e).abs() <= 1e-9, "{g} vs {e}");
    }
    assert!(t0.elapsed().as_secs_f64() < 30.0, "budget 30 s exceeded");
    println!("[PASS] criterion 5: 140 singular values match the closed-form multiset");
}

// Random self-adjoint multipliers never break the dual-exponent bound.
#[test]
fn criterion_06_dual_lp_bound_over_seeds() {
    let t0 = Instant::now();
    for seed in 0..20u64 {
        let s = MatrixSymbol::random_real_multiplier(T1, seed, 2.0);
        let out = russo_check(&s, 1.5, 64.0).unwrap();
        assert_eq!(out.verdict, CriterionVerdict::Satisfied, "seed {seed}");
        assert!(out.lhs.unwrap() <= out.rhs.unwrap() + 1e-9);
    }
    assert!(t0.elapsed().as_secs_f64() < 10.0, "budget 10 s exceeded");
    println!("[PASS] criterion 6: dual bound held in 20/20 seeded trials");
}

// Finite smoothed symbol norm must come with trace-class truncations; both
// orders stay on the satisfied side of the implication.
#[test]
fn criterion_07_regularity_implication() {
    let t0 = Instant::now();
    let th = VerdictThresholds::default();
    let ladder = [2.0, 4.0, 8.0, 16.0, 32.0];
    for m in [-2.0f64, -3.0] {
        let s = MatrixSymbol::coefficient(
            &[(vec![1], c64(1.0, 0.0))],
            &MatrixSymbol::bessel(T1, m),
        )
        .unwrap();
        let out = regularity_criterion(&s, 2.0, 1.0, &ladder, &th).unwrap();
        assert_eq!(out.verdict, CriterionVerdict::Satisfied, "m = {m}");
        assert_eq!(out.evidence["regularized_verdict"], "convergent");
    }
    assert!(t0.elapsed().as_secs_f64() < 10.0, "budget 10 s exceeded");
    println!("[PASS] criterion 7: regularity implication satisfied for both orders");
}

#[test]
fn criterion_08_cosphere_reference_averages() {
    let t0 = Instant::now();
    let grid = Group::Torus { dim: 2 }.haar_quadrature(8).unwrap();
    let one = cosphere_average(|_, _| c64(1.0, 0.0), 2, 64, &grid).unwrap();
    assert!((one - c64(1.0, 0.0)).norm() <= 1e-12);
    let odd = cosphere_average(|_, eta| c64(eta[0], 0.0), 2, 64, &grid).unwrap();
    assert!(odd.norm() <= 1e-10);
    let sq = cosphere_average(|_, eta| c64(eta[0] * eta[0], 0.0), 2, 64, &grid).unwrap();
    assert!((sq.re - 0.5).abs() <= 1e-8 && sq.im.abs() <= 1e-12);
    assert!(t0.elapsed().as_secs_f64() < 1.0, "budget 1 s exceeded");
    println!("[PASS] criterion 8: co-sphere averages 1, 0, 1/2 reproduced");
}

fn dual_lp_norm(c: &FourierCoefficients, p_conj: f64) -> f64 {
    if p_conj.is_infinite() {
        c.window
            .duals()
            .iter()
            .zip(c.blocks.iter())
            .map(|(xi, b)| (xi.dim as f64).powf(-0.5) * b.norm())
            .fold(0.0, f64::max)
    } else {
        c.window
            .duals()
            .iter()
            .zip(c.blocks.iter())
            .map(|(xi, b)| (xi.dim as f64).powf(2.0 - p_conj / 2.0) * b.norm().powf(p_conj))
            .sum::<f64>()
            .powf(1.0 / p_conj)
    }
}

// 50 random band-limited functions per group, three exponents each: the
// dual norm never exceeds the function norm; p = 2 is Parseval and must be
// an equality.
#[test]
fn criterion_09_transform_norm_inequality_suite() {
    let t0 = Instant::now();
    for (g, lambda, norm_res) in [(T1, 8.0, 256usize), (Group::Su2, 3.5, 16)] {
        let window = TruncationWindow::new(g, lambda).unwrap();
        let forward_grid = g
            .haar_quadrature(2 * window.coordinate_band() + 1)
            .unwrap();
        let norm_grid = g.haar_quadrature(norm_res).unwrap();
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let blocks: Vec<CMat> = window
                .duals()
                .iter()
                .map(|xi| {
                    CMat::from_fn(xi.dim, xi.dim, |_, _| {
                        c64(2.0 * unit() - 1.0, 2.0 * unit() - 1.0)
                    })
                })
                .collect();
            let coeffs = FourierCoefficients {
                window: window.clone(),
                blocks,
            };
            let f = |x: &schatten_core::GroupPoint| fourier_inverse(&coeffs, x).unwrap();
            let fhat = fourier_forward(g, f, &window, &forward_grid).unwrap();

            let samples: Vec<(f64, f64)> = norm_grid
                .nodes
                .iter()
                .zip(norm_grid.weights.iter())
                .map(|(x, w)| (f(x).norm(), *w))
                .collect();
            let lp_norm = |p: f64| {
                samples
                    .iter()
                    .map(|(v, w)| w * v.powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p)
            };

            for p in [1.0f64, 4.0 / 3.0, 2.0] {
                let p_conj = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
                let lhs = dual_lp_norm(&fhat, p_conj);
                let rhs = lp_norm(p);
                assert!(
                    lhs <= rhs + 1e-9,
                    "{g} seed {seed} p {p}: {lhs} > {rhs}"
                );
                if p == 2.0 {
                    assert!((lhs - rhs).abs() <= 1e-9 * rhs, "{g} seed {seed}: Parseval");
                }
            }
        }
    }
    assert!(t0.elapsed().as_secs_f64() < 20.0, "budget 20 s exceeded");
    println!("[PASS] criterion 9: 300/300 transform norm inequalities held");
}
