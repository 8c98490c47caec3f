use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use schatten_core::linalg::{c64, CMat};
use schatten_core::{DualIndex, DualPoint, Group, TruncationWindow};

const GROUPS: [Group; 2] = [Group::Torus { dim: 1 }, Group::Su2];

#[test]
fn representations_are_unitary_at_random_points() {
    for g in GROUPS {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let duals = g.enumerate_dual(4.0).unwrap();
        for _ in 0..100 {
            let x = g.random_point(&mut rng);
            for xi in &duals {
                let rep = g.rep_matrix(xi, &x).unwrap();
                let gram = &rep * rep.adjoint();
                let eye = CMat::identity(xi.dim, xi.dim);
                assert!(
                    (gram - eye).norm() <= 1e-10,
                    "{g}: rep {:?} not unitary",
                    xi.index
                );
            }
        }
    }
}

#[test]
fn representations_are_homomorphisms() {
    for g in GROUPS {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let duals = g.enumerate_dual(4.0).unwrap();
        for _ in 0..20 {
            let x = g.random_point(&mut rng);
            let y = g.random_point(&mut rng);
            let xy = g.multiply(&x, &y).unwrap();
            for xi in &duals {
                let lhs = g.rep_matrix(xi, &xy).unwrap();
                let rhs = g.rep_matrix(xi, &x).unwrap() * g.rep_matrix(xi, &y).unwrap();
                assert!((lhs - rhs).norm() <= 1e-10, "{g}: {:?}", xi.index);
            }
        }
    }
}

#[test]
fn inverse_point_gives_adjoint_representation() {
    for g in GROUPS {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let duals = g.enumerate_dual(4.0).unwrap();
        for _ in 0..20 {
            let x = g.random_point(&mut rng);
            let xinv = g.inverse(&x).unwrap();
            for xi in &duals {
                let lhs = g.rep_matrix(xi, &xinv).unwrap();
                let rhs = g.rep_matrix(xi, &x).unwrap().adjoint();
                assert!((lhs - rhs).norm() <= 1e-10, "{g}: {:?}", xi.index);
            }
        }
    }
}

// d_xi int xi_ij conj(eta_kl) dHaar = delta_{xi,eta} delta_{ik} delta_{jl};
// the half-integer spins must in particular be orthogonal to the integer
// ones, which is where a single-cover angle range would fail.
#[test]
fn schur_orthogonality_including_cross_parity() {
    let g = Group::Su2;
    let pairs = [(1u32, 1u32), (1, 2), (1, 3), (2, 2), (2, 4), (3, 3)];
    for (ta, tb) in pairs {
        let a = DualPoint::su2(ta);
        let b = DualPoint::su2(tb);
        let grid = g
            .haar_quadrature((ta + tb + 1) as usize)
            .unwrap();
        for i in 0..a.dim {
            for j in 0..a.dim {
                for k in 0..b.dim {
                    for l in 0..b.dim {
                        let val = grid.integrate(|x| {
                            let ra = g.rep_matrix(&a, x).unwrap();
                            let rb = g.rep_matrix(&b, x).unwrap();
                            ra[(i, j)] * rb[(k, l)].conj()
                        }) * c64(a.dim as f64, 0.0);
                        let expect = if ta == tb && i == k && j == l { 1.0 } else { 0.0 };
                        assert!(
                            (val - c64(expect, 0.0)).norm() <= 1e-10,
                            "t={ta},{tb} entries ({i}{j}),({k}{l}): {val}"
                        );
                    }
                }
            }
        }
    }

    // abelian case: plain character orthogonality
    let t = Group::Torus { dim: 1 };
    let grid = t.haar_quadrature(9).unwrap();
    for (ka, kb) in [(3i64, 3i64), (3, -3), (3, 2)] {
        let a = DualPoint::torus(vec![ka]);
        let b = DualPoint::torus(vec![kb]);
        let val = grid.integrate(|x| {
            t.rep_matrix(&a, x).unwrap()[(0, 0)] * t.rep_matrix(&b, x).unwrap()[(0, 0)].conj()
        });
        let expect = if ka == kb { 1.0 } else { 0.0 };
        assert!((val - c64(expect, 0.0)).norm() <= 1e-12);
    }
}

// sum_{ij} |xi_ij(x)|^2 = d_xi pointwise, not just on average.
#[test]
fn row_sums_of_unitary_entries_hit_the_dimension() {
    let g = Group::Su2;
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..25 {
        let x = g.random_point(&mut rng);
        for t in 1..=5u32 {
            let xi = DualPoint::su2(t);
            let rep = g.rep_matrix(&xi, &x).unwrap();
            let total: f64 = rep.iter().map(|z| z.norm_sqr()).sum();
            assert!((total - xi.dim as f64).abs() <= 1e-10);
        }
    }
}

#[test]
fn haar_rules_have_unit_mass() {
    for g in GROUPS {
        for res in [3usize, 8, 17] {
            let grid = g.haar_quadrature(res).unwrap();
            let mass: f64 = grid.weights.iter().sum();
            assert!((mass - 1.0).abs() <= 1e-12, "{g} res {res}: mass {mass}");
            assert!(grid.weights.iter().all(|w| *w > 0.0));
            assert!(grid.exact_pair_band() >= res - 1);
        }
    }
}

#[test]
fn eigenvalues_brackets_and_window_counts() {
    let t = Group::Torus { dim: 1 };
    let xi = DualPoint::torus(vec![-5]);
    assert_eq!(t.laplace_eigenvalue(&xi).unwrap(), 25.0);
    assert!((xi.bracket() - 26.0f64.sqrt()).abs() <= 1e-15);

    let s = Group::Su2;
    let xi = DualPoint::su2(3); // spin 3/2
    assert_eq!(s.laplace_eigenvalue(&xi).unwrap(), 3.75);
    assert_eq!(xi.dim, 4);

    // T^1 window at lambda = 8 holds exactly |k| <= 7
    let w = TruncationWindow::new(t, 8.0).unwrap();
    assert_eq!(w.duals().len(), 15);
    assert!(w
        .duals()
        .iter()
        .all(|d| matches!(&d.index, DualIndex::Torus(k) if k[0].abs() <= 7)));

    // SU(2) window at lambda = 4: twice_l = 0..6, total dim 1+4+...+49
    let w = TruncationWindow::new(s, 4.0).unwrap();
    assert_eq!(w.duals().len(), 7);
    assert_eq!(w.total_dim, 140);
}
