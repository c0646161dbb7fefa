use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sel_core::convolution::convolve_at;
use sel_core::forms::{four_identity, gamma_sample, GammaSample};
use sel_core::function::{antipodal_conjugate, l2_norm, sharp_rearrangement, SphereFunction};
use sel_core::harmonics::{analyze, build_basis, synthesize, Expansion, HarmonicCoeffs};
use sel_core::legendre::legendre_eval;
use sel_core::quadrature::{build_circle_slice, build_sphere_grid, GaussLegendre};
use sel_core::{Complex64, Vec3};

fn double_factorial(n: i64) -> f64 {
    if n <= 0 {
        1.0
    } else {
        n as f64 * double_factorial(n - 2)
    }
}

// ∫ x^a y^b z^c dsigma = 4 pi (a-1)!! (b-1)!! (c-1)!! / (a+b+c+1)!! for even a, b, c
fn monomial_integral(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    let (a, b, c) = (a as i64, b as i64, c as i64);
    4.0 * PI * double_factorial(a - 1) * double_factorial(b - 1) * double_factorial(c - 1)
        / double_factorial(a + b + c + 1)
}

fn point_in_ball() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 1e-3f64..2.0)
        .prop_filter("direction", |(x, y, z, _)| x * x + y * y + z * z > 1e-4)
        .prop_map(|(x, y, z, r)| Vec3::new(x, y, z).normalize() * r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_legendre_integrates_polynomials(n in 1usize..40, coeffs in prop::collection::vec(-1.0f64..1.0, 80)) {
        let gl = GaussLegendre::new(n).unwrap();
        let deg = 2 * n - 1;
        let exact: f64 = (0..=deg).step_by(2).map(|j| 2.0 * coeffs[j] / (j as f64 + 1.0)).sum();
        let got: f64 = gl.nodes.iter().zip(&gl.weights)
            .map(|(&x, &w)| w * (0..=deg).rev().fold(0.0, |acc, j| acc * x + coeffs[j]))
            .sum();
        prop_assert!((got - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn sphere_grid_integrates_monomials(n_t in 1usize..12, a in 0u32..12, b in 0u32..12, c in 0u32..12) {
        prop_assume!(((a + b + c) as usize) < 2 * n_t);
        let grid = build_sphere_grid(n_t).unwrap();
        let got: f64 = grid.nodes.iter().zip(&grid.weights)
            .map(|(w, q)| q * w.x.powi(a as i32) * w.y.powi(b as i32) * w.z.powi(c as i32))
            .sum();
        prop_assert!((got - monomial_integral(a, b, c)).abs() <= 1e-12);
    }

    #[test]
    fn slice_points_lie_on_both_spheres(x in point_in_ball(), n_c in 1usize..32) {
        let slice = build_circle_slice(&x, n_c).unwrap();
        for p in slice.points() {
            prop_assert!((p.norm() - 1.0).abs() <= 1e-12);
            prop_assert!(((x - p).norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn gamma_samples_satisfy_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let s = gamma_sample(&mut rng);
            prop_assert!(GammaSample::new(s.omegas).is_ok());
            prop_assert!((four_identity(&s) - 4.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn legendre_values_bounded(t in -1.0f64..=1.0) {
        let table = legendre_eval(50, t, false).unwrap();
        for v in &table.values {
            prop_assert!(v.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn analysis_inverts_synthesis(seed in any::<u64>(), l in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = HarmonicCoeffs::random_complex(l, &mut rng);
        let basis = build_basis(l, &build_sphere_grid(l + 1).unwrap()).unwrap();
        let back = analyze(&synthesize(&c, &basis).unwrap(), &basis).unwrap();
        for (a, b) in c.coeffs.iter().zip(&back.coeffs) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn sharp_rearrangement_properties(seed in any::<u64>(), w in point_in_ball()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Expansion::new(HarmonicCoeffs::random_complex(4, &mut rng));
        let sharp = sharp_rearrangement(&f);
        let u = w.normalize();
        let v = sharp.eval(&u);
        prop_assert!(v.im == 0.0 && v.re >= 0.0);
        prop_assert!((v - sharp.eval(&-u)).norm() <= 1e-15 * (1.0 + v.norm()));
        let grid = build_sphere_grid(16).unwrap();
        let (a, b) = (l2_norm(&f, &grid), l2_norm(&sharp, &grid));
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn pointwise_symmetrization(seed in any::<u64>(), x in point_in_ball()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Expansion::new(HarmonicCoeffs::random_complex(4, &mut rng));
        let lhs = convolve_at(&f, &antipodal_conjugate(&f), &x, 64).unwrap().norm();
        let s = sharp_rearrangement(&f);
        let rhs = convolve_at(&s, &s, &x, 64).unwrap().re;
        prop_assert!(lhs <= rhs + 1e-10);
    }

    #[test]
    fn antipodal_conjugate_coefficients(seed in any::<u64>(), w in point_in_ball()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = HarmonicCoeffs::random_complex(5, &mut rng);
        let f = Expansion::new(c.clone());
        let g = Expansion::new(c.antipodal_conjugate());
        let u = w.normalize();
        let d: Complex64 = antipodal_conjugate(&f).eval(&u) - g.eval(&u);
        prop_assert!(d.norm() <= 1e-12);
    }
}
