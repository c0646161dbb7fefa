use sel_core::forms::distance_potential;
use sel_core::function::SphereFunction;
use sel_core::harmonics::{basis_len, degree_of, Expansion, HarmonicCoeffs};
use sel_core::legendre::{funk_hecke_spectrum, lambda_closed_form, DistanceKernel};
use sel_core::quadrature::{build_sphere_grid, PolarRule};
use std::f64::consts::PI;

#[test]
fn distance_operator_is_diagonal_on_harmonics() {
    let l = 8;
    let grid = build_sphere_grid(l + 1).unwrap();
    let inner = PolarRule::new(l + 2, l + 2).unwrap();
    let spec = lambda_closed_form(l);
    for a in 0..basis_len(l) {
        let k = degree_of(a);
        let mut c = HarmonicCoeffs::zeros(l);
        c.coeffs[a] = 1.0.into();
        let y = Expansion::new(c);
        let scale = grid.nodes.iter().map(|w| y.eval(w).norm()).fold(0.0, f64::max);
        for w in &grid.nodes {
            let got = distance_potential(&y, w, &inner);
            let want = y.eval(w) * (2.0 * PI * spec.lambda(k));
            assert!(
                (got - want).norm() <= 1e-8 * scale * (2.0 * PI * spec.lambda(k)).abs(),
                "k = {k}"
            );
        }
    }
}

#[test]
fn quadrature_multipliers_drive_the_same_operator() {
    let spec = funk_hecke_spectrum(&DistanceKernel, 6, 32).unwrap();
    let closed = lambda_closed_form(6);
    for k in 0..=6 {
        assert!((spec.lambda(k) - closed.lambda(k)).abs() < 1e-12);
    }
}
