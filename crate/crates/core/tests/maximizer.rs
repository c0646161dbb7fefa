use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sel_core::convolution::l4_norm;
use sel_core::forms::ball_for_degree;
use sel_core::function::Modulated;
use sel_core::harmonics::{basis_len, HarmonicCoeffs};
use sel_core::maximizer::*;
use sel_core::Vec3;

const TWO_PI: f64 = 2.0 * PI;

#[test]
fn modulation_attains_the_sharp_constant() {
    let f = Modulated {
        xi: Vec3::new(0.48, -0.6, 0.64),
    };
    let ball = ball_for_degree(14);
    let phi = l4_norm(&f, &ball, 30).unwrap() / (4.0 * PI).sqrt();
    assert!((phi - TWO_PI).abs() <= 1e-8 * TWO_PI, "{phi}");
}

#[test]
fn degree_one_anchor() {
    // regression anchor, computed by this pipeline
    let phi = objective_phi(&HarmonicCoeffs::unit(1, 1, 0)).unwrap();
    assert!((phi - (TWO_PI - 0.267_990_597_296_204_7)).abs() < 1e-10, "{phi}");
}

#[test]
fn gradient_matches_central_differences() {
    let l = 4;
    let eval = PhiEvaluator::new(l).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..3 {
        let c = HarmonicCoeffs::random_real(l, &mut rng).real_parts();
        let (_, g) = eval.phi_and_gradient(&c).unwrap();
        let log4 = |x: &[f64]| 4.0 * eval.phi(x).unwrap().ln();
        let h = 1e-5;
        for a in 0..c.len() {
            let (mut p, mut m) = (c.clone(), c.clone());
            p[a] += h;
            m[a] -= h;
            let fd = (log4(&p) - log4(&m)) / (2.0 * h);
            assert!(
                (fd - g[a]).abs() <= 1e-5 * g[a].abs().max(1e-3),
                "{a}: {fd} vs {}",
                g[a]
            );
        }
    }
}

#[test]
fn constant_is_critical() {
    let g = gradient(&constant_coeffs(6)).unwrap();
    assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-6);
    assert!(g[0].abs() <= 1e-12);
}

#[test]
fn scaling_leaves_phi_and_direction_unchanged() {
    let l = 3;
    let eval = PhiEvaluator::new(l).unwrap();
    let c = HarmonicCoeffs::random_real(l, &mut ChaCha8Rng::seed_from_u64(2)).real_parts();
    let c2: Vec<f64> = c.iter().map(|v| 2.0 * v).collect();
    let (p1, g1) = eval.phi_and_gradient(&c).unwrap();
    let (p2, g2) = eval.phi_and_gradient(&c2).unwrap();
    assert!((p1 - p2).abs() <= 1e-12 * p1);
    for (a, b) in g1.iter().zip(&g2) {
        assert!((a - 2.0 * b).abs() <= 1e-10 * (1.0 + a.abs()));
    }
}

#[test]
fn phi_never_exceeds_the_sharp_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for l in 1..=8 {
        let eval = PhiEvaluator::new(l).unwrap();
        for _ in 0..125 {
            let c = HarmonicCoeffs::random_real(l, &mut rng).real_parts();
            assert!(eval.phi(&c).unwrap() <= TWO_PI * (1.0 + 1e-6));
        }
    }
}

#[test]
fn constant_is_a_local_maximum() {
    let l = 8;
    let eval = PhiEvaluator::new(l).unwrap();
    let one = constant_coeffs(l).real_parts();
    let phi1 = eval.phi(&one).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let mut d: Vec<f64> = (0..basis_len(l)).map(|_| StandardNormal.sample(&mut rng)).collect();
        d[0] = 0.0;
        let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x: Vec<f64> = one.iter().zip(&d).map(|(a, b)| a + 1e-2 * b / n).collect();
        assert!(eval.phi(&x).unwrap() < phi1);
    }
}

fn assert_monotone(trace: &SearchTrace) {
    for w in trace.states.windows(2) {
        assert!(w[1].objective >= w[0].objective * (1.0 - FLAT));
    }
}

#[test]
fn constant_start_terminates_immediately() {
    let eval = PhiEvaluator::new(4).unwrap();
    let trace = search(&eval, &constant_coeffs(4), &SearchConfig::default()).unwrap();
    assert_eq!(trace.verdict, Verdict::Converged);
    assert_eq!(trace.states.len(), 1);
    assert_eq!(trace.last().iteration, 0);
    assert!((trace.last().objective - TWO_PI).abs() <= 1e-12 * TWO_PI);
}

#[test]
fn perturbed_constant_converges_to_the_constant() {
    let l = 8;
    let eval = PhiEvaluator::new(l).unwrap();
    let init = initial_coeffs(InitKind::PerturbedConstant, l, &mut ChaCha8Rng::seed_from_u64(24));
    let trace = search(&eval, &init, &SearchConfig::default()).unwrap();
    assert_eq!(trace.verdict, Verdict::Converged);
    let last = trace.last();
    assert!(last.objective >= TWO_PI - 1e-4 && last.objective <= TWO_PI + 1e-6);
    assert!(last.constancy_defect < 1e-3);
    assert_monotone(&trace);
    for s in &trace.states {
        assert!((s.coeffs.energy() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zonal_start_increases_monotonically() {
    let l = 8;
    let eval = PhiEvaluator::new(l).unwrap();
    let init = initial_coeffs(InitKind::Zonal, l, &mut ChaCha8Rng::seed_from_u64(0));
    let config = SearchConfig {
        max_iter: 50,
        ..Default::default()
    };
    let trace = search(&eval, &init, &config).unwrap();
    assert_monotone(&trace);
    assert!(trace.last().objective > trace.states[0].objective);
    assert!(trace.last().objective < TWO_PI);
}

#[test]
fn search_rejects_bad_inputs() {
    let eval = PhiEvaluator::new(2).unwrap();
    assert!(search(&eval, &constant_coeffs(3), &SearchConfig::default()).is_err());
    assert!(search(&eval, &HarmonicCoeffs::zeros(2), &SearchConfig::default()).is_err());
    let bad = SearchConfig {
        shrink: 1.5,
        ..Default::default()
    };
    assert!(search(&eval, &constant_coeffs(2), &bad).is_err());
}
