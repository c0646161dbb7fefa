//! One line per acceptance criterion; exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sel_core::convolution::{conv_l2_norm, convolve_at, l4_norm};
use sel_core::forms::{
    chain_rule_for_degree, chain_terms, four_identity, gamma_sample, h_direct, h_rule_for_degree, h_spectral,
};
use sel_core::function::{antipodal_conjugate, sharp_rearrangement, Constant, FnFunction, Modulated, SphereFunction};
use sel_core::geometry::random_unit;
use sel_core::harmonics::{Expansion, HarmonicCoeffs};
use sel_core::legendre::{
    funk_hecke_spectrum, generating_function, generating_partial_sum, lambda_closed_form, legendre_p,
    recurrence_residuals, DistanceKernel,
};
use sel_core::maximizer::{initial_coeffs, search, InitKind, PhiEvaluator, SearchConfig, Verdict};
use sel_core::quadrature::{build_ball_grid, build_sphere_grid, GaussLegendre};
use sel_core::{Complex64, Vec3};

const TWO_PI: f64 = 2.0 * PI;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn point_in_ball(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let r: f64 = 2.0 * rng.random::<f64>().cbrt();
        if r > 0.0 {
            return random_unit(rng) * r;
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let one = Constant::real(1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = point_in_ball(&mut rng);
        let v = convolve_at(&one, &one, &x, 16).unwrap();
        let expect = TWO_PI / x.norm();
        worst = worst.max((v - expect).norm() / expect);
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && within(t, 1.0),
        format!(
            "max rel err {worst:.3e} (tol 1e-12), {:.3}s (limit 1s)",
            t.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let ball = build_ball_grid(48, build_sphere_grid(32).unwrap()).unwrap();
    let one = Constant::real(1.0);
    let n = conv_l2_norm(&one, &one, &ball, 16).unwrap();
    let expect = 32.0 * PI.powi(3);
    let err = (n * n - expect).abs() / expect;
    let t = start.elapsed();
    outcome(
        err <= 1e-8 && within(t, 10.0),
        format!(
            "rel err {err:.3e} (tol 1e-8) at n_r=48 n_t=32, {:.3}s (limit 10s)",
            t.as_secs_f64()
        ),
    )
}

fn criterion_3() -> Outcome {
    let ball = build_ball_grid(32, build_sphere_grid(16).unwrap()).unwrap();
    let norm2 = (4.0 * PI).sqrt();
    let phi_one = l4_norm(&Constant::real(1.0), &ball, 32).unwrap() / norm2;
    let e1 = (phi_one - TWO_PI).abs() / TWO_PI;
    let f = Modulated {
        xi: Vec3::new(0.36, 0.48, -0.8),
    };
    let phi_mod = l4_norm(&f, &ball, 32).unwrap() / norm2;
    let e2 = (phi_mod - phi_one).abs() / phi_one;
    outcome(
        e1 <= 1e-8 && e2 <= 1e-8,
        format!("Phi(1) rel err {e1:.3e}, modulated |xi|=1 vs Phi(1) {e2:.3e} (tol 1e-8)"),
    )
}

fn criterion_4() -> Outcome {
    let quad = funk_hecke_spectrum(&DistanceKernel, 50, 64).unwrap();
    let closed = lambda_closed_form(50);
    let worst = (0..=50)
        .map(|k| (quad.lambda(k) - closed.lambda(k)).abs())
        .fold(0.0, f64::max);
    let negative = (1..=50).all(|k| quad.lambda(k) < 0.0);
    outcome(
        worst <= 1e-10 && negative,
        format!("max abs err {worst:.3e} (tol 1e-10), Lambda_k < 0 for 1..=50: {negative}"),
    )
}

fn criterion_5() -> Outcome {
    let (grid, inner) = h_rule_for_degree(6);
    let h1 = h_direct(&Constant::real(1.0), &grid, &inner);
    let expect = 64.0 * PI * PI / 3.0;
    let e1 = (h1 - expect).abs() / expect;
    let spec = lambda_closed_form(6);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let c = HarmonicCoeffs::random_complex(6, &mut rng);
        let direct = h_direct(&Expansion::new(c.clone()), &grid, &inner);
        let spectral = h_spectral(&c, &spec).unwrap();
        worst = worst.max((direct - spectral).abs() / spectral.abs());
    }
    outcome(
        e1 <= 1e-6 && worst <= 1e-6,
        format!("H(1) rel err {e1:.3e}, spectral vs direct max rel {worst:.3e} over 50 g (tol 1e-6)"),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let worst = (0..10_000)
        .map(|_| (four_identity(&gamma_sample(&mut rng)) - 4.0).abs())
        .fold(0.0, f64::max);
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && within(t, 1.0),
        format!(
            "max |sum - 4| {worst:.3e} (tol 1e-12), {:.3}s (limit 1s)",
            t.as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    let l = 8;
    let (ball, n_c) = chain_rule_for_degree(l);
    let (grid, inner) = h_rule_for_degree(2 * l);
    let h1 = 64.0 * PI * PI / 3.0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fails = [0usize; 5];
    let mut worst_c: f64 = 0.0;
    for _ in 0..100 {
        let f = Expansion::new(HarmonicCoeffs::random_real(l, &mut rng));
        let t = chain_terms(&f, &ball, n_c).unwrap();
        let energy = f.coeffs().energy();
        if t.q_conjugate > t.q_sharp * (1.0 + 1e-8) {
            fails[0] += 1;
        }
        let rel_c = (t.q_plain - 0.75 * t.b_ff).norm() / t.q_plain.norm();
        worst_c = worst_c.max(rel_c);
        if rel_c > 1e-6 {
            fails[1] += 1;
        }
        if t.b_ff.re > t.b_f2_one * (1.0 + 1e-8) {
            fails[2] += 1;
        }
        if t.b_f2_one > 4.0 * PI * energy * energy * (1.0 + 1e-8) {
            fails[3] += 1;
        }
        let sharp_sq = {
            let s = sharp_rearrangement(&f);
            FnFunction(move |w: &Vec3| Complex64::new(s.eval(w).re.powi(2), 0.0))
        };
        let mu = energy / (4.0 * PI);
        if h_direct(&sharp_sq, &grid, &inner) > mu * mu * h1 * (1.0 + 1e-8) {
            fails[4] += 1;
        }
    }
    outcome(
        fails.iter().all(|&n| n == 0),
        format!(
            "violations over 100 f [Q sharp, Q=3/4 B, B(F,F)<=B(F^2,1), crude bound, H(f#^2)] = {fails:?}, max rel err of Q=3/4 B {worst_c:.3e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let f = Expansion::new(HarmonicCoeffs::random_complex(6, &mut rng));
        let x = point_in_ball(&mut rng);
        let lhs = convolve_at(&f, &antipodal_conjugate(&f), &x, 64).unwrap().norm();
        let s = sharp_rearrangement(&f);
        let rhs = convolve_at(&s, &s, &x, 64).unwrap().re;
        worst = worst.max(lhs - rhs);
    }
    outcome(
        worst <= 1e-10,
        format!("max of |f*f_star| - f#*f# over 1000 pairs {worst:.3e} (tol 1e-10)"),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let l = 8;
    let eval = PhiEvaluator::new(l).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = HarmonicCoeffs::random_real(l, &mut rng).real_parts();
    let (_, g) = eval.phi_and_gradient(&c).unwrap();
    let log4 = |x: &[f64]| 4.0 * eval.phi(x).unwrap().ln();
    let h = 1e-5;
    let mut grad_err: f64 = 0.0;
    for a in 0..c.len() {
        let (mut p, mut m) = (c.clone(), c.clone());
        p[a] += h;
        m[a] -= h;
        let fd = (log4(&p) - log4(&m)) / (2.0 * h);
        grad_err = grad_err.max((fd - g[a]).abs() / g[a].abs());
    }

    let config = SearchConfig::default();
    let mut reached = 0;
    let mut converged = 0;
    let mut max_phi = f64::NEG_INFINITY;
    let mut others = Vec::new();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init = initial_coeffs(InitKind::Random, l, &mut rng);
        let trace = search(&eval, &init, &config).unwrap();
        for s in &trace.states {
            max_phi = max_phi.max(s.objective);
        }
        let last = trace.last();
        if trace.verdict == Verdict::Converged {
            converged += 1;
        }
        if (last.objective - TWO_PI).abs() <= 1e-4 && last.constancy_defect < 1e-3 {
            reached += 1;
        } else {
            others.push(format!("seed {seed}: Phi-2pi={:.6e}", last.objective - TWO_PI));
        }
    }
    let bounded = max_phi <= TWO_PI * (1.0 + 1e-6);
    let t = start.elapsed();
    let pass = reached == 20 && converged == 20 && bounded && grad_err <= 1e-5 && within(t, 600.0);
    let mut detail = format!(
        "{reached}/20 runs reach the constant, {converged}/20 gradient-converged, max Phi - 2pi {:.3e}, grad vs FD max rel {grad_err:.3e}, {:.1}s (limit 600s)",
        max_phi - TWO_PI,
        t.as_secs_f64()
    );
    if !others.is_empty() {
        detail.push_str(&format!(
            "; stuck at a non-constant local maximum: {}",
            others.join(", ")
        ));
    }
    outcome(pass, detail)
}

fn criterion_10() -> Outcome {
    let gl = GaussLegendre::new(60).unwrap();
    let norm_err = (0..=50)
        .map(|k| {
            let v: f64 = gl
                .nodes
                .iter()
                .zip(&gl.weights)
                .map(|(&t, &w)| w * legendre_p(k, t).powi(2))
                .sum();
            let expect = 2.0 / (2.0 * k as f64 + 1.0);
            (v - expect).abs() / expect
        })
        .fold(0.0, f64::max);
    let rec = (0..=198)
        .map(|i| -0.99 + 0.01 * i as f64)
        .map(|t| recurrence_residuals(50, t).unwrap().max())
        .fold(0.0, f64::max);
    let r = 0.5;
    let geometric = [-1.0, -0.5, 0.0, 0.3, 0.9, 1.0].iter().all(|&t| {
        let exact = generating_function(t, r);
        (0..=50).all(|k| {
            let err = (generating_partial_sum(k, t, r) - exact).abs();
            err <= r.powi(k as i32 + 1) / (1.0 - r) + 1e-15
        })
    });
    outcome(
        norm_err <= 1e-12 && rec <= 1e-9 && geometric,
        format!(
            "int P_k^2 max rel err {norm_err:.3e} (tol 1e-12), recurrence residual {rec:.3e} (tol 1e-9), tail <= r^(K+1)/(1-r) at r=0.5: {geometric}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("convolution closed form", criterion_1),
        ("sigma*sigma L2 norm", criterion_2),
        ("sharp constant", criterion_3),
        ("Funk-Hecke coefficients", criterion_4),
        ("H(1) and spectral route", criterion_5),
        ("four-term identity", criterion_6),
        ("inequality chain", criterion_7),
        ("pointwise symmetrization", criterion_8),
        ("optimization", criterion_9),
        ("Legendre infrastructure", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{}] {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
