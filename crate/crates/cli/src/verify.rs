//! The verification suite behind `sel verify`.

use std::f64::consts::PI;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sel_core::convolution::{conv_l2_norm, convolve_at, l4_norm};
use sel_core::forms::{
    ball_for_degree, chain_rule_for_degree, chain_terms, four_identity, gamma_sample, h_direct, h_rule_for_degree,
    h_spectral,
};
use sel_core::function::{antipodal_conjugate, sharp_rearrangement, Constant, Modulated};
use sel_core::geometry::random_unit;
use sel_core::harmonics::{Expansion, HarmonicCoeffs};
use sel_core::legendre::{funk_hecke_spectrum, lambda_closed_form, legendre_p, recurrence_residuals, DistanceKernel};
use sel_core::quadrature::{build_ball_grid, build_sphere_grid, GaussLegendre};
use sel_core::{Result, Vec3};

use crate::report::{Check, Comparison, SuiteConfig, Timing, VerificationReport};

const SUITE: &str = "sharp-extension";
const FUNCTIONS: usize = 10;

type CheckFn = fn(&SuiteConfig, &mut ChaCha8Rng) -> Result<Check>;

const CHECKS: &[CheckFn] = &[
    gauss_legendre_exactness,
    sphere_grid_exactness,
    sigma_conv_profile,
    sigma_conv_norm_sq,
    legendre_norms,
    legendre_recurrences,
    funk_hecke_closed_form,
    lambda_negative,
    gamma_four_identity,
    symmetrization_pointwise,
    symmetrization_quartic,
    quartic_identity,
    bilinear_bound,
    bilinear_bound_equality_constant,
    crude_bound,
    crude_bound_strict_constant,
    h_of_one,
    h_spectral_vs_direct,
    h_constant_bound,
    sharp_ratio_constant,
    sharp_ratio_modulated,
];

/// Runs every check in a fixed order. Check `i` draws from its own stream
/// seeded with `seed + i`.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut checks = Vec::with_capacity(CHECKS.len());
    let mut wall_time_s = Vec::with_capacity(CHECKS.len());
    for (i, check) in CHECKS.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(i as u64));
        let start = Instant::now();
        checks.push(check(config, &mut rng)?);
        wall_time_s.push(start.elapsed().as_secs_f64());
    }
    Ok(VerificationReport {
        suite_name: SUITE.to_string(),
        config: *config,
        pass: checks.iter().all(|c| c.pass),
        checks,
        timing: Timing { timestamp, wall_time_s },
    })
}

fn point_in_ball(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let r = 2.0 * rng.random::<f64>().cbrt();
        if r > 0.0 {
            return random_unit(rng) * r;
        }
    }
}

fn ball(config: &SuiteConfig) -> Result<sel_core::quadrature::BallGrid> {
    build_ball_grid(config.n_r, build_sphere_grid(config.n_t)?)
}

fn gauss_legendre_exactness(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let n = config.n_t;
    let gl = GaussLegendre::new(n)?;
    let p = 2 * n as i32 - 2;
    let got = gl.integrate(-1.0, 1.0, |x| x.powi(p));
    Ok(Check::new(
        "gauss_legendre_exactness",
        2.0 / (p as f64 + 1.0),
        got,
        1e-12,
        Comparison::Rel,
    ))
}

fn sphere_grid_exactness(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let grid = build_sphere_grid(config.n_t)?;
    let p = 2 * config.n_t as i32 - 2;
    let got: f64 = grid.nodes.iter().zip(&grid.weights).map(|(w, q)| q * w.z.powi(p)).sum();
    Ok(Check::new(
        "sphere_grid_exactness",
        4.0 * PI / (p as f64 + 1.0),
        got,
        1e-12,
        Comparison::Rel,
    ))
}

fn sigma_conv_profile(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let one = Constant::real(1.0);
    let dir = Vec3::new(1.0, 2.0, 2.0) / 3.0;
    let mut worst: f64 = 0.0;
    for i in 1..=64 {
        let r = 2.0 * i as f64 / 64.0;
        let v = convolve_at(&one, &one, &(dir * r), config.n_c)?;
        let expect = 2.0 * PI / r;
        worst = worst.max((v.re - expect).abs().max(v.im.abs()) / expect);
    }
    Ok(Check::new("sigma_conv_profile", 0.0, worst, 1e-12, Comparison::Abs))
}

fn sigma_conv_norm_sq(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let one = Constant::real(1.0);
    let n = conv_l2_norm(&one, &one, &ball(config)?, config.n_c)?;
    Ok(Check::new(
        "sigma_conv_norm_sq",
        32.0 * PI.powi(3),
        n * n,
        1e-8,
        Comparison::Rel,
    ))
}

fn legendre_norms(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let gl = GaussLegendre::new(60)?;
    let worst = (0..=50)
        .map(|k| {
            let v = gl.integrate(-1.0, 1.0, |t| legendre_p(k, t).powi(2));
            let expect = 2.0 / (2.0 * k as f64 + 1.0);
            (v - expect).abs() / expect
        })
        .fold(0.0, f64::max);
    Ok(Check::new("legendre_norms", 0.0, worst, 1e-12, Comparison::Abs))
}

fn legendre_recurrences(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for i in 0..=198 {
        worst = worst.max(recurrence_residuals(50, -0.99 + 0.01 * i as f64)?.max());
    }
    Ok(Check::new("legendre_recurrences", 0.0, worst, 1e-9, Comparison::Abs))
}

fn funk_hecke_closed_form(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let quad = funk_hecke_spectrum(&DistanceKernel, 50, 64)?;
    let closed = lambda_closed_form(50);
    let worst = (0..=50)
        .map(|k| (quad.lambda(k) - closed.lambda(k)).abs())
        .fold(0.0, f64::max);
    Ok(Check::new("funk_hecke_closed_form", 0.0, worst, 1e-10, Comparison::Abs))
}

fn lambda_negative(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let quad = funk_hecke_spectrum(&DistanceKernel, 50, 64)?;
    let top = (1..=50).map(|k| quad.lambda(k)).fold(f64::NEG_INFINITY, f64::max);
    Ok(Check::new("lambda_negative", 0.0, top, 0.0, Comparison::AtMost))
}

fn gamma_four_identity(_: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Check> {
    let worst = (0..10_000)
        .map(|_| (four_identity(&gamma_sample(rng)) - 4.0).abs())
        .fold(0.0, f64::max);
    Ok(Check::new("gamma_four_identity", 0.0, worst, 1e-12, Comparison::Abs))
}

fn symmetrization_pointwise(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let f = Expansion::new(HarmonicCoeffs::random_complex(config.degree, rng));
        let x = point_in_ball(rng);
        let lhs = convolve_at(&f, &antipodal_conjugate(&f), &x, 64)?.norm();
        let s = sharp_rearrangement(&f);
        worst = worst.max(lhs - convolve_at(&s, &s, &x, 64)?.re);
    }
    Ok(Check::new(
        "symmetrization_pointwise",
        0.0,
        worst,
        1e-10,
        Comparison::AtMost,
    ))
}

fn symmetrization_quartic(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Check> {
    let l = config.degree;
    let grid = ball_for_degree(l);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..FUNCTIONS {
        let f = Expansion::new(HarmonicCoeffs::random_complex(l, rng));
        let t = chain_terms(&f, &grid, 2 * l + 2)?;
        worst = worst.max(t.q_conjugate / t.q_sharp - 1.0);
    }
    Ok(Check::new(
        "symmetrization_quartic",
        0.0,
        worst,
        1e-8,
        Comparison::AtMost,
    ))
}

fn real_chain(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Vec<(sel_core::forms::ChainTerms, f64)>> {
    let (grid, n_c) = chain_rule_for_degree(config.degree);
    (0..FUNCTIONS)
        .map(|_| {
            let c = HarmonicCoeffs::random_real(config.degree, rng);
            let energy = c.energy();
            Ok((chain_terms(&Expansion::new(c), &grid, n_c)?, energy))
        })
        .collect()
}

fn quartic_identity(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Check> {
    let worst = real_chain(config, rng)?
        .iter()
        .map(|(t, _)| (t.q_plain - 0.75 * t.b_ff).norm() / t.q_plain.norm())
        .fold(0.0, f64::max);
    Ok(Check::new("quartic_identity", 0.0, worst, 1e-6, Comparison::Abs))
}

fn bilinear_bound(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Check> {
    let worst = real_chain(config, rng)?
        .iter()
        .map(|(t, _)| t.b_ff.re / t.b_f2_one - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Check::new("bilinear_bound", 0.0, worst, 1e-8, Comparison::AtMost))
}

fn constant_chain() -> Result<sel_core::forms::ChainTerms> {
    let (grid, n_c) = chain_rule_for_degree(0);
    chain_terms(&Expansion::new(HarmonicCoeffs::constant(0, 1.0.into())), &grid, n_c)
}

fn bilinear_bound_equality_constant(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let t = constant_chain()?;
    Ok(Check::new(
        "bilinear_bound_equality_constant",
        1.0,
        t.b_ff.re / t.b_f2_one,
        1e-8,
        Comparison::Rel,
    ))
}

fn crude_bound(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Check> {
    let worst = real_chain(config, rng)?
        .iter()
        .map(|(t, e)| t.b_f2_one / (4.0 * PI * e * e) - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Check::new("crude_bound", 0.0, worst, 1e-8, Comparison::AtMost))
}

fn crude_bound_strict_constant(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let t = constant_chain()?;
    let e = 4.0 * PI;
    let ratio = t.b_f2_one / (4.0 * PI * e * e);
    let mut check = Check::new("crude_bound_strict_constant", 1.0, ratio, 0.0, Comparison::AtMost);
    check.pass &= ratio < 1.0;
    Ok(check)
}

fn h_of_one(_: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let (grid, inner) = h_rule_for_degree(2);
    let h = h_direct(&Constant::real(1.0), &grid, &inner);
    Ok(Check::new("H_of_one", 64.0 * PI * PI / 3.0, h, 1e-6, Comparison::Rel))
}

fn h_spectral_vs_direct(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Check> {
    let l = config.degree;
    let (grid, inner) = h_rule_for_degree(l);
    let spec = lambda_closed_form(l);
    let mut worst: f64 = 0.0;
    for _ in 0..FUNCTIONS {
        let c = HarmonicCoeffs::random_complex(l, rng);
        let direct = h_direct(&Expansion::new(c.clone()), &grid, &inner);
        let spectral = h_spectral(&c, &spec)?;
        worst = worst.max((direct - spectral).abs() / spectral.abs());
    }
    Ok(Check::new("h_spectral_vs_direct", 0.0, worst, 1e-6, Comparison::Abs))
}

fn h_constant_bound(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Check> {
    let l = config.degree;
    let (grid, inner) = h_rule_for_degree(l);
    let h1 = 64.0 * PI * PI / 3.0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..2 * FUNCTIONS {
        let c = HarmonicCoeffs::random_real(l, rng);
        let scale = c.energy() / (4.0 * PI) * h1;
        let h = h_direct(&Expansion::new(c.clone()), &grid, &inner);
        worst = worst.max((h - c.mean().norm_sqr() * h1) / scale);
    }
    Ok(Check::new("h_constant_bound", 0.0, worst, 1e-8, Comparison::AtMost))
}

fn sharp_ratio_constant(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let phi = l4_norm(&Constant::real(1.0), &ball(config)?, config.n_c)? / (4.0 * PI).sqrt();
    Ok(Check::new("sharp_ratio_constant", 2.0 * PI, phi, 1e-8, Comparison::Rel))
}

fn sharp_ratio_modulated(config: &SuiteConfig, _: &mut ChaCha8Rng) -> Result<Check> {
    let f = Modulated {
        xi: Vec3::new(0.0, 0.6, 0.8),
    };
    let phi = l4_norm(&f, &ball(config)?, config.n_c)? / (4.0 * PI).sqrt();
    Ok(Check::new(
        "sharp_ratio_modulated",
        2.0 * PI,
        phi,
        1e-8,
        Comparison::Rel,
    ))
}
