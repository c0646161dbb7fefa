use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sel_core::convolution::{conv_l2_norm, conv_profile};
use sel_core::forms::{four_identity, gamma_sample};
use sel_core::function::Constant;
use sel_core::legendre::{funk_hecke_spectrum, lambda_closed_form, DistanceKernel};
use sel_core::maximizer::{initial_coeffs, search as run_search, PhiEvaluator, SearchConfig, Verdict};
use sel_core::quadrature::{build_ball_grid, build_sphere_grid};
use sel_core::Vec3;
use serde::Serialize;

use crate::report::SuiteConfig;
use crate::{CliError, ConvolutionArgs, Format, IdentityArgs, OutputArgs, SearchArgs, SpectrumArgs, VerifyArgs};

const IDENTITY_TOL: f64 = 1e-12;

fn sink(output: &OutputArgs) -> Result<Box<dyn Write>, CliError> {
    Ok(match &output.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(output: &OutputArgs, value: &T) -> Result<(), CliError> {
    let mut w = sink(output)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_csv(output: &OutputArgs, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink(output)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Seventeen significant digits, enough to round-trip any `f64`.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    if args.output.csv {
        return Err(CliError::Usage("verify writes JSON only".into()));
    }
    let config = SuiteConfig {
        n_t: args.grid.n_t,
        n_c: args.grid.n_c,
        n_r: args.grid.n_r,
        degree: args.degree,
        seed: args.seed,
    };
    let report = crate::verify::run_suite(&config)?;
    write_json(&args.output, &report)?;
    let failed: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(failed.join(", ")))
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    k: usize,
    lambda_closed: f64,
    lambda_quadrature: f64,
    abs_diff: f64,
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let quad = funk_hecke_spectrum(&DistanceKernel, args.degree, args.n_quad)?;
    let closed = lambda_closed_form(args.degree);
    let rows: Vec<SpectrumRow> = (0..=args.degree)
        .map(|k| SpectrumRow {
            k,
            lambda_closed: closed.lambda(k),
            lambda_quadrature: quad.lambda(k),
            abs_diff: (closed.lambda(k) - quad.lambda(k)).abs(),
        })
        .collect();
    match args.output.format(Format::Csv) {
        Format::Json => write_json(&args.output, &rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink(&args.output)?);
            w.write_record(["k", "lambda_closed", "lambda_quadrature", "abs_diff"])?;
            for r in &rows {
                w.write_record([
                    r.k.to_string(),
                    fmt(r.lambda_closed),
                    fmt(r.lambda_quadrature),
                    fmt(r.abs_diff),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct IdentityReport {
    samples: usize,
    max_abs_deviation_from_4: f64,
    seed: u64,
}

pub fn identity(args: &IdentityArgs) -> Result<(), CliError> {
    if args.output.csv {
        return Err(CliError::Usage("identity writes JSON only".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let worst = (0..args.samples)
        .map(|_| (four_identity(&gamma_sample(&mut rng)) - 4.0).abs())
        .fold(0.0, f64::max);
    write_json(
        &args.output,
        &IdentityReport {
            samples: args.samples,
            max_abs_deviation_from_4: worst,
            seed: args.seed,
        },
    )?;
    if worst > IDENTITY_TOL {
        return Err(CliError::Numerical(format!(
            "max deviation {worst:e} exceeds {IDENTITY_TOL:e}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceRow {
    iter: usize,
    phi: f64,
    grad_norm: f64,
    constancy_defect: f64,
}

#[derive(Serialize)]
struct SearchReport {
    degree: usize,
    init: sel_core::maximizer::InitKind,
    seed: u64,
    verdict: Verdict,
    final_phi: f64,
    final_gap_to_2pi: f64,
    final_grad_norm: f64,
    final_constancy_defect: f64,
    final_coeffs: Vec<f64>,
    trace: Vec<TraceRow>,
}

pub fn search(args: &SearchArgs) -> Result<(), CliError> {
    let eval = PhiEvaluator::new(args.degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let init = initial_coeffs(args.init.into(), args.degree, &mut rng);
    let config = SearchConfig {
        max_iter: args.max_iter,
        tol: args.tol,
        ..SearchConfig::default()
    };
    let trace = run_search(&eval, &init, &config)?;
    let rows: Vec<TraceRow> = trace
        .states
        .iter()
        .map(|s| TraceRow {
            iter: s.iteration,
            phi: s.objective,
            grad_norm: s.gradient_norm,
            constancy_defect: s.constancy_defect,
        })
        .collect();
    let last = trace.last();
    match args.output.format(Format::Json) {
        Format::Json => write_json(
            &args.output,
            &SearchReport {
                degree: args.degree,
                init: args.init.into(),
                seed: args.seed,
                verdict: trace.verdict,
                final_phi: last.objective,
                final_gap_to_2pi: 2.0 * PI - last.objective,
                final_grad_norm: last.gradient_norm,
                final_constancy_defect: last.constancy_defect,
                final_coeffs: last.coeffs.real_parts(),
                trace: rows,
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink(&args.output)?);
            w.write_record(["iter", "phi", "grad_norm", "constancy_defect"])?;
            for r in &rows {
                w.write_record([
                    r.iter.to_string(),
                    fmt(r.phi),
                    fmt(r.grad_norm),
                    fmt(r.constancy_defect),
                ])?;
            }
            w.flush()?;
        }
    }
    if trace.verdict != Verdict::Converged {
        return Err(CliError::Numerical(format!("search ended {:?}", trace.verdict)));
    }
    Ok(())
}

#[derive(Serialize)]
struct NormReport {
    n_t: usize,
    n_c: usize,
    n_r: usize,
    norm_sq: f64,
    expected_norm_sq: f64,
    rel_err: f64,
}

pub fn convolution(args: &ConvolutionArgs) -> Result<(), CliError> {
    let one = Constant::real(1.0);
    if args.profile {
        if args.direction.len() != 3 {
            return Err(CliError::Usage("direction takes three components x,y,z".into()));
        }
        let d = Vec3::new(args.direction[0], args.direction[1], args.direction[2]);
        if !d.iter().all(|v| v.is_finite()) || d.norm() == 0.0 {
            return Err(CliError::Usage("direction must be a finite nonzero vector".into()));
        }
        if args.points == 0 {
            return Err(CliError::Usage("points must be positive".into()));
        }
        let radii: Vec<f64> = (1..=args.points).map(|i| 2.0 * i as f64 / args.points as f64).collect();
        let profile = conv_profile(&one, &one, &d, &radii, args.grid.n_c)?;
        let rows: Vec<Vec<f64>> = radii
            .iter()
            .zip(&profile.values)
            .map(|(&r, v)| {
                let closed = 2.0 * PI / r;
                vec![r, v.re, v.im, closed, (v - closed).norm()]
            })
            .collect();
        if args.output.json {
            return Err(CliError::Usage("--profile writes CSV only".into()));
        }
        write_csv(
            &args.output,
            &["r", "conv_value_real", "conv_value_imag", "closed_form", "abs_diff"],
            &rows,
        )
    } else {
        if args.output.csv {
            return Err(CliError::Usage(
                "the norm is written as JSON; use --profile for CSV".into(),
            ));
        }
        let ball = build_ball_grid(args.grid.n_r, build_sphere_grid(args.grid.n_t)?)?;
        let n = conv_l2_norm(&one, &one, &ball, args.grid.n_c)?;
        let expected = 32.0 * PI.powi(3);
        write_json(
            &args.output,
            &NormReport {
                n_t: args.grid.n_t,
                n_c: args.grid.n_c,
                n_r: args.grid.n_r,
                norm_sq: n * n,
                expected_norm_sq: expected,
                rel_err: (n * n - expected).abs() / expected,
            },
        )
    }
}
