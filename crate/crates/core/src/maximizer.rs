//! Numerical maximization of the restriction ratio
//! `Phi(f) = ||(f sigma)^||_4 / ||f||_2` over real band-limited functions.
//!
//! `Phi(f)^4 = (2 pi)^3 ||f sigma * f* sigma||_2^2 / ||f||_2^4`. For real
//! degree-`L` expansions the squared convolution norm is integrated exactly
//! by the ball route with `2L + 1` radii, `2L + 1` polar rings and `2L + 2`
//! slice angles; [`PhiEvaluator`] caches the basis at every slice point of
//! that rule and differentiates the sums analytically.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::{l4_norm, AngleTable};
use crate::error::{invalid, Error, Result};
use crate::forms::ball_for_degree;
use crate::harmonics::{basis_len, degree_of, index, Expansion, HarmonicCoeffs, HarmonicEvaluator};
use crate::quadrature::{build_ball_grid, build_sphere_grid};

/// `Phi(f)` for any expansion, complex coefficients allowed, through the
/// exact ball route and Parseval.
pub fn objective_phi(c: &HarmonicCoeffs) -> Result<f64> {
    let energy = c.energy();
    if energy == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let l = c.max_degree;
    let f = Expansion::new(c.clone());
    let l4 = l4_norm(&f, &ball_for_degree(l), 2 * l + 2)?;
    Ok(l4 / energy.sqrt())
}

/// Fraction of the energy in degrees `>= 1`.
pub fn constancy_metric(c: &HarmonicCoeffs) -> Result<f64> {
    let total = c.energy();
    if total == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok((total - c.degree_energy(0)) / total)
}

/// Cached exact evaluation of `Phi` and of the gradient of `log Phi^4` for
/// real coefficient vectors of a fixed degree.
///
/// Coefficients are handled internally in parity order: even degrees first.
/// Only half the directions are stored since `|f sigma * f* sigma|^2` is
/// even in `x` for real `f`.
pub struct PhiEvaluator {
    max_degree: usize,
    n_c: usize,
    n_even: usize,
    /// parity position -> coefficient index
    order: Vec<usize>,
    n_dirs: usize,
    radii: Vec<(f64, f64)>,
    dir_weights: Vec<f64>,
    /// `[radius][direction][angle][basis]`
    rows: Vec<f64>,
}

impl PhiEvaluator {
    pub fn new(max_degree: usize) -> Result<Self> {
        let l = max_degree;
        let n = 2 * l + 1;
        let n_c = 2 * l + 2;
        let ball = build_ball_grid(n, build_sphere_grid(n)?)?;
        let dirs = &ball.directions;
        let n_phi = dirs.n_phi();
        let mut dir_nodes = Vec::new();
        let mut dir_weights = Vec::new();
        for (i, (u, &w)) in dirs.nodes.iter().zip(&dirs.weights).enumerate() {
            if i % n_phi < n_phi / 2 {
                dir_nodes.push(*u);
                dir_weights.push(2.0 * w);
            }
        }
        let nb = basis_len(l);
        let mut order: Vec<usize> = (0..nb).filter(|&a| degree_of(a).is_multiple_of(2)).collect();
        let n_even = order.len();
        order.extend((0..nb).filter(|&a| degree_of(a) % 2 == 1));

        let eval = HarmonicEvaluator::new(l);
        let angles = AngleTable::new(n_c);
        let per_radius = dir_nodes.len() * n_c * nb;
        let blocks: Vec<Vec<f64>> = ball
            .radial_nodes
            .par_iter()
            .map(|&r| {
                let mut block = vec![0.0; per_radius];
                let mut pts = Vec::with_capacity(n_c);
                let mut tmp = vec![0.0; nb];
                for (d, u) in dir_nodes.iter().enumerate() {
                    angles.slice_points(&(r * u), r, &mut pts);
                    for (j, p) in pts.iter().enumerate() {
                        eval.eval_into(p, &mut tmp);
                        let row = &mut block[(d * n_c + j) * nb..][..nb];
                        for (slot, &a) in row.iter_mut().zip(&order) {
                            *slot = tmp[a];
                        }
                    }
                }
                block
            })
            .collect();
        Ok(Self {
            max_degree: l,
            n_c,
            n_even,
            order,
            n_dirs: dir_nodes.len(),
            radii: ball
                .radial_nodes
                .iter()
                .copied()
                .zip(ball.radial_weights.iter().copied())
                .collect(),
            dir_weights,
            rows: blocks.concat(),
        })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn check(&self, c: &[f64]) -> Result<f64> {
        if c.len() != self.order.len() {
            return Err(Error::DegreeMismatch {
                expected: self.order.len(),
                actual: c.len(),
            });
        }
        let energy: f64 = c.iter().map(|v| v * v).sum();
        if energy == 0.0 {
            return Err(Error::ZeroFunction);
        }
        if !energy.is_finite() {
            return Err(Error::NonFinite {
                context: "coefficients",
            });
        }
        Ok(energy)
    }

    /// `||f sigma * f* sigma||_2^2`, and its gradient when asked.
    fn conv_norm_sq(&self, c: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let nb = self.order.len();
        let ne = self.n_even;
        let n_c = self.n_c;
        let h = n_c / 2;
        let step = 2.0 * PI / n_c as f64;
        let cp: Vec<f64> = self.order.iter().map(|&a| c[a]).collect();
        let per_radius = self.n_dirs * n_c * nb;
        let parts: Vec<(f64, Vec<f64>)> = self
            .radii
            .par_iter()
            .enumerate()
            .map(|(ri, &(r, wr))| {
                let block = &self.rows[ri * per_radius..][..per_radius];
                let scale = step / r;
                let mut at = vec![0.0; n_c];
                let mut anti = vec![0.0; n_c];
                let mut grad = if want_grad { vec![0.0; nb] } else { Vec::new() };
                let mut q = 0.0;
                for (d, &wd) in self.dir_weights.iter().enumerate() {
                    let rows = &block[d * n_c * nb..][..n_c * nb];
                    for j in 0..n_c {
                        let row = &rows[j * nb..][..nb];
                        let e: f64 = row[..ne].iter().zip(&cp[..ne]).map(|(y, c)| y * c).sum();
                        let o: f64 = row[ne..].iter().zip(&cp[ne..]).map(|(y, c)| y * c).sum();
                        at[j] = e + o;
                        anti[j] = e - o;
                    }
                    let conv = scale * (0..n_c).map(|j| at[j] * anti[(j + h) % n_c]).sum::<f64>();
                    q += wd * conv * conv;
                    if want_grad {
                        let coef = 2.0 * wd * conv * scale;
                        for j in 0..n_c {
                            let alpha = anti[(j + h) % n_c];
                            let beta = at[(j + n_c - h) % n_c];
                            let (even, odd) = (coef * (alpha + beta), coef * (alpha - beta));
                            let row = &rows[j * nb..][..nb];
                            for (g, y) in grad[..ne].iter_mut().zip(&row[..ne]) {
                                *g += even * y;
                            }
                            for (g, y) in grad[ne..].iter_mut().zip(&row[ne..]) {
                                *g += odd * y;
                            }
                        }
                    }
                }
                grad.iter_mut().for_each(|g| *g *= wr);
                (q * wr, grad)
            })
            .collect();
        let mut total = 0.0;
        let mut grad = if want_grad { vec![0.0; nb] } else { Vec::new() };
        for (q, g) in parts {
            total += q;
            for (a, b) in grad.iter_mut().zip(g) {
                *a += b;
            }
        }
        let mut out = vec![0.0; if want_grad { nb } else { 0 }];
        for (p, &a) in self.order.iter().enumerate().take(out.len()) {
            out[a] = grad[p];
        }
        (total, out)
    }

    /// `Phi(f)` for real coefficients `c`.
    pub fn phi(&self, c: &[f64]) -> Result<f64> {
        let energy = self.check(c)?;
        let (q, _) = self.conv_norm_sq(c, false);
        Ok(((2.0 * PI).powi(3) * q).sqrt().sqrt() / energy.sqrt())
    }

    /// `(Phi(f), grad log Phi(f)^4)`.
    pub fn phi_and_gradient(&self, c: &[f64]) -> Result<(f64, Vec<f64>)> {
        let energy = self.check(c)?;
        let (q, dq) = self.conv_norm_sq(c, true);
        let phi = ((2.0 * PI).powi(3) * q).sqrt().sqrt() / energy.sqrt();
        let grad = dq.iter().zip(c).map(|(d, v)| d / q - 4.0 * v / energy).collect();
        Ok((phi, grad))
    }
}

/// Gradient of `log Phi^4` in coefficient space, real coefficients only.
pub fn gradient(c: &HarmonicCoeffs) -> Result<Vec<f64>> {
    if !c.is_real() {
        return Err(invalid("c", "gradient is defined for real coefficients"));
    }
    let eval = PhiEvaluator::new(c.max_degree)?;
    Ok(eval.phi_and_gradient(&c.real_parts())?.1)
}

/// Relative change in `Phi` treated as rounding noise by [`search`].
pub const FLAT: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub coeffs: HarmonicCoeffs,
    pub objective: f64,
    pub gradient_norm: f64,
    pub step_size: f64,
    pub iteration: usize,
    pub constancy_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Gradient norm fell below the tolerance.
    Converged,
    /// Iteration budget spent first.
    MaxIterations,
    /// The line search could not find an increase above the minimum step.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub states: Vec<OptimizerState>,
    pub verdict: Verdict,
}

impl SearchTrace {
    pub fn last(&self) -> &OptimizerState {
        self.states.last().expect("trace holds the initial state")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub initial_step: f64,
    pub shrink: f64,
    pub min_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            tol: 1e-8,
            initial_step: 0.1,
            shrink: 0.5,
            min_step: 1e-12,
        }
    }
}

/// Normalized gradient ascent on `log Phi^4` with backtracking.
///
/// Each iteration tries `x <- (x + s g) / |x + s g|`, halving `s` until `Phi`
/// increases; an accepted step doubles `s` for the next try, up to
/// `initial_step`. The trace holds the initial state and every accepted one.
///
/// Close to a maximum the change in `Phi` drops below its rounding error
/// long before the gradient reaches `1e-8`. A step whose change is within
/// [`FLAT`] relative is therefore judged by the gradient at the trial point
/// instead: it is accepted while that gradient still points along the step.
pub fn search(eval: &PhiEvaluator, init: &HarmonicCoeffs, config: &SearchConfig) -> Result<SearchTrace> {
    if init.max_degree != eval.max_degree() {
        return Err(Error::DegreeMismatch {
            expected: eval.max_degree(),
            actual: init.max_degree,
        });
    }
    if !init.is_real() {
        return Err(invalid("init", "search runs over real coefficients"));
    }
    if !(config.shrink > 0.0 && config.shrink < 1.0) || config.initial_step <= 0.0 {
        return Err(invalid("config", "need 0 < shrink < 1 and a positive step"));
    }
    let l = init.max_degree;
    let mut x = normalized(&init.real_parts())?;
    let (mut phi, mut grad) = eval.phi_and_gradient(&x)?;
    let mut step = config.initial_step;
    let state = |x: &[f64], phi: f64, grad: &[f64], step: f64, iteration: usize| -> Result<OptimizerState> {
        let coeffs = HarmonicCoeffs::from_real(l, x)?;
        Ok(OptimizerState {
            constancy_defect: constancy_metric(&coeffs)?,
            coeffs,
            objective: phi,
            gradient_norm: norm(grad),
            step_size: step,
            iteration,
        })
    };
    let mut states = vec![state(&x, phi, &grad, step, 0)?];
    for iteration in 1..=config.max_iter {
        if norm(&grad) < config.tol {
            return Ok(SearchTrace {
                states,
                verdict: Verdict::Converged,
            });
        }
        loop {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + step * g).collect();
            let trial = normalized(&trial)?;
            let (trial_phi, trial_grad) = eval.phi_and_gradient(&trial)?;
            let flat = (trial_phi - phi).abs() <= FLAT * phi;
            let uphill = trial_grad.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>() >= 0.0;
            if trial_phi > phi || (flat && uphill) {
                (x, phi, grad) = (trial, trial_phi, trial_grad);
                break;
            }
            step *= config.shrink;
            if step < config.min_step {
                return Ok(SearchTrace {
                    states,
                    verdict: Verdict::Stalled,
                });
            }
        }
        states.push(state(&x, phi, &grad, step, iteration)?);
        step = (2.0 * step).min(config.initial_step);
    }
    let verdict = if norm(&grad) < config.tol {
        Verdict::Converged
    } else {
        Verdict::MaxIterations
    };
    Ok(SearchTrace { states, verdict })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn normalized(v: &[f64]) -> Result<Vec<f64>> {
    let n = norm(v);
    if n == 0.0 {
        return Err(Error::ZeroFunction);
    }
    if !n.is_finite() {
        return Err(Error::NonFinite {
            context: "coefficients",
        });
    }
    Ok(v.iter().map(|a| a / n).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    /// All coefficients random.
    Random,
    /// `Y_{0,0}` plus a random unit-energy perturbation of norm 0.1 in degrees `>= 1`.
    PerturbedConstant,
    /// `Y_{1,0}`, proportional to `w_z`.
    Zonal,
}

pub fn initial_coeffs<R: Rng + ?Sized>(kind: InitKind, max_degree: usize, rng: &mut R) -> HarmonicCoeffs {
    match kind {
        InitKind::Random => HarmonicCoeffs::random_real(max_degree, rng),
        InitKind::PerturbedConstant => {
            let mut c = HarmonicCoeffs::random_real(max_degree, rng);
            c.coeffs[0] = 0.0.into();
            let e = c.energy().sqrt();
            let mut c = if e > 0.0 { c.scaled(0.1 / e) } else { c };
            c.coeffs[0] = 1.0.into();
            c
        }
        InitKind::Zonal => HarmonicCoeffs::unit(max_degree, 1.min(max_degree), 0),
    }
}

/// `Y_{0,0}` of degree `L`, the constant `1 / sqrt(4 pi)`.
pub fn constant_coeffs(max_degree: usize) -> HarmonicCoeffs {
    let mut c = HarmonicCoeffs::zeros(max_degree);
    c.coeffs[index(0, 0)] = 1.0.into();
    c
}
