//! The quadrilinear form `Q`, the bilinear form `B` on the constraint set
//! `Gamma = {w1 + w2 + w3 + w4 = 0} ⊂ (S²)^4`, samples of `Gamma`, and the
//! quadratic functional `H(g) = ∬ conj(g(w)) g(v) |w - v|`.
//!
//! Integrals against the delta measure on `Gamma` are computed in two ways.
//!
//! * Sphere-pair route ([`quadrilinear_q`], [`bilinear_b`]): outer
//!   quadrature over `(w1, w2)` and the circle slice at `y = -(w1 + w2)`
//!   for `(w3, w4)`. `w2` runs over a polar rule centered at `-w1`, so the
//!   `1/|w1 + w2|` density of the slice becomes polynomial in the radial
//!   variable and never meets the antipodal point.
//! * Ball route ([`quadrilinear_q_ball`], [`bilinear_b_ball`]): the same
//!   integral written as `∫ (f1 sigma * f2 sigma)(x) (f3 sigma * f4 sigma)(-x) dx`
//!   over `|x| <= 2`.
//!
//! For band-limited inputs both are exact once the grids are large enough,
//! see [`GammaRule::for_degree`] and [`ball_for_degree`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convolution::AngleTable;
use crate::error::{invalid, Error, Result};
use crate::function::SphereFunction;
use crate::geometry::{orthonormal_frame, random_unit, Vec3};
use crate::harmonics::{Expansion, HarmonicCoeffs};
use crate::legendre::FunkHeckeSpectrum;
use crate::quadrature::{build_ball_grid, build_sphere_grid, BallGrid, PolarRule, SphereGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A point `(w1, w2, w3, w4)` of `Gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSample {
    pub omegas: [Vec3; 4],
}

impl GammaSample {
    /// Checks `|w_i| = 1` (1e-13) and `|w1 + w2 + w3 + w4| <= 1e-12`.
    pub fn new(omegas: [Vec3; 4]) -> Result<Self> {
        for w in &omegas {
            if (w.norm() - 1.0).abs() > 1e-13 {
                return Err(invalid("omegas", format!("|w| = {} is not 1", w.norm())));
            }
        }
        let s = GammaSample { omegas };
        if s.closure_defect() > 1e-12 {
            return Err(invalid("omegas", format!("sum has norm {}", s.closure_defect())));
        }
        Ok(s)
    }

    /// Vertices of a regular tetrahedron inscribed in S².
    pub fn tetrahedron() -> Self {
        let s = 1.0 / 3f64.sqrt();
        GammaSample {
            omegas: [
                Vec3::new(s, s, s),
                Vec3::new(s, -s, -s),
                Vec3::new(-s, s, -s),
                Vec3::new(-s, -s, s),
            ],
        }
    }

    /// `(e, -e, v, -v)`.
    pub fn opposite_pairs(e: Vec3, v: Vec3) -> Result<Self> {
        let (e, v) = (e.normalize(), v.normalize());
        Self::new([e, -e, v, -v])
    }

    /// `|w1 + w2 + w3 + w4|`.
    pub fn closure_defect(&self) -> f64 {
        self.omegas.iter().sum::<Vec3>().norm()
    }
}

/// Draws `w1, w2` uniformly, then `w3` uniformly on the circle slice at
/// `y = -(w1 + w2)` and `w4 = y - w3`. Redraws when `|y| < 1e-8`.
///
/// The draws cover `Gamma` but do not follow the delta measure on it.
pub fn gamma_sample<R: Rng + ?Sized>(rng: &mut R) -> GammaSample {
    loop {
        let w1 = random_unit(rng);
        let w2 = random_unit(rng);
        let y = -(w1 + w2);
        let ny = y.norm();
        if ny < 1e-8 {
            continue;
        }
        let (e1, e2) = orthonormal_frame(&y);
        let radius = (1.0 - 0.25 * ny * ny).max(0.0).sqrt();
        let phi = rng.random::<f64>() * 2.0 * PI;
        let w3 = (0.5 * y + radius * (phi.cos() * e1 + phi.sin() * e2)).normalize();
        let w4 = y - w3;
        return GammaSample {
            omegas: [w1, w2, w3, w4],
        };
    }
}

/// `|w1+w2||w3+w4| + |w1+w3||w2+w4| + |w1+w4||w2+w3|`, identically 4 on `Gamma`.
pub fn four_identity(s: &GammaSample) -> f64 {
    let [a, b, c, d] = s.omegas;
    (a + b).norm() * (c + d).norm() + (a + c).norm() * (b + d).norm() + (a + d).norm() * (b + c).norm()
}

/// A function `F(w, v)` on `S² x S²`.
pub trait PairKernel: Sync {
    fn eval(&self, a: &Vec3, b: &Vec3) -> Complex64;

    fn is_symmetric(&self) -> bool {
        false
    }
}

impl<T: PairKernel + ?Sized> PairKernel for &T {
    fn eval(&self, a: &Vec3, b: &Vec3) -> Complex64 {
        (**self).eval(a, b)
    }

    fn is_symmetric(&self) -> bool {
        (**self).is_symmetric()
    }
}

/// `F = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitKernel;

impl PairKernel for UnitKernel {
    fn eval(&self, _a: &Vec3, _b: &Vec3) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn is_symmetric(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairWeight {
    One,
    /// `|w + v|`
    SumNorm,
    /// `|w + v|^2`
    SumNormSquared,
}

impl PairWeight {
    fn apply(self, a: &Vec3, b: &Vec3) -> f64 {
        match self {
            PairWeight::One => 1.0,
            PairWeight::SumNorm => (a + b).norm(),
            PairWeight::SumNormSquared => (a + b).norm_squared(),
        }
    }
}

/// `F(w, v) = left(w) right(v) weight(w, v)`.
#[derive(Debug, Clone, Copy)]
pub struct TensorKernel<F, G> {
    pub left: F,
    pub right: G,
    pub weight: PairWeight,
    /// Set when `left` and `right` are the same function.
    pub symmetric: bool,
}

impl<F: SphereFunction> TensorKernel<F, F> {
    /// `F(w, v) = f(w) f(v) weight(w, v)`.
    pub fn square(f: F, weight: PairWeight) -> Self
    where
        F: Clone,
    {
        TensorKernel {
            left: f.clone(),
            right: f,
            weight,
            symmetric: true,
        }
    }
}

impl<F: SphereFunction, G: SphereFunction> PairKernel for TensorKernel<F, G> {
    fn eval(&self, a: &Vec3, b: &Vec3) -> Complex64 {
        self.left.eval(a) * self.right.eval(b) * self.weight.apply(a, b)
    }

    fn is_symmetric(&self) -> bool {
        self.symmetric
    }
}

/// `|F|^2`.
#[derive(Debug, Clone, Copy)]
pub struct AbsSquared<K>(pub K);

impl<K: PairKernel> PairKernel for AbsSquared<K> {
    fn eval(&self, a: &Vec3, b: &Vec3) -> Complex64 {
        Complex64::new(self.0.eval(a, b).norm_sqr(), 0.0)
    }

    fn is_symmetric(&self) -> bool {
        self.0.is_symmetric()
    }
}

/// Adapts a closure.
pub struct FnPairKernel<F> {
    pub f: F,
    pub symmetric: bool,
}

impl<F: Fn(&Vec3, &Vec3) -> Complex64 + Sync> PairKernel for FnPairKernel<F> {
    fn eval(&self, a: &Vec3, b: &Vec3) -> Complex64 {
        (self.f)(a, b)
    }

    fn is_symmetric(&self) -> bool {
        self.symmetric
    }
}

/// Quadrature for the sphere-pair route: outer grid for `w1`, polar rule
/// about `-w1` for `w2`, `n_c` slice angles for `(w3, w4)`.
#[derive(Debug, Clone)]
pub struct GammaRule {
    pub outer: SphereGrid,
    pub inner: PolarRule,
    pub n_c: usize,
}

impl GammaRule {
    /// `n_psi` and `n_c` must be even: the rule pairs each node with the
    /// diametrically opposite one.
    pub fn new(n_t: usize, n_u: usize, n_psi: usize, n_c: usize) -> Result<Self> {
        if !n_psi.is_multiple_of(2) || n_psi == 0 {
            return Err(invalid("n_psi", "must be even and positive"));
        }
        if !n_c.is_multiple_of(2) || n_c == 0 {
            return Err(invalid("n_c", "must be even and positive"));
        }
        Ok(Self {
            outer: build_sphere_grid(n_t)?,
            inner: PolarRule::new(n_u, n_psi)?,
            n_c,
        })
    }

    /// Sizes that integrate quartic products of degree-`L` expansions exactly.
    pub fn for_degree(max_degree: usize) -> Self {
        let l = max_degree;
        let n_psi = 3 * l + 2 + l % 2;
        Self::new(2 * l + 1, 2 * l + 1, n_psi, 2 * l + 2).expect("sizes are positive and even")
    }

    /// Calls `visit(w2, weight2, y, |y|, slice_points)` for every inner node
    /// paired with the outer node `w1`; `y = -(w1 + w2)`.
    fn for_each_inner<F>(&self, w1: &Vec3, angles: &AngleTable, mut visit: F)
    where
        F: FnMut(&Vec3, f64, &Vec3, f64, &[Vec3]),
    {
        let mut pts = Vec::with_capacity(self.n_c);
        let center = -w1;
        self.inner.for_each_around(&center, |w2, weight, _dist| {
            let y = -(w1 + w2);
            let ny = y.norm();
            angles.slice_points(&y, ny, &mut pts);
            visit(w2, weight, &y, ny, &pts);
        });
    }

    fn outer_sum<F>(&self, per_node: F) -> Complex64
    where
        F: Fn(&Vec3, &AngleTable) -> Complex64 + Sync,
    {
        let angles = AngleTable::new(self.n_c);
        let parts: Vec<Complex64> = self
            .outer
            .nodes
            .par_iter()
            .zip(&self.outer.weights)
            .map(|(w1, &q)| per_node(w1, &angles) * q)
            .collect();
        parts.iter().sum()
    }
}

/// `Q(f1, f2, f3, f4) = ∫_Gamma f1(w1) f2(w2) f3(w3) f4(w4) dSigma`, sphere-pair route.
pub fn quadrilinear_q(fs: [&dyn SphereFunction; 4], rule: &GammaRule) -> Complex64 {
    let [f1, f2, f3, f4] = fs;
    rule.outer_sum(|w1, angles| {
        let a = f1.eval(w1);
        if a == ZERO {
            return ZERO;
        }
        let mut acc = ZERO;
        rule.for_each_inner(w1, angles, |w2, q2, y, ny, pts| {
            let s: Complex64 = pts.iter().map(|p| f3.eval(p) * f4.eval(&(y - p))).sum();
            acc += f2.eval(w2) * s * (q2 * angles.step() / ny);
        });
        a * acc
    })
}

/// All 24 values `Q(f_{p(1)}, ..., f_{p(4)})` over permutations `p` in
/// lexicographic order, from a single sphere-pair pass.
pub fn quadrilinear_q_permutations(fs: [&dyn SphereFunction; 4], rule: &GammaRule) -> Vec<Complex64> {
    let perms = permutations4();
    let partial: Vec<Vec<Complex64>> = {
        let angles = AngleTable::new(rule.n_c);
        rule.outer
            .nodes
            .par_iter()
            .zip(&rule.outer.weights)
            .map(|(w1, &q1)| {
                let v1: Vec<Complex64> = fs.iter().map(|f| f.eval(w1)).collect();
                let mut acc = vec![ZERO; 24];
                rule.for_each_inner(w1, &angles, |w2, q2, y, ny, pts| {
                    let v2: Vec<Complex64> = fs.iter().map(|f| f.eval(w2)).collect();
                    let mut s = [[ZERO; 4]; 4];
                    for p in pts {
                        let q = y - p;
                        let a: Vec<Complex64> = fs.iter().map(|f| f.eval(p)).collect();
                        let b: Vec<Complex64> = fs.iter().map(|f| f.eval(&q)).collect();
                        for i in 0..4 {
                            for j in 0..4 {
                                s[i][j] += a[i] * b[j];
                            }
                        }
                    }
                    let scale = q1 * q2 * angles.step() / ny;
                    for (k, p) in perms.iter().enumerate() {
                        acc[k] += v1[p[0]] * v2[p[1]] * s[p[2]][p[3]] * scale;
                    }
                });
                acc
            })
            .collect()
    };
    let mut out = vec![ZERO; 24];
    for part in partial {
        for (o, v) in out.iter_mut().zip(part) {
            *o += v;
        }
    }
    out
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// `B(F, G) = ∫_Gamma F(w1, w2) G(w3, w4) dSigma`, sphere-pair route.
pub fn bilinear_b<F, G>(big_f: &F, big_g: &G, rule: &GammaRule) -> Complex64
where
    F: PairKernel + ?Sized,
    G: PairKernel + ?Sized,
{
    rule.outer_sum(|w1, angles| {
        let mut acc = ZERO;
        rule.for_each_inner(w1, angles, |w2, q2, y, ny, pts| {
            let fv = big_f.eval(w1, w2);
            if fv == ZERO {
                return;
            }
            let s: Complex64 = pts.iter().map(|p| big_g.eval(p, &(y - p))).sum();
            acc += fv * s * (q2 * angles.step() / ny);
        });
        acc
    })
}

/// Ball grid that integrates quartic products of degree-`L` expansions
/// exactly on the ball route (with `n_c >= 2L + 1` slice angles).
pub fn ball_for_degree(max_degree: usize) -> BallGrid {
    let n = 2 * max_degree + 1;
    build_ball_grid(n, build_sphere_grid(n).expect("n >= 1")).expect("n >= 1")
}

fn ball_sum<F>(ball: &BallGrid, n_c: usize, per_point: F) -> Complex64
where
    F: Fn(&Vec3, f64, &AngleTable, &mut Vec<Vec3>) -> Complex64 + Sync,
{
    let angles = AngleTable::new(n_c);
    let dirs = &ball.directions;
    let parts: Vec<Complex64> = ball
        .radial_nodes
        .par_iter()
        .zip(&ball.radial_weights)
        .map(|(&r, &wr)| {
            let mut pts = Vec::with_capacity(n_c);
            let mut acc = ZERO;
            for (u, &wd) in dirs.nodes.iter().zip(&dirs.weights) {
                acc += per_point(&(r * u), r, &angles, &mut pts) * wd;
            }
            acc * wr
        })
        .collect();
    parts.iter().sum()
}

/// `Q(f1, f2, f3, f4) = ∫ (f1 sigma * f2 sigma)(x) (f3 sigma * f4 sigma)(-x) dx`.
pub fn quadrilinear_q_ball(fs: [&dyn SphereFunction; 4], ball: &BallGrid, n_c: usize) -> Complex64 {
    let [f1, f2, f3, f4] = fs;
    ball_sum(ball, n_c, |x, r, angles, pts| {
        let a = crate::convolution::convolve_with(f1, f2, x, r, angles, pts);
        let b = crate::convolution::convolve_with(f3, f4, &-x, r, angles, pts);
        a * b
    })
}

/// `B(F, G) = ∫ F~(x) G~(-x) dx` with `F~ = ∬ F(w, v) delta(x - w - v)`.
pub fn bilinear_b_ball<F, G>(big_f: &F, big_g: &G, ball: &BallGrid, n_c: usize) -> Complex64
where
    F: PairKernel + ?Sized,
    G: PairKernel + ?Sized,
{
    ball_sum(ball, n_c, |x, r, angles, pts| {
        let scale = angles.step() / r;
        angles.slice_points(x, r, pts);
        let a: Complex64 = pts.iter().map(|p| big_f.eval(p, &(x - p))).sum();
        let mx = -x;
        angles.slice_points(&mx, r, pts);
        let b: Complex64 = pts.iter().map(|p| big_g.eval(p, &(mx - p))).sum();
        a * b * scale * scale
    })
}

/// Ball grid and slice count for [`chain_terms`] that are exact for
/// degree-`L` inputs in every entry except `q_sharp`.
///
/// `B(F, F)` carries an extra `|x|^2`, hence one more radius than
/// [`ball_for_degree`]; `B(|F|^2, 1)` sees `|f|^2` of degree `2L` on each
/// slice, hence `4L + 2` angles.
pub fn chain_rule_for_degree(max_degree: usize) -> (BallGrid, usize) {
    let l = max_degree;
    let ball = build_ball_grid(2 * l + 2, build_sphere_grid(2 * l + 1).expect("n >= 1")).expect("n >= 1");
    (ball, 4 * l + 2)
}

/// The quantities compared along the symmetrization chain, for one `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainTerms {
    /// `Q(f, f*, f, f*) = ||f sigma * f* sigma||_2^2`
    pub q_conjugate: f64,
    /// `Q(f#, f#, f#, f#)`
    pub q_sharp: f64,
    /// `Q(f, f, f, f)`
    pub q_plain: Complex64,
    /// `B(F, F)` with `F(w, v) = f(w) f(v) |w + v|`
    pub b_ff: Complex64,
    /// `B(|F|^2, 1)`
    pub b_f2_one: f64,
}

/// Ball-route evaluation of every [`ChainTerms`] entry in one pass.
///
/// Needs even `n_c`: with `p_j` the slice points at `x`, the points
/// `x - p_j = p_{j + n_c/2}` and the slice at `-x` is `{-p_j}`, so every
/// value follows from `f(p_j)` and `f(-p_j)`.
pub fn chain_terms(f: &Expansion, ball: &BallGrid, n_c: usize) -> Result<ChainTerms> {
    if !n_c.is_multiple_of(2) || n_c == 0 {
        return Err(invalid("n_c", "must be even and positive"));
    }
    let angles = AngleTable::new(n_c);
    let h = n_c / 2;
    let dirs = &ball.directions;
    let parts: Vec<[Complex64; 5]> = ball
        .radial_nodes
        .par_iter()
        .zip(&ball.radial_weights)
        .map(|(&r, &wr)| {
            let mut pts = Vec::with_capacity(n_c);
            let mut at = vec![ZERO; n_c];
            let mut anti = vec![ZERO; n_c];
            let mut acc = [ZERO; 5];
            let scale = angles.step() / r;
            for (u, &wd) in dirs.nodes.iter().zip(&dirs.weights) {
                angles.slice_points(&(r * u), r, &mut pts);
                for (j, p) in pts.iter().enumerate() {
                    let (a, b) = f.eval_with_antipode(p);
                    at[j] = a;
                    anti[j] = b;
                }
                let mut conj = ZERO;
                let mut plain_pos = ZERO;
                let mut plain_neg = ZERO;
                let mut sharp = 0.0;
                let mut sq = 0.0;
                for j in 0..n_c {
                    let k = (j + h) % n_c;
                    conj += at[j] * anti[k].conj();
                    plain_pos += at[j] * at[k];
                    plain_neg += anti[j] * anti[k];
                    let sj = (0.5 * (at[j].norm_sqr() + anti[j].norm_sqr())).sqrt();
                    let sk = (0.5 * (at[k].norm_sqr() + anti[k].norm_sqr())).sqrt();
                    sharp += sj * sk;
                    sq += at[j].norm_sqr() * at[k].norm_sqr();
                }
                let w = wd;
                acc[0] += Complex64::new((conj * scale).norm_sqr() * w, 0.0);
                acc[1] += Complex64::new((sharp * scale).powi(2) * w, 0.0);
                let pp = plain_pos * plain_neg * (scale * scale * w);
                acc[2] += pp;
                acc[3] += pp * (r * r);
                acc[4] += Complex64::new((2.0 * PI / r) * scale * r * r * sq * w, 0.0);
            }
            acc.map(|a| a * wr)
        })
        .collect();
    let mut sum = [ZERO; 5];
    for p in parts {
        for (s, v) in sum.iter_mut().zip(p) {
            *s += v;
        }
    }
    Ok(ChainTerms {
        q_conjugate: sum[0].re,
        q_sharp: sum[1].re,
        q_plain: sum[2],
        b_ff: sum[3],
        b_f2_one: sum[4].re,
    })
}

/// Sizes for [`h_direct`] that are exact for degree-`L` inputs.
pub fn h_rule_for_degree(max_degree: usize) -> (SphereGrid, PolarRule) {
    let l = max_degree;
    (
        build_sphere_grid(l + 1).expect("n_t >= 1"),
        PolarRule::new(l + 2, l + 2).expect("sizes >= 1"),
    )
}

/// `H(g) = ∬ conj(g(w)) g(v) |w - v| dsigma dsigma` by direct double
/// quadrature: `grid` for `w`, `inner` centered at each `w` for `v`.
///
/// Returns the real part; the kernel is real and symmetric, so the
/// imaginary part is rounding noise.
pub fn h_direct<G: SphereFunction + ?Sized>(g: &G, grid: &SphereGrid, inner: &PolarRule) -> f64 {
    let parts: Vec<Complex64> = grid
        .nodes
        .par_iter()
        .zip(&grid.weights)
        .map(|(w, &q)| {
            let gw = g.eval(w);
            if gw == ZERO {
                return ZERO;
            }
            gw.conj() * distance_potential(g, w, inner) * q
        })
        .collect();
    parts.iter().sum::<Complex64>().re
}

/// `∫ |w - v| g(v) dsigma(v)`, with the polar rule centered at `w`.
pub fn distance_potential<G: SphereFunction + ?Sized>(g: &G, w: &Vec3, inner: &PolarRule) -> Complex64 {
    let mut acc = ZERO;
    inner.for_each_around(w, |v, qv, dist| acc += g.eval(v) * (qv * dist));
    acc
}

/// `H(g) = 2 pi sum_k Lambda_k sum_m |c_{k,m}|^2`.
pub fn h_spectral(c: &HarmonicCoeffs, spectrum: &FunkHeckeSpectrum) -> Result<f64> {
    if spectrum.max_degree() < c.max_degree {
        return Err(Error::DegreeMismatch {
            expected: c.max_degree,
            actual: spectrum.max_degree(),
        });
    }
    Ok(2.0
        * PI
        * (0..=c.max_degree)
            .map(|k| spectrum.lambda(k) * c.degree_energy(k))
            .sum::<f64>())
}

/// `mu = (1 / 4 pi) ∫ g dsigma`.
pub fn mean_value<G: SphereFunction + ?Sized>(g: &G, grid: &SphereGrid) -> Complex64 {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .map(|(w, &q)| g.eval(w) * q)
        .sum::<Complex64>()
        / (4.0 * PI)
}
