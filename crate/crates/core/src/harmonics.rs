//! Real orthonormal spherical harmonics on S², dense analysis/synthesis on a
//! [`SphereGrid`], and diagonal application of zonal kernels.
//!
//! Basis functions have unit `L^2(sigma)` norm (total measure `4 pi`), carry
//! no Condon–Shortley phase, and are indexed by `k^2 + k + m` with
//! `-k <= m <= k`. For `m > 0` the cosine in azimuth is stored at `+m` and
//! the sine at `-m`. Each degree-`k` function has parity `(-1)^k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function::SphereFunction;
use crate::geometry::Vec3;
use crate::legendre::FunkHeckeSpectrum;
use crate::quadrature::SphereGrid;

/// Number of basis functions through degree `L`.
pub const fn basis_len(max_degree: usize) -> usize {
    (max_degree + 1) * (max_degree + 1)
}

pub fn index(k: usize, m: isize) -> usize {
    debug_assert!(m.unsigned_abs() <= k);
    (k * k + k).wrapping_add_signed(m)
}

/// Degree of the basis function stored at `idx`.
pub fn degree_of(idx: usize) -> usize {
    (idx as f64).sqrt() as usize
}

/// Evaluates all real harmonics through degree `L` at arbitrary unit vectors.
///
/// Uses the normalized associated Legendre recurrences divided through by
/// `sin^m(theta)`, so the azimuthal factor is `Re/Im (x + iy)^m` and no
/// division by `sin(theta)` happens at the poles.
#[derive(Debug, Clone)]
pub struct HarmonicEvaluator {
    max_degree: usize,
    diag: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl HarmonicEvaluator {
    pub fn new(max_degree: usize) -> Self {
        let l = max_degree;
        let n = l + 1;
        let mut diag = vec![1.0; n];
        for m in 1..n {
            let mf = m as f64;
            diag[m] = diag[m - 1] * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
        }
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n * n];
        for m in 0..n {
            for k in (m + 2)..n {
                let (kf, mf) = (k as f64, m as f64);
                a[k * n + m] = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
                let k1 = kf - 1.0;
                b[k * n + m] = ((k1 * k1 - mf * mf) / (4.0 * k1 * k1 - 1.0)).sqrt();
            }
        }
        Self { max_degree, diag, a, b }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        basis_len(self.max_degree)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes `Y_{k,m}(w)` into `out[index(k, m)]`; `out.len() >= len()`.
    pub fn eval_into(&self, w: &Vec3, out: &mut [f64]) {
        let l = self.max_degree;
        let n = l + 1;
        let z = w.z;
        let norm0 = 1.0 / (4.0 * PI).sqrt();
        let norm_m = std::f64::consts::SQRT_2 * norm0;
        // (x + iy)^m
        let (mut cr, mut ci) = (1.0, 0.0);
        for m in 0..n {
            if m > 0 {
                let (nr, ni) = (cr * w.x - ci * w.y, cr * w.y + ci * w.x);
                cr = nr;
                ci = ni;
            }
            let mut q_prev = self.diag[m];
            let mut emit = |k: usize, q: f64| {
                if m == 0 {
                    out[k * k + k] = norm0 * q;
                } else {
                    out[k * k + k + m] = norm_m * q * cr;
                    out[k * k + k - m] = norm_m * q * ci;
                }
            };
            emit(m, q_prev);
            if m == l {
                break;
            }
            let mut q = (2.0 * m as f64 + 3.0).sqrt() * z * q_prev;
            emit(m + 1, q);
            for k in (m + 2)..n {
                let next = self.a[k * n + m] * (z * q - self.b[k * n + m] * q_prev);
                q_prev = q;
                q = next;
                emit(k, q);
            }
        }
    }

    pub fn eval(&self, w: &Vec3) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(w, &mut out);
        out
    }
}

/// Coefficients `c_{k,m}` of an expansion in the real orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCoeffs {
    pub max_degree: usize,
    pub coeffs: Vec<Complex64>,
}

impl HarmonicCoeffs {
    pub fn zeros(max_degree: usize) -> Self {
        Self {
            max_degree,
            coeffs: vec![Complex64::new(0.0, 0.0); basis_len(max_degree)],
        }
    }

    pub fn from_real(max_degree: usize, values: &[f64]) -> Result<Self> {
        if values.len() != basis_len(max_degree) {
            return Err(Error::DegreeMismatch {
                expected: basis_len(max_degree),
                actual: values.len(),
            });
        }
        Ok(Self {
            max_degree,
            coeffs: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        })
    }

    /// The constant function `mu`: `c_{0,0} = sqrt(4 pi) mu`.
    pub fn constant(max_degree: usize, mu: Complex64) -> Self {
        let mut c = Self::zeros(max_degree);
        c.coeffs[0] = mu * (4.0 * PI).sqrt();
        c
    }

    /// Unit coefficient at `(k, m)`.
    pub fn unit(max_degree: usize, k: usize, m: isize) -> Self {
        let mut c = Self::zeros(max_degree);
        c.coeffs[index(k, m)] = Complex64::new(1.0, 0.0);
        c
    }

    /// Real coefficients, standard normal scaled by `1 / (k + 1)`.
    pub fn random_real<R: Rng + ?Sized>(max_degree: usize, rng: &mut R) -> Self {
        let coeffs = (0..basis_len(max_degree))
            .map(|i| {
                let s: f64 = StandardNormal.sample(rng);
                Complex64::new(s / (degree_of(i) as f64 + 1.0), 0.0)
            })
            .collect();
        Self { max_degree, coeffs }
    }

    /// Complex coefficients, real and imaginary parts as in [`Self::random_real`].
    pub fn random_complex<R: Rng + ?Sized>(max_degree: usize, rng: &mut R) -> Self {
        let coeffs = (0..basis_len(max_degree))
            .map(|i| {
                let s = 1.0 / (degree_of(i) as f64 + 1.0);
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re * s, im * s)
            })
            .collect();
        Self { max_degree, coeffs }
    }

    pub fn get(&self, k: usize, m: isize) -> Complex64 {
        self.coeffs[index(k, m)]
    }

    /// `sum_m |c_{k,m}|^2`, the squared norm of the degree-`k` component.
    pub fn degree_energy(&self, k: usize) -> f64 {
        self.coeffs[k * k..(k + 1) * (k + 1)].iter().map(|c| c.norm_sqr()).sum()
    }

    /// `sum |c|^2 = ||f||_2^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Mean value `mu = c_{0,0} / sqrt(4 pi)`.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0] / (4.0 * PI).sqrt()
    }

    /// Coefficients of `f*(w) = conj(f(-w))`: `(-1)^k conj(c_{k,m})`.
    pub fn antipodal_conjugate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if degree_of(i).is_multiple_of(2) {
                    c.conj()
                } else {
                    -c.conj()
                }
            })
            .collect();
        Self {
            max_degree: self.max_degree,
            coeffs,
        }
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            max_degree: self.max_degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

/// A band-limited function evaluable anywhere on S².
#[derive(Debug, Clone)]
pub struct Expansion {
    coeffs: HarmonicCoeffs,
    evaluator: HarmonicEvaluator,
}

impl Expansion {
    pub fn new(coeffs: HarmonicCoeffs) -> Self {
        let evaluator = HarmonicEvaluator::new(coeffs.max_degree);
        Self { coeffs, evaluator }
    }

    pub fn coeffs(&self) -> &HarmonicCoeffs {
        &self.coeffs
    }

    pub fn evaluator(&self) -> &HarmonicEvaluator {
        &self.evaluator
    }

    /// Even- and odd-degree partial sums at `w`.
    fn parity_sums(&self, w: &Vec3) -> (Complex64, Complex64) {
        const STACK: usize = basis_len(16);
        let n = self.evaluator.len();
        let mut stack = [0.0; STACK];
        let mut heap;
        let y: &mut [f64] = if n <= STACK {
            &mut stack[..n]
        } else {
            heap = vec![0.0; n];
            &mut heap
        };
        self.evaluator.eval_into(w, y);
        let mut even = Complex64::new(0.0, 0.0);
        let mut odd = Complex64::new(0.0, 0.0);
        for k in 0..=self.coeffs.max_degree {
            let range = k * k..(k + 1) * (k + 1);
            let s: Complex64 = self.coeffs.coeffs[range.clone()]
                .iter()
                .zip(&y[range])
                .map(|(c, v)| c * v)
                .sum();
            if k % 2 == 0 {
                even += s;
            } else {
                odd += s;
            }
        }
        (even, odd)
    }
}

impl SphereFunction for Expansion {
    fn eval(&self, w: &Vec3) -> Complex64 {
        let (e, o) = self.parity_sums(w);
        e + o
    }

    fn eval_with_antipode(&self, w: &Vec3) -> (Complex64, Complex64) {
        let (e, o) = self.parity_sums(w);
        (e + o, e - o)
    }
}

/// Basis values at the nodes of a grid, node-major.
#[derive(Debug, Clone)]
pub struct BasisTable {
    pub grid: SphereGrid,
    pub max_degree: usize,
    pub values: Vec<f64>,
}

impl BasisTable {
    pub fn len(&self) -> usize {
        basis_len(self.max_degree)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn row(&self, node: usize) -> &[f64] {
        let n = self.len();
        &self.values[node * n..(node + 1) * n]
    }

    /// Weighted Gram matrix `G_{ab} = sum_i w_i Y_a(w_i) Y_b(w_i)`, row-major.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.len();
        let mut g = vec![0.0; n * n];
        for (i, &w) in self.grid.weights.iter().enumerate() {
            let row = self.row(i);
            for a in 0..n {
                let wa = w * row[a];
                for b in 0..n {
                    g[a * n + b] += wa * row[b];
                }
            }
        }
        g
    }
}

/// Requires `grid.exactness_degree >= 2 L` so the discrete Gram matrix is
/// the identity.
pub fn build_basis(max_degree: usize, grid: &SphereGrid) -> Result<BasisTable> {
    if grid.exactness_degree < 2 * max_degree {
        return Err(Error::InsufficientExactness {
            required: 2 * max_degree,
            available: grid.exactness_degree,
        });
    }
    let ev = HarmonicEvaluator::new(max_degree);
    let n = ev.len();
    let mut values = vec![0.0; grid.len() * n];
    for (i, w) in grid.nodes.iter().enumerate() {
        ev.eval_into(w, &mut values[i * n..(i + 1) * n]);
    }
    Ok(BasisTable {
        grid: grid.clone(),
        max_degree,
        values,
    })
}

/// `c_{k,m} = sum_i w_i f(w_i) Y_{k,m}(w_i)`.
pub fn analyze(values: &[Complex64], basis: &BasisTable) -> Result<HarmonicCoeffs> {
    if values.len() != basis.grid.len() {
        return Err(invalid(
            "values",
            format!("expected {} grid values, got {}", basis.grid.len(), values.len()),
        ));
    }
    let mut c = HarmonicCoeffs::zeros(basis.max_degree);
    for (i, (v, &w)) in values.iter().zip(&basis.grid.weights).enumerate() {
        let wv = v * w;
        for (ci, y) in c.coeffs.iter_mut().zip(basis.row(i)) {
            *ci += wv * *y;
        }
    }
    Ok(c)
}

/// Grid values `f(w_i) = sum c_{k,m} Y_{k,m}(w_i)`.
pub fn synthesize(c: &HarmonicCoeffs, basis: &BasisTable) -> Result<Vec<Complex64>> {
    if c.max_degree != basis.max_degree {
        return Err(Error::DegreeMismatch {
            expected: basis.max_degree,
            actual: c.max_degree,
        });
    }
    Ok((0..basis.grid.len())
        .map(|i| c.coeffs.iter().zip(basis.row(i)).map(|(a, y)| a * *y).sum())
        .collect())
}

/// Multiplies each degree-`k` block by `2 pi lambda_k`.
pub fn funk_hecke_apply(spectrum: &FunkHeckeSpectrum, c: &HarmonicCoeffs) -> Result<HarmonicCoeffs> {
    if spectrum.max_degree() < c.max_degree {
        return Err(Error::DegreeMismatch {
            expected: c.max_degree,
            actual: spectrum.max_degree(),
        });
    }
    let coeffs = c
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| a * (2.0 * PI * spectrum.lambda(degree_of(i))))
        .collect();
    Ok(HarmonicCoeffs {
        max_degree: c.max_degree,
        coeffs,
    })
}

/// Max-norm residual `|Delta_S2 Y + k(k+1) Y|` of the second-order
/// finite-difference Laplace–Beltrami operator on a `(theta, phi)` mesh with
/// `n_theta` intervals in `theta` and `2 n_theta` in `phi`.
///
/// The pole rows and the two rows next to each pole are skipped.
pub fn eigenvalue_residual(k: usize, m: isize, basis: &BasisTable, n_theta: usize) -> Result<f64> {
    if k > basis.max_degree || m.unsigned_abs() > k {
        return Err(invalid(
            "(k, m)",
            format!("({k}, {m}) not in basis of degree {}", basis.max_degree),
        ));
    }
    if n_theta < 8 {
        return Err(invalid("n_theta", "mesh needs at least 8 rows"));
    }
    let ev = HarmonicEvaluator::new(k);
    let idx = index(k, m);
    let n_phi = 2 * n_theta;
    let h = PI / n_theta as f64;
    let hp = 2.0 * PI / n_phi as f64;
    let mut buf = vec![0.0; ev.len()];
    let mut value = |theta: f64, phi: f64| {
        let s = theta.sin();
        ev.eval_into(&Vec3::new(s * phi.cos(), s * phi.sin(), theta.cos()), &mut buf);
        buf[idx]
    };
    let eig = (k * (k + 1)) as f64;
    let mut worst: f64 = 0.0;
    for i in 3..=(n_theta - 3) {
        let th = i as f64 * h;
        let (s, sp, sm) = (th.sin(), (th + 0.5 * h).sin(), (th - 0.5 * h).sin());
        for j in 0..n_phi {
            let ph = j as f64 * hp;
            let f0 = value(th, ph);
            let lap_theta = (sp * (value(th + h, ph) - f0) - sm * (f0 - value(th - h, ph))) / (h * h * s);
            let lap_phi = (value(th, ph + hp) - 2.0 * f0 + value(th, ph - hp)) / (hp * hp * s * s);
            worst = worst.max((lap_theta + lap_phi + eig * f0).abs());
        }
    }
    Ok(worst)
}
