//! Quadrature rules for the surface measure on S², for the circles on which
//! the convolution of two surface measures lives, and for the ball `|x| <= 2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::{orthonormal_frame, Vec3};
use crate::legendre::legendre_values_into;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`.
    ///
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Tricomi initial guesses; nodes are returned in increasing order and
    /// are exactly antisymmetric.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "a Gauss–Legendre rule needs at least one node"));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let mut p = vec![0.0; n + 1];
        for i in 0..n.div_ceil(2) {
            // i-th largest root
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                legendre_values_into(x, &mut p);
                dp = nf * (x * p[n] - p[n - 1]) / (x * x - 1.0);
                let dx = p[n] / dp;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    legendre_values_into(x, &mut p);
                    dp = nf * (x * p[n] - p[n - 1]) / (x * x - 1.0);
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights affinely mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Product rule for the surface measure `sigma` on S².
///
/// Gauss–Legendre in `t = cos(theta)` times a uniform azimuth grid of
/// `2 n_t` points offset by half a step from zero. Node `i_t * 2 n_t + j`
/// sits at `(t_{i_t}, phi_j)`; the grid is closed under `w -> -w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
    n_t: usize,
}

impl SphereGrid {
    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_phi(&self) -> usize {
        2 * self.n_t
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node at `-nodes[i]`.
    pub fn antipode_index(&self, i: usize) -> usize {
        let n_phi = self.n_phi();
        let (it, j) = (i / n_phi, i % n_phi);
        (self.n_t - 1 - it) * n_phi + (j + self.n_t) % n_phi
    }

    /// Weighted sum of real values given at the nodes.
    pub fn sum_real(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Weighted sum of complex values given at the nodes.
    pub fn sum(&self, values: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(values).map(|(w, v)| v * *w).sum()
    }
}

/// Builds the `n_t x 2 n_t` product grid; exact through degree `2 n_t - 1`.
pub fn build_sphere_grid(n_t: usize) -> Result<SphereGrid> {
    if n_t == 0 {
        return Err(invalid("n_t", "must be at least 1"));
    }
    let gl = GaussLegendre::new(n_t)?;
    let n_phi = 2 * n_t;
    let dphi = PI / n_t as f64;
    let mut nodes = Vec::with_capacity(n_t * n_phi);
    let mut weights = Vec::with_capacity(n_t * n_phi);
    for (&t, &w) in gl.nodes.iter().zip(&gl.weights) {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * dphi;
            nodes.push(Vec3::new(s * phi.cos(), s * phi.sin(), t));
            weights.push(w * dphi);
        }
    }
    Ok(SphereGrid {
        nodes,
        weights,
        exactness_degree: 2 * n_t - 1,
        n_t,
    })
}

/// `sum_i w_i f(w_i)`; a non-finite value of `f` is an error.
pub fn integrate_sphere<F>(grid: &SphereGrid, f: F) -> Result<Complex64>
where
    F: Fn(&Vec3) -> Complex64,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for (node, &w) in grid.nodes.iter().zip(&grid.weights) {
        let v = f(node);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "sphere integrand",
            });
        }
        acc += v * w;
    }
    Ok(acc)
}

/// The circle `S² ∩ (x + S²) = {w : |w| = |x - w| = 1}` with the density
/// `1/|x|` that turns `sigma * sigma` into an integral over the angle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSlice {
    pub center: Vec3,
    pub radius: f64,
    pub frame: (Vec3, Vec3),
    pub angle_nodes: Vec<f64>,
    pub weight_factor: f64,
}

impl CircleSlice {
    pub fn point(&self, phi: f64) -> Vec3 {
        self.center + self.radius * (phi.cos() * self.frame.0 + phi.sin() * self.frame.1)
    }

    pub fn points(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.angle_nodes.iter().map(|&phi| self.point(phi))
    }

    /// Trapezoidal weight of each angle node, `2 pi / n_c`.
    pub fn angle_weight(&self) -> f64 {
        2.0 * PI / self.angle_nodes.len() as f64
    }

    /// `(1/|x|) int_0^{2 pi} g(w(phi)) dphi` by the periodic trapezoid rule.
    pub fn integrate<F: FnMut(&Vec3) -> Complex64>(&self, mut g: F) -> Complex64 {
        let sum: Complex64 = self.points().map(|p| g(&p)).sum();
        sum * (self.angle_weight() * self.weight_factor)
    }
}

/// Slice at `x` with `n_c` uniformly spaced angles starting at zero.
pub fn build_circle_slice(x: &Vec3, n_c: usize) -> Result<CircleSlice> {
    if n_c == 0 {
        return Err(invalid("n_c", "must be at least 1"));
    }
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateSlice { norm });
    }
    if norm > 2.0 {
        return Err(Error::EmptyIntersection { norm });
    }
    Ok(slice_unchecked(x, norm, n_c))
}

pub(crate) fn slice_unchecked(x: &Vec3, norm: f64, n_c: usize) -> CircleSlice {
    let radius = (1.0 - 0.25 * norm * norm).max(0.0).sqrt();
    let step = 2.0 * PI / n_c as f64;
    CircleSlice {
        center: 0.5 * x,
        radius,
        frame: orthonormal_frame(x),
        angle_nodes: (0..n_c).map(|j| j as f64 * step).collect(),
        weight_factor: 1.0 / norm,
    }
}

/// Product rule on the ball `|x| <= 2`: Gauss–Legendre in the radius mapped
/// affinely onto `(0, 2)`, times a sphere grid of directions.
#[derive(Debug, Clone, PartialEq)]
pub struct BallGrid {
    pub radial_nodes: Vec<f64>,
    /// Includes the `r^2` Jacobian.
    pub radial_weights: Vec<f64>,
    pub directions: SphereGrid,
}

impl BallGrid {
    pub fn len(&self) -> usize {
        self.radial_nodes.len() * self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Iterates `(x, weight)` over all nodes, radius-major.
    pub fn points(&self) -> impl Iterator<Item = (Vec3, f64)> + '_ {
        self.radial_nodes
            .iter()
            .zip(&self.radial_weights)
            .flat_map(move |(&r, &wr)| {
                self.directions
                    .nodes
                    .iter()
                    .zip(&self.directions.weights)
                    .map(move |(u, &wd)| (r * u, wr * wd))
            })
    }

    pub fn integrate<F: Fn(&Vec3) -> f64>(&self, f: F) -> f64 {
        self.points().map(|(x, w)| w * f(&x)).sum()
    }
}

pub fn build_ball_grid(n_r: usize, directions: SphereGrid) -> Result<BallGrid> {
    if n_r == 0 {
        return Err(invalid("n_r", "must be at least 1"));
    }
    let gl = GaussLegendre::new(n_r)?;
    let (radial_nodes, radial_weights) = gl.mapped(0.0, 2.0).map(|(r, w)| (r, w * r * r)).unzip();
    Ok(BallGrid {
        radial_nodes,
        radial_weights,
        directions,
    })
}

/// Product rule in polar coordinates about an arbitrary center `c` on S².
///
/// Nodes are `v = s c + sqrt(1 - s^2) (cos(psi) a + sin(psi) b)` with
/// `s = 1 - 2u^2`, `u` Gauss–Legendre on `(0, 1)` and `psi` uniform. Then
/// `|v - c| = 2u` and `dsigma = 4u du dpsi`, so kernels behaving like
/// `|v - c|^p` with `p >= -1` become polynomial in `u`. The rule integrates
/// spherical polynomials of degree `d` exactly once `n_u, n_psi >= d + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarRule {
    u: Vec<f64>,
    weights: Vec<f64>,
    n_psi: usize,
}

impl PolarRule {
    pub fn new(n_u: usize, n_psi: usize) -> Result<Self> {
        if n_psi == 0 {
            return Err(invalid("n_psi", "must be at least 1"));
        }
        let gl = GaussLegendre::new(n_u)?;
        let dpsi = 2.0 * PI / n_psi as f64;
        let (u, weights) = gl.mapped(0.0, 1.0).map(|(u, w)| (u, 4.0 * u * w * dpsi)).unzip();
        Ok(Self { u, weights, n_psi })
    }

    pub fn n_u(&self) -> usize {
        self.u.len()
    }

    pub fn n_psi(&self) -> usize {
        self.n_psi
    }

    pub fn len(&self) -> usize {
        self.u.len() * self.n_psi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Calls `visit(v, weight, |v - center|)` for every node around `center`.
    pub fn for_each_around<F: FnMut(&Vec3, f64, f64)>(&self, center: &Vec3, mut visit: F) {
        let (a, b) = orthonormal_frame(center);
        let dpsi = 2.0 * PI / self.n_psi as f64;
        let dirs: Vec<Vec3> = (0..self.n_psi)
            .map(|j| {
                let psi = j as f64 * dpsi;
                psi.cos() * a + psi.sin() * b
            })
            .collect();
        for (&u, &w) in self.u.iter().zip(&self.weights) {
            let s = 1.0 - 2.0 * u * u;
            let r = 2.0 * u * (1.0 - u * u).max(0.0).sqrt();
            for d in &dirs {
                let v = s * center + r * d;
                visit(&v, w, 2.0 * u);
            }
        }
    }
}
