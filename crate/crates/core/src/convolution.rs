//! Convolutions `f sigma * g sigma` of measures carried by the sphere, their
//! `L^2(R^3)` norms over the ball `|x| <= 2`, the extension operator itself,
//! and the `L^4` norm of the extension obtained through Plancherel:
//! `||(f sigma)^||_4^2 = (2 pi)^{3/2} ||f sigma * f* sigma||_2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function::{AntipodalConjugate, SphereFunction};
use crate::geometry::{orthonormal_frame, Vec3};
use crate::quadrature::{BallGrid, SphereGrid};

/// Cosines and sines of `n_c` equispaced angles `2 pi j / n_c`.
#[derive(Debug, Clone)]
pub(crate) struct AngleTable {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl AngleTable {
    pub fn new(n_c: usize) -> Self {
        let step = 2.0 * PI / n_c as f64;
        let (cos, sin) = (0..n_c)
            .map(|j| ((j as f64 * step).cos(), (j as f64 * step).sin()))
            .unzip();
        Self { cos, sin }
    }

    pub fn len(&self) -> usize {
        self.cos.len()
    }

    /// Angle weight `2 pi / n_c`.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    /// Slice points at `x` (`0 < |x| <= 2`) written into `out`.
    pub fn slice_points(&self, x: &Vec3, norm: f64, out: &mut Vec<Vec3>) {
        out.clear();
        let radius = (1.0 - 0.25 * norm * norm).max(0.0).sqrt();
        let (e1, e2) = orthonormal_frame(x);
        let (a, b) = (radius * e1, radius * e2);
        let center = 0.5 * x;
        out.extend(self.cos.iter().zip(&self.sin).map(|(&c, &s)| center + c * a + s * b));
    }
}

/// `(f sigma * g sigma)(x) = (1/|x|) int_0^{2 pi} f(w(phi)) g(x - w(phi)) dphi`.
///
/// Zero outside the support `|x| > 2`; the origin is a degenerate point and
/// is rejected.
pub fn convolve_at<F, G>(f: &F, g: &G, x: &Vec3, n_c: usize) -> Result<Complex64>
where
    F: SphereFunction + ?Sized,
    G: SphereFunction + ?Sized,
{
    if n_c == 0 {
        return Err(invalid("n_c", "must be at least 1"));
    }
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateSlice { norm });
    }
    if norm > 2.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let angles = AngleTable::new(n_c);
    let mut pts = Vec::with_capacity(n_c);
    Ok(convolve_with(f, g, x, norm, &angles, &mut pts))
}

pub(crate) fn convolve_with<F, G>(
    f: &F,
    g: &G,
    x: &Vec3,
    norm: f64,
    angles: &AngleTable,
    pts: &mut Vec<Vec3>,
) -> Complex64
where
    F: SphereFunction + ?Sized,
    G: SphereFunction + ?Sized,
{
    angles.slice_points(x, norm, pts);
    let sum: Complex64 = pts.iter().map(|p| f.eval(p) * g.eval(&(x - p))).sum();
    sum * (angles.step() / norm)
}

/// Values of `f sigma * g sigma` along a ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvProfile {
    pub direction: [f64; 3],
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
}

pub fn conv_profile<F, G>(f: &F, g: &G, direction: &Vec3, radii: &[f64], n_c: usize) -> Result<ConvProfile>
where
    F: SphereFunction + ?Sized,
    G: SphereFunction + ?Sized,
{
    let u = direction.normalize();
    let values = radii
        .iter()
        .map(|&r| convolve_at(f, g, &(r * u), n_c))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvProfile {
        direction: [u.x, u.y, u.z],
        radii: radii.to_vec(),
        values,
    })
}

/// `||f sigma * g sigma||_{L^2(R^3)}` on the ball grid.
pub fn conv_l2_norm<F, G>(f: &F, g: &G, ball: &BallGrid, n_c: usize) -> Result<f64>
where
    F: SphereFunction + ?Sized,
    G: SphereFunction + ?Sized,
{
    if n_c == 0 {
        return Err(invalid("n_c", "must be at least 1"));
    }
    let angles = AngleTable::new(n_c);
    let dirs = &ball.directions;
    let partial: Vec<f64> = ball
        .radial_nodes
        .par_iter()
        .zip(&ball.radial_weights)
        .map(|(&r, &wr)| {
            let mut pts = Vec::with_capacity(n_c);
            let mut acc = 0.0;
            for (u, &wd) in dirs.nodes.iter().zip(&dirs.weights) {
                let c = convolve_with(f, g, &(r * u), r, &angles, &mut pts);
                acc += wd * c.norm_sqr();
            }
            wr * acc
        })
        .collect();
    Ok(partial.iter().sum::<f64>().sqrt())
}

/// `(f sigma)^(x) = int e^{-i x.w} f(w) dsigma(w)`.
pub fn extension_at<F: SphereFunction + ?Sized>(f: &F, x: &Vec3, grid: &SphereGrid) -> Complex64 {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .map(|(w, &q)| Complex64::new(0.0, -x.dot(w)).exp() * f.eval(w) * q)
        .sum()
}

/// `||(f sigma)^||_{L^4(R^3)} = ((2 pi)^{3/2} ||f sigma * f* sigma||_2)^{1/2}`.
pub fn l4_norm<F: SphereFunction + ?Sized>(f: &F, ball: &BallGrid, n_c: usize) -> Result<f64> {
    let fstar = AntipodalConjugate(f);
    let conv = conv_l2_norm(f, &fstar, ball, n_c)?;
    Ok(((2.0 * PI).powf(1.5) * conv).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{Constant, Modulated};
    use crate::quadrature::{build_ball_grid, build_sphere_grid};
    use approx::assert_relative_eq;

    #[test]
    fn constant_convolution_closed_form() {
        let one = Constant::real(1.0);
        let v = convolve_at(&one, &one, &Vec3::new(0.0, 1.0, 0.0), 8).unwrap();
        assert_relative_eq!(v.re, 2.0 * PI, max_relative = 1e-14);
        let v = convolve_at(&one, &one, &Vec3::new(0.0, 0.0, 2.0), 8).unwrap();
        assert_relative_eq!(v.re, PI, max_relative = 1e-14);
        assert_eq!(
            convolve_at(&one, &one, &Vec3::new(2.1, 0.0, 0.0), 8).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert!(matches!(
            convolve_at(&one, &one, &Vec3::zeros(), 8),
            Err(Error::DegenerateSlice { .. })
        ));
    }

    #[test]
    fn modulation_is_constant_on_slices() {
        let xi = Vec3::new(0.4, -1.1, 0.7);
        let f = Modulated { xi };
        let fstar = AntipodalConjugate(&f);
        let x = Vec3::new(0.3, 0.9, -0.5);
        let v = convolve_at(&f, &fstar, &x, 16).unwrap();
        let expect = Complex64::new(0.0, xi.dot(&x)).exp() * (2.0 * PI / x.norm());
        assert!((v - expect).norm() < 1e-13 * expect.norm());
    }

    #[test]
    fn l2_norm_of_sigma_star_sigma() {
        let ball = build_ball_grid(12, build_sphere_grid(4).unwrap()).unwrap();
        let one = Constant::real(1.0);
        let n = conv_l2_norm(&one, &one, &ball, 4).unwrap();
        assert_relative_eq!(n, 2f64.powf(2.5) * PI.powf(1.5), max_relative = 1e-12);
        let zero = Constant::real(0.0);
        assert_eq!(conv_l2_norm(&zero, &zero, &ball, 4).unwrap(), 0.0);
    }

    #[test]
    fn extension_of_constant() {
        let grid = build_sphere_grid(16).unwrap();
        let one = Constant::real(1.0);
        assert_relative_eq!(
            extension_at(&one, &Vec3::zeros(), &grid).re,
            4.0 * PI,
            max_relative = 1e-13
        );
        // oracle 4 pi sin|x| / |x|
        let v = extension_at(&one, &Vec3::new(0.0, PI, 0.0), &grid);
        assert!(v.norm() < 1e-12);
        let v = extension_at(&one, &Vec3::new(0.6, 0.0, 0.8), &grid);
        assert_relative_eq!(v.re, 4.0 * PI * 1f64.sin(), max_relative = 1e-12);
    }

    #[test]
    fn l4_norm_of_constant_and_modulation() {
        let ball = build_ball_grid(16, build_sphere_grid(8).unwrap()).unwrap();
        let expect = 4.0 * PI.powf(1.5);
        assert_relative_eq!(
            l4_norm(&Constant::real(1.0), &ball, 8).unwrap(),
            expect,
            max_relative = 1e-12
        );
        let m = Modulated {
            xi: Vec3::new(0.0, 0.6, 0.8),
        };
        assert_relative_eq!(l4_norm(&m, &ball, 8).unwrap(), expect, max_relative = 1e-12);
        assert_eq!(l4_norm(&Constant::real(0.0), &ball, 8).unwrap(), 0.0);
    }
}
