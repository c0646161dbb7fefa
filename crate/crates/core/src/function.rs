//! Complex-valued functions on S² and the two antipodal operations used
//! throughout: the antipodal conjugate `f*(w) = conj(f(-w))` and the
//! nonnegative antipodally symmetric rearrangement
//! `f#(w) = sqrt((|f(w)|^2 + |f(-w)|^2) / 2)`.

use num_complex::Complex64;

use crate::geometry::Vec3;
use crate::quadrature::SphereGrid;

pub trait SphereFunction: Sync {
    fn eval(&self, w: &Vec3) -> Complex64;

    /// `(f(w), f(-w))`. Expansions override this to share one basis
    /// evaluation through parity.
    fn eval_with_antipode(&self, w: &Vec3) -> (Complex64, Complex64) {
        (self.eval(w), self.eval(&-w))
    }
}

impl<T: SphereFunction + ?Sized> SphereFunction for &T {
    fn eval(&self, w: &Vec3) -> Complex64 {
        (**self).eval(w)
    }

    fn eval_with_antipode(&self, w: &Vec3) -> (Complex64, Complex64) {
        (**self).eval_with_antipode(w)
    }
}

impl<T: SphereFunction + ?Sized> SphereFunction for Box<T> {
    fn eval(&self, w: &Vec3) -> Complex64 {
        (**self).eval(w)
    }

    fn eval_with_antipode(&self, w: &Vec3) -> (Complex64, Complex64) {
        (**self).eval_with_antipode(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub Complex64);

impl Constant {
    pub fn real(v: f64) -> Self {
        Self(Complex64::new(v, 0.0))
    }
}

impl SphereFunction for Constant {
    fn eval(&self, _w: &Vec3) -> Complex64 {
        self.0
    }
}

/// The modulation `w -> e^{i xi.w}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulated {
    pub xi: Vec3,
}

impl SphereFunction for Modulated {
    fn eval(&self, w: &Vec3) -> Complex64 {
        Complex64::new(0.0, self.xi.dot(w)).exp()
    }
}

/// Adapts a closure.
pub struct FnFunction<F>(pub F);

impl<F: Fn(&Vec3) -> Complex64 + Sync> SphereFunction for FnFunction<F> {
    fn eval(&self, w: &Vec3) -> Complex64 {
        (self.0)(w)
    }
}

/// Real-valued closure.
pub fn real_fn<F: Fn(&Vec3) -> f64 + Sync>(f: F) -> FnFunction<impl Fn(&Vec3) -> Complex64 + Sync> {
    FnFunction(move |w: &Vec3| Complex64::new(f(w), 0.0))
}

#[derive(Debug, Clone, Copy)]
pub struct AntipodalConjugate<F>(pub F);

impl<F: SphereFunction> SphereFunction for AntipodalConjugate<F> {
    fn eval(&self, w: &Vec3) -> Complex64 {
        self.0.eval(&-w).conj()
    }

    fn eval_with_antipode(&self, w: &Vec3) -> (Complex64, Complex64) {
        let (at, anti) = self.0.eval_with_antipode(w);
        (anti.conj(), at.conj())
    }
}

pub fn antipodal_conjugate<F: SphereFunction>(f: F) -> AntipodalConjugate<F> {
    AntipodalConjugate(f)
}

#[derive(Debug, Clone, Copy)]
pub struct SharpRearrangement<F>(pub F);

impl<F: SphereFunction> SharpRearrangement<F> {
    fn combine(a: Complex64, b: Complex64) -> Complex64 {
        Complex64::new((0.5 * (a.norm_sqr() + b.norm_sqr())).sqrt(), 0.0)
    }
}

impl<F: SphereFunction> SphereFunction for SharpRearrangement<F> {
    fn eval(&self, w: &Vec3) -> Complex64 {
        let (a, b) = self.0.eval_with_antipode(w);
        Self::combine(a, b)
    }

    fn eval_with_antipode(&self, w: &Vec3) -> (Complex64, Complex64) {
        let v = self.eval(w);
        (v, v)
    }
}

pub fn sharp_rearrangement<F: SphereFunction>(f: F) -> SharpRearrangement<F> {
    SharpRearrangement(f)
}

/// Values of `f` at the grid nodes.
pub fn grid_values<F: SphereFunction + ?Sized>(f: &F, grid: &SphereGrid) -> Vec<Complex64> {
    grid.nodes.iter().map(|w| f.eval(w)).collect()
}

/// `||f||_{L^2(sigma)}` by quadrature.
pub fn l2_norm<F: SphereFunction + ?Sized>(f: &F, grid: &SphereGrid) -> f64 {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .map(|(w, &q)| q * f.eval(w).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `||f||_{L^1(sigma)}` by quadrature.
pub fn l1_norm<F: SphereFunction + ?Sized>(f: &F, grid: &SphereGrid) -> f64 {
    grid.nodes
        .iter()
        .zip(&grid.weights)
        .map(|(w, &q)| q * f.eval(w).norm())
        .sum()
}
