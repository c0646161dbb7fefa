//! Small vector helpers shared by the grid builders.

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// Orthonormal pair `(e1, e2)` spanning the plane orthogonal to `axis`.
///
/// `e1` is the normalized cross product of `axis` with the coordinate axis on
/// which `axis` has the smallest absolute component, and `e2 = axis_hat x e1`.
/// `axis` must be nonzero.
pub fn orthonormal_frame(axis: &Vec3) -> (Vec3, Vec3) {
    let unit = axis.normalize();
    let a = unit.map(f64::abs);
    let reference = if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = unit.cross(&reference).normalize();
    let e2 = unit.cross(&e1);
    (e1, e2)
}

/// Uniform random point on the unit sphere.
pub fn random_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> Vec3 {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let v = Vec3::new(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}
