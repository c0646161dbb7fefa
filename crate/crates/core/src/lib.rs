pub mod convolution;
pub mod error;
pub mod forms;
pub mod function;
pub mod geometry;
pub mod harmonics;
pub mod legendre;
pub mod maximizer;
pub mod quadrature;

pub use error::{Error, Result};
pub use geometry::Vec3;
pub use num_complex::Complex64;
