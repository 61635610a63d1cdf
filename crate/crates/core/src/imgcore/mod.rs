//! Raster containers and the low-level signal operations shared by the
//! extractors: forward differences, separable Gaussian smoothing and kernel
//! transfer functions.

mod diff;
mod gaussian;
mod otf;
mod plane;

pub use diff::{div_adjoint, div_adjoint_periodic, grad_x, grad_x_periodic, grad_y, grad_y_periodic};
#[cfg(test)]
pub(crate) use gaussian::reflect_index;
pub use gaussian::{convolve_separable, gaussian_kernel_1d, gaussian_smooth};
pub(crate) use otf::periodic_otf;
pub use otf::{fft2, ifft2, kernel_otf, ComplexPlane, Kernel};
pub use plane::{Plane, RgbImage};
pub use rustfft::num_complex::Complex64;
