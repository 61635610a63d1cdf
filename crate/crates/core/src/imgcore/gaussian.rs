use super::Plane;
use crate::error::{invalid, Result};

/// Normalized sampled Gaussian with `2 * radius + 1` taps.
pub fn gaussian_kernel_1d(sigma: f64, radius: usize) -> Vec<f64> {
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let x = i as f64 - radius as f64;
            (-x * x / denom).exp()
        })
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    taps
}

/// Maps an out-of-range index onto `0..n` by half-sample symmetric reflection.
#[inline]
pub(crate) fn reflect_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

/// Separable convolution with a symmetric odd-length 1-D kernel, reflective boundaries.
pub fn convolve_separable(p: &Plane, taps: &[f64]) -> Plane {
    let radius = (taps.len() / 2) as isize;
    let (h, w) = p.dims();
    let rows = Plane::from_fn(h, w, |r, c| {
        taps.iter()
            .enumerate()
            .map(|(k, t)| t * p.get(r, reflect_index(c as isize + k as isize - radius, w)))
            .sum()
    });
    Plane::from_fn(h, w, |r, c| {
        taps.iter()
            .enumerate()
            .map(|(k, t)| t * rows.get(reflect_index(r as isize + k as isize - radius, h), c))
            .sum()
    })
}

/// Separable Gaussian blur with radius `ceil(3 sigma)` and reflective boundaries.
pub fn gaussian_smooth(p: &Plane, sigma: f64) -> Result<Plane> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    let radius = (3.0 * sigma).ceil() as usize;
    Ok(convolve_separable(p, &gaussian_kernel_1d(sigma, radius)))
}
