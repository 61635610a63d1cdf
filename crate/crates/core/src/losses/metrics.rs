use crate::error::{Result, ScemError};
use crate::imgcore::{gaussian_kernel_1d, Plane, RgbImage};

/// Side length of the SSIM window.
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
/// `(0.01 L)²` and `(0.03 L)²` with dynamic range `L = 1`.
pub const SSIM_C1: f64 = 0.01 * 0.01;
pub const SSIM_C2: f64 = 0.03 * 0.03;

/// Separable weighted sum over every window that fits entirely in the plane.
fn filter_valid(p: &Plane, taps: &[f64]) -> Plane {
    let k = taps.len();
    let (h, w) = p.dims();
    let (oh, ow) = (h + 1 - k, w + 1 - k);
    let rows = Plane::from_fn(h, ow, |r, c| {
        taps.iter().enumerate().map(|(i, t)| t * p.get(r, c + i)).sum()
    });
    Plane::from_fn(oh, ow, |r, c| {
        taps.iter().enumerate().map(|(i, t)| t * rows.get(r + i, c)).sum()
    })
}

/// Mean SSIM of one channel over all valid Gaussian-weighted windows.
pub fn ssim_plane(a: &Plane, b: &Plane) -> Result<f64> {
    a.ensure_same_dims(b)?;
    let (h, w) = a.dims();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(ScemError::ImageTooSmall {
            found: (h, w),
            window: SSIM_WINDOW,
        });
    }
    let taps = gaussian_kernel_1d(SSIM_SIGMA, SSIM_WINDOW / 2);
    let mu_a = filter_valid(a, &taps);
    let mu_b = filter_valid(b, &taps);
    let aa = filter_valid(&a.map(|v| v * v), &taps);
    let bb = filter_valid(&b.map(|v| v * v), &taps);
    let ab = filter_valid(&a.zip_map(b, |x, y| x * y)?, &taps);

    let n = mu_a.len();
    let mut total = 0.0;
    for i in 0..n {
        let (ma, mb) = (mu_a.data()[i], mu_b.data()[i]);
        let var_a = aa.data()[i] - ma * ma;
        let var_b = bb.data()[i] - mb * mb;
        let cov = ab.data()[i] - ma * mb;
        total += ((2.0 * ma * mb + SSIM_C1) * (2.0 * cov + SSIM_C2))
            / ((ma * ma + mb * mb + SSIM_C1) * (var_a + var_b + SSIM_C2));
    }
    Ok(total / n as f64)
}

/// SSIM averaged over the three channels.
pub fn ssim_metric(x_hat: &RgbImage, x_ref: &RgbImage) -> Result<f64> {
    x_hat.ensure_same_dims(x_ref)?;
    let mut total = 0.0;
    for c in 0..3 {
        total += ssim_plane(x_hat.channel(c), x_ref.channel(c))?;
    }
    Ok(total / 3.0)
}

pub fn mse(x_hat: &RgbImage, x_ref: &RgbImage) -> Result<f64> {
    x_hat.ensure_same_dims(x_ref)?;
    let sum: f64 = x_hat
        .channels()
        .iter()
        .zip(x_ref.channels())
        .flat_map(|(a, b)| a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)))
        .sum();
    Ok(sum / x_hat.sample_count() as f64)
}

/// `10 log10(1 / MSE)` for unit peak; `f64::INFINITY` when the images are identical.
pub fn psnr(x_hat: &RgbImage, x_ref: &RgbImage) -> Result<f64> {
    let m = mse(x_hat, x_ref)?;
    if m == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(-10.0 * m.log10())
    }
}
