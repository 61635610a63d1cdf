use super::IllumParams;
use crate::error::Result;
use crate::imgcore::{gaussian_smooth, grad_x, grad_y, Plane, RgbImage};

/// Direction-specific smoothing weights, strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct AnisoWeights {
    pub w_x: Plane,
    pub w_y: Plane,
}

/// `max_c I_c + delta` per pixel.
pub fn initial_illumination(img: &RgbImage, params: &IllumParams) -> Plane {
    let (h, w) = img.dims();
    Plane::from_fn(h, w, |r, c| {
        let [red, green, blue] = img.pixel(r, c);
        red.max(green).max(blue) + params.delta
    })
}

/// Global texture weight `1 / max(mean_c |∇ T_c|, eps_s)`.
pub fn texture_weight(t_ini_rgb: &RgbImage, params: &IllumParams) -> Plane {
    let (h, w) = t_ini_rgb.dims();
    let mut magnitude = Plane::zeros(h, w);
    for ch in t_ini_rgb.channels() {
        let gx = grad_x(ch);
        let gy = grad_y(ch);
        for ((m, x), y) in magnitude.data_mut().iter_mut().zip(gx.data()).zip(gy.data()) {
            *m += (x * x + y * y).sqrt() / 3.0;
        }
    }
    magnitude.map(|m| 1.0 / m.max(params.eps_s))
}

/// Local weights from the gradients of the Gaussian-smoothed channels.
pub fn local_weights(t_ini_rgb: &RgbImage, params: &IllumParams) -> Result<(Plane, Plane)> {
    let (h, w) = t_ini_rgb.dims();
    let mut mean_x = Plane::zeros(h, w);
    let mut mean_y = Plane::zeros(h, w);
    for ch in t_ini_rgb.channels() {
        let smooth = gaussian_smooth(ch, params.sigma)?;
        let gx = grad_x(&smooth);
        let gy = grad_y(&smooth);
        for (m, g) in mean_x.data_mut().iter_mut().zip(gx.data()) {
            *m += g.abs() / 3.0;
        }
        for (m, g) in mean_y.data_mut().iter_mut().zip(gy.data()) {
            *m += g.abs() / 3.0;
        }
    }
    let floor = params.eps_local;
    Ok((mean_x.map(|m| 1.0 / m.max(floor)), mean_y.map(|m| 1.0 / m.max(floor))))
}

pub fn combine_weights(w_to: &Plane, wx_local: &Plane, wy_local: &Plane) -> Result<AnisoWeights> {
    Ok(AnisoWeights {
        w_x: w_to.zip_map(wx_local, |a, b| a * b)?,
        w_y: w_to.zip_map(wy_local, |a, b| a * b)?,
    })
}

/// Full weight computation for a scalar initial illumination (broadcast to three channels).
pub fn anisotropic_weights(t_ini: &Plane, params: &IllumParams) -> Result<AnisoWeights> {
    let rgb = RgbImage::splat(t_ini);
    let w_to = texture_weight(&rgb, params);
    let (wx, wy) = local_weights(&rgb, params)?;
    combine_weights(&w_to, &wx, &wy)
}
