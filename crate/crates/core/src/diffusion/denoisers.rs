use super::NoiseSchedule;
use crate::error::{Result, ScemError};
use crate::imgcore::{gaussian_smooth, RgbImage};
use crate::scem::ConditionStack;

/// Noise predictor `ε_θ(x_t, t, c)`.
///
/// Implementations must return an image with the dimensions of `x_t` and be
/// deterministic; they may be called from several threads at once.
pub trait Denoiser: Send + Sync {
    fn predict_noise(&self, x_t: &RgbImage, condition: &ConditionStack, t: usize) -> Result<RgbImage>;
}

/// Returns the exact noise that relates `x_t` to a fixed clean target.
#[derive(Debug, Clone)]
pub struct ExactNoiseOracle {
    target: RgbImage,
    schedule: NoiseSchedule,
}

impl ExactNoiseOracle {
    pub fn new(target: RgbImage, schedule: NoiseSchedule) -> Self {
        Self { target, schedule }
    }

    pub fn target(&self) -> &RgbImage {
        &self.target
    }
}

impl Denoiser for ExactNoiseOracle {
    fn predict_noise(&self, x_t: &RgbImage, _condition: &ConditionStack, t: usize) -> Result<RgbImage> {
        self.schedule.check_timestep(t)?;
        if x_t.dims() != self.target.dims() {
            return Err(ScemError::Denoiser(format!(
                "oracle target is {:?} but x_t is {:?}",
                self.target.dims(),
                x_t.dims()
            )));
        }
        let ab = self.schedule.alpha_bar(t);
        let (a, b) = (ab.sqrt(), (1.0 - ab).sqrt());
        x_t.zip_map(&self.target, |x, x0| (x - a * x0) / b)
    }
}

/// Always predicts zero noise.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroDenoiser;

impl Denoiser for ZeroDenoiser {
    fn predict_noise(&self, x_t: &RgbImage, _condition: &ConditionStack, _t: usize) -> Result<RgbImage> {
        Ok(RgbImage::zeros(x_t.height(), x_t.width()))
    }
}

/// Toy linear denoiser: treats the high-pass residual `x_t - G_σ * x_t` as noise.
#[derive(Debug, Clone, Copy)]
pub struct BlurDenoiser {
    pub sigma: f64,
}

impl Default for BlurDenoiser {
    fn default() -> Self {
        Self { sigma: 1.0 }
    }
}

impl Denoiser for BlurDenoiser {
    fn predict_noise(&self, x_t: &RgbImage, _condition: &ConditionStack, _t: usize) -> Result<RgbImage> {
        let smooth = x_t.map_channels(|ch| gaussian_smooth(ch, self.sigma))?;
        x_t.zip_map(&smooth, |x, s| x - s)
    }
}
