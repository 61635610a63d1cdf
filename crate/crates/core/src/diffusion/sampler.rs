use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{predict_x0, Denoiser, NoiseSchedule};
use crate::error::{invalid, Result, ScemError};
use crate::imgcore::RgbImage;
use crate::scem::ConditionStack;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub num_steps: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            num_steps: 100,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self, sched: &NoiseSchedule) -> Result<()> {
        if self.num_steps == 0 || self.num_steps > sched.t_max() {
            return Err(invalid(
                "num_steps",
                format!("must be in 1..={}, got {}", sched.t_max(), self.num_steps),
            ));
        }
        Ok(())
    }
}

/// Standard-normal image drawn from ChaCha20 seeded with `seed`.
///
/// Samples are drawn channel-interleaved in row-major pixel order, so the
/// result is reproducible bit for bit across platforms.
pub fn gaussian_noise(height: usize, width: usize, seed: u64) -> RgbImage {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..height * width * 3)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    RgbImage::from_interleaved(height, width, &samples).expect("length matches")
}

/// Descending timesteps from `t_max` to 1, evenly spaced and rounded.
pub fn timesteps(t_max: usize, num_steps: usize) -> Vec<usize> {
    match num_steps {
        0 => Vec::new(),
        1 => vec![t_max],
        n => {
            let stride = (t_max - 1) as f64 / (n - 1) as f64;
            (0..n).map(|i| t_max - (stride * i as f64).round() as usize).collect()
        }
    }
}

/// Deterministic implicit sampling without the final clamp.
pub fn ddim_sample_unclamped(
    denoiser: &dyn Denoiser,
    condition: &ConditionStack,
    config: &SamplerConfig,
    sched: &NoiseSchedule,
    init_noise: &RgbImage,
) -> Result<RgbImage> {
    config.validate(sched)?;
    if init_noise.dims() != condition.dims() {
        return Err(ScemError::DimensionMismatch {
            expected: condition.dims(),
            found: init_noise.dims(),
        });
    }
    let steps = timesteps(sched.t_max(), config.num_steps);
    let mut x = init_noise.clone();
    let mut x0 = x.clone();
    for (i, &t) in steps.iter().enumerate() {
        let eps = denoiser.predict_noise(&x, condition, t)?;
        if eps.dims() != x.dims() {
            return Err(ScemError::Denoiser(format!(
                "returned {:?} for input {:?}",
                eps.dims(),
                x.dims()
            )));
        }
        x0 = predict_x0(&x, &eps, t, sched)?;
        if let Some(&t_prev) = steps.get(i + 1) {
            let ab = sched.alpha_bar(t_prev);
            let (a, b) = (ab.sqrt(), (1.0 - ab).sqrt());
            x = x0.zip_map(&eps, |p, e| a * p + b * e)?;
        }
    }
    Ok(x0)
}

/// Deterministic implicit sampling (`eta = 0`) over `config.num_steps`
/// timesteps; the final clean-image estimate is clamped to `[0, 1]`.
pub fn ddim_sample(
    denoiser: &dyn Denoiser,
    condition: &ConditionStack,
    config: &SamplerConfig,
    sched: &NoiseSchedule,
    init_noise: &RgbImage,
) -> Result<RgbImage> {
    Ok(ddim_sample_unclamped(denoiser, condition, config, sched, init_noise)?.map(|v| v.clamp(0.0, 1.0)))
}
