//! Noise schedule, forward corruption and deterministic implicit sampling
//! against a pluggable [`Denoiser`].

mod denoisers;
mod sampler;
mod schedule;

pub use denoisers::{BlurDenoiser, Denoiser, ExactNoiseOracle, ZeroDenoiser};
pub use sampler::{ddim_sample, ddim_sample_unclamped, gaussian_noise, timesteps, SamplerConfig};
pub use schedule::{forward_diffuse, linear_schedule, predict_x0, NoiseSchedule};
