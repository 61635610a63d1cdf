use crate::error::{invalid, Result, ScemError};
use crate::imgcore::RgbImage;

/// Per-timestep noise tables for `t = 1..=t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    betas: Vec<f64>,
    alphas: Vec<f64>,
    alpha_bars: Vec<f64>,
}

impl NoiseSchedule {
    pub fn from_betas(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(invalid("t_max", "must be at least 1"));
        }
        if let Some(b) = betas.iter().find(|&&b| !(b > 0.0 && b < 1.0)) {
            return Err(invalid("betas", format!("{b} outside (0, 1)")));
        }
        let alphas: Vec<f64> = betas.iter().map(|b| 1.0 - b).collect();
        let alpha_bars = alphas
            .iter()
            .scan(1.0, |acc, a| {
                *acc *= a;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            betas,
            alphas,
            alpha_bars,
        })
    }

    pub fn t_max(&self) -> usize {
        self.betas.len()
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn alpha_bars(&self) -> &[f64] {
        &self.alpha_bars
    }

    pub fn check_timestep(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.t_max() {
            return Err(ScemError::TimestepOutOfRange { t, t_max: self.t_max() });
        }
        Ok(())
    }

    /// `ᾱ_t` for 1-based `t`; `ᾱ_0 = 1`.
    pub fn alpha_bar(&self, t: usize) -> f64 {
        if t == 0 {
            1.0
        } else {
            self.alpha_bars[t - 1]
        }
    }
}

impl Default for NoiseSchedule {
    fn default() -> Self {
        linear_schedule(1000, 1e-4, 2e-2).expect("default schedule is valid")
    }
}

/// Betas spaced linearly from `beta_start` to `beta_end`, both inclusive.
pub fn linear_schedule(t_max: usize, beta_start: f64, beta_end: f64) -> Result<NoiseSchedule> {
    if t_max == 0 {
        return Err(invalid("t_max", "must be at least 1"));
    }
    if !(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0) {
        return Err(invalid(
            "beta",
            format!("need 0 < beta_start <= beta_end < 1, got {beta_start}..{beta_end}"),
        ));
    }
    let betas = if t_max == 1 {
        vec![beta_start]
    } else {
        let step = (beta_end - beta_start) / (t_max - 1) as f64;
        (0..t_max)
            .map(|i| {
                if i + 1 == t_max {
                    beta_end
                } else {
                    beta_start + step * i as f64
                }
            })
            .collect()
    };
    NoiseSchedule::from_betas(betas)
}

/// `x_t = sqrt(ᾱ_t) x0 + sqrt(1 - ᾱ_t) eps`.
pub fn forward_diffuse(x0: &RgbImage, t: usize, eps: &RgbImage, sched: &NoiseSchedule) -> Result<RgbImage> {
    sched.check_timestep(t)?;
    let ab = sched.alpha_bar(t);
    let (a, b) = (ab.sqrt(), (1.0 - ab).sqrt());
    x0.zip_map(eps, |x, e| a * x + b * e)
}

/// Inverts the forward formula for a given noise estimate.
pub fn predict_x0(x_t: &RgbImage, eps_hat: &RgbImage, t: usize, sched: &NoiseSchedule) -> Result<RgbImage> {
    sched.check_timestep(t)?;
    let ab = sched.alpha_bar(t);
    let (a, b) = (ab.sqrt(), (1.0 - ab).sqrt());
    x_t.zip_map(eps_hat, |x, e| (x - b * e) / a)
}
