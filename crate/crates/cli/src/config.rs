//! Flat `key = value` run configuration; every key is optional.

use std::fs;
use std::path::Path;

use scem_core::diffusion::linear_schedule;
use scem_core::{IllumParams, LossWeights, NoiseSchedule, SamplerConfig, ShadowParams, StackLayout};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub delta: f64,
    pub eps_s: f64,
    pub eps_local: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub solver_tol: f64,
    pub solver_max_iter: usize,

    pub tau: f64,
    pub se_iterations: usize,
    pub lambda_se: f64,
    pub eps_num: f64,

    pub t_max: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub num_steps: usize,
    pub seed: u64,

    pub w_illum: f64,
    pub w_chrom: f64,
    pub w_ssim: f64,
    pub w_feat: f64,

    /// Store the illumination map three times in the stack (15 channels).
    pub replicate_illumination: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let il = IllumParams::default();
        let sh = ShadowParams::default();
        let sa = SamplerConfig::default();
        let lw = LossWeights::default();
        Self {
            delta: il.delta,
            eps_s: il.eps_s,
            eps_local: il.eps_local,
            sigma: il.sigma,
            lambda: il.lambda,
            gamma: il.gamma,
            solver_tol: il.solver_tol,
            solver_max_iter: il.solver_max_iter,
            tau: sh.tau,
            se_iterations: sh.iterations,
            lambda_se: sh.lambda_se,
            eps_num: sh.eps_num,
            t_max: 1000,
            beta_start: 1e-4,
            beta_end: 2e-2,
            num_steps: sa.num_steps,
            seed: sa.seed,
            w_illum: lw.w_illum,
            w_chrom: lw.w_chrom,
            w_ssim: lw.w_ssim,
            w_feat: lw.w_feat,
            replicate_illumination: false,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn illum(&self) -> Result<IllumParams, CliError> {
        let p = IllumParams {
            delta: self.delta,
            eps_s: self.eps_s,
            eps_local: self.eps_local,
            sigma: self.sigma,
            lambda: self.lambda,
            gamma: self.gamma,
            solver_tol: self.solver_tol,
            solver_max_iter: self.solver_max_iter,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn shadow(&self) -> Result<ShadowParams, CliError> {
        let p = ShadowParams {
            tau: self.tau,
            iterations: self.se_iterations,
            lambda_se: self.lambda_se,
            eps_num: self.eps_num,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn schedule(&self) -> Result<NoiseSchedule, CliError> {
        Ok(linear_schedule(self.t_max, self.beta_start, self.beta_end)?)
    }

    pub fn sampler(&self, sched: &NoiseSchedule) -> Result<SamplerConfig, CliError> {
        let c = SamplerConfig {
            num_steps: self.num_steps,
            seed: self.seed,
        };
        c.validate(sched)?;
        Ok(c)
    }

    pub fn loss_weights(&self) -> Result<LossWeights, CliError> {
        Ok(LossWeights::new(self.w_illum, self.w_chrom, self.w_ssim, self.w_feat)?)
    }

    pub fn layout(&self) -> StackLayout {
        if self.replicate_illumination {
            StackLayout::ReplicatedIllumination
        } else {
            StackLayout::Compact
        }
    }
}
