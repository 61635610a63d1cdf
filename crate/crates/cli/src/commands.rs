use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use scem_core::diffusion::{ddim_sample, gaussian_noise, BlurDenoiser, ExactNoiseOracle, ZeroDenoiser};
use scem_core::losses::{loss_chrom, loss_illum, loss_ssim, psnr, ssim_metric};
use scem_core::{extract_priors, stack_condition_with, ConditionStack, Denoiser, PriorBundle, RgbImage};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::png::{load_image, load_png, save_gray_preview, save_montage, save_rgb_preview};
use crate::tensor::Tensor;

/// Tensor files written per input by `extract`.
pub const EXTRACT_TENSORS: [&str; 5] = ["t_ref.scem", "r.scem", "s3ch.scem", "phi.scem", "stack.scem"];
pub const EXTRACT_PREVIEWS: [&str; 5] = ["t_ref.png", "r.png", "s3ch.png", "phi.png", "stack.png"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DenoiserKind {
    Oracle(PathBuf),
    Zero,
    Blur,
}

impl std::str::FromStr for DenoiserKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(DenoiserKind::Zero),
            "blur" => Ok(DenoiserKind::Blur),
            _ => match s.strip_prefix("oracle:") {
                Some(p) if !p.is_empty() => Ok(DenoiserKind::Oracle(PathBuf::from(p))),
                _ => Err(format!("unknown denoiser `{s}`; expected oracle:<path>, zero or blur")),
            },
        }
    }
}

fn write_bundle(bundle: &PriorBundle, stack: &ConditionStack, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Tensor::from_planes(std::slice::from_ref(&bundle.t_ref)).save(&dir.join("t_ref.scem"))?;
    Tensor::from_rgb(&bundle.r).save(&dir.join("r.scem"))?;
    Tensor::from_rgb(&bundle.s3ch).save(&dir.join("s3ch.scem"))?;
    Tensor::from_rgb(&bundle.phi).save(&dir.join("phi.scem"))?;
    Tensor::from_stack(stack).save(&dir.join("stack.scem"))?;

    save_gray_preview(&bundle.t_ref, &dir.join("t_ref.png"))?;
    save_rgb_preview(&bundle.r, &dir.join("r.png"))?;
    save_rgb_preview(&bundle.s3ch, &dir.join("s3ch.png"))?;
    save_rgb_preview(&bundle.phi, &dir.join("phi.png"))?;
    save_montage(stack.channels(), &dir.join("stack.png"))
}

/// Output directory per input: `out` itself for a single input, otherwise
/// `out/<file stem>`.
pub fn extract_dirs(inputs: &[PathBuf], out: &Path) -> Result<Vec<PathBuf>, CliError> {
    if inputs.len() == 1 {
        return Ok(vec![out.to_path_buf()]);
    }
    let mut seen = HashSet::new();
    inputs
        .iter()
        .map(|p| {
            let stem = p
                .file_stem()
                .ok_or_else(|| CliError::Shape(format!("{}: no file name", p.display())))?;
            if !seen.insert(stem.to_os_string()) {
                return Err(CliError::Shape(format!(
                    "duplicate input name `{}`",
                    stem.to_string_lossy()
                )));
            }
            Ok(out.join(stem))
        })
        .collect()
}

/// Extracts priors from every input; nothing is written unless every input
/// was read and processed successfully.
pub fn extract(inputs: &[PathBuf], out: &Path, cfg: &RunConfig, jobs: usize) -> Result<(), CliError> {
    if inputs.is_empty() {
        return Err(CliError::Shape("no input images".into()));
    }
    let illum = cfg.illum()?;
    let shadow = cfg.shadow()?;
    let layout = cfg.layout();
    let dirs = extract_dirs(inputs, out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Shape(format!("thread pool: {e}")))?;

    let images = pool.install(|| inputs.par_iter().map(|p| load_png(p)).collect::<Result<Vec<_>, _>>())?;
    let results = pool.install(|| {
        images
            .par_iter()
            .map(|img| {
                let bundle = extract_priors(img, &illum, &shadow)?;
                let stack = stack_condition_with(&bundle, layout)?;
                Ok((bundle, stack))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    pool.install(|| {
        results
            .par_iter()
            .zip(&dirs)
            .try_for_each(|((bundle, stack), dir)| write_bundle(bundle, stack, dir))
    })
}

/// Runs the implicit sampler on a stored condition stack and writes
/// `out.scem` and `out.png` into `out`.
pub fn sample(stack_path: &Path, kind: &DenoiserKind, out: &Path, cfg: &RunConfig) -> Result<RgbImage, CliError> {
    let sched = cfg.schedule()?;
    let sampler = cfg.sampler(&sched)?;
    let stack = Tensor::load(stack_path)?.to_stack()?;
    let (h, w) = stack.dims();

    let denoiser: Box<dyn Denoiser> = match kind {
        DenoiserKind::Zero => Box::new(ZeroDenoiser),
        DenoiserKind::Blur => Box::new(BlurDenoiser::default()),
        DenoiserKind::Oracle(path) => {
            let target = load_image(path)?;
            if target.dims() != (h, w) {
                return Err(CliError::Shape(format!(
                    "oracle target is {:?} but the stack is {:?}",
                    target.dims(),
                    (h, w)
                )));
            }
            Box::new(ExactNoiseOracle::new(target, sched.clone()))
        }
    };

    let noise = gaussian_noise(h, w, sampler.seed);
    let x0 = ddim_sample(denoiser.as_ref(), &stack, &sampler, &sched, &noise)?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    Tensor::from_rgb(&x0).save(&out.join("out.scem"))?;
    save_rgb_preview(&x0, &out.join("out.png"))?;
    Ok(x0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub psnr: f64,
    pub ssim: f64,
    pub l_illum: f64,
    pub l_chrom: f64,
    pub l_ssim: f64,
}

impl MetricsRecord {
    pub fn compute(a: &RgbImage, b: &RgbImage) -> Result<Self, CliError> {
        if a.dims() != b.dims() {
            return Err(CliError::Shape(format!(
                "image sizes differ: {:?} vs {:?}",
                a.dims(),
                b.dims()
            )));
        }
        Ok(Self {
            psnr: psnr(a, b)?,
            ssim: ssim_metric(a, b)?,
            l_illum: loss_illum(a, b)?,
            l_chrom: loss_chrom(a, b)?,
            l_ssim: loss_ssim(a, b)?,
        })
    }
}

fn fmt_value(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".to_string()
    } else {
        format!("{v:.6}")
    }
}

impl std::fmt::Display for MetricsRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "psnr={} ssim={} l_illum={} l_chrom={} l_ssim={}",
            fmt_value(self.psnr),
            fmt_value(self.ssim),
            fmt_value(self.l_illum),
            fmt_value(self.l_chrom),
            fmt_value(self.l_ssim)
        )
    }
}

pub fn metrics_line(a: &Path, b: &Path) -> Result<String, CliError> {
    let x = load_image(a)?;
    let y = load_image(b)?;
    Ok(MetricsRecord::compute(&x, &y)?.to_string())
}
