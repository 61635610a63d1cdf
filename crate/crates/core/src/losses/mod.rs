//! Training losses and image quality metrics.
//!
//! `total = simple + w_illum * illum + w_chrom * chrom + w_ssim * ssim + w_feat * feat`.
//! The chromatic term is summed over pixels while every other term is a mean.

mod features;
mod metrics;

pub use features::{avg_pool2, DogPyramid, FeatureExtractor, FeatureMap, IdentityExtractor};
pub use metrics::{mse, psnr, ssim_metric, ssim_plane, SSIM_C1, SSIM_C2, SSIM_SIGMA, SSIM_WINDOW};

use crate::error::{invalid, Result, ScemError};
use crate::imgcore::{Plane, RgbImage};

/// Luma weights used for the grayscale conversion.
pub const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// Pixels whose RGB norm is below this contribute nothing to the chromatic loss.
pub const CHROMA_NORM_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub w_illum: f64,
    pub w_chrom: f64,
    pub w_ssim: f64,
    pub w_feat: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            w_illum: 1.0,
            w_chrom: 1.0,
            w_ssim: 1.0,
            w_feat: 1.0,
        }
    }
}

impl LossWeights {
    pub fn new(w_illum: f64, w_chrom: f64, w_ssim: f64, w_feat: f64) -> Result<Self> {
        let w = Self {
            w_illum,
            w_chrom,
            w_ssim,
            w_feat,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("w_illum", self.w_illum),
            ("w_chrom", self.w_chrom),
            ("w_ssim", self.w_ssim),
            ("w_feat", self.w_feat),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Every weight multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            w_illum: k * self.w_illum,
            w_chrom: k * self.w_chrom,
            w_ssim: k * self.w_ssim,
            w_feat: k * self.w_feat,
        }
    }
}

/// The five unweighted loss terms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossTerms {
    pub simple: f64,
    pub illum: f64,
    pub chrom: f64,
    pub ssim: f64,
    pub feat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub simple: f64,
    pub illum: f64,
    pub chrom: f64,
    pub ssim: f64,
    pub feat: f64,
    pub total: f64,
}

fn sum_sq_diff(a: &Plane, b: &Plane) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mean squared error between true and predicted noise.
pub fn loss_simple(eps_true: &RgbImage, eps_pred: &RgbImage) -> Result<f64> {
    mse(eps_pred, eps_true)
}

pub fn grayscale(img: &RgbImage) -> Plane {
    let (h, w) = img.dims();
    Plane::from_fn(h, w, |r, c| {
        let px = img.pixel(r, c);
        LUMA[0] * px[0] + LUMA[1] * px[1] + LUMA[2] * px[2]
    })
}

/// Mean absolute difference of the grayscale conversions.
pub fn loss_illum(x_hat: &RgbImage, x_ref: &RgbImage) -> Result<f64> {
    x_hat.ensure_same_dims(x_ref)?;
    let a = grayscale(x_hat);
    let b = grayscale(x_ref);
    let sum: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).sum();
    Ok(sum / a.len() as f64)
}

/// `Σ_pixels (1 - cos∠(x̂, x))` over RGB vectors.
pub fn loss_chrom(x_hat: &RgbImage, x_ref: &RgbImage) -> Result<f64> {
    x_hat.ensure_same_dims(x_ref)?;
    let (h, w) = x_hat.dims();
    let mut total = 0.0;
    for r in 0..h {
        for c in 0..w {
            let a = x_hat.pixel(r, c);
            let b = x_ref.pixel(r, c);
            let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            if na < CHROMA_NORM_FLOOR || nb < CHROMA_NORM_FLOOR {
                continue;
            }
            let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            total += 1.0 - (dot / (na * nb)).clamp(-1.0, 1.0);
        }
    }
    Ok(total)
}

/// `1 - SSIM`, in `[0, 2]`.
pub fn loss_ssim(x_hat: &RgbImage, x_ref: &RgbImage) -> Result<f64> {
    Ok(1.0 - ssim_metric(x_hat, x_ref)?)
}

/// `Σ_l ‖φ_l(x̂) - φ_l(x)‖² / N_l`.
pub fn loss_feat(x_hat: &RgbImage, x_ref: &RgbImage, fx: &dyn FeatureExtractor) -> Result<f64> {
    x_hat.ensure_same_dims(x_ref)?;
    let a = fx.extract(x_hat)?;
    let b = fx.extract(x_ref)?;
    if a.len() != b.len() {
        return Err(ScemError::FeatureExtractor(format!(
            "layer count differs: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut total = 0.0;
    for (la, lb) in a.iter().zip(&b) {
        if la.channels.len() != lb.channels.len() {
            return Err(ScemError::FeatureExtractor("channel count differs".into()));
        }
        let n = la.element_count();
        if n == 0 {
            continue;
        }
        let mut sq = 0.0;
        for (pa, pb) in la.channels.iter().zip(&lb.channels) {
            pa.ensure_same_dims(pb)?;
            sq += sum_sq_diff(pa, pb);
        }
        total += sq / n as f64;
    }
    Ok(total)
}

/// Weighted sum of precomputed terms.
pub fn loss_total(terms: &LossTerms, weights: &LossWeights) -> Result<LossReport> {
    weights.validate()?;
    let total = terms.simple
        + weights.w_illum * terms.illum
        + weights.w_chrom * terms.chrom
        + weights.w_ssim * terms.ssim
        + weights.w_feat * terms.feat;
    Ok(LossReport {
        simple: terms.simple,
        illum: terms.illum,
        chrom: terms.chrom,
        ssim: terms.ssim,
        feat: terms.feat,
        total,
    })
}

/// Evaluates every term on one sample and combines them.
pub fn compute_losses(
    eps_true: &RgbImage,
    eps_pred: &RgbImage,
    x_hat: &RgbImage,
    x_ref: &RgbImage,
    fx: &dyn FeatureExtractor,
    weights: &LossWeights,
) -> Result<LossReport> {
    let terms = LossTerms {
        simple: loss_simple(eps_true, eps_pred)?,
        illum: loss_illum(x_hat, x_ref)?,
        chrom: loss_chrom(x_hat, x_ref)?,
        ssim: loss_ssim(x_hat, x_ref)?,
        feat: loss_feat(x_hat, x_ref, fx)?,
    };
    loss_total(&terms, weights)
}

impl LossReport {
    /// Total recomputed with different weights, keeping the terms.
    pub fn reweighted(&self, weights: &LossWeights) -> Result<LossReport> {
        let terms = LossTerms {
            simple: self.simple,
            illum: self.illum,
            chrom: self.chrom,
            ssim: self.ssim,
            feat: self.feat,
        };
        loss_total(&terms, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::reflect_index;

    fn lcg_image(h: usize, w: usize, seed: u64) -> RgbImage {
        let mut s = seed;
        let samples: Vec<f64> = (0..h * w * 3)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                0.05 + 0.9 * (s >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        RgbImage::from_interleaved(h, w, &samples).unwrap()
    }

    #[test]
    fn simple_loss_examples() {
        let a = lcg_image(5, 4, 1);
        assert_eq!(loss_simple(&a, &a).unwrap(), 0.0);
        let b = a.map(|v| v + 0.1);
        assert!((loss_simple(&a, &b).unwrap() - 0.01).abs() < 1e-12);
        let c = lcg_image(5, 4, 2);
        let (va, vc) = (a.to_interleaved(), c.to_interleaved());
        let oracle = va.iter().zip(&vc).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / va.len() as f64;
        assert!((loss_simple(&a, &c).unwrap() - oracle).abs() < 1e-9);
        assert!(loss_simple(&a, &RgbImage::zeros(4, 5)).is_err());
    }

    #[test]
    fn illum_loss_examples() {
        let a = lcg_image(6, 3, 3);
        assert_eq!(loss_illum(&a, &a).unwrap(), 0.0);
        assert!((loss_illum(&a.map(|v| v + 0.1), &a).unwrap() - 0.1).abs() < 1e-12);
        let b = lcg_image(6, 3, 4);
        let mut oracle = 0.0;
        for r in 0..6 {
            for c in 0..3 {
                let (p, q) = (a.pixel(r, c), b.pixel(r, c));
                let ga = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
                let gb = 0.299 * q[0] + 0.587 * q[1] + 0.114 * q[2];
                oracle += (ga - gb).abs();
            }
        }
        assert!((loss_illum(&a, &b).unwrap() - oracle / 18.0).abs() < 1e-9);
    }

    #[test]
    fn chrom_loss_examples() {
        let a = lcg_image(4, 4, 5);
        let self_loss = loss_chrom(&a, &a).unwrap();
        assert!((0.0..1e-12).contains(&self_loss));
        let red = RgbImage::filled(1, 1, [1.0, 0.0, 0.0]);
        let green = RgbImage::filled(1, 1, [0.0, 1.0, 0.0]);
        assert!((loss_chrom(&red, &green).unwrap() - 1.0).abs() < 1e-15);
        assert!(loss_chrom(&a.map(|v| 2.0 * v), &a).unwrap().abs() < 1e-12);
        // Black pixels are skipped.
        assert_eq!(loss_chrom(&RgbImage::zeros(1, 1), &red).unwrap(), 0.0);
    }

    #[test]
    fn chrom_loss_never_negative() {
        for seed in 0..50 {
            let a = lcg_image(6, 6, seed);
            assert!(loss_chrom(&a, &a).unwrap() >= 0.0);
            assert!(loss_chrom(&a.map(|v| 3.0 * v), &a).unwrap() >= 0.0);
        }
    }

    #[test]
    fn chrom_loss_ignores_per_pixel_scaling() {
        let a = lcg_image(5, 5, 6);
        let b = lcg_image(5, 5, 7);
        let base = loss_chrom(&a, &b).unwrap();
        let (h, w) = a.dims();
        let mut scaled = a.clone();
        for c in 0..3 {
            let ch = scaled.channel_mut(c);
            for r in 0..h {
                for col in 0..w {
                    let k = 0.5 + (r * w + col) as f64;
                    ch.set(r, col, ch.get(r, col) * k);
                }
            }
        }
        assert!((loss_chrom(&scaled, &b).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn ssim_loss_range() {
        let a = lcg_image(16, 16, 8);
        assert!(loss_ssim(&a, &a).unwrap().abs() < 1e-12);
        let v = loss_ssim(&a.map(|v| 1.0 - v), &a).unwrap();
        assert!(v > 1.0 && v < 2.0);
    }

    /// Independent 2-D direct-summation DoG features.
    fn dog_oracle(img: &RgbImage, sigma: f64, levels: usize) -> Vec<Vec<Plane>> {
        let blur = |p: &Plane, s: f64| -> Plane {
            let radius = (3.0 * s).ceil() as isize;
            let g: Vec<f64> = (-radius..=radius)
                .map(|k| (-(k * k) as f64 / (2.0 * s * s)).exp())
                .collect();
            let norm: f64 = g.iter().sum::<f64>().powi(2);
            let (h, w) = p.dims();
            Plane::from_fn(h, w, |r, c| {
                let mut acc = 0.0;
                for (i, gi) in g.iter().enumerate() {
                    for (j, gj) in g.iter().enumerate() {
                        let rr = reflect_index(r as isize + i as isize - radius, h);
                        let cc = reflect_index(c as isize + j as isize - radius, w);
                        acc += gi * gj * p.get(rr, cc);
                    }
                }
                acc / norm
            })
        };
        let mut level: Vec<Plane> = img.channels().to_vec();
        let mut out = Vec::new();
        for l in 0..levels {
            if l > 0 {
                level = level
                    .iter()
                    .map(|p| {
                        Plane::from_fn(p.height() / 2, p.width() / 2, |r, c| {
                            (p.get(2 * r, 2 * c)
                                + p.get(2 * r + 1, 2 * c)
                                + p.get(2 * r, 2 * c + 1)
                                + p.get(2 * r + 1, 2 * c + 1))
                                / 4.0
                        })
                    })
                    .collect();
            }
            out.push(
                level
                    .iter()
                    .map(|p| {
                        let a = blur(p, sigma);
                        let b = blur(p, 2.0 * sigma);
                        a.zip_map(&b, |x, y| x - y).unwrap()
                    })
                    .collect(),
            );
        }
        out
    }

    #[test]
    fn feature_loss_examples() {
        let a = lcg_image(16, 12, 9);
        let b = lcg_image(16, 12, 10);
        let dog = DogPyramid::default();
        assert_eq!(loss_feat(&a, &a, &dog).unwrap(), 0.0);
        assert!((loss_feat(&a, &b, &IdentityExtractor).unwrap() - loss_simple(&a, &b).unwrap()).abs() < 1e-15);

        let fa = dog_oracle(&a, 1.0, 3);
        let fb = dog_oracle(&b, 1.0, 3);
        let mut oracle = 0.0;
        for (la, lb) in fa.iter().zip(&fb) {
            let mut sq = 0.0;
            let mut n = 0;
            for (pa, pb) in la.iter().zip(lb) {
                for (x, y) in pa.data().iter().zip(pb.data()) {
                    sq += (x - y) * (x - y);
                    n += 1;
                }
            }
            oracle += sq / n as f64;
        }
        assert!((loss_feat(&a, &b, &dog).unwrap() - oracle).abs() < 1e-9);
    }

    #[test]
    fn total_combines_terms() {
        let terms = LossTerms {
            simple: 0.3,
            illum: 0.2,
            chrom: 4.0,
            ssim: 0.6,
            feat: 0.05,
        };
        let zero = LossWeights::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(loss_total(&terms, &zero).unwrap().total, 0.3);
        let w = LossWeights::new(1.0, 0.5, 0.2, 0.1).unwrap();
        let expected = 0.3 + 0.2 + 0.5 * 4.0 + 0.2 * 0.6 + 0.1 * 0.05;
        assert!((loss_total(&terms, &w).unwrap().total - expected).abs() < 1e-9);
        assert!(LossWeights::new(1.0, -0.1, 0.0, 0.0).is_err());
        let bad = LossWeights {
            w_feat: -1.0,
            ..LossWeights::default()
        };
        assert!(loss_total(&terms, &bad).is_err());
    }

    #[test]
    fn total_is_linear_in_weights() {
        let a = lcg_image(12, 12, 11);
        let b = lcg_image(12, 12, 12);
        let w = LossWeights::new(1.0, 0.5, 0.2, 0.1).unwrap();
        let report = compute_losses(&a, &b, &a, &b, &DogPyramid::default(), &w).unwrap();
        let t0 = report.reweighted(&w.scaled(0.0)).unwrap().total;
        let t1 = report.total;
        let t2 = report.reweighted(&w.scaled(2.0)).unwrap().total;
        assert!(((t2 - t1) - (t1 - t0)).abs() < 1e-9);
    }

    #[test]
    fn identical_pair_with_true_noise_is_zero() {
        let x = lcg_image(12, 12, 13);
        let eps = lcg_image(12, 12, 14);
        let report = compute_losses(&eps, &eps, &x, &x, &DogPyramid::default(), &LossWeights::default()).unwrap();
        assert!(report.total.abs() < 1e-12);
        for v in [report.simple, report.illum, report.chrom, report.ssim, report.feat] {
            assert!(v.abs() < 1e-12);
        }
    }

    /// Central differences at two step sizes must agree for each smooth loss.
    #[test]
    fn finite_difference_self_consistency() {
        let x_ref = lcg_image(12, 12, 15);
        let x_hat = lcg_image(12, 12, 16);
        type LossFn = fn(&RgbImage, &RgbImage) -> Result<f64>;
        let feat: LossFn = |a, b| loss_feat(a, b, &DogPyramid::default());
        let losses: [(&str, LossFn); 5] = [
            ("simple", loss_simple),
            ("illum", loss_illum),
            ("chrom", loss_chrom),
            ("ssim", loss_ssim),
            ("feat", feat),
        ];
        let pixels = [(0, 3, 0), (5, 7, 1), (11, 2, 2), (6, 6, 0)];
        for (name, f) in losses {
            for &(r, c, ch) in &pixels {
                let deriv = |h: f64| {
                    let mut plus = x_hat.clone();
                    let mut minus = x_hat.clone();
                    let v = x_hat.channel(ch).get(r, c);
                    plus.channel_mut(ch).set(r, c, v + h);
                    minus.channel_mut(ch).set(r, c, v - h);
                    (f(&plus, &x_ref).unwrap() - f(&minus, &x_ref).unwrap()) / (2.0 * h)
                };
                let coarse = deriv(1e-4);
                let fine = deriv(1e-5);
                let scale = coarse.abs().max(fine.abs()).max(1e-8);
                assert!(
                    (coarse - fine).abs() <= 1e-3 * scale,
                    "{name} at {r},{c},{ch}: {coarse} vs {fine}"
                );
            }
        }
    }
}
