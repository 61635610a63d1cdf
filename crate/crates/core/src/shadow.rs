//! Shadow extraction.
//!
//! The amplified reflectance `2R` is split into a smooth structural part
//! `S1` and a residual `S2 = 2R - S1`. `S1` comes from a few half-quadratic
//! splitting rounds: shrink the periodic gradients of the current iterate,
//! then solve the screened quadratic in the Fourier domain with a growing
//! penalty `beta = 2^(i-1) / tau`. Everything inside this module uses
//! periodic boundaries so the spatial differences and their OTFs agree.

use crate::error::{invalid, Result};
use crate::imgcore::{
    div_adjoint_periodic, fft2, grad_x_periodic, grad_y_periodic, ifft2, periodic_otf, Kernel, Plane, RgbImage,
};

/// Gain applied to the reflectance before decomposition.
pub const AMPLIFICATION: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowParams {
    pub tau: f64,
    pub iterations: usize,
    pub lambda_se: f64,
    pub eps_num: f64,
}

impl Default for ShadowParams {
    fn default() -> Self {
        Self {
            tau: 0.05,
            iterations: 4,
            lambda_se: 0.15,
            eps_num: 1e-8,
        }
    }
}

impl ShadowParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau", self.tau),
            ("lambda_se", self.lambda_se),
            ("eps_num", self.eps_num),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.iterations == 0 {
            return Err(invalid("iterations", "must be at least 1"));
        }
        Ok(())
    }

    /// Penalty for round `i` (1-based).
    pub fn beta(&self, i: usize) -> f64 {
        2f64.powi(i as i32 - 1) / self.tau
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowDecomposition {
    pub s1: RgbImage,
    pub s2: RgbImage,
    pub s3ch: RgbImage,
}

/// `sign(g) * max(|g| - threshold, 0)`.
pub fn soft_threshold(g: &Plane, threshold: f64) -> Result<Plane> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(invalid("threshold", format!("must be >= 0, got {threshold}")));
    }
    Ok(g.map(|v| v.signum() * (v.abs() - threshold).max(0.0)))
}

/// `|f3|²` and `|f1|² + |f2|²` on an `h x w` torus.
struct StencilSpectra {
    laplacian: Plane,
    gradient: Plane,
}

impl StencilSpectra {
    fn new(h: usize, w: usize) -> Self {
        let f1 = periodic_otf(&Kernel::forward_diff_x(), h, w).norm_sqr();
        let f2 = periodic_otf(&Kernel::forward_diff_y(), h, w).norm_sqr();
        let f3 = periodic_otf(&Kernel::laplacian(), h, w).norm_sqr();
        Self {
            laplacian: f3,
            gradient: f1.zip_map(&f2, |a, b| a + b).expect("same dims"),
        }
    }
}

fn update_channel(
    current: &Plane,
    anchor: &Plane,
    beta: f64,
    params: &ShadowParams,
    spectra: &StencilSpectra,
) -> Result<Plane> {
    let shrink = 1.0 / beta;
    let h = soft_threshold(&grad_x_periodic(current), shrink)?;
    let v = soft_threshold(&grad_y_periodic(current), shrink)?;
    let n2 = div_adjoint_periodic(&h, &v)?;

    let anchor_hat = fft2(anchor);
    let mut out = fft2(&n2);
    let lambda = params.lambda_se;
    for (i, bin) in out.data_mut().iter_mut().enumerate() {
        let f3 = lambda * spectra.laplacian.data()[i];
        let num = anchor_hat.data()[i] * f3 + *bin * beta;
        let den = f3 + beta * spectra.gradient.data()[i] + params.eps_num;
        *bin = num / den;
    }
    // Every stencil vanishes at DC, so the mean is carried over from the anchor.
    out.data_mut()[0] = anchor_hat.data()[0];
    Ok(ifft2(&out).real_part())
}

/// One frequency-domain update of the structural component.
///
/// `anchor_2r` is the fixed fidelity target; the shrunk gradients come from
/// `s_current`.
pub fn se_update(s_current: &RgbImage, anchor_2r: &RgbImage, beta: f64, params: &ShadowParams) -> Result<RgbImage> {
    s_current.ensure_same_dims(anchor_2r)?;
    if beta <= 0.0 || !beta.is_finite() {
        return Err(invalid("beta", format!("must be positive, got {beta}")));
    }
    let (h, w) = s_current.dims();
    let spectra = StencilSpectra::new(h, w);
    let [r, g, b] =
        [0, 1, 2].map(|c| update_channel(s_current.channel(c), anchor_2r.channel(c), beta, params, &spectra));
    RgbImage::from_planes(r?, g?, b?)
}

/// Replicates a single-channel residual across RGB.
pub fn replicate_residual(s2: &Plane) -> RgbImage {
    RgbImage::splat(s2)
}

pub fn extract_shadow(r: &RgbImage, params: &ShadowParams) -> Result<ShadowDecomposition> {
    params.validate()?;
    let anchor = r.map(|v| AMPLIFICATION * v);
    let (h, w) = r.dims();
    let spectra = StencilSpectra::new(h, w);

    let mut channels = Vec::with_capacity(3);
    for c in 0..3 {
        let target = anchor.channel(c);
        let mut s = target.clone();
        for i in 1..=params.iterations {
            s = update_channel(&s, target, params.beta(i), params, &spectra)?;
        }
        channels.push(s.zip_map(target, |v, ub| v.max(0.0).min(ub))?);
    }
    let [c0, c1, c2]: [Plane; 3] = channels.try_into().expect("three channels");
    let s1 = RgbImage::from_planes(c0, c1, c2)?;
    let s2 = anchor.zip_map(&s1, |a, s| a - s)?;
    Ok(ShadowDecomposition {
        s3ch: s2.clone(),
        s1,
        s2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::{grad_x, grad_y};
    use proptest::prelude::*;

    fn lcg_image(h: usize, w: usize, seed: u64) -> RgbImage {
        let mut s = seed;
        let samples: Vec<f64> = (0..h * w * 3)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        RgbImage::from_interleaved(h, w, &samples).unwrap()
    }

    #[test]
    fn soft_threshold_examples() {
        let g = Plane::new(1, 3, vec![0.3, -0.8, 0.8]).unwrap();
        assert_eq!(soft_threshold(&g, 0.0).unwrap(), g);
        let out = soft_threshold(&g, 0.5).unwrap();
        assert_eq!(out.get(0, 0), 0.0);
        assert!((out.get(0, 1) + 0.3).abs() < 1e-15);
        assert!((out.get(0, 2) - 0.3).abs() < 1e-15);
        assert!(soft_threshold(&g, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn soft_threshold_contracts_toward_zero(
            vals in prop::collection::vec(-5.0f64..5.0, 1..40),
            t in 0.0f64..3.0,
        ) {
            let g = Plane::new(1, vals.len(), vals.clone()).unwrap();
            let out = soft_threshold(&g, t).unwrap();
            for (o, i) in out.data().iter().zip(&vals) {
                prop_assert!(o.abs() <= i.abs());
                prop_assert!(o * i >= 0.0);
            }
        }
    }

    #[test]
    fn beta_schedule() {
        let p = ShadowParams::default();
        assert_eq!(
            (1..=4).map(|i| p.beta(i)).collect::<Vec<_>>(),
            vec![20.0, 40.0, 80.0, 160.0]
        );
    }

    #[test]
    fn constant_input_is_a_fixed_point() {
        let p = ShadowParams::default();
        let c = RgbImage::filled(6, 5, [0.4, 0.9, 1.3]);
        let out = se_update(&c, &c, 20.0, &p).unwrap();
        assert!(out.max_abs_diff(&c).unwrap() < 1e-12);

        let r = RgbImage::filled(7, 7, [0.2, 0.5, 0.7]);
        let d = extract_shadow(&r, &p).unwrap();
        assert!(d.s1.max_abs_diff(&r.map(|v| 2.0 * v)).unwrap() < 1e-12);
        assert!(d.s2.to_interleaved().iter().all(|v| v.abs() < 1e-12));
        assert_eq!(d.s3ch, d.s2);
    }

    #[test]
    fn zero_reflectance_gives_zero_outputs() {
        let d = extract_shadow(&RgbImage::zeros(4, 6), &ShadowParams::default()).unwrap();
        for img in [&d.s1, &d.s2, &d.s3ch] {
            assert!(img.to_interleaved().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn large_beta_reproduces_smooth_iterate() {
        // As beta grows the shrinkage vanishes and the update returns s_current.
        let p = ShadowParams::default();
        let s = RgbImage::splat(&Plane::from_fn(8, 8, |r, c| {
            0.5 + 0.2 * (r as f64 * 0.7).sin() * (c as f64 * 0.4).cos()
        }));
        let anchor = lcg_image(8, 8, 5);
        let out = se_update(&s, &anchor, 1e9, &p).unwrap();
        // Non-DC bins converge to s; the DC bin is pinned to the anchor mean.
        let shift = anchor.channel(0).mean() - s.channel(0).mean();
        let expected = s.channel(0).map(|v| v + shift);
        for (a, b) in out.channel(0).data().iter().zip(expected.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn split_identities_hold() {
        let p = ShadowParams::default();
        for seed in 0..5 {
            let r = lcg_image(8, 8, seed);
            let d = extract_shadow(&r, &p).unwrap();
            for c in 0..3 {
                for i in 0..64 {
                    let two_r = 2.0 * r.channel(c).data()[i];
                    let s1 = d.s1.channel(c).data()[i];
                    let s2 = d.s2.channel(c).data()[i];
                    assert!((s1 + s2 - two_r).abs() < 1e-6);
                    assert!(s1 >= 0.0 && s1 <= two_r);
                }
            }
        }
    }

    #[test]
    fn structural_component_is_not_rougher_than_input() {
        let p = ShadowParams::default();
        let tv = |img: &RgbImage| -> f64 {
            img.channels()
                .iter()
                .map(|ch| {
                    grad_x(ch).data().iter().map(|v| v.abs()).sum::<f64>()
                        + grad_y(ch).data().iter().map(|v| v.abs()).sum::<f64>()
                })
                .sum()
        };
        for seed in 10..16 {
            let r = lcg_image(12, 12, seed);
            let d = extract_shadow(&r, &p).unwrap();
            assert!(tv(&d.s1) <= tv(&r.map(|v| 2.0 * v)) + 1e-6);
        }
    }

    #[test]
    fn single_channel_residual_is_replicated() {
        let s2 = Plane::from_fn(2, 3, |r, c| (r * 3 + c) as f64);
        let out = replicate_residual(&s2);
        for c in 0..3 {
            assert_eq!(out.channel(c), &s2);
        }
    }

    #[test]
    fn tiny_images_are_supported() {
        let d = extract_shadow(&lcg_image(1, 2, 3), &ShadowParams::default()).unwrap();
        assert_eq!(d.s1.dims(), (1, 2));
    }
}
