//! Prior extraction and the conditioning stack fed to the denoiser.
//!
//! Channel order of the stack is fixed:
//!
//! | channels | content                    |
//! |----------|----------------------------|
//! | 0..3     | source image `I`           |
//! | 3        | refined illumination       |
//! | 4..7     | color-invariant map `Φ`    |
//! | 7..10    | reflectance `R`            |
//! | 10..13   | shadow residual `S_3ch`    |
//!
//! With [`StackLayout::ReplicatedIllumination`] the illumination occupies
//! channels 3..6 and everything after it shifts by two.

use crate::chroma::color_invariance;
use crate::error::{Result, ScemError};
use crate::illum::{extract_illumination, IllumParams};
use crate::imgcore::{Plane, RgbImage};
use crate::shadow::{extract_shadow, ShadowParams};

/// The four conditioning maps plus the source image.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorBundle {
    pub source: RgbImage,
    pub t_ref: Plane,
    pub r: RgbImage,
    pub s3ch: RgbImage,
    pub phi: RgbImage,
}

impl PriorBundle {
    pub fn dims(&self) -> (usize, usize) {
        self.source.dims()
    }

    fn check_dims(&self) -> Result<()> {
        let d = self.source.dims();
        for found in [self.t_ref.dims(), self.r.dims(), self.s3ch.dims(), self.phi.dims()] {
            if found != d {
                return Err(ScemError::DimensionMismatch { expected: d, found });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StackLayout {
    /// Illumination as one channel, 13 channels total.
    #[default]
    Compact,
    /// Illumination replicated to three channels, 15 channels total.
    ReplicatedIllumination,
}

impl StackLayout {
    pub const fn channel_count(self) -> usize {
        match self {
            StackLayout::Compact => 13,
            StackLayout::ReplicatedIllumination => 15,
        }
    }

    pub fn from_channel_count(channels: usize) -> Result<Self> {
        match channels {
            13 => Ok(StackLayout::Compact),
            15 => Ok(StackLayout::ReplicatedIllumination),
            found => Err(ScemError::ChannelCount { expected: 13, found }),
        }
    }

    const fn illumination_channels(self) -> usize {
        match self {
            StackLayout::Compact => 1,
            StackLayout::ReplicatedIllumination => 3,
        }
    }
}

/// Ordered multi-channel raster handed to the denoiser alongside `x_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionStack {
    layout: StackLayout,
    channels: Vec<Plane>,
}

impl ConditionStack {
    pub fn from_channels(channels: Vec<Plane>) -> Result<Self> {
        let layout = StackLayout::from_channel_count(channels.len())?;
        if let Some(first) = channels.first() {
            for ch in &channels[1..] {
                first.ensure_same_dims(ch)?;
            }
        }
        Ok(Self { layout, channels })
    }

    pub fn layout(&self) -> StackLayout {
        self.layout
    }

    pub fn channels(&self) -> &[Plane] {
        &self.channels
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.channels[0].dims()
    }

    pub fn into_channels(self) -> Vec<Plane> {
        self.channels
    }

    fn rgb_at(&self, start: usize) -> RgbImage {
        RgbImage::from_planes(
            self.channels[start].clone(),
            self.channels[start + 1].clone(),
            self.channels[start + 2].clone(),
        )
        .expect("validated at construction")
    }

    pub fn source(&self) -> RgbImage {
        self.rgb_at(0)
    }

    /// Splits the stack back into its members.
    pub fn unstack(&self) -> PriorBundle {
        let k = self.layout.illumination_channels();
        PriorBundle {
            source: self.rgb_at(0),
            t_ref: self.channels[3].clone(),
            phi: self.rgb_at(3 + k),
            r: self.rgb_at(6 + k),
            s3ch: self.rgb_at(9 + k),
        }
    }
}

/// Runs illumination, shadow (on the reflectance) and color-invariance extraction.
pub fn extract_priors(img: &RgbImage, illum_params: &IllumParams, shadow_params: &ShadowParams) -> Result<PriorBundle> {
    let (t_ref, r) = extract_illumination(img, illum_params)?;
    let shadow = extract_shadow(&r, shadow_params)?;
    let phi = color_invariance(img).phi;
    Ok(PriorBundle {
        source: img.clone(),
        t_ref,
        r,
        s3ch: shadow.s3ch,
        phi,
    })
}

pub fn stack_condition(bundle: &PriorBundle) -> Result<ConditionStack> {
    stack_condition_with(bundle, StackLayout::Compact)
}

pub fn stack_condition_with(bundle: &PriorBundle, layout: StackLayout) -> Result<ConditionStack> {
    bundle.check_dims()?;
    let mut channels = Vec::with_capacity(layout.channel_count());
    channels.extend(bundle.source.channels().iter().cloned());
    for _ in 0..layout.illumination_channels() {
        channels.push(bundle.t_ref.clone());
    }
    for img in [&bundle.phi, &bundle.r, &bundle.s3ch] {
        channels.extend(img.channels().iter().cloned());
    }
    Ok(ConditionStack { layout, channels })
}
