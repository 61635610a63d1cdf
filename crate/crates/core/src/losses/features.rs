use crate::error::Result;
use crate::imgcore::{gaussian_smooth, Plane, RgbImage};

/// One layer of feature activations, `channels` planes of `height x width`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    pub channels: Vec<Plane>,
}

impl FeatureMap {
    /// `H_l * W_l * C_l`.
    pub fn element_count(&self) -> usize {
        self.channels.iter().map(Plane::len).sum()
    }
}

/// Source of perceptual features for the feature loss.
pub trait FeatureExtractor: Send + Sync {
    /// Returns the fixed list of layers for `img`; must be deterministic.
    fn extract(&self, img: &RgbImage) -> Result<Vec<FeatureMap>>;
}

/// Single layer equal to the image itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityExtractor;

impl FeatureExtractor for IdentityExtractor {
    fn extract(&self, img: &RgbImage) -> Result<Vec<FeatureMap>> {
        Ok(vec![FeatureMap {
            channels: img.channels().to_vec(),
        }])
    }
}

/// Difference-of-Gaussians pyramid: layer `l` is `G_σ - G_2σ` applied to the
/// image after `l` rounds of 2x2 average pooling.
#[derive(Debug, Clone)]
pub struct DogPyramid {
    pub sigma: f64,
    pub levels: usize,
}

impl Default for DogPyramid {
    fn default() -> Self {
        Self { sigma: 1.0, levels: 3 }
    }
}

/// 2x2 mean pooling; a trailing odd row or column is dropped.
pub fn avg_pool2(p: &Plane) -> Plane {
    let (h, w) = (p.height() / 2, p.width() / 2);
    Plane::from_fn(h.max(1), w.max(1), |r, c| {
        let rows = if p.height() >= 2 { [2 * r, 2 * r + 1] } else { [0, 0] };
        let cols = if p.width() >= 2 { [2 * c, 2 * c + 1] } else { [0, 0] };
        let mut acc = 0.0;
        for rr in rows {
            for cc in cols {
                acc += p.get(rr, cc);
            }
        }
        acc / 4.0
    })
}

impl FeatureExtractor for DogPyramid {
    fn extract(&self, img: &RgbImage) -> Result<Vec<FeatureMap>> {
        let mut level: Vec<Plane> = img.channels().to_vec();
        let mut layers = Vec::with_capacity(self.levels);
        for l in 0..self.levels {
            if l > 0 {
                level = level.iter().map(avg_pool2).collect();
            }
            let mut channels = Vec::with_capacity(3);
            for ch in &level {
                let fine = gaussian_smooth(ch, self.sigma)?;
                let coarse = gaussian_smooth(ch, 2.0 * self.sigma)?;
                channels.push(fine.zip_map(&coarse, |a, b| a - b)?);
            }
            layers.push(FeatureMap { channels });
        }
        Ok(layers)
    }
}
