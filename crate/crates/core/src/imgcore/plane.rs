use crate::error::{invalid, Result, ScemError};

/// A single-channel raster of `f64` samples stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(invalid(
                "data",
                format!("length {} does not match {}x{}", data.len(), height, width),
            ));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(invalid("data", format!("non-finite sample {v}")));
        }
        Ok(Self { height, width, data })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self::filled(height, width, 0.0)
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        Self {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self { height, width, data }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.width + col] = value;
    }

    /// Element-wise map into a new plane.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Element-wise combination of two planes of identical shape.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        self.ensure_same_dims(other)?;
        Ok(Plane {
            height: self.height,
            width: self.width,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn ensure_same_dims(&self, other: &Plane) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(ScemError::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    pub fn dot(&self, other: &Plane) -> Result<f64> {
        self.ensure_same_dims(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            0.0
        } else {
            self.sum() / self.data.len() as f64
        }
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Left-right mirror image.
    pub fn flip_horizontal(&self) -> Plane {
        Plane::from_fn(self.height, self.width, |r, c| self.get(r, self.width - 1 - c))
    }

    pub fn transpose(&self) -> Plane {
        Plane::from_fn(self.width, self.height, |r, c| self.get(c, r))
    }
}

/// Three planes of identical shape, in R, G, B order.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    channels: [Plane; 3],
}

impl RgbImage {
    pub fn from_planes(r: Plane, g: Plane, b: Plane) -> Result<Self> {
        r.ensure_same_dims(&g)?;
        r.ensure_same_dims(&b)?;
        Ok(Self { channels: [r, g, b] })
    }

    /// Replicates one plane into all three channels.
    pub fn splat(plane: &Plane) -> Self {
        Self {
            channels: [plane.clone(), plane.clone(), plane.clone()],
        }
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self::splat(&Plane::zeros(height, width))
    }

    pub fn filled(height: usize, width: usize, value: [f64; 3]) -> Self {
        Self {
            channels: value.map(|v| Plane::filled(height, width, v)),
        }
    }

    /// Builds an image from channel-interleaved samples (`[r, g, b, r, g, b, ...]`).
    pub fn from_interleaved(height: usize, width: usize, samples: &[f64]) -> Result<Self> {
        if samples.len() != height * width * 3 {
            return Err(invalid(
                "samples",
                format!("length {} does not match {}x{}x3", samples.len(), height, width),
            ));
        }
        let channel = |c: usize| Plane::new(height, width, samples.iter().skip(c).step_by(3).copied().collect());
        Self::from_planes(channel(0)?, channel(1)?, channel(2)?)
    }

    pub fn to_interleaved(&self) -> Vec<f64> {
        let n = self.channels[0].len();
        let mut out = Vec::with_capacity(n * 3);
        for i in 0..n {
            for ch in &self.channels {
                out.push(ch.data()[i]);
            }
        }
        out
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.channels[0].dims()
    }

    #[inline]
    pub fn channel(&self, c: usize) -> &Plane {
        &self.channels[c]
    }

    #[inline]
    pub fn channel_mut(&mut self, c: usize) -> &mut Plane {
        &mut self.channels[c]
    }

    pub fn channels(&self) -> &[Plane; 3] {
        &self.channels
    }

    pub fn into_channels(self) -> [Plane; 3] {
        self.channels
    }

    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> [f64; 3] {
        [
            self.channels[0].get(row, col),
            self.channels[1].get(row, col),
            self.channels[2].get(row, col),
        ]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RgbImage {
        RgbImage {
            channels: [
                self.channels[0].map(&f),
                self.channels[1].map(&f),
                self.channels[2].map(&f),
            ],
        }
    }

    /// Applies `f` to each channel independently.
    pub fn map_channels(&self, mut f: impl FnMut(&Plane) -> Result<Plane>) -> Result<RgbImage> {
        let r = f(&self.channels[0])?;
        let g = f(&self.channels[1])?;
        let b = f(&self.channels[2])?;
        RgbImage::from_planes(r, g, b)
    }

    pub fn zip_map(&self, other: &RgbImage, f: impl Fn(f64, f64) -> f64) -> Result<RgbImage> {
        self.ensure_same_dims(other)?;
        let mut out = self.clone();
        for (dst, src) in out.channels.iter_mut().zip(&other.channels) {
            *dst = dst.zip_map(src, &f)?;
        }
        Ok(out)
    }

    pub fn ensure_same_dims(&self, other: &RgbImage) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(ScemError::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        self.channels[0].len() * 3
    }

    pub fn max_abs_diff(&self, other: &RgbImage) -> Result<f64> {
        self.ensure_same_dims(other)?;
        Ok(self
            .channels
            .iter()
            .zip(&other.channels)
            .flat_map(|(a, b)| a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max))
    }
}
