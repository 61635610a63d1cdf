//! Raw float tensor files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SCEM"
//! 4       4     version (u32) = 1
//! 8       4     height (u32)
//! 12      4     width (u32)
//! 16      4     channels (u32)
//! 20      4*n   f32 samples, row-major, channel-interleaved, n = h*w*c
//! ```

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use scem_core::{ConditionStack, Plane, RgbImage};

use crate::error::CliError;

pub const MAGIC: [u8; 4] = *b"SCEM";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    /// Interleaved samples, `data[(r * width + c) * channels + k]`.
    pub data: Vec<f32>,
}

impl Tensor {
    pub fn from_planes(planes: &[Plane]) -> Self {
        let (height, width) = planes.first().map(Plane::dims).unwrap_or((0, 0));
        let channels = planes.len();
        let mut data = Vec::with_capacity(height * width * channels);
        for i in 0..height * width {
            for p in planes {
                data.push(p.data()[i] as f32);
            }
        }
        Self {
            height,
            width,
            channels,
            data,
        }
    }

    pub fn from_rgb(img: &RgbImage) -> Self {
        Self::from_planes(img.channels())
    }

    pub fn from_stack(stack: &ConditionStack) -> Self {
        Self::from_planes(stack.channels())
    }

    pub fn planes(&self) -> Result<Vec<Plane>, CliError> {
        (0..self.channels)
            .map(|k| {
                let samples = self
                    .data
                    .iter()
                    .skip(k)
                    .step_by(self.channels)
                    .map(|&v| v as f64)
                    .collect();
                Plane::new(self.height, self.width, samples).map_err(CliError::from)
            })
            .collect()
    }

    pub fn to_rgb(&self) -> Result<RgbImage, CliError> {
        if self.channels != 3 {
            return Err(CliError::Shape(format!(
                "expected a 3-channel image tensor, found {} channels",
                self.channels
            )));
        }
        let [r, g, b]: [Plane; 3] = self.planes()?.try_into().expect("three planes");
        Ok(RgbImage::from_planes(r, g, b)?)
    }

    pub fn to_stack(&self) -> Result<ConditionStack, CliError> {
        ConditionStack::from_channels(self.planes()?).map_err(|_| {
            CliError::Shape(format!(
                "condition stack must have 13 or 15 channels, found {}",
                self.channels
            ))
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.data.len());
        out.extend_from_slice(&MAGIC);
        for v in [VERSION, self.height as u32, self.width as u32, self.channels as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CliError> {
        if bytes.len() < HEADER_LEN {
            return Err(CliError::Format("truncated header".into()));
        }
        if bytes[..4] != MAGIC {
            return Err(CliError::Format("bad magic".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap());
        let version = word(0);
        if version != VERSION {
            return Err(CliError::Format(format!("unsupported version {version}")));
        }
        let (height, width, channels) = (word(1) as usize, word(2) as usize, word(3) as usize);
        let expected = height
            .checked_mul(width)
            .and_then(|n| n.checked_mul(channels))
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| CliError::Format("dimensions overflow".into()))?;
        let payload = &bytes[HEADER_LEN..];
        if payload.len() != expected {
            return Err(CliError::Format(format!(
                "payload is {} bytes, header implies {expected}",
                payload.len()
            )));
        }
        let data = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        w.write_all(&self.encode())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self, CliError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)
            .map_err(|e| CliError::Io(format!("reading tensor: {e}")))?;
        Self::decode(&bytes)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.encode()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::decode(&bytes)
    }
}
