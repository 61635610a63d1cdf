//! Color-invariant map: every channel divided by its own maximum.

use crate::imgcore::{Plane, RgbImage};

/// Per-channel max-normalized image, invariant to a global intensity scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ChromaMap {
    pub phi: RgbImage,
}

fn normalize_channel(ch: &Plane) -> Plane {
    let peak = ch.max();
    if peak > 0.0 {
        ch.map(|v| v / peak)
    } else {
        // 0/0 := 0
        Plane::zeros(ch.height(), ch.width())
    }
}

pub fn color_invariance(img: &RgbImage) -> ChromaMap {
    let [r, g, b] = img.channels().each_ref().map(normalize_channel);
    ChromaMap {
        phi: RgbImage::from_planes(r, g, b).expect("channels share dimensions"),
    }
}
