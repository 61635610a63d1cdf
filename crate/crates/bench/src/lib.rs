//! Inputs shared by the benchmarks.

use scem_core::{Plane, RgbImage};

/// Dim scene with a horizontal light falloff, a cast shadow and a checker
/// texture; deterministic for a given size.
pub fn lowlight_scene(h: usize, w: usize) -> RgbImage {
    let plane = |gain: f64| {
        Plane::from_fn(h, w, |r, c| {
            let light = 0.04 + 0.16 * c as f64 / w as f64;
            let shade = if r > h / 2 && c > w / 3 { 0.35 } else { 1.0 };
            let tex = if (r / 8 + c / 8) % 2 == 0 { 0.9 } else { 0.45 };
            gain * tex * light * shade
        })
    };
    RgbImage::from_planes(plane(0.9), plane(0.7), plane(0.5)).expect("same dims")
}
