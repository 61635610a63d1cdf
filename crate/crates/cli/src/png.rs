//! PNG input and 8-bit previews.

use std::path::Path;

use image::{DynamicImage, GrayImage, ImageBuffer, Luma, Rgb};
use scem_core::{Plane, RgbImage};

use crate::error::CliError;
use crate::tensor::Tensor;

fn decode_error(path: &Path, err: image::ImageError) -> CliError {
    match err {
        image::ImageError::IoError(e) => CliError::io(path, e),
        other => CliError::Io(format!("{}: {other}", path.display())),
    }
}

/// Loads an 8- or 16-bit PNG as RGB in `[0, 1]`; alpha is dropped and gray
/// is replicated.
pub fn load_png(path: &Path) -> Result<RgbImage, CliError> {
    let img = image::open(path).map_err(|e| decode_error(path, e))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let samples: Vec<f64> = match img {
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => img
            .to_rgb16()
            .into_raw()
            .into_iter()
            .map(|v| v as f64 / 65535.0)
            .collect(),
        DynamicImage::ImageLuma8(_)
        | DynamicImage::ImageLumaA8(_)
        | DynamicImage::ImageRgb8(_)
        | DynamicImage::ImageRgba8(_) => img.to_rgb8().into_raw().into_iter().map(|v| v as f64 / 255.0).collect(),
        _ => {
            return Err(CliError::Io(format!(
                "{}: only 8- and 16-bit PNGs are supported",
                path.display()
            )))
        }
    };
    Ok(RgbImage::from_interleaved(h, w, &samples)?)
}

/// PNG or tensor file, chosen by extension.
pub fn load_image(path: &Path) -> Result<RgbImage, CliError> {
    let is_tensor = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("scem"));
    if is_tensor {
        Tensor::load(path)?.to_rgb()
    } else {
        load_png(path)
    }
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn save(path: &Path, result: image::ImageResult<()>) -> Result<(), CliError> {
    result.map_err(|e| decode_error(path, e))
}

pub fn save_rgb_preview(img: &RgbImage, path: &Path) -> Result<(), CliError> {
    let (h, w) = img.dims();
    let raw: Vec<u8> = img.to_interleaved().into_iter().map(quantize).collect();
    let buf: ImageBuffer<Rgb<u8>, _> = ImageBuffer::from_raw(w as u32, h as u32, raw).expect("buffer sized from dims");
    save(path, buf.save(path))
}

pub fn save_gray_preview(p: &Plane, path: &Path) -> Result<(), CliError> {
    let raw: Vec<u8> = p.data().iter().map(|&v| quantize(v)).collect();
    let buf: GrayImage =
        ImageBuffer::<Luma<u8>, _>::from_raw(p.width() as u32, p.height() as u32, raw).expect("buffer sized from dims");
    save(path, buf.save(path))
}

/// Channels laid side by side as gray tiles.
pub fn save_montage(planes: &[Plane], path: &Path) -> Result<(), CliError> {
    let (h, w) = planes[0].dims();
    let montage = Plane::from_fn(h, w * planes.len(), |r, c| planes[c / w].get(r, c % w));
    save_gray_preview(&montage, path)
}
