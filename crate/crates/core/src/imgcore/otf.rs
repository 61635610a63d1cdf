//! Kernel transfer functions and 2-D DFT helpers.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::Plane;
use crate::error::{invalid, Result, ScemError};

/// Small convolution kernel with an explicit anchor (the tap that lands on the output pixel).
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    rows: usize,
    cols: usize,
    taps: Vec<f64>,
    anchor: (usize, usize),
}

impl Kernel {
    pub fn new(rows: usize, cols: usize, taps: Vec<f64>, anchor: (usize, usize)) -> Result<Self> {
        if rows == 0 || cols == 0 || taps.len() != rows * cols {
            return Err(invalid(
                "taps",
                format!("{} taps do not form a {rows}x{cols} kernel", taps.len()),
            ));
        }
        if anchor.0 >= rows || anchor.1 >= cols {
            return Err(invalid("anchor", format!("{anchor:?} outside {rows}x{cols}")));
        }
        Ok(Self {
            rows,
            cols,
            taps,
            anchor,
        })
    }

    /// Kernel with odd dimensions, anchored at its center.
    pub fn centered(rows: usize, cols: usize, taps: Vec<f64>) -> Result<Self> {
        if rows.is_multiple_of(2) || cols.is_multiple_of(2) {
            return Err(invalid(
                "taps",
                "centered kernels need odd dimensions; give an explicit anchor",
            ));
        }
        Self::new(rows, cols, taps, (rows / 2, cols / 2))
    }

    pub fn identity() -> Self {
        Self {
            rows: 1,
            cols: 1,
            taps: vec![1.0],
            anchor: (0, 0),
        }
    }

    /// Convolution form of the periodic forward difference along x: `p(c+1) - p(c)`.
    pub fn forward_diff_x() -> Self {
        Self {
            rows: 1,
            cols: 2,
            taps: vec![1.0, -1.0],
            anchor: (0, 1),
        }
    }

    /// Convolution form of the periodic forward difference along y: `p(r+1) - p(r)`.
    pub fn forward_diff_y() -> Self {
        Self {
            rows: 2,
            cols: 1,
            taps: vec![1.0, -1.0],
            anchor: (1, 0),
        }
    }

    /// 5-point Laplacian stencil.
    pub fn laplacian() -> Self {
        Self {
            rows: 3,
            cols: 3,
            taps: vec![0.0, 1.0, 0.0, 1.0, -4.0, 1.0, 0.0, 1.0, 0.0],
            anchor: (1, 1),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    pub fn tap(&self, row: usize, col: usize) -> f64 {
        self.taps[row * self.cols + col]
    }
}

/// Complex-valued raster, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPlane {
    height: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl ComplexPlane {
    pub fn new(height: usize, width: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(invalid("data", "length does not match dimensions"));
        }
        Ok(Self { height, width, data })
    }

    pub fn from_real(p: &Plane) -> Self {
        Self {
            height: p.height(),
            width: p.width(),
            data: p.data().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.width + col]
    }

    /// Squared magnitude per bin.
    pub fn norm_sqr(&self) -> Plane {
        Plane::from_fn(self.height, self.width, |r, c| self.get(r, c).norm_sqr())
    }

    /// Real parts, with any non-finite value mapped to zero.
    pub fn real_part(&self) -> Plane {
        Plane::from_fn(self.height, self.width, |r, c| {
            let v = self.get(r, c).re;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        })
    }
}

fn transform_2d(buf: &mut ComplexPlane, inverse: bool) {
    let (h, w) = buf.dims();
    if h == 0 || w == 0 {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h))
    } else {
        (planner.plan_fft_forward(w), planner.plan_fft_forward(h))
    };
    for row in buf.data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); h];
    for c in 0..w {
        for (r, v) in column.iter_mut().enumerate() {
            *v = buf.data[r * w + c];
        }
        col_fft.process(&mut column);
        for (r, v) in column.iter().enumerate() {
            buf.data[r * w + c] = *v;
        }
    }
    if inverse {
        let scale = 1.0 / (h * w) as f64;
        buf.data.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Unnormalized forward 2-D DFT.
pub fn fft2(p: &Plane) -> ComplexPlane {
    let mut buf = ComplexPlane::from_real(p);
    transform_2d(&mut buf, false);
    buf
}

/// Inverse 2-D DFT (scaled by `1 / (h w)`).
pub fn ifft2(spectrum: &ComplexPlane) -> ComplexPlane {
    let mut buf = spectrum.clone();
    transform_2d(&mut buf, true);
    buf
}

/// Zero-pads `k` to `height x width`, rolls the anchor onto `(0, 0)` and
/// returns its 2-D DFT.
pub fn kernel_otf(k: &Kernel, height: usize, width: usize) -> Result<ComplexPlane> {
    if k.rows > height || k.cols > width {
        return Err(ScemError::KernelTooLarge {
            kernel: (k.rows, k.cols),
            target: (height, width),
        });
    }
    Ok(periodic_otf(k, height, width))
}

/// Like [`kernel_otf`] but folds taps that overhang a small target back onto
/// the torus, which is the transfer function of the periodic stencil.
pub(crate) fn periodic_otf(k: &Kernel, height: usize, width: usize) -> ComplexPlane {
    let mut padded = Plane::zeros(height, width);
    for r in 0..k.rows {
        for c in 0..k.cols {
            let pr = (r as isize - k.anchor.0 as isize).rem_euclid(height as isize) as usize;
            let pc = (c as isize - k.anchor.1 as isize).rem_euclid(width as isize) as usize;
            let v = padded.get(pr, pc) + k.tap(r, c);
            padded.set(pr, pc, v);
        }
    }
    fft2(&padded)
}
