//! Forward differences and their adjoints.
//!
//! The plain variants use reflective (half-sample symmetric) boundaries, so
//! the difference across the trailing border is zero. The `_periodic`
//! variants wrap around and are the spatial counterparts of the kernel OTFs.

use super::Plane;
use crate::error::Result;

/// Horizontal forward difference `p(r, c + 1) - p(r, c)`, zero on the last column.
pub fn grad_x(p: &Plane) -> Plane {
    let (h, w) = p.dims();
    Plane::from_fn(h, w, |r, c| if c + 1 < w { p.get(r, c + 1) - p.get(r, c) } else { 0.0 })
}

/// Vertical forward difference `p(r + 1, c) - p(r, c)`, zero on the last row.
pub fn grad_y(p: &Plane) -> Plane {
    let (h, w) = p.dims();
    Plane::from_fn(h, w, |r, c| if r + 1 < h { p.get(r + 1, c) - p.get(r, c) } else { 0.0 })
}

/// `grad_xᵀ hx + grad_yᵀ hy`, i.e. the negative divergence of `(hx, hy)`.
pub fn div_adjoint(hx: &Plane, hy: &Plane) -> Result<Plane> {
    hx.ensure_same_dims(hy)?;
    let (h, w) = hx.dims();
    Ok(Plane::from_fn(h, w, |r, c| {
        let mut v = 0.0;
        if c >= 1 {
            v += hx.get(r, c - 1);
        }
        if c + 1 < w {
            v -= hx.get(r, c);
        }
        if r >= 1 {
            v += hy.get(r - 1, c);
        }
        if r + 1 < h {
            v -= hy.get(r, c);
        }
        v
    }))
}

pub fn grad_x_periodic(p: &Plane) -> Plane {
    let (h, w) = p.dims();
    Plane::from_fn(h, w, |r, c| p.get(r, (c + 1) % w) - p.get(r, c))
}

pub fn grad_y_periodic(p: &Plane) -> Plane {
    let (h, w) = p.dims();
    Plane::from_fn(h, w, |r, c| p.get((r + 1) % h, c) - p.get(r, c))
}

/// Exact adjoint of the periodic differences.
pub fn div_adjoint_periodic(hx: &Plane, hy: &Plane) -> Result<Plane> {
    hx.ensure_same_dims(hy)?;
    let (h, w) = hx.dims();
    Ok(Plane::from_fn(h, w, |r, c| {
        hx.get(r, (c + w - 1) % w) - hx.get(r, c) + hy.get((r + h - 1) % h, c) - hy.get(r, c)
    }))
}
