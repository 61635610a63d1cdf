//! Illumination estimation and reflectance recovery.
//!
//! The initial illumination is the per-pixel channel maximum plus a small
//! floor. It is refined by minimizing a weighted least-squares energy whose
//! horizontal and vertical weights combine a global texture term with local
//! terms from a Gaussian-smoothed copy, so smoothing relaxes across edges and
//! tightens in flat regions. The refined map is gamma remapped and the
//! reflectance is the input divided by it.

mod system;
mod weights;

pub use system::{build_system, smoothing_energy, solve_illumination, FivePointSystem};
pub use weights::{
    anisotropic_weights, combine_weights, initial_illumination, local_weights, texture_weight, AnisoWeights,
};

use crate::error::{invalid, Result, ScemError};
use crate::imgcore::{Plane, RgbImage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IllumParams {
    /// Floor added to the channel maximum.
    pub delta: f64,
    /// Floor of the texture-weight denominator.
    pub eps_s: f64,
    /// Floor of the local-weight denominators.
    pub eps_local: f64,
    /// Standard deviation of the smoothing used for local weights.
    pub sigma: f64,
    /// Smoothness weight of the refinement energy.
    pub lambda: f64,
    /// The refined map is raised to `1 / gamma`.
    pub gamma: f64,
    /// Relative residual at which the solver stops.
    pub solver_tol: f64,
    /// With the default floors every weight is at most `1 / (eps_s * eps_local)`,
    /// which bounds the Jacobi-scaled condition number near `1.2e5`; 3000
    /// iterations cover the conjugate-gradient bound for that at `1e-6`.
    pub solver_max_iter: usize,
}

impl Default for IllumParams {
    fn default() -> Self {
        Self {
            delta: 0.02,
            eps_s: 0.02,
            eps_local: 0.001,
            sigma: 2.0,
            lambda: 0.15,
            gamma: 2.2,
            solver_tol: 1e-6,
            solver_max_iter: 3000,
        }
    }
}

impl IllumParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("delta", self.delta),
            ("eps_s", self.eps_s),
            ("eps_local", self.eps_local),
            ("sigma", self.sigma),
            ("gamma", self.gamma),
            ("solver_tol", self.solver_tol),
        ];
        for (name, v) in positive {
            if v <= 0.0 || !v.is_finite() {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        // lambda = 0 is accepted and yields the identity system.
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(invalid("lambda", format!("must be >= 0, got {}", self.lambda)));
        }
        if self.solver_max_iter == 0 {
            return Err(invalid("solver_max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// Element-wise `t^(1/gamma)`.
pub fn gamma_remap(t: &Plane, gamma: f64) -> Result<Plane> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(invalid("gamma", format!("must be positive, got {gamma}")));
    }
    if let Some(&v) = t.data().iter().find(|&&v| v < 0.0) {
        return Err(ScemError::NegativeInput(v));
    }
    let exponent = 1.0 / gamma;
    Ok(t.map(|v| v.powf(exponent)))
}

/// `I_c / max(T_ref, delta)` per channel.
pub fn reflectance(img: &RgbImage, t_ref: &Plane, params: &IllumParams) -> Result<RgbImage> {
    img.channel(0).ensure_same_dims(t_ref)?;
    let floor = params.delta;
    img.map_channels(|ch| ch.zip_map(t_ref, |i, t| i / t.max(floor)))
}

/// Runs the whole first stage and returns `(T_ref, R)`.
pub fn extract_illumination(img: &RgbImage, params: &IllumParams) -> Result<(Plane, RgbImage)> {
    params.validate()?;
    let t_ini = initial_illumination(img, params);
    let weights = anisotropic_weights(&t_ini, params)?;
    let system = build_system(&weights, params.lambda)?;
    let solved = solve_illumination(&system, &t_ini, params)?;
    // The exact solution obeys the discrete maximum principle; project the
    // iterate back onto the data range so solver tolerance cannot leak out.
    let (lo, hi) = (t_ini.min(), t_ini.max());
    let refined = solved.map(|v| v.clamp(lo, hi));
    let t_ref = gamma_remap(&refined, params.gamma)?;
    let r = reflectance(img, &t_ref, params)?;
    Ok((t_ref, r))
}
