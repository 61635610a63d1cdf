use super::{AnisoWeights, IllumParams};
use crate::error::{invalid, Result, ScemError};
use crate::imgcore::Plane;

/// The sparse system `(I + λ L_w) t = b` in five-point stencil form.
///
/// Off-diagonal entries are stored as non-negative magnitudes, so row `i` of
/// the matrix reads `diag[i] t_i - Σ coef_k[i] t_k`. The edge between
/// horizontal neighbours carries `λ w_x` of the left pixel and the edge
/// between vertical neighbours carries `λ w_y` of the upper pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct FivePointSystem {
    pub diag: Plane,
    pub coef_left: Plane,
    pub coef_right: Plane,
    pub coef_up: Plane,
    pub coef_down: Plane,
    pub lambda: f64,
}

impl FivePointSystem {
    pub fn dims(&self) -> (usize, usize) {
        self.diag.dims()
    }

    /// Matrix-vector product `A t`.
    pub fn apply(&self, t: &Plane) -> Result<Plane> {
        self.diag.ensure_same_dims(t)?;
        let mut out = Plane::zeros(t.height(), t.width());
        self.apply_into(t.data(), out.data_mut());
        Ok(out)
    }

    /// `out = A t` on raw row-major buffers of matching length.
    fn apply_into(&self, t: &[f64], out: &mut [f64]) {
        let (h, w) = self.dims();
        let (d, cl, cr, cu, cd) = (
            self.diag.data(),
            self.coef_left.data(),
            self.coef_right.data(),
            self.coef_up.data(),
            self.coef_down.data(),
        );
        for r in 0..h {
            let row = r * w;
            for i in row..row + w {
                out[i] = d[i] * t[i];
            }
            for i in row + 1..row + w {
                out[i] -= cl[i] * t[i - 1];
                out[i - 1] -= cr[i - 1] * t[i];
            }
            if r > 0 {
                for i in row..row + w {
                    out[i] -= cu[i] * t[i - w];
                    out[i - w] -= cd[i - w] * t[i];
                }
            }
        }
    }
}

/// Assembles the SPD system for the weighted smoothing energy.
pub fn build_system(weights: &AnisoWeights, lambda: f64) -> Result<FivePointSystem> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(invalid("lambda", format!("must be >= 0, got {lambda}")));
    }
    weights.w_x.ensure_same_dims(&weights.w_y)?;
    if weights
        .w_x
        .data()
        .iter()
        .chain(weights.w_y.data())
        .any(|&v| v.is_nan() || v <= 0.0)
    {
        return Err(invalid("weights", "must be strictly positive"));
    }
    let (h, w) = weights.w_x.dims();
    let edge_x = |r: usize, c: usize| lambda * weights.w_x.get(r, c);
    let edge_y = |r: usize, c: usize| lambda * weights.w_y.get(r, c);

    let coef_left = Plane::from_fn(h, w, |r, c| if c > 0 { edge_x(r, c - 1) } else { 0.0 });
    let coef_right = Plane::from_fn(h, w, |r, c| if c + 1 < w { edge_x(r, c) } else { 0.0 });
    let coef_up = Plane::from_fn(h, w, |r, c| if r > 0 { edge_y(r - 1, c) } else { 0.0 });
    let coef_down = Plane::from_fn(h, w, |r, c| if r + 1 < h { edge_y(r, c) } else { 0.0 });
    let diag = Plane::from_fn(h, w, |r, c| {
        1.0 + coef_left.get(r, c) + coef_right.get(r, c) + coef_up.get(r, c) + coef_down.get(r, c)
    });
    Ok(FivePointSystem {
        diag,
        coef_left,
        coef_right,
        coef_up,
        coef_down,
        lambda,
    })
}

/// `‖T - T_ini‖² + λ Σ (w_x (∇x T)² + w_y (∇y T)²)`, whose stationary point
/// is the system returned by [`build_system`].
pub fn smoothing_energy(t: &Plane, t_ini: &Plane, weights: &AnisoWeights, lambda: f64) -> Result<f64> {
    t.ensure_same_dims(t_ini)?;
    t.ensure_same_dims(&weights.w_x)?;
    let (h, w) = t.dims();
    let mut fidelity = 0.0;
    let mut smooth = 0.0;
    for r in 0..h {
        for c in 0..w {
            let d = t.get(r, c) - t_ini.get(r, c);
            fidelity += d * d;
            if c + 1 < w {
                let g = t.get(r, c + 1) - t.get(r, c);
                smooth += weights.w_x.get(r, c) * g * g;
            }
            if r + 1 < h {
                let g = t.get(r + 1, c) - t.get(r, c);
                smooth += weights.w_y.get(r, c) * g * g;
            }
        }
    }
    Ok(fidelity + lambda * smooth)
}

fn norm(p: &Plane) -> f64 {
    p.data().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Solves the system for right-hand side `t_ini` by Jacobi-preconditioned
/// conjugate gradients, warm-started at `t_ini`.
pub fn solve_illumination(system: &FivePointSystem, t_ini: &Plane, params: &IllumParams) -> Result<Plane> {
    system.diag.ensure_same_dims(t_ini)?;
    let b_norm = norm(t_ini);
    if b_norm == 0.0 {
        return Ok(Plane::zeros(t_ini.height(), t_ini.width()));
    }

    let mut x = t_ini.clone();
    let ax = system.apply(&x)?;
    let mut r = t_ini.zip_map(&ax, |b, a| b - a)?;
    let mut rel = norm(&r) / b_norm;
    if rel <= params.solver_tol {
        return Ok(x);
    }
    let mut z = r.zip_map(&system.diag, |v, d| v / d)?;
    let mut p = z.clone();
    let mut rz = r.dot(&z)?;

    let mut ap = vec![0.0; x.len()];
    for _ in 0..params.solver_max_iter {
        system.apply_into(p.data(), &mut ap);
        let alpha = rz / p.data().iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for (xi, pi) in x.data_mut().iter_mut().zip(p.data()) {
            *xi += alpha * pi;
        }
        for (ri, api) in r.data_mut().iter_mut().zip(&ap) {
            *ri -= alpha * api;
        }
        rel = norm(&r) / b_norm;
        if rel <= params.solver_tol {
            return Ok(x);
        }
        for ((zi, ri), di) in z.data_mut().iter_mut().zip(r.data()).zip(system.diag.data()) {
            *zi = ri / di;
        }
        let rz_next = r.dot(&z)?;
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.data_mut().iter_mut().zip(z.data()) {
            *pi = zi + beta * *pi;
        }
    }

    // Recompute the true residual rather than trusting the recurrence.
    let ax = system.apply(&x)?;
    let true_rel = norm(&t_ini.zip_map(&ax, |b, a| b - a)?) / b_norm;
    if true_rel <= params.solver_tol {
        return Ok(x);
    }
    Err(ScemError::NonConvergence {
        iterations: params.solver_max_iter,
        residual: true_rel,
    })
}
