//! Rescaled kernels near the cone point and their Mittag-Leffler limits.
//!
//! Under `r^{2a} = a y / p` the kernel divided by `p` converges, for fixed
//! `y`, to an explicit profile. For the pole variant the limit only exists
//! along subsequences on which `θ_p = j_p − pν` converges.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::kernel::{pole_index, pole_kernel, pole_kernel_at, spindle_kernel, spindle_kernel_at};
use crate::specfn::{ln_mittag_leffler, MLParams};
use crate::models::SpindleParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Flux,
    Pole,
}

/// Sampled `(y, F_p(y))` pairs; a divergent value at `y = 0` is `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledProfile {
    pub p: u32,
    pub samples: Vec<(f64, f64)>,
}

fn validate(params: SpindleParams, variant: Variant) -> Result<SpindleParams> {
    match variant {
        Variant::Flux => Ok(params),
        Variant::Pole => SpindleParams::pole(params.a(), params.nu()),
    }
}

/// `F_p(y) = P_p((a y / p)^{1/2a}) / p`.
///
/// At `y = 0` the puncture value of the kernel is used, which may be
/// [`Error::Divergent`].
pub fn scaled_value(params: SpindleParams, p: u32, y: f64, variant: Variant) -> Result<f64> {
    let params = validate(params, variant)?;
    if !(y >= 0.0) || !y.is_finite() {
        return Err(domain(format!("scaled variable y must be finite and >= 0, got {y}")));
    }
    let pf = p as f64;
    if y == 0.0 {
        let v = match variant {
            Variant::Flux => spindle_kernel(params, p, 0.0)?,
            Variant::Pole => pole_kernel(params, p, 0.0)?,
        };
        return Ok(v / pf);
    }
    // validates p against the admissible degrees
    match variant {
        Variant::Flux => spindle_kernel(params, p, 1.0)?,
        Variant::Pole => pole_kernel(params, p, 1.0)?,
    };
    let a = params.a();
    let t = (a * y / pf).ln() / (2.0 * a);
    let v = match variant {
        Variant::Flux => spindle_kernel_at(params, p, t),
        Variant::Pole => pole_kernel_at(params, p, t),
    };
    Ok(v / pf)
}

pub fn scaled_profile(
    params: SpindleParams,
    p: u32,
    y_grid: &[f64],
    variant: Variant,
) -> Result<ScaledProfile> {
    scaled_profile_with(Execution::default(), params, p, y_grid, variant)
}

pub fn scaled_profile_with(
    exec: Execution,
    params: SpindleParams,
    p: u32,
    y_grid: &[f64],
    variant: Variant,
) -> Result<ScaledProfile> {
    if y_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("y grid must be strictly increasing"));
    }
    let values = exec.try_map(y_grid, |&y| match scaled_value(params, p, y, variant) {
        Err(Error::Divergent { .. }) => Ok(f64::INFINITY),
        other => other,
    })?;
    Ok(ScaledProfile { p, samples: y_grid.iter().copied().zip(values).collect() })
}

/// `(c/a) u^{θ/a} e^{−u} E_{1/a, 1+θ/a}(u^{1/a})` with `u = c y`.
fn ml_profile(a: f64, theta: f64, c: f64, y: f64) -> Result<f64> {
    let u = c * y;
    let ml = MLParams::new(1.0 / a, 1.0 + theta / a)?;
    let ln_e = ln_mittag_leffler(ml, u.powf(1.0 / a))?;
    Ok(((c / a).ln() + theta / a * u.ln() - u + ln_e).exp())
}

/// Pointwise limit of `F_p(y)` for the flux variant:
/// `(1/a) y^{(j0−ν)/a} e^{−y} E_{1/a, 1+(j0−ν)/a}(y^{1/a})`.
pub fn limit_profile(params: SpindleParams, y: f64) -> Result<f64> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(domain(format!("y must be finite and >= 0, got {y}")));
    }
    let a = params.a();
    let off = params.j0() as f64 - params.nu();
    if y == 0.0 {
        return if off > 0.0 {
            Ok(0.0)
        } else if off == 0.0 {
            Ok(1.0 / a)
        } else {
            Err(domain(format!("limit profile is infinite at y = 0 (j0 - nu = {off})")))
        };
    }
    ml_profile(a, off, 1.0, y)
}

/// Limit of `F_{p_k}(y)` for the pole variant along a subsequence with
/// `θ_{p_k} → θ`.
pub fn pole_limit_profile(params: SpindleParams, theta: f64, y: f64) -> Result<f64> {
    let a = params.a();
    let nu = params.nu();
    if !(nu > 0.0 && nu < 1.0) {
        return Err(domain(format!("pole limit needs nu in (0, 1), got {nu}")));
    }
    if !(theta >= -a && theta <= 1.0 - a) {
        return Err(domain(format!("theta = {theta} outside [{}, {}]", -a, 1.0 - a)));
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(domain(format!("y must be finite and > 0, got {y}")));
    }
    ml_profile(a, theta, 1.0 - nu, y)
}

/// `θ_p = j_p − pν` with `j_p = ⌊pν − a⌋ + 1`; always in `(−a, 1 − a]`.
pub fn theta_sequence(params: SpindleParams, p: u32) -> Result<f64> {
    let params = SpindleParams::pole(params.a(), params.nu())?;
    if p == 0 {
        return Err(domain("tensor power p must be at least 1"));
    }
    Ok(pole_index(params, p).1)
}

/// `n` geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => lo * (ratio * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// The 100-point geometric grid on `[0.1, 10]` used for convergence gaps.
pub fn gap_grid() -> Vec<f64> {
    geometric_grid(0.1, 10.0, 100)
}

/// `D(p) = max_y |F_p(y) − limit(y)|` over `y_grid`, flux variant.
pub fn limit_gap(exec: Execution, params: SpindleParams, p: u32, y_grid: &[f64]) -> Result<f64> {
    let gaps = exec.try_map(y_grid, |&y| {
        Ok::<_, Error>((scaled_value(params, p, y, Variant::Flux)? - limit_profile(params, y)?).abs())
    })?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}
