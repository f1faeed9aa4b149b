//! Radially symmetric model geometries.
//!
//! A model bundles a metric density `ρ(r)` on a punctured chart, the weight
//! `Φ_p` of the `p`-th tensor power (so that `|z^j|²_{h_p} = r^{2j} e^{−2Φ_p}`),
//! the declared singularity exponents at the puncture, and the ratio
//! `c₁(L, h) / ω` the kernel is expected to approach.
//!
//! Internally everything is evaluated at `t = ln r`. The weights only ever
//! appear inside exponentials, and `t` is the natural variable for the
//! quadrature engine as well.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::specfn::softplus;

const LN_2: f64 = std::f64::consts::LN_2;

/// `⌊x⌋`, treating values within a few ulps of an integer as that integer.
///
/// Products like `p·ν` for rational `ν` rarely land exactly on the integer
/// they represent; an unsnapped floor would then be off by one.
pub(crate) fn snapped_floor(x: f64) -> f64 {
    let n = x.round();
    if (x - n).abs() <= 8.0 * f64::EPSILON * x.abs().max(1.0) {
        n
    } else {
        x.floor()
    }
}

/// Cone order `a` and flux `ν` of the spindle family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpindleParams {
    a: f64,
    nu: f64,
}

impl SpindleParams {
    /// Flux variant: `0 < a ≤ 1`, any finite `ν`.
    pub fn new(a: f64, nu: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(domain(format!("cone order a must lie in (0, 1], got {a}")));
        }
        if !nu.is_finite() {
            return Err(domain(format!("flux nu must be finite, got {nu}")));
        }
        Ok(SpindleParams { a, nu })
    }

    /// Logarithmic-pole variant, which additionally needs `0 < ν ≤ 1`.
    pub fn pole(a: f64, nu: f64) -> Result<Self> {
        let params = Self::new(a, nu)?;
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(domain(format!("pole variant needs nu in (0, 1], got {nu}")));
        }
        Ok(params)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Lowest admissible monomial degree, `max(⌊ν − a⌋ + 1, 0)`.
    pub fn j0(&self) -> i64 {
        let j = snapped_floor(self.nu - self.a) as i64 + 1;
        j.max(0)
    }

    /// True when `ν` is a nonnegative integer.
    pub fn nu_is_natural(&self) -> bool {
        self.nu >= 0.0 && self.nu == self.nu.round()
    }
}

/// Declared singular behaviour of the weight and density at the puncture.
///
/// `nu` is the log-pole coefficient of the weight, `alpha`/`beta` are the
/// exponents in the deviation bound, `a_bound`/`a_prime_bound` are the
/// derivative-bound constants. The latter two are recorded for completeness;
/// no check consumes them because the bound constants are existential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityProfile {
    pub nu: f64,
    pub alpha: f64,
    pub a_bound: f64,
    pub beta: f64,
    pub a_prime_bound: f64,
    pub delta: f64,
}

impl SingularityProfile {
    pub fn new(nu: f64, alpha: f64, a_bound: f64, beta: f64, a_prime_bound: f64) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= 0.0) {
            return Err(domain(format!("exponents must be nonnegative, got ({alpha}, {beta})")));
        }
        if !(a_bound > 0.0 && a_prime_bound > 0.0) {
            return Err(domain("derivative bounds must be positive"));
        }
        let delta = (8.0f64 / 3.0).max(8.0 * beta / 3.0).max(8.0 * alpha);
        Ok(SingularityProfile { nu, alpha, a_bound, beta, a_prime_bound, delta })
    }
}

/// The concrete geometries the engine knows about.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    /// Sphere with two antipodal cone points of order `a`, flux `ν` at 0.
    Spindle(SpindleParams),
    /// Spindle metric with weight `p[ν ln r + (1−ν)/(2a) ln(1 + r^{2a})]`.
    SpindlePole(SpindleParams),
    /// Punctured unit disc with the complete metric of curvature −4 and the
    /// canonical bundle.
    PoincareDisc,
    /// Round sphere with the hyperplane bundle.
    FubiniStudy,
    /// Smooth round metric with a logarithmic pole of strength `ν` in the
    /// weight. Same formulas as [`Geometry::SpindlePole`] at `a = 1`.
    LogSingularDemo { nu: f64 },
    /// Flat plane with weight `π r² / 2`; the kernel is identically `p`.
    BargmannFock,
}

/// Candidate monomial degrees for a given power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexRange {
    Bounded { lo: i64, hi: i64 },
    /// Unbounded above; the engine truncates with a certified tail.
    From { lo: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialModel {
    name: String,
    geometry: Geometry,
    profile: SingularityProfile,
}

pub const MODEL_NAMES: [&str; 5] =
    ["spindle", "spindle-pole", "poincare-disc", "fubini-study", "log-singular-demo"];

impl RadialModel {
    pub fn spindle(params: SpindleParams) -> Self {
        let e = 1.0 + 2.0 * params.a;
        RadialModel {
            name: "spindle".into(),
            geometry: Geometry::Spindle(params),
            profile: SingularityProfile::new(params.nu, e, 1.0, e, 1.0).unwrap(),
        }
    }

    pub fn spindle_pole(params: SpindleParams) -> Result<Self> {
        let params = SpindleParams::pole(params.a, params.nu)?;
        let e = 1.0 + 2.0 * params.a;
        Ok(RadialModel {
            name: "spindle-pole".into(),
            geometry: Geometry::SpindlePole(params),
            profile: SingularityProfile::new(params.nu, e, 1.0, e, 1.0).unwrap(),
        })
    }

    pub fn poincare_disc() -> Self {
        RadialModel {
            name: "poincare-disc".into(),
            geometry: Geometry::PoincareDisc,
            // the canonical weight has a log pole of coefficient −1
            profile: SingularityProfile::new(-1.0, 3.0, 1.0, 3.0, 1.0).unwrap(),
        }
    }

    pub fn fubini_study() -> Self {
        RadialModel {
            name: "fubini-study".into(),
            geometry: Geometry::FubiniStudy,
            profile: SingularityProfile::new(0.0, 0.0, 1.0, 0.0, 1.0).unwrap(),
        }
    }

    pub fn log_singular_demo(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return Err(domain(format!("log-singular-demo needs nu in (0, 1), got {nu}")));
        }
        Ok(RadialModel {
            name: "log-singular-demo".into(),
            geometry: Geometry::LogSingularDemo { nu },
            profile: SingularityProfile::new(nu, 0.0, 1.0, 0.0, 1.0).unwrap(),
        })
    }

    pub fn bargmann_fock() -> Self {
        RadialModel {
            name: "bargmann-fock".into(),
            geometry: Geometry::BargmannFock,
            profile: SingularityProfile::new(0.0, 0.0, 1.0, 0.0, 1.0).unwrap(),
        }
    }

    /// Build a model from its CLI name. `a` and `nu` are ignored by models
    /// that have no such parameter.
    pub fn from_name(name: &str, a: f64, nu: f64) -> Result<Self> {
        match name {
            "spindle" => Ok(Self::spindle(SpindleParams::new(a, nu)?)),
            "spindle-pole" => Self::spindle_pole(SpindleParams::pole(a, nu)?),
            "poincare-disc" => Ok(Self::poincare_disc()),
            "fubini-study" => Ok(Self::fubini_study()),
            "log-singular-demo" => Self::log_singular_demo(nu),
            other => Err(domain(format!(
                "unknown model '{other}', expected one of {}",
                MODEL_NAMES.join(", ")
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn profile(&self) -> SingularityProfile {
        self.profile
    }

    /// Open radial interval of the chart.
    pub fn domain(&self) -> (f64, f64) {
        match self.geometry {
            Geometry::PoincareDisc => (0.0, 1.0),
            _ => (0.0, f64::INFINITY),
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        let (lo, hi) = self.domain();
        r > lo && r < hi
    }

    /// Radius of the coordinate chart around the puncture, taken as 1/2 for
    /// every model so that the chart sits strictly inside the unit disc.
    /// Used to anchor regime boundaries that would otherwise not depend on
    /// the model.
    pub fn chart_radius(&self) -> f64 {
        0.5
    }

    /// Cone order and pole coefficient of the spindle-type weight, or `None`.
    fn spindle_like(&self) -> Option<(f64, f64, bool)> {
        match self.geometry {
            Geometry::Spindle(sp) => Some((sp.a, sp.nu, false)),
            Geometry::SpindlePole(sp) => Some((sp.a, sp.nu, true)),
            Geometry::FubiniStudy => Some((1.0, 0.0, false)),
            Geometry::LogSingularDemo { nu } => Some((1.0, nu, true)),
            _ => None,
        }
    }

    /// `ln ρ` at `t = ln r`.
    pub fn ln_density_at(&self, t: f64) -> f64 {
        match self.geometry {
            Geometry::PoincareDisc => -2.0 * LN_2 - 2.0 * t - 2.0 * (-t).ln(),
            Geometry::BargmannFock => 0.0,
            _ => {
                let (a, _, _) = self.spindle_like().unwrap();
                spindle_ln_density(a, t)
            }
        }
    }

    /// Metric density `ρ(r)` against Lebesgue measure.
    pub fn density(&self, r: f64) -> Result<f64> {
        if !self.contains(r) {
            return Err(domain(format!("radius {r} outside the {} chart", self.name)));
        }
        Ok(self.ln_density_at(r.ln()).exp())
    }

    /// Weight `Φ_p` of the `p`-th power at `t = ln r`.
    pub fn weight_at(&self, p: u32, t: f64) -> f64 {
        let p = p as f64;
        match self.geometry {
            Geometry::PoincareDisc => 0.5 * p * (self.ln_density_at(t) - LN_2),
            Geometry::BargmannFock => 0.5 * p * PI * (2.0 * t).exp(),
            _ => {
                let (a, nu, pole) = self.spindle_like().unwrap();
                let sp = softplus(2.0 * a * t);
                if pole {
                    p * (nu * t + (1.0 - nu) / (2.0 * a) * sp)
                } else {
                    nu * t + (p - nu) / (2.0 * a) * sp
                }
            }
        }
    }

    /// `ln ρ(r + d) − ln ρ(r)`, without cancellation for small `d`.
    pub fn ln_density_increment(&self, r: f64, d: f64) -> f64 {
        let x = d / r;
        match self.geometry {
            Geometry::PoincareDisc => {
                let l = x.ln_1p();
                -2.0 * l - 2.0 * (l / r.ln()).ln_1p()
            }
            Geometry::BargmannFock => 0.0,
            _ => {
                let (a, _, _) = self.spindle_like().unwrap();
                let r2a = (2.0 * a * r.ln()).exp();
                let grow = r2a * (2.0 * a * x.ln_1p()).exp_m1();
                -2.0 * (1.0 - a) * x.ln_1p() - 2.0 * (grow / (1.0 + r2a)).ln_1p()
            }
        }
    }

    /// Pointwise `c₁(L, h) / ω` away from the puncture. For the canonical
    /// bundle of the Poincaré disc this is `−R_ω / 2π`.
    pub fn c1_over_omega(&self, _r: f64) -> f64 {
        match self.geometry {
            Geometry::Spindle(_) | Geometry::FubiniStudy | Geometry::BargmannFock => 1.0,
            Geometry::SpindlePole(sp) => 1.0 - sp.nu,
            Geometry::LogSingularDemo { nu } => 1.0 - nu,
            Geometry::PoincareDisc => 2.0 / PI,
        }
    }

    /// Distance to the nearest puncture in the coordinate metric. The
    /// spindle also has a puncture at ∞, reached through `z ↦ 1/z`.
    pub fn puncture_distance(&self, r: f64) -> f64 {
        match self.geometry {
            Geometry::Spindle(_) | Geometry::SpindlePole(_) => r.min(1.0 / r),
            _ => r,
        }
    }

    /// Constant Gauss curvature of the density.
    pub fn declared_curvature(&self) -> f64 {
        match self.geometry {
            Geometry::Spindle(sp) | Geometry::SpindlePole(sp) => 4.0 * PI * sp.a,
            Geometry::FubiniStudy | Geometry::LogSingularDemo { .. } => 4.0 * PI,
            Geometry::PoincareDisc => -4.0,
            Geometry::BargmannFock => 0.0,
        }
    }

    /// Degrees that can possibly give normalizable monomials.
    pub fn index_range(&self, p: u32) -> IndexRange {
        match self.geometry {
            Geometry::PoincareDisc => IndexRange::From { lo: 1 - p as i64 },
            Geometry::BargmannFock => IndexRange::From { lo: 0 },
            _ => IndexRange::Bounded { lo: 0, hi: p as i64 },
        }
    }

    /// Exponential decay rates of `r^{2j+2} e^{−2Φ_p} ρ` in `t = ln r` at the
    /// two ends of the chart: the integrand behaves like `e^{κ₋ t}` as
    /// `t → −∞` and `e^{κ₊ t}` as `t → +∞`. A bounded end reports `−∞`.
    pub fn decay_rates(&self, p: u32, j: i64) -> (f64, f64) {
        let (j, pf) = (j as f64, p as f64);
        match self.geometry {
            Geometry::PoincareDisc => (2.0 * (j + pf), f64::NEG_INFINITY),
            Geometry::BargmannFock => (2.0 * j + 2.0, f64::NEG_INFINITY),
            _ => {
                let (a, nu, pole) = self.spindle_like().unwrap();
                let nu_eff = if pole { pf * nu } else { nu };
                (2.0 * (j - nu_eff + a), 2.0 * (j - pf - a))
            }
        }
    }

    /// Whether `‖z^j‖²_p` is finite, decided from the decay rates alone.
    pub fn norm_is_finite(&self, p: u32, j: i64) -> bool {
        let (lo, hi) = self.decay_rates(p, j);
        lo > 1e-12 && hi < -1e-12
    }

    /// The chart as an interval in `t = ln r`.
    pub(crate) fn t_interval(&self) -> (f64, f64) {
        let (lo, hi) = self.domain();
        (if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY }, hi.ln())
    }
}

fn spindle_ln_density(a: f64, t: f64) -> f64 {
    a.ln() - PI.ln() - 2.0 * (1.0 - a) * t - 2.0 * softplus(2.0 * a * t)
}

/// Density of the spindle metric `a / (π r^{2(1−a)} (1 + r^{2a})²)`.
pub fn spindle_density(params: SpindleParams, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain(format!("spindle density needs 0 < r < inf, got {r}")));
    }
    Ok(spindle_ln_density(params.a, r.ln()).exp())
}

/// Density `(2 r ln r)^{−2}` of the complete metric on the punctured disc.
pub fn poincare_disc_density(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(domain(format!("punctured disc density needs 0 < r < 1, got {r}")));
    }
    let d = 2.0 * r * r.ln();
    Ok(1.0 / (d * d))
}

pub const DEFAULT_CURVATURE_STEP: f64 = 1e-4;

/// Gauss curvature `−(2/ρ) ∂∂̄ ln ρ` by a central five-point stencil.
///
/// For a radial density `∂∂̄ = ¼(d²/dr² + (1/r) d/dr)`. The stencil works on
/// increments of `ln ρ` relative to the centre so that large or tiny
/// densities do not cost digits. Expected values: 4πa for the spindle family,
/// −4 for the punctured disc, 0 for the flat plane.
pub fn gauss_curvature(model: &RadialModel, r: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(domain(format!("curvature step must be positive, got {h}")));
    }
    if !model.contains(r - 2.0 * h) || !model.contains(r + 2.0 * h) {
        return Err(domain(format!(
            "curvature stencil [{}, {}] leaves the {} chart",
            r - 2.0 * h,
            r + 2.0 * h,
            model.name()
        )));
    }
    let g = |k: f64| model.ln_density_increment(r, k * h);
    let (gm2, gm1, gp1, gp2) = (g(-2.0), g(-1.0), g(1.0), g(2.0));
    let d1 = (gm2 - 8.0 * gm1 + 8.0 * gp1 - gp2) / (12.0 * h);
    let d2 = (-gm2 + 16.0 * gm1 + 16.0 * gp1 - gp2) / (12.0 * h * h);
    let laplacian = 0.25 * (d2 + d1 / r);
    Ok(-2.0 * laplacian / model.density(r)?)
}
