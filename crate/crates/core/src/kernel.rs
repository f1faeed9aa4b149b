//! Bergman kernel densities `P_p(r)`.
//!
//! Three routes are provided:
//!
//! * Beta-function sums for the spindle (flux and pole variants), summed in
//!   the log domain so that `p` in the hundreds does not overflow;
//! * the roots-of-unity closed form for cone order `1/s`;
//! * a generic engine that integrates `‖z^j‖²_p` by quadrature and sums
//!   `|z^j|²_{h_p} / ‖z^j‖²_p`, for any [`RadialModel`].
//!
//! The puncture `r = 0` is never pushed through a generic formula. Closed
//! forms return their declared limit there, or [`Error::Divergent`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::models::{snapped_floor, Geometry, IndexRange, RadialModel, SpindleParams};
use crate::quadrature::{self, QuadError, Tolerance};
use crate::specfn::{log_beta_raw, softplus, LogSum};

/// Relative tolerance of the norm integrals.
pub const NORM_RTOL: f64 = 1e-11;
/// A term this small relative to the partial sum may end an infinite sum.
pub const TAIL_REL_CUTOFF: f64 = 1e-16;
/// Bound on the omitted tail relative to the partial sum.
pub const TAIL_REL_BOUND: f64 = 1e-14;
/// Number of trailing term ratios that must be monotone to certify a tail.
pub const TAIL_WINDOW: usize = 8;
/// Hard cap on the size of an infinite basis.
pub const MAX_BASIS_LEN: usize = 1 << 21;

const INITIAL_CHUNK: usize = 64;
/// Integration stops where the integrand has dropped by `e^{-46} ≈ 1e-20`.
const LOG_INTEGRAND_DROP: f64 = 46.0;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn check_power(p: u32) -> Result<()> {
    if p == 0 {
        Err(domain("tensor power p must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("radius must be finite and >= 0, got {r}")))
    }
}

/// `Σ_{j=0}^{n} exp(2(j − base)t) / B(1 + (j + off)/a, 1 + (m − j)/a)` as a
/// logarithm, where `base` is `n` for `t > 0` and `0` otherwise.
///
/// Counting powers from the top for `r > 1` keeps every exponent at the size
/// of the term it describes. Counting from the bottom there would cancel
/// against a prefactor of order `p ln r`, costing digits.
fn ln_beta_sum(t: f64, n: i64, off: f64, m: i64, a: f64) -> f64 {
    let base = if t > 0.0 { n } else { 0 };
    let mut acc = LogSum::new();
    for j in 0..=n {
        let x = 1.0 + (j as f64 + off) / a;
        let y = 1.0 + (m - j) as f64 / a;
        acc.add(2.0 * (j - base) as f64 * t - log_beta_raw(x, y));
    }
    acc.ln()
}

/// `ln` of the factor multiplying [`ln_beta_sum`]: with total degree `d`,
/// `2 off t − (d/a) softplus(2at)` for `t ≤ 0`, and the same quantity
/// rewritten through `softplus(x) = x + softplus(−x)` for `t > 0`.
fn ln_prefactor(t: f64, off: f64, d: f64, a: f64) -> f64 {
    if t > 0.0 {
        -d / a * softplus(-2.0 * a * t)
    } else {
        2.0 * off * t - d / a * softplus(2.0 * a * t)
    }
}

fn spindle_precondition(params: SpindleParams, p: u32) -> Result<()> {
    check_power(p)?;
    if (p as i64) < params.j0() {
        return Err(domain(format!(
            "p = {p} is below the lowest admissible degree j0 = {}; the section space is trivial",
            params.j0()
        )));
    }
    Ok(())
}

/// Flux-variant spindle kernel at `t = ln r`. Arguments already validated.
pub(crate) fn spindle_kernel_at(params: SpindleParams, p: u32, t: f64) -> f64 {
    let (a, nu) = (params.a(), params.nu());
    let j0 = params.j0();
    let off = j0 as f64 - nu;
    let n = p as i64 - j0;
    (ln_prefactor(t, off, p as f64 - nu, a) + ln_beta_sum(t, n, off, n, a)).exp()
}

fn spindle_puncture_value(params: SpindleParams, p: u32) -> Result<f64> {
    let off = params.j0() as f64 - params.nu();
    if params.nu_is_natural() {
        Ok((p as f64 - params.nu()) / params.a() + 1.0)
    } else if off > 0.0 {
        Ok(0.0)
    } else {
        Err(Error::Divergent { exponent: 2.0 * off })
    }
}

/// Kernel of the spindle with flux `ν`, as a Beta-reciprocal sum over the
/// admissible degrees `j0 ≤ j ≤ p`.
pub fn spindle_kernel(params: SpindleParams, p: u32, r: f64) -> Result<f64> {
    spindle_precondition(params, p)?;
    check_radius(r)?;
    if r == 0.0 {
        return spindle_puncture_value(params, p);
    }
    Ok(spindle_kernel_at(params, p, r.ln()))
}

/// Roots-of-unity closed form of the spindle kernel at cone order `a = 1/s`
/// and `ν = 0`.
///
/// # Panics
///
/// If the imaginary parts of the conjugate-paired terms fail to cancel to
/// `1e-10` relative, which would indicate a bug rather than bad input.
pub fn spindle_kernel_closed(s: u32, p: u32, r: f64) -> Result<f64> {
    if s == 0 {
        return Err(domain("s must be at least 1"));
    }
    check_power(p)?;
    check_radius(r)?;
    let (sf, pf) = (s as f64, p as f64);
    if r == 0.0 {
        return Ok(sf * pf + 1.0);
    }
    let y = (2.0 * r.ln() / sf).exp();
    let power = pf * sf;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut magnitude = 1.0;
    for l in 1..s {
        let angle = 2.0 * PI * l as f64 / sf;
        let half_sin = (0.5 * angle).sin();
        // |1 + e^{iθ} y|² / (1 + y)² = 1 − 4 y sin²(θ/2) / (1 + y)²
        let ln_mod = 0.5 * (-4.0 * y * half_sin * half_sin / ((1.0 + y) * (1.0 + y))).ln_1p();
        let arg = (y * angle.sin()).atan2(1.0 + y * angle.cos());
        let term = Complex64::from_polar((power * ln_mod).exp(), power * arg);
        magnitude += term.norm();
        sum += term;
    }
    assert!(
        sum.im.abs() <= 1e-10 * magnitude,
        "imaginary residue {} in roots-of-unity sum (s = {s}, p = {p}, r = {r})",
        sum.im
    );
    Ok((pf + 1.0 / sf) * sum.re)
}

/// `j_p = ⌊pν − a⌋ + 1` and `θ = j_p − pν ∈ (−a, 1 − a]` for the pole
/// variant.
pub(crate) fn pole_index(params: SpindleParams, p: u32) -> (i64, f64) {
    let pnu = p as f64 * params.nu();
    let jp = snapped_floor(pnu - params.a()) as i64 + 1;
    let mut theta = jp as f64 - pnu;
    if theta.abs() <= 8.0 * f64::EPSILON * pnu.max(1.0) {
        theta = 0.0;
    }
    (jp, theta)
}

/// Pole-variant kernel at `t = ln r`. Arguments already validated.
pub(crate) fn pole_kernel_at(params: SpindleParams, p: u32, t: f64) -> f64 {
    if params.nu() == 1.0 {
        return 1.0;
    }
    let (a, nu) = (params.a(), params.nu());
    let (jp, theta) = pole_index(params, p);
    let n = p as i64 - jp;
    (ln_prefactor(t, theta, p as f64 * (1.0 - nu), a) + ln_beta_sum(t, n, theta, n, a)).exp()
}

fn pole_puncture_value(params: SpindleParams, p: u32) -> Result<f64> {
    if params.nu() == 1.0 {
        return Ok(1.0);
    }
    let (jp, theta) = pole_index(params, p);
    if theta == 0.0 {
        Ok(1.0 + (p as i64 - jp) as f64 / params.a())
    } else if theta > 0.0 {
        Ok(0.0)
    } else {
        Err(Error::Divergent { exponent: 2.0 * theta })
    }
}

/// Kernel of the spindle metric with a logarithmic pole of strength `pν` in
/// the weight of the `p`-th power. Identically 1 when `ν = 1`.
pub fn pole_kernel(params: SpindleParams, p: u32, r: f64) -> Result<f64> {
    let params = SpindleParams::pole(params.a(), params.nu())?;
    check_power(p)?;
    check_radius(r)?;
    if r == 0.0 {
        return pole_puncture_value(params, p);
    }
    Ok(pole_kernel_at(params, p, r.ln()))
}

/// Log-norms `ln ‖z^j‖²_p` for a contiguous range of degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialBasis {
    p: u32,
    j_min: i64,
    unbounded: bool,
    log_norms: Vec<f64>,
    excluded: Vec<i64>,
}

impl MonomialBasis {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn j_min(&self) -> i64 {
        self.j_min
    }

    /// Largest degree with a stored norm (the truncation point if unbounded).
    pub fn j_max(&self) -> i64 {
        self.j_min + self.log_norms.len() as i64 - 1
    }

    pub fn is_unbounded(&self) -> bool {
        self.unbounded
    }

    pub fn len(&self) -> usize {
        self.log_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_norms.is_empty()
    }

    pub fn log_norms(&self) -> &[f64] {
        &self.log_norms
    }

    /// Requested degrees whose norm diverges.
    pub fn excluded(&self) -> &[i64] {
        &self.excluded
    }

    pub fn log_norm(&self, j: i64) -> Option<f64> {
        if j < self.j_min {
            return None;
        }
        self.log_norms.get((j - self.j_min) as usize).copied()
    }

    /// Exact Beta-function norms for the spindle-type models.
    pub fn closed_form(model: &RadialModel, p: u32) -> Result<Self> {
        check_power(p)?;
        let (a, nu_eff) = match model.geometry() {
            Geometry::Spindle(sp) => (sp.a(), sp.nu()),
            Geometry::SpindlePole(sp) => (sp.a(), p as f64 * sp.nu()),
            Geometry::FubiniStudy => (1.0, 0.0),
            Geometry::LogSingularDemo { nu } => (1.0, p as f64 * nu),
            _ => return Err(domain(format!("no closed-form norms for {}", model.name()))),
        };
        let (finite, excluded) = split_finite(model, p, 0, p as i64);
        let (lo, hi) = finite.ok_or_else(|| domain("no normalizable monomials"))?;
        let log_norms = (lo..=hi)
            .map(|j| {
                let (jf, pf) = (j as f64, p as f64);
                log_beta_raw(1.0 + (jf - nu_eff) / a, 1.0 + (pf - jf) / a)
            })
            .collect();
        Ok(MonomialBasis { p, j_min: lo, unbounded: false, log_norms, excluded })
    }

    /// A copy with `extra` more degrees appended. Only meaningful for
    /// unbounded bases.
    pub fn extended(&self, exec: Execution, model: &RadialModel, extra: usize) -> Result<Self> {
        if !self.unbounded {
            return Err(domain("cannot extend a bounded basis"));
        }
        let start = self.j_max() + 1;
        let js: Vec<i64> = (start..start + extra as i64).collect();
        let more = exec.try_map(&js, |&j| log_norm_quadrature(model, self.p, j))?;
        let mut next = self.clone();
        next.log_norms.extend(more);
        Ok(next)
    }
}

/// Finite-norm subrange of `[lo, hi]` and the excluded degrees.
fn split_finite(model: &RadialModel, p: u32, lo: i64, hi: i64) -> (Option<(i64, i64)>, Vec<i64>) {
    let finite: Vec<i64> = (lo..=hi).filter(|&j| model.norm_is_finite(p, j)).collect();
    match (finite.first(), finite.last()) {
        (Some(&a), Some(&b)) => {
            let excluded = (lo..=hi).filter(|&j| j < a || j > b).collect();
            (Some((a, b)), excluded)
        }
        _ => (None, (lo..=hi).collect()),
    }
}

/// `ln‖z^j‖²_p = ln(2π ∫ r^{2j+1} e^{−2Φ_p} ρ dr)` by adaptive quadrature in
/// `t = ln r`.
pub fn log_norm_quadrature(model: &RadialModel, p: u32, j: i64) -> Result<f64> {
    check_power(p)?;
    if !model.norm_is_finite(p, j) {
        let (lo, hi) = model.decay_rates(p, j);
        return Err(Error::Quadrature {
            j,
            reason: format!("norm diverges (decay rates {lo}, {hi})"),
        });
    }
    let jf = j as f64;
    let log_f = |t: f64| {
        LN_2PI + (2.0 * jf + 2.0) * t - 2.0 * model.weight_at(p, t) + model.ln_density_at(t)
    };
    let (t_lo, t_hi) = model.t_interval();
    let start = if t_hi.is_finite() { t_hi - 1.0 } else { 0.0 };
    let t_star = maximize_concave(&log_f, t_lo, t_hi, start);
    let l_star = log_f(t_star);
    if !l_star.is_finite() {
        return Err(Error::Quadrature { j, reason: format!("log-integrand peak is {l_star}") });
    }
    let width = peak_width(&log_f, t_star, t_lo, t_hi);
    let lo = march(&log_f, t_star, l_star - LOG_INTEGRAND_DROP, -1.0, width, t_lo);
    let hi = march(&log_f, t_star, l_star - LOG_INTEGRAND_DROP, 1.0, width, t_hi);
    let segments = ((hi - lo) / width).ceil().clamp(4.0, 256.0) as usize;
    let tol = Tolerance { abs: 0.0, rel: NORM_RTOL, max_intervals: 20_000 };
    let est = quadrature::integrate(|t| (log_f(t) - l_star).exp(), lo, hi, segments, tol)
        .map_err(|e| Error::Quadrature {
            j,
            reason: match e {
                QuadError::Budget(est) => {
                    format!("interval budget exhausted (error {:.3e} of {:.3e})", est.error, est.value)
                }
                QuadError::NonFinite { at } => format!("non-finite integrand at t = {at}"),
            },
        })?;
    Ok(l_star + est.value.ln())
}

/// Move from `t` by up to `step` in direction `dir`, never crossing a
/// finite `bound` (at most half the remaining distance is taken).
fn step_toward(t: f64, dir: f64, step: f64, bound: f64) -> f64 {
    if bound.is_finite() {
        t + dir * step.min(0.5 * (bound - t).abs())
    } else {
        t + dir * step
    }
}

/// Maximizer of a concave function on `(lo, hi)`: expanding bracket, then
/// golden-section search. A maximum at a finite boundary is returned as a
/// point within rounding of it.
fn maximize_concave<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, start: f64) -> f64 {
    let f0 = f(start);
    let right = step_toward(start, 1.0, 1.0, hi);
    let left = step_toward(start, -1.0, 1.0, lo);
    let (fr, fl) = (f(right), f(left));
    let (mut a, mut b) = if fr > f0 {
        let (dir, bound) = (1.0, hi);
        let (mut prev, mut cur, mut fcur) = (start, right, fr);
        let mut step = 2.0;
        loop {
            let next = step_toward(cur, dir, step, bound);
            if (next - cur).abs() <= 1e-15 * cur.abs().max(1.0) {
                return cur;
            }
            let fnext = f(next);
            if fnext <= fcur {
                break (prev, next);
            }
            prev = cur;
            cur = next;
            fcur = fnext;
            step *= 2.0;
        }
    } else if fl > f0 {
        let (dir, bound) = (-1.0, lo);
        let (mut prev, mut cur, mut fcur) = (start, left, fl);
        let mut step = 2.0;
        loop {
            let next = step_toward(cur, dir, step, bound);
            if (next - cur).abs() <= 1e-15 * cur.abs().max(1.0) {
                return cur;
            }
            let fnext = f(next);
            if fnext <= fcur {
                break (next, prev);
            }
            prev = cur;
            cur = next;
            fcur = fnext;
            step *= 2.0;
        }
    } else {
        (left, right)
    };
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// `1 / √(−L'')` at the peak, or 1 when the curvature is not usable.
fn peak_width<F: Fn(f64) -> f64>(f: &F, t: f64, lo: f64, hi: f64) -> f64 {
    let room = (t - lo).min(hi - t);
    let mut h = 1e-2f64.min(0.5 * room);
    let mut width = 1.0;
    for _ in 0..2 {
        if !(h > 0.0) {
            break;
        }
        let c = -(f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        if !(c > 0.0 && c.is_finite()) {
            break;
        }
        width = 1.0 / c.sqrt();
        h = (0.2 * width).min(0.5 * room);
    }
    width
}

/// Walk away from the peak in doubling steps until `f` drops below `floor`
/// or the chart boundary is reached.
fn march<F: Fn(f64) -> f64>(f: &F, t_star: f64, floor: f64, dir: f64, width: f64, bound: f64) -> f64 {
    let mut t = t_star;
    let mut step = width;
    for _ in 0..2000 {
        let next = step_toward(t, dir, step, bound);
        if bound.is_finite() && (bound - next).abs() <= 1e-12 * bound.abs().max(1.0) {
            return bound;
        }
        if f(next) < floor {
            return next;
        }
        t = next;
        step *= 2.0;
    }
    t
}

/// Norms of `z^j` for the degrees in `range`, by quadrature. Degrees with a
/// divergent norm are dropped and listed in [`MonomialBasis::excluded`]. An
/// unbounded range is materialized up to an initial chunk; see
/// [`MonomialBasis::extended`].
pub fn radial_norms(model: &RadialModel, p: u32, range: IndexRange) -> Result<MonomialBasis> {
    radial_norms_with(Execution::default(), model, p, range)
}

pub fn radial_norms_with(
    exec: Execution,
    model: &RadialModel,
    p: u32,
    range: IndexRange,
) -> Result<MonomialBasis> {
    check_power(p)?;
    let (lo, hi, unbounded) = match range {
        IndexRange::Bounded { lo, hi } => {
            if hi < lo {
                return Err(domain(format!("empty index range [{lo}, {hi}]")));
            }
            (lo, hi, false)
        }
        IndexRange::From { lo } => {
            // the first finite degree, then a fixed-size chunk
            let first = (lo..lo + 4 * (p as i64) + 16)
                .find(|&j| model.norm_is_finite(p, j))
                .ok_or_else(|| domain("no normalizable monomials in range"))?;
            (lo, first + INITIAL_CHUNK as i64 - 1, true)
        }
    };
    let (finite, excluded) = split_finite(model, p, lo, hi);
    let (a, b) = finite.ok_or_else(|| domain(format!("no normalizable monomials in [{lo}, {hi}]")))?;
    if unbounded && b != hi {
        return Err(domain("norms stop being finite inside an unbounded range"));
    }
    let js: Vec<i64> = (a..=b).collect();
    let log_norms = exec.try_map(&js, |&j| log_norm_quadrature(model, p, j))?;
    Ok(MonomialBasis { p, j_min: a, unbounded, log_norms, excluded })
}

fn check_basis(basis: &MonomialBasis, model: &RadialModel, p: u32, r: f64) -> Result<f64> {
    if basis.p != p {
        return Err(domain(format!("basis was built for p = {}, not {p}", basis.p)));
    }
    if basis.is_empty() {
        return Err(domain("empty basis"));
    }
    if !model.contains(r) {
        return Err(domain(format!("radius {r} outside the {} chart", model.name())));
    }
    Ok(r.ln())
}

/// `ln(|z^j|²_{h_p} / ‖z^j‖²_p)` for each stored degree.
fn log_terms<'a>(
    basis: &'a MonomialBasis,
    model: &'a RadialModel,
    t: f64,
) -> impl Iterator<Item = f64> + 'a {
    let w = 2.0 * model.weight_at(basis.p, t);
    basis
        .log_norms
        .iter()
        .enumerate()
        .map(move |(k, ln_n)| 2.0 * (basis.j_min + k as i64) as f64 * t - w - ln_n)
}

/// `Σ_j |z^j|²_{h_p} / ‖z^j‖²_p` at radius `r`.
///
/// For an unbounded basis the sum stops at the first term that is below
/// `1e-16` of the partial sum, provided the last [`TAIL_WINDOW`] term ratios
/// are below one and nonincreasing; the geometric bound they imply must then
/// be under `1e-14` of the sum. Otherwise the tail is reported as
/// uncertified.
pub fn radial_kernel(basis: &MonomialBasis, model: &RadialModel, p: u32, r: f64) -> Result<f64> {
    let t = check_basis(basis, model, p, r)?;
    let mut acc = LogSum::new();
    if !basis.unbounded {
        log_terms(basis, model, t).for_each(|l| acc.add(l));
        return Ok(acc.ln().exp());
    }
    let mut prev = f64::NAN;
    let mut ratios = [f64::NAN; TAIL_WINDOW];
    let mut seen = 0usize;
    for l in log_terms(basis, model, t) {
        acc.add(l);
        if prev.is_finite() {
            ratios[seen % TAIL_WINDOW] = l - prev;
            seen += 1;
        }
        prev = l;
        let total = acc.ln();
        if seen >= TAIL_WINDOW && l - total < TAIL_REL_CUTOFF.ln() {
            if let Some(q) = certified_ratio(&ratios, seen) {
                let tail = l + q - (-q.exp()).ln_1p();
                if tail - total < TAIL_REL_BOUND.ln() {
                    return Ok(total.exp());
                }
            }
        }
    }
    Err(Error::TailNotCertified {
        j: basis.j_max(),
        reason: format!("no monotone geometric tail within {} terms at r = {r}", basis.len()),
    })
}

/// Largest log-ratio in the window if the window is nonincreasing (up to
/// quadrature noise) and below zero.
fn certified_ratio(ring: &[f64; TAIL_WINDOW], seen: usize) -> Option<f64> {
    const SLACK: f64 = 1e-9;
    let ordered: Vec<f64> = (0..TAIL_WINDOW).map(|i| ring[(seen + i) % TAIL_WINDOW]).collect();
    let monotone = ordered.windows(2).all(|w| w[1] <= w[0] + SLACK);
    let q = ordered[TAIL_WINDOW - 1] + SLACK;
    (monotone && q < 0.0).then_some(q)
}

/// `|e_j(r)|_{h_p}` for the orthonormal basis `e_j = z^j / ‖z^j‖_p`.
pub fn basis_values(basis: &MonomialBasis, model: &RadialModel, r: f64) -> Result<Vec<f64>> {
    let t = check_basis(basis, model, basis.p, r)?;
    Ok(log_terms(basis, model, t).map(|l| (0.5 * l).exp()).collect())
}

/// `|Σ_k c_k e_{j_min + k}|²_{h_p}` at `z = r e^{iθ}`.
pub fn section_norm_sq(
    basis: &MonomialBasis,
    model: &RadialModel,
    coeffs: &[Complex64],
    r: f64,
    theta: f64,
) -> Result<f64> {
    if coeffs.len() > basis.len() {
        return Err(domain(format!(
            "{} coefficients for a basis of length {}",
            coeffs.len(),
            basis.len()
        )));
    }
    let values = basis_values(basis, model, r)?;
    let sum: Complex64 = coeffs
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(k, (c, v))| {
            let j = (basis.j_min + k as i64) as f64;
            c * Complex64::from_polar(*v, j * theta)
        })
        .sum();
    Ok(sum.norm_sqr())
}

/// Sampled `(r, P_p(r))` pairs. Divergent puncture values are stored as
/// `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelProfile {
    pub p: u32,
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
enum Source {
    Flux(SpindleParams),
    Pole(SpindleParams),
    Constant(f64),
    Basis(MonomialBasis),
}

/// Kernel of one model at one power, ready to be sampled.
///
/// Closed forms are used where they exist. Otherwise the norms are computed
/// once; for an unbounded basis it is grown until the tail certifies at the
/// largest radius that will be asked for.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    model: RadialModel,
    p: u32,
    source: Source,
}

impl KernelEvaluator {
    pub fn new(model: &RadialModel, p: u32, r_max: f64) -> Result<Self> {
        Self::new_with(Execution::default(), model, p, r_max)
    }

    pub fn new_with(exec: Execution, model: &RadialModel, p: u32, r_max: f64) -> Result<Self> {
        check_power(p)?;
        let source = match model.geometry() {
            Geometry::Spindle(sp) => {
                spindle_precondition(sp, p)?;
                Source::Flux(sp)
            }
            Geometry::SpindlePole(sp) => Source::Pole(sp),
            Geometry::LogSingularDemo { nu } => Source::Pole(SpindleParams::pole(1.0, nu)?),
            Geometry::FubiniStudy => Source::Flux(SpindleParams::new(1.0, 0.0)?),
            Geometry::BargmannFock => Source::Constant(p as f64),
            Geometry::PoincareDisc => return Self::quadrature_with(exec, model, p, r_max),
        };
        Ok(KernelEvaluator { model: model.clone(), p, source })
    }

    /// Force the quadrature engine, whatever the model.
    pub fn quadrature(model: &RadialModel, p: u32, r_max: f64) -> Result<Self> {
        Self::quadrature_with(Execution::default(), model, p, r_max)
    }

    pub fn quadrature_with(exec: Execution, model: &RadialModel, p: u32, r_max: f64) -> Result<Self> {
        let mut basis = radial_norms_with(exec, model, p, model.index_range(p))?;
        if basis.is_unbounded() {
            if !model.contains(r_max) {
                return Err(domain(format!("r_max = {r_max} outside the {} chart", model.name())));
            }
            loop {
                match radial_kernel(&basis, model, p, r_max) {
                    Ok(_) => break,
                    Err(Error::TailNotCertified { .. }) if basis.len() < MAX_BASIS_LEN => {
                        basis = basis.extended(exec, model, basis.len())?;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(KernelEvaluator { model: model.clone(), p, source: Source::Basis(basis) })
    }

    pub fn model(&self) -> &RadialModel {
        &self.model
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn basis(&self) -> Option<&MonomialBasis> {
        match &self.source {
            Source::Basis(b) => Some(b),
            _ => None,
        }
    }

    /// `P_p(r)`. Closed forms accept `r = 0`; the engine needs `r` inside
    /// the chart.
    pub fn eval(&self, r: f64) -> Result<f64> {
        match &self.source {
            Source::Flux(sp) => spindle_kernel(*sp, self.p, r),
            Source::Pole(sp) => pole_kernel(*sp, self.p, r),
            Source::Constant(c) => {
                check_radius(r)?;
                Ok(*c)
            }
            Source::Basis(b) => radial_kernel(b, &self.model, self.p, r),
        }
    }

    /// `P_p(r) ρ(r)^p`, the kernel against the Petersson product. Only for
    /// the canonical bundle of the punctured disc.
    pub fn petersson(&self, r: f64) -> Result<f64> {
        if self.model.geometry() != Geometry::PoincareDisc {
            return Err(domain(format!("{} does not carry the canonical bundle", self.model.name())));
        }
        let kernel = self.eval(r)?;
        Ok((kernel.ln() + self.p as f64 * self.model.ln_density_at(r.ln())).exp())
    }

    pub fn profile(&self, exec: Execution, radii: &[f64]) -> Result<KernelProfile> {
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("profile radii must be strictly increasing"));
        }
        let values = exec.try_map(radii, |&r| match self.eval(r) {
            Err(Error::Divergent { .. }) => Ok(f64::INFINITY),
            other => other,
        })?;
        Ok(KernelProfile { p: self.p, samples: radii.iter().copied().zip(values).collect() })
    }
}

/// Kernel against the Petersson product, `Π_p = P_p ρ^p`, on the punctured
/// disc.
pub fn petersson_kernel(model: &RadialModel, p: u32, r: f64) -> Result<f64> {
    KernelEvaluator::quadrature(model, p, r)?.petersson(r)
}
