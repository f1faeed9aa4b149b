//! Log-Gamma, log-Beta and the Mittag-Leffler function in binary64.
//!
//! Everything that feeds a kernel sum is returned in the log domain. The
//! Beta reciprocals that appear in the spindle kernels have arguments of
//! order `p / a` and overflow long before the desk-scale range of `p`.
//!
//! `ln Γ` is assembled from three pieces:
//!
//! * the Taylor series of `ln Γ(2 + z)` in `z` (coefficients `(ζ(k) − 1) / k`),
//!   used on `[1.5, 2.5)` and, via `ln Γ(1 + z) = ln Γ(2 + z) − ln(1 + z)`, on
//!   `[0.5, 1.5)`. This keeps full relative accuracy next to the zeros at 1 and 2;
//! * downward recurrence into `[1.5, 2.5)` for `x < 12`;
//! * the Stirling series with eight Bernoulli corrections for `x ≥ 12`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_CUTOFF: f64 = 12.0;
const TAYLOR_TERMS: usize = 64;

/// `B_{2k} / (2k (2k − 1))` for k = 1..=8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Bernoulli numbers B_2 .. B_14 for the Euler-Maclaurin tail of ζ(k).
const BERNOULLI_EVEN: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Taylor coefficients of `ln Γ(2 + z)`: `c[1] = 1 − γ`,
/// `c[k] = (−1)^k (ζ(k) − 1) / k` for k ≥ 2.
fn lgamma2_coeffs() -> &'static [f64; TAYLOR_TERMS] {
    static COEFFS: OnceLock<[f64; TAYLOR_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut c = [0.0; TAYLOR_TERMS];
        c[1] = 1.0 - EULER_GAMMA;
        for (k, ck) in c.iter_mut().enumerate().skip(2) {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            *ck = sign * zeta_minus_one(k as f64) / k as f64;
        }
        c
    })
}

/// ζ(k) − 1 for real k ≥ 2, by direct summation to N − 1 plus an
/// Euler-Maclaurin tail starting at N.
fn zeta_minus_one(k: f64) -> f64 {
    const N: usize = 32;
    let n = N as f64;
    // tail: sum_{m >= N} m^{-k}
    let mut tail = n.powf(1.0 - k) / (k - 1.0) + 0.5 * n.powf(-k);
    let mut rising = k; // k (k+1) ... (k + 2i - 2)
    let mut factorial = 2.0; // (2i)!
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let i = i + 1;
        tail += b / factorial * rising * n.powf(-k - 2.0 * i as f64 + 1.0);
        rising *= (k + 2.0 * i as f64 - 1.0) * (k + 2.0 * i as f64);
        factorial *= (2 * i + 1) as f64 * (2 * i + 2) as f64;
    }
    let head: f64 = (2..N).rev().map(|m| (m as f64).powf(-k)).sum();
    head + tail
}

/// `ln Γ(2 + z)` for |z| ≤ 0.5.
fn lgamma_near_two(z: f64) -> f64 {
    let c = lgamma2_coeffs();
    let mut acc = 0.0;
    for k in (1..TAYLOR_TERMS).rev() {
        acc = acc * z + c[k];
    }
    acc * z
}

/// Stirling correction μ(x) with `ln Γ(x) = (x − ½) ln x − x + ½ ln 2π + μ(x)`.
fn stirling_correction(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING_COEFFS.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

fn lgamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // x + 1 in (1, 1.5)
        lgamma_unchecked(x + 1.0) - x.ln()
    } else if x < 1.5 {
        let z = x - 1.0;
        lgamma_near_two(z) - z.ln_1p()
    } else if x < 2.5 {
        lgamma_near_two(x - 2.0)
    } else if x < STIRLING_CUTOFF {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        lgamma_near_two(y - 2.0) + prod.ln()
    } else {
        (x - 0.5) * x.ln() - x + HALF_LN_TWO_PI + stirling_correction(x)
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("log_gamma requires 0 < x < inf, got {x}")));
    }
    Ok(lgamma_unchecked(x))
}

/// `ln Γ(y) − ln Γ(x + y)` for `y ≥ 12`, `x ≥ 0`, without forming either
/// (large) log-Gamma value.
fn lgamma_shift_ratio(x: f64, y: f64) -> f64 {
    let s = x + y;
    -(y - 0.5) * (x / y).ln_1p() - x * s.ln() + x + stirling_correction(y)
        - stirling_correction(s)
}

fn log_beta_unchecked(x: f64, y: f64) -> f64 {
    let (small, large) = if x <= y { (x, y) } else { (y, x) };
    if large < STIRLING_CUTOFF {
        lgamma_unchecked(small) + lgamma_unchecked(large) - lgamma_unchecked(small + large)
    } else if small < STIRLING_CUTOFF {
        lgamma_unchecked(small) + lgamma_shift_ratio(small, large)
    } else {
        let s = small + large;
        -(small - 0.5) * (large / small).ln_1p() - (large - 0.5) * (small / large).ln_1p()
            - 0.5 * s.ln()
            + HALF_LN_TWO_PI
            + stirling_correction(small)
            + stirling_correction(large)
            - stirling_correction(s)
    }
}

/// `ln B(x, y) = ln Γ(x) + ln Γ(y) − ln Γ(x + y)`. Symmetric bit-for-bit.
pub fn log_beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(domain(format!("log_beta requires positive arguments, got ({x}, {y})")));
    }
    Ok(log_beta_unchecked(x, y))
}

/// Internal fast path for callers that have already validated arguments.
pub(crate) fn log_beta_raw(x: f64, y: f64) -> f64 {
    debug_assert!(x > 0.0 && y > 0.0);
    log_beta_unchecked(x, y)
}

/// `ln(Γ(r + s) / Γ(s))` for `r ≥ 0`, `s > 0`.
pub fn log_gamma_ratio(r: f64, s: f64) -> Result<f64> {
    if !(r >= 0.0 && s > 0.0) {
        return Err(domain(format!("log_gamma_ratio requires r >= 0, s > 0, got ({r}, {s})")));
    }
    if s >= STIRLING_CUTOFF {
        Ok(-lgamma_shift_ratio(r, s))
    } else {
        Ok(lgamma_unchecked(r + s) - lgamma_unchecked(s))
    }
}

/// Parameters `(r, s)` of the Mittag-Leffler function `E_{r,s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    r: f64,
    s: f64,
}

impl MLParams {
    pub fn new(r: f64, s: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(domain(format!("Mittag-Leffler index r must be positive, got {r}")));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(domain(format!("Mittag-Leffler offset s must be nonnegative, got {s}")));
        }
        Ok(MLParams { r, s })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

pub const ML_TERM_CAP: usize = 1_000_000;
const ML_REL_CUTOFF: f64 = 1e-16;

/// `ln E_{r,s}(ζ)` by direct series summation with a running max shift.
///
/// Stops once a term is below `1e-16` of the partial sum and the terms are
/// decreasing. Returns `-inf` for the single case `s = 0, ζ = 0`.
pub fn ln_mittag_leffler(params: MLParams, zeta: f64) -> Result<f64> {
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(domain(format!("Mittag-Leffler argument must be finite and >= 0, got {zeta}")));
    }
    let MLParams { r, s } = params;
    let first = if s > 0.0 { -lgamma_unchecked(s) } else { f64::NEG_INFINITY };
    if zeta == 0.0 {
        return Ok(first);
    }
    let ln_zeta = zeta.ln();
    let ln_cut = ML_REL_CUTOFF.ln();

    let mut peak = first;
    let mut scaled = if first.is_finite() { 1.0 } else { 0.0 };
    let mut prev = first;
    for j in 1..ML_TERM_CAP {
        let jf = j as f64;
        let term = jf * ln_zeta - lgamma_unchecked(r * jf + s);
        if term > peak {
            scaled = scaled * (peak - term).exp() + 1.0;
            peak = term;
        } else {
            scaled += (term - peak).exp();
        }
        let total = peak + scaled.ln();
        if term < prev && term - total < ln_cut {
            return Ok(total);
        }
        prev = term;
    }
    Err(Error::NonConvergence { terms: ML_TERM_CAP })
}

/// `E_{r,s}(ζ) = Σ_j ζ^j / Γ(r j + s)` for real `ζ ≥ 0`.
pub fn mittag_leffler(params: MLParams, zeta: f64) -> Result<f64> {
    ln_mittag_leffler(params, zeta).map(f64::exp)
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Running log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    peak: f64,
    scaled: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        LogSum { peak: f64::NEG_INFINITY, scaled: 0.0 }
    }

    pub(crate) fn add(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term > self.peak {
            self.scaled = self.scaled * (self.peak - log_term).exp() + 1.0;
            self.peak = log_term;
        } else {
            self.scaled += (log_term - self.peak).exp();
        }
    }

    pub(crate) fn ln(&self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.peak + self.scaled.ln()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn log_gamma_trivial_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-300);
        assert!(rel(log_gamma(5.0).unwrap(), 24f64.ln()) < 1e-15);
        assert!(rel(log_gamma(0.5).unwrap(), PI.sqrt().ln()) < 1e-15);
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-1.5), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn zeta_values_match_closed_forms() {
        assert!(rel(zeta_minus_one(2.0), PI * PI / 6.0 - 1.0) < 1e-15);
        assert!(rel(zeta_minus_one(4.0), PI.powi(4) / 90.0 - 1.0) < 1e-14);
    }

    #[test]
    fn factorials_across_branches() {
        let mut fact = 1.0f64;
        for n in 1..=30u32 {
            fact *= n as f64;
            let lg = log_gamma(n as f64 + 1.0).unwrap();
            assert!(rel(lg, fact.ln()) < 2e-15, "n = {n}");
        }
    }

    #[test]
    fn log_beta_trivial_values() {
        assert_eq!(log_beta(1.0, 1.0).unwrap(), 0.0);
        assert!(rel(log_beta(2.0, 3.0).unwrap(), (1.0f64 / 12.0).ln()) < 1e-15);
        assert!(log_beta(0.0, 1.0).is_err());
        assert!(log_beta(1.0, -2.0).is_err());
    }

    #[test]
    fn log_beta_is_symmetric_in_every_branch() {
        for &(x, y) in &[(0.3, 4.0), (2.0, 50.0), (30.0, 70.5), (1e-3, 1e5)] {
            assert_eq!(log_beta(x, y).unwrap(), log_beta(y, x).unwrap());
        }
    }

    #[test]
    fn log_beta_large_integer_arguments() {
        // B(1, y) = 1 / y exactly
        for y in [13.0, 101.0, 2001.0] {
            assert!((log_beta(1.0, y).unwrap() + f64::ln(y)).abs() < 1e-14);
        }
    }

    #[test]
    fn mittag_leffler_exponential_and_cosh() {
        let e11 = MLParams::new(1.0, 1.0).unwrap();
        assert!(rel(mittag_leffler(e11, 2.0).unwrap(), 2f64.exp()) < 1e-14);
        let e21 = MLParams::new(2.0, 1.0).unwrap();
        assert!(rel(mittag_leffler(e21, 1.0).unwrap(), 1f64.cosh()) < 1e-14);
    }

    #[test]
    fn mittag_leffler_at_zero_is_first_term() {
        let p = MLParams::new(1.5, 0.7).unwrap();
        let want = 1.0 / lgamma_unchecked(0.7).exp();
        assert!(rel(mittag_leffler(p, 0.0).unwrap(), want) < 1e-14);
        let p0 = MLParams::new(2.0, 0.0).unwrap();
        assert_eq!(mittag_leffler(p0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn ml_params_validate() {
        assert!(MLParams::new(0.0, 1.0).is_err());
        assert!(MLParams::new(1.0, -0.1).is_err());
        let p = MLParams::new(1.0, 1.0).unwrap();
        assert!(mittag_leffler(p, -1.0).is_err());
    }

    #[test]
    fn logsum_matches_direct_sum() {
        let mut acc = LogSum::new();
        let xs = [0.1f64, 3.0, 2.5, 0.001];
        for x in xs {
            acc.add(x.ln());
        }
        assert!(rel(acc.ln().exp(), xs.iter().sum()) < 1e-15);
        assert_eq!(LogSum::new().ln(), f64::NEG_INFINITY);
    }

    #[test]
    fn softplus_is_stable() {
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        assert!(softplus(-800.0) >= 0.0);
        assert!(rel(softplus(0.3), (1.0 + 0.3f64.exp()).ln()) < 1e-15);
    }
}
