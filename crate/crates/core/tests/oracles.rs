//! Reference values computed at 40 digits with mpmath and frozen here, plus
//! oracles that are cheap enough to evaluate inside the test. Reference
//! values keep all the digits they were computed with.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use bergman_core::kernel::{
    pole_kernel, radial_norms, spindle_kernel, spindle_kernel_closed, KernelEvaluator, MonomialBasis,
};
use bergman_core::models::{poincare_disc_density, spindle_density, RadialModel, SpindleParams};
use bergman_core::scaling::{limit_profile, pole_limit_profile, theta_sequence};
use bergman_core::specfn::{log_beta, log_gamma, mittag_leffler, MLParams};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn log_gamma_across_scales() {
    let cases = [
        (1e-3, 6.9071788853838536825),
        (0.1, 2.2527126517342059599),
        (0.5, 0.57236494292470008707),
        (1.5, -0.12078223763524522235),
        (2.5, 0.28468287047291915963),
        (7.25, 7.0521854507385394449),
        (11.9, 17.258477450595521147),
        (12.1, 17.747007270798740177),
        (33.3, 82.603723581654952928),
        (150.5, 602.51395487058541195),
        (1e4, 82099.717496442377273),
        (1e6, 12815504.56914761166),
    ];
    for (x, want) in cases {
        let got = log_gamma(x).unwrap();
        assert!((got - want).abs() <= 4e-15 * want.abs().max(1.0), "x = {x}: {got} vs {want}");
    }
}

#[test]
fn log_beta_reference_values() {
    let cases = [
        (7.0, 9.0, -10.715417269085540343),
        (0.5, 1e5, -5.1840965395604141282),
        (300.25, 700.75, -613.18754970344367986),
        (1.5, 12.5, -3.9385985788222224063),
        (13.0, 0.75, -1.7132670447356117722),
    ];
    for (a, b, want) in cases {
        let got = log_beta(a, b).unwrap();
        assert!((got - want).abs() <= 4e-15 * want.abs().max(1.0), "B({a}, {b}): {got} vs {want}");
    }
}

#[test]
fn beta_matches_simpson_integral() {
    // B(7, 9) = ∫₀¹ x⁶ (1 − x)⁸ dx; the integrand is smooth, so composite
    // Simpson with 2000 panels is accurate far beyond 1e-12.
    let n = 2000;
    let h = 1.0 / n as f64;
    let f = |x: f64| x.powi(6) * (1.0 - x).powi(8);
    let mut s = f(0.0) + f(1.0);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    let simpson = s * h / 3.0;
    assert!(rel(log_beta(7.0, 9.0).unwrap().exp(), simpson) < 1e-12);
}

#[test]
fn mittag_leffler_reference_values() {
    let e = mittag_leffler(MLParams::new(2.0, 0.75).unwrap(), 3.5).unwrap();
    assert!(rel(e, 3.8319888784275375875) < 1e-13, "{e}");
    let e = mittag_leffler(MLParams::new(0.5, 1.3).unwrap(), 4.0).unwrap();
    assert!(rel(e, 7735808.286849899981) < 1e-12, "{e}");
}

#[test]
fn mittag_leffler_matches_direct_series() {
    // the series term by term, with Γ from the library's own log-gamma
    let (r, s, z) = (2.0, 0.75, 3.5f64);
    let direct: f64 = (0..500)
        .map(|k| (k as f64 * z.ln() - log_gamma(r * k as f64 + s).unwrap()).exp())
        .sum();
    let e = mittag_leffler(MLParams::new(r, s).unwrap(), z).unwrap();
    assert!(rel(e, direct) < 1e-13);
}

#[test]
fn densities() {
    let sp = SpindleParams::new(0.7, 0.0).unwrap();
    assert!(rel(spindle_density(sp, 0.3).unwrap(), 0.32657982137468357903) < 1e-14);
    assert!(rel(poincare_disc_density(0.9).unwrap(), 27.80348367290363335) < 1e-13);
}

#[test]
fn spindle_kernel_against_beta_sums() {
    let cases = [
        (0.7, -0.3, 20, 0.45, 20.99998901157962834),
        (0.5, 0.25, 12, 2.2, 12.250000001196384174),
        (0.3, 0.9, 40, 1.1, 39.4),
        (0.25, 0.0, 200, 3.7, 200.25),
    ];
    for (a, nu, p, r, want) in cases {
        let got = spindle_kernel(SpindleParams::new(a, nu).unwrap(), p, r).unwrap();
        assert!(rel(got, want) < 1e-12, "({a}, {nu}, {p}, {r}): {got} vs {want}");
    }
}

#[test]
fn pole_kernel_against_beta_sums() {
    let cases = [
        (0.5, 0.3, 6, 0.7, 4.7014938469807497246),
        (0.6, 0.45, 33, 1.7, 18.750000192867962707),
        (1.0, 0.5, 4, 0.2, 3.0),
        (0.35, 0.8, 17, 0.05, 4.0905450158347958006),
    ];
    for (a, nu, p, r, want) in cases {
        let got = pole_kernel(SpindleParams::pole(a, nu).unwrap(), p, r).unwrap();
        assert!(rel(got, want) < 1e-12, "({a}, {nu}, {p}, {r}): {got} vs {want}");
    }
    let unit = SpindleParams::pole(0.6, 1.0).unwrap();
    assert_eq!(pole_kernel(unit, 7, 2.3).unwrap(), 1.0);
}

#[test]
fn closed_form_cross_oracle() {
    let sp = SpindleParams::new(0.5, 0.0).unwrap();
    let a = spindle_kernel(sp, 40, 0.8).unwrap();
    let b = spindle_kernel_closed(2, 40, 0.8).unwrap();
    assert!(rel(a, b) < 1e-10);
    assert!(rel(spindle_kernel(sp, 4, 1.0).unwrap(), 4.5) < 1e-14);
}

/// `∫₀¹ r^A (−ln r)^B dr = Γ(B+1)/(A+1)^{B+1}` turns the punctured-disc norm
/// against the Petersson product into `2π 4^{p−1} Γ(2p−1)/(2j+2p)^{2p−1}`.
fn ln_petersson_norm(p: u32, j: i64) -> f64 {
    let p = p as f64;
    (2.0 * PI).ln() + (p - 1.0) * 4f64.ln() + log_gamma(2.0 * p - 1.0).unwrap()
        - (2.0 * p - 1.0) * (2.0 * j as f64 + 2.0 * p).ln()
}

#[test]
fn canonical_norms_are_petersson_norms_times_two_to_the_p() {
    let model = RadialModel::poincare_disc();
    for p in [1u32, 2, 7, 30] {
        let basis = radial_norms(&model, p, model.index_range(p)).unwrap();
        assert_eq!(basis.j_min(), 1 - p as i64);
        for j in basis.j_min()..basis.j_min() + 12 {
            let want = ln_petersson_norm(p, j) + p as f64 * 2f64.ln();
            let got = basis.log_norm(j).unwrap();
            assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "p = {p}, j = {j}: {got} vs {want}");
        }
    }
}

#[test]
fn petersson_kernel_by_direct_summation() {
    // Π_p(r) = Σ_j r^{2j} / ‖z^j‖²_Pet summed by hand over 200 terms
    let (p, r) = (2u32, 0.5f64);
    let brute: f64 = (1 - p as i64..1 - p as i64 + 200)
        .map(|j| (2.0 * j as f64 * r.ln() - ln_petersson_norm(p, j)).exp())
        .sum();
    assert!(rel(brute, 4.1498177754331228289) < 1e-13);
    let model = RadialModel::poincare_disc();
    let ev = KernelEvaluator::new(&model, p, r).unwrap();
    assert!(rel(ev.petersson(r).unwrap(), brute) < 1e-10);
    assert!(rel(ev.eval(r).unwrap(), 0.95792359529393697387) < 1e-10);
}

#[test]
fn poincare_kernel_reference_values() {
    let model = RadialModel::poincare_disc();
    let cases = [
        (60, 0.3, 37.878876455871089913),
        (5, 0.1, 2.8350784036934354693),
        (3, 0.7, 1.5915442122180949852),
    ];
    for (p, r, want) in cases {
        let got = KernelEvaluator::new(&model, p, r).unwrap().eval(r).unwrap();
        assert!(rel(got, want) < 1e-10, "p = {p}, r = {r}: {got} vs {want}");
    }
    let pet = KernelEvaluator::new(&model, 60, 0.3).unwrap().petersson(0.3).unwrap();
    assert!(rel(pet, 3359276830540798069.3) < 1e-10);
}

#[test]
fn spindle_engine_matches_closed_norms() {
    for (a, nu, p) in [(0.5, 0.25, 12u32), (0.7, -0.3, 20)] {
        let model = RadialModel::spindle(SpindleParams::new(a, nu).unwrap());
        let engine = radial_norms(&model, p, model.index_range(p)).unwrap();
        let closed = MonomialBasis::closed_form(&model, p).unwrap();
        assert_eq!((engine.j_min(), engine.j_max()), (closed.j_min(), closed.j_max()));
        for (x, y) in engine.log_norms().iter().zip(closed.log_norms()) {
            assert!((x - y).exp_m1().abs() < 1e-9);
        }
    }
}

#[test]
fn limit_profile_reference_values() {
    let v = limit_profile(SpindleParams::new(0.5, 0.2).unwrap(), 2.5).unwrap();
    assert!(rel(v, 0.9975169539792360444) < 1e-13, "{v}");
    let v = pole_limit_profile(SpindleParams::pole(0.5, 0.5).unwrap(), 0.25, 1.0).unwrap();
    assert!(rel(v, 0.51671991491035344679) < 1e-13, "{v}");
}

#[test]
fn theta_matches_integer_arithmetic() {
    // a = 1/2, ν = q/n: pν − a = (2pq − n)/(2n), so j_p and θ_p are exact
    // rationals computed without rounding.
    for (q, n) in [(1i64, 2i64), (1, 3), (2, 5), (5, 7), (3, 4)] {
        let params = SpindleParams::pole(0.5, q as f64 / n as f64).unwrap();
        for p in 1..=60i64 {
            let jp = (2 * p * q - n).div_euclid(2 * n) + 1;
            let want = (jp * n - p * q) as f64 / n as f64;
            let got = theta_sequence(params, p as u32).unwrap();
            assert!((got - want).abs() < 1e-12, "ν = {q}/{n}, p = {p}: {got} vs {want}");
        }
        let period: Vec<f64> = (1..=n as u32).map(|p| theta_sequence(params, p).unwrap()).collect();
        for p in 1..=40u32 {
            let shifted = theta_sequence(params, p + n as u32).unwrap();
            assert!((shifted - period[(p as usize - 1) % n as usize]).abs() < 1e-12);
        }
    }
}

#[test]
fn theta_fills_the_interval_for_irrational_nu() {
    let a = 0.5;
    let params = SpindleParams::pole(a, 1.0 / 2f64.sqrt()).unwrap();
    let thetas: Vec<f64> = (1..=10_000).map(|p| theta_sequence(params, p).unwrap()).collect();
    assert!(thetas.iter().all(|&t| t > -a && t <= 1.0 - a));
    let lo = thetas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = thetas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(lo <= -a + 0.01 && hi >= 1.0 - a - 0.01, "[{lo}, {hi}]");
}

#[test]
fn fubini_study_norms_are_integer_betas() {
    let model = RadialModel::fubini_study();
    let basis = radial_norms(&model, 3, model.index_range(3)).unwrap();
    let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
    for j in 0..=3usize {
        let want = fact[j] * fact[3 - j] / fact[4];
        assert!(rel(basis.log_norm(j as i64).unwrap().exp(), want) < 1e-10);
    }
}
