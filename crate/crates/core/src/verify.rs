//! Empirical checks of the asymptotic statements about `P_p`.
//!
//! The bounds in question are existential: some constant `C` makes them
//! hold. A check therefore fits the smallest constant that works on a grid,
//! refines the grid fourfold and refits. The constant passes when it is finite
//! and moves by at most a factor of two.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::format::float_or_inf;
use crate::grid::Grid;
use crate::kernel::KernelEvaluator;
use crate::models::{Geometry, RadialModel};
use crate::specfn::log_gamma_ratio;

pub const DEFAULT_TRIAL_CONSTANT: f64 = 1e-3;
pub const REFINEMENT: usize = 4;
pub const STABILITY_BAND: (f64, f64) = (0.5, 2.0);

/// Powers `2⁶ … 2¹¹`.
pub fn default_p_set() -> Vec<u32> {
    (6..=11).map(|k| 1u32 << k).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// `C₀` in the admissibility gate `p > C₀ d^{−δ}`.
    pub trial_constant: f64,
    pub refinement: usize,
    pub exec: Execution,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            trial_constant: DEFAULT_TRIAL_CONSTANT,
            refinement: REFINEMENT,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDescription {
    pub p_set: Vec<u32>,
    /// Radii on the coarse pass, as a grid string or a rule.
    pub radii: String,
    pub refinement: usize,
    pub trial_constant: f64,
    pub eta: Option<f64>,
    pub admissible_pairs: usize,
    pub refined_admissible_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub model: String,
    pub exponents: Exponents,
    pub grid: GridDescription,
    #[serde(with = "float_or_inf")]
    pub fitted_constant: f64,
    #[serde(with = "float_or_inf")]
    pub stability_ratio: f64,
    pub pass: bool,
}

/// `|P_p(r) / (p · c₁/ω(r)) − 1|` from an evaluator already built for `p`.
pub fn deviation_at(ev: &KernelEvaluator, r: f64) -> Result<f64> {
    let model = ev.model();
    if !model.contains(r) || model.puncture_distance(r) == 0.0 {
        return Err(domain(format!("r = {r} is a puncture or outside the {} chart", model.name())));
    }
    let c = model.c1_over_omega(r);
    if !(c > 0.0) {
        return Err(domain(format!("c1/omega vanishes for {}", model.name())));
    }
    Ok((ev.eval(r)? / (ev.p() as f64 * c) - 1.0).abs())
}

/// Deviation of `P_p / p` from `c₁(L, h)/ω` at radius `r`. For the punctured
/// disc `c₁/ω` is `−R_ω / 2π`.
pub fn deviation(model: &RadialModel, p: u32, r: f64) -> Result<f64> {
    if !model.contains(r) {
        return Err(domain(format!("r = {r} is a puncture or outside the {} chart", model.name())));
    }
    deviation_at(&KernelEvaluator::new(model, p, r)?, r)
}

fn exponents(model: &RadialModel) -> Exponents {
    let prof = model.profile();
    Exponents { alpha: prof.alpha, beta: prof.beta, delta: prof.delta }
}

fn evaluators(
    exec: Execution,
    model: &RadialModel,
    p_set: &[u32],
    r_max: f64,
) -> Result<Vec<KernelEvaluator>> {
    if p_set.is_empty() {
        return Err(Error::Config("empty p set".into()));
    }
    exec.try_map(p_set, |&p| KernelEvaluator::new_with(exec, model, p, r_max))
}

/// Sup of `deviation / shape` over the given `(evaluator index, r)` pairs.
fn sup_over<F>(exec: Execution, evs: &[KernelEvaluator], pairs: &[(usize, f64)], shape: F) -> Result<f64>
where
    F: Fn(u32, f64) -> f64 + Sync + Send,
{
    let ratios = exec.try_map(pairs, |&(k, r)| {
        let ev = &evs[k];
        Ok::<_, Error>(deviation_at(ev, r)? / shape(ev.p(), r))
    })?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

fn stability(coarse: f64, fine: f64) -> f64 {
    if coarse == 0.0 {
        if fine == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        fine / coarse
    }
}

fn passes(fitted: f64, ratio: f64) -> bool {
    fitted.is_finite() && ratio >= STABILITY_BAND.0 && ratio <= STABILITY_BAND.1
}

/// Fit `sup dev / (p^{−1/8} d^{−α} + p^{−3/8} d^{−β})` over admissible pairs
/// `p > C₀ d^{−δ}`, `d` the distance to the puncture.
pub fn bound_check(
    model: &RadialModel,
    p_set: &[u32],
    radii: &Grid,
    cfg: SweepConfig,
) -> Result<BoundReport> {
    let exps = exponents(model);
    let fine_grid = radii.refined(cfg.refinement);
    let (coarse_r, fine_r) = (radii.points(), fine_grid.points());
    if let Some(r) = fine_r.iter().find(|&&r| !model.contains(r)) {
        return Err(Error::Config(format!("radius {r} outside the {} chart", model.name())));
    }
    let admissible = |rs: &[f64]| -> Vec<(usize, f64)> {
        let mut pairs = Vec::new();
        for (k, &p) in p_set.iter().enumerate() {
            for &r in rs {
                let d = model.puncture_distance(r);
                if p as f64 > cfg.trial_constant * d.powf(-exps.delta) {
                    pairs.push((k, r));
                }
            }
        }
        pairs
    };
    let (coarse, fine) = (admissible(&coarse_r), admissible(&fine_r));
    if coarse.is_empty() {
        return Err(Error::Config(format!(
            "no admissible (p, r) pairs with C0 = {} on {radii}",
            cfg.trial_constant
        )));
    }
    let r_max = fine_r.iter().copied().fold(0.0, f64::max);
    let evs = evaluators(cfg.exec, model, p_set, r_max)?;
    let shape = |p: u32, r: f64| {
        let (p, d) = (p as f64, model.puncture_distance(r));
        p.powf(-0.125) * d.powf(-exps.alpha) + p.powf(-0.375) * d.powf(-exps.beta)
    };
    let fitted = sup_over(cfg.exec, &evs, &coarse, shape)?;
    let refined = sup_over(cfg.exec, &evs, &fine, shape)?;
    let ratio = stability(fitted, refined);
    Ok(BoundReport {
        model: model.name().to_string(),
        exponents: exps,
        grid: GridDescription {
            p_set: p_set.to_vec(),
            radii: radii.to_string(),
            refinement: cfg.refinement,
            trial_constant: cfg.trial_constant,
            eta: None,
            admissible_pairs: coarse.len(),
            refined_admissible_pairs: fine.len(),
        },
        fitted_constant: fitted,
        stability_ratio: ratio,
        pass: passes(fitted, ratio),
    })
}

/// Regime boundary `R (C₀/p)^{η/δ}` with `R` the chart radius.
pub fn regime_boundary(model: &RadialModel, eta: f64, p: u32, trial_constant: f64) -> f64 {
    let delta = model.profile().delta;
    model.chart_radius() * (trial_constant / p as f64).powf(eta / delta)
}

/// Fit `sup dev · p^{(1−η)/8}` just inside the boundary of the regime
/// `d > R (C₀/p)^{η/δ}`: at `r_b (1 + k/16)`, `k = 1..4`, then on the
/// refined set `r_b (1 + k/64)`, `k = 1..16`.
pub fn corollary_check(model: &RadialModel, eta: f64, p_set: &[u32], cfg: SweepConfig) -> Result<BoundReport> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Config(format!("eta must lie in [0, 1], got {eta}")));
    }
    let steps = 4usize;
    let fine_steps = steps * cfg.refinement.max(1);
    let pairs = |n: usize| -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (k, &p) in p_set.iter().enumerate() {
            let rb = regime_boundary(model, eta, p, cfg.trial_constant);
            for i in 1..=n {
                out.push((k, rb * (1.0 + 0.25 * i as f64 / n as f64)));
            }
        }
        out
    };
    let (coarse, fine) = (pairs(steps), pairs(fine_steps));
    if coarse.is_empty() {
        return Err(Error::Config("empty p set".into()));
    }
    if let Some((_, r)) = fine.iter().find(|(_, r)| !model.contains(*r)) {
        return Err(Error::Config(format!("regime radius {r} outside the {} chart", model.name())));
    }
    let r_max = fine.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let evs = evaluators(cfg.exec, model, p_set, r_max)?;
    let shape = |p: u32, _r: f64| (p as f64).powf(-(1.0 - eta) / 8.0);
    let fitted = sup_over(cfg.exec, &evs, &coarse, shape)?;
    let refined = sup_over(cfg.exec, &evs, &fine, shape)?;
    let ratio = stability(fitted, refined);
    Ok(BoundReport {
        model: model.name().to_string(),
        exponents: exponents(model),
        grid: GridDescription {
            p_set: p_set.to_vec(),
            radii: format!("r_b(p) * (1 + k/{}), k = 1..{steps}", 4 * steps),
            refinement: cfg.refinement,
            trial_constant: cfg.trial_constant,
            eta: Some(eta),
            admissible_pairs: coarse.len(),
            refined_admissible_pairs: fine.len(),
        },
        fitted_constant: fitted,
        stability_ratio: ratio,
        pass: passes(fitted, ratio),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaLemmaReport {
    pub r_points: usize,
    pub s_points: usize,
    pub violations: usize,
    /// Largest `ln Γ(r+s) − ln Γ(s) − 1/12 − r ln(r+s)`; negative means slack.
    pub max_excess: f64,
    pub limit_s: f64,
    /// Largest `|Γ(r+s) / (Γ(s) s^r) − 1|` at `s = limit_s`.
    pub limit_max_error: f64,
    pub pass: bool,
}

pub const GAMMA_SLACK: f64 = 1e-12;
pub const GAMMA_LIMIT_S: f64 = 1e6;
pub const GAMMA_LIMIT_TOL: f64 = 1e-3;

/// `Γ(r+s)/Γ(s) ≤ e^{1/12} (r+s)^r` on the product grid (checked in logs,
/// with `1e-12` slack), and `Γ(r+s)/(Γ(s) s^r) → 1` at `s = 10⁶`.
pub fn gamma_lemma_check(r_grid: &[f64], s_grid: &[f64]) -> Result<GammaLemmaReport> {
    if let Some(r) = r_grid.iter().find(|&&r| !(r >= 0.0 && r.is_finite())) {
        return Err(domain(format!("gamma lemma needs r >= 0, got {r}")));
    }
    if let Some(s) = s_grid.iter().find(|&&s| !(s >= 1.0 && s.is_finite())) {
        return Err(domain(format!("gamma lemma needs s >= 1, got {s}")));
    }
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for &r in r_grid {
        for &s in s_grid {
            let excess = log_gamma_ratio(r, s)? - (1.0 / 12.0 + r * (r + s).ln());
            if excess > GAMMA_SLACK {
                violations += 1;
            }
            max_excess = max_excess.max(excess);
        }
    }
    let mut limit_max_error = 0.0f64;
    for &r in r_grid {
        let ln_ratio = log_gamma_ratio(r, GAMMA_LIMIT_S)? - r * GAMMA_LIMIT_S.ln();
        limit_max_error = limit_max_error.max(ln_ratio.exp_m1().abs());
    }
    Ok(GammaLemmaReport {
        r_points: r_grid.len(),
        s_points: s_grid.len(),
        violations,
        max_excess,
        limit_s: GAMMA_LIMIT_S,
        limit_max_error,
        pass: violations == 0 && limit_max_error <= GAMMA_LIMIT_TOL,
    })
}

/// The 200 × 200 grid on `[0, 10] × [1, 100]`.
pub fn gamma_lemma_default() -> Result<GammaLemmaReport> {
    let r = Grid::linear(0.0, 10.0, 199)?.points();
    let s = Grid::linear(1.0, 100.0, 199)?.points();
    gamma_lemma_check(&r, &s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct B0Report {
    pub model: String,
    pub r: f64,
    pub p_set: Vec<u32>,
    /// `c₁/ω(r)`, the limit of `P_p(r)/p`.
    pub target: f64,
    pub gaps: Vec<f64>,
    pub pass: bool,
}

/// `|P_p(r)/p − c₁/ω(r)|` along `p_set`; passes when strictly decreasing.
pub fn b0_check(model: &RadialModel, r: f64, p_set: &[u32]) -> Result<B0Report> {
    b0_check_with(Execution::default(), model, r, p_set)
}

pub fn b0_check_with(exec: Execution, model: &RadialModel, r: f64, p_set: &[u32]) -> Result<B0Report> {
    if p_set.len() < 2 {
        return Err(Error::Config("b0 check needs at least two powers".into()));
    }
    if !model.contains(r) {
        return Err(domain(format!("r = {r} outside the {} chart", model.name())));
    }
    let target = model.c1_over_omega(r);
    let evs = evaluators(exec, model, p_set, r)?;
    let gaps = evs
        .iter()
        .map(|ev| Ok((ev.eval(r)? / ev.p() as f64 - target).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let pass = gaps.windows(2).all(|w| w[1] < w[0]);
    Ok(B0Report { model: model.name().to_string(), r, p_set: p_set.to_vec(), target, gaps, pass })
}

/// Two-term expansion of the punctured-disc kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmmReport {
    pub model: String,
    pub p: u32,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Constant term derived from the curvature: `b₁ = R_ω / (4π) = −1/π`.
    pub offset: f64,
    pub max_residual: f64,
    pub tolerance: f64,
    /// The constant `−4/π` quoted alongside this expansion in the literature,
    /// and the residual it would leave.
    pub literal_offset: f64,
    pub literal_offset_residual: f64,
    pub pass: bool,
}

/// Compare `P_p(r)` on the punctured disc with `(2/π) p + b₁`.
pub fn amm_check(p: u32, radii: &[f64]) -> Result<AmmReport> {
    let model = RadialModel::poincare_disc();
    debug_assert_eq!(model.geometry(), Geometry::PoincareDisc);
    if radii.is_empty() {
        return Err(Error::Config("amm check needs at least one radius".into()));
    }
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let ev = KernelEvaluator::new(&model, p, r_max)?;
    let values = radii.iter().map(|&r| ev.eval(r)).collect::<Result<Vec<f64>>>()?;
    let lead = 2.0 * p as f64 / PI;
    let offset = model.declared_curvature() / (4.0 * PI);
    let literal_offset = -4.0 / PI;
    let resid = |c: f64| values.iter().map(|v| (v - lead - c).abs()).fold(0.0, f64::max);
    let max_residual = resid(offset);
    let literal_offset_residual = resid(literal_offset);
    let tolerance = 1e-6 * p as f64;
    Ok(AmmReport {
        model: model.name().to_string(),
        p,
        radii: radii.to_vec(),
        values,
        offset,
        max_residual,
        tolerance,
        literal_offset,
        literal_offset_residual,
        pass: max_residual < tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SpindleParams;

    #[test]
    fn deviation_examples() {
        let fs = RadialModel::fubini_study();
        assert!((deviation(&fs, 10, 0.7).unwrap() - 0.1).abs() < 1e-13);
        let sp = RadialModel::spindle(SpindleParams::new(0.5, 0.0).unwrap());
        assert!((deviation(&sp, 100, 1.0).unwrap() - 0.005).abs() < 1e-12);
        assert!(deviation(&sp, 100, 0.0).is_err());
        let pd = RadialModel::poincare_disc();
        let d = deviation(&pd, 60, 0.3).unwrap();
        assert!((d - 1.0 / 120.0).abs() < 1e-12);
    }

    #[test]
    fn fubini_study_bound_is_attained_at_smallest_p() {
        let fs = RadialModel::fubini_study();
        let grid = Grid::linear(0.2, 1.0, 4).unwrap();
        let rep = bound_check(&fs, &default_p_set(), &grid, SweepConfig::default()).unwrap();
        let expect = 64f64.powf(-0.875) / (1.0 + 64f64.powf(-0.25));
        assert!((rep.fitted_constant - expect).abs() < 1e-12);
        assert!(rep.pass);
        assert!((rep.stability_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_admissible_set_is_a_config_error() {
        let sp = RadialModel::spindle(SpindleParams::new(0.5, 0.0).unwrap());
        let grid = Grid::linear(0.01, 0.02, 4).unwrap();
        let cfg = SweepConfig { trial_constant: 1.0, ..Default::default() };
        assert!(matches!(bound_check(&sp, &[64], &grid, cfg), Err(Error::Config(_))));
    }

    #[test]
    fn gamma_lemma_small_cases() {
        let rep = gamma_lemma_check(&[0.0, 1.0, 7.3], &[1.0, 2.5]).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.pass);
        assert!(gamma_lemma_check(&[1.0], &[0.5]).is_err());
    }

    #[test]
    fn b0_gap_for_one_third() {
        let sp = RadialModel::spindle(SpindleParams::new(1.0 / 3.0, 0.0).unwrap());
        let rep = b0_check(&sp, 1.5, &[16, 32, 64, 128]).unwrap();
        assert!(rep.pass);
        for (p, g) in rep.p_set.iter().zip(&rep.gaps) {
            assert!((g - 1.0 / (3.0 * *p as f64)).abs() < 1e-10, "p = {p}");
        }
    }

    #[test]
    fn amm_uses_curvature_offset() {
        let rep = amm_check(60, &[0.2, 0.3, 0.5]).unwrap();
        assert!(rep.pass);
        assert!((rep.offset + 1.0 / PI).abs() < 1e-15);
        assert!((rep.literal_offset_residual - 3.0 / PI).abs() < 1e-9);
    }
}
