//! `bergman`: kernel profiles, scaling limits and verification reports.
//!
//! Tables go out as CSV (default) or JSON, reports as JSON. Numbers are
//! printed with 17 significant digits, so identical invocations produce
//! identical bytes.

mod table;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use bergman_core::format::to_json;
use bergman_core::grid::Grid;
use bergman_core::kernel::{spindle_kernel_closed, KernelEvaluator};
use bergman_core::models::{Geometry, RadialModel, SpindleParams};
use bergman_core::scaling::{limit_profile, pole_limit_profile, scaled_profile_with, theta_sequence, Variant};
use bergman_core::verify::{self, SweepConfig};
use bergman_core::Execution;
use clap::{Args, Parser, Subcommand, ValueEnum};

use table::Table;

#[derive(Parser)]
#[command(name = "bergman", version, about = "Bergman kernel densities on punctured Riemann surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate P_p(r) on a radial grid.
    Profile {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        powers: PowerArgs,
        /// Radii as MIN:MAX:COUNT[:geo]; COUNT is the number of subintervals.
        #[arg(long)]
        grid: Grid,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tabulate F_p(y) = P_p((a y / p)^{1/2a}) / p.
    Scaled {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        powers: PowerArgs,
        /// Scaled radii y as MIN:MAX:COUNT[:geo].
        #[arg(long)]
        grid: Grid,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tabulate the Mittag-Leffler limit of F_p.
    Limit {
        #[command(flatten)]
        model: ModelArgs,
        /// Subsequential limit θ of j_p − pν (spindle-pole only).
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// Scaled radii y as MIN:MAX:COUNT[:geo].
        #[arg(long)]
        grid: Grid,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a verification suite and print its JSON report.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Suite::Bound)]
        suite: Suite,
        #[command(flatten)]
        powers: PowerArgs,
        /// Radii for the bound and amm suites.
        #[arg(long)]
        grid: Option<Grid>,
        /// Regime exponent for the corollary suite, in [0, 1].
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        /// Radius for the b0 suite.
        #[arg(long)]
        r: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tabulate θ_p = j_p − pν for the pole variant.
    Theta {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        powers: PowerArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// spindle, spindle-pole, poincare-disc, fubini-study, log-singular-demo
    #[arg(long, default_value = "spindle")]
    model: String,
    /// Cone order a > 0.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Flux or pole coefficient ν.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    nu: f64,
    /// Integer s, shorthand for a = 1/s with ν = 0 (closed form).
    #[arg(long)]
    s: Option<u32>,
}

#[derive(Args)]
struct PowerArgs {
    /// Tensor power p.
    #[arg(long)]
    p: Option<u32>,
    /// Comma-separated powers; `A..B` expands to every integer in between.
    #[arg(long = "p-list")]
    p_list: Option<PowerList>,
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Bound,
    Corollary,
    B0,
    Gamma,
    Amm,
}

#[derive(Clone, Debug)]
struct PowerList(Vec<u32>);

impl FromStr for PowerList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let int = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("'{t}' is not a power"));
        let mut out = Vec::new();
        for item in s.split(',') {
            match item.split_once("..") {
                Some((lo, hi)) => {
                    let (lo, hi) = (int(lo)?, int(hi)?);
                    if lo > hi {
                        return Err(format!("empty range {item}"));
                    }
                    out.extend(lo..=hi);
                }
                None => out.push(int(item)?),
            }
        }
        Ok(PowerList(out))
    }
}

impl ModelArgs {
    fn is_spindle_like(&self) -> bool {
        matches!(self.model.as_str(), "spindle" | "spindle-pole")
    }

    fn cone_order(&self) -> Result<f64> {
        match (self.a, self.s) {
            (Some(_), Some(_)) => bail!("--a and --s are mutually exclusive"),
            (None, Some(s)) => {
                ensure!(s >= 1, "--s must be a positive integer");
                ensure!(self.nu == 0.0, "--s selects the closed form, which needs nu = 0");
                Ok(1.0 / s as f64)
            }
            (Some(a), None) => Ok(a),
            (None, None) if self.is_spindle_like() => bail!("--a (or --s) is required for {}", self.model),
            (None, None) => Ok(1.0),
        }
    }

    fn build(&self) -> Result<RadialModel> {
        Ok(RadialModel::from_name(&self.model, self.cone_order()?, self.nu)?)
    }

    fn spindle_params(&self) -> Result<(SpindleParams, Variant)> {
        let a = self.cone_order()?;
        match self.model.as_str() {
            "spindle" => Ok((SpindleParams::new(a, self.nu)?, Variant::Flux)),
            "spindle-pole" => Ok((SpindleParams::pole(a, self.nu)?, Variant::Pole)),
            other => bail!("this command needs --model spindle or spindle-pole, got {other}"),
        }
    }

    fn meta(&self, table: Table) -> Result<Table> {
        let mut table = table.meta("model", self.model.as_str());
        if self.is_spindle_like() {
            table = table.meta("a", table::number(self.cone_order()?)).meta("nu", table::number(self.nu));
        }
        Ok(table)
    }
}

impl PowerArgs {
    fn resolve(&self, default: Option<Vec<u32>>) -> Result<Vec<u32>> {
        let powers = match (self.p, &self.p_list) {
            (Some(_), Some(_)) => bail!("--p and --p-list are mutually exclusive"),
            (Some(p), None) => vec![p],
            (None, Some(list)) => list.0.clone(),
            (None, None) => default.ok_or_else(|| anyhow!("--p or --p-list is required"))?,
        };
        ensure!(!powers.is_empty(), "empty list of powers");
        ensure!(powers.iter().all(|&p| p >= 1), "tensor power p must be at least 1");
        Ok(powers)
    }
}

impl OutArgs {
    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit(&self, table: &Table) -> Result<()> {
        match self.format.unwrap_or(Format::Csv) {
            Format::Csv => self.write(&table.to_csv()),
            Format::Json => self.write(&table.to_json()?),
        }
    }
}

fn profile(model: &ModelArgs, powers: &PowerArgs, grid: &Grid, exec: Execution) -> Result<Table> {
    let m = model.build()?;
    let ps = powers.resolve(None)?;
    let radii = grid.points();
    ensure!(radii[0] >= 0.0, "radii must be >= 0");
    let r_max = radii[radii.len() - 1];
    let long = ps.len() > 1;
    let mut table = model.meta(Table::new(if long { &["p", "r", "P_p"] } else { &["r", "P_p"] }))?;
    table = table.meta("command", "profile");
    for &p in &ps {
        let values = match model.s {
            Some(s) => {
                ensure!(matches!(m.geometry(), Geometry::Spindle(_)), "--s applies to the spindle only");
                exec.try_map(&radii, |&r| spindle_kernel_closed(s, p, r))?
            }
            None => KernelEvaluator::new_with(exec, &m, p, r_max)?.profile(exec, &radii)?.samples.into_iter().map(|(_, v)| v).collect(),
        };
        for (&r, v) in radii.iter().zip(values) {
            table.push(if long { vec![p as f64, r, v] } else { vec![r, v] });
        }
    }
    Ok(table)
}

fn scaled(model: &ModelArgs, powers: &PowerArgs, grid: &Grid, exec: Execution) -> Result<Table> {
    let (params, variant) = model.spindle_params()?;
    let ps = powers.resolve(None)?;
    let ys = grid.points();
    ensure!(ys[0] >= 0.0, "scaled variable y must be >= 0");
    let long = ps.len() > 1;
    let mut table = model.meta(Table::new(if long { &["p", "y", "F_p"] } else { &["y", "F_p"] }))?;
    table = table.meta("command", "scaled");
    for &p in &ps {
        for (y, v) in scaled_profile_with(exec, params, p, &ys, variant)?.samples {
            table.push(if long { vec![p as f64, y, v] } else { vec![y, v] });
        }
    }
    Ok(table)
}

fn limit(model: &ModelArgs, theta: Option<f64>, grid: &Grid) -> Result<Table> {
    let (params, variant) = model.spindle_params()?;
    let ys = grid.points();
    ensure!(ys[0] >= 0.0, "scaled variable y must be >= 0");
    let mut table = model.meta(Table::new(&["y", "F"]))?.meta("command", "limit");
    match (variant, theta) {
        (Variant::Flux, Some(_)) => bail!("--theta applies to --model spindle-pole only"),
        (Variant::Pole, None) => bail!("--model spindle-pole needs --theta"),
        (Variant::Flux, None) => {
            let off = params.j0() as f64 - params.nu();
            for &y in &ys {
                let v = if y == 0.0 && off < 0.0 { f64::INFINITY } else { limit_profile(params, y)? };
                table.push(vec![y, v]);
            }
        }
        (Variant::Pole, Some(theta)) => {
            ensure!(ys[0] > 0.0, "the pole limit needs y > 0");
            table = table.meta("theta", table::number(theta));
            for &y in &ys {
                table.push(vec![y, pole_limit_profile(params, theta, y)?]);
            }
        }
    }
    Ok(table)
}

fn theta(model: &ModelArgs, powers: &PowerArgs) -> Result<Table> {
    let a = model.cone_order()?;
    let params = SpindleParams::pole(a, model.nu)?;
    let mut table = Table::new(&["p", "theta"])
        .meta("command", "theta")
        .meta("a", table::number(a))
        .meta("nu", table::number(model.nu));
    for p in powers.resolve(None)? {
        table.push(vec![p as f64, theta_sequence(params, p)?]);
    }
    Ok(table)
}

fn default_radii(m: &RadialModel) -> Grid {
    match m.geometry() {
        Geometry::PoincareDisc => Grid::linear(0.05, 0.9, 17),
        _ => Grid::linear(0.05, 1.0, 19),
    }
    .expect("valid default grid")
}

/// Returns the report as JSON and whether it passed.
#[allow(clippy::too_many_arguments)]
fn verify_suite(
    model: &ModelArgs,
    suite: Suite,
    powers: &PowerArgs,
    grid: Option<&Grid>,
    eta: Option<f64>,
    r: Option<f64>,
    exec: Execution,
) -> Result<(String, bool)> {
    let cfg = SweepConfig { exec, ..SweepConfig::default() };
    match suite {
        Suite::Bound => {
            let m = model.build()?;
            let ps = powers.resolve(Some(verify::default_p_set()))?;
            let grid = grid.copied().unwrap_or_else(|| default_radii(&m));
            let rep = verify::bound_check(&m, &ps, &grid, cfg)?;
            Ok((to_json(&rep)?, rep.pass))
        }
        Suite::Corollary => {
            let m = model.build()?;
            let ps = powers.resolve(Some(verify::default_p_set()))?;
            let eta = eta.ok_or_else(|| anyhow!("--suite corollary needs --eta"))?;
            let rep = verify::corollary_check(&m, eta, &ps, cfg)?;
            Ok((to_json(&rep)?, rep.pass))
        }
        Suite::B0 => {
            let m = model.build()?;
            let ps = powers.resolve(Some(verify::default_p_set()))?;
            let r = r.ok_or_else(|| anyhow!("--suite b0 needs --r"))?;
            let rep = verify::b0_check_with(exec, &m, r, &ps)?;
            Ok((to_json(&rep)?, rep.pass))
        }
        Suite::Gamma => {
            let rep = verify::gamma_lemma_default()?;
            Ok((to_json(&rep)?, rep.pass))
        }
        Suite::Amm => {
            ensure!(model.model == "poincare-disc", "--suite amm needs --model poincare-disc");
            let p = powers.resolve(Some(vec![60]))?;
            ensure!(p.len() == 1, "--suite amm takes a single --p");
            let radii = grid.map(Grid::points).unwrap_or_else(|| vec![0.2, 0.3, 0.5]);
            let rep = verify::amm_check(p[0], &radii)?;
            Ok((to_json(&rep)?, rep.pass))
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let exec = Execution::default();
    match cli.command {
        Command::Profile { model, powers, grid, out } => out.emit(&profile(&model, &powers, &grid, exec)?)?,
        Command::Scaled { model, powers, grid, out } => out.emit(&scaled(&model, &powers, &grid, exec)?)?,
        Command::Limit { model, theta, grid, out } => out.emit(&limit(&model, theta, &grid)?)?,
        Command::Theta { model, powers, out } => out.emit(&theta(&model, &powers)?)?,
        Command::Verify { model, suite, powers, grid, eta, r, out } => {
            ensure!(out.format != Some(Format::Csv), "verify reports are written as JSON only");
            let (text, pass) = verify_suite(&model, suite, &powers, grid.as_ref(), eta, r, exec)?;
            out.write(&text)?;
            return Ok(pass);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bergman: {}", one_line(&e));
            ExitCode::from(2)
        }
    }
}

fn one_line(e: &anyhow::Error) -> String {
    e.chain().map(|c| c.to_string()).collect::<Vec<_>>().join(": ").replace('\n', " ")
}
