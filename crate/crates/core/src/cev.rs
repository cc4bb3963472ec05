//! CEV diffusion `dX = ς̂ X^B̂ dW` with joint uncertainty on `(ς, B)`.
//!
//! Three companions ride along each path:
//!
//! * `M`, the Doléans exponential of `g = ς̂ B̂ X^{B̂-1}`;
//! * `K`, the sensitivity kernel, `dK = g K dW + X^B̂ dW`, so that
//!   `X^# = K (ς^# + ς̂ B^#)`;
//! * `A_X`, the bias of the state, integrated by Euler.
//!
//! The variance and covariances of the state are read off `K`:
//! `Γ_X = K² q` with `q = Γ[ς] + 2ς̂Γ[ς,B] + ς̂²Γ[B]`.

use crate::error::{Error, Result};
use crate::error_calculus::{make_quote, QuoteBand, QuoteMethod, UncertainParamSet};
pub use crate::sde::McConfig;
use crate::sde::{
    Companion, DoleansCompanion, Floor, McEstimate, RunReport, RunningStats, Simulation, Simulator,
    StepContext, TimeGrid,
};

/// Companion index of the Doléans factor.
pub const M_INDEX: usize = 0;
/// Companion index of the sensitivity kernel.
pub const K_INDEX: usize = 1;
/// Companion index of the state bias.
pub const A_INDEX: usize = 2;

/// Estimates `(ς̂, B̂)` with their biases and covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct CevParams {
    params: UncertainParamSet,
}

impl CevParams {
    /// Builds the parameter set; `B̂ = 1` is accepted as the lognormal
    /// boundary case.
    pub fn new(params: UncertainParamSet) -> Result<Self> {
        if params.dim() != 2 {
            return Err(Error::input("CEV parameters are the pair (vol, beta)"));
        }
        let (s, b) = (params.value(0), params.value(1));
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::input("vol must be positive"));
        }
        if !(b > 0.0 && b <= 1.0) {
            return Err(Error::input("beta must lie in (0, 1]"));
        }
        Ok(Self { params })
    }

    /// From scalars: values, biases and the covariance entries
    /// `Γ[ς]`, `Γ[ς,B]`, `Γ[B]`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_scalars(
        vol: f64,
        beta: f64,
        vol_bias: f64,
        beta_bias: f64,
        vol_var: f64,
        vol_beta_cov: f64,
        beta_var: f64,
    ) -> Result<Self> {
        Self::new(UncertainParamSet::new(
            vec![vol, beta],
            vec![vol_bias, beta_bias],
            vec![vec![vol_var, vol_beta_cov], vec![vol_beta_cov, beta_var]],
        )?)
    }

    pub fn params(&self) -> &UncertainParamSet {
        &self.params
    }
    pub fn vol(&self) -> f64 {
        self.params.value(0)
    }
    pub fn beta(&self) -> f64 {
        self.params.value(1)
    }
    pub fn vol_bias(&self) -> f64 {
        self.params.bias()[0]
    }
    pub fn beta_bias(&self) -> f64 {
        self.params.bias()[1]
    }
    pub fn vol_var(&self) -> f64 {
        self.params.cov_entry(0, 0)
    }
    pub fn vol_beta_cov(&self) -> f64 {
        self.params.cov_entry(0, 1)
    }
    pub fn beta_var(&self) -> f64 {
        self.params.cov_entry(1, 1)
    }

    /// `q = Γ[ς] + 2ς̂Γ[ς,B] + ς̂²Γ[B]`, the variance per unit squared kernel.
    pub fn kernel_variance(&self) -> f64 {
        let s = self.vol();
        self.vol_var() + 2.0 * s * self.vol_beta_cov() + s * s * self.beta_var()
    }

    /// Diffusion coefficient `ς̂ x^B̂`.
    pub fn diffusion(&self, x: f64) -> f64 {
        self.vol() * x.powf(self.beta())
    }

    /// Sensitivity volatility `g = ς̂ B̂ x^{B̂-1}`.
    pub fn sensitivity_vol(&self, x: f64) -> f64 {
        self.vol() * self.beta() * x.powf(self.beta() - 1.0)
    }
}

/// `Γ_X = K² q`.
pub fn gamma_x(k: f64, cev: &CevParams) -> f64 {
    k * k * cev.kernel_variance()
}

/// `Γ_{ςX} = K (Γ[ς] + ς̂Γ[ς,B])`.
pub fn cov_sigma_x(k: f64, cev: &CevParams) -> f64 {
    k * (cev.vol_var() + cev.vol() * cev.vol_beta_cov())
}

/// `Γ_{BX} = K (ς̂Γ[B] + Γ[ς,B])`.
pub fn cov_beta_x(k: f64, cev: &CevParams) -> f64 {
    k * (cev.vol() * cev.beta_var() + cev.vol_beta_cov())
}

/// Euler update of the state bias over one step.
///
/// `x`, `k` and `a` are the left-end state, kernel and bias.
pub fn bias_x_step(x: f64, k: f64, a: f64, cev: &CevParams, dw: f64) -> f64 {
    a + bias_x_coeff(x, k, a, cev) * dw
}

fn bias_x_coeff(x: f64, k: f64, a: f64, cev: &CevParams) -> f64 {
    let (s, b) = (cev.vol(), cev.beta());
    let xb = x.powf(b);
    let xb1 = xb / x;
    let xb2 = xb1 / x;
    let gx = gamma_x(k, cev);
    let gsx = cov_sigma_x(k, cev);
    let gbx = cov_beta_x(k, cev);
    s * b * xb1 * a
        + xb * (cev.vol_bias() + s * cev.beta_bias())
        + 0.5 * s * b * (b - 1.0) * xb2 * gx
        + xb * cev.vol_beta_cov()
        + xb1 * (b * gsx + s * gbx)
        + 0.5 * s * xb * cev.beta_var()
}

struct KernelCompanion<'a> {
    cev: &'a CevParams,
}

impl Companion for KernelCompanion<'_> {
    fn name(&self) -> &str {
        "K"
    }
    fn initial(&self, _x0: f64) -> f64 {
        0.0
    }
    fn step(&self, ctx: &StepContext<'_>, own: f64) -> f64 {
        let xb = ctx.x.powf(self.cev.beta());
        let g = self.cev.vol() * self.cev.beta() * xb / ctx.x;
        own + (g * own + xb) * ctx.dw
    }
}

struct BiasCompanion<'a> {
    cev: &'a CevParams,
}

impl Companion for BiasCompanion<'_> {
    fn name(&self) -> &str {
        "A_X"
    }
    fn initial(&self, _x0: f64) -> f64 {
        0.0
    }
    fn step(&self, ctx: &StepContext<'_>, own: f64) -> f64 {
        bias_x_step(ctx.x, ctx.companions[K_INDEX], own, self.cev, ctx.dw)
    }
}

/// Diffusion coefficient of a CEV parameter set.
pub struct CevDiffusion<'a>(pub &'a CevParams);

impl crate::sde::Diffusion for CevDiffusion<'_> {
    fn coeff(&self, _t: f64, x: f64) -> f64 {
        self.0.diffusion(x)
    }
}

/// Simulator for the CEV state with companions `M`, `K`, `A_X` (in that
/// order). Paths that come within ten floors of zero are flagged.
pub fn cev_simulator<'m, 'c: 'm>(
    model: &'m CevDiffusion<'c>,
    x0: f64,
    grid: TimeGrid,
) -> Result<Simulator<'m, CevDiffusion<'c>>> {
    let cev = model.0;
    let base = Floor::for_spot(x0);
    Ok(Simulator::new(model, x0, grid)?
        .with_floor(Floor {
            floor: base.floor,
            flag_below: 10.0 * base.floor,
        })
        .with_companion(DoleansCompanion::new("M", move |_t, x: f64| {
            cev.sensitivity_vol(x)
        }))
        .with_companion(KernelCompanion { cev })
        .with_companion(BiasCompanion { cev }))
}

/// Simulates and retains all CEV paths with their companions.
pub fn cev_simulate(
    cev: &CevParams,
    x0: f64,
    grid: TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<Simulation> {
    let model = CevDiffusion(cev);
    let sim = cev_simulator(&model, x0, grid)?;
    sim.simulate(n_paths, seed)
}

/// Per-path chain rule for the power payoff `X_T²`:
/// `(Γ[X²], A[X²]) = (4X²Γ_X, 2X A_X + Γ_X)`.
pub fn power_chain_rule(x: f64, gamma_x: f64, bias_x: f64) -> (f64, f64) {
    (4.0 * x * x * gamma_x, 2.0 * x * bias_x + gamma_x)
}

/// Monte Carlo moments of the power payoff and its corrections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPayoffStats {
    /// `E[X_T²]`.
    pub second_moment: McEstimate,
    /// `E[A[X_T²]]`.
    pub bias: McEstimate,
    /// `E[Γ[X_T²]]`.
    pub gamma: McEstimate,
    /// `E[2 X_T K_T]`, the kernel of the sharp of `E[X_T²]`.
    pub sharp_kernel: McEstimate,
    /// `q · E[2 X_T K_T]²`: variance of the expectation itself.
    pub gamma_of_mean: f64,
    pub report: RunReport,
}

#[derive(Clone, Copy, Default)]
struct PowerAcc {
    x2: RunningStats,
    bias: RunningStats,
    gamma: RunningStats,
    sharp: RunningStats,
}

impl PowerAcc {
    fn push(&mut self, cev: &CevParams, x: f64, k: f64, a: f64) {
        let gx = gamma_x(k, cev);
        let (g2, a2) = power_chain_rule(x, gx, a);
        self.x2.push(x * x);
        self.bias.push(a2);
        self.gamma.push(g2);
        self.sharp.push(2.0 * x * k);
    }

    fn merge(&mut self, o: PowerAcc) {
        self.x2.merge(o.x2);
        self.bias.merge(o.bias);
        self.gamma.merge(o.gamma);
        self.sharp.merge(o.sharp);
    }

    fn finish(self, cev: &CevParams, report: RunReport) -> Result<PowerPayoffStats> {
        let sharp_kernel = self.sharp.estimate()?;
        Ok(PowerPayoffStats {
            second_moment: self.x2.estimate()?,
            bias: self.bias.estimate()?,
            gamma: self.gamma.estimate()?,
            sharp_kernel,
            gamma_of_mean: cev.kernel_variance() * sharp_kernel.mean * sharp_kernel.mean,
            report,
        })
    }
}

/// Power-payoff corrections from retained paths.
pub fn power_payoff_corrections(sim: &Simulation, cev: &CevParams) -> Result<PowerPayoffStats> {
    let n = sim.grid.steps();
    let mut acc = PowerAcc::default();
    for p in &sim.paths {
        acc.push(
            cev,
            p.x[n],
            p.companions[K_INDEX][n],
            p.companions[A_INDEX][n],
        );
    }
    acc.finish(cev, sim.report)
}

/// Power-payoff corrections streamed over paths without retaining them.
pub fn power_payoff_stats(
    cev: &CevParams,
    x0: f64,
    maturity: f64,
    mc: McConfig,
) -> Result<PowerPayoffStats> {
    let model = CevDiffusion(cev);
    let sim = cev_simulator(&model, x0, TimeGrid::uniform(maturity, mc.steps)?)?;
    let n = mc.steps;
    let (acc, report) = sim.simulate_reduce(
        mc.paths,
        mc.seed,
        PowerAcc::default,
        |acc, p| {
            acc.push(
                cev,
                p.x[n],
                p.companions[K_INDEX][n],
                p.companions[A_INDEX][n],
            )
        },
        |acc, o| acc.merge(o),
    )?;
    acc.finish(cev, report)
}

/// Both readings of the power-option quote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerQuotes {
    /// Spread from `√E[Γ[X_T²]]`.
    pub as_stated: QuoteBand,
    /// Spread from `√Γ[E[X_T²]]`.
    pub theorem_consistent: QuoteBand,
    pub stats: PowerPayoffStats,
}

pub fn power_option_quote(
    cev: &CevParams,
    x0: f64,
    maturity: f64,
    alpha: f64,
    method: QuoteMethod,
    mc: McConfig,
) -> Result<PowerQuotes> {
    let stats = power_payoff_stats(cev, x0, maturity, mc)?;
    let center = stats.second_moment.mean;
    let bias = stats.bias.mean;
    Ok(PowerQuotes {
        as_stated: make_quote(center, bias, stats.gamma.mean, alpha, method)?,
        theorem_consistent: make_quote(center, bias, stats.gamma_of_mean, alpha, method)?,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_validation() {
        assert!(CevParams::from_scalars(0.2, 0.7, 0.0, 0.0, 1e-4, 0.0, 1e-4).is_ok());
        assert!(CevParams::from_scalars(0.2, 1.0, 0.0, 0.0, 1e-4, 0.0, 0.0).is_ok());
        assert!(CevParams::from_scalars(0.2, 1.2, 0.0, 0.0, 1e-4, 0.0, 0.0).is_err());
        assert!(CevParams::from_scalars(0.0, 0.5, 0.0, 0.0, 1e-4, 0.0, 0.0).is_err());
        assert!(CevParams::from_scalars(0.2, 0.5, 0.0, 0.0, 1e-4, 1e-3, 1e-4).is_err());
    }

    #[test]
    fn readouts_reduce_on_diagonal_covariance() {
        let c = CevParams::from_scalars(0.3, 0.6, 0.0, 0.0, 2e-4, 0.0, 5e-4).unwrap();
        assert_eq!(cov_sigma_x(2.0, &c), 2.0 * 2e-4);
        assert!((cov_beta_x(2.0, &c) - 2.0 * 0.3 * 5e-4).abs() < 1e-18);
        assert_eq!(gamma_x(0.0, &c), 0.0);
        let single = CevParams::from_scalars(0.3, 0.6, 0.0, 0.0, 2e-4, 0.0, 0.0).unwrap();
        assert_eq!(gamma_x(3.0, &single), 9.0 * 2e-4);
    }

    #[test]
    fn bias_step_vanishes_without_inputs() {
        let c = CevParams::from_scalars(0.3, 0.6, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(bias_x_step(1.3, 0.7, 0.0, &c, 0.05), 0.0);
    }

    #[test]
    fn power_chain_rule_ratio() {
        let (g, a) = power_chain_rule(1.5, 2e-4, 0.01);
        assert_eq!(g / 2e-4, 4.0 * 1.5 * 1.5);
        assert_eq!(a, 2.0 * 1.5 * 0.01 + 2e-4);
    }
}
