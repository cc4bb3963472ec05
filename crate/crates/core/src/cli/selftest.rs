//! Quick end-to-end checks run by the `selftest` command.

use crate::bs::{self, BsInputs};
use crate::cev::{self, CevParams, A_INDEX, K_INDEX};
use crate::error::Result;
use crate::error_calculus::{quantile_multiplier, QuoteMethod};
use crate::pnl::{
    self, BootstrapConfig, LatticeConfig, LocalVolSpec, Payoff, PnlConfig, TestFunction,
};
use crate::rng::derive_seed;
use crate::sde::{McConfig, RunningStats, TimeGrid};

/// One self-test line.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn close(name: &'static str, value: f64, reference: f64, tolerance: f64) -> Self {
        Self {
            name,
            passed: (value - reference).abs() <= tolerance,
            value,
            reference,
            tolerance,
        }
    }

    fn failed(name: &'static str, e: crate::Error) -> Self {
        eprintln!("selftest {name}: {e}");
        Self {
            name,
            passed: false,
            value: f64::NAN,
            reference: f64::NAN,
            tolerance: f64::NAN,
        }
    }
}

fn guard(name: &'static str, f: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| CheckResult::failed(name, e))
}

/// Runs every check; statistical checks use seeds derived from `seed`.
pub fn run_selftest(seed: u64) -> Vec<CheckResult> {
    let s = |i: u64| derive_seed(seed, i);
    let mut out = vec![
        guard("quote-algebra", quote_algebra),
        guard("price-bs-reference", price_bs_reference),
        guard("bias-vs-taylor", bias_vs_taylor),
        guard("smile-atm-neutral", smile_atm_neutral),
        guard("cev-beta1-bias-kernel", cev_bias_kernel),
        guard("cev-beta1-kernel", || cev_kernel(s(1))),
        guard("cev-gaussian-shift", || cev_gaussian_shift(s(2))),
        guard("triangle-general-quote", || triangle_quote(s(3))),
    ];
    match triangle_bootstrap(s(4)) {
        Ok(r) => out.extend(r),
        Err(e) => {
            out.push(CheckResult::failed("triangle-bootstrap-mean", e.clone()));
            out.push(CheckResult::failed("triangle-bootstrap-variance", e));
        }
    }
    out.push(guard("hedge-replication", || hedge_replication(s(5))));
    out
}

fn atm() -> Result<BsInputs> {
    BsInputs::from_scalars(100.0, 100.0, 1.0, 0.2, 0.01, 4e-4)
}

fn quote_algebra() -> Result<CheckResult> {
    let i = atm()?;
    let g = bs::quote(&i, 0.01, QuoteMethod::Gaussian)?;
    let c = bs::quote(&i, 0.01, QuoteMethod::Chebyshev)?;
    let k = quantile_multiplier(0.01, QuoteMethod::Gaussian)?;
    let expected = 2.0 * k * bs::variance_correction(&i).sqrt();
    let mut r = CheckResult::close("quote-algebra", g.spread, expected, 1e-12 * expected);
    r.passed &= g.ask + g.bid == 2.0 * g.mid && c.spread >= g.spread;
    Ok(r)
}

fn price_bs_reference() -> Result<CheckResult> {
    let i = BsInputs::from_scalars(100.0, 100.0, 1.0, 0.2, 0.0, 4e-4)?;
    let q = bs::quote(&i, 0.01, QuoteMethod::Gaussian)?;
    Ok(CheckResult::close(
        "price-bs-reference",
        q.mid,
        7.965170,
        1e-5,
    ))
}

fn bias_vs_taylor() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for &(x, k, t, v, a, g) in &[
        (100.0, 90.0, 0.5, 0.25, 0.01, 4e-4),
        (100.0, 120.0, 2.0, 0.15, -0.005, 1e-4),
        (50.0, 50.0, 1.0, 0.4, 0.0, 9e-4),
    ] {
        let i = BsInputs::from_scalars(x, k, t, v, a, g)?;
        let h = 1e-4;
        let c = |s: f64| bs::call_price(x, k, t, s);
        let fd = (c(v + h) - c(v - h)) / (2.0 * h) * a
            + 0.5 * (c(v + h) - 2.0 * c(v) + c(v - h)) / (h * h) * g;
        let b = bs::bias_correction(&i);
        worst = worst.max((b - fd).abs() / fd.abs().max(1e-8));
    }
    Ok(CheckResult::close("bias-vs-taylor", worst, 0.0, 1e-6))
}

fn smile_atm_neutral() -> Result<CheckResult> {
    let cells = bs::smile_surface_atm_neutral(
        100.0,
        &[90.0, 100.0, 110.0],
        &[0.25, 1.0, 2.0],
        0.2,
        4e-4,
        0.01,
    )?;
    let mut worst = 0.0f64;
    let mut curv = Vec::new();
    for row in cells.chunks(3) {
        let iv: Vec<f64> = row
            .iter()
            .map(|c| c.implied_vol.unwrap_or(f64::NAN))
            .collect();
        worst = worst.max((iv[1] - 0.2).abs());
        curv.push(iv[0] - 2.0 * iv[1] + iv[2]);
    }
    let mut r = CheckResult::close("smile-atm-neutral", worst, 0.0, 1e-8);
    r.passed &= curv.iter().all(|c| *c > 0.0) && curv.windows(2).all(|w| w[1] < w[0]);
    Ok(r)
}

fn cev_bias_kernel() -> Result<CheckResult> {
    let b = 0.013;
    let c = CevParams::from_scalars(0.2, 1.0, b, 0.0, 0.0, 0.0, 0.0)?;
    let sim = cev::cev_simulate(&c, 1.0, TimeGrid::uniform(1.0, 64)?, 100, 1)?;
    let mut worst = 0.0f64;
    for p in &sim.paths {
        for (a, k) in p.companions[A_INDEX].iter().zip(&p.companions[K_INDEX]) {
            worst = worst.max((a - b * k).abs() / (b * (1.0 + k.abs())));
        }
    }
    Ok(CheckResult::close(
        "cev-beta1-bias-kernel",
        worst,
        0.0,
        1e-13,
    ))
}

fn cev_kernel(seed: u64) -> Result<CheckResult> {
    let c = CevParams::from_scalars(0.2, 1.0, 0.0, 0.0, 4e-4, 0.0, 0.0)?;
    let n = 512;
    let sim = cev::cev_simulate(&c, 1.0, TimeGrid::uniform(1.0, n)?, 2_000, seed)?;
    let (mut num, mut den) = (0.0, 0.0);
    for p in &sim.paths {
        let w: f64 = p.dw.iter().sum();
        let exact = (0.2 * w - 0.02f64).exp() * (w - 0.2);
        num += (p.companions[K_INDEX][n] - exact).abs();
        den += exact.abs();
    }
    Ok(CheckResult::close("cev-beta1-kernel", num / den, 0.0, 0.02))
}

fn cev_gaussian_shift(seed: u64) -> Result<CheckResult> {
    let v = 4e-4;
    let c = CevParams::from_scalars(0.2, 1.0, 0.0, 0.0, v, 0.0, 0.0)?;
    let model = cev::CevDiffusion(&c);
    let sim = cev::cev_simulator(&model, 1.0, TimeGrid::uniform(1.0, 128)?)?;
    let (stats, _) = sim.simulate_reduce(
        40_000,
        seed,
        RunningStats::new,
        |acc, p| acc.push(cev::gamma_x(p.companion(K_INDEX)[128], &c)),
        |a, b| a.merge(b),
    )?;
    let e = stats.estimate()?;
    Ok(CheckResult::close(
        "cev-gaussian-shift",
        e.mean,
        4.32977e-4,
        3.0 * e.std_error,
    ))
}

fn flat(bias: f64) -> Result<LocalVolSpec> {
    LocalVolSpec::constant(100.0, 1.0, 0.2, bias, 4e-4)
}

fn triangle_quote(seed: u64) -> Result<CheckResult> {
    let cfg = PnlConfig {
        mc: McConfig {
            steps: 64,
            paths: 50_000,
            seed,
        },
        ..Default::default()
    };
    let q = pnl::general_quote(
        &flat(0.01)?,
        &Payoff::Call { strike: 100.0 },
        0.01,
        QuoteMethod::Gaussian,
        &cfg,
    )?;
    let b = bs::quote(&atm()?, 0.01, QuoteMethod::Gaussian)?;
    let tol = (3.0 * (q.stats.price.std_error + q.stats.bias_se)).max(0.02 * b.mid);
    Ok(CheckResult::close(
        "triangle-general-quote",
        q.band.mid,
        b.mid,
        tol,
    ))
}

fn triangle_bootstrap(seed: u64) -> Result<[CheckResult; 2]> {
    let spec = flat(0.01)?;
    let call = Payoff::Call { strike: 100.0 };
    let id = TestFunction::identity();
    let st = pnl::pnl_functionals(
        &spec,
        &call,
        &id,
        &PnlConfig {
            mc: McConfig {
                steps: 64,
                paths: 50_000,
                seed,
            },
            ..Default::default()
        },
    )?;
    let bc = BootstrapConfig {
        draws: 40,
        hedge: McConfig {
            steps: 32,
            paths: 4_000,
            seed: derive_seed(seed, 1),
        },
        lattice: LatticeConfig {
            time_nodes: 21,
            spot_nodes: 41,
            paths: 256,
            ..Default::default()
        },
        draw_seed: derive_seed(seed, 2),
    };
    let r = pnl::parameter_bootstrap(&spec, &call, &id, &bc)?;
    Ok([
        CheckResult::close(
            "triangle-bootstrap-mean",
            r.mean,
            st.bias,
            0.2 * st.bias.abs(),
        ),
        CheckResult::close(
            "triangle-bootstrap-variance",
            r.variance,
            st.variance,
            0.2 * st.variance,
        ),
    ])
}

fn hedge_replication(seed: u64) -> Result<CheckResult> {
    let spec = flat(0.0)?;
    let s = spec.surface();
    let vol = move |t: f64, x: f64| s.vol(t, x);
    let grid = TimeGrid::uniform(1.0, 64)?;
    let lattice = LatticeConfig {
        time_nodes: 21,
        spot_nodes: 41,
        paths: 512,
        ..Default::default()
    };
    let run = pnl::hedge_simulate(
        &vol,
        &spec,
        &Payoff::Call { strike: 100.0 },
        &grid,
        5_000,
        seed,
        &lattice,
    )?;
    Ok(CheckResult::close(
        "hedge-replication",
        run.mean.mean,
        0.0,
        3.0 * run.mean.std_error,
    ))
}
