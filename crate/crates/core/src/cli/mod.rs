//! Configuration-file driven command-line front end.
//!
//! `uncertain-pricing <config> [--output <csv>] [--seed <u64>]` parses the
//! config (see [`config`]), runs the command, prints a summary table and
//! writes a CSV when an output path is set. Exit status: 0 on success, 1 on
//! input errors, 2 on numerical failures or failed self-test checks.

pub mod config;
mod selftest;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Parser;

use crate::bs::{self, BsInputs};
use crate::cev::power_option_quote;
use crate::error::{Error, Result};
use crate::error_calculus::{QuoteBand, UncertainParamSet};
use crate::pnl::{self, BootstrapConfig, PnlConfig};
use crate::rng::derive_seed;
use crate::sde::{fmt17, McConfig, TimeGrid};

pub use config::{parse_config, Command, Job, RunConfig, DEFAULT_SEED};
pub use selftest::{run_selftest, CheckResult};

/// A CSV table: header row plus data rows, rendered with LF line endings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Outcome of a command: a human-readable summary and an optional CSV.
#[derive(Debug, Clone)]
pub struct Report {
    pub summary: String,
    pub csv: CsvTable,
    /// False only when a self-test check failed.
    pub passed: bool,
}

fn f(v: f64) -> String {
    fmt17(v)
}

fn band_cells(q: &QuoteBand) -> Vec<String> {
    vec![f(q.bid), f(q.mid), f(q.ask), f(q.spread)]
}

/// Runs a validated configuration.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let mut summary = String::new();
    let mut passed = true;
    let csv = match &cfg.job {
        Job::PriceBs(j) => {
            let mut t = CsvTable::new(&[
                "strike", "maturity", "price", "bias", "variance", "bid", "mid", "ask", "spread",
            ]);
            let _ = writeln!(
                summary,
                "{:>10} {:>8} {:>12} {:>12} {:>12} {:>12}",
                "strike", "T", "bid", "mid", "ask", "spread"
            );
            for &mat in &j.maturities {
                for &k in &j.strikes {
                    let inputs =
                        BsInputs::from_scalars(j.spot, k, mat, j.vol, j.vol_bias, j.vol_var)?;
                    let q = bs::quote(&inputs, j.alpha, j.method)?;
                    let _ = writeln!(
                        summary,
                        "{k:>10.4} {mat:>8.4} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                        q.bid, q.mid, q.ask, q.spread
                    );
                    let mut row = vec![
                        f(k),
                        f(mat),
                        f(q.center),
                        f(q.bias_term),
                        f(bs::variance_correction(&inputs)),
                    ];
                    row.extend(band_cells(&q));
                    t.push(row);
                }
            }
            t
        }
        Job::Smile(j) => {
            let cells = match j.vol_bias {
                config::SmileBias::AtmNeutral => bs::smile_surface_atm_neutral(
                    j.spot,
                    &j.strikes,
                    &j.maturities,
                    j.vol,
                    j.vol_var,
                    j.alpha,
                )?,
                config::SmileBias::Value(b) => {
                    let vol = UncertainParamSet::scalar(j.vol, b, j.vol_var)?;
                    bs::smile_surface(j.spot, &j.strikes, &j.maturities, &vol, j.alpha)?
                }
            };
            let mut t = CsvTable::new(&["strike", "maturity", "bid", "mid", "ask", "implied_vol"]);
            let _ = writeln!(summary, "implied volatility of the mid quote");
            let _ = write!(summary, "{:>8}", "T \\ K");
            for k in &j.strikes {
                let _ = write!(summary, " {k:>12.4}");
            }
            for (i, c) in cells.iter().enumerate() {
                if i % j.strikes.len() == 0 {
                    let _ = write!(summary, "\n{:>8.4}", c.maturity);
                }
                match c.implied_vol {
                    Some(v) => {
                        let _ = write!(summary, " {v:>12.8}");
                    }
                    None => {
                        let _ = write!(summary, " {:>12}", "-");
                    }
                }
                t.push(vec![
                    f(c.strike),
                    f(c.maturity),
                    f(c.bid),
                    f(c.mid),
                    f(c.ask),
                    c.implied_vol.map_or_else(String::new, f),
                ]);
            }
            summary.push('\n');
            t
        }
        Job::PriceCev(j) => {
            let mc = McConfig {
                steps: j.steps,
                paths: j.paths,
                seed: cfg.seed,
            };
            let q = power_option_quote(&j.params, j.spot, j.maturity, j.alpha, j.method, mc)?;
            let s = &q.stats;
            let _ = writeln!(
                summary,
                "E[X_T^2] = {:.6} ± {:.6}   A = {:.6e}   E[Gamma[X^2]] = {:.6e}   Gamma[E X^2] = {:.6e}",
                s.second_moment.mean, s.second_moment.std_error, s.bias.mean, s.gamma.mean, s.gamma_of_mean
            );
            let _ = writeln!(
                summary,
                "{:>20} {:>12} {:>12} {:>12} {:>12}",
                "reading", "bid", "mid", "ask", "spread"
            );
            let mut t = CsvTable::new(&[
                "reading", "center", "bias", "variance", "bid", "mid", "ask", "spread",
            ]);
            for (name, band, var) in [
                ("as_stated", &q.as_stated, s.gamma.mean),
                ("theorem_consistent", &q.theorem_consistent, s.gamma_of_mean),
            ] {
                let _ = writeln!(
                    summary,
                    "{name:>20} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                    band.bid, band.mid, band.ask, band.spread
                );
                let mut row = vec![name.to_string(), f(band.center), f(band.bias_term), f(var)];
                row.extend(band_cells(band));
                t.push(row);
            }
            if s.report.flagged > 0 {
                let _ = writeln!(
                    summary,
                    "warning: {} paths came close to the floor",
                    s.report.flagged
                );
            }
            t
        }
        Job::Pnl(j) => {
            let pc = PnlConfig {
                mc: McConfig {
                    steps: j.steps,
                    paths: j.paths,
                    seed: cfg.seed,
                },
                epsilon: j.epsilon,
                lattice: j.lattice,
            };
            let st = pnl::pnl_functionals(&j.spec, &j.payoff, &j.h, &pc)?;
            let mut t = CsvTable::new(&["quantity", "value", "std_error"]);
            let mut put = |name: String, v: f64, se: f64| {
                let _ = writeln!(summary, "{name:>16} {v:>14.6e} ± {se:.2e}");
                t.push(vec![name, f(v), f(se)]);
            };
            put("price".into(), st.price.mean, st.price.std_error);
            put("bias".into(), st.bias, st.bias_se);
            put("variance".into(), st.variance, st.variance_se);
            let n = st.psi.len();
            for i in 0..n {
                put(format!("psi_{i}"), st.psi[i], st.psi_se[i]);
            }
            for i in 0..n {
                for k in 0..n {
                    put(
                        format!("lambda2_{i}_{k}"),
                        st.lambda2[i][k],
                        st.lambda2_se[i][k],
                    );
                }
            }
            let h_is_identity = j.h.h(1.5) == 1.5 && j.h.h(-2.0) == -2.0;
            if h_is_identity {
                let q = crate::error_calculus::make_quote(
                    st.price.mean,
                    st.bias,
                    st.variance,
                    j.alpha,
                    j.method,
                )?;
                for (name, v) in [
                    ("bid", q.bid),
                    ("mid", q.mid),
                    ("ask", q.ask),
                    ("spread", q.spread),
                ] {
                    put(name.into(), v, f64::NAN);
                }
            }
            let bounds: Vec<_> = j
                .tail_k
                .iter()
                .map(|&k| pnl::tail_bound(&st, &j.h, k))
                .collect::<Result<_>>()?;
            for b in &bounds {
                put(format!("tail_threshold_k{}", b.k), b.threshold, f64::NAN);
                put(format!("tail_bound_k{}", b.k), b.bound, f64::NAN);
            }
            if j.bootstrap_draws > 0 {
                let bc = BootstrapConfig {
                    draws: j.bootstrap_draws,
                    hedge: McConfig {
                        steps: j.bootstrap_steps,
                        paths: j.bootstrap_paths,
                        seed: derive_seed(cfg.seed, 1),
                    },
                    lattice: j.lattice,
                    draw_seed: derive_seed(cfg.seed, 2),
                };
                let r = pnl::parameter_bootstrap(&j.spec, &j.payoff, &j.h, &bc)?;
                put("bootstrap_mean".into(), r.mean - j.h.h0(), f64::NAN);
                put("bootstrap_variance".into(), r.variance, f64::NAN);
                put("bootstrap_truncated".into(), r.truncated_fraction, f64::NAN);
                for b in &bounds {
                    put(
                        format!("bootstrap_exceedance_k{}", b.k),
                        r.exceedance(b.threshold),
                        f64::NAN,
                    );
                }
            }
            t
        }
        Job::HedgeSim(j) => {
            let trader = j.spec.surface();
            let scale = j.true_vol_scale;
            let vol = move |t: f64, x: f64| scale * trader.vol(t, x);
            let grid = TimeGrid::uniform(j.spec.maturity(), j.steps)?;
            let run = pnl::hedge_simulate(
                &vol, &j.spec, &j.payoff, &grid, j.paths, cfg.seed, &j.lattice,
            )?;
            let _ = writeln!(
                summary,
                "trader price     {:.6} ± {:.2e}",
                run.price.mean, run.price.std_error
            );
            let _ = writeln!(
                summary,
                "mean P&L         {:.6} ± {:.2e}",
                run.mean.mean, run.mean.std_error
            );
            let _ = writeln!(summary, "P&L std          {:.6}", run.sample_std());
            let _ = writeln!(summary, "paths            {}", run.pnl.len());
            let mut t = CsvTable::new(&["path_id", "pnl"]);
            for (i, v) in run.pnl.iter().enumerate() {
                t.push(vec![i.to_string(), f(*v)]);
            }
            t
        }
        Job::Selftest => {
            let checks = run_selftest(cfg.seed);
            let mut t = CsvTable::new(&["check", "passed", "value", "reference", "tolerance"]);
            for c in &checks {
                let _ = writeln!(
                    summary,
                    "{} {:<28} value {:.6e}  reference {:.6e}  tolerance {:.1e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.reference,
                    c.tolerance
                );
                passed &= c.passed;
                t.push(vec![
                    c.name.to_string(),
                    c.passed.to_string(),
                    f(c.value),
                    f(c.reference),
                    f(c.tolerance),
                ]);
            }
            let n_pass = checks.iter().filter(|c| c.passed).count();
            let _ = writeln!(summary, "{n_pass}/{} checks passed", checks.len());
            t
        }
    };
    Ok(Report {
        summary,
        csv,
        passed,
    })
}

/// Exit status for an error: 1 for bad input, 2 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_input() {
        1
    } else {
        2
    }
}

/// Executes `cfg`, prints the summary and writes the CSV; returns the exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    let report = match execute(cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {} failed: {e}", cfg.command);
            return exit_code(&e);
        }
    };
    print!("{}", report.summary);
    if let Some(path) = &cfg.output {
        if let Err(e) = std::fs::write(path, report.csv.render()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    if report.passed {
        0
    } else {
        2
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "uncertain-pricing",
    version,
    about = "Option quotes under volatility-estimation uncertainty"
)]
struct Args {
    /// Run specification (`key = value` lines).
    config: PathBuf,
    /// CSV destination, overriding the config's `output`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Random seed, overriding the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

/// Entry point of the binary; returns the process exit status.
pub fn main() -> i32 {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return 1;
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", args.config.display());
            return exit_code(&e);
        }
    };
    if let Some(o) = args.output {
        cfg.output = Some(o);
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    run(&cfg)
}
