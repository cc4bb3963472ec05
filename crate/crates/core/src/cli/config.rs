//! Line-oriented `key = value` run specifications.
//!
//! ```text
//! # at-the-money call
//! command = price-bs
//! spot = 100
//! strike = 90, 100, 110
//! maturity = 1
//! vol = 0.2
//! vol_var = 4e-4
//! ```
//!
//! Keys are lowercase with underscores, `#` starts a comment, lists are
//! comma-separated. Every diagnostic names the offending line and key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::bs::{self, BsInputs};
use crate::cev::CevParams;
use crate::error::{Error, Result};
use crate::error_calculus::{validate_alpha, QuoteMethod, UncertainParamSet};
use crate::pnl::{BasisFn, LatticeConfig, LocalVolSpec, Payoff, TestFunction};

/// The subcommands of the front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    PriceBs,
    Smile,
    PriceCev,
    Pnl,
    HedgeSim,
    Selftest,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::PriceBs,
        Command::Smile,
        Command::PriceCev,
        Command::Pnl,
        Command::HedgeSim,
        Command::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::PriceBs => "price-bs",
            Command::Smile => "smile",
            Command::PriceCev => "price-cev",
            Command::Pnl => "pnl",
            Command::HedgeSim => "hedge-sim",
            Command::Selftest => "selftest",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        const BS: &[&str] = &[
            "spot", "strike", "maturity", "vol", "vol_bias", "vol_var", "alpha", "method",
        ];
        const SMILE: &[&str] = &[
            "spot", "strike", "maturity", "vol", "vol_bias", "vol_var", "alpha",
        ];
        const CEV: &[&str] = &[
            "spot",
            "maturity",
            "vol",
            "beta",
            "vol_bias",
            "beta_bias",
            "vol_var",
            "vol_beta_cov",
            "beta_var",
            "alpha",
            "method",
            "steps",
            "paths",
        ];
        const PNL: &[&str] = &[
            "spot",
            "strike",
            "maturity",
            "basis",
            "vol",
            "vol_bias",
            "vol_var",
            "vol_cov",
            "vol_floor",
            "payoff",
            "smooth_width",
            "exponent",
            "test_function",
            "logistic_center",
            "logistic_scale",
            "alpha",
            "method",
            "steps",
            "paths",
            "epsilon",
            "lattice_time_nodes",
            "lattice_spot_nodes",
            "lattice_paths",
            "lattice_substeps",
            "tail_k",
            "bootstrap_draws",
            "bootstrap_steps",
            "bootstrap_paths",
        ];
        const HEDGE: &[&str] = &[
            "spot",
            "strike",
            "maturity",
            "basis",
            "vol",
            "vol_bias",
            "vol_var",
            "vol_cov",
            "vol_floor",
            "payoff",
            "smooth_width",
            "exponent",
            "true_vol_scale",
            "steps",
            "paths",
            "lattice_time_nodes",
            "lattice_spot_nodes",
            "lattice_paths",
            "lattice_substeps",
        ];
        match self {
            Command::PriceBs => BS,
            Command::Smile => SMILE,
            Command::PriceCev => CEV,
            Command::Pnl => PNL,
            Command::HedgeSim => HEDGE,
            Command::Selftest => &[],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// ATM bias specification of the smile command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmileBias {
    Value(f64),
    /// Per-maturity bias that makes the ATM correction vanish.
    AtmNeutral,
}

#[derive(Debug, Clone)]
pub struct BsJob {
    pub spot: f64,
    pub strikes: Vec<f64>,
    pub maturities: Vec<f64>,
    pub vol: f64,
    pub vol_bias: f64,
    pub vol_var: f64,
    pub alpha: f64,
    pub method: QuoteMethod,
}

#[derive(Debug, Clone)]
pub struct SmileJob {
    pub spot: f64,
    pub strikes: Vec<f64>,
    pub maturities: Vec<f64>,
    pub vol: f64,
    pub vol_bias: SmileBias,
    pub vol_var: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct CevJob {
    pub spot: f64,
    pub maturity: f64,
    pub params: CevParams,
    pub alpha: f64,
    pub method: QuoteMethod,
    pub steps: usize,
    pub paths: usize,
}

#[derive(Debug, Clone)]
pub struct PnlJob {
    pub spec: LocalVolSpec,
    pub payoff: Payoff,
    pub h: TestFunction,
    pub alpha: f64,
    pub method: QuoteMethod,
    pub steps: usize,
    pub paths: usize,
    pub epsilon: f64,
    pub lattice: LatticeConfig,
    pub tail_k: Vec<f64>,
    /// Zero disables the bootstrap comparison.
    pub bootstrap_draws: usize,
    pub bootstrap_steps: usize,
    pub bootstrap_paths: usize,
}

#[derive(Debug, Clone)]
pub struct HedgeJob {
    pub spec: LocalVolSpec,
    pub payoff: Payoff,
    /// The world runs at `true_vol_scale · ς̂(t, x)`.
    pub true_vol_scale: f64,
    pub steps: usize,
    pub paths: usize,
    pub lattice: LatticeConfig,
}

#[derive(Debug, Clone)]
pub enum Job {
    PriceBs(BsJob),
    Smile(SmileJob),
    PriceCev(CevJob),
    Pnl(Box<PnlJob>),
    HedgeSim(Box<HedgeJob>),
    Selftest,
}

/// A fully validated run specification.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub job: Job,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
}

struct Raw {
    command: Command,
    entries: BTreeMap<String, Entry>,
}

fn at(line: usize, key: &str, msg: impl fmt::Display) -> Error {
    Error::input(format!("line {line}: {key}: {msg}"))
}

fn parse_f64(line: usize, key: &str, s: &str) -> Result<f64> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(at(
            line,
            key,
            format!("cannot parse `{}` as a finite number", s.trim()),
        )),
    }
}

impl Raw {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn line(&self, key: &str) -> usize {
        self.get(key).map_or(0, |e| e.line)
    }

    /// Attaches a module error to the line of `key`.
    fn blame(&self, key: &str, e: Error) -> Error {
        let msg = match e {
            Error::Input(m) | Error::Numeric(m) => m,
        };
        match self.get(key) {
            Some(entry) => at(entry.line, key, msg),
            None => Error::input(format!("{key}: {msg}")),
        }
    }

    fn missing(&self, key: &str) -> Error {
        Error::input(format!(
            "missing required key {key} for command {}",
            self.command
        ))
    }

    fn num(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|e| parse_f64(e.line, key, &e.value))
            .transpose()
    }

    fn num_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.num(key)?.unwrap_or(default))
    }

    fn req(&self, key: &str) -> Result<f64> {
        self.num(key)?.ok_or_else(|| self.missing(key))
    }

    fn positive(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let v = match default {
            Some(d) => self.num_or(key, d)?,
            None => self.req(key)?,
        };
        if !(v > 0.0) {
            return Err(at(self.line(key), key, "must be positive"));
        }
        Ok(v)
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.get(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| parse_f64(e.line, key, s))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn positive_list(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.list(key)?.ok_or_else(|| self.missing(key))?;
        if v.iter().any(|x| !(*x > 0.0)) {
            return Err(at(self.line(key), key, "all entries must be positive"));
        }
        Ok(v)
    }

    fn count(&self, key: &str, default: usize, min: usize) -> Result<usize> {
        let Some(e) = self.get(key) else {
            return Ok(default);
        };
        let v: usize = e.value.parse().map_err(|_| {
            at(
                e.line,
                key,
                format!("cannot parse `{}` as a count", e.value),
            )
        })?;
        if v < min {
            return Err(at(e.line, key, format!("must be at least {min}")));
        }
        Ok(v)
    }

    fn word(&self, key: &str) -> Option<(usize, &str)> {
        self.get(key).map(|e| (e.line, e.value.as_str()))
    }

    fn alpha(&self) -> Result<f64> {
        let a = self.num_or("alpha", 0.01)?;
        validate_alpha(a).map_err(|e| self.blame("alpha", e))?;
        Ok(a)
    }

    fn method(&self) -> Result<QuoteMethod> {
        match self.word("method") {
            None | Some((_, "gaussian")) => Ok(QuoteMethod::Gaussian),
            Some((_, "chebyshev")) => Ok(QuoteMethod::Chebyshev),
            Some((line, other)) => Err(at(
                line,
                "method",
                format!("unknown method `{other}` (expected gaussian or chebyshev)"),
            )),
        }
    }
}

/// Parses and validates a run specification.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::input(format!("line {line}: expected `key = value`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty()
            || !key
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        {
            return Err(Error::input(format!(
                "line {line}: invalid key `{key}` (lowercase letters, digits and underscores only)"
            )));
        }
        if value.is_empty() {
            return Err(at(line, key, "missing value"));
        }
        if let Some(prev) = entries.get(key) {
            return Err(at(
                line,
                key,
                format!("duplicate key (first set on line {})", prev.line),
            ));
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }

    let command = match entries.get("command") {
        None => return Err(Error::input("missing required key command")),
        Some(e) => Command::ALL
            .into_iter()
            .find(|c| c.name() == e.value)
            .ok_or_else(|| {
                let names: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
                at(
                    e.line,
                    "command",
                    format!(
                        "unknown command `{}` (expected one of {})",
                        e.value,
                        names.join(", ")
                    ),
                )
            })?,
    };
    for (key, e) in &entries {
        let common = matches!(key.as_str(), "command" | "seed" | "output");
        if !common && !command.keys().contains(&key.as_str()) {
            return Err(at(
                e.line,
                key,
                format!("unknown key for command {command}"),
            ));
        }
    }
    let raw = Raw { command, entries };

    let seed = match raw.get("seed") {
        None => DEFAULT_SEED,
        Some(e) => e.value.parse::<u64>().map_err(|_| {
            at(
                e.line,
                "seed",
                format!("cannot parse `{}` as an unsigned integer", e.value),
            )
        })?,
    };
    let output = raw.get("output").map(|e| PathBuf::from(&e.value));

    let job = match command {
        Command::PriceBs => Job::PriceBs(bs_job(&raw)?),
        Command::Smile => Job::Smile(smile_job(&raw)?),
        Command::PriceCev => Job::PriceCev(cev_job(&raw)?),
        Command::Pnl => Job::Pnl(Box::new(pnl_job(&raw)?)),
        Command::HedgeSim => Job::HedgeSim(Box::new(hedge_job(&raw)?)),
        Command::Selftest => Job::Selftest,
    };
    Ok(RunConfig {
        command,
        seed,
        output,
        job,
    })
}

/// Validates a scalar uncertain volatility, blaming `vol_var` for covariance problems.
fn scalar_vol(raw: &Raw, vol: f64, bias: f64, var: f64) -> Result<()> {
    UncertainParamSet::scalar(vol, bias, var).map_err(|e| raw.blame("vol_var", e))?;
    Ok(())
}

fn bs_job(raw: &Raw) -> Result<BsJob> {
    let spot = raw.positive("spot", None)?;
    let strikes = raw.positive_list("strike")?;
    let maturities = raw.positive_list("maturity")?;
    let vol = raw.positive("vol", None)?;
    let vol_bias = raw.num_or("vol_bias", 0.0)?;
    let vol_var = raw.num_or("vol_var", 0.0)?;
    scalar_vol(raw, vol, vol_bias, vol_var)?;
    for &k in &strikes {
        for &t in &maturities {
            BsInputs::from_scalars(spot, k, t, vol, vol_bias, vol_var)
                .map_err(|e| raw.blame("vol", e))?;
        }
    }
    Ok(BsJob {
        spot,
        strikes,
        maturities,
        vol,
        vol_bias,
        vol_var,
        alpha: raw.alpha()?,
        method: raw.method()?,
    })
}

fn smile_job(raw: &Raw) -> Result<SmileJob> {
    let spot = raw.positive("spot", None)?;
    let strikes = raw.positive_list("strike")?;
    let maturities = raw.positive_list("maturity")?;
    let vol = raw.positive("vol", None)?;
    let vol_var = raw.num_or("vol_var", 0.0)?;
    let vol_bias = match raw.word("vol_bias") {
        Some((_, "atm-neutral")) => SmileBias::AtmNeutral,
        _ => SmileBias::Value(raw.num_or("vol_bias", 0.0)?),
    };
    let b = match vol_bias {
        SmileBias::Value(b) => b,
        SmileBias::AtmNeutral => 0.0,
    };
    scalar_vol(raw, vol, b, vol_var)?;
    Ok(SmileJob {
        spot,
        strikes,
        maturities,
        vol,
        vol_bias,
        vol_var,
        alpha: raw.alpha()?,
    })
}

fn cev_job(raw: &Raw) -> Result<CevJob> {
    let spot = raw.positive("spot", None)?;
    let maturity = raw.positive("maturity", None)?;
    let vol = raw.positive("vol", None)?;
    let beta = raw.req("beta")?;
    let params = CevParams::from_scalars(
        vol,
        beta,
        raw.num_or("vol_bias", 0.0)?,
        raw.num_or("beta_bias", 0.0)?,
        raw.num_or("vol_var", 0.0)?,
        raw.num_or("vol_beta_cov", 0.0)?,
        raw.num_or("beta_var", 0.0)?,
    )
    .map_err(|e| {
        let key = if e.to_string().contains("beta") && !e.to_string().contains("covariance") {
            "beta"
        } else {
            "vol_var"
        };
        raw.blame(key, e)
    })?;
    Ok(CevJob {
        spot,
        maturity,
        params,
        alpha: raw.alpha()?,
        method: raw.method()?,
        steps: raw.count("steps", 256, 1)?,
        paths: raw.count("paths", 100_000, 2)?,
    })
}

fn lattice(raw: &Raw) -> Result<LatticeConfig> {
    let d = LatticeConfig::default();
    Ok(LatticeConfig {
        time_nodes: raw.count("lattice_time_nodes", d.time_nodes, 2)?,
        spot_nodes: raw.count("lattice_spot_nodes", d.spot_nodes, 2)?,
        paths: raw.count("lattice_paths", d.paths, 1)?,
        substeps: raw.count("lattice_substeps", d.substeps, 1)?,
        ..d
    })
}

fn local_vol(raw: &Raw) -> Result<(LocalVolSpec, Payoff)> {
    let spot = raw.positive("spot", None)?;
    let maturity = raw.positive("maturity", None)?;
    let basis: Vec<BasisFn> = match raw.get("basis") {
        None => vec![BasisFn::constant()],
        Some(e) => e
            .value
            .split(',')
            .map(|s| match s.trim() {
                "constant" => Ok(BasisFn::constant()),
                "spot_linear" => Ok(BasisFn::spot_linear(spot)),
                other => Err(at(
                    e.line,
                    "basis",
                    format!("unknown basis function `{other}` (expected constant or spot_linear)"),
                )),
            })
            .collect::<Result<_>>()?,
    };
    let n = basis.len();
    let dims = |key: &str, v: Vec<f64>, len: usize| -> Result<Vec<f64>> {
        if v.len() != len {
            return Err(at(
                raw.line(key),
                key,
                format!("expected {len} entries, found {}", v.len()),
            ));
        }
        Ok(v)
    };
    let values = dims(
        "vol",
        raw.list("vol")?.ok_or_else(|| raw.missing("vol"))?,
        n,
    )?;
    let bias = match raw.list("vol_bias")? {
        Some(v) => dims("vol_bias", v, n)?,
        None => vec![0.0; n],
    };
    let (cov_key, cov) = match (raw.list("vol_var")?, raw.list("vol_cov")?) {
        (Some(_), Some(_)) => {
            return Err(at(
                raw.line("vol_cov"),
                "vol_cov",
                "give either vol_var or vol_cov, not both",
            ))
        }
        (Some(d), None) => {
            let d = dims("vol_var", d, n)?;
            let cov = (0..n)
                .map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect())
                .collect();
            ("vol_var", cov)
        }
        (None, Some(c)) => {
            let c = dims("vol_cov", c, n * n)?;
            ("vol_cov", c.chunks(n).map(<[f64]>::to_vec).collect())
        }
        (None, None) => ("vol_var", vec![vec![0.0; n]; n]),
    };
    let params = UncertainParamSet::new(values, bias, cov).map_err(|e| raw.blame(cov_key, e))?;
    let floor = raw.positive("vol_floor", Some(bs::DEFAULT_VOL_FLOOR))?;
    let spec =
        LocalVolSpec::new(basis, params, floor, spot, maturity).map_err(|e| raw.blame("vol", e))?;

    let strike = || raw.positive("strike", None);
    let payoff = match raw.word("payoff").map_or("call", |w| w.1) {
        "call" => Payoff::Call { strike: strike()? },
        "smooth-call" => Payoff::SmoothCall {
            strike: strike()?,
            width: raw.positive("smooth_width", Some(1.0))?,
        },
        "power" => Payoff::Power {
            exponent: raw.num_or("exponent", 2.0)?,
        },
        "linear" => Payoff::Linear {
            intercept: 0.0,
            slope: 1.0,
        },
        "digital" => Payoff::Digital { strike: strike()? },
        other => {
            return Err(at(
                raw.line("payoff"),
                "payoff",
                format!("unknown payoff `{other}` (expected call, smooth-call, power, linear)"),
            ))
        }
    };
    payoff.validate().map_err(|e| raw.blame("payoff", e))?;
    Ok((spec, payoff))
}

fn pnl_job(raw: &Raw) -> Result<PnlJob> {
    let (spec, payoff) = local_vol(raw)?;
    let h = match raw.word("test_function").map_or("identity", |w| w.1) {
        "identity" => TestFunction::identity(),
        "logistic" => TestFunction::logistic(
            raw.num_or("logistic_center", 1.0)?,
            raw.positive("logistic_scale", Some(1.0))?,
        ),
        other => {
            return Err(at(
                raw.line("test_function"),
                "test_function",
                format!("unknown test function `{other}` (expected identity or logistic)"),
            ))
        }
    };
    let tail_k = raw.list("tail_k")?.unwrap_or_else(|| vec![1.0, 2.0, 3.0]);
    if tail_k.iter().any(|k| !(*k >= 1.0)) {
        return Err(at(
            raw.line("tail_k"),
            "tail_k",
            "tail multipliers must be at least 1",
        ));
    }
    let bootstrap_draws = raw.count("bootstrap_draws", 0, 0)?;
    if bootstrap_draws == 1 || (bootstrap_draws > 0 && bootstrap_draws <= spec.dim()) {
        return Err(at(
            raw.line("bootstrap_draws"),
            "bootstrap_draws",
            "need more draws than basis functions",
        ));
    }
    Ok(PnlJob {
        spec,
        payoff,
        h,
        alpha: raw.alpha()?,
        method: raw.method()?,
        steps: raw.count("steps", 128, 1)?,
        paths: raw.count("paths", 100_000, 2)?,
        epsilon: raw.positive("epsilon", Some(1e-3))?,
        lattice: lattice(raw)?,
        tail_k,
        bootstrap_draws,
        bootstrap_steps: raw.count("bootstrap_steps", 64, 1)?,
        bootstrap_paths: raw.count("bootstrap_paths", 10_000, 2)?,
    })
}

fn hedge_job(raw: &Raw) -> Result<HedgeJob> {
    let (spec, payoff) = local_vol(raw)?;
    Ok(HedgeJob {
        spec,
        payoff,
        true_vol_scale: raw.positive("true_vol_scale", Some(1.0))?,
        steps: raw.count("steps", 128, 1)?,
        paths: raw.count("paths", 20_000, 2)?,
        lattice: lattice(raw)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BS: &str = "command = price-bs\nspot = 100\nstrike = 100\nmaturity = 1\nvol = 0.2\nvol_bias = 0\nvol_var = 4e-4\nalpha = 0.01\nmethod = gaussian";

    fn err(text: &str) -> String {
        parse_config(text).unwrap_err().to_string()
    }

    #[test]
    fn happy_path() {
        let c = parse_config(BS).unwrap();
        assert_eq!(c.command, Command::PriceBs);
        assert_eq!(c.seed, DEFAULT_SEED);
        let Job::PriceBs(j) = c.job else { panic!() };
        assert_eq!(j.strikes, vec![100.0]);
        assert_eq!(j.vol_var, 4e-4);
        assert_eq!(j.method, QuoteMethod::Gaussian);
    }

    #[test]
    fn diagnostics_name_line_and_key() {
        let e = err(&BS.replace("alpha = 0.01", "alpha = 0.7"));
        assert!(
            e.contains("line 8") && e.contains("alpha must lie in (0, 0.5)"),
            "{e}"
        );
        let e = err(&BS.replace("vol_var = 4e-4", "vol_var = -1e-4"));
        assert!(
            e.contains("line 7") && e.contains("vol_var") && e.contains("semi-definite"),
            "{e}"
        );
        let e = err(&format!("{BS}\nspot = 101"));
        assert!(
            e.contains("line 10") && e.contains("duplicate") && e.contains("line 2"),
            "{e}"
        );
        let e = err(&format!("{BS}\nvolatility = 1"));
        assert!(e.contains("line 10") && e.contains("unknown key"), "{e}");
        let e = err(&BS.replace("spot = 100", "spot = 1o0"));
        assert!(
            e.contains("line 2") && e.contains("spot") && e.contains("1o0"),
            "{e}"
        );
        let e = err(&format!("{BS}\nbeta = 0.5"));
        assert!(e.contains("unknown key for command price-bs"), "{e}");
        let e = err(&BS.replace("spot = 100\n", ""));
        assert!(e.contains("missing required key spot"), "{e}");
    }

    #[test]
    fn comments_lists_and_seed() {
        let c = parse_config(
            "# smile run\ncommand = smile # trailing\n\nspot = 100\nstrike = 90, 100 ,110\nmaturity = 0.25,1\nvol = 0.2\nvol_var = 4e-4\nvol_bias = atm-neutral\nseed = 42\noutput = out.csv",
        )
        .unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.output, Some(PathBuf::from("out.csv")));
        let Job::Smile(j) = c.job else { panic!() };
        assert_eq!(j.strikes, vec![90.0, 100.0, 110.0]);
        assert_eq!(j.vol_bias, SmileBias::AtmNeutral);
    }

    #[test]
    fn pnl_payoffs_and_bases() {
        let base =
            "command = pnl\nspot = 100\nstrike = 100\nmaturity = 1\nvol = 0.2\nvol_var = 4e-4\n";
        assert!(parse_config(base).is_ok());
        let e = err(&format!("{base}payoff = digital"));
        assert!(e.contains("line 7") && e.contains("discontinuous"), "{e}");
        let two = "command = pnl\nspot = 100\nstrike = 100\nmaturity = 1\nbasis = constant, spot_linear\nvol = 0.2, 0.05\nvol_cov = 4e-4, 0, 0, 1e-3\n";
        let c = parse_config(two).unwrap();
        let Job::Pnl(j) = c.job else { panic!() };
        assert_eq!(j.spec.dim(), 2);
        let e = err(&two.replace("vol = 0.2, 0.05", "vol = 0.2"));
        assert!(
            e.contains("line 6") && e.contains("expected 2 entries"),
            "{e}"
        );
        let e = err(
            "command = hedge-sim\nspot = 100\nstrike = 100\nmaturity = 1\nvol = 0.2\nbasis = cubic",
        );
        assert!(e.contains("line 6") && e.contains("cubic"), "{e}");
    }
}
