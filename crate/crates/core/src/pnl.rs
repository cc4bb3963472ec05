//! Hedging profit and loss under an uncertain local volatility surface.
//!
//! The trader's surface is `ς̂(t, x) = Σ Â_i φ_i(t, x)` with uncertain
//! coefficients. Prices and deltas are Monte Carlo estimates; their Gateaux
//! derivatives along each basis direction are central differences under
//! common random numbers, and combine into the bias and variance of the
//! expected (transformed) P&L. With zero drift these reduce to
//!
//! * `Ψ_i = Λ1_i = h'(0) ∂C/∂σ(φ_i)`,
//! * `Λ2_ij = h'(0) ∂²C/∂σ(φ_i)∂σ(φ_j) + h''(0) [∂C_i ∂C_j + ∫ E(ς̂²X² ∂Δ_i ∂Δ_j) ds]`,
//!
//! with bias `Σ Λ1_i A_i + ½ Σ Λ2_ij Γ_ij` and variance `Σ Ψ_i Ψ_j Γ_ij`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::error_calculus::{make_quote, QuoteBand, QuoteMethod, UncertainParamSet};
use crate::rng::{derive_seed, CounterRng};
use crate::sde::{
    reduce_blocks, McConfig, McEstimate, RunningStats, TimeGrid, MAX_INVALID_FRACTION,
};

type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Points per side of the lattice on which surfaces are checked against the floor.
const DOMAIN_CHECK_POINTS: usize = 100;
/// Seed salt separating the delta-lattice streams from pricing streams.
const LATTICE_STREAM: u64 = 0x6c61_7474_6963_6521;
/// Seed salt for bootstrap parameter draws.
const DRAW_STREAM: u64 = 0x6472_6177_7321_0001;
/// Seed salt for the trader's pricing paths in hedge simulations.
const PRICE_STREAM: u64 = 0x7072_6963_6521_0002;

/// A basis function `φ(t, x)` of the volatility surface with its spot derivative.
#[derive(Clone)]
pub struct BasisFn {
    name: String,
    value: Fn2,
    dx: Fn2,
}

impl fmt::Debug for BasisFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisFn").field("name", &self.name).finish()
    }
}

impl BasisFn {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        dx: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(value),
            dx: Arc::new(dx),
        }
    }

    /// `φ ≡ 1`.
    pub fn constant() -> Self {
        Self::new("1", |_, _| 1.0, |_, _| 0.0)
    }

    /// `φ(t, x) = x/x0 - 1`.
    pub fn spot_linear(x0: f64) -> Self {
        Self::new("x/x0-1", move |_, x| x / x0 - 1.0, move |_, _| 1.0 / x0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn value(&self, t: f64, x: f64) -> f64 {
        (self.value)(t, x)
    }
    pub fn dx(&self, t: f64, x: f64) -> f64 {
        (self.dx)(t, x)
    }
}

/// A concrete volatility surface `max(Σ a_i φ_i, floor)`.
#[derive(Clone, Debug)]
pub struct VolSurface {
    basis: Arc<Vec<BasisFn>>,
    coeffs: Vec<f64>,
    floor: f64,
}

impl VolSurface {
    /// Unclamped `Σ a_i φ_i(t, x)`.
    pub fn raw(&self, t: f64, x: f64) -> f64 {
        self.basis
            .iter()
            .zip(&self.coeffs)
            .map(|(b, a)| a * b.value(t, x))
            .sum()
    }

    /// Local volatility, clamped at the floor.
    #[inline]
    pub fn vol(&self, t: f64, x: f64) -> f64 {
        self.raw(t, x).max(self.floor)
    }

    /// Spot derivative of the unclamped surface.
    pub fn vol_dx(&self, t: f64, x: f64) -> f64 {
        self.basis
            .iter()
            .zip(&self.coeffs)
            .map(|(b, a)| a * b.dx(t, x))
            .sum()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// The trader's uncertain local volatility.
#[derive(Clone, Debug)]
pub struct LocalVolSpec {
    basis: Arc<Vec<BasisFn>>,
    coeffs: UncertainParamSet,
    floor: f64,
    x0: f64,
    maturity: f64,
    domain: (f64, f64),
}

impl LocalVolSpec {
    /// Checks `ς̂ ≥ floor` on a 100 × 100 lattice over
    /// `[x0 e^{-4s√T}, x0 e^{4s√T}] × [0, T]`, `s = ς̂(0, x0)`.
    pub fn new(
        basis: Vec<BasisFn>,
        coeffs: UncertainParamSet,
        floor: f64,
        x0: f64,
        maturity: f64,
    ) -> Result<Self> {
        if basis.is_empty() || basis.len() != coeffs.dim() {
            return Err(Error::input(
                "basis and coefficients must have the same nonzero length",
            ));
        }
        if !(floor > 0.0) {
            return Err(Error::input("volatility floor must be positive"));
        }
        if !(x0 > 0.0 && x0.is_finite() && maturity > 0.0 && maturity.is_finite()) {
            return Err(Error::input("spot and maturity must be positive"));
        }
        let basis = Arc::new(basis);
        let s0: f64 = basis
            .iter()
            .zip(coeffs.values())
            .map(|(b, a)| a * b.value(0.0, x0))
            .sum();
        if !(s0 >= floor) {
            return Err(Error::input(format!(
                "volatility {s0} at the initial spot is below the floor {floor}"
            )));
        }
        let half = 4.0 * s0 * maturity.sqrt();
        let spec = Self {
            basis,
            floor,
            x0,
            maturity,
            domain: (x0 * (-half).exp(), x0 * half.exp()),
            coeffs,
        };
        spec.check_floor(spec.coeffs.values())?;
        Ok(spec)
    }

    /// Single constant basis function: a flat volatility.
    pub fn constant(x0: f64, maturity: f64, vol: f64, vol_bias: f64, vol_var: f64) -> Result<Self> {
        Self::new(
            vec![BasisFn::constant()],
            UncertainParamSet::scalar(vol, vol_bias, vol_var)?,
            crate::bs::DEFAULT_VOL_FLOOR,
            x0,
            maturity,
        )
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }
    pub fn coeffs(&self) -> &UncertainParamSet {
        &self.coeffs
    }
    pub fn floor(&self) -> f64 {
        self.floor
    }
    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn maturity(&self) -> f64 {
        self.maturity
    }
    /// Spot range of the simulation domain.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }
    pub fn basis(&self) -> &[BasisFn] {
        &self.basis
    }

    /// The same spec with other coefficient estimates.
    pub fn with_coeffs(&self, coeffs: UncertainParamSet) -> Result<Self> {
        Self::new(
            self.basis.to_vec(),
            coeffs,
            self.floor,
            self.x0,
            self.maturity,
        )
    }

    fn check_floor(&self, coeffs: &[f64]) -> Result<()> {
        let (lo, hi) = self.domain;
        let m = DOMAIN_CHECK_POINTS;
        for i in 0..m {
            let t = self.maturity * i as f64 / (m - 1) as f64;
            for j in 0..m {
                let x = lo * (hi / lo).powf(j as f64 / (m - 1) as f64);
                let v: f64 = self
                    .basis
                    .iter()
                    .zip(coeffs)
                    .map(|(b, a)| a * b.value(t, x))
                    .sum();
                if !(v >= self.floor) {
                    return Err(Error::input(format!(
                        "volatility {v:.3e} at (t={t:.4}, x={x:.4}) is below the floor {}",
                        self.floor
                    )));
                }
            }
        }
        Ok(())
    }

    /// Surface at the estimated coefficients.
    pub fn surface(&self) -> VolSurface {
        VolSurface {
            basis: self.basis.clone(),
            coeffs: self.coeffs.values().to_vec(),
            floor: self.floor,
        }
    }

    /// Surface at `Â + shift`, checked against the floor on the domain.
    pub fn shifted(&self, shift: &[f64]) -> Result<VolSurface> {
        if shift.len() != self.dim() {
            return Err(Error::input("shift has the wrong dimension"));
        }
        let coeffs: Vec<f64> = self
            .coeffs
            .values()
            .iter()
            .zip(shift)
            .map(|(a, d)| a + d)
            .collect();
        self.check_floor(&coeffs)?;
        Ok(VolSurface {
            basis: self.basis.clone(),
            coeffs,
            floor: self.floor,
        })
    }

    fn bumped(&self, dirs: &[(usize, f64)]) -> Result<VolSurface> {
        let mut shift = vec![0.0; self.dim()];
        for &(i, e) in dirs {
            shift[i] += e;
        }
        self.shifted(&shift)
            .map_err(|e| Error::input(format!("{e}; use a smaller Gateaux step")))
    }

    /// Checks an arbitrary volatility function against the floor on the domain.
    pub fn check_vol_fn(&self, vol: &dyn Fn(f64, f64) -> f64) -> Result<()> {
        let (lo, hi) = self.domain;
        let m = DOMAIN_CHECK_POINTS;
        for i in 0..m {
            let t = self.maturity * i as f64 / (m - 1) as f64;
            for j in 0..m {
                let x = lo * (hi / lo).powf(j as f64 / (m - 1) as f64);
                if !(vol(t, x) >= self.floor) {
                    return Err(Error::input(format!(
                        "volatility at (t={t:.4}, x={x:.4}) is below the floor"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Terminal payoffs.
#[derive(Clone)]
pub enum Payoff {
    Call {
        strike: f64,
    },
    /// `w·ln(1 + e^{(s-K)/w})`, a call with the kink rounded over width `w`.
    SmoothCall {
        strike: f64,
        width: f64,
    },
    Power {
        exponent: f64,
    },
    Linear {
        intercept: f64,
        slope: f64,
    },
    Constant(f64),
    /// Rejected by [`Payoff::validate`]: discontinuous.
    Digital {
        strike: f64,
    },
    Custom(Fn1),
}

impl fmt::Debug for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payoff::Call { strike } => write!(f, "Call({strike})"),
            Payoff::SmoothCall { strike, width } => write!(f, "SmoothCall({strike}, {width})"),
            Payoff::Power { exponent } => write!(f, "Power({exponent})"),
            Payoff::Linear { intercept, slope } => write!(f, "Linear({intercept}, {slope})"),
            Payoff::Constant(c) => write!(f, "Constant({c})"),
            Payoff::Digital { strike } => write!(f, "Digital({strike})"),
            Payoff::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Payoff {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Payoff::Custom(Arc::new(f))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Payoff::Digital { .. } => Err(Error::input(
                "discontinuous payoffs (digitals) are not supported",
            )),
            Payoff::Call { strike } if !(strike > 0.0) => {
                Err(Error::input("strike must be positive"))
            }
            Payoff::SmoothCall { strike, width } if !(strike > 0.0 && width > 0.0) => {
                Err(Error::input("strike and smoothing width must be positive"))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Payoff::Call { strike } => (s - strike).max(0.0),
            Payoff::SmoothCall { strike, width } => {
                let z = (s - strike) / width;
                width
                    * if z > 0.0 {
                        z + (-z).exp().ln_1p()
                    } else {
                        z.exp().ln_1p()
                    }
            }
            Payoff::Power { exponent } => s.powf(*exponent),
            Payoff::Linear { intercept, slope } => intercept + slope * s,
            Payoff::Constant(c) => *c,
            Payoff::Digital { strike } => {
                if s > *strike {
                    1.0
                } else {
                    0.0
                }
            }
            Payoff::Custom(f) => f(s),
        }
    }
}

/// A test function `h` with its first two derivatives.
#[derive(Clone)]
pub struct TestFunction {
    h: Fn1,
    dh: Fn1,
    d2h: Fn1,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TestFunction(h'(0)={}, h''(0)={})",
            self.dh0(),
            self.d2h0()
        )
    }
}

impl TestFunction {
    pub fn new(
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dh: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            h: Arc::new(h),
            dh: Arc::new(dh),
            d2h: Arc::new(d2h),
        }
    }

    pub fn identity() -> Self {
        Self::new(|x| x, |_| 1.0, |_| 0.0)
    }

    /// Bounded logistic `1/(1 + e^{-(x-c)/s})`.
    pub fn logistic(center: f64, scale: f64) -> Self {
        let sig = move |x: f64| 1.0 / (1.0 + (-(x - center) / scale).exp());
        Self::new(
            sig,
            move |x| {
                let p = sig(x);
                p * (1.0 - p) / scale
            },
            move |x| {
                let p = sig(x);
                p * (1.0 - p) * (1.0 - 2.0 * p) / (scale * scale)
            },
        )
    }

    pub fn h(&self, x: f64) -> f64 {
        (self.h)(x)
    }
    pub fn h0(&self) -> f64 {
        (self.h)(0.0)
    }
    pub fn dh0(&self) -> f64 {
        (self.dh)(0.0)
    }
    pub fn d2h0(&self) -> f64 {
        (self.d2h)(0.0)
    }
}

/// Settings of the delta lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    pub time_nodes: usize,
    pub spot_nodes: usize,
    /// Conditional paths per node.
    pub paths: usize,
    /// Euler steps between consecutive time nodes.
    pub substeps: usize,
    /// Relative spot bump of the delta finite difference.
    pub spot_bump: f64,
    /// Half-width of the log-spot range in units of `ς̂(0, x0)√T`.
    pub width: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            time_nodes: 41,
            spot_nodes: 81,
            paths: 512,
            substeps: 1,
            spot_bump: 5e-3,
            width: 4.0,
        }
    }
}

/// Settings of the P&L machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnlConfig {
    pub mc: McConfig,
    /// Gateaux step in volatility units.
    pub epsilon: f64,
    pub lattice: LatticeConfig,
}

impl Default for PnlConfig {
    fn default() -> Self {
        Self {
            mc: McConfig {
                steps: 128,
                paths: 100_000,
                seed: 1,
            },
            epsilon: 1e-3,
            lattice: LatticeConfig::default(),
        }
    }
}

/// `Δ(t, x)` on a time × log-spot lattice with bilinear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaLattice {
    times: Vec<f64>,
    spots: Vec<f64>,
    /// Row-major: `values[j * spots.len() + k]`.
    values: Vec<f64>,
}

fn bracket(nodes: &[f64], v: f64) -> (usize, f64) {
    let n = nodes.len();
    if v <= nodes[0] {
        return (0, 0.0);
    }
    if v >= nodes[n - 1] {
        return (n - 2, 1.0);
    }
    let i = nodes.partition_point(|&z| z <= v) - 1;
    let i = i.min(n - 2);
    (i, (v - nodes[i]) / (nodes[i + 1] - nodes[i]))
}

impl DeltaLattice {
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn spots(&self) -> &[f64] {
        &self.spots
    }
    pub fn node(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.spots.len() + k]
    }

    /// Bilinear interpolation, clamped to the boundary outside the lattice.
    pub fn at(&self, t: f64, x: f64) -> f64 {
        let (j, wt) = bracket(&self.times, t);
        let (k, wx) = bracket(&self.spots, x);
        let v = |j: usize, k: usize| self.node(j, k);
        let lo = v(j, k) * (1.0 - wx) + v(j, k + 1) * wx;
        let hi = v(j + 1, k) * (1.0 - wx) + v(j + 1, k + 1) * wx;
        lo * (1.0 - wt) + hi * wt
    }

    fn combine(&self, other: &DeltaLattice, f: impl Fn(f64, f64) -> f64) -> DeltaLattice {
        DeltaLattice {
            times: self.times.clone(),
            spots: self.spots.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[inline]
fn euler_terminal(surface: &VolSurface, x: f64, times: &[f64], dw: &[f64], floor: f64) -> f64 {
    let mut x = x;
    for (i, &d) in dw.iter().enumerate() {
        x += x * surface.vol(times[i], x) * d;
        if x < floor {
            x = floor;
        }
    }
    x
}

fn fill_increments(rng: &mut CounterRng, grid: &TimeGrid, dw: &mut [f64]) {
    for (i, d) in dw.iter_mut().enumerate() {
        *d = rng.normal() * grid.dt(i).sqrt();
    }
}

/// CRN Monte Carlo over several surfaces: every path reuses one set of
/// increments for all surfaces, and each combination `Σ w·Φ(X_T^{(s)})` is
/// estimated with its own standard error.
pub fn mc_surfaces(
    surfaces: &[VolSurface],
    payoff: &Payoff,
    x0: f64,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
    combos: &[Vec<(usize, f64)>],
) -> Result<Vec<McEstimate>> {
    if n_paths < 2 {
        return Err(Error::input("at least two paths are required"));
    }
    let floor = crate::sde::DEFAULT_FLOOR_FRACTION * x0;
    let n = grid.steps();
    let (stats, invalid) = reduce_blocks(
        n_paths,
        || {
            (
                vec![RunningStats::new(); combos.len()],
                0usize,
                vec![0.0; n],
                vec![0.0; surfaces.len()],
            )
        },
        |(stats, invalid, dw, vals), p| {
            let mut rng = CounterRng::for_path(seed, p as u64);
            fill_increments(&mut rng, grid, dw);
            for (s, v) in surfaces.iter().zip(vals.iter_mut()) {
                *v = payoff.eval(euler_terminal(s, x0, grid.times(), dw, floor));
            }
            if vals.iter().any(|v| !v.is_finite()) {
                *invalid += 1;
                return;
            }
            for (st, combo) in stats.iter_mut().zip(combos) {
                st.push(combo.iter().map(|&(s, w)| w * vals[s]).sum());
            }
        },
        |(a, ia, _, _), (b, ib, _, _)| {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
            *ia += ib;
        },
    )
    .map(|(s, i, _, _)| (s, i))
    .expect("n_paths is positive");
    if invalid as f64 > MAX_INVALID_FRACTION * n_paths as f64 {
        return Err(Error::numeric(format!(
            "{invalid} of {n_paths} paths invalid"
        )));
    }
    stats.iter().map(|s| s.estimate()).collect()
}

/// Monte Carlo price of `payoff` under the estimated surface.
pub fn price(spec: &LocalVolSpec, payoff: &Payoff, mc: McConfig) -> Result<McEstimate> {
    payoff.validate()?;
    let grid = TimeGrid::uniform(spec.maturity, mc.steps)?;
    Ok(mc_surfaces(
        &[spec.surface()],
        payoff,
        spec.x0,
        &grid,
        mc.paths,
        mc.seed,
        &[vec![(0, 1.0)]],
    )?[0])
}

/// Delta lattices of several surfaces, all computed from one matrix of
/// conditional increments so that differences between them are smooth.
pub fn delta_lattices(
    surfaces: &[VolSurface],
    payoff: &Payoff,
    spec: &LocalVolSpec,
    cfg: &LatticeConfig,
    seed: u64,
) -> Result<Vec<DeltaLattice>> {
    if cfg.time_nodes < 2 || cfg.spot_nodes < 2 || cfg.paths < 1 || cfg.substeps < 1 {
        return Err(Error::input(
            "lattice needs at least 2 × 2 nodes, one path and one substep",
        ));
    }
    if !(cfg.spot_bump > 0.0 && cfg.spot_bump < 0.5 && cfg.width > 0.0) {
        return Err(Error::input(
            "lattice spot bump must lie in (0, 0.5) and width be positive",
        ));
    }
    let t_end = spec.maturity;
    let steps = (cfg.time_nodes - 1) * cfg.substeps;
    let grid = TimeGrid::uniform(t_end, steps)?;
    let s0 = spec.surface().vol(0.0, spec.x0);
    let half = cfg.width * s0 * t_end.sqrt();
    let spots: Vec<f64> = (0..cfg.spot_nodes)
        .map(|k| spec.x0 * (-half + 2.0 * half * k as f64 / (cfg.spot_nodes - 1) as f64).exp())
        .collect();
    let times: Vec<f64> = (0..cfg.time_nodes)
        .map(|j| grid.times()[j * cfg.substeps])
        .collect();
    let stream = derive_seed(seed, LATTICE_STREAM);
    let increments: Vec<Vec<f64>> = (0..cfg.paths)
        .map(|p| {
            let mut dw = vec![0.0; steps];
            fill_increments(&mut CounterRng::for_path(stream, p as u64), &grid, &mut dw);
            dw
        })
        .collect();
    let floor = crate::sde::DEFAULT_FLOOR_FRACTION * spec.x0;
    let h = cfg.spot_bump;
    let nodes: Vec<Vec<f64>> = (0..cfg.time_nodes * cfg.spot_nodes)
        .into_par_iter()
        .map(|node| {
            let (j, k) = (node / cfg.spot_nodes, node % cfg.spot_nodes);
            let x = spots[k];
            let (up, dn) = (x * (1.0 + h), x * (1.0 - h));
            let denom = 2.0 * x * h;
            if j + 1 == cfg.time_nodes {
                let d = (payoff.eval(up) - payoff.eval(dn)) / denom;
                return vec![d; surfaces.len()];
            }
            let start = j * cfg.substeps;
            let t = &grid.times()[start..];
            surfaces
                .iter()
                .map(|s| {
                    let mut acc = 0.0;
                    for dw in &increments {
                        let dw = &dw[start..];
                        acc += payoff.eval(euler_terminal(s, up, t, dw, floor))
                            - payoff.eval(euler_terminal(s, dn, t, dw, floor));
                    }
                    acc / (denom * cfg.paths as f64)
                })
                .collect()
        })
        .collect();
    if nodes.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite delta on the lattice"));
    }
    Ok((0..surfaces.len())
        .map(|s| DeltaLattice {
            times: times.clone(),
            spots: spots.clone(),
            values: nodes.iter().map(|v| v[s]).collect(),
        })
        .collect())
}

/// `∂Δ/∂σ(φ_i)` at time 0 and spot `x`, with its standard error.
///
/// Uses the lattice's time grid and conditional paths, so at a lattice spot
/// it reproduces the `t = 0` node of [`gateaux_delta`].
pub fn gateaux_delta_at(
    spec: &LocalVolSpec,
    payoff: &Payoff,
    i: usize,
    eps: f64,
    x: f64,
    cfg: &PnlConfig,
) -> Result<McEstimate> {
    check_direction(spec, i, eps)?;
    payoff.validate()?;
    let lc = &cfg.lattice;
    if lc.time_nodes < 2 || lc.paths < 2 || lc.substeps < 1 || !(x > 0.0) {
        return Err(Error::input("invalid lattice settings or spot"));
    }
    let grid = TimeGrid::uniform(spec.maturity, (lc.time_nodes - 1) * lc.substeps)?;
    let surfaces = [spec.bumped(&[(i, eps)])?, spec.bumped(&[(i, -eps)])?];
    let stream = derive_seed(cfg.mc.seed, LATTICE_STREAM);
    let floor = crate::sde::DEFAULT_FLOOR_FRACTION * spec.x0;
    let (up, dn) = (x * (1.0 + lc.spot_bump), x * (1.0 - lc.spot_bump));
    let scale = 1.0 / (2.0 * x * lc.spot_bump * 2.0 * eps);
    let stats = reduce_blocks(
        lc.paths,
        || (RunningStats::new(), vec![0.0; grid.steps()]),
        |(st, dw), p| {
            fill_increments(&mut CounterRng::for_path(stream, p as u64), &grid, dw);
            let d = |s: &VolSurface| {
                payoff.eval(euler_terminal(s, up, grid.times(), dw, floor))
                    - payoff.eval(euler_terminal(s, dn, grid.times(), dw, floor))
            };
            st.push((d(&surfaces[0]) - d(&surfaces[1])) * scale);
        },
        |(a, _), (b, _)| a.merge(b),
    )
    .expect("paths are positive")
    .0;
    stats.estimate()
}

/// Monte Carlo price and delta lattice under the estimated surface.
pub fn price_and_delta(
    spec: &LocalVolSpec,
    payoff: &Payoff,
    cfg: &PnlConfig,
) -> Result<(McEstimate, DeltaLattice)> {
    let c = price(spec, payoff, cfg.mc)?;
    let lattice = delta_lattices(&[spec.surface()], payoff, spec, &cfg.lattice, cfg.mc.seed)?
        .pop()
        .expect("one surface");
    Ok((c, lattice))
}

fn check_direction(spec: &LocalVolSpec, i: usize, eps: f64) -> Result<()> {
    if i >= spec.dim() {
        return Err(Error::input(format!("direction {i} outside the basis")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::input("Gateaux step must be positive"));
    }
    Ok(())
}

/// `∂C/∂σ(φ_i)` by a central difference with common random numbers.
pub fn gateaux_price(
    spec: &LocalVolSpec,
    payoff: &Payoff,
    i: usize,
    eps: f64,
    mc: McConfig,
) -> Result<McEstimate> {
    check_direction(spec, i, eps)?;
    payoff.validate()?;
    let grid = TimeGrid::uniform(spec.maturity, mc.steps)?;
    let surfaces = [spec.bumped(&[(i, eps)])?, spec.bumped(&[(i, -eps)])?];
    let w = 0.5 / eps;
    Ok(mc_surfaces(
        &surfaces,
        payoff,
        spec.x0,
        &grid,
        mc.paths,
        mc.seed,
        &[vec![(0, w), (1, -w)]],
    )?[0])
}

/// Same difference as [`gateaux_price`] but with independent random numbers
/// for the two bumped prices; only useful to measure what CRN buys.
pub fn gateaux_price_independent(
    spec: &LocalVolSpec,
    payoff: &Payoff,
    i: usize,
    eps: f64,
    mc: McConfig,
) -> Result<McEstimate> {
    check_direction(spec, i, eps)?;
    let grid = TimeGrid::uniform(spec.maturity, mc.steps)?;
    let est = |shift: f64, seed: u64| {
        mc_surfaces(
            &[spec.bumped(&[(i, shift)])?],
            payoff,
            spec.x0,
            &grid,
            mc.paths,
            seed,
            &[vec![(0, 1.0)]],
        )
        .map(|v| v[0])
    };
    let up = est(eps, mc.seed)?;
    let dn = est(-eps, derive_seed(mc.seed, 1))?;
    Ok(McEstimate {
        mean: (up.mean - dn.mean) / (2.0 * eps),
        std_error: (up.std_error.powi(2) + dn.std_error.powi(2)).sqrt() / (2.0 * eps),
        n_paths: mc.paths,
    })
}

/// `∂Δ/∂σ(φ_i)` on the lattice, from lattices of the two bumped surfaces.
pub fn gateaux_delta(
    spec: &LocalVolSpec,
    payoff: &Payoff,
    i: usize,
    eps: f64,
    cfg: &PnlConfig,
) -> Result<DeltaLattice> {
    check_direction(spec, i, eps)?;
    payoff.validate()?;
    let surfaces = [spec.bumped(&[(i, eps)])?, spec.bumped(&[(i, -eps)])?];
    let l = delta_lattices(&surfaces, payoff, spec, &cfg.lattice, cfg.mc.seed)?;
    Ok(l[0].combine(&l[1], |a, b| (a - b) / (2.0 * eps)))
}

/// The Λ/Ψ functionals and the resulting bias and variance of `E₁[h(P&L)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PnLStats {
    pub price: McEstimate,
    pub psi: Vec<f64>,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<Vec<f64>>,
    pub bias: f64,
    pub variance: f64,
    pub psi_se: Vec<f64>,
    pub lambda1_se: Vec<f64>,
    pub lambda2_se: Vec<Vec<f64>>,
    /// First-order propagation of the entry standard errors.
    pub bias_se: f64,
    pub variance_se: f64,
}

pub fn pnl_functionals(
    spec: &LocalVolSpec,
    payoff: &Payoff,
    h: &TestFunction,
    cfg: &PnlConfig,
) -> Result<PnLStats> {
    payoff.validate()?;
    let (h1, h2) = (h.dh0(), h.d2h0());
    if !h1.is_finite() || !h2.is_finite() {
        return Err(Error::input("h'(0) and h''(0) must be finite"));
    }
    let n = spec.dim();
    let eps = cfg.epsilon;
    check_direction(spec, 0, eps)?;
    let grid = TimeGrid::uniform(spec.maturity, cfg.mc.steps)?;

    // Surfaces: base, ±ε e_i, then the four corners of each pair.
    let mut surfaces = vec![spec.surface()];
    let mut up = vec![0; n];
    let mut dn = vec![0; n];
    for i in 0..n {
        up[i] = surfaces.len();
        surfaces.push(spec.bumped(&[(i, eps)])?);
        dn[i] = surfaces.len();
        surfaces.push(spec.bumped(&[(i, -eps)])?);
    }
    let mut corners = vec![vec![[0usize; 4]; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let mut c = [0usize; 4];
            for (slot, (si, sj)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
                .iter()
                .enumerate()
            {
                c[slot] = surfaces.len();
                surfaces.push(spec.bumped(&[(i, si * eps), (j, sj * eps)])?);
            }
            corners[i][j] = c;
        }
    }

    // Combinations: price, first differences, second differences.
    let mut combos = vec![vec![(0, 1.0)]];
    let w1 = 0.5 / eps;
    let w2 = 1.0 / (eps * eps);
    for i in 0..n {
        combos.push(vec![(up[i], w1), (dn[i], -w1)]);
    }
    let mut second_index = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in i..n {
            second_index[i][j] = combos.len();
            second_index[j][i] = combos.len();
            if i == j {
                combos.push(vec![(up[i], w2), (0, -2.0 * w2), (dn[i], w2)]);
            } else {
                let c = corners[i][j];
                let w = 0.25 * w2;
                combos.push(vec![(c[0], w), (c[1], -w), (c[2], -w), (c[3], w)]);
            }
        }
    }
    let est = mc_surfaces(
        &surfaces,
        payoff,
        spec.x0,
        &grid,
        cfg.mc.paths,
        cfg.mc.seed,
        &combos,
    )?;
    let price = est[0];
    let d1: Vec<McEstimate> = (0..n).map(|i| est[1 + i]).collect();
    let d2 = |i: usize, j: usize| est[second_index[i][j]];

    // Integral term, only needed when h'' does not vanish at 0.
    let integral = if h2 != 0.0 {
        Some(delta_integrals(spec, payoff, cfg, &grid)?)
    } else {
        None
    };

    let psi: Vec<f64> = d1.iter().map(|e| h1 * e.mean).collect();
    let psi_se: Vec<f64> = d1.iter().map(|e| h1.abs() * e.std_error).collect();
    let mut lambda2 = vec![vec![0.0; n]; n];
    let mut lambda2_se = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let s = d2(i, j);
            let mut v = h1 * s.mean;
            let mut se = h1.abs() * s.std_error;
            if let Some(ints) = &integral {
                let (a, b) = (d1[i], d1[j]);
                let int = ints[i][j];
                v += h2 * (a.mean * b.mean + int.mean);
                se += h2.abs()
                    * (a.mean.abs() * b.std_error + b.mean.abs() * a.std_error + int.std_error);
            }
            lambda2[i][j] = v;
            lambda2_se[i][j] = se;
        }
    }
    let p = spec.coeffs();
    let cov = p.cov();
    let bias_vec = p.bias();
    let mut bias = 0.0;
    let mut bias_se = 0.0;
    let mut variance = 0.0;
    let mut variance_se = 0.0;
    for i in 0..n {
        bias += psi[i] * bias_vec[i];
        bias_se += psi_se[i] * bias_vec[i].abs();
        for j in 0..n {
            bias += 0.5 * lambda2[i][j] * cov[i][j];
            bias_se += 0.5 * lambda2_se[i][j] * cov[i][j].abs();
            variance += psi[i] * psi[j] * cov[i][j];
            variance_se += (psi_se[i] * psi[j].abs() + psi[i].abs() * psi_se[j]) * cov[i][j].abs();
        }
    }
    Ok(PnLStats {
        price,
        lambda1: psi.clone(),
        lambda1_se: psi_se.clone(),
        psi,
        psi_se,
        lambda2,
        lambda2_se,
        bias,
        variance: variance.max(0.0),
        bias_se,
        variance_se,
    })
}

/// `∫₀ᵀ E[ς̂² X² ∂Δ_i ∂Δ_j] ds` by the trapezoid rule on the pricing grid.
fn delta_integrals(
    spec: &LocalVolSpec,
    payoff: &Payoff,
    cfg: &PnlConfig,
    grid: &TimeGrid,
) -> Result<Vec<Vec<McEstimate>>> {
    let n = spec.dim();
    let dl: Vec<DeltaLattice> = (0..n)
        .map(|i| gateaux_delta(spec, payoff, i, cfg.epsilon, cfg))
        .collect::<Result<_>>()?;
    let surface = spec.surface();
    let steps = grid.steps();
    let floor = crate::sde::DEFAULT_FLOOR_FRACTION * spec.x0;
    let seed = cfg.mc.seed;
    let stats = reduce_blocks(
        cfg.mc.paths,
        || {
            (
                vec![RunningStats::new(); n * n],
                vec![0.0; steps],
                vec![0.0; n * n],
                vec![0.0; n],
            )
        },
        |(stats, dw, sums, dd), p| {
            let mut rng = CounterRng::for_path(seed, p as u64);
            fill_increments(&mut rng, grid, dw);
            sums.iter_mut().for_each(|s| *s = 0.0);
            let times = grid.times();
            let mut x = spec.x0;
            let mut prev: Option<Vec<f64>> = None;
            for i in 0..=steps {
                let t = times[i];
                let v = surface.vol(t, x);
                for (k, d) in dd.iter_mut().enumerate() {
                    *d = dl[k].at(t, x);
                }
                let cur: Vec<f64> = (0..n * n)
                    .map(|q| v * v * x * x * dd[q / n] * dd[q % n])
                    .collect();
                if let Some(pv) = &prev {
                    let dt = grid.dt(i - 1);
                    for q in 0..n * n {
                        sums[q] += 0.5 * (pv[q] + cur[q]) * dt;
                    }
                }
                prev = Some(cur);
                if i < steps {
                    x += x * v * dw[i];
                    if x < floor {
                        x = floor;
                    }
                }
            }
            for (s, v) in stats.iter_mut().zip(sums.iter()) {
                s.push(*v);
            }
        },
        |(a, ..), (b, ..)| {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        },
    )
    .expect("paths are positive")
    .0;
    let flat: Vec<McEstimate> = stats.iter().map(|s| s.estimate()).collect::<Result<_>>()?;
    Ok((0..n).map(|i| flat[i * n..(i + 1) * n].to_vec()).collect())
}

/// The bound `1/(1 + k²)` on the probability that `E₁[h(P&L)]` exceeds
/// `threshold = h(0) + bias + k√variance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub k: f64,
    pub bound: f64,
    pub threshold: f64,
}

pub fn tail_bound(stats: &PnLStats, h: &TestFunction, k: f64) -> Result<TailBound> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::input("tail multiplier k must be at least 1"));
    }
    Ok(TailBound {
        k,
        bound: 1.0 / (1.0 + k * k),
        threshold: h.h0() + stats.bias + k * stats.variance.sqrt(),
    })
}

/// A bid/ask quote for a general payoff.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralQuote {
    pub band: QuoteBand,
    pub stats: PnLStats,
}

pub fn general_quote(
    spec: &LocalVolSpec,
    payoff: &Payoff,
    alpha: f64,
    method: QuoteMethod,
    cfg: &PnlConfig,
) -> Result<GeneralQuote> {
    let stats = pnl_functionals(spec, payoff, &TestFunction::identity(), cfg)?;
    let band = make_quote(stats.price.mean, stats.bias, stats.variance, alpha, method)?;
    Ok(GeneralQuote { band, stats })
}

/// The trader's side of a hedge: a surface, its price and its delta lattice.
#[derive(Debug, Clone)]
pub struct Hedger {
    pub surface: VolSurface,
    pub lattice: DeltaLattice,
}

impl Hedger {
    pub fn new(
        spec: &LocalVolSpec,
        surface: VolSurface,
        payoff: &Payoff,
        lattice: &LatticeConfig,
        seed: u64,
    ) -> Result<Self> {
        payoff.validate()?;
        let lattice = delta_lattices(std::slice::from_ref(&surface), payoff, spec, lattice, seed)?
            .pop()
            .expect("one surface");
        Ok(Self { surface, lattice })
    }
}

/// Terminal P&L samples of a discretely hedged short position.
#[derive(Debug, Clone, PartialEq)]
pub struct HedgeRun {
    /// Trader's Monte Carlo price.
    pub price: McEstimate,
    /// `C + Σ Δ(t_i, S_i)(S_{i+1} - S_i) - Φ(S_T)`, one per valid path.
    pub pnl: Vec<f64>,
    /// Mean P&L; its standard error includes the noise of the price.
    pub mean: McEstimate,
}

impl HedgeRun {
    pub fn sample_std(&self) -> f64 {
        let mut s = RunningStats::new();
        self.pnl.iter().for_each(|&v| s.push(v));
        s.sample_variance().sqrt()
    }
}

/// Euler path from `x0` accumulating `Σ Δ(t_i, S_i)(S_{i+1} - S_i)`;
/// returns `(S_T, gain)`.
#[inline]
fn hedged_path(
    vol: impl Fn(f64, f64) -> f64,
    lattice: &DeltaLattice,
    x0: f64,
    times: &[f64],
    dw: &[f64],
    floor: f64,
) -> (f64, f64) {
    let mut s = x0;
    let mut gain = 0.0;
    for (i, &d) in dw.iter().enumerate() {
        let next = (s + s * vol(times[i], s) * d).max(floor);
        gain += lattice.at(times[i], s) * (next - s);
        s = next;
    }
    (s, gain)
}

/// Simulates the world under `true_vol` and hedges with `hedger`.
///
/// The trader prices on an independent stream of paths under their own
/// surface, using their own hedge as a control variate:
/// `C = mean[Φ(Y_T) - Σ Δ(t_i, Y_i)(Y_{i+1} - Y_i)]`. The hedge gain has
/// zero mean, so the estimator is unbiased, and its variance is that of a
/// replication error rather than of the payoff.
pub fn hedge_run(
    true_vol: &(dyn Fn(f64, f64) -> f64 + Sync),
    hedger: &Hedger,
    payoff: &Payoff,
    x0: f64,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<HedgeRun> {
    if n_paths < 2 {
        return Err(Error::input("at least two paths are required"));
    }
    let floor = crate::sde::DEFAULT_FLOOR_FRACTION * x0;
    let n = grid.steps();
    let times = grid.times();
    let price_seed = derive_seed(seed, PRICE_STREAM);
    // Per path: (control-variate price sample, world gain, world payoff).
    let (rows, invalid) = reduce_blocks(
        n_paths,
        || (Vec::new(), 0usize, vec![0.0; n]),
        |(rows, invalid, dw), p| {
            fill_increments(&mut CounterRng::for_path(price_seed, p as u64), grid, dw);
            let (y, trader_gain) = hedged_path(
                |t, x| hedger.surface.vol(t, x),
                &hedger.lattice,
                x0,
                times,
                dw,
                floor,
            );
            let price = payoff.eval(y) - trader_gain;
            fill_increments(&mut CounterRng::for_path(seed, p as u64), grid, dw);
            let (s, gain) = hedged_path(true_vol, &hedger.lattice, x0, times, dw, floor);
            let world = payoff.eval(s);
            if price.is_finite() && gain.is_finite() && world.is_finite() {
                rows.push((price, gain, world));
            } else {
                *invalid += 1;
            }
        },
        |(a, ia, _), (mut b, ib, _)| {
            a.append(&mut b);
            *ia += ib;
        },
    )
    .map(|(r, i, _)| (r, i))
    .expect("paths are positive");
    if invalid as f64 > MAX_INVALID_FRACTION * n_paths as f64 {
        return Err(Error::numeric(format!(
            "{invalid} of {n_paths} hedge paths invalid"
        )));
    }
    let mut price = RunningStats::new();
    let mut diff = RunningStats::new();
    for &(c, g, w) in &rows {
        price.push(c);
        diff.push(c + g - w);
    }
    let price = price.estimate()?;
    let pnl = rows.iter().map(|&(_, g, w)| price.mean + g - w).collect();
    Ok(HedgeRun {
        price,
        pnl,
        mean: diff.estimate()?,
    })
}

/// Prices and delta-hedges `payoff` with the trader's estimated surface
/// while the spot follows `true_vol`.
pub fn hedge_simulate(
    true_vol: &(dyn Fn(f64, f64) -> f64 + Sync),
    spec: &LocalVolSpec,
    payoff: &Payoff,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
    lattice: &LatticeConfig,
) -> Result<HedgeRun> {
    spec.check_vol_fn(&|t, x| true_vol(t, x))?;
    if (grid.maturity() - spec.maturity).abs() > 1e-12 * spec.maturity {
        return Err(Error::input("hedging grid must end at the spec maturity"));
    }
    let hedger = Hedger::new(spec, spec.surface(), payoff, lattice, seed)?;
    hedge_run(true_vol, &hedger, payoff, spec.x0, grid, n_paths, seed)
}

/// Settings of the parameter bootstrap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    /// Number of surface draws; rounded up to an even number (antithetic pairs).
    pub draws: usize,
    /// World paths per draw (shared by every draw).
    pub hedge: McConfig,
    pub lattice: LatticeConfig,
    pub draw_seed: u64,
}

/// Empirical law of `E₁[h(P&L)]` over surfaces drawn from the coefficient law.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    /// Fraction of draws rejected because they broke the floor.
    pub truncated_fraction: f64,
}

impl BootstrapResult {
    /// Fraction of draws with value `≥ threshold`.
    pub fn exceedance(&self, threshold: f64) -> f64 {
        self.values.iter().filter(|&&v| v >= threshold).count() as f64 / self.values.len() as f64
    }
}

fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Standard normal draws in antithetic pairs, linearly whitened so their
/// sample mean is exactly zero and their sample covariance exactly the identity.
pub fn whitened_normal_draws(count: usize, dim: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let pairs = count.div_ceil(2);
    if pairs * 2 <= dim {
        return Err(Error::input("too few draws for the number of directions"));
    }
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(2 * pairs);
    for r in 0..pairs {
        let mut rng = CounterRng::for_path(seed, r as u64);
        let v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        z.push(v.iter().map(|x| -x).collect());
        z.push(v);
    }
    let m = z.len() as f64;
    let mut s = vec![vec![0.0; dim]; dim];
    for v in &z {
        for i in 0..dim {
            for j in 0..dim {
                s[i][j] += v[i] * v[j] / (m - 1.0);
            }
        }
    }
    let l = cholesky(&s).ok_or_else(|| Error::numeric("degenerate bootstrap draws"))?;
    // Solve L w = v for every draw.
    Ok(z.into_iter()
        .map(|v| {
            let mut w = vec![0.0; dim];
            for i in 0..dim {
                let acc: f64 = (0..i).map(|k| l[i][k] * w[k]).sum();
                w[i] = (v[i] - acc) / l[i][i];
            }
            w
        })
        .collect())
}

/// Draws coefficient shifts `δ ~ N(bias, cov)`, prices and hedges with
/// `ς̂ + δ` while the spot follows the estimated surface `ς̂`, and records
/// `E₁[h(P&L)]` for every draw.
pub fn parameter_bootstrap(
    spec: &LocalVolSpec,
    payoff: &Payoff,
    h: &TestFunction,
    cfg: &BootstrapConfig,
) -> Result<BootstrapResult> {
    payoff.validate()?;
    let n = spec.dim();
    let factor = spec.coeffs().cov_factor();
    let bias = spec.coeffs().bias();
    let draws = whitened_normal_draws(cfg.draws, n, derive_seed(cfg.draw_seed, DRAW_STREAM))?;
    let world = spec.surface();
    let world_vol = move |t: f64, x: f64| world.vol(t, x);
    let grid = TimeGrid::uniform(spec.maturity, cfg.hedge.steps)?;
    let mut values = Vec::with_capacity(draws.len());
    let mut truncated = 0usize;
    for w in &draws {
        let delta: Vec<f64> = (0..n)
            .map(|i| bias[i] + (0..n).map(|k| factor[i][k] * w[k]).sum::<f64>())
            .collect();
        let surface = match spec.shifted(&delta) {
            Ok(s) => s,
            Err(_) => {
                truncated += 1;
                continue;
            }
        };
        let hedger = Hedger::new(spec, surface, payoff, &cfg.lattice, cfg.hedge.seed)?;
        let run = hedge_run(
            &world_vol,
            &hedger,
            payoff,
            spec.x0,
            &grid,
            cfg.hedge.paths,
            cfg.hedge.seed,
        )?;
        let mut s = RunningStats::new();
        run.pnl.iter().for_each(|&v| s.push(h.h(v)));
        values.push(s.mean());
    }
    if values.len() < 2 {
        return Err(Error::numeric("fewer than two admissible bootstrap draws"));
    }
    let mut s = RunningStats::new();
    values.iter().for_each(|&v| s.push(v));
    Ok(BootstrapResult {
        mean: s.mean(),
        variance: s.sample_variance(),
        truncated_fraction: truncated as f64 / draws.len() as f64,
        values,
    })
}
