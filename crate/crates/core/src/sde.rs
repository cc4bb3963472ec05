//! Euler-Maruyama engine for driftless diffusions `dX = b(t, X) dW` with
//! companion processes driven by the same Brownian increments.
//!
//! Every path draws its increments from its own counter-based stream, and
//! paths are processed in fixed-size blocks whose partial results are merged
//! in block order. Output is therefore bit-identical for a given
//! `(seed, grid, n_paths)` whatever the number of rayon workers.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::CounterRng;

/// Paths per deterministic work unit.
pub const BLOCK_SIZE: usize = 256;
/// Largest fraction of invalid paths tolerated before a run fails.
pub const MAX_INVALID_FRACTION: f64 = 0.01;
/// Default positivity floor as a fraction of `x0`.
pub const DEFAULT_FLOOR_FRACTION: f64 = 1e-8;

/// Simulation times `0 = t_0 < t_1 < ... < t_n = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// `n` equal steps on `[0, maturity]`.
    pub fn uniform(maturity: f64, n: usize) -> Result<Self> {
        if !(maturity > 0.0 && maturity.is_finite()) {
            return Err(Error::input("maturity must be positive"));
        }
        if n == 0 {
            return Err(Error::input("steps must be at least 1"));
        }
        let dt = maturity / n as f64;
        let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        times[n] = maturity;
        Ok(Self { times })
    }

    /// Arbitrary grid; must start at 0 and increase strictly.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times[0] != 0.0 {
            return Err(Error::input(
                "time grid must start at 0 and have at least one step",
            ));
        }
        if times
            .windows(2)
            .any(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(Error::input("time grid must be strictly increasing"));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }
    pub fn maturity(&self) -> f64 {
        self.times[self.times.len() - 1]
    }
    pub fn dt(&self, step: usize) -> f64 {
        self.times[step + 1] - self.times[step]
    }
}

/// Diffusion coefficient `b(t, x)` of a driftless SDE.
pub trait Diffusion: Sync {
    fn coeff(&self, t: f64, x: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64 + Sync> Diffusion for F {
    fn coeff(&self, t: f64, x: f64) -> f64 {
        self(t, x)
    }
}

/// Everything a companion sees when advancing over one step.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub dw: f64,
    /// State at the left end of the step.
    pub x: f64,
    /// State at the right end of the step (after flooring).
    pub x_next: f64,
    /// All companion values at the left end, in registration order.
    pub companions: &'a [f64],
}

/// A process advanced alongside the state with the same increments.
pub trait Companion: Send + Sync {
    fn name(&self) -> &str;
    fn initial(&self, x0: f64) -> f64;
    /// Value at the right end of the step; `own` is this companion's left value.
    fn step(&self, ctx: &StepContext<'_>, own: f64) -> f64;
    /// Whether a freshly computed value is acceptable.
    fn is_valid(&self, value: f64) -> bool {
        value.is_finite()
    }
}

/// Doléans-Dade exponential `dM = M g(t, X) dW`, advanced in log form so
/// that it stays positive.
pub struct DoleansCompanion<G> {
    name: String,
    g: G,
}

impl<G: Fn(f64, f64) -> f64 + Send + Sync> DoleansCompanion<G> {
    pub fn new(name: impl Into<String>, g: G) -> Self {
        Self {
            name: name.into(),
            g,
        }
    }
}

const LOG_BOUND: f64 = 700.0;

impl<G: Fn(f64, f64) -> f64 + Send + Sync> Companion for DoleansCompanion<G> {
    fn name(&self) -> &str {
        &self.name
    }
    fn initial(&self, _x0: f64) -> f64 {
        1.0
    }
    fn step(&self, ctx: &StepContext<'_>, own: f64) -> f64 {
        let g = (self.g)(ctx.t, ctx.x);
        own * (g * ctx.dw - 0.5 * g * g * ctx.dt).exp()
    }
    fn is_valid(&self, value: f64) -> bool {
        value.is_finite() && value > 0.0 && value.ln().abs() <= LOG_BOUND
    }
}

/// Doléans factor of a given volatility path on a grid of increments.
///
/// `g[i]` is the sensitivity volatility at the left end of step `i`.
pub fn doleans_factor(g: &[f64], grid: &TimeGrid, dw: &[f64]) -> Result<Vec<f64>> {
    let n = grid.steps();
    if g.len() < n || dw.len() != n {
        return Err(Error::input(
            "volatility and increments must cover every step",
        ));
    }
    let mut log_m = 0.0f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    for i in 0..n {
        log_m += g[i] * dw[i] - 0.5 * g[i] * g[i] * grid.dt(i);
        if !(log_m.abs() <= LOG_BOUND) {
            return Err(Error::numeric(format!(
                "Doléans factor overflow at step {i}"
            )));
        }
        out.push(log_m.exp());
    }
    Ok(out)
}

/// Positivity policy: states below `floor` are clamped to it; paths that
/// go below `flag_below` are flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floor {
    pub floor: f64,
    pub flag_below: f64,
}

impl Floor {
    pub fn for_spot(x0: f64) -> Self {
        let floor = DEFAULT_FLOOR_FRACTION * x0;
        Self {
            floor,
            flag_below: floor,
        }
    }
}

/// One simulated path with its companions and the increments that drove it.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    pub index: u64,
    pub seed: u64,
    pub x: Vec<f64>,
    /// `companions[c][i]`: companion `c` at grid time `i`.
    pub companions: Vec<Vec<f64>>,
    pub dw: Vec<f64>,
    pub flagged: bool,
}

/// Borrowed view of a path handed to reducers.
#[derive(Debug, Clone, Copy)]
pub struct PathView<'a> {
    pub index: u64,
    pub seed: u64,
    pub x: &'a [f64],
    pub companions: &'a [Vec<f64>],
    pub dw: &'a [f64],
    pub flagged: bool,
}

impl<'a> PathView<'a> {
    pub fn terminal(&self) -> f64 {
        self.x[self.x.len() - 1]
    }
    pub fn companion(&self, c: usize) -> &'a [f64] {
        &self.companions[c]
    }
}

impl PathBundle {
    pub fn view(&self) -> PathView<'_> {
        PathView {
            index: self.index,
            seed: self.seed,
            x: &self.x,
            companions: &self.companions,
            dw: &self.dw,
            flagged: self.flagged,
        }
    }
}

/// Path accounting of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunReport {
    pub n_paths: usize,
    pub invalid: usize,
    pub flagged: usize,
}

impl RunReport {
    pub(crate) fn merge(&mut self, other: RunReport) {
        self.n_paths += other.n_paths;
        self.invalid += other.invalid;
        self.flagged += other.flagged;
    }

    pub fn valid(&self) -> usize {
        self.n_paths - self.invalid
    }

    pub fn flagged_fraction(&self) -> f64 {
        self.flagged as f64 / self.n_paths.max(1) as f64
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.invalid as f64 > MAX_INVALID_FRACTION * self.n_paths as f64 {
            return Err(Error::numeric(format!(
                "{} of {} paths invalid (non-finite state or companion)",
                self.invalid, self.n_paths
            )));
        }
        Ok(())
    }
}

/// All retained paths of a run.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub grid: TimeGrid,
    pub names: Vec<String>,
    pub paths: Vec<PathBundle>,
    pub report: RunReport,
}

/// A diffusion with its companions, ready to be simulated.
pub struct Simulator<'a, D: Diffusion> {
    model: &'a D,
    companions: Vec<Box<dyn Companion + 'a>>,
    x0: f64,
    grid: TimeGrid,
    floor: Floor,
}

struct Scratch {
    x: Vec<f64>,
    comps: Vec<Vec<f64>>,
    dw: Vec<f64>,
    left: Vec<f64>,
}

impl<'a, D: Diffusion> Simulator<'a, D> {
    pub fn new(model: &'a D, x0: f64, grid: TimeGrid) -> Result<Self> {
        if !(x0 > 0.0 && x0.is_finite()) {
            return Err(Error::input("x0 must be positive"));
        }
        Ok(Self {
            model,
            companions: Vec::new(),
            x0,
            grid,
            floor: Floor::for_spot(x0),
        })
    }

    pub fn with_companion(mut self, c: impl Companion + 'a) -> Self {
        self.companions.push(Box::new(c));
        self
    }

    pub fn with_boxed_companion(mut self, c: Box<dyn Companion + 'a>) -> Self {
        self.companions.push(c);
        self
    }

    pub fn with_floor(mut self, floor: Floor) -> Self {
        self.floor = floor;
        self
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn companion_names(&self) -> Vec<String> {
        self.companions
            .iter()
            .map(|c| c.name().to_string())
            .collect()
    }

    fn scratch(&self) -> Scratch {
        let n = self.grid.steps();
        Scratch {
            x: vec![0.0; n + 1],
            comps: vec![vec![0.0; n + 1]; self.companions.len()],
            dw: vec![0.0; n],
            left: vec![0.0; self.companions.len()],
        }
    }

    /// Runs one path into `s`; returns `(valid, flagged)`.
    fn run_path(&self, rng: &mut CounterRng, s: &mut Scratch) -> (bool, bool) {
        let n = self.grid.steps();
        let times = self.grid.times();
        for (i, dw) in s.dw.iter_mut().enumerate() {
            *dw = rng.normal() * self.grid.dt(i).sqrt();
        }
        s.x[0] = self.x0;
        for (c, comp) in self.companions.iter().enumerate() {
            s.comps[c][0] = comp.initial(self.x0);
        }
        let mut flagged = false;
        for i in 0..n {
            let x = s.x[i];
            let dw = s.dw[i];
            let mut x_next = x + self.model.coeff(times[i], x) * dw;
            if !x_next.is_finite() {
                return (false, flagged);
            }
            if x_next < self.floor.flag_below {
                flagged = true;
            }
            if x_next < self.floor.floor {
                x_next = self.floor.floor;
            }
            s.x[i + 1] = x_next;
            if self.companions.is_empty() {
                continue;
            }
            for c in 0..self.companions.len() {
                s.left[c] = s.comps[c][i];
            }
            let ctx = StepContext {
                step: i,
                t: times[i],
                dt: self.grid.dt(i),
                dw,
                x,
                x_next,
                companions: &s.left,
            };
            for (c, comp) in self.companions.iter().enumerate() {
                let v = comp.step(&ctx, s.left[c]);
                if !comp.is_valid(v) {
                    return (false, flagged);
                }
                s.comps[c][i + 1] = v;
            }
        }
        (true, flagged)
    }

    /// Streams every valid path through `fold`, one accumulator per block,
    /// and merges the block accumulators in block order.
    pub fn simulate_reduce<A, I, F, M>(
        &self,
        n_paths: usize,
        master_seed: u64,
        init: I,
        fold: F,
        merge: M,
    ) -> Result<(A, RunReport)>
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &PathView<'_>) + Sync,
        M: Fn(&mut A, A),
    {
        if n_paths == 0 {
            return Err(Error::input("at least one path is required"));
        }
        let (acc, report) = reduce_blocks(
            n_paths,
            || (init(), RunReport::default(), self.scratch()),
            |(acc, report, s), index| {
                let mut rng = CounterRng::for_path(master_seed, index as u64);
                let (valid, flagged) = self.run_path(&mut rng, s);
                report.n_paths += 1;
                if !valid {
                    report.invalid += 1;
                    return;
                }
                if flagged {
                    report.flagged += 1;
                }
                let view = PathView {
                    index: index as u64,
                    seed: rng.seed(),
                    x: &s.x,
                    companions: &s.comps,
                    dw: &s.dw,
                    flagged,
                };
                fold(acc, &view);
            },
            |(acc, report, _), (a, r, _)| {
                merge(acc, a);
                report.merge(r);
            },
        )
        .map(|(acc, report, _)| (acc, report))
        .expect("n_paths is positive");
        report.check()?;
        Ok((acc, report))
    }

    /// Simulates and keeps every valid path. Memory grows with
    /// `n_paths × steps`; prefer [`Self::simulate_reduce`] for large runs.
    pub fn simulate(&self, n_paths: usize, master_seed: u64) -> Result<Simulation> {
        let (paths, report) = self.simulate_reduce(
            n_paths,
            master_seed,
            Vec::new,
            |acc: &mut Vec<PathBundle>, p| {
                acc.push(PathBundle {
                    index: p.index,
                    seed: p.seed,
                    x: p.x.to_vec(),
                    companions: p.companions.to_vec(),
                    dw: p.dw.to_vec(),
                    flagged: p.flagged,
                })
            },
            |acc, mut other| acc.append(&mut other),
        )?;
        Ok(Simulation {
            grid: self.grid.clone(),
            names: self.companion_names(),
            paths,
            report,
        })
    }

    /// Re-runs the companions over a stored path and its increments.
    pub fn replay_companions(&self, path: &PathBundle) -> Result<Vec<Vec<f64>>> {
        let n = self.grid.steps();
        if path.x.len() != n + 1 || path.dw.len() != n {
            return Err(Error::input("path does not match the simulation grid"));
        }
        let times = self.grid.times();
        let mut comps: Vec<Vec<f64>> = self
            .companions
            .iter()
            .map(|c| {
                let mut v = vec![0.0; n + 1];
                v[0] = c.initial(path.x[0]);
                v
            })
            .collect();
        let mut left = vec![0.0; comps.len()];
        for i in 0..n {
            for c in 0..comps.len() {
                left[c] = comps[c][i];
            }
            let ctx = StepContext {
                step: i,
                t: times[i],
                dt: self.grid.dt(i),
                dw: path.dw[i],
                x: path.x[i],
                x_next: path.x[i + 1],
                companions: &left,
            };
            for (c, comp) in self.companions.iter().enumerate() {
                comps[c][i + 1] = comp.step(&ctx, left[c]);
            }
        }
        Ok(comps)
    }
}

/// Deterministic parallel reduction over path indices `0..n`.
///
/// Indices are grouped in blocks of [`BLOCK_SIZE`]; each block folds its
/// indices in order into a fresh accumulator and the block accumulators are
/// merged in block order, so the result does not depend on scheduling.
/// Returns `None` when `n == 0`.
pub fn reduce_blocks<A, I, F, M>(n: usize, init: I, fold: F, merge: M) -> Option<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, usize) + Sync,
    M: Fn(&mut A, A),
{
    let n_blocks = n.div_ceil(BLOCK_SIZE);
    let blocks: Vec<A> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = init();
            let start = b * BLOCK_SIZE;
            for index in start..(start + BLOCK_SIZE).min(n) {
                fold(&mut acc, index);
            }
            acc
        })
        .collect();
    let mut iter = blocks.into_iter();
    let mut acc = iter.next()?;
    for a in iter {
        merge(&mut acc, a);
    }
    Some(acc)
}

/// Monte Carlo settings shared by the simulation front ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

impl McEstimate {
    /// `|mean - target|` in units of the standard error (infinite when the
    /// error is zero and the mean misses).
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.mean - target).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Streaming mean/variance (Welford) with a deterministic merge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: usize,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(&mut self, other: RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn estimate(&self) -> Result<McEstimate> {
        if self.n < 2 {
            return Err(Error::input(
                "at least two values are needed for an estimate",
            ));
        }
        Ok(McEstimate {
            mean: self.mean,
            std_error: (self.sample_variance() / self.n as f64).sqrt(),
            n_paths: self.n,
        })
    }
}

/// Sample mean and standard error of finite values.
pub fn mc_estimate(values: &[f64]) -> Result<McEstimate> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::numeric("non-finite value in Monte Carlo sample"));
    }
    let mut s = RunningStats::new();
    values.iter().for_each(|&v| s.push(v));
    s.estimate()
}

/// Formats a value with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes one row per (path, time): `path_id,t,X,<companions...>`.
pub fn write_paths_csv<W: Write>(out: &mut W, sim: &Simulation) -> std::io::Result<()> {
    let mut header = String::from("path_id,t,X");
    for name in &sim.names {
        header.push(',');
        header.push_str(name);
    }
    header.push('\n');
    out.write_all(header.as_bytes())?;
    for p in &sim.paths {
        for (i, &t) in sim.grid.times().iter().enumerate() {
            let mut row = format!("{},{},{}", p.index, fmt17(t), fmt17(p.x[i]));
            for c in &p.companions {
                row.push(',');
                row.push_str(&fmt17(c[i]));
            }
            row.push('\n');
            out.write_all(row.as_bytes())?;
        }
    }
    Ok(())
}
