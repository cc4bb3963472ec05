//! Option pricing under uncertain model parameters.
//!
//! Parameter uncertainty is carried by an error structure: each uncertain
//! input has a bias `A` and a (co)variance `Γ`, and both are transported to
//! prices through the first- and second-order chain rules. The crate provides
//!
//! * [`error_calculus`]: parameter sets, propagation and bid/ask quoting;
//! * [`bs`]: closed-form Black-Scholes corrections and the implied-volatility smile;
//! * [`sde`]: a deterministic, parallel Euler engine with companion processes;
//! * [`cev`]: uncertainty propagation through a CEV diffusion;
//! * [`pnl`]: hedging P&L functionals under an uncertain local volatility;
//! * [`cli`]: the configuration-file driven command-line front end.

pub mod bs;
pub mod cev;
pub mod cli;
pub mod error;
pub mod error_calculus;
pub mod normal;
pub mod pnl;
pub mod rng;
pub mod sde;

pub use error::{Error, Result};
pub use error_calculus::{QuoteBand, QuoteMethod, UncertainParamSet};
