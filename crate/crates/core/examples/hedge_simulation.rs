//! Delta hedging a call with a Monte Carlo delta lattice: at the true
//! volatility the P&L is centred, with an under-estimated volatility the
//! trader loses money.

use uncertain_pricing::pnl::{self, LatticeConfig, LocalVolSpec, Payoff};
use uncertain_pricing::sde::TimeGrid;

fn main() -> uncertain_pricing::Result<()> {
    let spec = LocalVolSpec::constant(100.0, 1.0, 0.2, 0.0, 4e-4)?;
    let payoff = Payoff::Call { strike: 100.0 };
    let grid = TimeGrid::uniform(1.0, 64)?;
    let lattice = LatticeConfig {
        paths: 1024,
        ..Default::default()
    };

    for scale in [1.0, 1.1] {
        let vol = move |_t: f64, _x: f64| 0.2 * scale;
        let run = pnl::hedge_simulate(&vol, &spec, &payoff, &grid, 10_000, 5, &lattice)?;
        println!(
            "world vol {:.2}: trader price {:.4}, mean P&L {:+.4} ± {:.4}, P&L std {:.4}",
            0.2 * scale,
            run.price.mean,
            run.mean.mean,
            run.mean.std_error,
            run.sample_std()
        );
    }
    Ok(())
}
