//! Checking the first-order P&L bias and variance by redrawing the surface
//! coefficients from their law and hedging each draw.

use uncertain_pricing::pnl::{
    self, BootstrapConfig, LatticeConfig, LocalVolSpec, Payoff, PnlConfig, TestFunction,
};
use uncertain_pricing::sde::McConfig;

fn main() -> uncertain_pricing::Result<()> {
    let spec = LocalVolSpec::constant(100.0, 1.0, 0.2, 0.01, 4e-4)?;
    let payoff = Payoff::Call { strike: 100.0 };
    let id = TestFunction::identity();

    let cfg = PnlConfig {
        mc: McConfig {
            steps: 64,
            paths: 50_000,
            seed: 1,
        },
        ..Default::default()
    };
    let st = pnl::pnl_functionals(&spec, &payoff, &id, &cfg)?;

    let bc = BootstrapConfig {
        draws: 40,
        hedge: McConfig {
            steps: 32,
            paths: 4_000,
            seed: 2,
        },
        lattice: LatticeConfig {
            time_nodes: 21,
            spot_nodes: 41,
            paths: 256,
            ..Default::default()
        },
        draw_seed: 3,
    };
    let r = pnl::parameter_bootstrap(&spec, &payoff, &id, &bc)?;
    println!(
        "bootstrap over {} draws (truncated {:.1}%)",
        r.values.len(),
        100.0 * r.truncated_fraction
    );
    println!(
        "mean     {:.4}   first-order bias     {:.4}",
        r.mean, st.bias
    );
    println!(
        "variance {:.4}   first-order variance {:.4}",
        r.variance, st.variance
    );
    Ok(())
}
