//! Quoting a general payoff under a local-volatility surface whose
//! coefficients are uncertain: P&L bias and variance, the resulting quote,
//! and Cantelli tail bounds.

use uncertain_pricing::pnl::{self, BasisFn, LocalVolSpec, Payoff, PnlConfig, TestFunction};
use uncertain_pricing::sde::McConfig;
use uncertain_pricing::{QuoteMethod, UncertainParamSet};

fn main() -> uncertain_pricing::Result<()> {
    // ς(t, x) = a₀ + a₁·(x/x0 − 1) with uncertain (a₀, a₁).
    let coeffs = UncertainParamSet::new(
        vec![0.2, -0.05],
        vec![0.005, 0.0],
        vec![vec![4e-4, 0.0], vec![0.0, 1e-3]],
    )?;
    let spec = LocalVolSpec::new(
        vec![BasisFn::constant(), BasisFn::spot_linear(100.0)],
        coeffs,
        0.02,
        100.0,
        1.0,
    )?;
    let payoff = Payoff::Call { strike: 105.0 };
    let cfg = PnlConfig {
        mc: McConfig {
            steps: 64,
            paths: 50_000,
            seed: 3,
        },
        ..Default::default()
    };

    let q = pnl::general_quote(&spec, &payoff, 0.05, QuoteMethod::Gaussian, &cfg)?;
    let s = &q.stats;
    println!("price {:.4} ± {:.4}", s.price.mean, s.price.std_error);
    println!(
        "P&L bias {:.4} ± {:.4}, variance {:.4} ± {:.4}",
        s.bias, s.bias_se, s.variance, s.variance_se
    );
    println!("vega-like ψ = {:?}", s.psi);
    println!(
        "bid {:.4}  mid {:.4}  ask {:.4}",
        q.band.bid, q.band.mid, q.band.ask
    );

    let id = TestFunction::identity();
    for k in [1.0, 2.0, 3.0] {
        let t = pnl::tail_bound(s, &id, k)?;
        println!("P(P&L ≥ {:.4}) ≤ {:.3}", t.threshold, t.bound);
    }
    Ok(())
}
