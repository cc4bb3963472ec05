//! Propagating parameter uncertainty through a function with the error
//! calculus, then turning bias and variance into a bid/ask band.
//!
//! F(u, w) = u·w with u = 2 ± (var 0.01), w = 3 ± (var 0.04), correlated.

use uncertain_pricing::error_calculus::{make_quote, propagate_bias, propagate_variance};
use uncertain_pricing::{QuoteMethod, UncertainParamSet};

fn main() -> uncertain_pricing::Result<()> {
    let params = UncertainParamSet::new(
        vec![2.0, 3.0],
        vec![0.01, -0.02],
        vec![vec![0.01, 0.005], vec![0.005, 0.04]],
    )?;
    let (u, w) = (params.value(0), params.value(1));
    let grad = [w, u];
    let hess = vec![vec![0.0, 1.0], vec![1.0, 0.0]];

    let variance = propagate_variance(&grad, &params)?;
    let bias = propagate_bias(&grad, &hess, &params)?;
    println!("F = {}, A[F] = {bias:.6}, Γ[F] = {variance:.6}", u * w);

    for method in [QuoteMethod::Gaussian, QuoteMethod::Chebyshev] {
        let q = make_quote(u * w, bias, variance, 0.05, method)?;
        println!(
            "{method:?}: bid {:.6}  mid {:.6}  ask {:.6}",
            q.bid, q.mid, q.ask
        );
    }
    Ok(())
}
