//! Closed-form Black–Scholes price corrections and quotes when the
//! volatility is only known up to a bias and a variance.

use uncertain_pricing::bs::{self, BsInputs};
use uncertain_pricing::QuoteMethod;

fn main() -> uncertain_pricing::Result<()> {
    println!("strike  price     bias      variance  bid       mid       ask");
    for strike in [80.0, 90.0, 100.0, 110.0, 120.0] {
        let i = BsInputs::from_scalars(100.0, strike, 1.0, 0.2, 0.005, 4e-4)?;
        let q = bs::quote(&i, 0.01, QuoteMethod::Gaussian)?;
        println!(
            "{strike:6.1}  {:8.5}  {:8.5}  {:8.5}  {:8.5}  {:8.5}  {:8.5}",
            bs::bs_price(&i),
            bs::bias_correction(&i),
            bs::variance_correction(&i),
            q.bid,
            q.mid,
            q.ask
        );
    }
    Ok(())
}
