//! The implied-volatility smile produced by pricing at the biased mid, and
//! the at-the-money regime flags.

use uncertain_pricing::bs::{self, BsInputs};

fn main() -> uncertain_pricing::Result<()> {
    let strikes = [90.0, 95.0, 100.0, 105.0, 110.0];
    let maturities = [0.25, 1.0, 2.0];
    // Bias chosen per maturity so the at-the-money price correction vanishes.
    let cells = bs::smile_surface_atm_neutral(100.0, &strikes, &maturities, 0.2, 4e-4, 0.01)?;
    for row in cells.chunks(strikes.len()) {
        let ivs: Vec<String> = row
            .iter()
            .map(|c| c.implied_vol.map_or("-".into(), |v| format!("{v:.6}")))
            .collect();
        println!("T = {:4}: {}", row[0].maturity, ivs.join("  "));
    }

    let report = bs::smile_analysis(&BsInputs::from_scalars(
        100.0, 100.0, 1.0, 0.2, 0.004, 4e-4,
    )?)?;
    println!(
        "\nrr = {:.3}, thresholds {:?}",
        report.rr, report.thresholds
    );
    println!(
        "ATM bias positive: {}, convex in strike: {}, convexity growing with T: {}",
        report.atm_bias_positive, report.atm_bias_convex, report.term_decay_positive
    );
    Ok(())
}
