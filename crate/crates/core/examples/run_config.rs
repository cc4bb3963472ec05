//! Driving the library through the same configuration format as the
//! command-line tool.

use uncertain_pricing::cli::{execute, parse_config};

const CONFIG: &str = "
# closed-form quotes on a small strike/maturity grid
command = price-bs
spot = 100
strike = 90, 100, 110
maturity = 0.5, 1
vol = 0.2
vol_bias = 0.005
vol_var = 4e-4
alpha = 0.05
method = chebyshev
";

fn main() -> uncertain_pricing::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let report = execute(&cfg)?;
    println!("{}", report.summary);
    print!("{}", report.csv.render());

    match parse_config(&CONFIG.replace("alpha = 0.05", "alpha = 0.9")) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("\nrejected config: {e}"),
    }
    Ok(())
}
