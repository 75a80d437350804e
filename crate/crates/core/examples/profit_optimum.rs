// Profit-maximizing output of the two-input example at several prices.
//
// Along the optimal path the marginal cost is `3·e^{0.75 y}`, so the price
// `3·e^{0.75}` puts the optimum at y = 1.

use ode_efficiency::{find_optimum, InputSystem, OptimumResult, ProfitSpec};

pub fn run_example() -> Result<Vec<(f64, OptimumResult)>, ode_efficiency::Error> {
    let sys = InputSystem::two_input_example();
    let mut out = Vec::new();
    for price in [4.0, 6.0, 3.0 * 0.75f64.exp(), 10.0] {
        let r = find_optimum(&sys, &ProfitSpec::new(price)?, 5.0, 1e-3)?;
        println!(
            "price {price:8.5}: y* = {:.6}, X* = [{:.6}, {:.6}], profit = {:.6}",
            r.y_star, r.x_star[0], r.x_star[1], r.profit
        );
        out.push((price, r));
    }
    match find_optimum(&sys, &ProfitSpec::new(3.0)?, 5.0, 1e-3) {
        Err(e) => println!("price  3.00000: {e}"),
        Ok(r) => println!("price  3.00000: unexpected optimum {r:?}"),
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), ode_efficiency::Error> {
    run_example().map(|_| ())
}
