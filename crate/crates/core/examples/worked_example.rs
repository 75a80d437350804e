// Scores one firm producing y = 1 against the ideal point (1.25, 2.5)
// inside the region x1 >= 1.25, x2 >= 2.5, x1² + x2² <= 100.

use ode_efficiency::{score, Constraint, FeasibleRegion, Mode, Observation, ScoreBreakdown};

pub fn run_example() -> Result<ScoreBreakdown, ode_efficiency::Error> {
    let x_star = [1.25, 2.5];
    let region = FeasibleRegion::anchored(
        &x_star,
        vec![Constraint::Ball {
            center: vec![0.0, 0.0],
            radius: 10.0,
        }],
    )?;
    let firm = Observation::labelled("X^d", 1.0, vec![1.25, 6.21]);
    let s = score(&region, &x_star, &firm, Mode::Strict)?;

    println!("ideal point     X*  = {:?}", s.anchor);
    println!("observation     X^d = {:?}", firm.inputs);
    println!("worst collinear X_w = [{:.5}, {:.5}]", s.worst_point[0], s.worst_point[1]);
    println!("d_j = {:.4}, d_w = {:.4}", s.d_j, s.d_w);
    println!("efficiency I_d = 1 - d_j/d_w = {:.4}", s.efficiency);
    Ok(s)
}

#[allow(dead_code)]
fn main() -> Result<(), ode_efficiency::Error> {
    run_example().map(|_| ())
}
