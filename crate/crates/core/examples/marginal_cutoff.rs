// Scores a small sample inside the region implied by the model itself:
// inputs no lower than the optimum and reciprocal input rates summing above
// epsilon.

use ode_efficiency::{
    epsilon_region, find_optimum, score_sample, Error, InputSystem, Mode, Observation,
    ProfitSpec, Sample, ScoredObservation,
};

pub fn run_example() -> Result<Vec<ScoredObservation>, Error> {
    let sys = InputSystem::two_input_example();
    let opt = find_optimum(&sys, &ProfitSpec::new(6.0)?, 5.0, 1e-3)?;
    let region = epsilon_region(&sys, &opt.x_star, 0.1)?;

    let x = &opt.x_star;
    let sample = Sample::new(
        2,
        vec![
            Observation::labelled("lean", opt.y_star, vec![x[0] + 0.2, x[1] + 0.1]),
            Observation::labelled("heavy-x2", opt.y_star, vec![x[0], x[1] + 3.0]),
            Observation::labelled("balanced", opt.y_star, vec![x[0] + 1.5, x[1] + 1.5]),
            Observation::labelled("wasteful", opt.y_star, vec![x[0] + 40.0, x[1] + 40.0]),
        ],
    )?;

    println!("y* = {:.6}, X* = [{:.6}, {:.6}]", opt.y_star, x[0], x[1]);
    let rows = score_sample(&region, &opt.x_star, &sample, Mode::Clamp);
    for row in &rows {
        let label = row.label.as_deref().unwrap_or("?");
        match &row.result {
            Ok(s) => println!(
                "{label:>9}: d_j = {:.4}, d_w = {:.4}, efficiency = {:.4}{}",
                s.d_j,
                s.d_w,
                s.efficiency,
                if s.clamped { " (clamped)" } else { "" }
            ),
            Err(e) => println!("{label:>9}: {e}"),
        }
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<(), Error> {
    run_example().map(|_| ())
}
