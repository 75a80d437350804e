// Recovers the example technology from two observed input paths.
//
// A single path started at zero keeps x2 = 2·x1, so the coefficients cannot
// be separated; a second path started elsewhere fixes that.

use ode_efficiency::{fit, Error, FitOptions, FitResult, InputSystem, Observation, Sample, Trajectory};

fn path(sys: &InputSystem, start: &[f64]) -> Result<Sample, Error> {
    let traj = Trajectory::solve_from(sys, start, 2.0, 1e-3)?;
    let obs = traj
        .grid()
        .iter()
        .zip(traj.states())
        .step_by(10)
        .map(|(y, x)| Observation::new(*y, x.clone()))
        .collect();
    Sample::new(sys.dim, obs)
}

pub fn run_example() -> Result<FitResult, Error> {
    let truth = InputSystem::two_input_example();
    let from_zero = path(&truth, &[0.0, 0.0])?;
    let shifted = path(&truth, &[1.0, 0.5])?;

    match fit(std::slice::from_ref(&from_zero), &FitOptions::default()) {
        Err(e) => println!("one path:  {e}"),
        Ok(r) => println!("one path:  unexpectedly fitted {:?}", r.system),
    }

    let r = fit(&[from_zero, shifted], &FitOptions::default())?;
    for i in 0..truth.dim {
        println!(
            "dx{}/dy = {:.5} + {:.5}·x1 + {:.5}·x2   (rms residual {:.2e})",
            i + 1,
            r.system.intercepts[i],
            r.system.coefficients[i][0],
            r.system.coefficients[i][1],
            r.residual_norms[i]
        );
    }
    Ok(r)
}

#[allow(dead_code)]
fn main() -> Result<(), Error> {
    run_example().map(|_| ())
}
