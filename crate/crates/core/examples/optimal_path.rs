// Integrates the two-input example technology from zero inputs and prints
// the optimal input levels per output level as CSV (`y,x1,x2,dx1,dx2`).
//
// Pass an output bound as the first argument (default 2).

use ode_efficiency::{InputSystem, Trajectory};

pub fn run_example(y_max: f64) -> Result<Trajectory, Box<dyn std::error::Error>> {
    let sys = InputSystem::two_input_example();
    let traj = Trajectory::solve(&sys, y_max, 0.05)?;
    let violations = traj.check_nonnegativity(1e-9);
    eprintln!(
        "{} grid points, non-negativity violations: {}",
        traj.len(),
        violations.len()
    );
    traj.write_csv(std::io::stdout().lock())?;
    Ok(traj)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let y_max = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(2.0);
    run_example(y_max).map(|_| ())
}
