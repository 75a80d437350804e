// Scores firms against the optimal input bundle for their own output
// level rather than a single profit-maximizing point.

use ode_efficiency::{
    score_at_output_level, Constraint, Error, InputSystem, Mode, Observation, RegionTemplate,
    ScoreBreakdown, Trajectory,
};

pub fn run_example() -> Result<Vec<ScoreBreakdown>, Error> {
    let sys = InputSystem::two_input_example();
    let traj = Trajectory::solve(&sys, 3.0, 1e-3)?;
    let template = RegionTemplate::new(vec![Constraint::Ball {
        center: vec![0.0, 0.0],
        radius: 10.0,
    }]);

    let mut out = Vec::new();
    for (y, extra) in [(0.5, [0.3, 0.3]), (1.0, [0.0, 3.52]), (1.5, [2.0, 0.5]), (1.8, [0.5, 0.5])] {
        let ideal = traj.state_at(y)?;
        let inputs = vec![ideal[0] + extra[0], ideal[1] + extra[1]];
        let s = score_at_output_level(&traj, &template, &Observation::new(y, inputs), Mode::Strict)?;
        println!(
            "y = {y:.1}: X(y)* = [{:.4}, {:.4}], worst = [{:.4}, {:.4}], efficiency = {:.4}",
            ideal[0], ideal[1], s.worst_point[0], s.worst_point[1], s.efficiency
        );
        out.push(s);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Error> {
    run_example().map(|_| ())
}
