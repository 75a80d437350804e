macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(worked_example);
example!(optimal_path);
example!(profit_optimum);
example!(fit_from_paths);
example!(marginal_cutoff);
example!(per_output_level);

#[test]
fn worked_example_runs() {
    let s = worked_example::run_example().expect("worked example should run");
    assert!((s.efficiency - 0.5).abs() < 1e-3);
}

#[test]
fn optimal_path_runs() {
    let t = optimal_path::run_example(2.0).expect("optimal path example should run");
    assert_eq!(t.len(), 41);
}

#[test]
fn profit_optimum_runs() {
    let rows = profit_optimum::run_example().expect("profit example should run");
    assert!(rows.windows(2).all(|w| w[1].1.y_star > w[0].1.y_star));
}

#[test]
fn fit_from_paths_runs() {
    let r = fit_from_paths::run_example().expect("fit example should run");
    assert!((r.system.coefficients[1][0] - 0.5).abs() < 1e-2);
}

#[test]
fn marginal_cutoff_runs() {
    let rows = marginal_cutoff::run_example().expect("cutoff example should run");
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.result.is_ok()));
}

#[test]
fn per_output_level_runs() {
    let scores = per_output_level::run_example().expect("per-level example should run");
    assert!(scores.iter().all(|s| (0.0..=1.0).contains(&s.efficiency)));
}
