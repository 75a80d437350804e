//! Independent reference computations for the integration tests.
#![allow(dead_code)]

use ode_efficiency::{FeasibleRegion, InputSystem};

/// Dense matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let norm = m
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let a: Vec<Vec<f64>> = m
        .iter()
        .map(|r| r.iter().map(|v| v * scale).collect())
        .collect();

    let identity = |n: usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    };
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=30 {
        term = matmul(&term, &a);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

/// Exact solution of `x' = b + A x`, `x(0) = x0`, at output `y`, through
/// the exponential of the augmented `(n+1)×(n+1)` generator.
pub fn exact_state(sys: &InputSystem, x0: &[f64], y: f64) -> Vec<f64> {
    let n = sys.dim;
    let mut g = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = sys.coefficients[i][j] * y;
        }
        g[i][n] = sys.intercepts[i] * y;
    }
    let e = expm(&g);
    (0..n)
        .map(|i| (0..n).map(|j| e[i][j] * x0[j]).sum::<f64>() + e[i][n])
        .collect()
}

/// Closed form for the two-input example started at `x0`:
/// `s = x1 + x2` obeys `s' = 3 + 0.75 s`, and `x2 - 2 x1` is constant.
pub fn example_closed_form(x0: [f64; 2], y: f64) -> [f64; 2] {
    let s0 = x0[0] + x0[1];
    let d = x0[1] - 2.0 * x0[0];
    let s = (s0 + 4.0) * (0.75 * y).exp() - 4.0;
    [(s - d) / 3.0, (2.0 * s + d) / 3.0]
}

pub fn example_x1(y: f64) -> f64 {
    ((0.75 * y).exp() - 1.0) / 0.75
}

/// Exit parameter by bisection on membership alone, starting from a
/// bracket found by doubling.
pub fn bisect_exit(region: &FeasibleRegion, origin: &[f64], dir: &[f64]) -> f64 {
    let at = |t: f64| -> Vec<f64> { origin.iter().zip(dir).map(|(o, d)| o + t * d).collect() };
    let inside = |t: f64| region.contains(&at(t)).unwrap();
    let mut hi = 1.0;
    while inside(hi) {
        hi *= 2.0;
        assert!(hi < 1e12, "ray does not leave the region");
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn example_region() -> FeasibleRegion {
    use ode_efficiency::Constraint;
    FeasibleRegion::anchored(
        &[1.25, 2.5],
        vec![Constraint::Ball {
            center: vec![0.0, 0.0],
            radius: 10.0,
        }],
    )
    .unwrap()
}
