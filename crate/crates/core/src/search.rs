//! Derivative-free compass search on boxes with optional periodic axes.

use crate::tetragon::Axis;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Step size per axis at termination, relative to the axis length.
    pub final_step: f64,
}

fn project(x: &mut [f64], axes: &[Axis]) {
    for (v, &(lo, hi, periodic)) in x.iter_mut().zip(axes) {
        if periodic {
            let len = hi - lo;
            *v = lo + (*v - lo).rem_euclid(len);
        } else {
            *v = v.clamp(lo, hi);
        }
    }
}

/// Minimizes `f` by polling `±step_i` along each axis, halving the steps
/// when no poll improves. `step0` is relative to each axis length.
pub fn pattern_search(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    axes: &[Axis],
    step0: f64,
    min_step: f64,
    max_evals: usize,
) -> SearchResult {
    let mut x = x0.to_vec();
    project(&mut x, axes);
    let mut fx = f(&x);
    let mut evals = 1;
    let mut step = step0;
    while step > min_step && evals < max_evals {
        let mut improved = false;
        'axes: for i in 0..x.len() {
            let (lo, hi, _) = axes[i];
            let len = hi - lo;
            if len <= 0.0 {
                continue;
            }
            for dir in [1.0, -1.0] {
                if evals >= max_evals {
                    break 'axes;
                }
                let mut y = x.clone();
                y[i] += dir * step * len;
                project(&mut y, axes);
                if y[i] == x[i] {
                    continue;
                }
                let fy = f(&y);
                evals += 1;
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    SearchResult {
        x,
        value: fx,
        evaluations: evals,
        final_step: step,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_box_minimum() {
        let axes = [(0.0, 1.0, false), (0.0, 1.0, true)];
        let mut f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] - 0.9).powi(2);
        let r = pattern_search(&mut f, &[0.5, 0.5], &axes, 0.25, 1e-9, 10_000);
        assert!((r.x[0] - 0.3).abs() < 1e-6 && (r.x[1] - 0.9).abs() < 1e-6);
        let mut g = |x: &[f64]| -x[0];
        let r = pattern_search(&mut g, &[0.5, 0.5], &axes, 0.25, 1e-9, 10_000);
        assert_eq!(r.x[0], 1.0);
    }

    #[test]
    fn respects_budget() {
        let mut n = 0;
        let mut f = |x: &[f64]| {
            n += 1;
            x[0].sin()
        };
        let r = pattern_search(&mut f, &[0.1], &[(0.0, 10.0, false)], 0.1, 1e-12, 17);
        assert!(r.evaluations <= 17);
        drop(r);
        assert!(n <= 17);
    }
}
