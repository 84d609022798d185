//! Shared numerical kernels: stable log-sum-exp, monotone root solving,
//! adaptive Simpson quadrature, and Richardson-extrapolated differencing.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("root solver failed to converge after {iterations} iterations (last x = {last_x})")]
    NoConvergence { iterations: usize, last_x: f64 },
    #[error("could not bracket the root starting from x = {start}")]
    BracketFailure { start: f64 },
    #[error("quadrature did not reach tolerance {tol} (error estimate {estimate}, {subdivisions} subdivisions)")]
    QuadratureNoConvergence {
        tol: f64,
        estimate: f64,
        subdivisions: usize,
    },
    #[error("finite-difference step underflow (h = {h})")]
    StepUnderflow { h: f64 },
}

/// log Σ exp(terms[i]), shifted by the maximum term.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    max + sum.ln()
}

/// Result of a monotone solve, with the residual actually achieved.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

const MAX_BRACKET_DOUBLINGS: usize = 200;
const MAX_SOLVER_ITERATIONS: usize = 200;

/// Solve f(x) = target for a strictly decreasing f on (0, ∞), by Newton
/// steps kept inside a bracket obtained by doubling/halving from `start`,
/// with bisection whenever a Newton step leaves the bracket or stalls.
///
/// `df` is the derivative of f (negative everywhere). Convergence is on
/// the residual: |f(x) − target| ≤ tol.
pub fn solve_decreasing<F, D>(
    f: F,
    df: D,
    target: f64,
    start: f64,
    tol: f64,
) -> Result<RootResult, NumericsError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    // Bracket: find lo < hi with f(lo) >= target >= f(hi).
    let mut lo = start;
    let mut hi = start;
    let f_start = f(start);
    if f_start >= target {
        // need larger x to bring f down
        let mut n = 0;
        while f(hi) > target {
            lo = hi;
            hi *= 2.0;
            n += 1;
            if n > MAX_BRACKET_DOUBLINGS {
                return Err(NumericsError::BracketFailure { start });
            }
        }
    } else {
        let mut n = 0;
        while f(lo) < target {
            hi = lo;
            lo /= 2.0;
            n += 1;
            if n > MAX_BRACKET_DOUBLINGS {
                return Err(NumericsError::BracketFailure { start });
            }
        }
    }

    let mut x = 0.5 * (lo + hi);
    for it in 0..MAX_SOLVER_ITERATIONS {
        let fx = f(x);
        let residual = fx - target;
        if residual.abs() <= tol {
            return Ok(RootResult {
                x,
                residual,
                iterations: it,
            });
        }
        // maintain the invariant f(lo) >= target >= f(hi)
        if residual > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - residual / d;
        x = if d < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if !(x.is_finite()) || hi - lo <= f64::EPSILON * x.abs() {
            // bracket exhausted; accept the midpoint residual if tolerable
            let fx = f(x);
            let residual = fx - target;
            if residual.abs() <= tol.max(1e-13 * target.abs().max(1.0)) {
                return Ok(RootResult {
                    x,
                    residual,
                    iterations: it,
                });
            }
            return Err(NumericsError::NoConvergence {
                iterations: it,
                last_x: x,
            });
        }
    }
    Err(NumericsError::NoConvergence {
        iterations: MAX_SOLVER_ITERATIONS,
        last_x: x,
    })
}

/// Adaptive Simpson quadrature of `f` on [a, b] to absolute tolerance `tol`.
///
/// Returns the integral and an error estimate. Subdivision count is capped;
/// exceeding the cap without meeting the tolerance is an error.
pub fn adaptive_simpson<F>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
) -> Result<(f64, f64), NumericsError>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok((0.0, 0.0));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut budget = max_subdivisions as isize;
    let (value, estimate) =
        simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 60, &mut budget);
    if budget < 0 {
        return Err(NumericsError::QuadratureNoConvergence {
            tol,
            estimate,
            subdivisions: max_subdivisions,
        });
    }
    Ok((value, estimate))
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    budget: &mut isize,
) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    *budget -= 2;
    if *budget < 0 {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    let (lv, le) = simpson_recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, budget);
    let (rv, re) = simpson_recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, budget);
    (lv + rv, le + re)
}

/// Central difference of `f` at `x` with two-level Richardson extrapolation.
pub fn richardson_central<F>(f: &F, x: f64, h: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if h <= 0.0 || x + h == x {
        return Err(NumericsError::StepUnderflow { h });
    }
    let d = |step: f64| (f(x + step) - f(x - step)) / (2.0 * step);
    let d_h = d(h);
    let d_h2 = d(h / 2.0);
    // O(h^4) combination of the two O(h^2) central differences
    Ok((4.0 * d_h2 - d_h) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_sum_exp_matches_naive_small() {
        let terms = [0.5f64, 2.0, -1.0];
        let naive = terms.iter().map(|t| t.exp()).sum::<f64>().ln();
        assert_relative_eq!(log_sum_exp(&terms), naive, max_relative = 1e-15);
    }

    #[test]
    fn log_sum_exp_survives_large_magnitudes() {
        let v = log_sum_exp(&[1234.0, 1232.0]);
        assert_relative_eq!(v, 1234.0 + (1.0f64 + (-2.0f64).exp()).ln(), max_relative = 1e-15);
    }

    #[test]
    fn solve_decreasing_inverts_exp() {
        // f(x) = exp(-x), solve f(x) = 0.3
        let r = solve_decreasing(|x: f64| (-x).exp(), |x: f64| -(-x).exp(), 0.3, 1.0, 1e-14)
            .unwrap();
        assert_relative_eq!(r.x, -(0.3f64.ln()), max_relative = 1e-12);
    }

    #[test]
    fn solve_decreasing_brackets_far_targets() {
        let r = solve_decreasing(|x: f64| 1.0 / x, |x: f64| -1.0 / (x * x), 1e-6, 1.0, 1e-18)
            .unwrap();
        assert_relative_eq!(r.x, 1e6, max_relative = 1e-9);
    }

    #[test]
    fn simpson_integrates_polynomial_exactly() {
        // Simpson is exact on cubics
        let (v, _) = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 1000).unwrap();
        assert_relative_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_reaches_tolerance_on_smooth_integrand() {
        let (v, err) = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 5.0, 1e-12, 100_000).unwrap();
        assert!((v - (1.0 - (-5.0f64).exp())).abs() < 1e-10);
        assert!(err < 1e-9);
    }

    #[test]
    fn simpson_rejects_exhausted_budget() {
        let e = adaptive_simpson(&|x: f64| (1e6 * x).sin(), 0.0, 1.0, 1e-14, 8);
        assert!(matches!(e, Err(NumericsError::QuadratureNoConvergence { .. })));
    }

    #[test]
    fn richardson_derivative_of_sin() {
        let d = richardson_central(&|x: f64| x.sin(), 0.7, 1e-3).unwrap();
        assert_relative_eq!(d, 0.7f64.cos(), max_relative = 1e-10);
    }

    #[test]
    fn richardson_rejects_zero_step() {
        assert!(richardson_central(&|x: f64| x, 1.0, 0.0).is_err());
    }
}
