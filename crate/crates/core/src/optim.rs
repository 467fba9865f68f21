//! Derivative-free minimization with the dimension-adaptive Nelder–Mead
//! simplex method.
//!
//! The iteration follows the classical scheme (reflect, expand, outside or
//! inside contraction, shrink) with coefficients from
//! [`adaptive_coefficients`]. Objectives signal infeasible regions by
//! returning `+inf`; NaN is treated the same way once the start point has
//! been accepted. Nothing here is random, so repeated calls with the same
//! inputs are bitwise identical.

use thiserror::Error;

use crate::scalar::{total_cmp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimOptions<T> {
    pub max_iterations: usize,
    /// Largest allowed coordinate difference between the best vertex and any
    /// other vertex at convergence.
    pub x_tolerance: T,
    /// Largest allowed objective difference between the best vertex and any
    /// other vertex at convergence.
    pub f_tolerance: T,
    /// Relative seeding offset for the initial simplex (absolute when the
    /// start coordinate is zero).
    pub initial_step: T,
}

impl<T: Scalar> Default for OptimOptions<T> {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            x_tolerance: T::lit(1e-8),
            f_tolerance: T::lit(1e-8),
            initial_step: T::lit(0.05),
        }
    }
}

impl<T: Scalar> OptimOptions<T> {
    pub fn validate(&self) -> Result<(), OptimError> {
        let pos = |x: T| x.is_finite() && x > T::zero();
        if self.max_iterations == 0 || !pos(self.x_tolerance) || !pos(self.f_tolerance) || !pos(self.initial_step) {
            return Err(OptimError::InvalidOptions);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexCoefficients<T> {
    pub reflection: T,
    pub expansion: T,
    pub contraction: T,
    pub shrink: T,
}

/// Coefficients `(1, 1 + 2/n, 3/4 − 1/(2n), 1 − 1/n)` for an `n`-dimensional
/// problem. For `n ≤ 2` the classical `(1, 2, 1/2, 1/2)` are returned; at
/// `n = 2` the two coincide.
pub fn adaptive_coefficients<T: Scalar>(dim: usize) -> SimplexCoefficients<T> {
    if dim <= 2 {
        return SimplexCoefficients {
            reflection: T::one(),
            expansion: T::lit(2.0),
            contraction: T::lit(0.5),
            shrink: T::lit(0.5),
        };
    }
    let n = T::from_usize_lossy(dim);
    let one = T::one();
    let two = T::lit(2.0);
    SimplexCoefficients {
        reflection: one,
        expansion: one + two / n,
        contraction: T::lit(0.75) - one / (two * n),
        shrink: one - one / n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Tolerance,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult<T> {
    pub x_min: Vec<T>,
    pub f_min: T,
    pub iterations: usize,
    pub function_evals: usize,
    pub converged: bool,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptimError {
    #[error("start point is empty")]
    EmptyStart,
    #[error("start point has non-finite coordinates")]
    NonFiniteX0,
    #[error("objective is not finite at the start point or anywhere on the initial simplex")]
    NonFiniteStart,
    #[error("optimizer options must be positive and finite")]
    InvalidOptions,
}

/// Snapshot handed to an observer once per iteration, after the simplex has
/// been ordered.
#[derive(Debug)]
pub struct IterationState<'a, T> {
    pub iteration: usize,
    pub best_point: &'a [T],
    pub best_value: T,
    pub worst_value: T,
}

pub fn minimize<T, F>(objective: F, x0: &[T], options: &OptimOptions<T>) -> Result<OptimResult<T>, OptimError>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    minimize_observed(objective, x0, options, |_| {})
}

/// [`minimize`] with a per-iteration observer.
pub fn minimize_observed<T, F, O>(
    mut objective: F,
    x0: &[T],
    options: &OptimOptions<T>,
    mut observer: O,
) -> Result<OptimResult<T>, OptimError>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
    O: FnMut(&IterationState<'_, T>),
{
    options.validate()?;
    let dim = x0.len();
    if dim == 0 {
        return Err(OptimError::EmptyStart);
    }
    if x0.iter().any(|x| !x.is_finite()) {
        return Err(OptimError::NonFiniteX0);
    }

    let coef = adaptive_coefficients::<T>(dim);
    let mut evals = 0usize;
    let mut eval = |x: &[T]| {
        evals += 1;
        let v = objective(x);
        if v.is_nan() {
            T::nan()
        } else {
            v
        }
    };

    let f0 = eval(x0);
    if f0.is_nan() {
        return Err(OptimError::NonFiniteStart);
    }

    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(dim + 1);
    let mut values: Vec<T> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    values.push(f0);
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] = if v[i] != T::zero() {
            v[i] + options.initial_step * v[i].abs()
        } else {
            options.initial_step
        };
        let f = penalize(eval(&v));
        simplex.push(v);
        values.push(f);
    }
    if values.iter().all(|f| f.is_infinite()) {
        return Err(OptimError::NonFiniteStart);
    }

    let n = T::from_usize_lossy(dim);
    let mut centroid = vec![T::zero(); dim];
    let mut iterations = 0usize;
    let termination = loop {
        order(&mut simplex, &mut values);
        observer(&IterationState {
            iteration: iterations,
            best_point: &simplex[0],
            best_value: values[0],
            worst_value: values[dim],
        });

        if has_converged(&simplex, &values, options) {
            break Termination::Tolerance;
        }
        if iterations >= options.max_iterations {
            break Termination::MaxIterations;
        }
        iterations += 1;

        for c in centroid.iter_mut() {
            *c = T::zero();
        }
        for vertex in &simplex[..dim] {
            for (c, &x) in centroid.iter_mut().zip(vertex) {
                *c = *c + x;
            }
        }
        for c in centroid.iter_mut() {
            *c = *c / n;
        }

        let worst = simplex[dim].clone();
        let rho = coef.reflection;
        let chi = coef.expansion;
        let psi = coef.contraction;

        let reflected = affine(&centroid, &worst, T::one() + rho, rho);
        let f_reflected = penalize(eval(&reflected));

        let mut shrink = false;
        if f_reflected < values[0] {
            let expanded = affine(&centroid, &worst, T::one() + rho * chi, rho * chi);
            let f_expanded = penalize(eval(&expanded));
            if f_expanded < f_reflected {
                simplex[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_reflected;
            }
        } else if f_reflected < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_reflected;
        } else if f_reflected < values[dim] {
            let outside = affine(&centroid, &worst, T::one() + psi * rho, psi * rho);
            let f_outside = penalize(eval(&outside));
            if f_outside <= f_reflected {
                simplex[dim] = outside;
                values[dim] = f_outside;
            } else {
                shrink = true;
            }
        } else {
            let inside = affine(&centroid, &worst, T::one() - psi, -psi);
            let f_inside = penalize(eval(&inside));
            if f_inside < values[dim] {
                simplex[dim] = inside;
                values[dim] = f_inside;
            } else {
                shrink = true;
            }
        }

        if shrink {
            let best = simplex[0].clone();
            for j in 1..=dim {
                for (x, &b) in simplex[j].iter_mut().zip(&best) {
                    *x = b + coef.shrink * (*x - b);
                }
                values[j] = penalize(eval(&simplex[j]));
            }
        }
    };

    let converged = termination == Termination::Tolerance;
    Ok(OptimResult {
        x_min: simplex.swap_remove(0),
        f_min: values[0],
        iterations,
        function_evals: evals,
        converged,
        termination,
    })
}

#[inline]
fn penalize<T: Scalar>(v: T) -> T {
    if v.is_nan() {
        T::infinity()
    } else {
        v
    }
}

/// `a·centroid − b·worst`, the common form of every trial point.
fn affine<T: Scalar>(centroid: &[T], worst: &[T], a: T, b: T) -> Vec<T> {
    centroid.iter().zip(worst).map(|(&c, &w)| a * c - b * w).collect()
}

fn order<T: Scalar>(simplex: &mut Vec<Vec<T>>, values: &mut Vec<T>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| total_cmp(&values[a], &values[b]));
    let sorted_simplex: Vec<Vec<T>> = idx.iter().map(|&i| std::mem::take(&mut simplex[i])).collect();
    let sorted_values: Vec<T> = idx.iter().map(|&i| values[i]).collect();
    *simplex = sorted_simplex;
    *values = sorted_values;
}

fn has_converged<T: Scalar>(simplex: &[Vec<T>], values: &[T], options: &OptimOptions<T>) -> bool {
    let best = &simplex[0];
    let x_ok = simplex[1..]
        .iter()
        .all(|v| v.iter().zip(best).all(|(&a, &b)| (a - b).abs() <= options.x_tolerance));
    // NaN spreads (inf − inf) fail the comparison and keep iterating
    let f_ok = values[1..]
        .iter()
        .all(|&f| (f - values[0]).abs() <= options.f_tolerance);
    x_ok && f_ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn coefficients_six() {
        let c = adaptive_coefficients::<f64>(6);
        assert_eq!(c.reflection, 1.0);
        assert_eq!(c.expansion, 1.0 + 2.0 / 6.0);
        assert!((c.expansion - 4.0 / 3.0).abs() < 1e-15);
        assert!((c.contraction - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.shrink - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn coefficients_ten_and_small() {
        let c = adaptive_coefficients::<f64>(10);
        assert_eq!(
            (c.reflection, c.expansion, c.contraction, c.shrink),
            (1.0, 1.2, 0.7, 0.9)
        );
        for dim in [1, 2] {
            let c = adaptive_coefficients::<f64>(dim);
            assert_eq!(
                (c.reflection, c.expansion, c.contraction, c.shrink),
                (1.0, 2.0, 0.5, 0.5)
            );
        }
    }

    #[test]
    fn adaptive_formula_agrees_with_classical_at_two() {
        // the unclamped formula evaluated at n = 2
        let n = 2.0f64;
        assert_eq!((1.0 + 2.0 / n, 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n), (2.0, 0.5, 0.5));
    }

    #[test]
    fn coefficient_invariants() {
        for dim in 1..50 {
            let c = adaptive_coefficients::<f64>(dim);
            assert!(c.reflection > 0.0);
            assert!(c.expansion > 1.0);
            assert!(c.contraction > 0.0 && c.contraction < 1.0);
            assert!(c.shrink > 0.0 && c.shrink < 1.0);
        }
    }

    #[test]
    fn sphere_six() {
        let r = minimize(sphere, &[1.0; 6], &OptimOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.termination, Termination::Tolerance);
        assert!(r.f_min < 1e-10, "f_min = {}", r.f_min);
        assert!(r.x_min.iter().all(|x| x.abs() < 1e-6));
        assert_eq!(r.f_min, sphere(&r.x_min));
    }

    #[test]
    fn rosenbrock_two() {
        let r = minimize(rosenbrock, &[-1.2, 1.0], &OptimOptions::default()).unwrap();
        assert!(r.f_min < 1e-8, "f_min = {}", r.f_min);
        assert!((r.x_min[0] - 1.0).abs() < 1e-4 && (r.x_min[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn one_dimensional() {
        let r = minimize(|x: &[f64]| (x[0] - 3.0).powi(2), &[0.0], &OptimOptions::default()).unwrap();
        assert!((r.x_min[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn max_iterations_termination() {
        let opts = OptimOptions {
            max_iterations: 5,
            ..OptimOptions::default()
        };
        let r = minimize(rosenbrock, &[-1.2, 1.0], &opts).unwrap();
        assert_eq!(r.iterations, 5);
        assert!(!r.converged);
        assert_eq!(r.termination, Termination::MaxIterations);
        assert!(r.f_min <= rosenbrock(&[-1.2, 1.0]));
    }

    #[test]
    fn start_errors() {
        let opts = OptimOptions::default();
        assert_eq!(
            minimize(|_: &[f64]| f64::NAN, &[1.0], &opts).unwrap_err(),
            OptimError::NonFiniteStart
        );
        assert_eq!(
            minimize(|_: &[f64]| f64::INFINITY, &[1.0, 2.0], &opts).unwrap_err(),
            OptimError::NonFiniteStart
        );
        assert_eq!(minimize(sphere, &[], &opts).unwrap_err(), OptimError::EmptyStart);
        assert_eq!(
            minimize(sphere, &[f64::NAN], &opts).unwrap_err(),
            OptimError::NonFiniteX0
        );
        let bad = OptimOptions {
            x_tolerance: 0.0,
            ..opts
        };
        assert_eq!(minimize(sphere, &[1.0], &bad).unwrap_err(), OptimError::InvalidOptions);
    }

    #[test]
    fn infinite_start_with_finite_vertex() {
        // feasible region x > 0.02; the start is infeasible but a seeded vertex is not
        let f = |x: &[f64]| {
            if x[0] > 0.02 {
                (x[0] - 1.0).powi(2)
            } else {
                f64::INFINITY
            }
        };
        let r = minimize(f, &[0.0], &OptimOptions::default()).unwrap();
        assert!((r.x_min[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn retreats_from_infeasible_region() {
        let f = |x: &[f64]| {
            if x[0] < 0.5 {
                f64::NAN
            } else {
                (x[0] - 0.6).powi(2) + (x[1] + 2.0).powi(2)
            }
        };
        let r = minimize(f, &[2.0, 2.0], &OptimOptions::default()).unwrap();
        assert!((r.x_min[0] - 0.6).abs() < 1e-5 && (r.x_min[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn generic_over_f32() {
        let opts = OptimOptions::<f32> {
            x_tolerance: 1e-5,
            f_tolerance: 1e-7,
            ..OptimOptions::default()
        };
        let r = minimize(
            |x: &[f32]| x.iter().map(|v| (v - 0.5) * (v - 0.5)).sum(),
            &[1.0f32; 3],
            &opts,
        )
        .unwrap();
        assert!(r.x_min.iter().all(|x| (x - 0.5).abs() < 1e-3));
    }

    #[test]
    fn observer_sees_every_iteration() {
        let mut seen = 0usize;
        let r = minimize_observed(sphere, &[1.0, -2.0, 0.5], &OptimOptions::default(), |s| {
            assert_eq!(s.iteration, seen);
            assert!(s.best_value <= s.worst_value);
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, r.iterations + 1);
    }
}
