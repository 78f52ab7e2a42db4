//! Hermite interpolation of the entropy kernel from below.
//!
//! The kernel is `eta(x) = -x ln x` on `[0, 1]`. For an order t we build
//! `p(x) = sum_{k=1}^t a_k x^k` matching eta in value and first derivative
//! at `floor(t/2)` interior knots, with the extra condition `p(1) = 0` when
//! t is odd. The interpolation error carries the sign of
//! `eta^{(t+1)} * prod (x - x_i)^2 * (x - 1)^{t odd}`, which is nonnegative
//! on `[0, 1]` for every admissible knot set, so p is a true lower envelope
//! no matter which knots are chosen. Knot choice only affects how tight the
//! resulting bound is.

use crate::error::{Error, Result};
use crate::tol;

/// `eta(x) = -x ln x`, extended by continuity with `eta(0) = 0`.
pub fn eta(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "eta argument",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(-x * x.ln())
}

/// `eta'(x) = -ln x - 1` for `x` in `(0, 1]`.
pub fn eta_prime(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || x == 0.0 {
        return Err(Error::Domain {
            what: "eta' argument",
            value: x,
        });
    }
    Ok(-x.ln() - 1.0)
}

/// `p(x) = sum_{k=1}^t a_k x^k` with `coeffs[k-1] = a_k`.
#[derive(Debug, Clone)]
pub struct LowerPolynomial {
    pub t: u32,
    pub coeffs: Vec<f64>,
    pub knots: Vec<f64>,
    /// Infinity-norm condition number of the Hermite system, as solved.
    /// Purely diagnostic; not part of the serialized form.
    pub condition_estimate: f64,
}

impl LowerPolynomial {
    /// Horner evaluation of `sum a_k x^k`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &a in self.coeffs.iter().rev() {
            acc = acc * x + a;
        }
        acc * x
    }

    /// Derivative `sum k a_k x^{k-1}`.
    pub fn eval_derivative(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &a) in self.coeffs.iter().enumerate().rev() {
            acc = acc * x + (k as f64 + 1.0) * a;
        }
        acc
    }
}

pub fn evaluate_polynomial(poly: &LowerPolynomial, x: f64) -> f64 {
    poly.eval(x)
}

fn validate_knots(t: u32, knots: &[f64]) -> Result<()> {
    let expected = (t / 2) as usize;
    if knots.len() != expected {
        return Err(Error::KnotCount {
            t,
            expected,
            got: knots.len(),
        });
    }
    for &x in knots {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::KnotRange { value: x });
        }
    }
    for pair in knots.windows(2) {
        let gap = pair[1] - pair[0];
        if gap <= 0.0 {
            return Err(Error::KnotOrder);
        }
        if gap < tol::KNOT_SEPARATION {
            return Err(Error::KnotSeparation { gap });
        }
    }
    Ok(())
}

/// Builds the order-t lower polynomial through the given interior knots.
///
/// Conditions: `p(x_i) = eta(x_i)` and `p'(x_i) = eta'(x_i)` at each of the
/// `floor(t/2)` knots, plus `p(1) = 0` for odd t. That is a square t x t
/// linear system in the coefficients. For `t = 1` there are no conditions
/// beyond `p(1) = 0` and the polynomial is identically zero.
pub fn hermite_lower_polynomial(t: u32, knots: &[f64]) -> Result<LowerPolynomial> {
    if t == 0 || t > 8 {
        return Err(Error::UnsupportedOrder {
            t,
            supported: "1..=8",
        });
    }
    validate_knots(t, knots)?;
    let n = t as usize;
    if t == 1 {
        return Ok(LowerPolynomial {
            t,
            coeffs: vec![0.0],
            knots: Vec::new(),
            condition_estimate: 1.0,
        });
    }

    let mut a = vec![0.0f64; n * n];
    let mut b = vec![0.0f64; n];
    let mut row = 0;
    for &x in knots {
        for k in 1..=n {
            a[row * n + (k - 1)] = x.powi(k as i32);
        }
        b[row] = eta(x)?;
        row += 1;
        for k in 1..=n {
            a[row * n + (k - 1)] = k as f64 * x.powi(k as i32 - 1);
        }
        b[row] = eta_prime(x)?;
        row += 1;
    }
    if t % 2 == 1 {
        for k in 0..n {
            a[row * n + k] = 1.0;
        }
        b[row] = 0.0;
        row += 1;
    }
    debug_assert_eq!(row, n);

    let (coeffs, condition_estimate) = solve_with_refinement(&a, &b, n)?;
    Ok(LowerPolynomial {
        t,
        coeffs,
        knots: knots.to_vec(),
        condition_estimate,
    })
}

/// Largest value of `p(x) - eta(x)` over a uniform grid on `[0, 1]`
/// including both endpoints. Nonpositive (up to rounding) certifies the
/// lower-envelope property on the grid.
pub fn verify_lower_bound(poly: &LowerPolynomial, samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(Error::Domain {
            what: "sample count",
            value: samples as f64,
        });
    }
    let mut worst = f64::NEG_INFINITY;
    for j in 0..samples {
        let x = j as f64 / (samples - 1) as f64;
        let gap = poly.eval(x) - eta(x)?;
        if gap > worst {
            worst = gap;
        }
    }
    Ok(worst)
}

/// Gaussian elimination with partial pivoting and one step of iterative
/// refinement. Returns the solution and an infinity-norm condition number.
fn solve_with_refinement(a: &[f64], b: &[f64], n: usize) -> Result<(Vec<f64>, f64)> {
    let norm_a = inf_norm(a, n);
    let (lu, perm) = factorize(a, n, norm_a)?;
    let mut x = lu_solve(&lu, &perm, b, n);

    // One refinement pass: r = b - A x, then x += A^{-1} r.
    let mut r = vec![0.0f64; n];
    for i in 0..n {
        let mut acc = b[i];
        for j in 0..n {
            acc -= a[i * n + j] * x[j];
        }
        r[i] = acc;
    }
    let dx = lu_solve(&lu, &perm, &r, n);
    for i in 0..n {
        x[i] += dx[i];
    }

    // Condition estimate: ||A||_inf * ||A^{-1}||_inf, columns of the inverse
    // obtained by n solves. Cheap at n <= 8.
    let mut inv_norm = 0.0f64;
    let mut col_sums = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    for j in 0..n {
        e.fill(0.0);
        e[j] = 1.0;
        let col = lu_solve(&lu, &perm, &e, n);
        for i in 0..n {
            col_sums[i] += col[i].abs();
        }
    }
    for &s in &col_sums {
        inv_norm = inv_norm.max(s);
    }
    Ok((x, norm_a * inv_norm))
}

fn inf_norm(a: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn factorize(a: &[f64], n: usize, norm_a: f64) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut lu = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lu[col * n + col].abs();
        for r in (col + 1)..n {
            let mag = lu[r * n + col].abs();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag <= f64::EPSILON * norm_a * n as f64 {
            return Err(Error::SingularSystem {
                condition: f64::INFINITY,
            });
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap(col * n + j, pivot_row * n + j);
            }
            perm.swap(col, pivot_row);
        }
        let pivot = lu[col * n + col];
        for r in (col + 1)..n {
            let factor = lu[r * n + col] / pivot;
            lu[r * n + col] = factor;
            for j in (col + 1)..n {
                lu[r * n + j] -= factor * lu[col * n + j];
            }
        }
    }
    Ok((lu, perm))
}

fn lu_solve(lu: &[f64], perm: &[usize], b: &[f64], n: usize) -> Vec<f64> {
    let mut y = vec![0.0f64; n];
    for i in 0..n {
        let mut acc = b[perm[i]];
        for j in 0..i {
            acc -= lu[i * n + j] * y[j];
        }
        y[i] = acc;
    }
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in (i + 1)..n {
            acc -= lu[i * n + j] * y[j];
        }
        y[i] = acc / lu[i * n + i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    // ===== kernel =====

    #[test]
    fn eta_endpoint_values_and_maximum() {
        assert_eq!(eta(0.0).unwrap(), 0.0);
        assert_eq!(eta(1.0).unwrap(), 0.0);
        let at_inv_e = eta(1.0 / std::f64::consts::E).unwrap();
        assert!((at_inv_e - 1.0 / std::f64::consts::E).abs() < 1e-15);
        assert!(eta(-0.1).is_err());
        assert!(eta(1.1).is_err());
        assert!(eta_prime(0.0).is_err());
        assert!((eta_prime(1.0).unwrap() + 1.0).abs() < 1e-15);
    }

    // ===== construction against the t = 2 closed form =====

    #[test]
    fn order_two_matches_analytic_coefficients() {
        // For t = 2 the system solves to a1 = 1 - ln x1, a2 = -1/x1.
        for &x1 in &[0.2, 0.5, 2.0 / 3.0, 0.9] {
            let poly = hermite_lower_polynomial(2, &[x1]).unwrap();
            assert!(
                (poly.coeffs[0] - (1.0 - x1.ln())).abs() < 1e-13,
                "a1 at {x1}"
            );
            assert!((poly.coeffs[1] + 1.0 / x1).abs() < 1e-13, "a2 at {x1}");
        }
    }

    #[test]
    fn order_one_is_the_zero_polynomial() {
        let poly = hermite_lower_polynomial(1, &[]).unwrap();
        assert_eq!(poly.coeffs, vec![0.0]);
        assert_eq!(poly.eval(0.37), 0.0);
        assert_eq!(poly.eval_derivative(0.37), 0.0);
    }

    #[test]
    fn interpolation_conditions_hold() {
        let knots = [0.21, 0.58, 0.83];
        for t in [6u32, 7] {
            let poly = hermite_lower_polynomial(t, &knots).unwrap();
            for &x in &knots {
                assert!(
                    (poly.eval(x) - eta(x).unwrap()).abs() < 1e-12,
                    "value at {x}, t={t}"
                );
                assert!(
                    (poly.eval_derivative(x) - eta_prime(x).unwrap()).abs() < 1e-11,
                    "slope at {x}, t={t}"
                );
            }
            if t % 2 == 1 {
                assert!(poly.eval(1.0).abs() < 1e-12, "p(1) = 0 for odd t");
            }
            assert!(poly.condition_estimate.is_finite());
        }
    }

    #[test]
    fn polynomial_stays_below_eta() {
        let poly = hermite_lower_polynomial(5, &[0.3, 0.7]).unwrap();
        let worst = verify_lower_bound(&poly, 20_001).unwrap();
        assert!(worst <= 1e-12, "worst violation {worst}");
    }

    #[test]
    fn knot_validation_errors() {
        assert!(matches!(
            hermite_lower_polynomial(4, &[0.5]),
            Err(Error::KnotCount { expected: 2, .. })
        ));
        assert!(matches!(
            hermite_lower_polynomial(2, &[1.0]),
            Err(Error::KnotRange { .. })
        ));
        assert!(matches!(
            hermite_lower_polynomial(4, &[0.7, 0.3]),
            Err(Error::KnotOrder)
        ));
        assert!(matches!(
            hermite_lower_polynomial(4, &[0.5, 0.5 + 1e-9]),
            Err(Error::KnotSeparation { .. })
        ));
        assert!(matches!(
            hermite_lower_polynomial(9, &[0.1, 0.2, 0.3, 0.4]),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let poly = hermite_lower_polynomial(4, &[0.3, 0.8]).unwrap();
        let h = 1e-6;
        for &x in &[0.1, 0.45, 0.9] {
            let fd = (poly.eval(x + h) - poly.eval(x - h)) / (2.0 * h);
            assert!((poly.eval_derivative(x) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn evaluate_polynomial_free_function_agrees() {
        let poly = hermite_lower_polynomial(2, &[0.4]).unwrap();
        assert_eq!(evaluate_polynomial(&poly, 0.25), poly.eval(0.25));
    }
}
