//! Associated Laguerre polynomials and the basis functions built on them.
//!
//! The convention is the one generated by
//!
//! ```text
//! U(x, t) = (1 - t)^-(m+1) exp(-x t / (1 - t)) = sum_k L_k^m(x) t^k
//! ```
//!
//! so that `L_k^m(0) = C(k+m, k)` and the leading coefficient is `(-1)^k / k!`.
//! Exact coefficients live in [`RationalPolynomial`]; floating evaluation uses
//! the forward three-term recurrence and is generic over [`Real`].

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::{binomial, factorial};
use crate::scalar::{lit, Real};

/// Polynomial with exact rational coefficients, `coeffs[i]` multiplying `x^i`.
///
/// Trailing zero coefficients are stripped on construction, so the zero
/// polynomial has an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Exact value at a rational point (Horner).
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Floating value by Horner on the rounded coefficients.
    ///
    /// Suffers from cancellation for large degree; prefer [`laguerre_eval`]
    /// for Laguerre polynomials of degree above 15.
    pub fn eval<T: Real>(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x + T::from_rational(c))
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Exact coefficients of `L_k^m`:
/// `L_k^m(x) = sum_j (-1)^j C(k+m, k-j) x^j / j!`.
pub fn laguerre_coeffs(k: u32, m: u32) -> RationalPolynomial {
    let coeffs = (0..=k)
        .map(|j| {
            let num = binomial(k + m, k - j);
            let signed = if j % 2 == 0 { num } else { -num };
            BigRational::new(signed, factorial(j))
        })
        .collect();
    RationalPolynomial::new(coeffs)
}

/// `L_k^m(x)` by the forward recurrence
/// `(j+1) L_{j+1} = (2j+m+1-x) L_j - (j+m) L_{j-1}`.
pub fn laguerre_eval<T: Real>(k: u32, m: u32, x: T) -> T {
    let m_t: T = lit(m as f64);
    let mut prev = T::one();
    if k == 0 {
        return prev;
    }
    let mut cur = T::one() + m_t - x;
    for j in 1..k {
        let j_t: T = lit(j as f64);
        let next = ((lit::<T>(2.0) * j_t + m_t + T::one() - x) * cur - (j_t + m_t) * prev)
            .quotient(j_t + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Values of `L_k^m(x)` for every `k` in `0..=k_max` from one recurrence sweep.
pub fn laguerre_sweep<T: Real>(k_max: u32, m: u32, x: T) -> Vec<T> {
    let m_t: T = lit(m as f64);
    let mut out = Vec::with_capacity(k_max as usize + 1);
    out.push(T::one());
    if k_max == 0 {
        return out;
    }
    out.push(T::one() + m_t - x);
    for j in 1..k_max as usize {
        let j_t: T = lit(j as f64);
        let next = ((lit::<T>(2.0) * j_t + m_t + T::one() - x) * out[j] - (j_t + m_t) * out[j - 1])
            .quotient(j_t + T::one());
        out.push(next);
    }
    out
}

/// Derivative of `L_k^m`, using `d/dx L_k^m = -L_{k-1}^{m+1}`.
pub fn laguerre_derivative<T: Real>(k: u32, m: u32, x: T) -> T {
    if k == 0 {
        T::zero()
    } else {
        -laguerre_eval(k - 1, m + 1, x)
    }
}

/// Basis function `u_{k,m}(x) = x^{m/2} e^{-x/2} L_k^m(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisFunction {
    pub k: u32,
    pub m: u32,
}

impl BasisFunction {
    pub fn new(k: u32, m: u32) -> Self {
        Self { k, m }
    }

    pub fn eval<T: Real>(&self, x: T) -> T {
        u_eval(self.k, self.m, x)
    }

    /// `∫_0^∞ u_{k,m}(x)^2 dx = (k+m)!/k!`.
    pub fn norm_squared(&self) -> BigRational {
        BigRational::new(factorial(self.k + self.m), factorial(self.k))
    }

    /// Value, first and second derivative at `x > 0`.
    pub fn eval_with_derivatives<T: Real>(&self, x: T) -> (T, T, T) {
        let (k, m) = (self.k, self.m);
        let half: T = lit(0.5);
        let mh: T = lit(m as f64 / 2.0);
        let envelope = x.powf(mh) * (-half * x).exp();
        let slope = mh / x - half;
        let d_envelope = envelope * slope;
        let dd_envelope = envelope * (slope * slope - mh / (x * x));
        let l = laguerre_eval(k, m, x);
        let dl = laguerre_derivative(k, m, x);
        let ddl = if k < 2 {
            T::zero()
        } else {
            laguerre_eval(k - 2, m + 2, x)
        };
        (
            envelope * l,
            d_envelope * l + envelope * dl,
            dd_envelope * l + lit::<T>(2.0) * d_envelope * dl + envelope * ddl,
        )
    }

    /// Number of sign changes on `64(k+1)` samples over `[0, 4(k+m+1)]`.
    pub fn node_count(&self) -> usize {
        let x_max = 4.0 * f64::from(self.k + self.m + 1);
        let samples = 64 * (self.k as usize + 1);
        count_sign_changes((0..=samples).map(|i| {
            let x = x_max * i as f64 / samples as f64;
            self.eval(x)
        }))
    }
}

/// `u_{k,m}(x)` for `x ≥ 0`.
pub fn u_eval<T: Real>(k: u32, m: u32, x: T) -> T {
    if x.is_zero() {
        return if m == 0 {
            laguerre_eval(k, 0, x)
        } else {
            T::zero()
        };
    }
    x.powf(lit(m as f64 / 2.0)) * (-x / lit(2.0)).exp() * laguerre_eval(k, m, x)
}

/// `(x, |u_{k,m}(x)|^2 / ((k+m)!/k!))` on `n_points` equally spaced samples of
/// `[0, x_max]`; the sampled curve has unit integral over `[0, ∞)`.
pub fn u_plot_samples(k: u32, m: u32, x_max: f64, n_points: usize) -> Vec<(f64, f64)> {
    assert!(n_points >= 2, "need at least two samples");
    let norm = f64::from_rational(&BasisFunction::new(k, m).norm_squared());
    (0..n_points)
        .map(|i| {
            let x = x_max * i as f64 / (n_points - 1) as f64;
            let u = u_eval(k, m, x);
            (x, u * u / norm)
        })
        .collect()
}

/// Sign changes in a sequence, ignoring exact zeros.
pub fn count_sign_changes<T: Real>(values: impl IntoIterator<Item = T>) -> usize {
    let mut last_positive: Option<bool> = None;
    let mut changes = 0;
    for v in values {
        if v.is_zero() || v.is_nan() {
            continue;
        }
        let positive = v > T::zero();
        if let Some(prev) = last_positive {
            if prev != positive {
                changes += 1;
            }
        }
        last_positive = Some(positive);
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use approx::assert_relative_eq;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn low_order_coefficients() {
        assert_eq!(laguerre_coeffs(0, 5).coeffs(), &[q(1, 1)]);
        assert_eq!(laguerre_coeffs(1, 0).coeffs(), &[q(1, 1), q(-1, 1)]);
        assert_eq!(laguerre_coeffs(2, 0).coeffs(), &[q(1, 1), q(-2, 1), q(1, 2)]);
        assert_eq!(laguerre_coeffs(2, 0).to_string(), "1 - 2*x + 1/2*x^2");
    }

    #[test]
    fn degree_leading_coefficient_and_origin_value() {
        for k in 0..=12u32 {
            for m in 0..=12u32 {
                let p = laguerre_coeffs(k, m);
                assert_eq!(p.degree(), Some(k as usize));
                let sign = if k % 2 == 0 { 1 } else { -1 };
                assert_eq!(
                    p.leading_coefficient().unwrap(),
                    &BigRational::new(BigInt::from(sign), factorial(k))
                );
                assert_eq!(p.eval_exact(&BigRational::zero()), BigRational::from(binomial(k + m, k)));
            }
        }
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(laguerre_eval(0, 3, 7.5), 1.0);
        assert_eq!(laguerre_eval(1, 0, 1.0), 0.0);
        assert_eq!(laguerre_eval(2, 0, 2.0), -1.0);
    }

    #[test]
    fn recurrence_matches_exact_coefficients() {
        for k in 0..=15u32 {
            for m in [0u32, 1, 3, 6] {
                let p = laguerre_coeffs(k, m);
                for i in 0..=50 {
                    let x = i as f64;
                    let exact = f64::from_rational(&p.eval_exact(&BigRational::from_float(x).unwrap()));
                    let rec = laguerre_eval(k, m, x);
                    let scale = exact.abs().max(1.0);
                    assert!(
                        (rec - exact).abs() <= 1e-10 * scale,
                        "k={k} m={m} x={x}: {rec} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn sweep_agrees_with_single_evaluations() {
        let xs = laguerre_sweep(20, 2, 3.7_f64);
        for (k, v) in xs.iter().enumerate() {
            assert_eq!(*v, laguerre_eval(k as u32, 2, 3.7));
        }
    }

    #[test]
    fn u_examples() {
        assert_eq!(u_eval(0, 0, 0.0), 1.0);
        assert_eq!(u_eval(0, 2, 0.0), 0.0);
        assert_eq!(u_eval(1, 0, 1.0), 0.0);
        assert!(u_eval(3, 1, 400.0_f64).abs() < 1e-70);
    }

    #[test]
    fn node_count_equals_k() {
        for k in 0..=10 {
            for m in 0..=5 {
                assert_eq!(BasisFunction::new(k, m).node_count(), k as usize, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = BasisFunction::new(3, 2);
        let x = 2.3_f64;
        let h = 1e-4;
        let (_, d1, d2) = b.eval_with_derivatives(x);
        let fd1 = (b.eval(x + h) - b.eval(x - h)) / (2.0 * h);
        let fd2 = (b.eval(x + h) - 2.0 * b.eval(x) + b.eval(x - h)) / (h * h);
        assert_relative_eq!(d1, fd1, max_relative = 1e-7);
        assert_relative_eq!(d2, fd2, max_relative = 1e-5);
    }

    #[test]
    fn plot_samples_are_normalized() {
        let samples = u_plot_samples(2, 1, 60.0, 6001);
        let h = samples[1].0 - samples[0].0;
        // Simpson
        let integral: f64 = samples
            .windows(3)
            .step_by(2)
            .map(|w| h / 3.0 * (w[0].1 + 4.0 * w[1].1 + w[2].1))
            .sum();
        assert_relative_eq!(integral, 1.0, max_relative = 1e-7);
        assert_eq!(samples[0].1, 0.0);
        let ground = u_plot_samples(0, 0, 10.0, 101);
        assert_eq!(ground[0].1, 1.0);
        assert!(ground.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn plot_samples_node_structure() {
        let one = u_plot_samples(1, 0, 10.0, 1001);
        let zero_at = one.iter().find(|(_, v)| *v == 0.0).map(|(x, _)| *x);
        assert_eq!(zero_at, Some(1.0));
        let signed: Vec<f64> = (0..2001).map(|i| u_eval(2, 1, 20.0 * i as f64 / 2000.0)).collect();
        assert_eq!(count_sign_changes(signed), 2);
    }

    #[test]
    fn generating_function_partial_sums() {
        for m in 0..=3u32 {
            for &t in &[-0.5f64, -0.2, 0.1, 0.35, 0.5] {
                for &x in &[0.0f64, 0.5, 2.0, 6.0, 10.0] {
                    let ls = laguerre_sweep(60, m, x);
                    let partial: f64 = ls.iter().enumerate().map(|(k, l)| l * t.powi(k as i32)).sum();
                    let closed = (1.0 - t).powi(-(m as i32 + 1)) * (-x * t / (1.0 - t)).exp();
                    assert!(
                        (partial - closed).abs() <= 1e-8 * closed.abs().max(1.0),
                        "m={m} t={t} x={x}: {partial} vs {closed}"
                    );
                }
            }
        }
    }
}
