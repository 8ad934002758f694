//! Exponential sums and their convolutions.
//!
//! The workhorse is [`conv_exp`], the convolution of exponentials
//! `(e^{t_0 .} * ... * e^{t_k .})(x) = x^k exp[t_0 x, ..., t_k x]`, where the
//! bracket is the divided difference of `exp`. Every closed-form integral of
//! a scale function reduces to a sum of these, and the divided difference is
//! evaluated without cancellation when exponents nearly coincide.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const OVERFLOW_EXPONENT: f64 = 700.0;
const TAYLOR_SPREAD: f64 = 1.0;

/// Divided difference of `exp` at the given nodes (any order, repeats allowed).
pub fn exp_divdiff(z: &[Complex64]) -> Complex64 {
    let k = z.len() - 1;
    if k == 0 {
        return z[0].exp();
    }
    let (mut ia, mut ib, mut spread) = (0, 0, 0.0);
    for i in 0..z.len() {
        for j in (i + 1)..z.len() {
            let d = (z[i] - z[j]).norm();
            if d > spread {
                spread = d;
                ia = i;
                ib = j;
            }
        }
    }
    if spread <= TAYLOR_SPREAD {
        return taylor_divdiff(z);
    }
    let without =
        |skip: usize| -> Vec<Complex64> { z.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect() };
    (exp_divdiff(&without(ia)) - exp_divdiff(&without(ib))) / (z[ib] - z[ia])
}

/// exp[z_0..z_k] = e^mu sum_n h_n(z - mu) / (n + k)!, with h_n the complete
/// homogeneous symmetric polynomials of the shifted nodes.
fn taylor_divdiff(z: &[Complex64]) -> Complex64 {
    let k = z.len() - 1;
    let mu = z.iter().sum::<Complex64>() / z.len() as f64;
    let w: Vec<Complex64> = z.iter().map(|v| v - mu).collect();
    const N: usize = 40;
    let mut h = [Complex64::from(0.0); N];
    h[0] = Complex64::from(1.0);
    for wj in &w {
        for n in 1..N {
            let prev = h[n - 1];
            h[n] += wj * prev;
        }
    }
    // |h_n| / (n + k)! <= r^n / n! bounds the tail independently of cancellation
    let r = w.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut fact = (1..=k).fold(1.0, |a, i| a * i as f64);
    let mut bound = 1.0;
    let mut sum = Complex64::from(0.0);
    for (n, hn) in h.iter().enumerate() {
        if n > 0 {
            fact *= (n + k) as f64;
            bound *= r / n as f64;
        }
        sum += hn / fact;
        if bound < 1e-17 * sum.norm() {
            break;
        }
    }
    mu.exp() * sum
}

/// `(e^{t_0 .} * ... * e^{t_k .})(x)` for x >= 0; zero for x < 0 when k >= 1.
pub fn conv_exp(t: &[Complex64], x: f64) -> Result<Complex64> {
    let k = t.len() - 1;
    if x < 0.0 {
        return Ok(Complex64::from(0.0));
    }
    if x == 0.0 {
        return Ok(Complex64::from(if k == 0 { 1.0 } else { 0.0 }));
    }
    let top = t.iter().map(|v| v.re * x).fold(f64::NEG_INFINITY, f64::max);
    if top > OVERFLOW_EXPONENT {
        return Err(Error::OverflowRisk { exponent: top });
    }
    let z: Vec<Complex64> = t.iter().map(|v| v * x).collect();
    Ok(exp_divdiff(&z) * x.powi(k as i32))
}

pub(crate) fn real_part(v: Complex64) -> Result<f64> {
    if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) {
        return Err(Error::ComplexResidue { imag: v.im });
    }
    Ok(v.re)
}

/// f(x) = sum_i a_i e^{zeta_i x} on x >= 0, zero on x < 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumFunction {
    terms: Vec<(Complex64, Complex64)>,
}

impl ExpSumFunction {
    pub fn new(terms: Vec<(Complex64, Complex64)>) -> Self {
        ExpSumFunction { terms }
    }

    /// (coefficient, exponent) pairs.
    pub fn terms(&self) -> &[(Complex64, Complex64)] {
        &self.terms
    }

    pub fn eval_complex(&self, x: f64) -> Result<Complex64> {
        let mut s = Complex64::from(0.0);
        for (a, z) in &self.terms {
            s += a * conv_exp(&[*z], x)?;
        }
        Ok(if x < 0.0 { Complex64::from(0.0) } else { s })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        real_part(self.eval_complex(x)?)
    }

    /// sum_i a_i (e^{t_0 .} * ... * e^{zeta_i .})(x): f convolved with exponentials.
    pub fn convolve_with(&self, extra: &[Complex64], x: f64) -> Result<Complex64> {
        let mut nodes = Vec::with_capacity(extra.len() + 1);
        let mut s = Complex64::from(0.0);
        for (a, z) in &self.terms {
            nodes.clear();
            nodes.push(*z);
            nodes.extend_from_slice(extra);
            s += a * conv_exp(&nodes, x)?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::from(x)
    }

    #[test]
    fn two_nodes_match_closed_form() {
        for &(a, b) in &[(0.3, -1.2), (5.0, -7.0), (2.0, 2.0 + 1e-13), (0.0, 1e-6), (-40.0, 30.0)] {
            let dd = exp_divdiff(&[c(a), c(b)]).re;
            let exact = if (a - b).abs() < 1e-9 {
                f64::exp(0.5 * (a + b))
            } else {
                (f64::exp_m1(a - b) * f64::exp(b)) / (a - b)
            };
            assert!((dd - exact).abs() <= 1e-12 * exact.abs(), "{a} {b}: {dd} vs {exact}");
        }
    }

    #[test]
    fn repeated_nodes_give_derivatives() {
        // exp[z, z, z] = e^z / 2
        for &z in &[-3.0, 0.0, 0.7, 12.0] {
            let dd = exp_divdiff(&[c(z), c(z), c(z)]).re;
            assert!((dd - 0.5 * f64::exp(z)).abs() <= 1e-13 * f64::exp(z));
        }
    }

    #[test]
    fn convolution_matches_direct_integral() {
        // (e^{a.} * e^{b.} * 1)(x) = int_0^x (e^{a s} - e^{b s})/(a - b) ... closed form
        let (a, b, x) = (0.8f64, -1.5f64, 2.3f64);
        let direct = {
            let f = |t: f64| (f64::exp(t * x) - 1.0) / t;
            (f(a) - f(b)) / (a - b)
        };
        let v = conv_exp(&[c(a), c(b), c(0.0)], x).unwrap().re;
        assert!((v - direct).abs() < 1e-13 * direct.abs());
    }

    #[test]
    fn complex_conjugate_nodes_are_real() {
        let z = Complex64::new(0.4, 1.7);
        let v = conv_exp(&[z, z.conj()], 1.9).unwrap();
        assert!(v.im.abs() < 1e-14);
        // e^{-0.4 x} ... closed form: e^{re x} sin(im x)/im
        let exact = f64::exp(0.4 * 1.9) * f64::sin(1.7 * 1.9) / 1.7;
        assert!((v.re - exact).abs() < 1e-13);
    }

    #[test]
    fn overflow_guard() {
        assert!(matches!(conv_exp(&[c(80.0)], 10.0), Err(Error::OverflowRisk { .. })));
        assert!(conv_exp(&[c(-80.0)], 10.0).is_ok());
    }

    #[test]
    fn boundary_values() {
        assert_eq!(conv_exp(&[c(1.0)], 0.0).unwrap().re, 1.0);
        assert_eq!(conv_exp(&[c(1.0), c(2.0)], 0.0).unwrap().re, 0.0);
        assert_eq!(conv_exp(&[c(1.0), c(2.0)], -1.0).unwrap().re, 0.0);
    }
}
