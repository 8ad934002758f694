//! Scale functions W^(q), Z^(q) and the composite script-Z of the Poissonian
//! identities, all in closed exponential-sum form.

use num_complex::Complex64;

use crate::error::Result;
use crate::expsum::{conv_exp, real_part, ExpSumFunction};
use crate::model::LevyModel;

/// W^(q)(x) = sum_i e^{zeta_i x} / psi'(zeta_i) over the roots of psi = q.
#[derive(Debug, Clone)]
pub struct ScaleFunction {
    model: LevyModel,
    q: f64,
    w: ExpSumFunction,
}

impl ScaleFunction {
    pub fn new(model: &LevyModel, q: f64) -> Result<Self> {
        let roots = model.all_roots(q)?;
        let terms = roots.roots.iter().map(|z| (model.psi_prime_complex(*z).inv(), *z)).collect();
        Ok(ScaleFunction { model: model.clone(), q, w: ExpSumFunction::new(terms) })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn exp_sum(&self) -> &ExpSumFunction {
        &self.w
    }

    pub fn terms(&self) -> &[(Complex64, Complex64)] {
        self.w.terms()
    }

    pub fn w(&self, x: f64) -> Result<f64> {
        self.w.eval(x)
    }

    /// int_0^x e^{-theta z} W(z) dz, zero for x <= 0.
    pub fn w_bar(&self, x: f64, theta: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let mut s = Complex64::from(0.0);
        for (a, z) in self.terms() {
            s += a * conv_exp(&[z - theta, Complex64::from(0.0)], x)?;
        }
        real_part(s)
    }

    /// e^{theta x} W_bar(x; theta) = sum_i a_i (e^{zeta_i .} * e^{theta .})(x).
    pub(crate) fn w_bar_tilted(&self, x: f64, theta: f64) -> Result<Complex64> {
        if x <= 0.0 {
            return Ok(Complex64::from(0.0));
        }
        self.w.convolve_with(&[Complex64::from(theta)], x)
    }

    pub fn z(&self, x: f64, theta: f64) -> Result<f64> {
        let kappa = self.q - self.model.psi(theta)?;
        if x <= 0.0 {
            return Ok((theta * x).exp());
        }
        let v = Complex64::from((theta * x).exp()) + self.w_bar_tilted(x, theta)? * kappa;
        real_part(v)
    }
}

/// Pair of scale functions at q and q + lambda, which is all script-Z needs.
#[derive(Debug, Clone)]
pub struct ScalePair {
    pub lo: ScaleFunction,
    pub hi: ScaleFunction,
    pub lambda: f64,
}

impl ScalePair {
    pub fn new(model: &LevyModel, q: f64, lambda: f64) -> Result<Self> {
        Ok(ScalePair { lo: ScaleFunction::new(model, q)?, hi: ScaleFunction::new(model, q + lambda)?, lambda })
    }

    /// int_0^{m} W^(q)(x - y) Z^(q+lambda)(y; theta) dy with m = min(a, x).
    fn head_integral(&self, a: f64, x: f64, theta: f64) -> Result<Complex64> {
        let m = a.min(x);
        if m <= 0.0 {
            return Ok(Complex64::from(0.0));
        }
        let kappa = self.hi.q - self.hi.model.psi(theta)?;
        let th = Complex64::from(theta);
        let mut s = Complex64::from(0.0);
        for (ai, zi) in self.lo.terms() {
            let mut inner = conv_exp(&[*zi, th], m)?;
            for (bj, xj) in self.hi.terms() {
                inner += bj * kappa * conv_exp(&[*zi, *xj, th], m)?;
            }
            s += ai * conv_exp(&[*zi], x - m)? * inner;
        }
        Ok(s)
    }

    /// Script-Z via Z^(q)(x; theta) + lambda int_0^a W^(q)(x - y) Z^(q+lambda)(y; theta) dy.
    pub fn script_z(&self, a: f64, x: f64, theta: f64) -> Result<f64> {
        if x <= a {
            return self.hi.z(x, theta);
        }
        if a < 0.0 {
            return real_part(Complex64::from(self.lo.z(x, theta)?) - self.negative_part(a, x, theta)? * self.lambda);
        }
        let z = self.lo.z(x, theta)?;
        real_part(Complex64::from(z) + self.head_integral(a, x, theta)? * self.lambda)
    }

    /// int_a^{min(0, x)} W^(q)(x - y) e^{theta y} dy for a < 0.
    fn negative_part(&self, a: f64, x: f64, theta: f64) -> Result<Complex64> {
        let m0 = x.min(0.0);
        Ok(self.lo.w_bar_tilted(x - a, theta)? * (theta * a).exp()
            - self.lo.w_bar_tilted(x - m0, theta)? * (theta * m0).exp())
    }

    /// Script-Z via Z^(q+lambda)(x; theta) - lambda int_a^x W^(q)(x - y) Z^(q+lambda)(y; theta) dy.
    pub fn script_z_first_form(&self, a: f64, x: f64, theta: f64) -> Result<f64> {
        if x <= a {
            return self.hi.z(x, theta);
        }
        let below = if a < 0.0 { self.negative_part(a, x, theta)? } else { Complex64::from(0.0) };
        if x <= 0.0 {
            return real_part(Complex64::from((theta * x).exp()) - below * self.lambda);
        }
        let kappa = self.hi.q - self.hi.model.psi(theta)?;
        let th = Complex64::from(theta);
        let mut full = Complex64::from(0.0);
        for (ai, zi) in self.lo.terms() {
            let mut inner = conv_exp(&[*zi, th], x)?;
            for (bj, xj) in self.hi.terms() {
                inner += bj * kappa * conv_exp(&[*zi, *xj, th], x)?;
            }
            full += ai * inner;
        }
        let tail = full - self.head_integral(a.max(0.0), x, theta)?;
        real_part(Complex64::from(self.hi.z(x, theta)?) - (tail + below) * self.lambda)
    }
}

pub fn w(model: &LevyModel, q: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Ok(0.0);
    }
    ScaleFunction::new(model, q)?.w(x)
}

pub fn w_bar(model: &LevyModel, q: f64, x: f64, theta: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    ScaleFunction::new(model, q)?.w_bar(x, theta)
}

pub fn z(model: &LevyModel, q: f64, x: f64, theta: f64) -> Result<f64> {
    ScaleFunction::new(model, q)?.z(x, theta)
}

pub fn script_z(model: &LevyModel, q: f64, lambda: f64, a: f64, x: f64, theta: f64) -> Result<f64> {
    ScalePair::new(model, q, lambda)?.script_z(a, x, theta)
}
