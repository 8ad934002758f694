//! Fluctuation identities at Poisson observation epochs.
//!
//! Notation: (a_i, zeta_i) are the residues and roots at level q, (b_j, xi_j)
//! those at q + lambda, and C[t_0, ..., t_k](x) is the exponential convolution
//! of [`crate::expsum::conv_exp`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expsum::{conv_exp, real_part};
use crate::model::LevyModel;
use crate::scale::{ScaleFunction, ScalePair};

const KAPPA_SWITCH: f64 = 1e-8;
const PHI_SWITCH: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct FluctContext {
    model: LevyModel,
    q: f64,
    lambda: f64,
    scales: ScalePair,
    phi: f64,
    psi_prime_phi: f64,
    top: Dominant,
}

/// The real root Phi(q + lambda) of largest real part and its residue: the
/// term of W^(q+lambda) that grows fastest.
#[derive(Debug, Clone, Copy)]
pub struct Dominant {
    pub index: usize,
    pub phi_hi: f64,
    pub b0: f64,
    /// Phi(q + lambda) - Phi(q).
    pub delta: f64,
}

/// A quantity split as `lead * e^{delta d} + rest`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub lead: f64,
    pub rest: f64,
}

impl Split {
    /// e^{-delta d} times the quantity.
    pub fn scaled(&self, delta: f64, d: f64) -> f64 {
        self.lead + self.rest * (-delta * d).exp()
    }
}

/// (e^{t d} - 1) / t, continuous at t = 0.
fn expm1_over(t: f64, d: f64) -> f64 {
    if t == 0.0 {
        d
    } else {
        (t * d).exp_m1() / t
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::from(x)
}

impl FluctContext {
    pub fn new(model: &LevyModel, q: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Precondition(format!("lambda must be positive, got {lambda}")));
        }
        let phi = model.phi(q)?;
        let psi_prime_phi = model.psi_prime(phi)?;
        let scales = ScalePair::new(model, q, lambda)?;
        let (index, (b0, z0)) = scales
            .hi
            .terms()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.re.partial_cmp(&b.1 .1.re).unwrap())
            .ok_or_else(|| Error::Precondition("scale function without terms".into()))?;
        let top = Dominant { index, phi_hi: z0.re, b0: b0.re, delta: z0.re - phi };
        Ok(FluctContext { model: model.clone(), q, lambda, scales, phi, psi_prime_phi, top })
    }

    pub fn dominant(&self) -> Dominant {
        self.top
    }

    /// Terms of W^(q+lambda) other than the dominant one.
    fn hi_minor(&self) -> impl Iterator<Item = &(Complex64, Complex64)> {
        let skip = self.top.index;
        self.hi().terms().iter().enumerate().filter(move |(i, _)| *i != skip).map(|(_, t)| t)
    }

    /// sum_j b_j C[xi_j, s, extra..](y) with the dominant j = 0 term replaced
    /// by its remainder b_0 C[s, extra..](y) / (s - Phi(q + lambda)), i.e. the
    /// part left after removing b_0 e^{Phi(q+lambda) y} / prod(Phi(q+lambda) - nodes).
    pub fn hi_rest(&self, y: f64, s: f64, extra: &[Complex64]) -> Result<f64> {
        let mut nodes = vec![c(s)];
        nodes.extend_from_slice(extra);
        let mut v = conv_exp(&nodes, y)? * (self.top.b0 / (s - self.top.phi_hi));
        for (bj, xj) in self.hi_minor() {
            let mut n = vec![*xj];
            n.extend_from_slice(&nodes);
            v += bj * conv_exp(&n, y)?;
        }
        real_part(v)
    }

    /// sum_j b_j C[xi_j - Phi(q+lambda), extra..](y) = e^{-Phi(q+lambda) y}
    /// sum_j b_j C[xi_j, extra + Phi(q+lambda)..](y); no overflow for large y.
    pub fn hi_shifted(&self, y: f64, extra: &[f64]) -> Result<f64> {
        let ph = self.top.phi_hi;
        let mut v = c(0.0);
        let mut n = Vec::with_capacity(extra.len() + 1);
        for (bj, xj) in self.hi().terms() {
            n.clear();
            n.push(xj - ph);
            n.extend(extra.iter().map(|e| c(e - ph)));
            v += bj * conv_exp(&n, y)?;
        }
        real_part(v)
    }

    /// M(y; theta) split off its e^{delta y} growth.
    pub fn m_split(&self, y: f64, theta: f64) -> Result<Split> {
        if y < 0.0 {
            return Err(Error::Precondition(format!("M needs y >= 0, got {y}")));
        }
        let Dominant { b0, delta, .. } = self.top;
        let lam = self.lambda;
        let t = if (self.phi - theta).abs() < PHI_SWITCH { 0.0 } else { theta - self.phi };
        // C[delta, t, 0](y) - e^{delta y} / ((delta - t) delta)
        let r0 = (delta * expm1_over(t, y) + 1.0) / (delta * (t - delta));
        let mut minor = c(0.0);
        for (bj, xj) in self.hi_minor() {
            minor += bj * conv_exp(&[xj - self.phi, c(t), c(0.0)], y)?;
        }
        let rest = expm1_over(t, y) + lam * (b0 * r0 + real_part(minor)?);
        Ok(Split { lead: -lam * lam * b0 / ((delta - t) * delta), rest: -lam * rest })
    }

    /// N(y) split off its e^{delta y} growth.
    pub fn n_split(&self, y: f64) -> Result<Split> {
        if y < 0.0 {
            return Err(Error::Precondition(format!("N needs y >= 0, got {y}")));
        }
        let Dominant { b0, delta, .. } = self.top;
        let lam = self.lambda;
        let mut minor = c(0.0);
        for (bj, xj) in self.hi_minor() {
            minor += bj * conv_exp(&[xj - self.phi, c(0.0), c(0.0)], y)?;
        }
        let d2 = delta * delta;
        let rest = self.psi_prime_phi + lam * y + lam * lam * (-b0 * (1.0 + delta * y) / d2 + real_part(minor)?);
        Ok(Split { lead: lam * lam * b0 / d2, rest })
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn psi_prime_phi(&self) -> f64 {
        self.psi_prime_phi
    }

    pub fn lo(&self) -> &ScaleFunction {
        &self.scales.lo
    }

    pub fn hi(&self) -> &ScaleFunction {
        &self.scales.hi
    }

    pub fn scales(&self) -> &ScalePair {
        &self.scales
    }

    pub fn script_z(&self, a: f64, x: f64, theta: f64) -> Result<f64> {
        self.scales.script_z(a, x, theta)
    }

    /// L(x, a; theta), via the script-Z form unless psi(theta) is within
    /// 1e-8 of q + lambda.
    pub fn l_fun(&self, x: f64, a: f64, theta: f64) -> Result<f64> {
        if x <= a {
            return real_part(-self.hi().w_bar_tilted(x, theta)?);
        }
        let kappa = self.q + self.lambda - self.model.psi(theta)?;
        if kappa.abs() > KAPPA_SWITCH {
            let num = (theta * a).exp() * self.lo().z(x - a, theta)? - self.script_z(a, x, theta)?;
            Ok(num / kappa)
        } else {
            self.l_fun_direct(x, a, theta)
        }
    }

    /// L(x, a; theta) from its defining integral representation.
    pub fn l_fun_direct(&self, x: f64, a: f64, theta: f64) -> Result<f64> {
        let th = c(theta);
        let mut v = -self.hi().w_bar_tilted(x, theta)?;
        if x > a {
            v += self.lo().w_bar_tilted(x - a, theta)? * (theta * a).exp();
            let a0 = a.max(0.0);
            let mut cross = c(0.0);
            for (ai, zi) in self.lo().terms() {
                for (bj, xj) in self.hi().terms() {
                    let full = conv_exp(&[*zi, *xj, th], x)?;
                    let head = conv_exp(&[*zi], x - a0)? * conv_exp(&[*zi, *xj, th], a0)?;
                    cross += ai * bj * (full - head);
                }
            }
            v += cross * self.lambda;
        }
        real_part(v)
    }

    /// M(y; theta) = -lambda [C[0, t](y) + lambda sum_j b_j C[xi_j - Phi, t, 0](y)],
    /// t = theta - Phi(q); the limiting branch sets t = 0.
    pub fn m_fun(&self, y: f64, theta: f64) -> Result<f64> {
        if y < 0.0 {
            return Err(Error::Precondition(format!("M needs y >= 0, got {y}")));
        }
        let t = if (self.phi - theta).abs() < PHI_SWITCH { 0.0 } else { theta - self.phi };
        let mut s = conv_exp(&[c(0.0), c(t)], y)?;
        let mut inner = c(0.0);
        for (bj, xj) in self.hi().terms() {
            inner += bj * conv_exp(&[xj - self.phi, c(t), c(0.0)], y)?;
        }
        s += inner * self.lambda;
        real_part(-s * self.lambda)
    }

    /// The derivative of M in y, in closed form.
    pub fn m_prime(&self, a: f64, theta: f64) -> Result<f64> {
        Ok(-self.lambda * (-(self.phi - theta) * a).exp() * (1.0 + self.lambda * self.hi().w_bar(a, theta)?))
    }

    pub fn n_fun(&self, y: f64) -> Result<f64> {
        if y < 0.0 {
            return Err(Error::Precondition(format!("N needs y >= 0, got {y}")));
        }
        let mut inner = c(0.0);
        for (bj, xj) in self.hi().terms() {
            inner += bj * conv_exp(&[xj - self.phi, c(0.0), c(0.0)], y)?;
        }
        real_part(c(self.psi_prime_phi + self.lambda * y) + inner * (self.lambda * self.lambda))
    }

    /// E_x[e^{-q tau + theta X_tau}; tau < T_b^+] for the first observation in [0, a].
    pub fn two_sided_transform(&self, x: f64, a: f64, b: f64, theta: f64) -> Result<f64> {
        if !(0.0 < a && a < b && x <= b) {
            return Err(Error::Precondition(format!("need 0 < a < b and x <= b, got a={a}, b={b}, x={x}")));
        }
        let ratio = self.script_z(a, x, self.phi)? / self.script_z(a, b, self.phi)?;
        Ok(self.lambda * (self.l_fun(x, a, theta)? - self.l_fun(b, a, theta)? * ratio))
    }

    /// Law of the continuous first passage T below 0 from y > 0:
    /// E_y[e^{-q T}; X_T in dz] = c_0 delta_0(dz) + sum_j c_j beta_j e^{beta_j z} dz on z <= 0.
    /// Returns (c_0, [c_j]); only level-q quantities enter, so this stays
    /// accurate for large y.
    pub fn passage_below_weights(&self, y: f64) -> Result<(f64, Vec<f64>)> {
        if !(y > 0.0) {
            return Err(Error::Precondition(format!("need y > 0, got {y}")));
        }
        let p = self.phi;
        let mut creep = c(0.0);
        for (ai, zi) in self.lo().terms() {
            creep += ai * (zi - p) * (zi * y).exp();
        }
        let e2 = self.model.eta() * self.model.eta();
        let c0 = 0.5 * e2 * real_part(creep)?;
        let mut cj = Vec::with_capacity(self.model.jumps().len());
        for j in self.model.jumps() {
            let mut s = c(0.0);
            for (ai, zi) in self.lo().terms() {
                let inv = 1.0 / (zi + j.beta);
                s += ai * ((zi * y).exp() * (1.0 / (j.beta + p) - inv) + (-j.beta * y).exp() * inv);
            }
            cj.push(j.alpha * real_part(s)?);
        }
        Ok((c0, cj))
    }

    /// E_x[e^{-q tau + theta X_tau}; tau < inf] for the first observation in [0, a].
    pub fn one_sided_transform(&self, x: f64, a: f64, theta: f64) -> Result<f64> {
        if !(a > 0.0) {
            return Err(Error::Precondition(format!("need a > 0, got {a}")));
        }
        Ok(self.lambda * self.l_fun(x, a, theta)?
            - self.m_fun(a, theta)? * self.script_z(a, x, self.phi)? / self.n_fun(a)?)
    }

    /// E_x[e^{-q tau + theta X_tau}; tau < inf] for the first observation in [0, inf).
    /// Needs theta < Phi(q + lambda).
    pub fn up_set_transform(&self, x: f64, theta: f64) -> Result<f64> {
        let phi_hi = self.model.phi(self.q + self.lambda)?;
        if !(theta < phi_hi) {
            return Err(Error::Precondition(format!("need theta < Phi(q + lambda) = {phi_hi}")));
        }
        let delta = phi_hi - self.phi;
        let escape = delta / (phi_hi - theta) * self.hi().z(x, self.phi)?;
        Ok(escape - self.lambda * real_part(self.hi().w_bar_tilted(x, theta)?)?)
    }

    /// E_x[e^{-q tau + theta X_tau}; tau < inf] for the first observation in (-inf, 0].
    /// Needs Phi(q) < theta.
    pub fn down_set_transform(&self, x: f64, theta: f64) -> Result<f64> {
        if !(theta > self.phi) {
            return Err(Error::Precondition(format!("need theta > Phi(q) = {}", self.phi)));
        }
        let phi_hi = self.model.phi(self.q + self.lambda)?;
        let delta = phi_hi - self.phi;
        let kappa = self.q + self.lambda - self.model.psi(theta)?;
        let spread = self.model.psi(theta)? - self.q;
        let z_theta = self.lo().z(x, theta)?;
        let z_phi = self.lo().z(x, phi_hi)?;
        Ok(self.lambda / kappa * (z_theta - spread * delta / (self.lambda * (theta - self.phi)) * z_phi))
    }
}
