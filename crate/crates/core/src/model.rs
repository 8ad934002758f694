//! Spectrally one-sided jump diffusions with exponential-mixture jumps.
//!
//! Every model is stored through its spectrally negative (SN) representation:
//! for an SN process that is the process itself, for a spectrally positive (SP)
//! process it is the dual `-X`. The Laplace exponent of the representation is
//!
//! ```text
//! psi(s) = c s + eta^2 s^2 / 2 + sum_i alpha_i (beta_i / (beta_i + s) - 1),   s > -min beta_i
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::put::{OptionKind, PricingProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "SN")]
    SpectrallyNegative,
    #[serde(rename = "SP")]
    SpectrallyPositive,
}

impl Side {
    /// +1 for SN, -1 for SP: the sign mapping the representation back to X.
    pub fn sign(self) -> f64 {
        match self {
            Side::SpectrallyNegative => 1.0,
            Side::SpectrallyPositive => -1.0,
        }
    }

    pub fn flipped(self) -> Side {
        match self {
            Side::SpectrallyNegative => Side::SpectrallyPositive,
            Side::SpectrallyPositive => Side::SpectrallyNegative,
        }
    }
}

/// One exponential jump component: rate `alpha`, jump sizes Exp(`beta`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Jump {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevyModel {
    side: Side,
    c: f64,
    eta: f64,
    jumps: Vec<Jump>,
}

/// All roots of `psi(s) = q` after clearing denominators.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub q: f64,
    pub roots: Vec<Complex64>,
}

impl RootSet {
    pub fn real_roots(&self) -> Vec<f64> {
        self.roots.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect()
    }
}

const REAL_TOL: f64 = 1e-9;
const SEPARATION_TOL: f64 = 1e-8;

impl LevyModel {
    pub fn new(side: Side, c: f64, eta: f64, jumps: Vec<Jump>) -> Result<Self> {
        if !c.is_finite() || !eta.is_finite() {
            return Err(Error::InvalidModel("c and eta must be finite".into()));
        }
        if eta < 0.0 {
            return Err(Error::InvalidModel("eta must be nonnegative".into()));
        }
        for j in &jumps {
            if !(j.alpha.is_finite() && j.alpha > 0.0 && j.beta.is_finite() && j.beta > 0.0) {
                return Err(Error::InvalidModel("jump rates and inverse means must be positive and finite".into()));
            }
        }
        if eta == 0.0 && jumps.is_empty() {
            return Err(Error::InvalidModel("need eta > 0 or at least one jump component".into()));
        }
        if eta == 0.0 && c <= 0.0 {
            return Err(Error::InvalidModel("bounded-variation representation needs a positive drift".into()));
        }
        Ok(LevyModel { side, c, eta, jumps })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// A = -min beta_i, or -inf without jumps.
    pub fn domain_floor(&self) -> f64 {
        self.jumps.iter().map(|j| -j.beta).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn total_jump_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.alpha).sum()
    }

    fn check_domain(&self, theta: f64) -> Result<()> {
        let floor = self.domain_floor();
        if theta.is_nan() || theta <= floor {
            return Err(Error::DomainError { theta, floor });
        }
        Ok(())
    }

    pub fn psi(&self, theta: f64) -> Result<f64> {
        self.check_domain(theta)?;
        let jump: f64 = self.jumps.iter().map(|j| j.alpha * (j.beta / (j.beta + theta) - 1.0)).sum();
        Ok(self.c * theta + 0.5 * self.eta * self.eta * theta * theta + jump)
    }

    pub fn psi_prime(&self, theta: f64) -> Result<f64> {
        self.check_domain(theta)?;
        let jump: f64 = self.jumps.iter().map(|j| j.alpha * j.beta / ((j.beta + theta) * (j.beta + theta))).sum();
        Ok(self.c + self.eta * self.eta * theta - jump)
    }

    pub(crate) fn psi_complex(&self, s: Complex64) -> Complex64 {
        let mut v = s * self.c + s * s * (0.5 * self.eta * self.eta);
        for j in &self.jumps {
            v += (Complex64::from(j.beta) / (s + j.beta) - 1.0) * j.alpha;
        }
        v
    }

    pub(crate) fn psi_prime_complex(&self, s: Complex64) -> Complex64 {
        let mut v = Complex64::from(self.c) + s * (self.eta * self.eta);
        for j in &self.jumps {
            let d = s + j.beta;
            v -= Complex64::from(j.alpha * j.beta) / (d * d);
        }
        v
    }

    /// Coefficients (ascending) of (psi(s) - q) * prod_i (beta_i + s).
    fn cleared_polynomial(&self, q: f64) -> Vec<f64> {
        let total: f64 = self.total_jump_rate();
        let mut p = vec![-total - q, self.c, 0.5 * self.eta * self.eta];
        for j in &self.jumps {
            p = poly_mul(&p, &[j.beta, 1.0]);
        }
        for (i, ji) in self.jumps.iter().enumerate() {
            let mut t = vec![ji.alpha * ji.beta];
            for (k, jk) in self.jumps.iter().enumerate() {
                if k != i {
                    t = poly_mul(&t, &[jk.beta, 1.0]);
                }
            }
            for (d, v) in t.iter().enumerate() {
                p[d] += v;
            }
        }
        while p.len() > 1 && *p.last().unwrap() == 0.0 {
            p.pop();
        }
        p
    }

    fn residual_scale(&self, s: Complex64, q: f64) -> f64 {
        let mut scale = 1.0 + q.abs() + (s * self.c).norm() + (s * s).norm() * 0.5 * self.eta * self.eta;
        for j in &self.jumps {
            scale += j.alpha * (1.0 + j.beta / (s + j.beta).norm());
        }
        scale
    }

    /// Roots before the simple-root check. Near-real roots are snapped to the
    /// real line and complex roots are returned as exact conjugate pairs.
    fn raw_roots(&self, q: f64) -> Result<Vec<Complex64>> {
        let p = self.cleared_polynomial(q);
        let n = p.len() - 1;
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = p[n];
        let mut eig: Vec<Complex64> = if n == 1 {
            vec![Complex64::from(-p[0] / lead)]
        } else {
            let mut m = DMatrix::<f64>::zeros(n, n);
            for i in 1..n {
                m[(i, i - 1)] = 1.0;
            }
            for i in 0..n {
                m[(i, n - 1)] = -p[i] / lead;
            }
            m.complex_eigenvalues().iter().copied().collect()
        };

        let dp: Vec<f64> = (1..=n).map(|k| p[k] * k as f64).collect();
        for z in eig.iter_mut() {
            for it in 0..6 {
                let f = horner(&p, *z);
                let df = horner(&dp, *z);
                if df.norm() == 0.0 {
                    break;
                }
                let before = (self.psi_complex(*z) - q).norm();
                let cand = *z - f / df;
                let resid = (self.psi_complex(cand) - q).norm();
                // near a multiple root df vanishes and the step can overshoot
                if !(resid <= before) {
                    break;
                }
                *z = cand;
                if it >= 1 && resid <= 1e-12 * self.residual_scale(*z, q) {
                    break;
                }
            }
        }

        for z in eig.iter_mut() {
            if z.im.abs() <= REAL_TOL * (1.0 + z.re.abs()) {
                *z = Complex64::from(z.re);
                // a final real Newton step keeps the snapped root accurate
                let f = self.psi_complex(*z) - q;
                let df = self.psi_prime_complex(*z);
                if df.re != 0.0 && f.re.is_finite() {
                    let cand = z.re - f.re / df.re;
                    if (self.psi_complex(Complex64::from(cand)) - q).norm() <= f.norm() {
                        *z = Complex64::from(cand);
                    }
                }
            }
        }
        // pair complex roots with their conjugates
        let mut used = vec![false; eig.len()];
        let mut out = Vec::with_capacity(eig.len());
        for i in 0..eig.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let z = eig[i];
            if z.im == 0.0 {
                out.push(z);
                continue;
            }
            let mut best: Option<usize> = None;
            for k in 0..eig.len() {
                if !used[k] && eig[k].im != 0.0 {
                    let d = (eig[k] - z.conj()).norm();
                    if best.is_none_or(|b| d < (eig[b] - z.conj()).norm()) {
                        best = Some(k);
                    }
                }
            }
            let k = best.ok_or(Error::RootPolish { q })?;
            used[k] = true;
            let re = 0.5 * (z.re + eig[k].re);
            let im = 0.5 * (z.im.abs() + eig[k].im.abs());
            out.push(Complex64::new(re, im));
            out.push(Complex64::new(re, -im));
        }

        for z in &out {
            let resid = (self.psi_complex(*z) - q).norm();
            if !(resid <= 1e-8 * self.residual_scale(*z, q)) {
                return Err(Error::RootPolish { q });
            }
        }
        out.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap().then(b.im.partial_cmp(&a.im).unwrap()));
        Ok(out)
    }

    /// All roots of psi(s) = q, required to be simple.
    pub fn all_roots(&self, q: f64) -> Result<RootSet> {
        let roots = self.raw_roots(q)?;
        for i in 0..roots.len() {
            for k in (i + 1)..roots.len() {
                let sep = (roots[i] - roots[k]).norm();
                let scale = 1.0f64.max(roots[i].norm()).max(roots[k].norm());
                if sep < SEPARATION_TOL * scale {
                    return Err(Error::DegenerateRoots { q, separation: sep / scale });
                }
            }
        }
        Ok(RootSet { q, roots })
    }

    /// Largest real root of psi(s) = q above the domain floor.
    pub fn phi(&self, q: f64) -> Result<f64> {
        let floor = self.domain_floor();
        let roots = self.raw_roots(q)?;
        let cand = roots
            .iter()
            .filter(|z| z.re > floor && z.im.abs() <= 1e-6 * (1.0 + z.re.abs()))
            .max_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let z = match cand {
            Some(z) => *z,
            None => return Err(Error::PhiUndefined { q }),
        };
        let slope_scale = self.c.abs()
            + self.eta * self.eta * (1.0 + z.re.abs())
            + self.jumps.iter().map(|j| j.alpha / j.beta).sum::<f64>();
        let slope = self.psi_prime(z.re)?;
        if z.im != 0.0 || slope.abs() < 1e-7 * slope_scale {
            return Err(Error::TangentRoot { q });
        }
        Ok(z.re)
    }

    /// log E[S_1] with S = e^X, i.e. psi(1) for SN and psi(-1) for SP.
    pub fn log_mean_price(&self) -> Result<f64> {
        self.psi(self.side.sign())
    }

    /// The model whose SN-representation exponent is z -> Psi(1 + z) - Psi(1)
    /// read in the dual direction; its side is flipped so the put solvers apply.
    pub fn tilt_exponent_for_call(&self) -> Result<LevyModel> {
        let t = self.esscher(self.side.sign())?;
        Ok(LevyModel { side: self.side.flipped(), ..t })
    }

    /// The representation under the measure with density e^{theta Y_t - psi(theta) t},
    /// Y the SN representation: exponent psi(s + theta) - psi(theta), same side.
    pub fn esscher(&self, theta: f64) -> Result<LevyModel> {
        self.psi(theta)?;
        let jumps = self
            .jumps
            .iter()
            .map(|j| Jump { alpha: j.alpha * j.beta / (j.beta + theta), beta: j.beta + theta })
            .collect();
        LevyModel::new(self.side, self.c + self.eta * self.eta * theta, self.eta, jumps)
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            out[i + k] += x * y;
        }
    }
    out
}

fn horner(p: &[f64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::from(0.0), |acc, c| acc * z + c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub passed: bool,
    pub diagnostic: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AssumptionCheck>,
    pub lambda_plus_r: f64,
    pub psi_prime_zero: f64,
    pub phi_r: Option<f64>,
    pub log_mean_price: Option<f64>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&AssumptionCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn check(name: &str, passed: bool, diagnostic: String) -> AssumptionCheck {
    AssumptionCheck { name: name.to_string(), passed, diagnostic }
}

/// Checks the standing assumptions of a pricing problem. Never fails; every
/// problem is reported through the returned checks.
pub fn validate_assumptions(problem: &PricingProblem) -> ValidationReport {
    let m = &problem.model;
    let lr = problem.lambda + problem.r;
    let dpsi0 = m.psi_prime(0.0).unwrap_or(f64::NAN);
    let mut checks = vec![
        check(
            "positive parameters",
            problem.strike > 0.0 && problem.lambda > 0.0,
            format!("K = {}, lambda = {}", problem.strike, problem.lambda),
        ),
        check("lambda + r > 0", lr > 0.0, format!("lambda + r = {lr}")),
    ];
    let phi = m.phi(problem.r);
    let phi_r = phi.as_ref().ok().copied();
    checks.push(check(
        "Phi(r) well defined",
        phi.is_ok(),
        match &phi {
            Ok(p) => format!("Phi(r) = {p}"),
            Err(e) => e.to_string(),
        },
    ));
    let mut log_mean = None;
    match problem.option {
        OptionKind::Put => {
            let (name, ok) = match m.side() {
                Side::SpectrallyNegative => {
                    ("SN put: X drifts to +inf, Phi(r) < 0", dpsi0 > 0.0 && phi_r.is_some_and(|p| p < 0.0))
                }
                Side::SpectrallyPositive => {
                    ("SP put: X drifts to +inf, Phi(r) > 0", dpsi0 < 0.0 && phi_r.is_some_and(|p| p > 0.0))
                }
            };
            checks.push(check(name, ok, format!("psi'(0) = {dpsi0}, Phi(r) = {phi_r:?}")));
        }
        OptionKind::Call => {
            let lm = m.log_mean_price();
            log_mean = lm.as_ref().ok().copied();
            match lm {
                Ok(psi1) => {
                    let gap = lr - psi1;
                    checks.push(check("lambda + r - log E S_1 > 0", gap > 0.0, format!("lambda + r - Psi(1) = {gap}")));
                    let r_tilde = problem.r - psi1;
                    checks.push(check(
                        "double-barrier regime (r - Psi(1) < 0)",
                        r_tilde < 0.0,
                        format!("r - Psi(1) = {r_tilde}"),
                    ));
                    let shifted = m.tilt_exponent_for_call().and_then(|t| t.phi(r_tilde));
                    let (ok, diag) = match (m.side(), &shifted) {
                        (Side::SpectrallyNegative, Ok(p)) => (*p > 0.0, format!("Phi_1(r~) = {p}")),
                        (Side::SpectrallyPositive, Ok(p)) => (*p < 0.0, format!("Phi_1^d(r~) = {p}")),
                        (_, Err(e)) => (false, e.to_string()),
                    };
                    checks.push(check("sign of Phi on the tilted model", ok, diag));
                }
                Err(e) => checks.push(check("E S_1 finite", false, e.to_string())),
            }
        }
    }
    ValidationReport { checks, lambda_plus_r: lr, psi_prime_zero: dpsi0, phi_r, log_mean_price: log_mean }
}
