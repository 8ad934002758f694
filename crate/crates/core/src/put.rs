//! Perpetual American puts exercised at Poisson epochs: interval-strategy
//! values, first-order conditions and the optimal double barriers.
//!
//! Functions taking `(l, u, theta)` work in the coordinates of the SN
//! representation: for an SP model pass `(-u, -l, -1)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::{conv_exp, real_part, OVERFLOW_EXPONENT};
use crate::fluct::{Dominant, FluctContext, Split};
use crate::model::{LevyModel, Side};
use crate::solve::brent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Put,
    Call,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingProblem {
    pub model: LevyModel,
    pub strike: f64,
    pub r: f64,
    pub lambda: f64,
    pub option: OptionKind,
}

impl PricingProblem {
    pub fn new(model: LevyModel, strike: f64, r: f64, lambda: f64, option: OptionKind) -> Self {
        PricingProblem { model, strike, r, lambda, option }
    }

    pub fn payoff(&self, s: f64) -> f64 {
        match self.option {
            OptionKind::Put => self.strike - s,
            OptionKind::Call => s - self.strike,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub l: f64,
    pub u: f64,
    pub value: f64,
}

/// Optimal log-barriers with first-order residuals and every candidate found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierPair {
    pub l: f64,
    pub u: f64,
    pub residual_h: f64,
    pub residual_j: f64,
    pub residual_j_tilde: f64,
    /// max(|h|, |reduced j~|) / K with exponential growth in u - l scaled
    /// out; the raw residuals above lose digits in proportion to that growth.
    #[serde(default)]
    pub residual_scaled: f64,
    pub candidates: Vec<Candidate>,
    pub tie_broken: bool,
}

impl BarrierPair {
    pub fn max_residual(&self) -> f64 {
        self.residual_h.abs().max(self.residual_j.abs()).max(self.residual_j_tilde.abs())
    }
}

const SCAN_POINTS: usize = 400;
const SP_SCAN_DEPTH: f64 = 30.0;
const TIE_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;
const SP_NOISE_FLOOR: f64 = 1e-11;

/// A put problem with its fluctuation context at q = r.
#[derive(Debug, Clone)]
pub struct PutEngine {
    problem: PricingProblem,
    ctx: FluctContext,
}

impl PutEngine {
    pub fn new(problem: &PricingProblem) -> Result<Self> {
        if problem.option != OptionKind::Put {
            return Err(Error::Precondition("put engine needs a put problem".into()));
        }
        if !(problem.strike > 0.0) {
            return Err(Error::Precondition("strike must be positive".into()));
        }
        if !(problem.lambda + problem.r > 0.0) {
            return Err(Error::Assumption(format!("lambda + r = {} is not positive", problem.lambda + problem.r)));
        }
        let ctx = FluctContext::new(&problem.model, problem.r, problem.lambda)?;
        Ok(PutEngine { problem: problem.clone(), ctx })
    }

    pub fn problem(&self) -> &PricingProblem {
        &self.problem
    }

    pub fn ctx(&self) -> &FluctContext {
        &self.ctx
    }

    pub fn phi(&self) -> f64 {
        self.ctx.phi()
    }

    /// +1 for SN models, -1 for SP models.
    pub fn theta(&self) -> f64 {
        self.problem.model.side().sign()
    }

    fn k(&self) -> f64 {
        self.problem.strike
    }

    /// log(-K Phi(r)) - log(1 - Phi(r)), the SN lower end of admissible u.
    pub fn u_underline(&self) -> Result<f64> {
        let p = self.phi();
        if !(p < 0.0) {
            return Err(Error::Assumption(format!("SN put needs Phi(r) < 0, got {p}")));
        }
        Ok((-self.k() * p).ln() - (1.0 - p).ln())
    }

    /// log(K Phi(r) / (1 + Phi(r))), the SP upper end of admissible l.
    pub fn l_bar(&self) -> Result<f64> {
        let p = self.phi();
        if !(p > 0.0) {
            return Err(Error::Assumption(format!("SP put needs Phi(r) > 0, got {p}")));
        }
        Ok((self.k() * p / (1.0 + p)).ln())
    }

    fn ordered(l: f64, u: f64) -> Result<()> {
        if !(l < u) {
            return Err(Error::Precondition(format!("need l < u, got l={l}, u={u}")));
        }
        Ok(())
    }

    fn splits(&self, d: f64, theta: f64) -> Result<(Split, Split, Split)> {
        let c = &self.ctx;
        Ok((c.m_split(d, 0.0)?, c.m_split(d, theta)?, c.n_split(d)?))
    }

    pub fn v_tilde_p(&self, l: f64, u: f64, theta: f64) -> Result<f64> {
        Ok(self.band(self.k(), l, u, theta)?.v_l * (-self.phi() * l).exp())
    }

    /// Value of the interval strategy [l, u] from x (SN-representation coordinates).
    pub fn v_p(&self, x: f64, l: f64, u: f64, theta: f64) -> Result<f64> {
        self.v_p_with(self.k(), x, l, u, theta)
    }

    fn v_p_with(&self, k: f64, x: f64, l: f64, u: f64, theta: f64) -> Result<f64> {
        let band = self.band(k, l, u, theta)?;
        self.eval(&band, x)
    }

    /// Band data for the interval strategy [l, u], from v(l) = v~_p e^{Phi l}
    /// and the M / N splits. The e^{delta d} parts of numerator and
    /// denominator cancel in closed form, which keeps the growing term of v
    /// on the band accurate for large lambda.
    fn band(&self, k: f64, l: f64, u: f64, theta: f64) -> Result<Band> {
        Self::ordered(l, u)?;
        let d = u - l;
        let Dominant { delta, b0, .. } = self.ctx.dominant();
        let (m0, mt, n) = self.splits(d, theta)?;
        let el = (theta * l).exp();
        let nh = n.scaled(delta, d);
        let v_l = (el * mt.scaled(delta, d) - k * m0.scaled(delta, d)) / nh;
        let gap = ((el * mt.rest - k * m0.rest) * n.lead - (el * mt.lead - k * m0.lead) * n.rest) / (nh * n.lead);
        Ok(Band { k, l, d, theta, v_l, lead: self.ctx.lambda() * b0 * gap / delta })
    }

    /// Band data at barriers satisfying both first-order conditions, where
    /// v(l) = K - e^{theta l}.
    fn band_optimal(&self, l: f64, u: f64, theta: f64) -> Result<Band> {
        Self::ordered(l, u)?;
        let d = u - l;
        let k = self.k();
        let p = self.phi();
        let Dominant { delta, b0, phi_hi, .. } = self.ctx.dominant();
        let (m0, mt, _) = self.splits(d, theta)?;
        let c_inf = k * p * (phi_hi - theta) / ((p - theta) * phi_hi);
        let rho = mt.rest * (-delta * d).exp() / mt.lead;
        let gap = (p - theta) / (phi_hi - theta) * c_inf * (mt.rest / mt.lead - m0.rest / m0.lead) / (1.0 + rho);
        Ok(Band { k, l, d, theta, v_l: k - (theta * l).exp(), lead: self.ctx.lambda() * b0 * gap / delta })
    }

    fn eval(&self, band: &Band, x: f64) -> Result<f64> {
        let y = x - band.l;
        if y < 0.0 {
            Ok(band.v_l * (self.phi() * y).exp())
        } else if y <= band.d {
            self.on_band(band, y)
        } else {
            self.above(band, x - band.l - band.d)
        }
    }

    /// v(l + y) for 0 <= y <= d: the dominant term of W^(r+lambda) enters
    /// only through `lead`, the rest through remainders that stay bounded.
    fn on_band(&self, band: &Band, y: f64) -> Result<f64> {
        let c = &self.ctx;
        let Dominant { delta, phi_hi, .. } = c.dominant();
        let (lam, p, th) = (c.lambda(), c.phi(), band.theta);
        let el = (th * band.l).exp();
        Ok(band.lead * (phi_hi * y - delta * band.d).exp() - lam * band.k * c.hi_rest(y, 0.0, &[])?
            + lam * el * c.hi_rest(y, th, &[])?
            + band.v_l * ((p * y).exp() + lam * c.hi_rest(y, p, &[])?))
    }

    /// v for x = u + z, z > 0. Nothing is exercised before X first drops
    /// below u, so the value is the passage law below u integrated against v
    /// on (-inf, u].
    fn above(&self, band: &Band, z: f64) -> Result<f64> {
        let c = &self.ctx;
        let Dominant { delta, .. } = c.dominant();
        let (lam, p, th, d) = (c.lambda(), c.phi(), band.theta, band.d);
        let el = (th * band.l).exp();
        let (c0, cj) = c.passage_below_weights(z)?;
        let mut total = c0 * self.on_band(band, d)?;
        for (w, j) in cj.iter().zip(self.problem.model.jumps()) {
            let nb = [Complex64::from(-j.beta)];
            // int_0^d e^{-beta (d - y)} v(l + y) dy, term by term
            let growing = real_part(conv_exp(&[Complex64::from(p), Complex64::from(-j.beta - delta)], d)?)?;
            let exp_phi = real_part(conv_exp(&[Complex64::from(p), nb[0]], d)?)?;
            let inside = band.lead * growing - lam * band.k * c.hi_rest(d, 0.0, &nb)?
                + lam * el * c.hi_rest(d, th, &nb)?
                + band.v_l * (exp_phi + lam * c.hi_rest(d, p, &nb)?);
            let below = band.v_l * (-j.beta * d).exp() / (j.beta + p);
            total += w * j.beta * (inside + below);
        }
        Ok(total)
    }

    /// e^{-Phi(r+lambda)(u-l)} h(l, u; theta), from the form of h free of M.
    pub fn h_scaled(&self, l: f64, u: f64, theta: f64) -> Result<f64> {
        self.h_scaled_with(self.k(), l, u, theta)
    }

    fn h_scaled_with(&self, k: f64, l: f64, u: f64, theta: f64) -> Result<f64> {
        Self::ordered(l, u)?;
        let c = &self.ctx;
        let d = u - l;
        let Dominant { phi_hi, delta, .. } = c.dominant();
        let lam = c.lambda();
        let el = (theta * l).exp();
        let z_hat = (-delta * d).exp() + lam * c.hi_shifted(d, &[c.phi()])?;
        Ok((k - (theta * u).exp()) * (-phi_hi * d).exp() - (k - el) * z_hat
            + lam * (k * c.hi_shifted(d, &[0.0])? - el * c.hi_shifted(d, &[theta])?))
    }

    fn unscale(exponent: f64, v: f64) -> Result<f64> {
        if exponent > OVERFLOW_EXPONENT {
            return Err(Error::OverflowRisk { exponent });
        }
        Ok(v * exponent.exp())
    }

    /// h(l, u; theta) in the form free of M.
    pub fn h_fun(&self, l: f64, u: f64, theta: f64) -> Result<f64> {
        let v = self.h_scaled(l, u, theta)?;
        Self::unscale(self.ctx.dominant().phi_hi * (u - l), v)
    }

    /// h through its M representation; equal to [`Self::h_fun`].
    pub fn h_fun_via_m(&self, l: f64, u: f64, theta: f64) -> Result<f64> {
        Self::ordered(l, u)?;
        let c = &self.ctx;
        let d = u - l;
        let p = c.phi();
        Ok((p * d).exp() / c.lambda()
            * (self.k() * c.m_fun(d, 0.0)? * p - (theta * l).exp() * c.m_fun(d, theta)? * (p - theta)))
    }

    pub fn j_fun(&self, l: f64, u: f64, theta: f64) -> Result<f64> {
        Self::ordered(l, u)?;
        let c = &self.ctx;
        let d = u - l;
        let ph = c.dominant().phi_hi;
        let lam = c.lambda();
        let k = self.k();
        let el = (theta * l).exp();
        let num = k * ((-ph * d).exp() + lam * c.hi_shifted(d, &[0.0])?)
            - el * (((theta - ph) * d).exp() + lam * c.hi_shifted(d, &[theta])?);
        let z_hat = (-c.dominant().delta * d).exp() + lam * c.hi_shifted(d, &[c.phi()])?;
        Ok(self.v_tilde_p(l, u, theta)? - num / ((c.phi() * l).exp() * z_hat))
    }

    pub fn j_tilde_fun(&self, l: f64, u: f64, theta: f64) -> Result<f64> {
        Self::ordered(l, u)?;
        let p = self.phi();
        if (p - theta).abs() < 1e-12 {
            return Err(Error::DegenerateTheta);
        }
        let d = u - l;
        let k = self.k();
        let delta = self.ctx.dominant().delta;
        let (m0, _, n) = self.splits(d, theta)?;
        let v = theta * k * m0.scaled(delta, d) / (p - theta) - (k - (theta * l).exp()) * n.scaled(delta, d);
        Self::unscale(delta * (u - l), v)
    }

    /// j~ minus the multiple of h that cancels its e^{delta (u-l)} growth.
    /// Where h = 0 it equals j~, so {h = 0, j~ = 0} and {h = 0, this = 0}
    /// have the same solutions, but this one stays well conditioned in u
    /// when lambda is large.
    pub fn j_tilde_reduced(&self, l: f64, u: f64, theta: f64) -> Result<f64> {
        Self::ordered(l, u)?;
        let p = self.phi();
        if (p - theta).abs() < 1e-12 {
            return Err(Error::DegenerateTheta);
        }
        let Dominant { phi_hi, delta, .. } = self.ctx.dominant();
        let k = self.k();
        let el = (theta * l).exp();
        let (m0, mt, n) = self.splits(u - l, theta)?;
        Ok(theta * k * m0.rest / (p - theta)
            - (k - el) * n.rest
            - (phi_hi - theta) / (delta * (p - theta)) * (k * p * m0.rest - el * (p - theta) * mt.rest))
    }

    fn require_side(&self, side: Side) -> Result<()> {
        if self.problem.model.side() != side {
            return Err(Error::Precondition(format!("solver needs a {side:?} model")));
        }
        Ok(())
    }

    /// The unique l(u) < u with h(l(u), u; 1) = 0.
    pub fn solve_l_given_u_sn(&self, u: f64) -> Result<f64> {
        self.require_side(Side::SpectrallyNegative)?;
        let lk = self.k().ln();
        if u >= lk {
            return Err(Error::Precondition(format!("need u < log K = {lk}, got {u}")));
        }
        let uu = self.u_underline()?;
        if u <= uu {
            return Err(Error::NoRoot(format!("u = {u} <= u_underline = {uu}")));
        }
        // h(., u) decreases up to u_underline and increases after, so the root lies left of it
        let h = |l: f64| self.h_scaled(l, u, 1.0);
        let hi = uu;
        let fhi = h(hi)?;
        if fhi >= 0.0 {
            return Ok(hi);
        }
        let mut step = 0.1;
        loop {
            let lo = hi - step;
            let flo = h(lo)?;
            if flo > 0.0 {
                return brent(h, lo, hi, flo, fhi, 1e-15);
            }
            if step >= 40.0 {
                return Err(Error::ScanExhausted(format!("no sign change of h within 40 below {hi}")));
            }
            step *= 2.0;
        }
    }

    /// The unique u(l) in (l, log K) with h(-u(l), -l; -1) = 0.
    pub fn solve_u_given_l_sp(&self, l: f64) -> Result<f64> {
        self.require_side(Side::SpectrallyPositive)?;
        let lk = self.k().ln();
        let lb = self.l_bar()?;
        if l >= lb {
            return Err(Error::NoRoot(format!("l = {l} >= l_bar = {lb}")));
        }
        // u -> h(-u, -l; -1) decreases up to l_bar and is positive at log K
        let f = |u: f64| self.h_scaled(-u, -l, -1.0);
        let fa = f(lb)?;
        if fa >= 0.0 {
            return Ok(lb);
        }
        let fb = f(lk)?;
        brent(f, lb, lk, fa, fb, 1e-15)
    }

    pub fn solve_barriers(&self) -> Result<BarrierPair> {
        match self.problem.model.side() {
            Side::SpectrallyNegative => self.solve_barriers_sn(),
            Side::SpectrallyPositive => self.solve_barriers_sp(),
        }
    }

    /// Roots of g on a grid over [lo, hi]; sign changes with both ends below
    /// `floor` in magnitude are treated as roundoff.
    fn scan<G>(&self, lo: f64, hi: f64, floor: f64, g: G) -> Result<Vec<f64>>
    where
        G: Fn(f64) -> Result<f64> + Sync,
    {
        let pts: Vec<f64> = (0..SCAN_POINTS)
            .map(|i| {
                let t = i as f64 / (SCAN_POINTS - 1) as f64;
                let v = lo + (hi - lo) * t;
                v.clamp(lo + 1e-9, hi - 1e-9)
            })
            .collect();
        let vals: Vec<Result<f64>> = pts.par_iter().map(|&p| g(p)).collect();
        let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
        let mut roots = Vec::new();
        for i in 0..pts.len() {
            if vals[i] == 0.0 {
                let near = vals[i.saturating_sub(1)].abs().max(vals[(i + 1).min(pts.len() - 1)].abs());
                if near >= floor {
                    roots.push(pts[i]);
                }
            } else if i + 1 < pts.len()
                && vals[i].signum() != vals[i + 1].signum()
                && vals[i + 1] != 0.0
                && vals[i].abs().max(vals[i + 1].abs()) >= floor
            {
                roots.push(brent(&g, pts[i], pts[i + 1], vals[i], vals[i + 1], 1e-14)?);
            }
        }
        Ok(roots)
    }

    /// max(|h|, |reduced j~|) / K after scaling out exponential growth.
    pub fn scaled_residual(&self, l: f64, u: f64) -> Result<f64> {
        let (sl, su, th) = self.rep_coords(l, u);
        let h = self.h_scaled(sl, su, th)?.abs();
        let g = self.j_tilde_reduced(sl, su, th)?.abs();
        Ok(h.max(g) / self.k())
    }

    fn finish(&self, mut candidates: Vec<Candidate>) -> Result<BarrierPair> {
        if candidates.is_empty() {
            return Err(Error::NoRoot("no first-order root on the scan grid".into()));
        }
        candidates.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap());
        let top = candidates[0].value;
        let tied: Vec<&Candidate> =
            candidates.iter().filter(|c| (c.value - top).abs() <= TIE_TOL * top.abs().max(1.0)).collect();
        let best = *tied.iter().max_by(|a, b| (a.u - a.l).partial_cmp(&(b.u - b.l)).unwrap()).unwrap();
        let (sl, su, th) = self.rep_coords(best.l, best.u);
        Ok(BarrierPair {
            l: best.l,
            u: best.u,
            residual_h: self.h_fun(sl, su, th)?,
            residual_j: self.j_fun(sl, su, th)?,
            residual_j_tilde: self.j_tilde_fun(sl, su, th)?,
            residual_scaled: self.scaled_residual(best.l, best.u)?,
            tie_broken: tied.len() > 1,
            candidates: candidates.clone(),
        })
    }

    /// (l, u) of X mapped to the SN-representation arguments and theta.
    pub fn rep_coords(&self, l: f64, u: f64) -> (f64, f64, f64) {
        match self.problem.model.side() {
            Side::SpectrallyNegative => (l, u, 1.0),
            Side::SpectrallyPositive => (-u, -l, -1.0),
        }
    }

    fn solve_barriers_sn(&self) -> Result<BarrierPair> {
        let uu = self.u_underline()?;
        let lk = self.k().ln();
        let g = |u: f64| -> Result<f64> {
            let l = self.solve_l_given_u_sn(u)?;
            Ok(self.j_tilde_reduced(l, u, 1.0)? / self.k())
        };
        let roots = self.scan(uu, lk, 0.0, g)?;
        let mut cands = Vec::new();
        for u in roots {
            let l = self.solve_l_given_u_sn(u)?;
            cands.push(Candidate { l, u, value: self.v_tilde_p(l, u, 1.0)? });
        }
        self.finish(cands)
    }

    fn solve_barriers_sp(&self) -> Result<BarrierPair> {
        let lb = self.l_bar()?;
        let lmin = self.k().ln() - SP_SCAN_DEPTH;
        let g = |l: f64| -> Result<f64> {
            let u = self.solve_u_given_l_sp(l)?;
            Ok(self.j_tilde_reduced(-u, -l, -1.0)? / self.k())
        };
        let roots = self.scan(lmin, lb, SP_NOISE_FLOOR, g)?;
        if roots.is_empty() {
            return Err(Error::ScanExhausted(format!("no sign change of j~ on (log K - {SP_SCAN_DEPTH}, l_bar)")));
        }
        let mut cands = Vec::new();
        for l in roots {
            let u = self.solve_u_given_l_sp(l)?;
            cands.push(Candidate { l, u, value: self.v_tilde_p(-u, -l, -1.0)? });
        }
        self.finish(cands)
    }

    pub(crate) fn check_fresh(&self, b: &BarrierPair) -> Result<()> {
        let worst = self.scaled_residual(b.l, b.u)?;
        if !(worst < RESIDUAL_TOL) {
            return Err(Error::StaleBarriers(worst));
        }
        Ok(())
    }

    /// V_p(e^x) at solved barriers, through the simplified optimal-barrier
    /// formula: below l* (SN) or above u* (SP) this is e^{-Phi(r)|x - b|}(K - e^b).
    pub fn value_function(&self, b: &BarrierPair, x: f64) -> Result<f64> {
        self.check_fresh(b)?;
        let (sl, su, th) = self.rep_coords(b.l, b.u);
        let band = self.band_optimal(sl, su, th)?;
        self.eval(&band, th * x)
    }

    /// Value of exercising at the first observation with log-price in [l, u]
    /// (log-coordinates of X; `l` may be -inf).
    pub fn interval_value(&self, x: f64, l: f64, u: f64) -> Result<f64> {
        self.interval_value_with(self.k(), x, l, u)
    }

    pub(crate) fn interval_value_with(&self, k: f64, x: f64, l: f64, u: f64) -> Result<f64> {
        if !(l < u) || !u.is_finite() {
            return Err(Error::Precondition(format!("need l < u < inf, got l={l}, u={u}")));
        }
        let c = &self.ctx;
        match (self.problem.model.side(), l.is_finite()) {
            (Side::SpectrallyNegative, true) => self.v_p_with(k, x, l, u, 1.0),
            (Side::SpectrallyPositive, true) => self.v_p_with(k, -x, -u, -l, -1.0),
            (Side::SpectrallyNegative, false) => {
                let y = x - u;
                Ok(k * c.down_set_transform(y, 0.0)? - u.exp() * c.down_set_transform(y, 1.0)?)
            }
            (Side::SpectrallyPositive, false) => {
                let y = u - x;
                Ok(k * c.up_set_transform(y, 0.0)? - u.exp() * c.up_set_transform(y, -1.0)?)
            }
        }
    }
}

/// An interval strategy on the band [l, l + d] of the SN representation:
/// v(l + y) = lead e^{Phi(r+lambda) y - delta d} + (bounded terms) for
/// 0 <= y <= d, and v(l) = `v_l`.
#[derive(Debug, Clone, Copy)]
struct Band {
    k: f64,
    l: f64,
    d: f64,
    theta: f64,
    v_l: f64,
    lead: f64,
}

pub fn solve_barriers_put_sn(problem: &PricingProblem) -> Result<BarrierPair> {
    let e = PutEngine::new(problem)?;
    e.require_side(Side::SpectrallyNegative)?;
    e.solve_barriers_sn()
}

pub fn solve_barriers_put_sp(problem: &PricingProblem) -> Result<BarrierPair> {
    let e = PutEngine::new(problem)?;
    e.require_side(Side::SpectrallyPositive)?;
    e.solve_barriers_sp()
}

pub fn value_function_put(problem: &PricingProblem, barriers: &BarrierPair, x: f64) -> Result<f64> {
    PutEngine::new(problem)?.value_function(barriers, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Jump;

    fn sn_problem() -> PricingProblem {
        let m = LevyModel::new(Side::SpectrallyNegative, 1.0, 0.2, vec![Jump { alpha: 1.0, beta: 2.0 }]).unwrap();
        PricingProblem::new(m, 50.0, -0.05, 1.0, OptionKind::Put)
    }

    fn sp_problem() -> PricingProblem {
        let m = LevyModel::new(Side::SpectrallyPositive, 0.2, 0.3, vec![Jump { alpha: 1.0, beta: 2.0 }]).unwrap();
        PricingProblem::new(m, 50.0, -0.05, 1.0, OptionKind::Put)
    }

    #[test]
    fn thresholds() {
        let e = PutEngine::new(&sn_problem()).unwrap();
        assert!((e.u_underline().unwrap() - 1.570).abs() < 1e-3);
        let e = PutEngine::new(&sp_problem()).unwrap();
        assert!((e.l_bar().unwrap() - 3.359).abs() < 1e-3);
    }

    #[test]
    fn h_identities() {
        let e = PutEngine::new(&sn_problem()).unwrap();
        assert!(e.h_fun(3.0 - 1e-12, 3.0, 1.0).unwrap().abs() < 1e-9);
        for &(l, u) in &[(1.0, 3.0), (2.0, 2.5), (-1.0, 3.5)] {
            let a = e.h_fun(l, u, 1.0).unwrap();
            let b = e.h_fun_via_m(l, u, 1.0).unwrap();
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{a} vs {b}");
        }
        let u: f64 = 3.0;
        let p = e.phi();
        let h = 1e-6;
        let fd = (e.h_fun(u - h, u, 1.0).unwrap() - e.h_fun(u - 2.0 * h, u, 1.0).unwrap()) / h;
        let exact = u.exp() + (50.0 - u.exp()) * p;
        assert!((fd - exact).abs() < 1e-4 * exact.abs(), "{fd} vs {exact}");
    }

    #[test]
    fn v_tilde_vanishes_on_the_diagonal() {
        let e = PutEngine::new(&sn_problem()).unwrap();
        assert!(e.v_tilde_p(3.0 - 1e-10, 3.0, 1.0).unwrap().abs() < 1e-7);
        assert!(e.v_tilde_p(3.0, 3.0, 1.0).is_err());
    }

    #[test]
    fn v_p_continuity_and_below_l() {
        let e = PutEngine::new(&sn_problem()).unwrap();
        let (l, u) = (2.0, 3.0);
        let vl = e.v_p(l, l, u, 1.0).unwrap();
        for x in [1.5, 0.0, -2.0] {
            let v = e.v_p(x, l, u, 1.0).unwrap();
            assert!((v - (e.phi() * (x - l)).exp() * vl).abs() < 1e-10 * vl);
        }
        for edge in [l, u] {
            let a = e.v_p(edge - 1e-9, l, u, 1.0).unwrap();
            let b = e.v_p(edge + 1e-9, l, u, 1.0).unwrap();
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn inner_solvers() {
        let e = PutEngine::new(&sn_problem()).unwrap();
        let uu = e.u_underline().unwrap();
        assert!(matches!(e.solve_l_given_u_sn(uu), Err(Error::NoRoot(_))));
        for i in 1..=20 {
            let u = uu + (50f64.ln() - uu) * i as f64 / 21.0;
            let l = e.solve_l_given_u_sn(u).unwrap();
            assert!(l < u);
            assert!(e.h_fun(l, u, 1.0).unwrap().abs() < 1e-10);
        }
        assert!(e.solve_l_given_u_sn(50f64.ln() - 1e-9).is_ok());
        let e = PutEngine::new(&sp_problem()).unwrap();
        let lb = e.l_bar().unwrap();
        assert!(matches!(e.solve_u_given_l_sp(lb), Err(Error::NoRoot(_))));
        for l in [3.059, 3.134, 3.209, 3.284] {
            let u = e.solve_u_given_l_sp(l).unwrap();
            assert!(l < u && u < 50f64.ln());
            assert!(e.h_fun(-u, -l, -1.0).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn solved_barriers_satisfy_both_conditions() {
        for p in [sn_problem(), sp_problem()] {
            let e = PutEngine::new(&p).unwrap();
            let b = e.solve_barriers().unwrap();
            assert!(b.max_residual() < 1e-8, "{b:?}");
            assert!(b.l < b.u && b.u.exp() < 50.0 && b.l.exp() > 0.0);
            assert_eq!(b.candidates.len(), 1, "{:?}", b.candidates);
        }
    }

    /// Unsplit formulas: v~ from M and N, v on the band from the
    /// convolution functions. Accurate while e^{delta (u - l)} is moderate.
    fn direct(e: &PutEngine, x: f64, l: f64, u: f64, th: f64) -> (f64, f64, f64) {
        let c = &e.ctx;
        let (d, k, lam, p) = (u - l, e.k(), c.lambda(), c.phi());
        let vt = ((th * l).exp() * c.m_fun(d, th).unwrap() - k * c.m_fun(d, 0.0).unwrap()) * (-p * l).exp()
            / c.n_fun(d).unwrap();
        let y = x - l;
        let v = lam * (k * c.l_fun(y, d, 0.0).unwrap() - (th * l).exp() * c.l_fun(y, d, th).unwrap())
            + vt * (p * l).exp() * c.script_z(d, y, p).unwrap();
        let hi = c.hi();
        let h = (k - (th * u).exp()) - (k - (th * l).exp()) * hi.z(d, p).unwrap()
            + lam * (k * hi.w_bar(d, 0.0).unwrap() - (th * u).exp() * hi.w_bar(d, th).unwrap());
        (vt, v, h)
    }

    #[test]
    fn split_forms_match_direct_formulas() {
        for (p, th) in [(sn_problem(), 1.0), (sp_problem(), -1.0)] {
            let e = PutEngine::new(&p).unwrap();
            let (l, u) = if th > 0.0 { (1.0, 3.0) } else { (-3.5, -2.0) };
            let (vt, _, h) = direct(&e, l, l, u, th);
            let a = e.v_tilde_p(l, u, th).unwrap();
            assert!((a - vt).abs() < 1e-10 * vt.abs().max(1.0), "{a} vs {vt}");
            let a = e.h_fun(l, u, th).unwrap();
            assert!((a - h).abs() < 1e-9 * h.abs().max(1.0), "{a} vs {h}");
            for x in [l, l + 0.4, l + 1.1, u - 1e-9, u, u + 1e-9, u + 0.3, u + 1.5] {
                let (_, v, _) = direct(&e, x, l, u, th);
                let a = e.v_p(x, l, u, th).unwrap();
                assert!((a - v).abs() < 1e-9 * v.abs().max(1.0), "{x}: {a} vs {v}");
            }
        }
    }

    #[test]
    fn reduced_condition_agrees_with_j_tilde_on_h_zero() {
        let e = PutEngine::new(&sn_problem()).unwrap();
        let uu = e.u_underline().unwrap();
        for i in 1..8 {
            let u = uu + (50f64.ln() - uu) * i as f64 / 8.0;
            let l = e.solve_l_given_u_sn(u).unwrap();
            let a = e.j_tilde_fun(l, u, 1.0).unwrap();
            let g = e.j_tilde_reduced(l, u, 1.0).unwrap();
            assert!((a - g).abs() < 1e-8 * a.abs().max(1.0), "{u}: {a} vs {g}");
        }
    }

    #[test]
    fn large_lambda_has_a_single_optimum() {
        // reference values from a 140-digit evaluation of v~ through M and N,
        // maximised by Newton on its gradient
        let mut p = sn_problem();
        p.lambda = 20.0;
        let e = PutEngine::new(&p).unwrap();
        let b = e.solve_barriers().unwrap();
        assert_eq!(b.candidates.len(), 1, "{:?}", b.candidates);
        assert!((b.u.exp() - 36.3451428077).abs() < 1e-7, "{b:?}");
        assert!((b.l.exp() - 4.50596004475).abs() < 1e-8, "{b:?}");
        assert!(b.residual_scaled < 1e-12, "{b:?}");
    }

    #[test]
    fn simplified_and_generic_values_agree() {
        for p in [sn_problem(), sp_problem()] {
            let e = PutEngine::new(&p).unwrap();
            let b = e.solve_barriers().unwrap();
            for i in 0..40 {
                let x = (1.0f64).ln() + i as f64 * 0.1;
                let v1 = e.value_function(&b, x).unwrap();
                let v2 = e.interval_value(x, b.l, b.u).unwrap();
                assert!((v1 - v2).abs() < 1e-9 * v1.abs().max(1.0), "{x}: {v1} vs {v2}");
            }
        }
    }

    #[test]
    fn local_maximum() {
        let e = PutEngine::new(&sn_problem()).unwrap();
        let b = e.solve_barriers().unwrap();
        let best = e.v_tilde_p(b.l, b.u, 1.0).unwrap();
        for d in [0.05, 0.1] {
            for (dl, du) in [(d, 0.0), (-d, 0.0), (0.0, d), (0.0, -d)] {
                assert!(e.v_tilde_p(b.l + dl, b.u + du, 1.0).unwrap() <= best);
            }
        }
    }

    #[test]
    fn stale_barriers_rejected() {
        let e = PutEngine::new(&sn_problem()).unwrap();
        let mut b = e.solve_barriers().unwrap();
        b.u += 0.01;
        assert!(matches!(e.value_function(&b, 2.0), Err(Error::StaleBarriers(_))));
    }
}
