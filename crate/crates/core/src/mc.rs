//! Monte Carlo oracle: exact simulation of the jump diffusion at the
//! observation epochs.
//!
//! Paths are simulated for Y = X (SN) or Y = -X (SP), which is always
//! spectrally negative with the model's stored parameters. Each path draws
//! from its own ChaCha stream (seed, path index), and the per-path values are
//! reduced in index order, so estimates do not depend on the thread count.
//!
//! A path contributes zero when it is absorbed (two-sided identity), when it
//! is so far from the band that a martingale bound puts its remaining value
//! below `ESCAPE_TOL` of the payoff scale, or when it exhausts
//! `max_observations` (counted in `truncated_fraction`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::put::PricingProblem;

const ESCAPE_TOL: f64 = 1e-13;
const TRUNCATION_WARN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub n_paths: usize,
    pub seed: u64,
    pub max_observations: usize,
    pub antithetic: bool,
    /// Sampler used by [`estimate_value`].
    pub sampling: Sampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Tilted when the plain estimator has infinite variance, plain otherwise.
    #[default]
    Auto,
    Plain,
    Tilted,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_paths: 200_000,
            seed: 20240601,
            max_observations: 5000,
            antithetic: false,
            sampling: Sampling::Auto,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.max_observations == 0 {
            return Err(Error::Precondition("n_paths and max_observations must be positive".into()));
        }
        if self.antithetic && self.n_paths < 4 {
            return Err(Error::Precondition("antithetic sampling needs at least 4 paths".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_effective: usize,
    pub truncated_fraction: f64,
    pub truncation_bound: f64,
}

impl McEstimate {
    /// Non-fatal warning when more than 0.1% of paths hit the observation cap.
    pub fn truncation_warning(&self) -> Option<String> {
        (self.truncated_fraction > TRUNCATION_WARN).then(|| {
            format!(
                "{:.3e} of paths reached max_observations; bias bound {:.3e}",
                self.truncated_fraction, self.truncation_bound
            )
        })
    }

    /// |mean - reference| in standard errors.
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = (self.mean - reference).abs();
        if self.stderr == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            d / self.stderr
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Payoff {
    Put,
    Call,
    /// e^{theta x} of the log-price x.
    PureDiscount(f64),
}

fn draw_jumps<R: Rng + ?Sized>(model: &LevyModel, dt: f64, rng: &mut R) -> f64 {
    let mut total = 0.0;
    for j in model.jumps() {
        let n: f64 = Poisson::new(j.alpha * dt).map(|p| p.sample(rng)).unwrap_or(0.0);
        if n > 0.0 {
            total += Gamma::new(n, 1.0 / j.beta).expect("positive shape").sample(rng);
        }
    }
    total
}

fn draw_time<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    Exp::new(lambda).expect("positive rate").sample(rng)
}

/// (dt, dx): time to the next observation and the increment of X over it.
pub fn sample_observed_increment<R: Rng + ?Sized>(model: &LevyModel, lambda: f64, rng: &mut R) -> (f64, f64) {
    let (dt, dy) = sample_sn_increment(model, lambda, rng, false);
    (dt, model.side().sign() * dy)
}

fn sample_sn_increment<R: Rng + ?Sized>(model: &LevyModel, lambda: f64, rng: &mut R, flip: bool) -> (f64, f64) {
    let dt = draw_time(lambda, rng);
    let z: f64 = rng.sample(StandardNormal);
    let z = if flip { -z } else { z };
    let dy = model.c() * dt + model.eta() * dt.sqrt() * z - draw_jumps(model, dt, rng);
    (dt, dy)
}

/// Simulation of Y (spectrally negative) observed at rate lambda, paying at
/// the first observation in [lo, hi], optionally killed at the continuous
/// first passage above `kill`.
struct PathSim<'a> {
    model: &'a LevyModel,
    q: f64,
    lambda: f64,
    lo: f64,
    hi: f64,
    kill: Option<f64>,
    escape_above: Option<f64>,
    escape_below: Option<f64>,
    /// Phi(q), when paths observed below the band jump to its lower edge.
    creep: Option<f64>,
    max_obs: usize,
}

impl<'a> PathSim<'a> {
    fn new(model: &'a LevyModel, q: f64, lambda: f64, lo: f64, hi: f64, kill: Option<f64>, max_obs: usize) -> Self {
        // e^{theta Y - q t} is a martingale for psi(theta) = q; with theta < 0
        // it bounds the discounted chance of coming back down from above,
        // with theta = Phi(q) > 0 the chance of creeping up from below
        let floor = model.domain_floor();
        let escape_above = model
            .all_roots(q)
            .ok()
            .and_then(|rs| rs.real_roots().into_iter().filter(|t| *t < 0.0 && *t > floor).reduce(f64::min));
        let escape_below = model.phi(q).ok().filter(|p| *p > 1e-8);
        PathSim { model, q, lambda, lo, hi, kill, escape_above, escape_below, creep: None, max_obs }
    }

    /// Advances Y over one observation interval; `None` if killed on the way.
    fn step<R: Rng + ?Sized>(&self, y: f64, rng: &mut R, flip: bool) -> Option<(f64, f64)> {
        let Some(b) = self.kill else {
            let (dt, dy) = sample_sn_increment(self.model, self.lambda, rng, flip);
            return Some((dt, y + dy));
        };
        let dt = draw_time(self.lambda, rng);
        // jump epochs inside (0, dt), then diffusion bridges between them
        let rate = self.model.total_jump_rate();
        let mut epochs: Vec<f64> = Vec::new();
        if rate > 0.0 {
            let n: f64 = Poisson::new(rate * dt).map(|p| p.sample(rng)).unwrap_or(0.0);
            for _ in 0..n as usize {
                epochs.push(rng.random::<f64>() * dt);
            }
            epochs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        epochs.push(dt);
        let (c, eta) = (self.model.c(), self.model.eta());
        let mut y = y;
        let mut prev = 0.0;
        for (i, &t) in epochs.iter().enumerate() {
            let h = t - prev;
            prev = t;
            let z: f64 = rng.sample(StandardNormal);
            let z = if flip { -z } else { z };
            let end = y + c * h + eta * h.sqrt() * z;
            if end >= b || y >= b {
                return None;
            }
            if eta > 0.0 && h > 0.0 {
                let p = (-2.0 * (b - y) * (b - end) / (eta * eta * h)).exp();
                if rng.random::<f64>() < p {
                    return None;
                }
            }
            y = end;
            if i + 1 < epochs.len() {
                y -= self.draw_mark(rng);
            }
        }
        Some((dt, y))
    }

    fn draw_mark<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let rate = self.model.total_jump_rate();
        let mut pick = rng.random::<f64>() * rate;
        let jumps = self.model.jumps();
        for j in jumps {
            if pick < j.alpha {
                return Exp::new(j.beta).expect("positive").sample(rng);
            }
            pick -= j.alpha;
        }
        Exp::new(jumps[jumps.len() - 1].beta).expect("positive").sample(rng)
    }

    /// (discounted payoff, truncated) for one path.
    fn run<R: Rng + ?Sized, F: Fn(f64) -> f64>(&self, y0: f64, rng: &mut R, flip: bool, pay: &F) -> (f64, bool) {
        let log_tol = ESCAPE_TOL.ln();
        let (mut y, mut t, mut w) = (y0, 0.0, 1.0);
        for _ in 0..self.max_obs {
            let Some((dt, next)) = self.step(y, rng, flip) else {
                return (0.0, false);
            };
            t += dt;
            y = next;
            if self.lo <= y && y <= self.hi {
                return (w * (-self.q * t).exp() * pay(y), false);
            }
            if let (Some(p), true) = (self.creep, y < self.lo) {
                // no upward jumps: the path reaches lo continuously, and
                // E_y[e^{-q T_lo}] = e^{-Phi(q) (lo - y)}; the clock is memoryless
                w *= (-p.max(0.0) * (self.lo - y)).exp();
                y = self.lo;
                continue;
            }
            if y > self.hi {
                if let Some(th) = self.escape_above {
                    if th * (y - self.hi) < log_tol {
                        return (0.0, false);
                    }
                }
            } else if let Some(p) = self.escape_below {
                if p * (y - self.lo) < log_tol {
                    return (0.0, false);
                }
            }
        }
        (0.0, true)
    }

    fn estimate<F: Fn(f64) -> f64 + Sync>(&self, y0: f64, cfg: &McConfig, pay: F, scale: f64) -> Result<McEstimate> {
        cfg.validate()?;
        let n_units = if cfg.antithetic { cfg.n_paths / 2 } else { cfg.n_paths };
        let results: Vec<(f64, u32)> = (0..n_units)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(i as u64);
                if cfg.antithetic {
                    let mut twin = rng.clone();
                    let (a, ta) = self.run(y0, &mut rng, false, &pay);
                    let (b, tb) = self.run(y0, &mut twin, true, &pay);
                    (0.5 * (a + b), ta as u32 + tb as u32)
                } else {
                    let (v, tr) = self.run(y0, &mut rng, false, &pay);
                    (v, tr as u32)
                }
            })
            .collect();
        let values: Vec<f64> = results.iter().map(|r| r.0).collect();
        let truncated: u32 = results.iter().map(|r| r.1).sum();
        let n = values.len() as f64;
        let mean = pairwise_sum(&values) / n;
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = if values.len() > 1 { pairwise_sum(&sq) / (n - 1.0) } else { 0.0 };
        let paths = if cfg.antithetic { 2 * n_units } else { n_units };
        let truncated_fraction = truncated as f64 / paths as f64;
        let horizon = cfg.max_observations as f64 / self.lambda;
        let growth = ((-self.q).max(0.0) * horizon).min(700.0).exp();
        Ok(McEstimate {
            mean,
            stderr: (var / n).sqrt(),
            n_effective: values.len(),
            truncated_fraction,
            truncation_bound: scale * (truncated_fraction * growth + ESCAPE_TOL),
        })
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 64 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// E_{x0}[e^{-r tau} G(e^{X_tau}); tau < inf] for tau the first observation
/// with X in [l, u]; `l` may be -inf and `u` +inf.
pub fn estimate_interval_value(
    problem: &PricingProblem,
    x0: f64,
    l: f64,
    u: f64,
    cfg: &McConfig,
    payoff: Payoff,
) -> Result<McEstimate> {
    interval_estimate(problem, x0, l, u, cfg, payoff, None)
}

/// The same expectation as [`estimate_interval_value`], simulated under the
/// Esscher measure of the SN representation at `theta` and reweighted by the
/// likelihood ratio e^{-theta (Y_tau - Y_0) + (psi(theta) - r) tau}.
///
/// With psi(theta) <= r the weight is bounded on the band, so the estimator
/// has finite variance even when E[e^{-2 r tau}] diverges; theta = Phi(r)
/// is the natural choice. Needs a finite band.
pub fn estimate_interval_value_tilted(
    problem: &PricingProblem,
    x0: f64,
    l: f64,
    u: f64,
    cfg: &McConfig,
    payoff: Payoff,
    theta: f64,
) -> Result<McEstimate> {
    if !(l.is_finite() && u.is_finite()) {
        return Err(Error::Precondition("tilted sampling needs a finite band".into()));
    }
    let psi = problem.model.psi(theta)?;
    if psi > problem.r + 1e-12 * problem.r.abs().max(1.0) {
        return Err(Error::Precondition(format!("psi(theta) = {psi} exceeds r = {}: unbounded weights", problem.r)));
    }
    interval_estimate(problem, x0, l, u, cfg, payoff, Some(theta))
}

/// Whether E[e^{-2 r tau}] is finite for the first-passage times involved:
/// psi(s) = 2r needs a real root in the SN representation.
pub fn plain_variance_finite(model: &LevyModel, r: f64) -> bool {
    model.phi(2.0 * r).is_ok()
}

/// Interval value with the sampler chosen by `cfg.sampling`; returns the
/// sampler actually used. Tilted sampling uses theta = Phi(r).
pub fn estimate_value(
    problem: &PricingProblem,
    x0: f64,
    l: f64,
    u: f64,
    cfg: &McConfig,
    payoff: Payoff,
) -> Result<(McEstimate, Sampling)> {
    let tilted = match cfg.sampling {
        Sampling::Plain => false,
        Sampling::Tilted => true,
        Sampling::Auto => l.is_finite() && u.is_finite() && !plain_variance_finite(&problem.model, problem.r),
    };
    if tilted {
        let th = problem.model.phi(problem.r)?;
        Ok((estimate_interval_value_tilted(problem, x0, l, u, cfg, payoff, th)?, Sampling::Tilted))
    } else {
        Ok((estimate_interval_value(problem, x0, l, u, cfg, payoff)?, Sampling::Plain))
    }
}

fn interval_estimate(
    problem: &PricingProblem,
    x0: f64,
    l: f64,
    u: f64,
    cfg: &McConfig,
    payoff: Payoff,
    theta: Option<f64>,
) -> Result<McEstimate> {
    if !(l < u) {
        return Err(Error::Precondition(format!("need l < u, got l={l}, u={u}")));
    }
    if !(problem.lambda > 0.0) {
        return Err(Error::Precondition("lambda must be positive".into()));
    }
    let m = &problem.model;
    let s = m.side().sign();
    let (lo, hi) = if s > 0.0 { (l, u) } else { (-u, -l) };
    let k = problem.strike;
    let g = move |x: f64| match payoff {
        Payoff::Put => k - x.exp(),
        Payoff::Call => x.exp() - k,
        Payoff::PureDiscount(th) => (th * x).exp(),
    };
    let scale = [l, u].iter().filter(|v| v.is_finite()).map(|v| g(*v).abs()).fold(k, f64::max);
    let y0 = s * x0;
    match theta {
        None => {
            let sim = PathSim::new(m, problem.r, problem.lambda, lo, hi, None, cfg.max_observations);
            sim.estimate(y0, cfg, move |y| g(s * y), scale)
        }
        Some(th) => {
            let tilted = m.esscher(th)?;
            let q = problem.r - m.psi(th)?;
            let mut sim = PathSim::new(&tilted, q.max(0.0), problem.lambda, lo, hi, None, cfg.max_observations);
            sim.creep = Some(tilted.phi(q.max(0.0))?);
            let weight = move |y: f64| (-th * (y - y0)).exp();
            let scale = scale * weight(lo).max(weight(hi));
            sim.estimate(y0, cfg, move |y| weight(y) * g(s * y), scale)
        }
    }
}

/// E_x[e^{-q tau + theta X_tau}; tau < inf], tau the first observation in
/// [0, a], for a spectrally negative model.
pub fn estimate_one_sided(
    model: &LevyModel,
    q: f64,
    lambda: f64,
    x: f64,
    a: f64,
    theta: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    sn_only(model)?;
    if !(a > 0.0 && lambda > 0.0) {
        return Err(Error::Precondition(format!("need a > 0 and lambda > 0, got a={a}, lambda={lambda}")));
    }
    let sim = PathSim::new(model, q, lambda, 0.0, a, None, cfg.max_observations);
    sim.estimate(x, cfg, |y| (theta * y).exp(), (theta * a).exp().max(1.0))
}

/// E_x[e^{-q tau + theta X_tau}; tau < T_b^+], tau the first observation in
/// [0, a] and T_b^+ the continuous first passage above b, for a spectrally
/// negative model.
#[allow(clippy::too_many_arguments)]
pub fn estimate_two_sided(
    model: &LevyModel,
    q: f64,
    lambda: f64,
    x: f64,
    a: f64,
    b: f64,
    theta: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    sn_only(model)?;
    if !(0.0 < a && a < b && x <= b && lambda > 0.0) {
        return Err(Error::Precondition(format!("need 0 < a < b, x <= b, got a={a}, b={b}, x={x}")));
    }
    let sim = PathSim::new(model, q, lambda, 0.0, a, Some(b), cfg.max_observations);
    sim.estimate(x, cfg, |y| (theta * y).exp(), (theta * a).exp().max(1.0))
}

fn sn_only(model: &LevyModel) -> Result<()> {
    if model.side().sign() < 0.0 {
        return Err(Error::Precondition("fluctuation estimators take a spectrally negative model".into()));
    }
    Ok(())
}



#[cfg(test)]
mod tilted {
    use super::*;
    use crate::model::{Jump, Side};
    use crate::put::{OptionKind, PutEngine};

    #[test]
    fn tilted_sampling_agrees_with_the_closed_form() {
        for side in [Side::SpectrallyNegative, Side::SpectrallyPositive] {
            let (c, eta) = if side == Side::SpectrallyNegative { (1.0, 0.2) } else { (0.2, 0.3) };
            let m = LevyModel::new(side, c, eta, vec![Jump { alpha: 1.0, beta: 2.0 }]).unwrap();
            let p = PricingProblem::new(m.clone(), 50.0, -0.05, 1.0, OptionKind::Put);
            let e = PutEngine::new(&p).unwrap();
            let (l, u) = (1.5, 3.4);
            let cfg = McConfig { n_paths: 40_000, seed: 5, max_observations: 100_000, ..McConfig::default() };
            let th = m.phi(p.r).unwrap();
            for x in [1.0, 2.5, 3.8] {
                let exact = e.interval_value(x, l, u).unwrap();
                let est = estimate_interval_value_tilted(&p, x, l, u, &cfg, Payoff::Put, th).unwrap();
                assert!(est.z_score(exact) < 4.0, "{side:?} {x}: {exact} vs {est:?}");
            }
        }
    }

    #[test]
    fn unbounded_weights_are_refused() {
        let m = LevyModel::new(Side::SpectrallyNegative, 1.0, 0.2, vec![Jump { alpha: 1.0, beta: 2.0 }]).unwrap();
        let p = PricingProblem::new(m, 50.0, -0.05, 1.0, OptionKind::Put);
        let cfg = McConfig { n_paths: 10, ..McConfig::default() };
        assert!(estimate_interval_value_tilted(&p, 2.0, 1.0, 3.0, &cfg, Payoff::Put, 1.0).is_err());
        assert!(estimate_interval_value_tilted(&p, 2.0, 1.0, f64::INFINITY, &cfg, Payoff::Put, -0.1).is_err());
    }

    #[test]
    fn auto_sampling_follows_the_second_moment() {
        let sn = LevyModel::new(Side::SpectrallyNegative, 1.0, 0.2, vec![Jump { alpha: 1.0, beta: 2.0 }]).unwrap();
        assert!(plain_variance_finite(&sn, -0.05));
        let call = LevyModel::new(Side::SpectrallyNegative, 0.140625, 0.15, vec![Jump { alpha: 2.193125, beta: 10.0 }])
            .unwrap();
        assert!(!plain_variance_finite(&call, -0.05));
        let p = PricingProblem::new(call, 50.0, -0.05, 1.0, OptionKind::Call);
        let cfg = McConfig { n_paths: 100, max_observations: 100_000, ..McConfig::default() };
        assert_eq!(estimate_value(&p, 5.5, 5.0, 6.0, &cfg, Payoff::Call).unwrap().1, Sampling::Tilted);
        let plain = McConfig { sampling: Sampling::Plain, ..cfg };
        assert_eq!(estimate_value(&p, 5.5, 5.0, 6.0, &plain, Payoff::Call).unwrap().1, Sampling::Plain);
    }
}
