//! American calls by reduction to a put under the tilted measure.
//!
//! With spot e^x and log-strike k = log K, the call's interval strategy
//! [l, u] has the value of the put with strike e^x, started at k, under the
//! exponent Psi_1^d and discount r - Psi(1), exercised on
//! [k + x - u, k + x - l]. The put is solved once at x = x_ref and the call
//! barriers are read back; they do not depend on x_ref.

use crate::error::{Error, Result};
use crate::model::LevyModel;
use crate::put::{BarrierPair, Candidate, OptionKind, PricingProblem, PutEngine};

/// Offset of the default reference point above log K.
pub const DEFAULT_X_REF_OFFSET: f64 = 1.3;

pub fn default_x_ref(strike: f64) -> f64 {
    strike.ln() + DEFAULT_X_REF_OFFSET
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryMap {
    pub x_ref: f64,
    pub k_tilde: f64,
    pub r_tilde: f64,
    pub put_problem: PricingProblem,
}

impl SymmetryMap {
    /// Put-side log-barriers for call barriers (l, u) at the reference point.
    pub fn to_put(&self, log_k: f64, l: f64, u: f64) -> (f64, f64) {
        (log_k + self.x_ref - u, log_k + self.x_ref - l)
    }

    /// Call log-barriers recovered from put-side barriers (l, u).
    pub fn to_call(&self, log_k: f64, l: f64, u: f64) -> (f64, f64) {
        (log_k + self.x_ref - u, log_k + self.x_ref - l)
    }
}

pub fn build_symmetry_map(problem: &PricingProblem, x_ref: f64) -> Result<SymmetryMap> {
    if problem.option != OptionKind::Call {
        return Err(Error::Precondition("symmetry map needs a call problem".into()));
    }
    if !(problem.strike > 0.0) || !x_ref.is_finite() {
        return Err(Error::Precondition(format!(
            "need K > 0 and finite x_ref, got K={}, x_ref={x_ref}",
            problem.strike
        )));
    }
    let psi1 = problem.model.log_mean_price()?;
    let r_tilde = problem.r - psi1;
    if r_tilde >= 0.0 {
        return Err(Error::BarrierRegime { r_tilde });
    }
    let tilted: LevyModel = problem.model.tilt_exponent_for_call()?;
    let k_tilde = x_ref.exp();
    let put_problem = PricingProblem::new(tilted, k_tilde, r_tilde, problem.lambda, OptionKind::Put);
    Ok(SymmetryMap { x_ref, k_tilde, r_tilde, put_problem })
}

#[derive(Debug, Clone)]
pub struct CallEngine {
    problem: PricingProblem,
    map: SymmetryMap,
    put: PutEngine,
}

impl CallEngine {
    pub fn new(problem: &PricingProblem) -> Result<Self> {
        Self::with_x_ref(problem, default_x_ref(problem.strike))
    }

    pub fn with_x_ref(problem: &PricingProblem, x_ref: f64) -> Result<Self> {
        let map = build_symmetry_map(problem, x_ref)?;
        let put = PutEngine::new(&map.put_problem)?;
        Ok(CallEngine { problem: problem.clone(), map, put })
    }

    pub fn problem(&self) -> &PricingProblem {
        &self.problem
    }

    pub fn map(&self) -> &SymmetryMap {
        &self.map
    }

    pub fn put_engine(&self) -> &PutEngine {
        &self.put
    }

    fn log_k(&self) -> f64 {
        self.problem.strike.ln()
    }

    /// Optimal call log-barriers; residuals are those of the auxiliary put.
    pub fn solve_barriers(&self) -> Result<BarrierPair> {
        let p = self.put.solve_barriers()?;
        let lk = self.log_k();
        let (l, u) = self.map.to_call(lk, p.l, p.u);
        if !(lk < l && l < u && u.is_finite()) {
            return Err(Error::NoRoot(format!(
                "recovered call barriers violate K < L < U < inf: l={l}, u={u}, log K={lk}"
            )));
        }
        let candidates = p
            .candidates
            .iter()
            .map(|c| {
                let (l, u) = self.map.to_call(lk, c.l, c.u);
                Candidate { l, u, value: c.value }
            })
            .collect();
        Ok(BarrierPair { l, u, candidates, ..p })
    }

    /// The auxiliary put's barriers corresponding to call barriers `b`.
    pub fn put_barriers(&self, b: &BarrierPair) -> BarrierPair {
        let (l, u) = self.map.to_put(self.log_k(), b.l, b.u);
        BarrierPair { l, u, candidates: Vec::new(), ..b.clone() }
    }

    /// V_c(e^x) at solved barriers.
    pub fn value_function(&self, b: &BarrierPair, x: f64) -> Result<f64> {
        self.put.check_fresh(&self.put_barriers(b))?;
        self.interval_value(x, b.l, b.u)
    }

    /// Value of exercising the call at the first observation with log-price
    /// in [l, u] (`u` may be +inf).
    pub fn interval_value(&self, x: f64, l: f64, u: f64) -> Result<f64> {
        if !(l < u) || !l.is_finite() {
            return Err(Error::Precondition(format!("need finite l < u, got l={l}, u={u}")));
        }
        let lk = self.log_k();
        self.put.interval_value_with(x.exp(), lk, lk + x - u, lk + x - l)
    }
}

pub fn solve_barriers_call(problem: &PricingProblem) -> Result<BarrierPair> {
    CallEngine::new(problem)?.solve_barriers()
}

/// V_c(s) for a price s > 0.
pub fn value_function_call(problem: &PricingProblem, barriers: &BarrierPair, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Precondition(format!("need s > 0, got {s}")));
    }
    CallEngine::new(problem)?.value_function(barriers, s.ln())
}
