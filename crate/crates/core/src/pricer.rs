//! One entry point for puts and calls, in price coordinates.

use crate::call::{default_x_ref, CallEngine};
use crate::error::Result;
use crate::put::{BarrierPair, OptionKind, PricingProblem, PutEngine};

#[derive(Debug, Clone)]
pub enum Pricer {
    Put(PutEngine),
    Call(CallEngine),
}

impl Pricer {
    /// `x_ref` is only used by calls; `None` takes the default reference point.
    pub fn new(problem: &PricingProblem, x_ref: Option<f64>) -> Result<Self> {
        Ok(match problem.option {
            OptionKind::Put => Pricer::Put(PutEngine::new(problem)?),
            OptionKind::Call => {
                Pricer::Call(CallEngine::with_x_ref(problem, x_ref.unwrap_or_else(|| default_x_ref(problem.strike)))?)
            }
        })
    }

    pub fn problem(&self) -> &PricingProblem {
        match self {
            Pricer::Put(e) => e.problem(),
            Pricer::Call(e) => e.problem(),
        }
    }

    /// Optimal log-barriers (l*, u*) with residuals and candidates.
    pub fn solve_barriers(&self) -> Result<BarrierPair> {
        match self {
            Pricer::Put(e) => e.solve_barriers(),
            Pricer::Call(e) => e.solve_barriers(),
        }
    }

    /// V(s) at solved barriers for a price s > 0.
    pub fn value(&self, b: &BarrierPair, s: f64) -> Result<f64> {
        match self {
            Pricer::Put(e) => e.value_function(b, s.ln()),
            Pricer::Call(e) => e.value_function(b, s.ln()),
        }
    }

    /// Value of exercising at the first observation with log-price in [l, u].
    pub fn interval_value(&self, s: f64, l: f64, u: f64) -> Result<f64> {
        match self {
            Pricer::Put(e) => e.interval_value(s.ln(), l, u),
            Pricer::Call(e) => e.interval_value(s.ln(), l, u),
        }
    }

    pub fn payoff(&self, s: f64) -> f64 {
        self.problem().payoff(s)
    }
}

/// True when the price lies in the stopping region [e^l, e^u].
pub fn in_stopping_region(b: &BarrierPair, s: f64) -> bool {
    let x = s.ln();
    b.l <= x && x <= b.u
}
