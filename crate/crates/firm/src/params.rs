//! Approximation-guarantee parameters shared by queries and the walk index.

use crate::error::{Error, Result};

/// Parameters of the (ε, δ)-approximation contract.
///
/// `omega` is the number of walks required per unit of leftover residue,
/// `omega = ((2/3)·ε + 2) · ln(2/p_f) / (ε²·δ)`, and the push threshold is
/// tied to it through `r_max · omega = beta / alpha`, so the index size
/// stays Θ(m) regardless of how tight δ is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub p_f: f64,
    pub beta: f64,
}

impl ApproxParams {
    pub fn new(alpha: f64, epsilon: f64, delta: f64, p_f: f64, beta: f64) -> Result<Self> {
        let check = |cond: bool, msg: &str| -> Result<()> {
            if cond {
                Ok(())
            } else {
                Err(Error::InvalidParameter(msg.to_string()))
            }
        };
        check(alpha > 0.0 && alpha < 1.0, "alpha must be in (0,1)")?;
        check(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0,1)")?;
        check(delta > 0.0 && delta <= 1.0, "delta must be in (0,1]")?;
        check(p_f > 0.0 && p_f < 1.0, "p_f must be in (0,1)")?;
        check(beta > 0.0, "beta must be positive")?;
        Ok(Self {
            alpha,
            epsilon,
            delta,
            p_f,
            beta,
        })
    }

    /// Default setting for a graph with `n` nodes: α=0.2, ε=0.5, δ=p_f=1/n,
    /// β=1.
    pub fn defaults_for(n: usize) -> Self {
        let inv_n = 1.0 / n.max(2) as f64;
        Self::new(0.2, 0.5, inv_n, inv_n, 1.0).expect("defaults are valid")
    }

    /// Walks needed per unit residue for the (ε, δ) guarantee.
    pub fn omega(&self) -> f64 {
        Self::omega_for(self.epsilon, self.delta, self.p_f)
    }

    pub fn omega_for(epsilon: f64, delta: f64, p_f: f64) -> f64 {
        ((2.0 / 3.0) * epsilon + 2.0) * (2.0 / p_f).ln() / (epsilon * epsilon * delta)
    }

    /// Push threshold; chosen so that `r_max * omega == beta / alpha`.
    pub fn r_max(&self) -> f64 {
        self.beta / (self.alpha * self.omega())
    }

    /// The per-degree walk budget of the index, `r_max * omega`.
    pub fn walk_budget(&self) -> f64 {
        self.beta / self.alpha
    }
}
