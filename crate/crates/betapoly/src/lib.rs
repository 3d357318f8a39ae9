//! Expected face numbers, angles and conic intrinsic volumes of beta and
//! beta-prime random polytopes, Poisson power-law hulls and Poisson
//! hyperplane zero cells, together with the Monte Carlo machinery that
//! checks every formula by simulation.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cones;
pub mod error;
pub mod formulas;
pub mod hull;
pub mod linalg;
pub mod montecarlo;
pub mod quadrature;
pub mod sampling;
pub mod specfun;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Which of the two density families a formula refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    /// Density proportional to (1 − ‖x‖²)^β on the unit ball.
    Beta,
    /// Density proportional to (1 + ‖x‖²)^(−β) on the whole space.
    BetaPrime,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Beta => "beta",
            Family::BetaPrime => "betaPrime",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(Family::Beta),
            "betaPrime" | "beta-prime" | "betaprime" => Ok(Family::BetaPrime),
            other => Err(Error::domain(format!("unknown family '{other}'"))),
        }
    }
}
