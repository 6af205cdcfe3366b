use serde::Serialize;

use crate::error::{Error, Result};

/// Working budget shared by the computations: p-adic precision `n_prec`,
/// jet order, series degree, q-degree and limit stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrecisionBudget {
    pub p: u32,
    #[serde(rename = "N")]
    pub prec: i64,
    #[serde(rename = "n")]
    pub jet_order: usize,
    #[serde(rename = "D")]
    pub deg: i64,
    #[serde(rename = "Q")]
    pub q_deg: i64,
    #[serde(rename = "M")]
    pub stages: u32,
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        PrecisionBudget { p: 5, prec: 8, jet_order: 4, deg: 150, q_deg: 50, stages: 6 }
    }
}

pub const SUPPORTED_PRIMES: [u32; 4] = [5, 7, 11, 13];

impl PrecisionBudget {
    pub fn validate(&self) -> Result<()> {
        if !SUPPORTED_PRIMES.contains(&self.p) {
            return Err(Error::Invalid(format!("p = {} not in {:?}", self.p, SUPPORTED_PRIMES)));
        }
        if self.prec <= 0 || self.jet_order == 0 || self.deg <= 0 || self.q_deg <= 0 || self.stages == 0 {
            return Err(Error::Invalid("budgets must be positive".into()));
        }
        Ok(())
    }

    pub fn check_order(&self, need: usize) -> Result<()> {
        if need > self.jet_order {
            return Err(Error::JetOrder { need, budget: self.jet_order });
        }
        Ok(())
    }

    pub fn check_stage(&self, need: u32) -> Result<()> {
        if need > self.stages {
            return Err(Error::Stage { need, budget: self.stages });
        }
        Ok(())
    }
}
