use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TEMPERATURE: f64 = 1000.0;
pub const DEFAULT_COOLING: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnnealingState {
    pub temp: f64,
    pub cooling: f64,
    pub sn_tag: bool,
}

impl Default for AnnealingState {
    fn default() -> Self {
        AnnealingState {
            temp: DEFAULT_TEMPERATURE,
            cooling: DEFAULT_COOLING,
            sn_tag: false,
        }
    }
}

impl AnnealingState {
    pub fn new(temp: f64, cooling: f64) -> Result<Self> {
        if !(temp.is_finite() && temp > 0.0) {
            return Err(Error::Config(format!("temperature must be positive, got {temp}")));
        }
        if !(0.0..=1.0).contains(&cooling) {
            return Err(Error::Config(format!(
                "cooling constant must lie in [0, 1], got {cooling}"
            )));
        }
        Ok(AnnealingState {
            temp,
            cooling,
            sn_tag: false,
        })
    }

    /// Applies one cooling step. Temperature never reaches zero.
    pub fn cool(&mut self) {
        self.temp = (self.temp * self.cooling).max(f64::MIN_POSITIVE);
    }
}

/// Accepts a worsening move with probability `exp((new - old) / temp)`.
/// Improving or equal moves are never accepted here.
pub fn sn_accept(mq_new: f64, mq_old: f64, s: &AnnealingState, rng: &mut impl Rng) -> bool {
    if mq_new >= mq_old {
        return false;
    }
    let theta: f64 = rng.random();
    theta < ((mq_new - mq_old) / s.temp).exp()
}
