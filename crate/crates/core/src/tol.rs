use crate::{Error, Result};

/// Absolute tolerances shared by every check in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerance {
    /// Feasibility slack.
    pub eps_feas: f64,
    /// Duality-gap tolerance.
    pub eps_opt: f64,
    /// Slack used when re-verifying certificates.
    pub eps_cert: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_feas: 1e-9,
            eps_opt: 1e-7,
            eps_cert: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn new(eps_feas: f64, eps_opt: f64, eps_cert: f64) -> Result<Self> {
        let tol = Self {
            eps_feas,
            eps_opt,
            eps_cert,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.eps_feas) && positive(self.eps_opt) && positive(self.eps_cert)) {
            return Err(Error::InvalidTolerance("all tolerances must be positive and finite"));
        }
        if self.eps_feas > self.eps_cert {
            return Err(Error::InvalidTolerance("eps_feas must not exceed eps_cert"));
        }
        Ok(())
    }
}
