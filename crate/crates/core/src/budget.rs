//! Enumeration caps for the exhaustive procedures.
//!
//! `GAPKIT_BUDGET` overrides the defaults. A bare integer sets the
//! exponent cap shared by the lattice and SAT oracles; otherwise a
//! comma-separated list of `key=value` pairs sets individual caps
//! (`oracle`, `mitm`, `gadget_d`, `search`).

use crate::error::{Error, Result};

pub const BUDGET_ENV: &str = "GAPKIT_BUDGET";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest n for 2^n enumerations (lattice and SAT oracles).
    pub oracle_bits: u32,
    /// Largest rank for meet-in-the-middle materialization.
    pub mitm_bits: u32,
    /// Largest gadget dimension for 4^d pair enumeration.
    pub gadget_d: u32,
    /// Largest number of gadget assignments an exhaustive search may visit.
    pub search_assignments: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            oracle_bits: 26,
            mitm_bits: 30,
            gadget_d: 12,
            search_assignments: 1 << 24,
        }
    }
}

impl Budget {
    /// Defaults overridden by `GAPKIT_BUDGET`; a malformed value is ignored
    /// in favour of the defaults.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| Self::parse(&v).ok())
            .unwrap_or_default()
    }

    pub fn parse(setting: &str) -> Result<Self> {
        let mut budget = Self::default();
        let setting = setting.trim();
        if let Ok(bits) = setting.parse::<u32>() {
            budget.oracle_bits = bits;
            return Ok(budget);
        }
        for part in setting.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("bad budget entry '{part}'")))?;
            let bad = |_| Error::Parameter(format!("bad budget value '{value}'"));
            match key.trim() {
                "oracle" => budget.oracle_bits = value.trim().parse().map_err(bad)?,
                "mitm" => budget.mitm_bits = value.trim().parse().map_err(bad)?,
                "gadget_d" => budget.gadget_d = value.trim().parse().map_err(bad)?,
                "search" => budget.search_assignments = value.trim().parse().map_err(bad)?,
                other => return Err(Error::Parameter(format!("unknown budget key '{other}'"))),
            }
        }
        Ok(budget)
    }

    pub(crate) fn check_bits(&self, what: &'static str, n: usize, cap: u32) -> Result<()> {
        if n > cap.min(62) as usize {
            return Err(Error::OverBudget {
                what,
                requested: format!("n = {n}"),
                cap: format!("n ≤ {cap}"),
            });
        }
        Ok(())
    }
}
