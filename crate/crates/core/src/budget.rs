//! Resource caps shared by every exhaustive computation.
//!
//! Exceeding a cap is reported as [`Error::Budget`]; nothing is silently
//! truncated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limits on the work a single call may perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest `d` accepted by sphere enumeration.
    pub max_d: u64,
    /// Largest number of pairwise comparisons in pair scans.
    pub max_pairs: u128,
    /// Largest matrix dimension handed to the dense eigensolver.
    pub max_dense_dim: usize,
    /// Largest number of paths materialized by explicit enumeration.
    pub max_paths: u128,
    /// Largest number of nodes in a Hecke tree layer.
    pub max_hecke_nodes: u128,
    /// Largest `arcs * arcs * K` product for power-trace verification.
    pub max_trace_work: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_d: 1_000_000,
            max_pairs: 100_000_000,
            max_dense_dim: 6000,
            max_paths: 50_000_000,
            max_hecke_nodes: 10_000_000,
            max_trace_work: 20_000_000_000,
        }
    }
}

/// Prefix for environment overrides, e.g. `LINNIK_BUDGET_MAX_D=2000000`.
pub const ENV_PREFIX: &str = "LINNIK_BUDGET_";

impl Budget {
    /// Defaults overridden by any `LINNIK_BUDGET_*` variables that are set.
    pub fn from_env() -> Result<Self> {
        Self::from_lookup(|key| std::env::var(key).ok())
    }

    /// Same as [`Budget::from_env`] with an injectable variable lookup.
    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let mut b = Budget::default();
        let read = |name: &str| -> Result<Option<u128>> {
            let key = format!("{ENV_PREFIX}{name}");
            match lookup(&key) {
                None => Ok(None),
                Some(v) => v
                    .trim()
                    .parse::<u128>()
                    .map(Some)
                    .map_err(|_| Error::precondition(format!("{key}={v} is not a non-negative integer"))),
            }
        };
        if let Some(v) = read("MAX_D")? {
            b.max_d = u64::try_from(v).map_err(|_| Error::Range("LINNIK_BUDGET_MAX_D".into()))?;
        }
        if let Some(v) = read("MAX_PAIRS")? {
            b.max_pairs = v;
        }
        if let Some(v) = read("MAX_DENSE_DIM")? {
            b.max_dense_dim =
                usize::try_from(v).map_err(|_| Error::Range("LINNIK_BUDGET_MAX_DENSE_DIM".into()))?;
        }
        if let Some(v) = read("MAX_PATHS")? {
            b.max_paths = v;
        }
        if let Some(v) = read("MAX_HECKE_NODES")? {
            b.max_hecke_nodes = v;
        }
        if let Some(v) = read("MAX_TRACE_WORK")? {
            b.max_trace_work = v;
        }
        Ok(b)
    }

    pub(crate) fn check(what: &'static str, required: u128, limit: u128) -> Result<()> {
        if required > limit {
            Err(Error::Budget {
                what,
                required,
                limit,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides_apply() {
        let b = Budget::from_lookup(|k| match k {
            "LINNIK_BUDGET_MAX_D" => Some("42".into()),
            "LINNIK_BUDGET_MAX_PAIRS" => Some(" 7 ".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(b.max_d, 42);
        assert_eq!(b.max_pairs, 7);
        assert_eq!(b.max_dense_dim, Budget::default().max_dense_dim);
    }

    #[test]
    fn bad_env_value_is_rejected() {
        let err = Budget::from_lookup(|k| (k == "LINNIK_BUDGET_MAX_PATHS").then(|| "lots".into()));
        assert!(matches!(err, Err(Error::Precondition(_))));
    }
}
