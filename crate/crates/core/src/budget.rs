//! Resource budgets for the enumeration and elimination stages.

use crate::error::{CoreError, Result};
use std::time::Instant;

/// Resource limits for a computation.
///
/// `max_weyl_order` bounds the size of the Weyl group a direct
/// computation is allowed to enumerate. The default admits everything
/// through E6 (|W| = 51 840); the extended budget admits E7
/// (|W| = 2 903 040). E8 (|W| ≈ 7·10^8) is rejected by both.
#[derive(Debug, Clone)]
pub struct Budget {
    pub max_weyl_order: u64,
    pub max_seconds: Option<f64>,
    pub max_memory_mb: Option<u64>,
}

impl Budget {
    pub const DEFAULT_WEYL_ORDER: u64 = 100_000;
    pub const EXTENDED_WEYL_ORDER: u64 = 3_000_000;

    pub fn extended() -> Self {
        Budget {
            max_weyl_order: Self::EXTENDED_WEYL_ORDER,
            ..Budget::default()
        }
    }

    pub fn unlimited() -> Self {
        Budget {
            max_weyl_order: u64::MAX,
            max_seconds: None,
            max_memory_mb: None,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_weyl_order: Self::DEFAULT_WEYL_ORDER,
            max_seconds: None,
            max_memory_mb: None,
        }
    }
}

/// Running enforcement of a [`Budget`].
///
/// Memory is accounted approximately: the tracker charges the dominant
/// allocations (stratum keys, matrices, cover tables, elimination rows)
/// and checks the running total against the limit.
#[derive(Debug)]
pub struct BudgetTracker {
    budget: Budget,
    start: Instant,
    bytes: usize,
    peak_bytes: usize,
}

impl BudgetTracker {
    pub fn new(budget: Budget) -> Self {
        BudgetTracker {
            budget,
            start: Instant::now(),
            bytes: 0,
            peak_bytes: 0,
        }
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn peak_bytes(&self) -> usize {
        self.peak_bytes
    }

    pub fn charge_bytes(&mut self, delta: usize, what: &str) -> Result<()> {
        self.bytes += delta;
        self.peak_bytes = self.peak_bytes.max(self.bytes);
        if let Some(limit_mb) = self.budget.max_memory_mb {
            if self.bytes as u64 > limit_mb.saturating_mul(1024 * 1024) {
                return Err(CoreError::infeasible(format!(
                    "memory budget of {limit_mb} MiB exceeded while allocating {what} \
                     (estimated {:.1} MiB resident)",
                    self.bytes as f64 / (1024.0 * 1024.0)
                )));
            }
        }
        Ok(())
    }

    pub fn release_bytes(&mut self, delta: usize) {
        self.bytes = self.bytes.saturating_sub(delta);
    }

    pub fn check_time(&self, stage: &str) -> Result<()> {
        if let Some(limit) = self.budget.max_seconds {
            let elapsed = self.start.elapsed().as_secs_f64();
            if elapsed > limit {
                return Err(CoreError::infeasible(format!(
                    "time budget of {limit:.0} s exceeded during {stage} ({elapsed:.1} s elapsed)"
                )));
            }
        }
        Ok(())
    }
}
