//! The enumeration guard shared by every brute-force routine.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// 0 means "not overridden".
static OVERRIDE: AtomicU64 = AtomicU64::new(0);

/// Current budget: an explicit override, else `NP_BUDGET`, else 10^7.
pub fn enumeration_budget() -> u64 {
    match OVERRIDE.load(Ordering::Relaxed) {
        0 => std::env::var("NP_BUDGET").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET),
        b => b,
    }
}

pub fn set_enumeration_budget(budget: u64) {
    OVERRIDE.store(budget, Ordering::Relaxed);
}

/// Fails unless enumerating `needed` field elements fits in the budget.
pub fn check_budget(needed: u128) -> Result<()> {
    let budget = enumeration_budget();
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// q^m as u128, saturating.
pub fn field_size(q: u64, m: u32) -> u128 {
    (q as u128).checked_pow(m).unwrap_or(u128::MAX)
}
