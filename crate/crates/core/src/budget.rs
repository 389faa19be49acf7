//! Enumeration limits shared by every exhaustive procedure.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default cap on the size of a single configuration enumeration.
pub const DEFAULT_MAX_ENUM: u64 = 1_000_000;

/// Default cap on magma carrier size.
pub const DEFAULT_MAX_CARRIER: usize = 16;

/// Default cap on candidate factor tables in the generic overlap search.
pub const DEFAULT_FACTOR_SEARCH_CAP: u64 = 1 << 16;

/// Per-query enumeration budget.
///
/// Every enumeration of a configuration space is admitted against
/// `max_enum` before it starts; the running total is kept for reporting.
#[derive(Debug)]
pub struct Budget {
    max_enum: u64,
    factor_search_cap: u64,
    enumerated: AtomicU64,
}

impl Budget {
    pub fn new(max_enum: u64) -> Self {
        Budget {
            max_enum,
            factor_search_cap: DEFAULT_FACTOR_SEARCH_CAP,
            enumerated: AtomicU64::new(0),
        }
    }

    pub fn with_factor_search_cap(mut self, cap: u64) -> Self {
        self.factor_search_cap = cap;
        self
    }

    pub fn max_enum(&self) -> u64 {
        self.max_enum
    }

    pub fn factor_search_cap(&self) -> u64 {
        self.factor_search_cap
    }

    /// Checks that an enumeration of `count` items fits the cap and records it.
    pub fn admit(&self, count: u128) -> Result<()> {
        if count > self.max_enum as u128 {
            return Err(Error::EnumerationCapExceeded {
                requested: count,
                cap: self.max_enum,
            });
        }
        self.enumerated.fetch_add(count as u64, Ordering::Relaxed);
        Ok(())
    }

    /// Total number of configurations enumerated so far.
    pub fn enumerated(&self) -> u64 {
        self.enumerated.load(Ordering::Relaxed)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_MAX_ENUM)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admit_counts_and_caps() {
        let b = Budget::new(4);
        b.admit(4).unwrap();
        b.admit(2).unwrap();
        assert_eq!(b.enumerated(), 6);
        assert!(matches!(
            b.admit(8),
            Err(Error::EnumerationCapExceeded { requested: 8, cap: 4 })
        ));
    }
}
