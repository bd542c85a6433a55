//! Search budgets.
//!
//! The core has no clock, so exact search asks a [`Budget`] whether it may
//! keep going. The std companion supplies a wall-clock implementation.

use core::cell::Cell;

pub trait Budget {
    /// Called once per search node; `true` stops the search.
    fn exhausted(&self) -> bool;
}

/// Never runs out.
#[derive(Debug, Default, Clone, Copy)]
pub struct Unlimited;

impl Budget for Unlimited {
    fn exhausted(&self) -> bool {
        false
    }
}

/// Deterministic budget counting search nodes.
#[derive(Debug)]
pub struct NodeBudget {
    remaining: Cell<u64>,
}

impl NodeBudget {
    pub fn new(nodes: u64) -> Self {
        Self {
            remaining: Cell::new(nodes),
        }
    }
}

impl Budget for NodeBudget {
    fn exhausted(&self) -> bool {
        let left = self.remaining.get();
        if left == 0 {
            return true;
        }
        self.remaining.set(left - 1);
        false
    }
}

impl<B: Budget + ?Sized> Budget for &B {
    fn exhausted(&self) -> bool {
        (**self).exhausted()
    }
}
