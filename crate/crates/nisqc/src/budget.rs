use std::time::{Duration, Instant};

use nisqc_core::Budget;

/// Wall-clock search budget.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    at: Instant,
}

impl Deadline {
    pub fn after(limit: Duration) -> Self {
        Self {
            at: Instant::now() + limit,
        }
    }

    /// `secs` must be finite and positive; anything else never expires.
    pub fn after_secs(secs: f64) -> Option<Self> {
        Duration::try_from_secs_f64(secs).ok().map(Self::after)
    }
}

impl Budget for Deadline {
    fn exhausted(&self) -> bool {
        Instant::now() >= self.at
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expires() {
        let d = Deadline::after(Duration::ZERO);
        assert!(d.exhausted());
        let d = Deadline::after_secs(3600.0).unwrap();
        assert!(!d.exhausted());
        assert!(Deadline::after_secs(f64::NAN).is_none());
    }
}
