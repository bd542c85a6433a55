//! Seeded synthetic calibration snapshots.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::machine::{EdgeOverride, GridDims, MachineDefaults, MachineSpec, QubitOverride};

/// Relative spread of each calibrated quantity around `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jitter {
    pub base: MachineDefaults,
    /// Error rates are drawn from `base · (1 ± error_spread)`.
    pub error_spread: f64,
    /// Coherence times from `base · (1 ± t2_spread)`.
    pub t2_spread: f64,
    /// CNOT durations from `base ± duration_spread` timeslots (at least 1).
    pub duration_spread: u64,
}

impl Default for Jitter {
    fn default() -> Self {
        Self {
            base: MachineDefaults::default(),
            error_spread: 0.5,
            t2_spread: 0.2,
            duration_spread: 1,
        }
    }
}

fn spread(rng: &mut ChaCha8Rng, base: f64, rel: f64) -> f64 {
    if rel == 0.0 {
        return base;
    }
    base * (1.0 + rng.random_range(-rel..=rel))
}

fn error(rng: &mut ChaCha8Rng, base: f64, rel: f64) -> f64 {
    spread(rng, base, rel).clamp(1e-4, 0.5)
}

/// An `mx × my` snapshot where every qubit and edge overrides the defaults
/// with a seeded draw. Same inputs give the same snapshot.
pub fn synthetic_calibration(mx: usize, my: usize, seed: u64, j: &Jitter) -> MachineSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = &j.base;
    let mut qubits = Vec::with_capacity(mx * my);
    for x in 0..mx {
        for y in 0..my {
            let t2 = libm::round(spread(&mut rng, b.t2 as f64, j.t2_spread)).max(1.0) as u64;
            qubits.push(QubitOverride {
                x,
                y,
                t2: Some(t2),
                readout_error: Some(error(&mut rng, b.readout_error, j.error_spread)),
                readout_duration: None,
            });
        }
    }
    let mut edges = Vec::new();
    for x in 0..mx {
        for y in 0..my {
            for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                if nx >= mx || ny >= my {
                    continue;
                }
                let d = j.duration_spread;
                let dur = if d == 0 {
                    b.cnot_duration
                } else {
                    let lo = b.cnot_duration.saturating_sub(d).max(1);
                    rng.random_range(lo..=b.cnot_duration + d)
                };
                edges.push(EdgeOverride {
                    a: [x, y],
                    b: [nx, ny],
                    cnot_error: Some(error(&mut rng, b.cnot_error, j.error_spread)),
                    cnot_duration: Some(dur),
                });
            }
        }
    }
    MachineSpec {
        grid: GridDims { mx, my },
        defaults: b.clone(),
        qubits,
        edges,
    }
}
