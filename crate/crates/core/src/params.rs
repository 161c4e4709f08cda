//! Physical constants of the model.
//!
//! The atom's resonance is the zero of frequency; every detuning is carried by
//! the phase of the complex amplitudes. With the defaults `gamma = c = 1` all
//! lengths are in units of the coherence length `c / gamma` and all times in
//! units of `1 / gamma`.

use crate::error::{Error, Result};

/// Dipole relaxation rate and propagation speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    gamma: f64,
    c: f64,
}

impl PhysicalParams {
    pub fn new(gamma: f64, c: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "must be finite and > 0",
            });
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
                reason: "must be finite and > 0",
            });
        }
        Ok(Self { gamma, c })
    }

    /// An atom that does not couple to the field at all (`gamma = 0`).
    ///
    /// Only meant as a free-propagation reference; the coherence length is
    /// infinite.
    pub fn uncoupled(c: f64) -> Result<Self> {
        let mut p = Self::new(1.0, c)?;
        p.gamma = 0.0;
        Ok(p)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Inverse coherence length `gamma / c`.
    pub fn kappa(&self) -> f64 {
        self.gamma / self.c
    }

    /// Spatial extent `c / gamma` of a spontaneously emitted wavepacket.
    pub fn coherence_length(&self) -> f64 {
        self.c / self.gamma
    }

    pub fn is_coupled(&self) -> bool {
        self.gamma > 0.0
    }

    /// `true` when a pulse of this length is long compared to the coherence
    /// length (at least 20 coherence lengths).
    pub fn is_long_pulse(&self, length: f64) -> bool {
        length * self.kappa() >= LONG_PULSE_THRESHOLD
    }

    pub(crate) fn warn_if_short(&self, length: f64, what: &str) {
        if !self.is_long_pulse(length) {
            log::warn!(
                "{what}: pulse length {length} is below {LONG_PULSE_THRESHOLD} coherence lengths; \
                 long-pulse formulas are only approximate here"
            );
        }
    }
}

/// Pulse length, in coherence lengths, below which long-pulse results are
/// flagged.
pub const LONG_PULSE_THRESHOLD: f64 = 20.0;

impl Default for PhysicalParams {
    fn default() -> Self {
        Self { gamma: 1.0, c: 1.0 }
    }
}
