//! Helpers shared by the acceptance suite in `tests/acceptance.rs`.
//!
//! The suite lives in its own package so that a failing criterion does not
//! stop `cargo test --workspace` before the other test binaries have run.

use sixvertex_core::{parse_float, Float, Phase, PhaseParams, Precision};

/// Result of one acceptance criterion.
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

/// `|a - b| / |b|` at the larger of the two precisions.
pub fn rel(a: &Float, b: &Float) -> f64 {
    let prec = a.prec().max(b.prec());
    let d = Float::with_val(prec, a - b).abs();
    (d / Float::with_val(prec, b.abs_ref())).to_f64()
}

pub fn prec(bits: u32) -> Precision {
    Precision::new(bits).expect("valid precision")
}

pub fn params(phase: Phase, t: &str, gamma: &str, bits: u32) -> PhaseParams {
    PhaseParams::new(phase, parse_float(t, bits).unwrap(), parse_float(gamma, bits).unwrap()).unwrap()
}

pub fn zeta_params(phase: Phase, zeta: &str, gamma: &str, bits: u32) -> PhaseParams {
    PhaseParams::from_zeta(phase, parse_float(zeta, bits).unwrap(), parse_float(gamma, bits).unwrap()).unwrap()
}

pub trait PowU {
    fn pow_ref_u(&self, e: u32) -> Float;
}

impl PowU for Float {
    fn pow_ref_u(&self, e: u32) -> Float {
        use rug::ops::Pow;
        Float::with_val(self.prec(), self.pow(e))
    }
}
