use thiserror::Error;

use crate::phase::Phase;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameters outside the {phase} phase region: requires {requirement}")]
    PhaseDomain {
        phase: Phase,
        requirement: &'static str,
    },

    #[error("operation `{op}` is not defined in the {phase} phase")]
    WrongPhase { op: &'static str, phase: Phase },

    #[error(
        "precision exhausted for N = {n}: cancellation estimate 2^{lost_bits} exceeds 2^{limit} at {bits} bits"
    )]
    PrecisionExhausted {
        n: usize,
        lost_bits: u32,
        limit: u32,
        bits: u32,
    },

    #[error("cutoff {cutoff} too small: tail estimate {tail:e} exceeds target {target:e}")]
    CutoffTooSmall { cutoff: i64, tail: f64, target: f64 },

    #[error("quadrature did not converge: achieved {achieved:e}, target {target:e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("series truncated after {terms} terms: tail bound {tail:e} above {target:e}")]
    SeriesTail { terms: usize, tail: f64, target: f64 },

    #[error("degenerate saddle-point geometry: {0}")]
    DegenerateGeometry(String),

    #[error("need at least {needed} consecutive values of N, got {got}")]
    InsufficientRange { needed: usize, got: usize },

    #[error("lattice size N = {n} outside the supported range {min}..={max}")]
    UnsupportedSize { n: usize, min: usize, max: usize },

    #[error("finite-difference stencil leaves the phase region (step shrunk to 2^-{shrunk_to})")]
    Stencil { shrunk_to: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
