//! The determinant written as a discrete Coulomb-gas sum.
//!
//! `φ⁽ⁿ⁾(t)` are the moments of a discrete measure, so by Andréief's
//! identity `τ_N` is a sum over increasing `N`-tuples:
//!
//! ```text
//! FE: φ = Σ_{l≥0} 4 sinh(2γl) e^{-2tl},    τ_N = 2^{N(N-1)} Σ_{0≤l₁<…<l_N} Δ(l)² ∏ 4 sinh(2γl_i) e^{-2tl_i}
//! AF: φ = Σ_{l∈ℤ} 2 e^{2tl-2γ|l|},         τ_N = 2^{N(N-1)} Σ_{l₁<…<l_N}   Δ(l)² ∏ 2 e^{2tl_i-2γ|l_i|}
//! ```
//!
//! The moments are in the variable `x = ∓2l`, which gives `2^{N(N-1)}`, and
//! summing increasing tuples absorbs the `1/N!` of the symmetric sum.

use rug::{Float, Integer};

use crate::{Error, Phase, PhaseParams, Precision, Result};

/// The normalisation `c_N = (∏_{n<N} n!)²`, exactly.
pub fn c_n(n: usize) -> Integer {
    let mut prod = Integer::from(1);
    let mut fact = Integer::from(1);
    for k in 1..n {
        fact *= k as u32;
        prod *= &fact;
    }
    prod.square()
}

/// Decay rate per unit step of the single-site weight.
fn decay(params: &PhaseParams) -> Result<f64> {
    let t = params.t().to_f64();
    let g = params.gamma().to_f64();
    match params.phase() {
        Phase::Ferroelectric => Ok(2.0 * (t - g)),
        Phase::AntiFerroelectric => Ok(2.0 * (g - t.abs())),
        phase => Err(Error::WrongPhase {
            op: "tau_discrete_sum",
            phase,
        }),
    }
}

/// Beyond this the lattice sum is out of reach anyway.
const MAX_CUTOFF: i64 = 100_000;

/// Geometric ratio bounding successive shells beyond `cutoff`.
fn shell_ratio(rate: f64, n: usize, cutoff: i64) -> f64 {
    let l = cutoff.max(1) as f64;
    (-rate).exp() * ((l + 1.0) / l).powi(3 * (n as i32 - 1))
}

/// A cutoff for which the shell-ratio tail test is expected to pass.
pub fn sufficient_cutoff(params: &PhaseParams, n: usize, bits: u32) -> Result<i64> {
    let rate = decay(params)?;
    let target = (bits as f64 / 2.0 + 16.0) * std::f64::consts::LN_2;
    let mut l = n as i64 + 2;
    while l <= MAX_CUTOFF {
        // Shell size relative to the bulk grows at most like l^{3(N-1)}.
        let log_shell = 3.0 * (n as f64 - 1.0) * (l as f64).ln() - rate * l as f64;
        let rho = shell_ratio(rate, n, l);
        if rho < 1.0 && log_shell + (rho / (1.0 - rho)).ln() < -target {
            return Ok(l);
        }
        l += 1;
    }
    Err(Error::CutoffTooSmall {
        cutoff: MAX_CUTOFF,
        tail: f64::INFINITY,
        target: 2f64.powi(-(bits as i32) / 2),
    })
}

/// `τ_N` (not scaled by `c_N`) as a discrete sum truncated at `|l| ≤ cutoff`.
///
/// The tail beyond the cutoff is bounded by the outermost shell (tuples that
/// touch the cutoff) times `ρ/(1-ρ)`, with `ρ` the shell ratio; the bound
/// must be below `2^(-bits/2)` of the partial sum.
pub fn tau_discrete_sum(params: &PhaseParams, n: usize, cutoff: i64, p: Precision) -> Result<Float> {
    let rate = decay(params)?;
    if n == 0 {
        return Err(Error::UnsupportedSize { n, min: 1, max: 8 });
    }
    let bits = p.work();
    let t = Float::with_val(bits, params.t());
    let g = Float::with_val(bits, params.gamma());
    let (lo, hi) = match params.phase() {
        Phase::Ferroelectric => (0i64, cutoff),
        _ => (-cutoff, cutoff),
    };
    if hi - lo + 1 < n as i64 {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail: f64::INFINITY,
            target: 0.0,
        });
    }
    let weights: Vec<Float> = (lo..=hi)
        .map(|l| {
            let lf = Float::with_val(bits, l);
            match params.phase() {
                Phase::Ferroelectric => {
                    let s = (Float::with_val(bits, &g * &lf) * 2u32).sinh();
                    let e: Float = Float::with_val(bits, &t * &lf) * 2u32;
                    let e = (-e).exp();
                    s * e * 4u32
                }
                _ => {
                    let x: Float = Float::with_val(bits, &t * &lf) - Float::with_val(bits, &g * lf.abs());
                    (x * 2u32).exp() * 2u32
                }
            }
        })
        .collect();
    let mut acc = Sums {
        total: Float::with_val(bits, 0),
        shell: Float::with_val(bits, 0),
    };
    let mut chosen = Vec::with_capacity(n);
    let one = Float::with_val(bits, 1);
    walk(&weights, lo, hi, n, 0, &one, &mut chosen, &mut acc, bits);

    let rho = shell_ratio(rate, n, cutoff);
    let sum = acc.total.to_f64();
    let tail = if rho < 1.0 {
        acc.shell.to_f64() * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    let target = 2f64.powi(-(p.bits() as i32) / 2);
    // Written so that a NaN tail is rejected too.
    let within = tail <= target * sum;
    if !within {
        return Err(Error::CutoffTooSmall {
            cutoff,
            tail: tail / sum,
            target,
        });
    }
    let scale = Integer::from(1) << (n * (n - 1)) as u32;
    Ok(Float::with_val(p.bits(), acc.total * scale))
}

struct Sums {
    total: Float,
    shell: Float,
}

/// Depth-first over increasing tuples with running products.
#[allow(clippy::too_many_arguments)]
fn walk(
    weights: &[Float],
    lo: i64,
    hi: i64,
    n: usize,
    start: i64,
    prefix: &Float,
    chosen: &mut Vec<i64>,
    acc: &mut Sums,
    bits: u32,
) {
    let depth = chosen.len();
    let first = if depth == 0 { lo } else { start };
    // Leave room for the remaining n - depth - 1 entries.
    let last = hi - (n - depth - 1) as i64;
    for l in first..=last {
        let w = &weights[(l - lo) as usize];
        if w.is_zero() {
            continue;
        }
        let vandermonde = vandermonde_factor(chosen, l);
        let term = Float::with_val(bits, prefix * w) * vandermonde;
        chosen.push(l);
        if depth + 1 == n {
            if chosen[0] == lo && lo != 0 || l == hi {
                acc.shell += &term;
            }
            acc.total += term;
        } else {
            walk(weights, lo, hi, n, l + 1, &term, chosen, acc, bits);
        }
        chosen.pop();
    }
}

fn vandermonde_factor(chosen: &[i64], l: i64) -> Integer {
    let mut small: u128 = 1;
    let mut big: Option<Integer> = None;
    for &c in chosen {
        let d = (l - c) as u128;
        let d2 = d * d;
        match (&mut big, small.checked_mul(d2)) {
            (None, Some(v)) => small = v,
            (None, None) => big = Some(Integer::from(small) * d2),
            (Some(b), _) => *b *= d2,
        }
    }
    big.unwrap_or_else(|| Integer::from(small))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{phi_derivatives, tau_scaled};

    const BITS: u32 = 256;

    fn p() -> Precision {
        Precision::new(BITS).unwrap()
    }

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(BITS, a - b).abs();
        (d / Float::with_val(BITS, b.abs_ref())).to_f64()
    }

    #[test]
    fn normalisation_constants() {
        assert_eq!(c_n(1), 1);
        assert_eq!(c_n(2), 1);
        assert_eq!(c_n(3), 4);
        assert_eq!(c_n(4), 144);
        assert_eq!(c_n(5), 144 * 24 * 24);
    }

    #[test]
    fn single_site_sums_give_phi() {
        for (phase, t, g) in [(Phase::Ferroelectric, 1.3, 0.4), (Phase::AntiFerroelectric, 0.3, 1.0)] {
            let params = PhaseParams::from_f64(phase, t, g, BITS).unwrap();
            let l = sufficient_cutoff(&params, 1, BITS).unwrap();
            let s = tau_discrete_sum(&params, 1, l, p()).unwrap();
            let phi = phi_derivatives(&params, 0, p()).unwrap();
            assert!(rel(&s, phi.value(0)) < 1e-36, "{phase}");
        }
    }

    #[test]
    fn matches_determinant() {
        for (phase, t, g, n) in [
            (Phase::Ferroelectric, 1.6, 0.4, 3),
            (Phase::AntiFerroelectric, 0.3, 1.0, 3),
            (Phase::Ferroelectric, 2.5, 0.5, 4),
            (Phase::AntiFerroelectric, 0.1, 1.9, 4),
        ] {
            let params = PhaseParams::from_f64(phase, t, g, BITS).unwrap();
            let l = sufficient_cutoff(&params, n, BITS).unwrap();
            let s = tau_discrete_sum(&params, n, l, p()).unwrap();
            let tau = tau_scaled(&params, n, p()).unwrap();
            let expect = tau.scaled_tau * c_n(n);
            assert!(rel(&s, &expect) < 1e-36, "{phase} N={n}");
        }
    }

    #[test]
    fn short_cutoff_is_rejected() {
        let params = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.3, 1.0, BITS).unwrap();
        let err = tau_discrete_sum(&params, 2, 5, p()).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { .. }), "{err}");
    }

    #[test]
    fn disordered_phase_has_no_discrete_form() {
        let params = PhaseParams::from_f64(Phase::Disordered, 0.3, 1.0, BITS).unwrap();
        assert!(matches!(
            tau_discrete_sum(&params, 1, 10, p()),
            Err(Error::WrongPhase { .. })
        ));
    }

    #[test]
    fn cutoff_terminates_for_slow_decay() {
        // Decay rate 0.12 < ln 2 per step.
        let params = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.24, 0.3, 128).unwrap();
        let cutoff = sufficient_cutoff(&params, 3, 128).unwrap();
        assert!(cutoff > 100 && cutoff < 2000, "{cutoff}");
    }
}
