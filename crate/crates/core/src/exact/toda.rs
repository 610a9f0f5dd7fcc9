use rug::Float;

use super::tau::tau_scaled;
use crate::{Error, PhaseParams, Precision, Result};

/// Extra bits for the stencil evaluations so that roundoff, amplified by
/// `1/h²`, stays well below the truncation error.
const STENCIL_BITS: u32 = 64;
const MAX_SHRINK: u32 = 24;

/// Outcome of one Toda check.
#[derive(Debug, Clone)]
pub struct TodaResidual {
    pub n: usize,
    /// `|T T'' - T'² - N² T_{N+1} T_{N-1}|` over the sum of the magnitudes
    /// of the three terms.
    pub residual: Float,
    /// Stencil step is `2^(-step_log2)`.
    pub step_log2: u32,
}

/// Relative residual of the scaled bilinear identity
///
/// ```text
/// T_N T_N'' - (T_N')² = N² T_{N+1} T_{N-1},    T_N = τ_N / c_N,  T_0 = 1
/// ```
///
/// where `N² = c_{N+1} c_{N-1} / c_N²` exactly. Derivatives in `t` come from
/// five-point central differences with `h = 2^(-bits/5)`, so the truncation
/// error is `O(2^(-4 bits/5))`; the stencil values carry 64 extra bits.
pub fn toda_residual(params: &PhaseParams, n: usize, p: Precision) -> Result<TodaResidual> {
    if n == 0 {
        return Err(Error::UnsupportedSize {
            n,
            min: 1,
            max: usize::MAX,
        });
    }
    let q = p.raised(STENCIL_BITS);
    let bits = q.work();
    let high = params.at_precision(bits);
    let mut step_log2 = p.bits() / 5;
    let shifted = loop {
        let h = Float::with_val(bits, 1) >> step_log2 as i32;
        let pts: Result<Vec<PhaseParams>> = [-2i32, -1, 1, 2]
            .iter()
            .map(|&k| high.with_t(Float::with_val(bits, high.t() + Float::with_val(bits, &h * k))))
            .collect();
        match pts {
            Ok(v) => break v,
            Err(_) if step_log2 < p.bits() / 5 + MAX_SHRINK => step_log2 += 1,
            Err(_) => return Err(Error::Stencil { shrunk_to: step_log2 }),
        }
    };
    let h = Float::with_val(bits, 1) >> step_log2 as i32;
    let tau = |pp: &PhaseParams, m: usize| -> Result<Float> {
        if m == 0 {
            return Ok(Float::with_val(bits, 1));
        }
        Ok(Float::with_val(bits, tau_scaled(pp, m, q)?.scaled_tau))
    };
    let f0 = tau(&high, n)?;
    let fm2 = tau(&shifted[0], n)?;
    let fm1 = tau(&shifted[1], n)?;
    let fp1 = tau(&shifted[2], n)?;
    let fp2 = tau(&shifted[3], n)?;
    let twelve_h = Float::with_val(bits, &h * 12);
    let d1 = (Float::with_val(bits, &fm2 - &fp2) + Float::with_val(bits, &fp1 - &fm1) * 8) / &twelve_h;
    let d2 = (Float::with_val(bits, -(Float::with_val(bits, &fp2 + &fm2)))
        + Float::with_val(bits, &fp1 + &fm1) * 16
        - Float::with_val(bits, &f0 * 30))
        / (twelve_h * &h);
    let rhs = Float::with_val(bits, tau(&high, n + 1)? * tau(&high, n - 1)?) * (n * n) as u32;
    let a = Float::with_val(bits, &f0 * &d2);
    let b = Float::with_val(bits, &d1 * &d1);
    let scale = Float::with_val(bits, a.abs_ref()) + Float::with_val(bits, b.abs_ref()) + Float::with_val(bits, rhs.abs_ref());
    let residual = (a - b - rhs).abs() / scale;
    Ok(TodaResidual {
        n,
        residual: Float::with_val(p.bits(), residual),
        step_log2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Phase;

    #[test]
    fn holds_in_every_phase() {
        let p = Precision::new(256).unwrap();
        let bound = Float::with_val(256, 1) >> (256 / 2 - 16);
        for (phase, t, g) in [
            (Phase::Ferroelectric, 1.5, 0.4),
            (Phase::Disordered, 0.3, 1.0),
            (Phase::AntiFerroelectric, 0.2, 1.0),
        ] {
            let params = PhaseParams::from_f64(phase, t, g, 256).unwrap();
            for n in [1, 4, 6] {
                let r = toda_residual(&params, n, p).unwrap();
                assert!(r.residual < bound, "{phase} N={n}: {}", r.residual.to_f64());
            }
        }
    }

    #[test]
    fn stencil_shrinks_near_the_boundary() {
        let p = Precision::new(128).unwrap();
        let params = PhaseParams::from_f64(Phase::AntiFerroelectric, 1.0 - 1e-9, 1.0, 128).unwrap();
        let r = toda_residual(&params, 2, p).unwrap();
        assert!(r.step_log2 > 128 / 5);
    }
}
