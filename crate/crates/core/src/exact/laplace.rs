use rug::ops::Pow;
use rug::Float;

use super::derivatives::phi_derivatives;
use crate::quad::sinh_sinh;
use crate::specfun::pi;
use crate::{Error, Phase, PhaseParams, Precision, Result};

/// Relative convergence target of the moment quadratures.
const QUAD_TOL: f64 = 1e-14;

/// Largest `|m_i - φ⁽ⁱ⁾(t)|` for `i ≤ i_max`, where in the disordered phase
///
/// ```text
/// m_i = ∫ λ^i e^{tλ} sinh(λ(π-2γ)/2) / sinh(λπ/2) dλ
/// ```
///
/// over the real line. The integrand decays like `e^{-(γ-|t|)|λ|}`.
pub fn laplace_moment_check(params: &PhaseParams, i_max: usize, p: Precision) -> Result<Float> {
    if params.phase() != Phase::Disordered {
        return Err(Error::WrongPhase {
            op: "laplace_moment_check",
            phase: params.phase(),
        });
    }
    let bits = p.bits();
    let table = phi_derivatives(params, i_max, p)?;
    let t = Float::with_val(bits, params.t());
    let half_pi = pi(bits) / 2;
    let a = Float::with_val(bits, &half_pi - params.gamma());
    let at_zero = Float::with_val(bits, &a / &half_pi);
    let mut worst = Float::with_val(bits, 0);
    for i in 0..=i_max {
        let m = sinh_sinh(
            |x| {
                let ratio = if x.is_zero() {
                    at_zero.clone()
                } else {
                    Float::with_val(bits, &a * x).sinh() / Float::with_val(bits, &half_pi * x).sinh()
                };
                let e = Float::with_val(bits, &t * x).exp();
                Float::with_val(bits, x.pow(i as u32)) * e * ratio
            },
            bits,
            QUAD_TOL,
        )?;
        let err = Float::with_val(bits, &m - table.value(i)).abs();
        if err > worst {
            worst = err;
        }
    }
    Ok(worst)
}
