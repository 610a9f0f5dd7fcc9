//! The Toda equation in the continuum: `f'' = e^{2f}` for the bulk free
//! energy, and the bilinear identity for the theta-modulated Ansatz
//! `B_N(t) = e^{N² f(t)} θ₄((π/2)(1 + t/γ)N, q)`.

use rug::Float;

use super::free_energy::{f_value, nome};
use crate::specfun::{pi, theta};
use crate::{Error, Phase, PhaseParams, Precision, Result};

const STENCIL_BITS: u32 = 64;
const MAX_SHRINK: u32 = 24;

/// Five-point second derivative in `t` of `g` at the phase point, step
/// `2^(-bits/5)` shrunk until the stencil stays in the phase region.
/// Returns `(g(t), g''(t))`.
fn second_derivative<G>(params: &PhaseParams, p: Precision, g: G) -> Result<(Float, Float)>
where
    G: Fn(&PhaseParams) -> Result<Float>,
{
    let q = p.raised(STENCIL_BITS);
    let bits = q.work();
    let high = params.at_precision(bits);
    let mut step = p.bits() / 5;
    let pts = loop {
        let h = Float::with_val(bits, 1) >> step as i32;
        let pts: Result<Vec<PhaseParams>> = [-2i32, -1, 0, 1, 2]
            .iter()
            .map(|&k| high.with_t(Float::with_val(bits, high.t() + Float::with_val(bits, &h * k))))
            .collect();
        match pts {
            Ok(v) => break v,
            Err(_) if step < p.bits() / 5 + MAX_SHRINK => step += 1,
            Err(_) => return Err(Error::Stencil { shrunk_to: step }),
        }
    };
    let h = Float::with_val(bits, 1) >> step as i32;
    let v: Vec<Float> = pts.iter().map(&g).collect::<Result<_>>()?;
    let num = Float::with_val(bits, &v[1] + &v[3]) * 16
        - Float::with_val(bits, &v[0] + &v[4])
        - Float::with_val(bits, &v[2] * 30);
    let d2 = num / (Float::with_val(bits, &h * &h) * 12);
    Ok((v[2].clone(), d2))
}

/// `|f'' - e^{2f}| / e^{2f}` for the closed-form bulk free energy.
/// Vanishes (to stencil accuracy) in the FE and D phases; in the AF phase
/// the bulk term alone does not solve the equation.
pub fn bulk_ode_residual(params: &PhaseParams, p: Precision) -> Result<Float> {
    let inner = p.raised(STENCIL_BITS);
    let (f, d2) = second_derivative(params, p, |pp| f_value(pp, inner))?;
    let w = inner.work();
    let e2f = Float::with_val(w, &f * 2).exp();
    let r = Float::with_val(w, &d2 - &e2f).abs() / e2f;
    Ok(Float::with_val(p.bits(), r))
}

/// `log B_M(t)` for the theta-modulated Ansatz.
fn log_ansatz(params: &PhaseParams, m: usize, p: Precision) -> Result<Float> {
    let w = p.work();
    let f = f_value(params, p)?;
    let q = nome(params.gamma(), w);
    let arg = pi(w) / 2 * Float::with_val(w, 1 + Float::with_val(w, params.t() / params.gamma())) * m as u32;
    let th = theta(4, &arg, &q, p)?;
    Ok(f * (m * m) as u32 + th.ln())
}

/// Relative residual of `B B'' - B'² = N² B_{N+1} B_{N-1}` for the AF
/// Ansatz, evaluated as `(log B_N)'' = N² B_{N+1} B_{N-1} / B_N²`.
pub fn ansatz_toda_residual(params: &PhaseParams, n: usize, p: Precision) -> Result<Float> {
    if params.phase() != Phase::AntiFerroelectric {
        return Err(Error::WrongPhase {
            op: "ansatz_toda_residual",
            phase: params.phase(),
        });
    }
    if n == 0 {
        return Err(Error::UnsupportedSize {
            n,
            min: 1,
            max: usize::MAX,
        });
    }
    let inner = p.raised(STENCIL_BITS);
    let w = inner.work();
    let (log_b, d2) = second_derivative(params, p, |pp| log_ansatz(pp, n, inner))?;
    let high = params.at_precision(w);
    let up = log_ansatz(&high, n + 1, inner)?;
    let down = log_ansatz(&high, n - 1, inner)?;
    let sum: Float = up + down - log_b * 2u32;
    let rhs = sum.exp() * (n * n) as u32;
    let r = Float::with_val(w, &d2 - &rhs).abs() / rhs;
    Ok(Float::with_val(p.bits(), r))
}

/// FE and D: [`bulk_ode_residual`]. AF: [`ansatz_toda_residual`] at `n`.
pub fn ode_check(params: &PhaseParams, n: usize, p: Precision) -> Result<Float> {
    match params.phase() {
        Phase::AntiFerroelectric => ansatz_toda_residual(params, n, p),
        _ => bulk_ode_residual(params, p),
    }
}
