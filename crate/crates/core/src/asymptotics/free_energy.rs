use rug::Float;

use super::geometry::endpoints;
use crate::specfun::{pi, theta, theta_deriv};
use crate::{Error, Phase, PhaseParams, Precision, Result};

/// Bulk free energy in the normalisation `τ_N / c_N ≈ e^{N² f}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergy {
    pub f: Float,
    /// `-log(ab) - f`, the physical free energy per site.
    pub big_f: Float,
    /// `lim Z_N^{1/N²} = ab·e^f`.
    pub z_limit: Float,
}

/// `q = e^{-π²/2γ}` at `bits`.
pub(crate) fn nome(gamma: &Float, bits: u32) -> Float {
    let pw = pi(bits);
    let x: Float = -(Float::with_val(bits, &pw * &pw) / (Float::with_val(bits, gamma) * 2u32));
    x.exp()
}

/// `f(t)` alone, at working precision.
pub(crate) fn f_value(params: &PhaseParams, p: Precision) -> Result<Float> {
    let w = p.work();
    let t = Float::with_val(w, params.t());
    let g = Float::with_val(w, params.gamma());
    match params.phase() {
        Phase::Ferroelectric => {
            let s = Float::with_val(w, &t - g.abs());
            Ok(-s.sinh().ln())
        }
        Phase::Disordered => {
            let ratio = pi(w) / Float::with_val(w, &g * 2);
            let arg = Float::with_val(w, &ratio * &t);
            Ok(ratio.ln() - arg.cos().ln())
        }
        Phase::AntiFerroelectric => {
            let inner = Precision::new(w)?;
            let q = nome(&g, w);
            let ratio = pi(w) / Float::with_val(w, &g * 2);
            let arg = Float::with_val(w, &ratio * &t);
            let zero = Float::with_val(w, 0);
            let d1 = theta_deriv(1, 1, &zero, &q, inner)?;
            let t2 = theta(2, &arg, &q, inner)?;
            Ok(ratio.ln() + d1.ln() - t2.ln())
        }
    }
}

/// Closed-form bulk free energy.
///
/// ```text
/// FE: e^f = 1 / sinh(t - |γ|)
/// D:  e^f = (π/2γ) / cos(πt/2γ)
/// AF: e^f = (π/2γ) θ₁'(0) / θ₂(πt/2γ),   q = e^{-π²/2γ}
/// ```
///
/// The D normalisation is the `q → 0` limit of the AF formula.
pub fn bulk_f(params: &PhaseParams, p: Precision) -> Result<FreeEnergy> {
    let w = p.work();
    let f = f_value(params, p)?;
    let weights = params.weights(w);
    let ab = Float::with_val(w, &weights.a * &weights.b);
    let big_f = Float::with_val(w, -Float::with_val(w, ab.ln_ref()) - &f);
    let z_limit = ab * Float::with_val(w, f.exp_ref());
    let b = p.bits();
    Ok(FreeEnergy {
        f: Float::with_val(b, f),
        big_f: Float::with_val(b, big_f),
        z_limit: Float::with_val(b, z_limit),
    })
}

/// The derivative of `f` in two independent forms, `(endpoint, closed)`.
///
/// * FE: `∂f/∂t = -(α + β)/2 = -coth(t - |γ|)`
/// * D:  `∂f/∂ζ = (α + β)/4 = (π/2) tan(πζ/2)`
/// * AF: `∂f/∂ζ = (α + α' + β' + β)/4 = -(π/2) θ₂'(πζ/2) / θ₂(πζ/2)`
pub fn dfdzeta(params: &PhaseParams, p: Precision) -> Result<(Float, Float)> {
    let inner = p.raised(32);
    let w = inner.work();
    let geom = endpoints(params, inner)?;
    let sum = Float::with_val(w, &geom.alpha + &geom.beta);
    let zeta = Float::with_val(w, params.zeta());
    let half_pi = pi(w) / 2;
    let (endpoint, closed) = match params.phase() {
        Phase::Ferroelectric => {
            let s = Float::with_val(w, params.t() - Float::with_val(w, params.gamma().abs_ref()));
            (-(sum / 2u32), -s.coth())
        }
        Phase::Disordered => {
            let arg = Float::with_val(w, &half_pi * &zeta);
            (sum / 4u32, arg.tan() * &half_pi)
        }
        Phase::AntiFerroelectric => {
            let inner_sum = Float::with_val(
                w,
                geom.alpha_prime.as_ref().unwrap() + geom.beta_prime.as_ref().unwrap(),
            );
            let q = &geom.elliptic.as_ref().unwrap().q;
            let arg = Float::with_val(w, &half_pi * &zeta);
            let d = theta_deriv(2, 1, &arg, q, inner)?;
            let v = theta(2, &arg, q, inner)?;
            let closed: Float = half_pi * d / v;
            ((sum + inner_sum) / 4u32, -closed)
        }
    };
    Ok((
        Float::with_val(p.bits(), endpoint),
        Float::with_val(p.bits(), closed),
    ))
}

fn require_af(params: &PhaseParams, op: &'static str) -> Result<()> {
    if params.phase() != Phase::AntiFerroelectric {
        return Err(Error::WrongPhase {
            op,
            phase: params.phase(),
        });
    }
    Ok(())
}

/// Small-`γ` expansion of the AF free energy about the disordered one,
///
/// ```text
/// f = f_D(ζ) - 2 Σ_{m≥1} (1/m) q^{2m}/(1 - q^{2m}) (1 - (-1)^m cos(mπt/γ))
/// ```
///
/// returned as `(f_series, f_sing_leading)` where the leading singular part
/// is the `m = 1` term, `-4 e^{-π²/γ} cos²(πt/2γ)`.
pub fn f_small_gamma(params: &PhaseParams, m_max: usize, p: Precision) -> Result<(Float, Float)> {
    require_af(params, "f_small_gamma")?;
    let w = p.work();
    let t = Float::with_val(w, params.t());
    let g = Float::with_val(w, params.gamma());
    let q2 = nome(&g, w).square();
    let ratio = pi(w) / Float::with_val(w, &g * 2);
    let f_d = Float::with_val(w, ratio.ln_ref()) - Float::with_val(w, &ratio * &t).cos().ln();
    let mut sum = Float::with_val(w, 0);
    let mut q2m = Float::with_val(w, 1);
    let angle = Float::with_val(w, &ratio * &t) * 2;
    for m in 1..=m_max {
        q2m *= &q2;
        let denom = Float::with_val(w, 1 - &q2m) * m as u32;
        let c = Float::with_val(w, &angle * m as u32).cos();
        let bracket = if m % 2 == 0 { 1 - c } else { 1 + c };
        sum += Float::with_val(w, &q2m * bracket) / denom;
    }
    // Next term is at most 2 q^{2(m+1)}/((m+1)(1-q²)); the rest is geometric.
    let q2f = q2.to_f64();
    let tail = 2.0 * q2f.powi(m_max as i32 + 1) / ((m_max as f64 + 1.0) * (1.0 - q2f) * (1.0 - q2f));
    let target = p.tolerance().to_f64() * f_d.to_f64().abs().max(1.0);
    if tail > target {
        return Err(Error::SeriesTail {
            terms: m_max,
            tail,
            target,
        });
    }
    let f = f_d - sum * 2;
    let half = Float::with_val(w, &ratio * &t).cos();
    let lead: Float = Float::with_val(w, &q2 * half.square()) * 4u32;
    let lead = -lead;
    Ok((Float::with_val(p.bits(), f), Float::with_val(p.bits(), lead)))
}

/// The AF free energy after the modular transformation, in the dual nome
/// `e^{-2γ}`:
///
/// ```text
/// F = -γ/2 - t²/2γ - log sinh(γ+t) + t
///     - 2 Σ_{m≥1} (1/m) (e^{-2mγ}/sinh 2mγ) sinh²(m(γ-t))
/// ```
pub fn f_modular(params: &PhaseParams, m_max: usize, p: Precision) -> Result<Float> {
    require_af(params, "F_modular")?;
    let w = p.work();
    let t = Float::with_val(w, params.t());
    let g = Float::with_val(w, params.gamma());
    let gpt = Float::with_val(w, &g + &t);
    let gmt = Float::with_val(w, &g - &t);
    let mut big_f = -Float::with_val(w, &g / 2)
        - Float::with_val(w, t.square_ref()) / Float::with_val(w, &g * 2)
        - Float::with_val(w, gpt.sinh_ref()).ln()
        + &t;
    let mut sum = Float::with_val(w, 0);
    for m in 1..=m_max {
        let mg2 = Float::with_val(w, &g * (2 * m) as u32);
        let e = Float::with_val(w, -&mg2).exp();
        let s = Float::with_val(w, &gmt * m as u32).sinh().square();
        sum += e * s / (mg2.sinh() * m as u32);
    }
    big_f -= sum * 2;
    // Terms behave like e^{-2m(γ+t)}/(2m).
    let r = (-2.0 * gpt.to_f64()).exp();
    let tail = r.powi(m_max as i32 + 1) / (1.0 - r);
    let target = p.tolerance().to_f64() * big_f.to_f64().abs().max(1.0);
    if tail > target {
        return Err(Error::SeriesTail {
            terms: m_max,
            tail,
            target,
        });
    }
    Ok(Float::with_val(p.bits(), big_f))
}

/// Fewest series terms for which `f_small_gamma` and `f_modular` pass
/// their tail tests.
pub fn series_terms(params: &PhaseParams, p: Precision) -> usize {
    let g = params.gamma().to_f64();
    let t = params.t().to_f64();
    let bits = p.bits() as f64 * std::f64::consts::LN_2;
    let small = bits / (std::f64::consts::PI.powi(2) / g);
    let modular = bits / (2.0 * (g + t)).max(1e-3);
    small.max(modular).ceil() as usize + 4
}

#[cfg(test)]
mod tests {
    use super::*;

    const BITS: u32 = 256;

    fn p() -> Precision {
        Precision::new(BITS).unwrap()
    }

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        Float::with_val(BITS, a - b).abs() < tol
    }

    #[test]
    fn ice_point() {
        let g = pi(BITS) / 3;
        let params = PhaseParams::new(Phase::Disordered, Float::with_val(BITS, 0), g).unwrap();
        let fe = bulk_f(&params, p()).unwrap();
        assert!(close(&Float::with_val(BITS, fe.f.exp_ref()), &Float::with_val(BITS, 1.5), 1e-60));
        assert!(close(&fe.z_limit, &Float::with_val(BITS, 1.125), 1e-60));
    }

    #[test]
    fn free_fermion_point() {
        let g = pi(BITS) / 4;
        let params = PhaseParams::new(Phase::Disordered, Float::with_val(BITS, 0), g).unwrap();
        let fe = bulk_f(&params, p()).unwrap();
        assert!(close(&Float::with_val(BITS, fe.f.exp_ref()), &Float::with_val(BITS, 2), 1e-60));
        assert!(close(&fe.z_limit, &Float::with_val(BITS, 1), 1e-60));
    }

    #[test]
    fn af_reduces_to_disordered_for_small_gamma() {
        let af = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.015, 0.05, BITS).unwrap();
        let d = PhaseParams::from_f64(Phase::Disordered, 0.015, 0.05, BITS).unwrap();
        let fa = bulk_f(&af, p()).unwrap().f;
        let fd = bulk_f(&d, p()).unwrap().f;
        assert!(close(&fa, &fd, 1e-3));
    }

    #[test]
    fn derivative_forms_agree() {
        for (phase, t, g) in [
            (Phase::Ferroelectric, 2.5, 0.5),
            (Phase::Disordered, 0.4, 1.0),
            (Phase::AntiFerroelectric, 0.4, 1.0),
        ] {
            let params = PhaseParams::from_f64(phase, t, g, BITS).unwrap();
            let (a, b) = dfdzeta(&params, Precision::new(128).unwrap()).unwrap();
            assert!(close(&a, &b, 1e-8), "{phase}: {} vs {}", a.to_f64(), b.to_f64());
        }
    }

    #[test]
    fn derivative_vanishes_at_zero_zeta() {
        for phase in [Phase::Disordered, Phase::AntiFerroelectric] {
            let params = PhaseParams::from_f64(phase, 0.0, 0.9, BITS).unwrap();
            let (a, b) = dfdzeta(&params, p()).unwrap();
            assert!(close(&a, &Float::with_val(BITS, 0), 1e-50), "{phase}");
            assert!(close(&b, &Float::with_val(BITS, 0), 1e-50), "{phase}");
        }
    }

    /// `∂f/∂ζ = γ ∂f/∂t` by central differences of the closed form.
    #[test]
    fn closed_derivative_matches_finite_difference() {
        for (phase, t, g) in [(Phase::Disordered, 0.3, 1.1), (Phase::AntiFerroelectric, -0.5, 1.4)] {
            let params = PhaseParams::from_f64(phase, t, g, BITS).unwrap();
            let h: Float = Float::with_val(BITS, 1) >> 40;
            let fp = f_value(&params.with_t(Float::with_val(BITS, params.t() + &h)).unwrap(), p()).unwrap();
            let fm = f_value(&params.with_t(Float::with_val(BITS, params.t() - &h)).unwrap(), p()).unwrap();
            let fd = (fp - fm).to_f64() / (2.0 * h.to_f64()) * g;
            let (_, closed) = dfdzeta(&params, p()).unwrap();
            assert!((fd - closed.to_f64()).abs() < 1e-8, "{phase}: {fd} vs {}", closed.to_f64());
        }
    }

    #[test]
    fn series_match_theta_form() {
        let params = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.24, 0.8, BITS).unwrap();
        let m = series_terms(&params, p());
        let (fs, _) = f_small_gamma(&params, m, p()).unwrap();
        let fe = bulk_f(&params, p()).unwrap();
        assert!(close(&fs, &fe.f, 1e-60));

        let params = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.6, 2.0, BITS).unwrap();
        let m = series_terms(&params, p());
        let big_f = f_modular(&params, m, p()).unwrap();
        let fe = bulk_f(&params, p()).unwrap();
        assert!(close(&big_f, &fe.big_f, 1e-60));
    }

    #[test]
    fn singular_part_vanishes_at_zeta_one() {
        let t = Float::with_val(BITS, 0.5) - (Float::with_val(BITS, 1) >> 100);
        let params = PhaseParams::new(Phase::AntiFerroelectric, t, Float::with_val(BITS, 0.5)).unwrap();
        let (_, lead) = f_small_gamma(&params, 40, p()).unwrap();
        assert!(lead.abs() < 1e-40);
    }

    #[test]
    fn truncated_series_is_reported() {
        let params = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.0, 3.0, BITS).unwrap();
        assert!(matches!(f_small_gamma(&params, 2, p()), Err(Error::SeriesTail { .. })));
        assert!(matches!(f_modular(&params, 2, p()), Err(Error::SeriesTail { .. })));
    }
}
