//! Phase regions and the Boltzmann weight parameterisations.

use std::fmt;
use std::str::FromStr;

use rug::Float;

use crate::specfun::pi;
use crate::{Error, Result};

/// The three regimes of the six-vertex model, `Δ > 1`, `|Δ| < 1` and
/// `Δ < -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Ferroelectric,
    Disordered,
    AntiFerroelectric,
}

impl Phase {
    pub fn tag(self) -> &'static str {
        match self {
            Phase::Ferroelectric => "FE",
            Phase::Disordered => "D",
            Phase::AntiFerroelectric => "AF",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fe" | "ferroelectric" => Ok(Phase::Ferroelectric),
            "d" | "disordered" => Ok(Phase::Disordered),
            "af" | "afe" | "antiferroelectric" | "anti-ferroelectric" => {
                Ok(Phase::AntiFerroelectric)
            }
            other => Err(Error::Domain(format!("unknown phase `{other}`"))),
        }
    }
}

/// A validated point `(t, γ)` inside one phase region.
///
/// * FE: `a = sinh(t-γ)`, `b = sinh(t+γ)`, `c = sinh 2γ`, with `0 < γ < t`
/// * D: `a = sin(γ-t)`, `b = sin(γ+t)`, `c = sin 2γ`, with `|t| < γ < π/2`
/// * AF: `a = sinh(γ-t)`, `b = sinh(γ+t)`, `c = sinh 2γ`, with `|t| < γ`
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseParams {
    phase: Phase,
    t: Float,
    gamma: Float,
    zeta: Float,
    delta: Float,
}

impl PhaseParams {
    pub fn new(phase: Phase, t: Float, gamma: Float) -> Result<Self> {
        let bits = t.prec().max(gamma.prec());
        let t = Float::with_val(bits, t);
        let gamma = Float::with_val(bits, gamma);
        if !t.is_finite() || !gamma.is_finite() {
            return Err(Error::Domain("t and gamma must be finite".into()));
        }
        let abs_t = Float::with_val(bits, t.abs_ref());
        let abs_g = Float::with_val(bits, gamma.abs_ref());
        let fail = |requirement| Err(Error::PhaseDomain { phase, requirement });
        match phase {
            Phase::Ferroelectric => {
                if abs_g >= t {
                    return fail("|γ| < t");
                }
                if gamma <= 0 {
                    return fail("γ > 0 (positive c weight)");
                }
            }
            Phase::Disordered => {
                if abs_t >= gamma {
                    return fail("|t| < γ");
                }
                if gamma >= pi(bits) / 2 {
                    return fail("0 < γ < π/2");
                }
            }
            Phase::AntiFerroelectric => {
                if abs_t >= gamma {
                    return fail("|t| < γ");
                }
            }
        }
        let zeta = Float::with_val(bits, &t / &gamma);
        let two_g = Float::with_val(bits, &gamma * 2);
        let delta = match phase {
            Phase::Ferroelectric => two_g.cosh(),
            Phase::Disordered => -two_g.cos(),
            Phase::AntiFerroelectric => -two_g.cosh(),
        };
        Ok(PhaseParams {
            phase,
            t,
            gamma,
            zeta,
            delta,
        })
    }

    pub fn from_f64(phase: Phase, t: f64, gamma: f64, bits: u32) -> Result<Self> {
        Self::new(phase, Float::with_val(bits, t), Float::with_val(bits, gamma))
    }

    /// Parameterise by `ζ = t/γ` instead of `t`.
    pub fn from_zeta(phase: Phase, zeta: Float, gamma: Float) -> Result<Self> {
        let bits = zeta.prec().max(gamma.prec());
        let t = Float::with_val(bits, &zeta * &gamma);
        Self::new(phase, t, gamma)
    }

    /// The same phase and `γ` at a different `t`.
    pub fn with_t(&self, t: Float) -> Result<Self> {
        Self::new(self.phase, t, self.gamma.clone())
    }

    /// Same point carried at a (usually higher) precision.
    pub fn at_precision(&self, bits: u32) -> Self {
        PhaseParams {
            phase: self.phase,
            t: Float::with_val(bits, &self.t),
            gamma: Float::with_val(bits, &self.gamma),
            zeta: Float::with_val(bits, &self.zeta),
            delta: Float::with_val(bits, &self.delta),
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn t(&self) -> &Float {
        &self.t
    }

    pub fn gamma(&self) -> &Float {
        &self.gamma
    }

    pub fn zeta(&self) -> &Float {
        &self.zeta
    }

    /// Anisotropy `Δ = (a² + b² - c²) / 2ab`.
    pub fn delta(&self) -> &Float {
        &self.delta
    }

    pub fn bits(&self) -> u32 {
        self.t.prec()
    }

    /// Boltzmann weights at working precision `bits`.
    pub fn weights(&self, bits: u32) -> Weights {
        let t = Float::with_val(bits, &self.t);
        let g = Float::with_val(bits, &self.gamma);
        let g_minus_t = Float::with_val(bits, &g - &t);
        let g_plus_t = Float::with_val(bits, &g + &t);
        let two_g = Float::with_val(bits, &g * 2);
        match self.phase {
            Phase::Ferroelectric => Weights {
                a: (-g_minus_t).sinh(),
                b: g_plus_t.sinh(),
                c: two_g.sinh(),
            },
            Phase::Disordered => Weights {
                a: g_minus_t.sin(),
                b: g_plus_t.sin(),
                c: two_g.sin(),
            },
            Phase::AntiFerroelectric => Weights {
                a: g_minus_t.sinh(),
                b: g_plus_t.sinh(),
                c: two_g.sinh(),
            },
        }
    }
}

/// Vertex weights `a`, `b`, `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub a: Float,
    pub b: Float,
    pub c: Float,
}

impl Weights {
    pub fn new(a: Float, b: Float, c: Float) -> Self {
        Weights { a, b, c }
    }

    /// `(a² + b² - c²) / 2ab`
    pub fn delta(&self) -> Float {
        let bits = self.a.prec();
        let a2 = Float::with_val(bits, &self.a * &self.a);
        let b2 = Float::with_val(bits, &self.b * &self.b);
        let c2 = Float::with_val(bits, &self.c * &self.c);
        let ab2 = Float::with_val(bits, &self.a * &self.b) * 2;
        (a2 + b2 - c2) / ab2
    }
}

/// Weights for a validated parameter point.
pub fn weights_from(params: &PhaseParams) -> Weights {
    params.weights(params.bits())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Float, b: &Float) -> bool {
        Float::with_val(256, a - b).abs() < 1e-70
    }

    #[test]
    fn af_symmetric_point() {
        let p = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.0, 1.0, 256).unwrap();
        let w = weights_from(&p);
        let s1 = Float::with_val(256, 1).sinh();
        assert!(close(&w.a, &s1) && close(&w.b, &s1));
        assert!(close(&w.c, &Float::with_val(256, 2).sinh()));
    }

    #[test]
    fn ice_point_weights() {
        let g = pi(256) / 3;
        let p = PhaseParams::new(Phase::Disordered, Float::with_val(256, 0), g).unwrap();
        let w = weights_from(&p);
        let half_sqrt3 = Float::with_val(256, 3).sqrt() / 2;
        assert!(close(&w.a, &half_sqrt3) && close(&w.b, &half_sqrt3) && close(&w.c, &half_sqrt3));
        assert!(close(&w.delta(), &Float::with_val(256, 0.5)));
    }

    #[test]
    fn fe_substitution() {
        let p = PhaseParams::from_f64(Phase::Ferroelectric, 2.0, 0.5, 256).unwrap();
        let w = weights_from(&p);
        assert!(close(&w.a, &Float::with_val(256, 1.5).sinh()));
        assert!(close(&w.b, &Float::with_val(256, 2.5).sinh()));
        assert!(close(&w.c, &Float::with_val(256, 1).sinh()));
        assert!(close(&w.delta(), p.delta()));
    }

    #[test]
    fn delta_matches_weights_in_every_phase() {
        for (phase, t, g) in [
            (Phase::Ferroelectric, 1.3, 0.4),
            (Phase::Disordered, 0.2, 0.9),
            (Phase::AntiFerroelectric, -0.3, 1.1),
        ] {
            let p = PhaseParams::from_f64(phase, t, g, 256).unwrap();
            assert!(close(&weights_from(&p).delta(), p.delta()), "{phase}");
        }
    }

    #[test]
    fn region_violations_name_the_inequality() {
        let e = PhaseParams::from_f64(Phase::Ferroelectric, 1.0, 2.0, 64).unwrap_err();
        assert!(e.to_string().contains("|γ| < t"), "{e}");
        let e = PhaseParams::from_f64(Phase::Disordered, 0.1, 1.6, 64).unwrap_err();
        assert!(e.to_string().contains("γ < π/2"), "{e}");
        let e = PhaseParams::from_f64(Phase::AntiFerroelectric, 1.0, 1.0, 64).unwrap_err();
        assert!(e.to_string().contains("|t| < γ"), "{e}");
        assert!(PhaseParams::from_f64(Phase::Ferroelectric, 1.0, -0.5, 64).is_err());
    }

    #[test]
    fn phase_parsing() {
        assert_eq!("af".parse::<Phase>().unwrap(), Phase::AntiFerroelectric);
        assert_eq!("D".parse::<Phase>().unwrap(), Phase::Disordered);
        assert_eq!("fe".parse::<Phase>().unwrap(), Phase::Ferroelectric);
        assert!("xy".parse::<Phase>().is_err());
    }
}
