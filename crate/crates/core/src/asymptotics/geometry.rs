use rug::Float;

use crate::specfun::{elliptic_data_from_gamma, jacobi_sn_cn_dn, jacobi_zeta, pi, EllipticData};
use crate::{Error, Phase, PhaseParams, Precision, Result};

/// Endpoints of the saddle-point eigenvalue support.
///
/// * FE: support `[0, β]`, saturated (density 1) on `[0, α]`, with
///   `α = tanh(s/2)`, `β = coth(s/2)`, `s = t - |γ|`, so `αβ = 1`.
/// * D: support `[α, β]`, `α = -π tan(π(1-ζ)/4)`, `β = π tan(π(1+ζ)/4)`.
/// * AF: support `[α, β]`, saturated (density `1/2γ`) on `[α', β']`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleGeometry {
    pub phase: Phase,
    pub alpha: Float,
    pub alpha_prime: Option<Float>,
    pub beta_prime: Option<Float>,
    pub beta: Float,
    pub elliptic: Option<EllipticData>,
    pub u_inf: Option<Float>,
}

impl SaddleGeometry {
    /// `(α, α', β', β)` as `f64`; the inner pair is `NaN` outside AF.
    pub fn endpoints_f64(&self) -> [f64; 4] {
        let inner = |x: &Option<Float>| x.as_ref().map_or(f64::NAN, Float::to_f64);
        [
            self.alpha.to_f64(),
            inner(&self.alpha_prime),
            inner(&self.beta_prime),
            self.beta.to_f64(),
        ]
    }

    /// Lower and upper end of the support.
    pub fn support(&self) -> (f64, f64) {
        match self.phase {
            Phase::Ferroelectric => (0.0, self.beta.to_f64()),
            _ => (self.alpha.to_f64(), self.beta.to_f64()),
        }
    }

    /// Intervals on which the density equals its bound.
    pub fn saturated(&self) -> Vec<(f64, f64)> {
        match self.phase {
            Phase::Ferroelectric => vec![(0.0, self.alpha.to_f64())],
            Phase::Disordered => Vec::new(),
            Phase::AntiFerroelectric => {
                let e = self.endpoints_f64();
                vec![(e[1], e[2])]
            }
        }
    }
}

/// Closed-form endpoints for the phase point.
pub fn endpoints(params: &PhaseParams, p: Precision) -> Result<SaddleGeometry> {
    let w = p.work();
    let zeta = Float::with_val(w, params.zeta());
    if params.phase() != Phase::Ferroelectric && Float::with_val(w, zeta.abs_ref()) >= 1 {
        return Err(Error::DegenerateGeometry(format!(
            "|ζ| = 1 closes the {} support",
            params.phase()
        )));
    }
    let out = |x: Float| Float::with_val(p.bits(), x);
    match params.phase() {
        Phase::Ferroelectric => {
            let s = Float::with_val(w, params.t() - Float::with_val(w, params.gamma().abs_ref()));
            let half: Float = s / 2u32;
            Ok(SaddleGeometry {
                phase: Phase::Ferroelectric,
                alpha: out(Float::with_val(w, half.tanh_ref())),
                alpha_prime: None,
                beta_prime: None,
                beta: out(half.coth()),
                elliptic: None,
                u_inf: None,
            })
        }
        Phase::Disordered => {
            let pw = pi(w);
            let quarter = Float::with_val(w, &pw / 4);
            let am = Float::with_val(w, 1 - &zeta) * &quarter;
            let ap = Float::with_val(w, 1 + &zeta) * &quarter;
            Ok(SaddleGeometry {
                phase: Phase::Disordered,
                alpha: out(-(am.tan() * &pw)),
                alpha_prime: None,
                beta_prime: None,
                beta: out(ap.tan() * &pw),
                elliptic: None,
                u_inf: None,
            })
        }
        Phase::AntiFerroelectric => {
            let inner = Precision::new(w)?;
            let ell = elliptic_data_from_gamma(params.gamma(), inner)?;
            let two_k = Float::with_val(w, &ell.big_k * 2);
            let u = Float::with_val(w, 1 - &zeta) * &ell.big_k / 2;
            let (sn, cn, dn) = jacobi_sn_cn_dn(&u, &ell.k, inner)?;
            let z = jacobi_zeta(&u, &ell.k, inner)?;
            let beta_prime = Float::with_val(w, &two_k * &z);
            let cd = Float::with_val(w, &cn * &dn);
            let beta = Float::with_val(w, &beta_prime + Float::with_val(w, &two_k * &cd) / &sn);
            let sd = Float::with_val(w, &sn * &dn);
            let sc = Float::with_val(w, &sn * &cn);
            let alpha_prime = Float::with_val(w, &beta - Float::with_val(w, &two_k * &cn) / sd);
            let alpha = Float::with_val(w, &beta - Float::with_val(w, &two_k * &dn) / sc);
            let b = p.bits();
            Ok(SaddleGeometry {
                phase: Phase::AntiFerroelectric,
                alpha: out(alpha),
                alpha_prime: Some(out(alpha_prime)),
                beta_prime: Some(out(beta_prime)),
                beta: out(beta),
                elliptic: Some(EllipticData {
                    k: Float::with_val(b, &ell.k),
                    kprime: Float::with_val(b, &ell.kprime),
                    big_k: Float::with_val(b, &ell.big_k),
                    big_kprime: Float::with_val(b, &ell.big_kprime),
                    q: Float::with_val(b, &ell.q),
                }),
                u_inf: Some(out(u)),
            })
        }
    }
}

/// Residual of the chemical-potential relation
/// `β' - (β - β')·sn/(cn·dn)·Z(u_∞) = 0` for an AF geometry.
pub fn chem_residual(geom: &SaddleGeometry, p: Precision) -> Result<Float> {
    let (Some(ell), Some(u), Some(bp)) = (&geom.elliptic, &geom.u_inf, &geom.beta_prime) else {
        return Err(Error::WrongPhase {
            op: "chem_residual",
            phase: geom.phase,
        });
    };
    let inner = p.raised(32);
    let w = inner.work();
    let (sn, cn, dn) = jacobi_sn_cn_dn(u, &ell.k, inner)?;
    let z = jacobi_zeta(u, &ell.k, inner)?;
    let gap = Float::with_val(w, &geom.beta - bp);
    let ratio = Float::with_val(w, &sn / Float::with_val(w, &cn * &dn));
    let r = Float::with_val(w, bp - gap * ratio * z);
    Ok(Float::with_val(p.bits(), r))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BITS: u32 = 192;

    fn p() -> Precision {
        Precision::new(BITS).unwrap()
    }

    fn small(x: Float) -> bool {
        x.abs() < 1e-45
    }

    #[test]
    fn fe_product_is_one() {
        let params = PhaseParams::from_f64(Phase::Ferroelectric, 2.4, 0.4, BITS).unwrap();
        let g = endpoints(&params, p()).unwrap();
        assert!(small(Float::with_val(BITS, &g.alpha * &g.beta) - 1));
        let half: Float = Float::with_val(BITS, params.t() - params.gamma()) / 2u32;
        assert!(small(g.alpha.clone() - half.tanh()));
        assert!(g.alpha < 1 && g.beta > 1);
    }

    #[test]
    fn disordered_symmetric_point() {
        let params = PhaseParams::from_f64(Phase::Disordered, 0.0, 1.0, BITS).unwrap();
        let g = endpoints(&params, p()).unwrap();
        assert!(small(g.alpha.clone() + pi(BITS)));
        assert!(small(g.beta.clone() - pi(BITS)));
        let params = PhaseParams::from_f64(Phase::Disordered, 0.35, 1.0, BITS).unwrap();
        let g = endpoints(&params, p()).unwrap();
        let prod = Float::with_val(BITS, -&g.alpha) * &g.beta;
        let pi2 = Float::with_val(BITS, pi(BITS).square_ref());
        assert!(small(prod - pi2));
    }

    #[test]
    fn af_symmetric_and_ordered() {
        let params = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.0, 1.0, BITS).unwrap();
        let g = endpoints(&params, p()).unwrap();
        assert!(small(Float::with_val(BITS, &g.alpha + &g.beta)));
        let (ap, bp) = (g.alpha_prime.clone().unwrap(), g.beta_prime.clone().unwrap());
        assert!(small(Float::with_val(BITS, &ap + &bp)));
        for zeta in [-0.7, 0.2, 0.6] {
            let params = PhaseParams::from_f64(Phase::AntiFerroelectric, zeta * 1.3, 1.3, BITS).unwrap();
            let g = endpoints(&params, p()).unwrap();
            let [a, ap, bp, b] = g.endpoints_f64();
            assert!(a < ap && ap < 0.0 && 0.0 < bp && bp < b, "{zeta}: {a} {ap} {bp} {b}");
            assert!(chem_residual(&g, p()).unwrap().abs() < 1e-40);
        }
    }

    #[test]
    fn nome_does_not_depend_on_zeta() {
        let qs: Vec<Float> = [-0.5, 0.0, 0.5]
            .iter()
            .map(|z| {
                let params = PhaseParams::from_f64(Phase::AntiFerroelectric, z * 0.9, 0.9, BITS).unwrap();
                endpoints(&params, p()).unwrap().elliptic.unwrap().q
            })
            .collect();
        assert_eq!(qs[0], qs[1]);
        assert_eq!(qs[1], qs[2]);
    }
}
