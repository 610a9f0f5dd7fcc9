//! Self-checks of the special-function kernels: classical identities that
//! hold exactly, evaluated at fixed sample points and reported as residuals.

use rug::Float;

use crate::specfun::{
    elliptic_data_from_gamma, elliptic_e, elliptic_k, jacobi_sn_cn_dn, jacobi_zeta, pi, theta, theta_deriv,
};
use crate::{Precision, Result};

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: Float,
    pub tolerance: Float,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        !self.residual.is_nan() && self.residual < self.tolerance
    }
}

/// Sample moduli and arguments, spread over `[0.05, 0.95] × [0, K]`.
const MODULI: [(u32, u32); 5] = [(1, 20), (1, 4), (1, 2), (3, 4), (19, 20)];
const U_FRACTIONS: [(u32, u32); 4] = [(1, 7), (2, 5), (3, 4), (1, 1)];
const NOMES: [(u32, u32); 4] = [(1, 1000), (1, 100), (1, 10), (3, 10)];

fn ratio(bits: u32, (num, den): (u32, u32)) -> Float {
    Float::with_val(bits, num) / den
}

fn rel(a: &Float, b: &Float, bits: u32) -> Float {
    let d = Float::with_val(bits, a - b).abs();
    if b.is_zero() {
        d
    } else {
        d / Float::with_val(bits, b.abs_ref())
    }
}

/// Runs every identity at precision `p`. The pointwise identities carry the
/// tolerance `2^(-bits+8)`; the `γ` round trip goes through a nome and is
/// held to `2^(-bits/2)`.
pub fn identity_suite(p: Precision) -> Result<Vec<IdentityCheck>> {
    let bits = p.bits();
    let w = p.work();
    let tol = p.tolerance();
    let mut out = Vec::new();
    let mut push = |name: String, residual: Float, tolerance: &Float| {
        out.push(IdentityCheck {
            name,
            residual: Float::with_val(bits, residual),
            tolerance: tolerance.clone(),
        });
    };

    for m in MODULI {
        let k = ratio(w, m);
        let big_k = elliptic_k(&k, p)?;
        for u in U_FRACTIONS {
            let arg = Float::with_val(w, &big_k * ratio(w, u));
            let (sn, cn, dn) = jacobi_sn_cn_dn(&arg, &k, p)?;
            let s2 = Float::with_val(w, sn.square_ref());
            let r1 = Float::with_val(w, &s2 + Float::with_val(w, cn.square_ref())) - 1u32;
            let r2 = Float::with_val(w, dn.square_ref()) + Float::with_val(w, k.square_ref()) * &s2 - 1u32;
            let at = format!("k={}/{}, u={}/{}K", m.0, m.1, u.0, u.1);
            push(format!("sn^2+cn^2=1 [{at}]"), r1.abs(), &tol);
            push(format!("dn^2+k^2sn^2=1 [{at}]"), r2.abs(), &tol);

            // Z(u + 2K) = Z(u) and Z(-u) = -Z(u).
            let z = jacobi_zeta(&arg, &k, p)?;
            let shifted = Float::with_val(w, &arg + Float::with_val(w, &big_k * 2u32));
            let zp = jacobi_zeta(&shifted, &k, p)?;
            let zm = jacobi_zeta(&Float::with_val(w, -&arg), &k, p)?;
            let scale = Float::with_val(w, z.abs_ref()).max(&Float::with_val(w, 1));
            push(
                format!("Z(u+2K)=Z(u) [{at}]"),
                Float::with_val(w, &zp - &z).abs() / &scale,
                &tol,
            );
            push(
                format!("Z(-u)=-Z(u) [{at}]"),
                Float::with_val(w, &zm + &z).abs() / &scale,
                &tol,
            );
        }

        // Legendre: E K' + E' K - K K' = π/2.
        let kp = Float::with_val(w, 1 - Float::with_val(w, k.square_ref())).sqrt();
        let (e, ep) = (elliptic_e(&k, p)?, elliptic_e(&kp, p)?);
        let big_kp = elliptic_k(&kp, p)?;
        let lhs = Float::with_val(w, &e * &big_kp) + Float::with_val(w, &ep * &big_k)
            - Float::with_val(w, &big_k * &big_kp);
        let half_pi: Float = pi(w) / 2u32;
        push(
            format!("Legendre relation [k={}/{}]", m.0, m.1),
            rel(&lhs, &half_pi, w),
            &tol,
        );
    }

    let zero = Float::with_val(w, 0);
    for qr in NOMES {
        let q = ratio(w, qr);
        let d1 = theta_deriv(1, 1, &zero, &q, p)?;
        let prod = theta(2, &zero, &q, p)? * theta(3, &zero, &q, p)? * theta(4, &zero, &q, p)?;
        push(
            format!("theta1'(0)=theta2*theta3*theta4 [q={}/{}]", qr.0, qr.1),
            rel(&d1, &prod, w),
            &tol,
        );
    }

    // K(1/√2) = K'(1/√2).
    let k = Float::with_val(w, 2).sqrt().recip();
    let big_k = elliptic_k(&k, p)?;
    let dual = elliptic_k(&Float::with_val(w, 1 - Float::with_val(w, k.square_ref())).sqrt(), p)?;
    push("K(1/sqrt2)=K'(1/sqrt2)".into(), rel(&big_k, &dual, w), &tol);

    let half = p.pow2_neg(bits / 2);
    for (gn, gd) in [(1u32, 5u32), (1, 1), (5, 1)] {
        let g = ratio(w, (gn, gd));
        let data = elliptic_data_from_gamma(&g, p)?;
        let lhs = Float::with_val(w, &data.big_kprime / &data.big_k);
        let rhs = pi(w) / Float::with_val(w, &g * 2u32);
        let at = format!("gamma={gn}/{gd}");
        push(format!("K'/K=pi/2gamma [{at}]"), Float::with_val(w, &lhs - &rhs).abs(), &half);
        let unit = Float::with_val(w, data.k.square_ref()) + Float::with_val(w, data.kprime.square_ref()) - 1u32;
        push(format!("k^2+k'^2=1 [{at}]"), unit.abs(), &tol);
        let q = (-(pi(w) * lhs)).exp();
        push(format!("q=exp(-pi K'/K) [{at}]"), rel(&data.q, &q, w), &tol);
    }

    // Strict monotonicity of K on a grid: the residual counts violations.
    let mut prev: Option<Float> = None;
    let mut violations = 0u32;
    for i in 0..=40u32 {
        let kk = elliptic_k(&(Float::with_val(w, i) / 41u32), p)?;
        if prev.as_ref().is_some_and(|pk| kk <= *pk) {
            violations += 1;
        }
        prev = Some(kk);
    }
    push("K increasing on k=i/41".into(), Float::with_val(w, violations), &tol);

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_at_two_precisions() {
        for bits in [96, 256] {
            let checks = identity_suite(Precision::new(bits).unwrap()).unwrap();
            assert!(checks.len() > 50);
            for c in &checks {
                assert!(c.passed(), "{bits}: {} {}", c.name, c.residual.to_f64());
            }
        }
    }
}
