//! Complete elliptic integrals, Jacobi elliptic functions, Jacobi's Zeta
//! function and the four theta functions, all at arbitrary precision.
//!
//! Theta functions use the nome convention
//!
//! ```text
//! θ₁(z,q) = 2 Σ_{n≥0} (-1)^n q^{(n+1/2)²} sin((2n+1)z)
//! θ₂(z,q) = 2 Σ_{n≥0}        q^{(n+1/2)²} cos((2n+1)z)
//! θ₃(z,q) = 1 + 2 Σ_{n≥1}        q^{n²} cos(2nz)
//! θ₄(z,q) = 1 + 2 Σ_{n≥1} (-1)^n q^{n²} cos(2nz)
//! ```
//!
//! Every result is returned at `p.bits()` binary digits and is accurate to
//! `2^(-bits + GUARD_BITS)`. Internally the kernels carry extra working bits
//! and re-run a theta sum at higher precision when its terms cancel.
//!
//! The dual nome `q̃ = e^(-2γ)` obtained by a modular transformation of
//! `q = e^(-π²/2γ)` is not needed by any kernel here; it only appears in the
//! modular form of the anti-ferroelectric free energy.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::{Error, Precision, Result};

/// Modulus, complementary modulus, quarter periods and nome of one elliptic
/// parameterisation.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticData {
    pub k: Float,
    pub kprime: Float,
    pub big_k: Float,
    pub big_kprime: Float,
    pub q: Float,
}

pub(crate) fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

fn check_modulus(k: &Float) -> Result<()> {
    if k.is_nan() || *k < 0 || *k >= 1 {
        return Err(Error::Domain(format!(
            "elliptic modulus must lie in [0, 1), got {}",
            k.to_f64()
        )));
    }
    Ok(())
}

fn complementary(k: &Float, w: u32) -> Float {
    let one_minus = Float::with_val(w, 1 - k);
    let one_plus = Float::with_val(w, 1 + k);
    (one_minus * one_plus).sqrt()
}

/// `|c|` within a few ulps of `a`. Rounding can leave `a - b` oscillating at
/// one ulp forever, so an exact zero test is not enough.
fn agm_settled(c: &Float, a: &Float, w: u32) -> bool {
    c.is_zero() || c.get_exp().unwrap_or(i32::MIN) <= a.get_exp().unwrap_or(0) - w as i32 + 2
}

/// AGM of `(1, b)`, together with `Σ 2^(n-1) c_n²` for `n ≥ 1`.
fn agm_with_tail(b: &Float, w: u32) -> (Float, Float) {
    let mut a = Float::with_val(w, 1);
    let mut b = Float::with_val(w, b);
    let mut sum = Float::with_val(w, 0);
    let mut weight = Float::with_val(w, 1);
    for _ in 0..(w as usize + 64) {
        let c: Float = Float::with_val(w, &a - &b) / 2u32;
        if agm_settled(&c, &a, w) {
            break;
        }
        let an = Float::with_val(w, &a + &b) / 2;
        let bn = Float::with_val(w, &a * &b).sqrt();
        sum += Float::with_val(w, &c * &c) * &weight;
        weight *= 2;
        a = an;
        b = bn;
    }
    (a, sum)
}

/// `K` from the complementary modulus `k' = sqrt(1 - k²)`.
pub(crate) fn complete_k_from_kprime(kprime: &Float, w: u32) -> Float {
    let (m, _) = agm_with_tail(kprime, w);
    pi(w) / (m * 2)
}

/// Complete elliptic integral of the first kind, `K(k)`, by the
/// arithmetic-geometric mean: `K = π / (2 AGM(1, k'))`.
pub fn elliptic_k(k: &Float, p: Precision) -> Result<Float> {
    check_modulus(k)?;
    let w = p.work();
    let kp = complementary(k, w);
    Ok(Float::with_val(p.bits(), complete_k_from_kprime(&kp, w)))
}

/// Complete elliptic integral of the second kind, `E(k)`, from the same AGM
/// sweep: `E = K (1 - k²/2 - Σ_{n≥1} 2^(n-1) c_n²)`.
pub fn elliptic_e(k: &Float, p: Precision) -> Result<Float> {
    check_modulus(k)?;
    let w = p.work();
    let kp = complementary(k, w);
    let (m, tail) = agm_with_tail(&kp, w);
    let big_k = pi(w) / (m * 2);
    let k2 = Float::with_val(w, k * k) / 2;
    let factor = Float::with_val(w, 1) - k2 - tail;
    Ok(Float::with_val(p.bits(), big_k * factor))
}

/// Nome `q = exp(-π K'/K)` of modulus `k`. Returns 0 at `k = 0`.
pub fn nome_from_modulus(k: &Float, p: Precision) -> Result<Float> {
    check_modulus(k)?;
    if k.is_zero() {
        return Ok(Float::with_val(p.bits(), 0));
    }
    let w = p.work();
    let kp = complementary(k, w);
    let big_k = complete_k_from_kprime(&kp, w);
    let big_kp = complete_k_from_kprime(&Float::with_val(w, k), w);
    let q = (-(pi(w) * big_kp / big_k)).exp();
    Ok(Float::with_val(p.bits(), q))
}

/// Modulus and complementary modulus from the nome via theta quotients,
/// `k = θ₂²(0)/θ₃²(0)`, `k' = θ₄²(0)/θ₃²(0)`.
pub fn modulus_from_nome(q: &Float, p: Precision) -> Result<(Float, Float)> {
    let w = p.raised(32);
    let zero = Float::with_val(w.work(), 0);
    let t2 = theta(2, &zero, q, w)?;
    let t3 = theta(3, &zero, q, w)?;
    let t4 = theta(4, &zero, q, w)?;
    let t3sq = Float::with_val(w.work(), &t3 * &t3);
    let k = Float::with_val(w.work(), &t2 * &t2) / &t3sq;
    let kp = Float::with_val(w.work(), &t4 * &t4) / &t3sq;
    Ok((Float::with_val(p.bits(), k), Float::with_val(p.bits(), kp)))
}

/// Elliptic data whose quarter-period ratio is `K'/K = π/(2γ)`, i.e. nome
/// `q = exp(-π²/2γ)`. The modulus comes from theta quotients; `K` and `K'`
/// are then computed independently by the AGM so that the defining ratio
/// can be checked.
pub fn elliptic_data_from_gamma(gamma: &Float, p: Precision) -> Result<EllipticData> {
    if gamma.is_nan() || *gamma <= 0 {
        return Err(Error::Domain(format!(
            "gamma must be positive, got {}",
            gamma.to_f64()
        )));
    }
    let w = p.work();
    let pw = pi(w);
    let q: Float = -(Float::with_val(w, &pw * &pw) / (Float::with_val(w, gamma) * 2u32));
    let q = q.exp();
    let (k, kp) = modulus_from_nome(&q, p.raised(32))?;
    let big_k = complete_k_from_kprime(&kp, w);
    let big_kp = complete_k_from_kprime(&k, w);
    let b = p.bits();
    Ok(EllipticData {
        k: Float::with_val(b, k),
        kprime: Float::with_val(b, kp),
        big_k: Float::with_val(b, big_k),
        big_kprime: Float::with_val(b, big_kp),
        q: Float::with_val(b, q),
    })
}

/// Jacobi `(sn, cn, dn)(u, k)` for real `u` by the descending AGM (Landen)
/// sequence and backward recursion of the amplitude.
pub fn jacobi_sn_cn_dn(u: &Float, k: &Float, p: Precision) -> Result<(Float, Float, Float)> {
    check_modulus(k)?;
    let w = p.work();
    let kp = complementary(k, w);
    let mut a = vec![Float::with_val(w, 1)];
    let mut c = vec![Float::with_val(w, k)];
    let mut b = kp;
    while !agm_settled(c.last().unwrap(), a.last().unwrap(), w) && a.len() < w as usize + 64 {
        let an = a.last().unwrap();
        let a_next = Float::with_val(w, an + &b) / 2;
        let c_next = Float::with_val(w, an - &b) / 2;
        b = Float::with_val(w, an * &b).sqrt();
        a.push(a_next);
        c.push(c_next);
    }
    let levels = a.len() - 1;
    let mut phi = Float::with_val(w, &a[levels] * u) << levels as u32;
    for n in (1..=levels).rev() {
        let s = Float::with_val(w, &c[n] * Float::with_val(w, phi.sin_ref())) / &a[n];
        phi = (phi + s.asin()) / 2;
    }
    let (sn, cn) = phi.sin_cos(Float::new(w));
    let kk = Float::with_val(w, k * k);
    let kp2 = Float::with_val(w, 1 - &kk);
    let dn = (kp2 + kk * Float::with_val(w, &cn * &cn)).sqrt();
    let bits = p.bits();
    Ok((
        Float::with_val(bits, sn),
        Float::with_val(bits, cn),
        Float::with_val(bits, dn),
    ))
}

/// Jacobi's Zeta function, `Z(u) = (π/2K) θ₄'(πu/2K) / θ₄(πu/2K)`, with the
/// derivative taken term by term.
pub fn jacobi_zeta(u: &Float, k: &Float, p: Precision) -> Result<Float> {
    check_modulus(k)?;
    if k.is_zero() {
        return Ok(Float::with_val(p.bits(), 0));
    }
    let inner = p.raised(16);
    let w = inner.work();
    let kp = complementary(k, w);
    let big_k = complete_k_from_kprime(&kp, w);
    let big_kp = complete_k_from_kprime(&Float::with_val(w, k), w);
    let q = (-(pi(w) * &big_kp / &big_k)).exp();
    let scale = pi(w) / (Float::with_val(w, &big_k) * 2);
    let v = Float::with_val(w, &scale * u);
    let d = theta_deriv(4, 1, &v, &q, inner)?;
    let t = theta(4, &v, &q, inner)?;
    Ok(Float::with_val(p.bits(), scale * d / t))
}

/// `θ_j(z, q)` for `j ∈ 1..=4`.
pub fn theta(j: u8, z: &Float, q: &Float, p: Precision) -> Result<Float> {
    theta_deriv(j, 0, z, q, p)
}

/// `d^order/dz^order θ_j(z, q)`, differentiating the series term by term.
/// `theta_deriv(1, 1, 0, q)` is `θ₁'(0)`.
pub fn theta_deriv(j: u8, order: u32, z: &Float, q: &Float, p: Precision) -> Result<Float> {
    if !(1..=4).contains(&j) {
        return Err(Error::Domain(format!("theta index must be 1..=4, got {j}")));
    }
    if q.is_nan() || *q < 0 || *q >= 1 {
        return Err(Error::Domain(format!(
            "nome must lie in [0, 1), got {}",
            q.to_f64()
        )));
    }
    if q.is_zero() {
        let v = if (j == 3 || j == 4) && order == 0 { 1 } else { 0 };
        return Ok(Float::with_val(p.bits(), v));
    }
    let w = p.work();
    let (sum, abs_sum) = theta_series(j, order, z, q, w);
    let lost = cancellation_bits(&sum, &abs_sum);
    let slack = w - p.bits() - crate::GUARD_BITS;
    let sum = if lost > slack {
        let extra = (lost - slack + 16).min(p.bits());
        theta_series(j, order, z, q, w + extra).0
    } else {
        sum
    };
    Ok(Float::with_val(p.bits(), sum))
}

fn cancellation_bits(sum: &Float, abs_sum: &Float) -> u32 {
    if abs_sum.is_zero() || sum.is_zero() {
        return 0;
    }
    let diff = abs_sum.get_exp().unwrap_or(0) - sum.get_exp().unwrap_or(0);
    diff.max(0) as u32
}

/// Returns the partial sum and the sum of absolute values of its terms.
fn theta_series(j: u8, order: u32, z: &Float, q: &Float, w: u32) -> (Float, Float) {
    let half_integer = j == 1 || j == 2;
    let alternating = j == 1 || j == 4;
    let base_is_sin = j == 1;
    let lnq = Float::with_val(w, q.ln_ref());
    let threshold_exp = -(w as i32) - 8;

    let mut sum = Float::with_val(w, 0);
    let mut abs_sum = Float::with_val(w, 0);
    if !half_integer && order == 0 {
        sum += 1;
        abs_sum += 1;
    }
    let mut prev_bound: Option<Float> = None;
    let start = if half_integer { 0u64 } else { 1 };
    for n in start.. {
        let (expo, freq) = if half_integer {
            let h = Float::with_val(w, n) + 0.5f64;
            (Float::with_val(w, &h * &h), 2 * n + 1)
        } else {
            (Float::with_val(w, n * n), 2 * n)
        };
        let qpow = (expo * &lnq).exp();
        let fpow = Float::with_val(w, freq).pow(order);
        let bound: Float = Float::with_val(w, &qpow * &fpow) * 2u32;

        let arg = Float::with_val(w, z * freq);
        // d^m/dz^m of sin/cos(f z) cycles through ±sin, ±cos.
        let (use_sin, negate) = match (base_is_sin, order % 4) {
            (true, 0) => (true, false),
            (true, 1) => (false, false),
            (true, 2) => (true, true),
            (true, _) => (false, true),
            (false, 0) => (false, false),
            (false, 1) => (true, true),
            (false, 2) => (false, true),
            (false, _) => (true, false),
        };
        let trig = if use_sin { arg.sin() } else { arg.cos() };
        let mut term = Float::with_val(w, &bound * &trig);
        if negate ^ (alternating && n % 2 == 1) {
            term = -term;
        }
        abs_sum += Float::with_val(w, term.abs_ref());
        sum += &term;

        let reference = abs_sum.get_exp().unwrap_or(0).max(sum.get_exp().unwrap_or(0));
        let small = bound.is_zero()
            || bound.get_exp().unwrap_or(i32::MIN) < reference + threshold_exp;
        let decreasing = prev_bound.as_ref().is_none_or(|pb| bound < *pb);
        if small && decreasing && n > start {
            break;
        }
        if bound.is_zero() {
            break;
        }
        prev_bound = Some(bound);
    }
    (sum, abs_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    fn f(bits: u32, v: f64) -> Float {
        Float::with_val(bits, v)
    }

    fn assert_close(a: &Float, b: &Float, tol: &Float) {
        let d = Float::with_val(a.prec().max(b.prec()), a - b).abs();
        assert!(d <= *tol, "|{a} - {b}| = {d} > {tol}");
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        let pr = p(256);
        let k = elliptic_k(&f(256, 0.0), pr).unwrap();
        assert_close(&k, &(pi(256) / 2), &pr.tolerance());
    }

    #[test]
    fn k_self_dual_point() {
        let pr = p(256);
        let k = Float::with_val(256, 2).sqrt().recip();
        let kp = complementary(&k, 400);
        let big_k = elliptic_k(&k, pr).unwrap();
        let big_kp = elliptic_k(&Float::with_val(256, kp), pr).unwrap();
        assert_close(&big_k, &big_kp, &pr.tolerance());
    }

    #[test]
    fn k_matches_quadrature() {
        // Gauss-Legendre style check through the tanh-sinh quadrature.
        let pr = p(128);
        let k = f(128, 0.8);
        let big_k = elliptic_k(&k, pr).unwrap();
        let quad = crate::quad::tanh_sinh(
            |x| 1.0 / (1.0 - 0.64 * x.sin().powi(2)).sqrt(),
            0.0,
            std::f64::consts::FRAC_PI_2,
            1e-15,
        )
        .unwrap();
        assert!((big_k.to_f64() - quad).abs() < 1e-13, "{} vs {quad}", big_k.to_f64());
    }

    #[test]
    fn modulus_out_of_range() {
        assert!(elliptic_k(&f(64, 1.0), p(64)).is_err());
        assert!(elliptic_k(&f(64, -0.1), p(64)).is_err());
        assert!(jacobi_sn_cn_dn(&f(64, 0.1), &f(64, 1.5), p(64)).is_err());
    }

    #[test]
    fn gamma_half_pi_gives_nome_e_minus_pi() {
        let pr = p(256);
        let gamma = pi(256) / 2;
        let data = elliptic_data_from_gamma(&gamma, pr).unwrap();
        let expect = (-pi(256)).exp();
        assert_close(&data.q, &expect, &pr.tolerance());
    }

    #[test]
    fn gamma_one_nome_value() {
        let pr = p(256);
        let data = elliptic_data_from_gamma(&f(256, 1.0), pr).unwrap();
        let pw = pi(300);
        let expect: Float = -(Float::with_val(300, &pw * &pw) / 2u32);
        let expect = expect.exp();
        assert_close(&data.q, &Float::with_val(256, expect), &pr.tolerance());
        assert!((data.q.to_f64() - 0.0071918).abs() < 1e-7);
    }

    #[test]
    fn sn_cn_dn_trigonometric_limit() {
        let pr = p(128);
        let u = f(128, 0.7);
        let (sn, cn, dn) = jacobi_sn_cn_dn(&u, &f(128, 0.0), pr).unwrap();
        assert_close(&sn, &Float::with_val(128, u.sin_ref()), &pr.tolerance());
        assert_close(&cn, &Float::with_val(128, u.cos_ref()), &pr.tolerance());
        assert_close(&dn, &f(128, 1.0), &pr.tolerance());
    }

    #[test]
    fn sn_cn_dn_quarter_period() {
        let pr = p(256);
        let k = f(256, 0.6);
        let big_k = elliptic_k(&k, pr).unwrap();
        let (sn, cn, dn) = jacobi_sn_cn_dn(&big_k, &k, pr).unwrap();
        assert_close(&sn, &f(256, 1.0), &pr.tolerance());
        assert_close(&cn, &f(256, 0.0), &pr.tolerance());
        let kprime = Float::with_val(256, 1 - Float::with_val(256, k.square_ref())).sqrt();
        assert_close(&dn, &kprime, &pr.tolerance());
    }

    #[test]
    fn zeta_vanishes_at_zero_and_k() {
        let pr = p(256);
        let k = f(256, 0.7);
        let big_k = elliptic_k(&k, pr).unwrap();
        let z0 = jacobi_zeta(&f(256, 0.0), &k, pr).unwrap();
        let zk = jacobi_zeta(&big_k, &k, pr).unwrap();
        assert_close(&z0, &f(256, 0.0), &pr.tolerance());
        assert_close(&zk, &f(256, 0.0), &pr.tolerance());
        let z = jacobi_zeta(&f(256, 0.4), &f(256, 0.0), pr).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn zeta_matches_e_over_k_slope() {
        // Z(u) = E(u) - u E/K, so Z'(0) = 1 - E/K.
        let pr = p(128);
        let k = f(128, 0.5);
        let h = f(128, 1e-12);
        let z = jacobi_zeta(&h, &k, pr).unwrap();
        let slope = z.to_f64() / 1e-12;
        let e = elliptic_e(&k, pr).unwrap().to_f64();
        let big_k = elliptic_k(&k, pr).unwrap().to_f64();
        assert!((slope - (1.0 - e / big_k)).abs() < 1e-9);
    }

    #[test]
    fn theta_q_zero_limits() {
        let pr = p(64);
        let z = f(64, 0.3);
        let q = f(64, 0.0);
        assert_eq!(theta(3, &z, &q, pr).unwrap(), 1);
        assert_eq!(theta(4, &z, &q, pr).unwrap(), 1);
        assert!(theta(1, &z, &q, pr).unwrap().is_zero());
        assert!(theta(2, &z, &q, pr).unwrap().is_zero());
    }

    #[test]
    fn theta_domain_errors() {
        let pr = p(64);
        let z = f(64, 0.3);
        assert!(theta(3, &z, &f(64, 1.0), pr).is_err());
        assert!(theta(5, &z, &f(64, 0.1), pr).is_err());
        assert!(theta(2, &z, &f(64, -0.2), pr).is_err());
    }

    #[test]
    fn theta2_direct_series() {
        // θ₂(0, 0.01) = 2 Σ 0.01^{(n+1/2)²}, summed independently in exact
        // powers of q^{1/4}: exponents (2n+1)²/4.
        let pr = p(256);
        let q = Float::with_val(256, Float::parse("0.01").unwrap());
        let got = theta(2, &f(256, 0.0), &q, pr).unwrap();
        let q4 = Float::with_val(400, q.sqrt_ref()).sqrt();
        let mut expect = Float::with_val(400, 0);
        for n in 0u32..20 {
            expect += Float::with_val(400, (&q4).pow((2 * n + 1).pow(2)));
        }
        expect *= 2;
        assert_close(&got, &Float::with_val(256, expect), &pr.tolerance());
    }

    #[test]
    fn theta1_prime_triple_product() {
        let pr = p(256);
        let zero = f(256, 0.0);
        for qv in [0.001, 0.01, 0.1, 0.3] {
            let q = f(256, qv);
            let d1 = theta_deriv(1, 1, &zero, &q, pr).unwrap();
            let prod = theta(2, &zero, &q, pr).unwrap()
                * theta(3, &zero, &q, pr).unwrap()
                * theta(4, &zero, &q, pr).unwrap();
            let rel = (Float::with_val(256, &d1 - &prod) / &d1).abs();
            assert!(rel < pr.tolerance(), "q = {qv}: {rel}");
        }
    }

    #[test]
    fn theta_derivative_matches_finite_difference() {
        let pr = p(256);
        let q = f(256, 0.2);
        let z = f(256, 0.37);
        let h = Float::with_val(256, 1) >> 60;
        for j in 1..=4u8 {
            let plus = theta(j, &Float::with_val(256, &z + &h), &q, pr).unwrap();
            let minus = theta(j, &Float::with_val(256, &z - &h), &q, pr).unwrap();
            let fd = (plus - minus) / (Float::with_val(256, &h) * 2);
            let d = theta_deriv(j, 1, &z, &q, pr).unwrap();
            let err = Float::with_val(256, &fd - &d).abs();
            assert!(err < 1e-30, "theta{j}: {err}");
        }
    }

    #[test]
    fn jacobi_identity_and_nome_round_trip() {
        let pr = p(256);
        let k = f(256, 0.3);
        let q = nome_from_modulus(&k, pr).unwrap();
        let (k2, kp2) = modulus_from_nome(&q, pr).unwrap();
        assert_close(&k2, &k, &pr.tolerance());
        let one = Float::with_val(256, &k2 * &k2) + Float::with_val(256, &kp2 * &kp2);
        assert_close(&one, &f(256, 1.0), &pr.tolerance());
    }
}
