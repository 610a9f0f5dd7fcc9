//! Double-exponential quadrature.
//!
//! `tanh_sinh` and `exp_sinh` work in `f64` and feed the integrand the exact
//! distances to the finite endpoints, so inverse-square-root endpoint
//! singularities keep full accuracy. `sinh_sinh` integrates over the whole
//! real line at MPFR precision.

use rug::Float;

use crate::{Error, Result};

const MAX_LEVELS: usize = 14;
const T_MAX: f64 = 6.5;

/// `∫_a^b f`, where `f` is called as `f(x, x - a, b - x)`.
pub fn tanh_sinh_with_distances<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return ordered(&|x, da, db| f(x, db, da), b, a, tol).map(|v| -v);
    }
    ordered(&f, a, b, tol)
}

fn ordered(f: &dyn Fn(f64, f64, f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let half = 0.5 * (b - a);
    let node = |t: f64| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        // 1 - tanh|u| without cancellation.
        let e = (-2.0 * u.abs()).exp();
        let comp = half * 2.0 * e / (1.0 + e);
        if comp == 0.0 {
            return 0.0;
        }
        let ch = u.cosh();
        let weight = half * std::f64::consts::FRAC_PI_2 * t.cosh() / (ch * ch);
        let (x, da, db) = if t >= 0.0 {
            (b - comp, 2.0 * half - comp, comp)
        } else {
            (a + comp, comp, 2.0 * half - comp)
        };
        let v = f(x, da, db);
        if v.is_finite() {
            weight * v
        } else {
            0.0
        }
    };
    trapezoid_levels(node, tol)
}

/// `∫_a^b f` on a finite interval.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    tanh_sinh_with_distances(|x, _, _| f(x), a, b, tol)
}

/// `∫_a^∞ f`, where `f` is called as `f(x, x - a)`.
pub fn exp_sinh<F>(f: F, a: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let node = |t: f64| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let d = u.exp();
        if d == 0.0 || !d.is_finite() {
            return 0.0;
        }
        let weight = std::f64::consts::FRAC_PI_2 * t.cosh() * d;
        let v = f(a + d, d);
        let r = weight * v;
        if r.is_finite() {
            r
        } else {
            0.0
        }
    };
    trapezoid_levels(node, tol)
}

fn trapezoid_levels<N>(node: N, tol: f64) -> Result<f64>
where
    N: Fn(f64) -> f64,
{
    let mut h = 1.0;
    let mut sum = node(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum += node(k as f64 * h) + node(-(k as f64) * h);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut change = f64::INFINITY;
    for _ in 0..MAX_LEVELS {
        h *= 0.5;
        let mut odd = 0.0;
        let mut j = 1;
        while (j as f64) * h <= T_MAX {
            odd += node(j as f64 * h) + node(-(j as f64) * h);
            j += 2;
        }
        sum += odd;
        let next = sum * h;
        change = (next - estimate).abs();
        estimate = next;
        if change <= tol * estimate.abs().max(1.0) {
            return Ok(estimate);
        }
    }
    Err(Error::Quadrature {
        achieved: change,
        target: tol,
    })
}

/// `∫_{-∞}^{∞} f` at `bits` precision by the sinh-sinh substitution
/// `x = sinh((π/2) sinh t)`. Converged when successive halvings of the
/// step agree to `rel_tol` relative to `∫|f|`, so integrals that vanish by
/// symmetry still terminate.
pub fn sinh_sinh<F>(f: F, bits: u32, rel_tol: f64) -> Result<Float>
where
    F: Fn(&Float) -> Float,
{
    let half_pi = crate::specfun::pi(bits) / 2;
    let node = |t: f64| -> Float {
        let tf = Float::with_val(bits, t);
        let u: Float = Float::with_val(bits, tf.sinh_ref()) * &half_pi;
        let x = Float::with_val(bits, u.sinh_ref());
        let weight = Float::with_val(bits, tf.cosh_ref()) * &half_pi * u.cosh();
        let v = f(&x);
        if v.is_finite() {
            v * weight
        } else {
            Float::with_val(bits, 0)
        }
    };
    // Truncate where terms fall below the working precision relative to the
    // largest contribution seen so far.
    let t_end = {
        let mut peak = node(0.0).abs().to_f64();
        let mut t = 0.25;
        loop {
            let m = node(t).abs().to_f64().max(node(-t).abs().to_f64());
            peak = peak.max(m);
            if (t >= 1.0 && m <= peak * 2f64.powi(-(bits as i32) - 16)) || t >= 8.0 {
                break t;
            }
            t += 0.25;
        }
    };
    let mut h = 0.25;
    let mut sum = node(0.0);
    let mut abs_sum = Float::with_val(bits, sum.abs_ref());
    let mut k = 1;
    while k as f64 * h <= t_end {
        for v in [node(k as f64 * h), node(-(k as f64) * h)] {
            abs_sum += Float::with_val(bits, v.abs_ref());
            sum += v;
        }
        k += 1;
    }
    let mut estimate = Float::with_val(bits, &sum * h);
    let mut change = f64::INFINITY;
    for _ in 0..MAX_LEVELS {
        h *= 0.5;
        let mut j = 1;
        while j as f64 * h <= t_end {
            for v in [node(j as f64 * h), node(-(j as f64) * h)] {
                abs_sum += Float::with_val(bits, v.abs_ref());
                sum += v;
            }
            j += 2;
        }
        let next = Float::with_val(bits, &sum * h);
        let scale = (Float::with_val(bits, &abs_sum * h)).to_f64().max(f64::MIN_POSITIVE);
        change = Float::with_val(bits, &next - &estimate).abs().to_f64() / scale;
        estimate = next;
        if change <= rel_tol {
            return Ok(estimate);
        }
    }
    Err(Error::Quadrature {
        achieved: change,
        target: rel_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt_endpoints() {
        // ∫_0^1 dx / sqrt(x(1-x)) = π
        let v = tanh_sinh_with_distances(|_, da, db| 1.0 / (da * db).sqrt(), 0.0, 1.0, 1e-14)
            .unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let fwd = tanh_sinh(|x| x * x, 0.0, 2.0, 1e-14).unwrap();
        let back = tanh_sinh(|x| x * x, 2.0, 0.0, 1e-14).unwrap();
        assert!((fwd - 8.0 / 3.0).abs() < 1e-13);
        assert!((fwd + back).abs() < 1e-13);
    }

    #[test]
    fn half_line() {
        // ∫_1^∞ dx/x² = 1 and ∫_0^∞ e^{-x} = 1
        let a = exp_sinh(|x, _| 1.0 / (x * x), 1.0, 1e-14).unwrap();
        let b = exp_sinh(|x, _| (-x).exp(), 0.0, 1e-14).unwrap();
        assert!((a - 1.0).abs() < 1e-13, "{a}");
        assert!((b - 1.0).abs() < 1e-13, "{b}");
    }

    #[test]
    fn whole_line_gaussian() {
        let bits = 160;
        let v = sinh_sinh(|x| Float::with_val(bits, -(Float::with_val(bits, x * x))).exp(), bits, 1e-30)
            .unwrap();
        let expect = crate::specfun::pi(bits).sqrt();
        let err = Float::with_val(bits, v - expect).abs();
        assert!(err < 1e-28, "{err}");
    }
}
