use rug::{Float, Integer};

use crate::{Phase, PhaseParams, Precision, Result};

/// Which trigonometric family the two poles of `φ` belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `w = coth x`, `dw/dx = 1 - w²`
    Coth,
    /// `w = cot x`, `dw/dx = -1 - w²`
    Cot,
}

impl Family {
    fn sign(self) -> i32 {
        match self {
            Family::Coth => 1,
            Family::Cot => -1,
        }
    }
}

/// `φ⁽ⁿ⁾(t)` for `n = 0..=order_max`.
///
/// `φ` splits into two poles, `φ = s₊ w(x₊) + s₋ w(x₋)`, with `w = coth` or
/// `cot` and `x± = ±t + const`. With `d^n/dx^n w(x) = P_n(w(x))` the
/// derivatives are
///
/// ```text
/// FE: φ⁽ⁿ⁾ = P_n(coth(t-γ)) - P_n(coth(t+γ))
/// D:  φ⁽ⁿ⁾ = (-1)^n P_n(cot(γ-t)) + P_n(cot(γ+t))
/// AF: φ⁽ⁿ⁾ = (-1)^n P_n(coth(γ-t)) + P_n(coth(γ+t))
/// ```
///
/// where `P₀(w) = w` and `P_{n+1}(w) = P_n'(w)·(±1 - w²)` exactly over the
/// integers.
#[derive(Debug, Clone)]
pub struct DerivativeTable {
    family: Family,
    polys: Vec<Vec<Integer>>,
    values: Vec<Float>,
}

impl DerivativeTable {
    pub fn order_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Coefficients of `P_n`, lowest degree first.
    pub fn poly(&self, n: usize) -> &[Integer] {
        &self.polys[n]
    }

    /// `φ⁽ⁿ⁾(t)`.
    pub fn value(&self, n: usize) -> &Float {
        &self.values[n]
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }
}

/// Coefficients of `P_0..=P_order` for one family.
pub(crate) fn pole_polynomials(family: Family, order: usize) -> Vec<Vec<Integer>> {
    let s = family.sign();
    let mut polys = vec![vec![Integer::from(0), Integer::from(1)]];
    for n in 0..order {
        let prev = &polys[n];
        let mut next = vec![Integer::new(); prev.len() + 1];
        for (j, c) in prev.iter().enumerate().skip(1) {
            let jc = Integer::from(c * j as u32);
            next[j - 1] += Integer::from(&jc * s);
            next[j + 1] -= jc;
        }
        polys.push(next);
    }
    polys
}

/// Horner evaluation, returning the value and the same polynomial with
/// absolute coefficients at `|w|` (the cancellation scale).
fn eval(poly: &[Integer], w: &Float, bits: u32) -> (Float, Float) {
    let aw = Float::with_val(bits, w.abs_ref());
    let mut v = Float::with_val(bits, 0);
    let mut m = Float::with_val(bits, 0);
    for c in poly.iter().rev() {
        v *= w;
        v += c;
        m *= &aw;
        m += Integer::from(c.abs_ref());
    }
    (v, m)
}

fn lost_bits(value: &Float, scale: &Float) -> u32 {
    if value.is_zero() {
        return u32::MAX;
    }
    let r = Float::with_val(64, scale / Float::with_val(64, value.abs_ref()));
    r.log2().to_f64().max(0.0).ceil() as u32
}

/// The poles `(s₊, w(x₊), s₋-sign-alternates, w(x₋))` of `φ` at `bits`.
fn poles(params: &PhaseParams, bits: u32) -> (Family, Float, Float, bool) {
    let t = Float::with_val(bits, params.t());
    let g = Float::with_val(bits, params.gamma());
    let minus = Float::with_val(bits, &g - &t);
    let plus = Float::with_val(bits, &g + &t);
    match params.phase() {
        // (first pole, second pole, second pole enters with sign -1)
        Phase::Ferroelectric => (Family::Coth, (-minus).coth(), plus.coth(), true),
        Phase::Disordered => (Family::Cot, minus.cot(), plus.cot(), false),
        Phase::AntiFerroelectric => (Family::Coth, minus.coth(), plus.coth(), false),
    }
}

/// Builds the derivative table of `φ` at the phase point.
pub fn phi_derivatives(params: &PhaseParams, order_max: usize, p: Precision) -> Result<DerivativeTable> {
    let (family, polys) = match params.phase() {
        Phase::Disordered => (Family::Cot, pole_polynomials(Family::Cot, order_max)),
        _ => (Family::Coth, pole_polynomials(Family::Coth, order_max)),
    };
    let coeff_bits = polys
        .iter()
        .flat_map(|p| p.iter())
        .map(|c| c.significant_bits())
        .max()
        .unwrap_or(1);
    let target = p.work();
    let mut bits = target + coeff_bits + 32;
    let values = loop {
        let (_, w1, w2, fe) = poles(params, bits);
        let mut values = Vec::with_capacity(order_max + 1);
        let mut worst = 0u32;
        for (n, poly) in polys.iter().enumerate() {
            let (v1, m1) = eval(poly, &w1, bits);
            let (v2, m2) = eval(poly, &w2, bits);
            // FE: P_n(w1) - P_n(w2) with w1 = coth(t-γ).
            // D/AF: (-1)^n P_n(w1) + P_n(w2) with w1 = w(γ-t).
            let v = if fe {
                v1 - v2
            } else if n % 2 == 1 {
                v2 - v1
            } else {
                v1 + v2
            };
            worst = worst.max(lost_bits(&v, &(m1 + m2)));
            values.push(v);
        }
        // Horner leaves at most coeff_bits + log2(degree) of its own error on
        // top of the cancellation measured above.
        let needed = target + coeff_bits + worst.min(1 << 16) + 16;
        if needed <= bits {
            break values;
        }
        if worst == u32::MAX {
            break values;
        }
        bits = needed + 32;
    };
    let values = values
        .into_iter()
        .map(|v| Float::with_val(target, v))
        .collect();
    Ok(DerivativeTable {
        family,
        polys,
        values,
    })
}
