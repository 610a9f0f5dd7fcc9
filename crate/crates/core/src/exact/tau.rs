use rug::ops::Pow;
use rug::{Float, Integer};

use super::derivatives::{phi_derivatives, DerivativeTable};
use crate::{Error, PhaseParams, Precision, Result};

/// Beyond this many cancelled bits the working precision is raised and the
/// elimination repeated.
const RETRY_LOST_BITS: u32 = 24;

/// One scaled determinant `τ_N / c_N`, with `c_N = (∏_{n<N} n!)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauValue {
    pub n: usize,
    pub scaled_tau: Float,
    pub log_scaled: Float,
    /// Cancellation estimate of the elimination, in bits.
    pub lost_bits: u32,
}

/// `τ_N / c_N` for consecutive `N`, all from one derivative table.
#[derive(Debug, Clone)]
pub struct TauSequence {
    pub params: PhaseParams,
    pub bits: u32,
    pub values: Vec<TauValue>,
}

impl TauSequence {
    pub fn get(&self, n: usize) -> Option<&TauValue> {
        self.values.iter().find(|v| v.n == n)
    }

    pub fn n_range(&self) -> (usize, usize) {
        (
            self.values.first().map_or(0, |v| v.n),
            self.values.last().map_or(0, |v| v.n),
        )
    }
}

/// `det_{0≤i,k<N} [φ^{(i+k)}(t) / (i! k!)]`, which is `τ_N / c_N`.
pub fn tau_scaled(params: &PhaseParams, n: usize, p: Precision) -> Result<TauValue> {
    check_n(n)?;
    tau_with_retry(params, n, p)
}

/// `τ_N / c_N` for every `N` in `n_min..=n_max`.
pub fn tau_sequence(params: &PhaseParams, n_min: usize, n_max: usize, p: Precision) -> Result<TauSequence> {
    check_n(n_min)?;
    if n_max < n_min {
        return Err(Error::Domain(format!("empty range {n_min}..={n_max}")));
    }
    let mut values = Vec::with_capacity(n_max - n_min + 1);
    let mut bits = p.work();
    let mut table = phi_derivatives(params, 2 * n_max - 2, Precision::new(bits)?)?;
    for n in n_min..=n_max {
        let v = loop {
            match hankel_det(&table, n, bits) {
                Ok(det) if det.lost > bits - p.bits() - 8 => {
                    // Raise the precision for this and every larger N.
                    bits = p.bits() + det.lost + RETRY_LOST_BITS + 32;
                    table = phi_derivatives(params, 2 * n_max - 2, Precision::new(bits)?)?;
                }
                Ok(det) => break finish(n, det, p)?,
                Err(e) => return Err(e),
            }
        };
        values.push(v);
    }
    Ok(TauSequence {
        params: params.clone(),
        bits: p.bits(),
        values,
    })
}

/// `Z_N = (ab)^{N²} τ_N / c_N`.
pub fn partition_z(params: &PhaseParams, n: usize, p: Precision) -> Result<Float> {
    let tau = tau_scaled(params, n, p)?;
    let w = params.weights(p.work());
    let ab = Float::with_val(p.work(), &w.a * &w.b);
    let z = ab.pow((n * n) as u32) * &tau.scaled_tau;
    Ok(Float::with_val(p.bits(), z))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::UnsupportedSize {
            n,
            min: 1,
            max: usize::MAX,
        });
    }
    Ok(())
}

fn tau_with_retry(params: &PhaseParams, n: usize, p: Precision) -> Result<TauValue> {
    let mut bits = p.work();
    loop {
        let table = phi_derivatives(params, 2 * n - 2, Precision::new(bits)?)?;
        let det = hankel_det(&table, n, bits)?;
        if det.lost > bits - p.bits() - 8 && det.lost <= p.bits() - 32 {
            bits = p.bits() + det.lost + RETRY_LOST_BITS + 32;
            continue;
        }
        return finish(n, det, p);
    }
}

fn finish(n: usize, det: Det, p: Precision) -> Result<TauValue> {
    let limit = p.bits() - 32;
    if det.lost > limit {
        return Err(Error::PrecisionExhausted {
            n,
            lost_bits: det.lost,
            limit,
            bits: p.bits(),
        });
    }
    if det.value <= 0 {
        return Err(Error::Domain(format!(
            "scaled Hankel determinant for N = {n} is not positive"
        )));
    }
    let log_scaled = Float::with_val(p.bits(), det.value.ln_ref());
    Ok(TauValue {
        n,
        scaled_tau: Float::with_val(p.bits(), &det.value),
        log_scaled,
        lost_bits: det.lost,
    })
}

struct Det {
    value: Float,
    lost: u32,
}

/// Gaussian elimination with partial pivoting on the scaled Hankel matrix.
/// The cancellation estimate is `max_k log2(largest entry seen / |pivot_k|)`.
fn hankel_det(table: &DerivativeTable, n: usize, bits: u32) -> Result<Det> {
    let mut fact = vec![Integer::from(1)];
    for i in 1..n {
        let next = Integer::from(&fact[i - 1] * i as u32);
        fact.push(next);
    }
    let mut m: Vec<Vec<Float>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    let denom = Integer::from(&fact[i] * &fact[k]);
                    Float::with_val(bits, table.value(i + k)) / denom
                })
                .collect()
        })
        .collect();
    let mut largest = Float::with_val(bits, 0);
    for row in &m {
        for x in row {
            if x.clone().abs() > largest {
                largest = Float::with_val(bits, x.abs_ref());
            }
        }
    }
    let mut det = Float::with_val(bits, 1);
    let mut lost = 0u32;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| {
                let x = Float::with_val(bits, m[a][col].abs_ref());
                let y = Float::with_val(bits, m[b][col].abs_ref());
                x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if m[piv][col].is_zero() {
            return Ok(Det {
                value: Float::with_val(bits, 0),
                lost: u32::MAX / 2,
            });
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let ratio = Float::with_val(64, &largest / Float::with_val(bits, m[col][col].abs_ref()));
        lost = lost.max(ratio.log2().to_f64().max(0.0).ceil() as u32);
        det *= &m[col][col];
        let (upper, lower) = m.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            let factor = Float::with_val(bits, &row[col] / &pivot_row[col]);
            for k in col + 1..n {
                row[k] -= Float::with_val(bits, &factor * &pivot_row[k]);
                if row[k].clone().abs() > largest {
                    largest = Float::with_val(bits, row[k].abs_ref());
                }
            }
        }
    }
    Ok(Det { value: det, lost })
}
