//! Finite-size corrections to `log(τ_N/c_N) ≈ N² f`.
//!
//! In the AF phase the correction is not smooth in `N`: the ratio
//! `τ_N / (c_N e^{N²f})` oscillates like `θ₄((π/2)(1+ζ)N, q)`. Dividing that
//! factor out should leave a sequence converging to a constant. In the
//! disordered phase the correction is a power of `N`.

use rug::Float;

use super::free_energy::{f_value, nome};
use crate::exact::TauSequence;
use crate::specfun::{pi, theta};
use crate::{Error, Phase, Precision, Result};

const MIN_POINTS: usize = 4;

/// `r_N = log(τ_N/c_N) - N² f - log θ₄((π/2)(1+ζ)N, q)` together with the
/// unmodulated control `log(τ_N/c_N) - N² f`.
#[derive(Debug, Clone)]
pub struct ModulatedFit {
    pub ns: Vec<usize>,
    pub ratios: Vec<Float>,
    pub control: Vec<Float>,
    /// Spread (max - min) of `ratios` over the upper half of the N range.
    pub spread: f64,
    pub control_spread: f64,
    /// Mean of `ratios` over the upper half, an estimate of `log C`.
    pub log_c: f64,
}

/// Max minus min of `values` over `lo ≤ N ≤ hi`.
pub fn spread_over(ns: &[usize], values: &[Float], lo: usize, hi: usize) -> Option<f64> {
    let picked: Vec<f64> = ns
        .iter()
        .zip(values)
        .filter(|(n, _)| (lo..=hi).contains(*n))
        .map(|(_, v)| v.to_f64())
        .collect();
    if picked.len() < 2 {
        return None;
    }
    let max = picked.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = picked.iter().copied().fold(f64::INFINITY, f64::min);
    Some(max - min)
}

fn check_points(taus: &TauSequence) -> Result<()> {
    if taus.values.len() < MIN_POINTS {
        return Err(Error::InsufficientRange {
            needed: MIN_POINTS,
            got: taus.values.len(),
        });
    }
    Ok(())
}

fn upper_half(ns: &[usize]) -> (usize, usize) {
    let (lo, hi) = (ns[0], ns[ns.len() - 1]);
    ((lo + hi).div_ceil(2), hi)
}

/// Theta-modulated ratios in the AF phase.
pub fn subleading_af_fit(taus: &TauSequence, p: Precision) -> Result<ModulatedFit> {
    let params = &taus.params;
    if params.phase() != Phase::AntiFerroelectric {
        return Err(Error::WrongPhase {
            op: "subleading_af_fit",
            phase: params.phase(),
        });
    }
    check_points(taus)?;
    let inner = p.raised(32);
    let w = inner.work();
    let f = f_value(params, p)?;
    let q = nome(params.gamma(), w);
    let phase_step = pi(w) / 2 * Float::with_val(w, 1 + params.zeta());
    let mut ns = Vec::new();
    let mut ratios = Vec::new();
    let mut control = Vec::new();
    for v in &taus.values {
        let n2 = (v.n * v.n) as u32;
        let smooth = Float::with_val(w, &v.log_scaled - Float::with_val(w, &f * n2));
        let arg = Float::with_val(w, &phase_step * v.n as u32);
        let th = theta(4, &arg, &q, inner)?;
        ns.push(v.n);
        ratios.push(Float::with_val(p.bits(), &smooth - th.ln()));
        control.push(Float::with_val(p.bits(), smooth));
    }
    let (lo, hi) = upper_half(&ns);
    let spread = spread_over(&ns, &ratios, lo, hi).unwrap_or(0.0);
    let control_spread = spread_over(&ns, &control, lo, hi).unwrap_or(0.0);
    let top: Vec<f64> = ns
        .iter()
        .zip(&ratios)
        .filter(|(n, _)| **n >= lo)
        .map(|(_, r)| r.to_f64())
        .collect();
    let log_c = top.iter().sum::<f64>() / top.len() as f64;
    Ok(ModulatedFit {
        ns,
        ratios,
        control,
        spread,
        control_spread,
        log_c,
    })
}

/// Least-squares fit `r_N = κ log N + c` to `r_N = log(τ_N/c_N) - N² f`.
#[derive(Debug, Clone)]
pub struct PowerFit {
    pub ns: Vec<usize>,
    pub residuals: Vec<f64>,
    pub kappa: f64,
    pub constant: f64,
    /// Standard error of `κ` from the fit residuals.
    pub kappa_stderr: f64,
    /// `κ` refitted on windows of half the range, shifted by one.
    pub window_kappas: Vec<f64>,
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let stderr = if x.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, icpt, stderr)
}

/// Power-law correction in the disordered phase. `κ` and the constant are
/// reported, never assumed.
pub fn smooth_fit(taus: &TauSequence, p: Precision) -> Result<PowerFit> {
    let params = &taus.params;
    if params.phase() != Phase::Disordered {
        return Err(Error::WrongPhase {
            op: "smooth_fit",
            phase: params.phase(),
        });
    }
    check_points(taus)?;
    let w = p.work();
    let f = f_value(params, p)?;
    let ns: Vec<usize> = taus.values.iter().map(|v| v.n).collect();
    let residuals: Vec<f64> = taus
        .values
        .iter()
        .map(|v| Float::with_val(w, &v.log_scaled - Float::with_val(w, &f * (v.n * v.n) as u32)).to_f64())
        .collect();
    let logs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let (kappa, constant, kappa_stderr) = line_fit(&logs, &residuals);
    let width = (ns.len() / 2).max(3);
    let window_kappas = (0..=ns.len() - width)
        .map(|s| line_fit(&logs[s..s + width], &residuals[s..s + width]).0)
        .collect();
    Ok(PowerFit {
        ns,
        residuals,
        kappa,
        constant,
        kappa_stderr,
        window_kappas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::tau_sequence;
    use crate::PhaseParams;

    #[test]
    fn spread_helper() {
        let v: Vec<Float> = [3.0, 1.0, 2.0, 5.0].iter().map(|&x| Float::with_val(64, x)).collect();
        assert_eq!(spread_over(&[1, 2, 3, 4], &v, 1, 3), Some(2.0));
        assert_eq!(spread_over(&[1, 2, 3, 4], &v, 4, 4), None);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (s, c, e) = line_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-14 && (c - 1.0).abs() < 1e-14 && e < 1e-7);
    }

    #[test]
    fn modulation_tames_the_oscillation() {
        let p = Precision::new(256).unwrap();
        let params = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.0, 1.0, 256).unwrap();
        let taus = tau_sequence(&params, 2, 10, p).unwrap();
        let fit = subleading_af_fit(&taus, p).unwrap();
        assert!(fit.spread < fit.control_spread, "{} {}", fit.spread, fit.control_spread);
    }

    #[test]
    fn too_few_points() {
        let p = Precision::new(128).unwrap();
        let params = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.0, 1.0, 128).unwrap();
        let taus = tau_sequence(&params, 2, 4, p).unwrap();
        assert!(matches!(
            subleading_af_fit(&taus, p),
            Err(Error::InsufficientRange { .. })
        ));
    }

    #[test]
    fn disordered_fit_is_stable() {
        let p = Precision::new(256).unwrap();
        let params = PhaseParams::from_f64(Phase::Disordered, 0.2, 1.0, 256).unwrap();
        let taus = tau_sequence(&params, 4, 14, p).unwrap();
        let fit = smooth_fit(&taus, p).unwrap();
        assert!(fit.kappa.is_finite());
        assert!(fit.window_kappas.len() >= 2);
    }
}
