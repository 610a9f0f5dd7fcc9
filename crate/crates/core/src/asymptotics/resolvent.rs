//! Resolvent `ω(z) = ∫ ρ(μ) dμ / (z - μ)` and the eigenvalue density.
//!
//! These run in `f64`: the quantities checked here (normalisation, plateau
//! values, saddle equations) are compared at tolerances around `1e-8`, and
//! the endpoint geometry is rounded once from its high-precision value.
//!
//! Branches: every square root is the principal one applied to a single
//! factor `z - e`, so each cut runs left from its branch point and pairs of
//! cuts cancel outside the support. The boundary value `ω(μ + i0)` is then
//! obtained by evaluating at a real point with imaginary part `+0.0`, or in
//! the AF phase by integrating along the upper bank of the real axis.

use num_complex::Complex64;

use super::geometry::SaddleGeometry;
use crate::quad::{exp_sinh, tanh_sinh, tanh_sinh_with_distances};
use crate::{Error, Phase, PhaseParams, Result};

const TOL: f64 = 1e-13;

/// Offsets used by [`boundary_value_richardson`].
pub const RICHARDSON_EPS: [f64; 3] = [1e-3, 1e-4, 1e-5];

struct Ends {
    phase: Phase,
    e: [f64; 4],
    s: f64,
    zeta: f64,
}

fn ends(params: &PhaseParams, geom: &SaddleGeometry) -> Ends {
    let t = params.t().to_f64();
    Ends {
        phase: geom.phase,
        e: geom.endpoints_f64(),
        s: t - params.gamma().to_f64().abs(),
        zeta: params.zeta().to_f64(),
    }
}

fn on_support(ends: &Ends, x: f64) -> bool {
    let [a, _, _, b] = ends.e;
    match ends.phase {
        Phase::Ferroelectric => (0.0..=b).contains(&x),
        // AF: the saturated band (α', β') belongs to the support too.
        _ => (a..=b).contains(&x),
    }
}

fn csqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}

fn closed_form(ends: &Ends, z: Complex64) -> Complex64 {
    let [a, _, _, b] = ends.e;
    let i = Complex64::i();
    match ends.phase {
        Phase::Ferroelectric => {
            let num = csqrt(z - a) * b.sqrt() + csqrt(z - b) * a.sqrt();
            let den = csqrt(z) * (b - a).sqrt();
            Complex64::new(ends.s, 0.0) - (num / den).ln() * 2.0
        }
        Phase::Disordered => {
            let num = csqrt(z - a) * b.sqrt() - i * csqrt(z - b) * (-a).sqrt();
            let den = csqrt(z) * (b - a).sqrt();
            Complex64::new((1.0 - ends.zeta) / 2.0, 0.0)
                + (num / den).ln() * (2.0 / (i * std::f64::consts::PI))
        }
        Phase::AntiFerroelectric => unreachable!(),
    }
}

fn quartic_root(e: &[f64; 4], z: Complex64) -> Complex64 {
    e.iter().map(|&x| csqrt(z - x)).product()
}

/// AF: `ω(z) = ∫_z^∞ dz'/R(z')` along the vertical ray `z' = z + i s`
/// (for `Im z ≥ 0`), which never meets a cut.
fn af_ray(e: &[f64; 4], z: Complex64) -> Result<Complex64> {
    let integrand = |s: f64| Complex64::i() / quartic_root(e, z + Complex64::new(0.0, s));
    let re = exp_sinh(|s, _| integrand(s).re, 0.0, TOL)?;
    let im = exp_sinh(|s, _| integrand(s).im, 0.0, TOL)?;
    Ok(Complex64::new(re, im))
}

/// `ω(z)` for `z` off the support.
pub fn resolvent(params: &PhaseParams, geom: &SaddleGeometry, z: Complex64) -> Result<Complex64> {
    let ends = ends(params, geom);
    if z.im == 0.0 && on_support(&ends, z.re) {
        return Err(Error::Domain(format!("z = {} lies on the support", z.re)));
    }
    match ends.phase {
        Phase::AntiFerroelectric => {
            if z.im < 0.0 {
                af_ray(&ends.e, z.conj()).map(|w| w.conj())
            } else {
                af_ray(&ends.e, Complex64::new(z.re, 0.0) + Complex64::new(0.0, z.im))
            }
        }
        _ => {
            // Closed forms are analytic off the support; use the upper
            // half-plane representative on the real axis.
            let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
            Ok(closed_form(&ends, z))
        }
    }
}

/// `1/i^m`
fn inv_i_pow(m: usize) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `∫_lo^hi dx / ∏√|x - e_i|` with exact endpoint distances.
fn segment(e: &[f64; 4], lo: f64, hi: f64) -> Result<f64> {
    tanh_sinh_with_distances(
        |x, da, db| {
            let prod: f64 = e
                .iter()
                .map(|&ei| {
                    if ei == lo {
                        da
                    } else if ei == hi {
                        db
                    } else {
                        (x - ei).abs()
                    }
                })
                .product();
            1.0 / prod.sqrt()
        },
        lo,
        hi,
        TOL,
    )
}

fn af_boundary(e: &[f64; 4], mu: f64) -> Result<Complex64> {
    let b = e[3];
    let mut total = Complex64::new(0.0, 0.0);
    let mut lo = mu;
    for (k, &ek) in e.iter().enumerate() {
        if ek <= lo {
            continue;
        }
        // On (lo, ek) the branch points above x are e[k..].
        total += inv_i_pow(4 - k) * segment(e, lo, ek)?;
        lo = ek;
    }
    let start = lo.max(b);
    let tail = exp_sinh(
        |x, d| {
            let prod: f64 = e
                .iter()
                .map(|&ei| if ei == start { d } else { x - ei })
                .product();
            1.0 / prod.sqrt()
        },
        start,
        TOL,
    )?;
    Ok(total + tail)
}

/// `ω(μ + i0)` for real `μ`, including points on the support.
pub fn boundary_value(params: &PhaseParams, geom: &SaddleGeometry, mu: f64) -> Result<Complex64> {
    let ends = ends(params, geom);
    match ends.phase {
        Phase::AntiFerroelectric => af_boundary(&ends.e, mu),
        _ => Ok(closed_form(&ends, Complex64::new(mu, 0.0))),
    }
}

/// `ω(μ + i0)` from `ω(μ + iε)` at `ε ∈ {1e-3, 1e-4, 1e-5}`, extrapolated
/// to `ε = 0` by two Richardson steps. Used as an independent check of
/// [`boundary_value`].
pub fn boundary_value_richardson(
    params: &PhaseParams,
    geom: &SaddleGeometry,
    mu: f64,
) -> Result<Complex64> {
    let v: Vec<Complex64> = RICHARDSON_EPS
        .iter()
        .map(|&eps| resolvent(params, geom, Complex64::new(mu, eps)))
        .collect::<Result<_>>()?;
    let r1 = (v[1] * 10.0 - v[0]) / 9.0;
    let r2 = (v[2] * 10.0 - v[1]) / 9.0;
    Ok((r2 * 100.0 - r1) / 99.0)
}

/// `ρ(μ) = -Im ω(μ + i0) / π`.
pub fn density_at(params: &PhaseParams, geom: &SaddleGeometry, mu: f64) -> Result<f64> {
    let ends = ends(params, geom);
    if !on_support(&ends, mu) {
        return Ok(0.0);
    }
    if ends.phase == Phase::Disordered && mu == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-boundary_value(params, geom, mu)?.im / std::f64::consts::PI)
}

/// Sampled density with its checks.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub phase: Phase,
    /// `(μ, ρ(μ))` at cell midpoints across the support.
    pub grid: Vec<(f64, f64)>,
    pub saturated: Vec<(f64, f64)>,
    /// 1 in FE, `1/2γ` in AF, unbounded in D.
    pub bound: f64,
    /// `∫ρ dμ` by quadrature.
    pub mass: f64,
    /// Largest `|ρ - bound|` at interior points of the saturated intervals.
    pub plateau_error: f64,
    /// Largest `ρ - bound` over the grid.
    pub max_excess: f64,
    pub min_rho: f64,
}

/// Samples the density at `grid_size` points and checks normalisation and
/// the saturation constraint.
pub fn density(params: &PhaseParams, geom: &SaddleGeometry, grid_size: usize) -> Result<DensityProfile> {
    if grid_size == 0 {
        return Err(Error::Domain("density grid must have at least one point".into()));
    }
    let ends = ends(params, geom);
    let bound = match ends.phase {
        Phase::Ferroelectric => 1.0,
        Phase::Disordered => f64::INFINITY,
        Phase::AntiFerroelectric => 1.0 / (2.0 * params.gamma().to_f64()),
    };
    let (lo, hi) = geom.support();
    let h = (hi - lo) / grid_size as f64;
    let grid = (0..grid_size)
        .map(|k| {
            let mu = lo + (k as f64 + 0.5) * h;
            density_at(params, geom, mu).map(|r| (mu, r))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut breaks = vec![lo, hi];
    for (a, b) in geom.saturated() {
        breaks.extend([a, b]);
    }
    if ends.phase == Phase::Disordered {
        breaks.push(0.0);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut mass = 0.0;
    for w in breaks.windows(2) {
        mass += tanh_sinh(
            |mu| density_at(params, geom, mu).unwrap_or(f64::NAN),
            w[0],
            w[1],
            1e-11,
        )?;
    }

    let saturated = geom.saturated();
    let mut plateau_error: f64 = 0.0;
    for &(a, b) in &saturated {
        for k in 1..16 {
            let mu = a + (b - a) * k as f64 / 16.0;
            let r = density_at(params, geom, mu)?;
            plateau_error = plateau_error.max((r - bound).abs());
        }
    }
    let max_excess = grid
        .iter()
        .map(|&(_, r)| r - bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_rho = grid.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
    Ok(DensityProfile {
        phase: ends.phase,
        grid,
        saturated,
        bound,
        mass,
        plateau_error,
        max_excess,
        min_rho,
    })
}

/// Largest `|2 Re ω(μ + i0) + ζ - sign μ|` over sample points of the
/// unsaturated part of the support (D and AF).
pub fn saddle_residual(params: &PhaseParams, geom: &SaddleGeometry, samples: usize) -> Result<f64> {
    let ends = ends(params, geom);
    let [a, ap, bp, b] = ends.e;
    let intervals = match ends.phase {
        Phase::Disordered => vec![(a, 0.0), (0.0, b)],
        Phase::AntiFerroelectric => vec![(a, ap), (bp, b)],
        phase => {
            return Err(Error::WrongPhase {
                op: "saddle_residual",
                phase,
            })
        }
    };
    let mut worst: f64 = 0.0;
    for (lo, hi) in intervals {
        for k in 1..=samples {
            let mu = lo + (hi - lo) * k as f64 / (samples + 1) as f64;
            let w = boundary_value(params, geom, mu)?;
            worst = worst.max((2.0 * w.re + ends.zeta - mu.signum()).abs());
        }
    }
    Ok(worst)
}
