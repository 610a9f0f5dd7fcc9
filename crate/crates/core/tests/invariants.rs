use proptest::prelude::*;
use sixvertex_core::asymptotics::{bulk_f, chem_residual, density, dfdzeta, endpoints};
use sixvertex_core::exact::{partition_z, tau_discrete_sum, c_n, sufficient_cutoff, tau_scaled, toda_residual};
use sixvertex_core::oracle::{enumerate_dwbc, z_from_census};
use sixvertex_core::{Float, Phase, PhaseParams, Precision};

const BITS: u32 = 192;

fn p() -> Precision {
    Precision::new(BITS).unwrap()
}

fn rel(a: &Float, b: &Float) -> f64 {
    let d = Float::with_val(BITS + 64, a - b).abs();
    (d / Float::with_val(BITS + 64, b.abs_ref())).to_f64()
}

/// An interior point of one phase, drawn from `(u, v) ∈ [0, 1)²`.
fn point(phase: Phase, u: f64, v: f64) -> PhaseParams {
    let (t, g) = match phase {
        Phase::Ferroelectric => {
            let g = 0.1 + 1.4 * v;
            (g + 0.2 + 2.0 * u, g)
        }
        Phase::Disordered => {
            let g = 0.2 + 1.2 * v;
            (g * (1.6 * u - 0.8), g)
        }
        Phase::AntiFerroelectric => {
            let g = 0.3 + 2.0 * v;
            (g * (1.6 * u - 0.8), g)
        }
    };
    PhaseParams::from_f64(phase, t, g, BITS).unwrap()
}

fn any_phase() -> impl Strategy<Value = Phase> {
    prop_oneof![
        Just(Phase::Ferroelectric),
        Just(Phase::Disordered),
        Just(Phase::AntiFerroelectric)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn determinant_matches_enumeration(phase in any_phase(), u in 0.0f64..1.0, v in 0.0f64..1.0, n in 1usize..=4) {
        let params = point(phase, u, v);
        let w = params.weights(BITS + 64);
        let brute = z_from_census(&enumerate_dwbc(n).unwrap(), &w.a, &w.b, &w.c, p());
        let det = partition_z(&params, n, p()).unwrap();
        prop_assert!(rel(&det, &brute) < 1e-40, "{phase} N={n}");
    }

    #[test]
    fn toda_holds_everywhere(phase in any_phase(), u in 0.0f64..1.0, v in 0.0f64..1.0, n in 1usize..=6) {
        let r = toda_residual(&point(phase, u, v), n, p()).unwrap();
        prop_assert!(r.residual < 1e-30, "{phase} N={n}: {}", r.residual.to_f64());
    }

    /// In FE and AF the determinant is also a lattice sum, which is a
    /// separate route to the same number. The truncated sum is accurate to
    /// `2^(-bits/2)`.
    #[test]
    fn discrete_sum_matches_determinant(af in any::<bool>(), u in 0.2f64..1.0, v in 0.0f64..1.0) {
        let phase = if af { Phase::AntiFerroelectric } else { Phase::Ferroelectric };
        let params = point(phase, u, v);
        let n = 3;
        let low = Precision::new(128).unwrap();
        let cutoff = sufficient_cutoff(&params, n, 128).unwrap();
        prop_assume!(cutoff < 60);
        let sum = tau_discrete_sum(&params, n, cutoff, low).unwrap();
        let det = tau_scaled(&params, n, low).unwrap().scaled_tau * c_n(n);
        prop_assert!(rel(&sum, &det) < 2f64.powi(-64), "{phase} cutoff {cutoff}");
    }

    #[test]
    fn af_geometry_is_ordered_and_consistent(u in 0.05f64..0.95, v in 0.0f64..1.0) {
        let params = point(Phase::AntiFerroelectric, u, v);
        let g = endpoints(&params, p()).unwrap();
        let [a, ap, bp, b] = g.endpoints_f64();
        prop_assert!(a < ap && ap < bp && bp < b);
        prop_assert!(chem_residual(&g, p()).unwrap().abs() < 1e-40);
        let (endpoint, closed) = dfdzeta(&params, p()).unwrap();
        prop_assert!(Float::with_val(BITS, &endpoint - &closed).abs() < 1e-40);
    }

    #[test]
    fn densities_are_normalised(phase in any_phase(), u in 0.1f64..0.9, v in 0.1f64..0.9) {
        let params = point(phase, u, v);
        let g = endpoints(&params, Precision::new(128).unwrap()).unwrap();
        let prof = density(&params, &g, 40).unwrap();
        prop_assert!((prof.mass - 1.0).abs() < 1e-8, "{phase}: {}", prof.mass);
        prop_assert!(prof.min_rho >= 0.0);
        prop_assert!(prof.max_excess < 1e-6);
        prop_assert!(prof.plateau_error < 1e-6);
    }
}

/// At small γ the AF free energy approaches the disordered one.
#[test]
fn af_reduces_to_disordered() {
    let mut prev = f64::INFINITY;
    for g in [0.8, 0.6, 0.4, 0.3] {
        let af = PhaseParams::from_f64(Phase::AntiFerroelectric, 0.1, g, BITS).unwrap();
        let d = PhaseParams::from_f64(Phase::Disordered, 0.1, g, BITS).unwrap();
        let gap = (bulk_f(&af, p()).unwrap().f - bulk_f(&d, p()).unwrap().f).abs().to_f64();
        assert!(gap < prev, "γ={g}: {gap}");
        prev = gap;
    }
    assert!(prev < 1e-12);
}
