use rayon::prelude::*;
use sixvertex_core::asymptotics::{
    bulk_f, chem_residual, density, dfdzeta, endpoints, ode_check, smooth_fit, spread_over, subleading_af_fit,
};
use sixvertex_core::exact::{c_n, laplace_moment_check, sufficient_cutoff, tau_discrete_sum, tau_scaled, tau_sequence, toda_residual};
use sixvertex_core::identities::identity_suite;
use sixvertex_core::oracle::{enumerate_dwbc, z_from_census};
use sixvertex_core::{Float, Phase, PhaseParams, Precision};

use crate::cli::CheckKind;
use crate::config::{decimal, RunConfig, Task};
use crate::table::{col, Cell, Table};
use crate::Failure;

/// A finished command: the table plus whether every check in it passed.
pub struct Report {
    pub table: Table,
    pub all_pass: bool,
}

impl From<Table> for Report {
    fn from(table: Table) -> Self {
        Report { table, all_pass: true }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, Failure> {
    match cfg.task {
        Task::Exact => exact(cfg).map(Report::from),
        Task::Check(kind) => check(cfg, kind),
        Task::Bulk => bulk(cfg).map(Report::from),
        Task::Density => density_cmd(cfg).map(Report::from),
        Task::Fit => fit(cfg).map(Report::from),
    }
}

/// Maps `f` over `items` on the worker pool. Results come back in input
/// order, and the first failure in that order is the one reported.
fn fan_out<T, R, F>(items: Vec<T>, f: F) -> Result<Vec<R>, Failure>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Result<R, Failure> + Sync + Send,
{
    let results: Vec<Result<R, Failure>> = items.into_par_iter().map(f).collect();
    results.into_iter().collect()
}

fn describe(table: &mut Table, params: &PhaseParams) {
    table.note("phase", params.phase().tag());
    table.note("t", params.t());
    table.note("gamma", params.gamma());
    if params.phase() != Phase::Ferroelectric {
        table.note("zeta", params.zeta());
    }
}

fn new_table(cfg: &RunConfig, columns: Vec<crate::table::Column>) -> Table {
    let mut table = Table::new(cfg.task.name(), columns, cfg.precision.decimal_digits());
    table.note("bits", cfg.bits());
    table
}

fn exact(cfg: &RunConfig) -> Result<Table, Failure> {
    let params = cfg.point()?;
    let (lo, hi) = cfg.require_n()?;
    let p = cfg.precision;
    let mut table = new_table(
        cfg,
        vec![
            col("n", "N"),
            col("log_tau_scaled", "log(tau_N/c_N)"),
            col("z_n", "Z_N = (ab)^(N^2) tau_N/c_N"),
            col("log_z_per_site", "log(Z_N)/N^2"),
            col("lost_bits", "bits lost to cancellation"),
        ],
    );
    describe(&mut table, &params);
    let w = params.weights(p.work());
    let log_ab = Float::with_val(p.work(), &w.a * &w.b).ln();
    let rows = fan_out((lo..=hi).collect(), |n| {
        let tau = tau_scaled(&params, n, p)?;
        let n2 = (n * n) as u32;
        let log_z = Float::with_val(p.work(), &log_ab * n2) + &tau.log_scaled;
        let per_site = Float::with_val(p.bits(), &log_z / n2);
        let z = Float::with_val(p.bits(), log_z.exp_ref());
        Ok(vec![
            n.into(),
            Float::with_val(p.bits(), &tau.log_scaled).into(),
            z.into(),
            per_site.into(),
            tau.lost_bits.into(),
        ])
    })?;
    table.rows = rows;
    Ok(table)
}

/// `2^(-e)` as an `f64`-free tolerance at the run precision.
fn pow2(p: Precision, e: i64) -> Float {
    Float::with_val(p.bits(), 1) << e as i32
}

struct CheckRow {
    case: String,
    residual: Float,
    tolerance: Float,
}

impl CheckRow {
    fn new(case: impl Into<String>, residual: Float, tolerance: Float) -> Self {
        CheckRow {
            case: case.into(),
            residual,
            tolerance,
        }
    }

    fn passed(&self) -> bool {
        !self.residual.is_nan() && self.residual <= self.tolerance
    }
}

fn point_label(params: &PhaseParams) -> String {
    format!(
        "{} t={} gamma={}",
        params.phase().tag(),
        params.t().to_f64(),
        params.gamma().to_f64()
    )
}

fn rel_diff(a: &Float, b: &Float, bits: u32) -> Float {
    let d = Float::with_val(bits, a - b).abs();
    d / Float::with_val(bits, b.abs_ref())
}

fn check(cfg: &RunConfig, kind: CheckKind) -> Result<Report, Failure> {
    let p = cfg.precision;
    let half = -(cfg.bits() as i64) / 2;
    let mut table = new_table(
        cfg,
        vec![
            col("check", ""),
            col("case", ""),
            col("residual", "measured residual"),
            col("tolerance", "pass iff residual <= tolerance"),
            col("pass", ""),
        ],
    );
    let rows: Vec<CheckRow> = match kind {
        CheckKind::Toda => {
            let params = cfg.point()?;
            describe(&mut table, &params);
            let (lo, hi) = cfg.require_n()?;
            // Half the order of the stencil truncation error 2^(-4 bits/5).
            let tol = pow2(p, -2 * cfg.bits() as i64 / 5);
            fan_out((lo..=hi).collect(), |n| {
                let r = toda_residual(&params, n, p)?;
                Ok(CheckRow::new(
                    format!("N={n} relative; step 2^-{}", r.step_log2),
                    r.residual,
                    tol.clone(),
                ))
            })?
        }
        CheckKind::Oracle => oracle_rows(cfg, &mut table)?,
        CheckKind::Identities => identity_suite(p)?
            .into_iter()
            .map(|c| CheckRow::new(c.name, c.residual, c.tolerance))
            .collect(),
        CheckKind::Laplace => {
            let params = cfg.point()?;
            describe(&mut table, &params);
            let i_max = 6;
            // Bounded by the quadrature target, not by the precision.
            let r = laplace_moment_check(&params, i_max, p)?;
            vec![CheckRow::new(
                format!("moments i<={i_max} absolute"),
                r,
                Float::with_val(p.bits(), 1e-10),
            )]
        }
        CheckKind::Dfdzeta => {
            let points = cfg.points()?;
            fan_out(points, |params| {
                let (endpoint, closed) = dfdzeta(&params, p)?;
                let tol = pow2(p, half);
                let r = Float::with_val(p.bits(), &endpoint - &closed).abs();
                Ok(CheckRow::new(format!("{} endpoint vs closed form", point_label(&params)), r, tol))
            })?
        }
        CheckKind::Chemb => {
            let points = cfg.points()?;
            let tol = pow2(p, half + 16);
            fan_out(points, |params| {
                let geom = endpoints(&params, p)?;
                let r = chem_residual(&geom, p)?.abs();
                Ok(CheckRow::new(point_label(&params), r, tol.clone()))
            })?
        }
        CheckKind::Ode => {
            let points = cfg.points()?;
            let n = cfg.n.map_or(6, |(_, hi)| hi);
            fan_out(points, |params| {
                let r = ode_check(&params, n, p)?;
                let (case, tol) = match params.phase() {
                    Phase::AntiFerroelectric => (format!("{} theta Ansatz N={n}", point_label(&params)), 1e-6),
                    _ => (format!("{} bulk f'' = e^(2f)", point_label(&params)), 1e-10),
                };
                Ok(CheckRow::new(case, r, Float::with_val(p.bits(), tol)))
            })?
        }
        CheckKind::Discrete => {
            let params = cfg.point()?;
            describe(&mut table, &params);
            let (lo, hi) = cfg.require_n()?;
            let tol = pow2(p, half);
            fan_out((lo..=hi).collect(), |n| {
                let cutoff = match cfg.cutoff {
                    Some(c) => c,
                    None => sufficient_cutoff(&params, n, cfg.bits())?,
                };
                let sum = tau_discrete_sum(&params, n, cutoff, p)?;
                let det = tau_scaled(&params, n, p)?.scaled_tau * c_n(n);
                let r = rel_diff(&sum, &det, p.work());
                Ok(CheckRow::new(format!("N={n} relative; cutoff {cutoff}"), r, tol.clone()))
            })?
        }
    };
    let mut passed = 0;
    for r in &rows {
        let ok = r.passed();
        passed += ok as usize;
        table.push(vec![
            kind.name().into(),
            r.case.clone().into(),
            Float::with_val(p.bits(), &r.residual).into(),
            Float::with_val(p.bits(), &r.tolerance).into(),
            ok.into(),
        ]);
    }
    table.note("checks", rows.len());
    table.note("passed", passed);
    Ok(Report {
        table,
        all_pass: passed == rows.len(),
    })
}

const ORACLE_MAX_N: usize = 6;

fn oracle_rows(cfg: &RunConfig, table: &mut Table) -> Result<Vec<CheckRow>, Failure> {
    let p = cfg.precision;
    let bits = cfg.bits();
    let points = if cfg.has_point() {
        let params = cfg.point()?;
        describe(table, &params);
        vec![params]
    } else {
        [
            (Phase::Ferroelectric, "1.6", "0.4"),
            (Phase::Disordered, "0.3", "1"),
            (Phase::AntiFerroelectric, "0.3", "1"),
        ]
        .into_iter()
        .map(|(phase, t, g)| PhaseParams::new(phase, decimal(t, bits), decimal(g, bits)))
        .collect::<Result<_, _>>()?
    };
    let (lo, hi) = cfg.n.unwrap_or((1, 5));
    if hi > ORACLE_MAX_N {
        return Err(Failure::Input(format!(
            "enumeration is limited to N <= {ORACLE_MAX_N}, got N = {hi}"
        )));
    }
    let tol = pow2(p, -(bits as i64) / 2);
    let censuses = fan_out((lo..=hi).collect(), |n| Ok(enumerate_dwbc(n)?))?;
    let jobs: Vec<(usize, &PhaseParams)> = censuses
        .iter()
        .enumerate()
        .flat_map(|(i, _)| points.iter().map(move |pp| (i, pp)))
        .collect();
    fan_out(jobs, |(i, params)| {
        let census = &censuses[i];
        let w = params.weights(p.work());
        let brute = z_from_census(census, &w.a, &w.b, &w.c, p);
        let det = sixvertex_core::exact::partition_z(params, census.n, p)?;
        Ok(CheckRow::new(
            format!("{} N={} relative; {} configurations", point_label(params), census.n, census.config_count),
            rel_diff(&det, &brute, p.work()),
            tol.clone(),
        ))
    })
}

fn bulk(cfg: &RunConfig) -> Result<Table, Failure> {
    let p = cfg.precision;
    let mut table = new_table(
        cfg,
        vec![
            col("gamma", ""),
            col("t", ""),
            col("zeta", "t/gamma"),
            col("f", "lim log(tau_N/c_N)/N^2"),
            col("F", "-log(ab) - f (free energy per site)"),
            col("z_limit", "lim Z_N^(1/N^2)"),
            col("alpha", "support left endpoint"),
            col("alpha_prime", "saturated band left end (AF)"),
            col("beta_prime", "saturated band right end (AF)"),
            col("beta", "support right endpoint"),
        ],
    );
    let points = cfg.points()?;
    table.note("phase", points[0].phase().tag());
    table.note("points", points.len());
    table.rows = fan_out(points, |params| {
        let fe = bulk_f(&params, p)?;
        let geom = endpoints(&params, p)?;
        let zeta: Cell = match params.phase() {
            Phase::Ferroelectric => Cell::Empty,
            _ => params.zeta().into(),
        };
        Ok(vec![
            params.gamma().into(),
            params.t().into(),
            zeta,
            fe.f.into(),
            fe.big_f.into(),
            fe.z_limit.into(),
            geom.alpha.into(),
            geom.alpha_prime.into(),
            geom.beta_prime.into(),
            geom.beta.into(),
        ])
    })?;
    Ok(table)
}

fn density_cmd(cfg: &RunConfig) -> Result<Table, Failure> {
    let params = cfg.point()?;
    let geom = endpoints(&params, cfg.precision)?;
    let prof = density(&params, &geom, cfg.grid)?;
    let mut table = new_table(
        cfg,
        vec![
            col("mu", ""),
            col("rho", "saddle-point density (unit mass)"),
            col("saturated", "mu inside a saturated interval"),
        ],
    );
    describe(&mut table, &params);
    let (a, b) = geom.support();
    table.note("support_left", a);
    table.note("support_right", b);
    for (i, (lo, hi)) in prof.saturated.iter().enumerate() {
        table.note(format!("saturated_{i}"), format!("[{lo:.16e}, {hi:.16e}]"));
    }
    table.note("saturation_bound", prof.bound);
    table.note("mass", prof.mass);
    table.note("min_rho", prof.min_rho);
    table.note("max_excess", prof.max_excess);
    table.note("plateau_error", prof.plateau_error);
    for &(mu, rho) in &prof.grid {
        let sat = prof.saturated.iter().any(|&(lo, hi)| lo <= mu && mu <= hi);
        table.push(vec![mu.into(), rho.into(), sat.into()]);
    }
    Ok(table)
}

fn fit(cfg: &RunConfig) -> Result<Table, Failure> {
    let params = cfg.point()?;
    let (lo, hi) = cfg.require_n()?;
    let p = cfg.precision;
    if params.phase() == Phase::Ferroelectric {
        return Err(Failure::Input(
            "`fit` is defined in the AF (theta-modulated ratios) and D (power fit) phases".into(),
        ));
    }
    // One shared derivative table is cheaper than a pool of independent
    // determinants here.
    let taus = tau_sequence(&params, lo, hi, p)?;
    match params.phase() {
        Phase::AntiFerroelectric => {
            let fit = subleading_af_fit(&taus, p)?;
            let mut table = new_table(
                cfg,
                vec![
                    col("n", "N"),
                    col("r_n", "log(tau_N/c_N) - N^2 f - log theta4(pi(1+zeta)N/2; q)"),
                    col("control", "log(tau_N/c_N) - N^2 f"),
                ],
            );
            describe(&mut table, &params);
            for ((n, r), c) in fit.ns.iter().zip(&fit.ratios).zip(&fit.control) {
                table.push(vec![(*n).into(), r.into(), c.into()]);
            }
            let mid = (lo + hi) / 2;
            table.note("spread_lower_half", spread_over(&fit.ns, &fit.ratios, lo, mid));
            table.note("spread_upper_half", fit.spread);
            table.note("control_spread_upper_half", fit.control_spread);
            table.note("log_c", fit.log_c);
            Ok(table)
        }
        Phase::Disordered => {
            let fit = smooth_fit(&taus, p)?;
            let mut table = new_table(
                cfg,
                vec![col("n", "N"), col("r_n", "log(tau_N/c_N) - N^2 f")],
            );
            describe(&mut table, &params);
            for (n, r) in fit.ns.iter().zip(&fit.residuals) {
                table.push(vec![(*n).into(), (*r).into()]);
            }
            table.note("kappa", fit.kappa);
            table.note("kappa_stderr", fit.kappa_stderr);
            table.note("constant", fit.constant);
            let wmax = fit.window_kappas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let wmin = fit.window_kappas.iter().copied().fold(f64::INFINITY, f64::min);
            table.note("window_kappa_spread", wmax - wmin);
            Ok(table)
        }
        Phase::Ferroelectric => unreachable!("rejected above"),
    }
}
