//! The studies behind each subcommand, grouped by acceptance criterion.

use crate::config::ExperimentConfig;
use crate::output::{num, Output};
use crate::summary::Check;
use crate::CliError;
use blackstock_core::model::{characteristic_roots, derive_params, logspace, stability_margin, ModelParams};
use blackstock_core::nonlinear_box::{
    contraction_scan, convolution_check, gap_richardson, nonlinearity_f, small_data_run, weighted_convolution,
    NonlinearConfig, TorusData,
};
use blackstock_core::phase_solver::{evolve_mode, kernels_at, ode_oracle, viscoelastic_kernels};
use blackstock_core::presets::*;
use blackstock_core::singular_limits::{
    energy_certificate_check, first_order_rate_study, second_order_rate_study, viscous_limit_study, Forcing,
    SweepConfig, MARGIN_TOL,
};
use blackstock_core::spectral_norms::{
    fit_power_law, kuznetsov_gap, low_dim_growth, multiplier_norm, optimality_probe, profile_error_norm,
    solution_norms, GaussianData, RadialGrid, ThirdDatum,
};
use blackstock_core::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub limit: Duration,
}

const fn criterion(id: u8, title: &'static str, secs: u64) -> Criterion {
    Criterion {
        id,
        title,
        limit: Duration::from_secs(secs),
    }
}

pub const CRITERIA: [Criterion; 12] = [
    criterion(1, "root correctness", 5),
    criterion(2, "kernel-oracle equivalence", 30),
    criterion(3, "multiplier-norm laws", 60),
    criterion(4, "optimal decay and growth", 120),
    criterion(5, "profile refinement", 60),
    criterion(6, "Kuznetsov comparison", 60),
    criterion(7, "singular limit, first order", 120),
    criterion(8, "singular limit, second order", 180),
    criterion(9, "energy certificates", 30),
    criterion(10, "viscoelastic kernel identities", 5),
    criterion(11, "nonlinear structure", 300),
    criterion(12, "viscous limit", 120),
];

pub const SLOPE_L2: &str = "singular-limit slope L2";
pub const SLOPE_ENERGY: &str = "singular-limit slope energy";
pub const SLOPE_LINF: &str = "singular-limit slope Linf";
pub const REMAINDER_SLOPE: &str = "second-order remainder slope L2";

/// Hard checks whose bands are not met on smooth data: the measured κ-rates are
/// the integer exponents 1 and 2. See the README for the analysis.
pub const KNOWN_UNATTAINABLE: [&str; 4] = [SLOPE_L2, SLOPE_ENERGY, SLOPE_LINF, REMAINDER_SLOPE];

/// Everything a study needs: the validated configuration and where to write.
pub struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub params: ModelParams,
    pub out: &'a Output,
}

impl<'a> Ctx<'a> {
    pub fn new(cfg: &'a ExperimentConfig, out: &'a Output) -> Result<Self, CliError> {
        Ok(Self {
            cfg,
            params: cfg.params()?,
            out,
        })
    }

    fn grid(&self, n: usize) -> Result<RadialGrid, CliError> {
        Ok(RadialGrid::new(n, self.cfg.grid.into())?)
    }

    fn data(&self, n: usize, preset: [(f64, f64); 3]) -> Result<GaussianData, CliError> {
        let terms = self.cfg.data.map_or(preset, |d| d.terms());
        Ok(GaussianData::single(n, terms)?)
    }

    fn dims(&self, default: &[usize]) -> Vec<usize> {
        self.cfg.n.map_or_else(|| default.to_vec(), |n| vec![n])
    }

    /// `{0}` followed by the singular-limit time window.
    fn limit_times(&self) -> Result<Vec<f64>, CliError> {
        let mut t = vec![0.0];
        t.extend(self.cfg.window(1e-2, 1e3, 40)?);
        Ok(t)
    }

    fn sweep_config(&self) -> Result<SweepConfig, CliError> {
        Ok(SweepConfig {
            t_grid: self.limit_times()?,
            grid: self.cfg.grid.into(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub criterion: Criterion,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl CriterionOutcome {
    pub fn runtime_check(&self) -> Check {
        Check::at_most(
            format!("criterion {} runtime [s]", self.criterion.id),
            self.elapsed.as_secs_f64(),
            self.criterion.limit.as_secs_f64(),
        )
    }

    pub fn passed(&self) -> bool {
        self.runtime_check().pass && self.checks.iter().all(|c| c.advisory || c.pass)
    }

    /// Failed hard checks that are not on the known-unattainable list.
    pub fn unexpected_failures(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.advisory && !c.pass && !KNOWN_UNATTAINABLE.contains(&c.name.as_str()))
            .map(|c| format!("{} = {} (expected {})", c.name, c.measured, c.expected))
            .collect();
        let rt = self.runtime_check();
        if !rt.pass {
            v.push(format!("{} = {:.1}", rt.name, rt.measured));
        }
        v
    }

    /// One PASS/FAIL line with the hard checks' measurements.
    pub fn line(&self) -> String {
        let hard: Vec<&Check> = self.checks.iter().filter(|c| !c.advisory).collect();
        let shown: Vec<String> = hard
            .iter()
            .filter(|c| hard.len() <= 6 || !c.pass)
            .map(|c| format!("{}={:.4e}{}", c.name, c.measured, if c.pass { "" } else { "(!)" }))
            .collect();
        let body = if hard.len() <= 6 {
            shown.join(", ")
        } else {
            let passed = hard.iter().filter(|c| c.pass).count();
            let mut s = format!("{passed}/{} hard checks passed", hard.len());
            if !shown.is_empty() {
                s.push_str(&format!("; {}", shown.join(", ")));
            }
            s
        };
        format!(
            "{} criterion {:>2} {}: {body} [{:.1}s]",
            if self.passed() { "PASS" } else { "FAIL" },
            self.criterion.id,
            self.criterion.title,
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn evaluate(id: u8, ctx: &Ctx<'_>) -> Result<CriterionOutcome, CliError> {
    let criterion = CRITERIA
        .iter()
        .copied()
        .find(|c| c.id == id)
        .ok_or_else(|| CliError::Config(format!("no criterion {id}")))?;
    let start = Instant::now();
    let checks = match id {
        1 => roots(ctx)?,
        2 => kernel_oracle(ctx)?,
        3 => multiplier_laws(ctx)?,
        4 => optimal_decay(ctx)?,
        5 => profiles(ctx)?,
        6 => kuznetsov(ctx)?,
        7 => singular_limit(ctx)?,
        8 => second_order(ctx)?,
        9 => energy_cert(ctx)?,
        10 => viscoelastic(ctx)?,
        11 => nonlinear(ctx)?,
        _ => viscous_limit(ctx)?,
    };
    Ok(CriterionOutcome {
        criterion,
        checks,
        elapsed: start.elapsed(),
    })
}

fn random_params(seed: u64, count: usize) -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let kappa = 10f64.powf(rng.gen_range(-4.0..-1.0));
            let b = rng.gen_range(0.5..2.0);
            let nu = 10f64.powf(rng.gen_range(-1.0..1.0));
            let gamma = rng.gen_range(1.01..=5.0 / 3.0);
            let c0 = rng.gen_range(0.5..2.0);
            derive_params(kappa, b, nu, gamma, c0, false).expect("sampled inside the admissible box")
        })
        .collect()
}

/// Worst scaled residual and Vieta defect over a frequency grid.
fn root_contract(p: &ModelParams, r_grid: &[f64]) -> Result<(f64, f64), CliError> {
    let mut res = 0.0f64;
    let mut vieta = 0.0f64;
    for &r in r_grid {
        let roots = characteristic_roots(p, r)?;
        let scale = 1f64.max(r.powi(4));
        res = roots.residuals().iter().fold(res, |a, v| a.max(v / scale));
        vieta = roots.vieta_defects().iter().fold(vieta, |a, v| a.max(*v));
    }
    Ok((res, vieta))
}

pub fn roots(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let r_grid = logspace(1e-4, 1e3, 1000);
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in &r_grid {
        let roots = characteristic_roots(&ctx.params, r)?;
        let res = roots.residuals().iter().fold(0.0f64, |a, v| a.max(*v));
        let vieta = roots.vieta_defects().iter().fold(0.0f64, |a, v| a.max(*v));
        let mut row = vec![r];
        for z in roots.roots {
            row.extend([z.re, z.im]);
        }
        row.extend([res, vieta]);
        rows.push(row);
    }
    ctx.out.numeric(
        "roots",
        &["r", "re1", "im1", "re2", "im2", "re3", "im3", "residual", "vieta"],
        &rows,
        false,
    )?;
    let mut sets = vec![ctx.params.with_inviscid(false)];
    sets.extend(random_params(ctx.cfg.sweep.seed, ctx.cfg.sweep.random_sets));
    let per_set: Vec<[f64; 4]> = sets
        .par_iter()
        .map(|p| -> Result<[f64; 4], CliError> {
            let inv = p.with_inviscid(true);
            let (r1, v1) = root_contract(p, &r_grid)?;
            let (r2, v2) = root_contract(&inv, &r_grid)?;
            Ok([
                r1.max(r2),
                v1.max(v2),
                stability_margin(p, &r_grid)?,
                stability_margin(&inv, &r_grid)?,
            ])
        })
        .collect::<Result<_, _>>()?;
    let worst = |j: usize| per_set.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        Check::at_most("root residual / max(1, r^4)", worst(0), 1e-10),
        Check::at_most("Vieta relative defect", worst(1), 1e-10),
        Check::below("stability margin (viscous)", worst(2), 0.0),
        Check::below("stability margin (inviscid)", worst(3), 0.0),
        Check::report("stability margin of configured parameters", per_set[0][2]),
    ])
}

pub fn kernel_oracle(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let p = ctx.params;
    let r_grid = logspace(1e-3, 10.0, 16);
    let times = [0.0, 0.1, 1.0, 10.0, 50.0];
    let per_r: Vec<(f64, Vec<Vec<f64>>)> = r_grid
        .par_iter()
        .map(|&r| -> Result<_, CliError> {
            let roots = characteristic_roots(&p, r)?;
            let k0 = kernels_at(&roots, 0.0)?;
            let mut identity = 0.0f64;
            for (i, m) in [k0.k, k0.dk, k0.d2k].iter().enumerate() {
                for (j, v) in m.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    identity = identity.max((v - want).norm());
                }
            }
            let mut rows = Vec::new();
            for j in 0..3 {
                let mut e = [C::new(0.0, 0.0); 3];
                e[j] = C::new(1.0, 0.0);
                let oracle = ode_oracle(&p, e, None, r, &times)?;
                for (t, want) in times.iter().zip(&oracle).skip(1) {
                    let got = evolve_mode(&p, e, r, *t)?;
                    let diff = got.iter().zip(want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                    let size = want.iter().map(|b| b.norm()).fold(0.0, f64::max);
                    rows.push(vec![r, *t, j as f64, got[0].re, want[0].re, diff / size]);
                }
            }
            Ok((identity, rows))
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<f64>> = per_r.iter().flat_map(|(_, r)| r.iter().cloned()).collect();
    ctx.out.numeric(
        "kernels",
        &["r", "t", "kernel", "value", "oracle", "rel_error"],
        &rows,
        false,
    )?;
    let rel = rows.iter().map(|r| r[5]).fold(0.0, f64::max);
    let identity = per_r.iter().map(|(i, _)| *i).fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("kernel vs ODE oracle relative error", rel, 1e-6),
        Check::at_most("kernel initial-value identity defect", identity, 1e-10),
    ])
}

pub fn viscoelastic(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let mut mus = vec![0.3, 5.0];
    if ctx.params.bnu() > 0.0 {
        mus.insert(0, ctx.params.bnu());
    }
    let times = [1e-3, 0.5, 2.0, 40.0];
    let mut rows = Vec::new();
    let mut initial = 0.0f64;
    let mut identity = 0.0f64;
    for &mu in &mus {
        let rc = 2.0 / mu;
        let mut rs = logspace(1e-3, 300.0, 25);
        rs.extend([rc * (1.0 - 1e-9), rc, rc * (1.0 + 1e-9)]);
        for &r in &rs {
            let k = viscoelastic_kernels(mu, r, 0.0)?;
            initial = [k.g0 - 1.0, k.g1, k.dg0, k.dg1 - 1.0]
                .iter()
                .fold(initial, |a, v| a.max(v.abs()));
            for &t in &times {
                let k = viscoelastic_kernels(mu, r, t)?;
                let rhs = -r * r * k.g1;
                let size = rhs.abs().max(k.dg0.abs());
                let defect = if size == 0.0 { 0.0 } else { (k.dg0 - rhs).abs() / size };
                identity = identity.max(defect);
                rows.push(vec![mu, r, t, k.g0, k.g1, k.dg0, k.dg1, defect]);
            }
        }
    }
    ctx.out.numeric(
        "viscoelastic",
        &["mu", "r", "t", "g0", "g1", "dg0", "dg1", "defect"],
        &rows,
        false,
    )?;
    Ok(vec![
        Check::at_most("viscoelastic initial values defect", initial, 1e-10),
        Check::at_most("dG0/dt = -r^2 G1 relative defect", identity, 1e-10),
    ])
}

pub fn multiplier_laws(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let times = ctx.cfg.window(1e2, 1e5, 10)?;
    let mut checks = Vec::new();
    for n in ctx.dims(&[1, 2, 3, 4, 5, 6]) {
        let grid = ctx.grid(n)?;
        for (k, (name, family, c)) in FAMILIES.iter().enumerate() {
            if matches!(family, blackstock_core::spectral_norms::MultiplierFamily::Inverse) && n < 3 {
                continue;
            }
            let samples: Vec<(f64, f64)> = times
                .iter()
                .map(|t| Ok((*t, multiplier_norm(*family, n, *c, *t, &grid)?)))
                .collect::<Result<_, CliError>>()?;
            let rows: Vec<Vec<f64>> = samples
                .iter()
                .map(|(t, y)| {
                    let law = family.law(n, *t);
                    vec![*t, *y, law, y / law]
                })
                .collect();
            ctx.out.numeric(
                &format!("multiplier_{name}_n{n}"),
                &["t", "value", "bound", "ratio"],
                &rows,
                true,
            )?;
            let (lo, hi) = rows
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r[3]), hi.max(r[3])));
            match LEMMA_BANDS.get(k).and_then(|b| b.get(n - 1)).copied().flatten() {
                Some((blo, bhi)) => {
                    checks.push(Check::band(format!("{name} n={n} ratio min"), lo, blo, bhi));
                    checks.push(Check::band(format!("{name} n={n} ratio max"), hi, blo, bhi));
                }
                None => checks.push(Check::report(format!("{name} n={n} ratio max/min"), hi / lo)),
            }
            if let Some(e) = family.law_exponent(n) {
                let fit = fit_power_law(&samples, false)?;
                let c = Check::near(format!("{name} n={n} slope"), fit.slope, e, 0.03);
                checks.push(if n <= 6 { c } else { c.advisory() });
            }
        }
    }
    Ok(checks)
}

pub fn optimal_decay(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for n in ctx.dims(&[3, 4, 5, 6]) {
        let data = ctx.data(n, OPTIMAL_DATA)?;
        let grid = ctx.grid(n)?;
        if n <= 2 {
            let times = ctx.cfg.window(1e2, 1e4, 9)?;
            let g = low_dim_growth(&ctx.params, &data, n, &times, &grid)?;
            checks.push(Check::holds(format!("n={n} growth below bound"), g.passed).advisory());
            checks.push(Check::report(format!("n={n} growth slope"), g.fit.slope));
            continue;
        }
        let t_hi = if n == 3 { 1e4 } else { 1e5 };
        let times = ctx.cfg.window(1e2, t_hi, 10)?;
        let norms = solution_norms(&ctx.params, &data, n, &times, &grid, 2.0)?;
        let rows: Vec<Vec<f64>> = norms
            .iter()
            .map(|s| vec![s.t, s.psi, s.bound, s.psi / s.bound])
            .collect();
        ctx.out
            .numeric(&format!("decay_n{n}"), &["t", "value", "bound", "ratio"], &rows, true)?;
        let samples: Vec<(f64, f64)> = norms.iter().map(|s| (s.t, s.psi)).collect();
        let fit = fit_power_law(&samples, n == 4)?;
        let name = format!("decay n={n} slope");
        checks.push(match n {
            3 => Check::near(name, fit.slope, 0.5, 0.05),
            4 => Check::below(
                "decay n=4 |psi|^2/ln t spread",
                fit.log_ratio_spread().unwrap_or(f64::INFINITY),
                10.0,
            ),
            5 => Check::near(name, fit.slope, -0.25, 0.05),
            6 => Check::near(name, fit.slope, -0.5, 0.05),
            _ => Check::report(name, fit.slope),
        });
    }
    Ok(checks)
}

pub fn profiles(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let n = ctx.cfg.n.unwrap_or(5);
    let data = ctx.data(n, PROFILE_DATA)?;
    let times = ctx.cfg.window(1e2, 1e5, 10)?;
    let rows = profile_error_norm(&ctx.params, &data, n, &times, &ctx.grid(n)?)?;
    let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.t, r.error, r.solution, r.ratio]).collect();
    ctx.out.numeric(
        &format!("profiles_n{n}"),
        &["t", "error", "solution", "ratio"],
        &table,
        true,
    )?;
    let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.error)).collect();
    let fit = fit_power_law(&samples, false)?;
    let slope = Check::near(format!("profile error n={n} slope"), fit.slope, -0.75, 0.10);
    Ok(vec![
        if n == 5 { slope } else { slope.advisory() },
        Check::holds(
            "error/solution ratio decreasing",
            rows.windows(2).all(|w| w[1].ratio < w[0].ratio),
        ),
    ])
}

pub fn optimality(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let n = ctx.cfg.n.unwrap_or(5);
    let data = ctx.data(n, [(1.0, 1.0), (0.5, 0.8), (-0.3, 1.2)])?;
    let times = ctx.cfg.window(1e3, 1e5, 9)?;
    let ledger = optimality_probe(&ctx.params, &data, n, &times, &ctx.grid(n)?)?;
    let rows: Vec<Vec<f64>> = ledger
        .rows
        .iter()
        .map(|r| vec![r.t, r.profile_term, r.correction, r.difference, r.solution, r.ratio])
        .collect();
    ctx.out.numeric(
        &format!("optimality_n{n}"),
        &["t", "profile_term", "correction", "difference", "solution", "ratio"],
        &rows,
        true,
    )?;
    let (lo, hi) = ledger.rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.ratio), hi.max(r.ratio))
    });
    Ok(vec![
        Check::band(format!("optimality n={n} ratio min"), lo, 0.05, 20.0).advisory(),
        Check::band(format!("optimality n={n} ratio max"), hi, 0.05, 20.0).advisory(),
        Check::report(format!("optimality n={n} onset time"), ledger.onset.unwrap_or(f64::NAN)),
    ])
}

pub fn kuznetsov(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let (c0, c1) = ctx.cfg.data.map_or((1.0, 1.0), |d| (d.kuznetsov_c0, d.kuznetsov_c1));
    let times = ctx.cfg.window(1e2, 1e5, 10)?;
    let mut checks = Vec::new();
    for n in ctx.dims(&[1, 3]) {
        let data = ctx
            .data(n, KUZNETSOV_DATA)?
            .with_third(ThirdDatum::Laplacian { c0, c1 });
        let rows = kuznetsov_gap(&ctx.params, &data, n, &times, &ctx.grid(n)?)?;
        let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.t, r.gap, r.normalized, r.law]).collect();
        ctx.out.numeric(
            &format!("kuznetsov_gap_n{n}"),
            &["t", "gap", "normalized", "law"],
            &table,
            true,
        )?;
        let samples: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.normalized)).collect();
        let fit = fit_power_law(&samples, false)?;
        let name = format!("Kuznetsov gap n={n} slope");
        checks.push(match n {
            1 => Check::near(name, fit.slope, -0.75, 0.10),
            3 => Check::near(name, fit.slope, -0.5, 0.10),
            _ => Check::report(name, fit.slope),
        });
    }
    Ok(checks)
}

fn limit_data_for(ctx: &Ctx<'_>, n: usize) -> Result<GaussianData, CliError> {
    match ctx.cfg.data {
        None => Ok(limit_data(n, &ctx.params)),
        Some(d) => {
            let data = GaussianData::single(n, d.terms())?;
            Ok(if d.consistent {
                data.with_third(ThirdDatum::Laplacian {
                    c0: 1.0,
                    c1: ctx.params.bnu(),
                })
            } else {
                data
            })
        }
    }
}

fn with_slope_row(mut rows: Vec<Vec<String>>, slopes: &[f64]) -> Vec<Vec<String>> {
    let mut last = vec!["slope".to_string()];
    last.extend(slopes.iter().map(|s| num(*s)));
    rows.push(last);
    rows
}

pub fn singular_limit(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let n = ctx.cfg.n.unwrap_or(3);
    let data = limit_data_for(ctx, n)?;
    let s = first_order_rate_study(&data, &ctx.params, n, &ctx.cfg.sweep.kappa_list, &ctx.sweep_config()?)?;
    let rows: Vec<Vec<String>> = s
        .sweep
        .rows
        .iter()
        .map(|r| {
            [
                r.kappa,
                r.u_l2.value,
                r.u_linf.value,
                r.energy_l2.value,
                r.ut_l2.value,
                r.ut_linf.value,
                r.energy_linf.value,
            ]
            .iter()
            .map(|v| num(*v))
            .collect()
        })
        .collect();
    let fits = [s.u_l2, s.u_linf, s.energy_l2, s.ut_l2, s.ut_linf, s.energy_linf];
    let slopes: Vec<f64> = fits.iter().map(|f| f.slope).collect();
    ctx.out.table(
        "singular_limit",
        &[
            "kappa",
            "error_l2",
            "error_linf",
            "error_energy",
            "error_t_l2",
            "error_t_linf",
            "error_energy_linf",
        ],
        &with_slope_row(rows, &slopes),
        true,
    )?;
    Ok(vec![
        Check::near(SLOPE_L2, s.u_l2.slope, 0.5, 0.05),
        Check::near(SLOPE_ENERGY, s.energy_l2.slope, 0.5, 0.05),
        Check::near(SLOPE_LINF, s.u_linf.slope, 0.5, 0.05),
        Check::report("singular-limit slope of d/dt error L2", s.ut_l2.slope),
        Check::report("singular-limit slope of d/dt error Linf", s.ut_linf.slope),
        Check::report("singular-limit slope energy Linf", s.energy_linf.slope),
        Check::holds("suprema attained inside the time grid", !s.sweep.edge_maximizer).advisory(),
    ])
}

pub fn second_order(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let n = ctx.cfg.n.unwrap_or(3);
    let data = limit_data_for(ctx, n)?;
    let s = second_order_rate_study(&data, &ctx.params, n, &ctx.cfg.sweep.kappa_list, &ctx.sweep_config()?)?;
    let rows: Vec<Vec<String>> = s
        .sweep
        .rows
        .iter()
        .zip(&s.ratio)
        .map(|(r, q)| {
            [r.kappa, r.remainder_l2.value, r.remainder_linf.value, r.u_l2.value, *q]
                .iter()
                .map(|v| num(*v))
                .collect()
        })
        .collect();
    let slopes = [
        s.remainder_l2.slope,
        s.remainder_linf.slope,
        f64::NAN,
        s.ratio_fit.slope,
    ];
    ctx.out.table(
        "second_order",
        &["kappa", "remainder_l2", "remainder_linf", "first_order_l2", "ratio"],
        &with_slope_row(rows, &slopes),
        true,
    )?;
    Ok(vec![
        Check::near(REMAINDER_SLOPE, s.remainder_l2.slope, 1.5, 0.10),
        Check::near("second-order remainder slope Linf", s.remainder_linf.slope, 1.5, 0.10).advisory(),
        Check::near("second/first error ratio slope", s.ratio_fit.slope, 1.0, 0.10),
    ])
}

pub fn energy_cert(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let times = certificate_time_grid();
    let forcings = [
        (1.0, Forcing::None),
        (0.0, Forcing::LimitSource { psi0: 1.0, psi1: 0.5 }),
    ];
    let mut cases = Vec::new();
    for kappa in CERT_KAPPA {
        for r in CERT_R {
            for k1 in CERT_K1 {
                for (f, forcing) in forcings.iter().enumerate() {
                    cases.push((kappa, r, k1, f, *forcing));
                }
            }
        }
    }
    let results = cases
        .par_iter()
        .map(|&(kappa, r, k1, _, (u2, forcing))| {
            let p = ctx.params.with_kappa(kappa)?;
            let c = energy_certificate_check(&p, u2, forcing, r, &times, k1)?;
            let k = c.constants;
            let constants_ok = k.k2 > 0.0 && k.k3 > 0.0 && k.k5 >= k.k5_floor(&p, r) * (1.0 - 1e-12);
            Ok((c, constants_ok))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut rows = Vec::new();
    for ((kappa, r, k1, f, _), (c, _)) in cases.iter().zip(&results) {
        for row in &c.rows {
            rows.push(vec![
                *kappa,
                *r,
                *k1,
                *f as f64,
                row.t,
                row.energy_lhs,
                row.energy_rhs,
                row.potential_lhs,
                row.potential_rhs,
            ]);
        }
    }
    ctx.out.numeric(
        "energy_certificate",
        &[
            "kappa",
            "r",
            "k1",
            "forcing",
            "t",
            "energy_lhs",
            "energy_rhs",
            "potential_lhs",
            "potential_rhs",
        ],
        &rows,
        false,
    )?;
    let worst = results
        .iter()
        .map(|(c, _)| c.worst_scaled_margin())
        .fold(f64::INFINITY, f64::min);
    let held = results.iter().filter(|(c, _)| c.holds()).count() as f64;
    Ok(vec![
        Check::at_least("certificate worst scaled margin", worst, -MARGIN_TOL),
        Check::band("certified trajectories", held, cases.len() as f64, cases.len() as f64),
        Check::holds("multiplier constants admissible", results.iter().all(|(_, ok)| *ok)),
    ])
}

pub fn viscous_limit(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let n = ctx.cfg.n.unwrap_or(3);
    let data = ctx.data(n, VISCOUS_DATA)?;
    let p = ctx.params.with_kappa(ctx.cfg.sweep.viscous_kappa)?;
    let s = viscous_limit_study(&data, &p, n, &ctx.cfg.sweep.epsbar_list, &ctx.sweep_config()?)?;
    let rows: Vec<Vec<String>> = s
        .rows
        .iter()
        .map(|r| {
            [r.epsbar, r.l2.value, r.linf.value, r.dt_linf.value]
                .iter()
                .map(|v| num(*v))
                .collect()
        })
        .collect();
    ctx.out.table(
        "viscous_limit",
        &["epsbar", "error_l2", "error_linf", "error_t_linf"],
        &with_slope_row(rows, &[f64::NAN, s.fit.slope, f64::NAN]),
        true,
    )?;
    Ok(vec![
        Check::at_least("viscous-limit slope", s.fit.slope, 0.8),
        Check::holds("viscous-limit errors monotone", s.monotone).advisory(),
    ])
}

pub fn nonlinear(ctx: &Ctx<'_>) -> Result<Vec<Check>, CliError> {
    let nb = ctx.cfg.nonlinear;
    let nc = nb.core();
    let p = ctx.params;
    let grid = nc.grid()?;
    let reference = TorusData::reference(&grid);
    let mut checks = Vec::new();

    let base = reference.state();
    let f1 = grid.l2_norm(&nonlinearity_f(&grid, base.psi(), base.psi_t(), &p));
    let homogeneity = [1e-3, 0.37, 12.0]
        .iter()
        .map(|eps| {
            let s = reference.scaled(*eps).state();
            let fe = grid.l2_norm(&nonlinearity_f(&grid, s.psi(), s.psi_t(), &p));
            (fe - eps * eps * f1).abs() / (eps * eps * f1)
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("F homogeneity defect", homogeneity, 1e-12));

    let eps = nc.epsilon;
    let runs = contraction_scan(&reference, &p, &nc, &[eps, 2.0 * eps], nb.picard_iterations)?;
    let mut rows = Vec::new();
    for run in &runs {
        for (k, norm) in run.norms.iter().enumerate() {
            rows.push(vec![
                run.epsilon,
                k as f64,
                *norm,
                run.differences.get(k).copied().unwrap_or(f64::NAN),
            ]);
        }
    }
    ctx.out
        .numeric("picard", &["epsilon", "iteration", "norm", "difference"], &rows, false)?;
    checks.push(Check::below(
        "Picard worst difference ratio",
        runs[0].worst_ratio(),
        0.5,
    ));
    checks.push(Check::holds("Picard contracts", !runs[0].non_contraction));
    let q = runs[1].differences[0] / runs[0].differences[0];
    checks.push(Check::band("first correction growth under eps -> 2 eps", q, 3.6, 4.4));

    let times = logspace(1e-1, 1e5, 25);
    let mut conv_rows = Vec::new();
    for (a1, a2) in CONVOLUTION_PAIRS {
        let c = convolution_check(a1, a2, &times)?;
        for (t, r) in times.iter().zip(&c.ratios) {
            conv_rows.push(vec![a1, a2, *t, *r]);
        }
        let tail = &c.ratios[c.ratios.len() - 5..];
        let settled = tail.iter().fold(f64::INFINITY, |a, r| a.min(*r)) / c.constant;
        let direct = midpoint_convolution(50.0, a1, a2);
        let quad = weighted_convolution(50.0, a1, a2)?;
        checks.push(Check::band(
            format!("convolution ({a1}, {a2}) constant"),
            c.constant,
            0.0,
            10.0,
        ));
        checks.push(Check::at_least(
            format!("convolution ({a1}, {a2}) tail / constant"),
            settled,
            0.2,
        ));
        checks.push(Check::at_most(
            format!("convolution ({a1}, {a2}) quadrature vs midpoint"),
            (quad - direct).abs() / quad,
            1e-8,
        ));
    }
    ctx.out
        .numeric("convolution", &["a1", "a2", "t", "ratio"], &conv_rows, true)?;

    let long = NonlinearConfig {
        t_end: nb.t_ledger,
        ..nc
    };
    let run = small_data_run(&reference.scaled(eps), &p, &long, nb.sample_every)?;
    let ledger: Vec<Vec<f64>> = run
        .rows
        .iter()
        .map(|r| vec![r.t, r.l2[0], r.l2[1], r.l2[2], r.sobolev, r.gap])
        .collect();
    ctx.out.numeric(
        "ledger",
        &["t", "psi_l2", "psi_t_l2", "psi_tt_l2", "psi_hs", "gap"],
        &ledger,
        false,
    )?;
    checks.push(Check::at_most("small-data envelope ratio", run.envelope_ratio, 2.0));
    let gr = gap_richardson(&reference, &p, &long)?;
    checks.push(Check::below("gap/eps^2 Richardson change", gr.relative_change(), 0.2));
    Ok(checks)
}

fn midpoint_convolution(t: f64, a1: f64, a2: f64) -> f64 {
    let n = 200_000;
    let h = t / n as f64;
    (0..n)
        .map(|i| {
            let s = (i as f64 + 0.5) * h;
            (1.0 + t - s).powf(-a1) * (1.0 + s).powf(-a2) * h
        })
        .sum()
}
