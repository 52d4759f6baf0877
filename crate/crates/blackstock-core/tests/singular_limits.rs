mod common;

use blackstock_core::model::{logspace, ModelParams};
use blackstock_core::singular_limits::*;
use blackstock_core::spectral_norms::{GaussianData, RadialGrid, Zone};
use common::*;
use std::f64::consts::PI;

#[test]
fn certificate_matrix_holds() {
    let tg = certificate_time_grid();
    for kappa in CERT_KAPPA {
        let p = ModelParams::default().with_kappa(kappa).unwrap();
        for r in CERT_R {
            for k1 in CERT_K1 {
                for (u2, f) in [
                    (1.0, Forcing::None),
                    (0.0, Forcing::LimitSource { psi0: 1.0, psi1: 0.5 }),
                ] {
                    let c = energy_certificate_check(&p, u2, f, r, &tg, k1).unwrap();
                    assert!(
                        c.holds(),
                        "κ={kappa} r={r} k₁={k1} {f:?}: first violation {:?}",
                        c.first_violation()
                    );
                    let k = c.constants;
                    assert!(k.k2 > 0.0 && k.k3 > 0.0 && k.k5 >= k.k5_floor(&p, r) * (1.0 - 1e-12));
                }
            }
        }
    }
}

#[test]
fn unforced_energy_is_tight_at_start() {
    let p = ModelParams::default();
    let c = energy_certificate_check(&p, 1.0, Forcing::None, 1.0, &certificate_time_grid(), 0.5).unwrap();
    let first = c.rows[0];
    assert!((first.energy_lhs - 1.0).abs() < 1e-12);
    assert!(c.rows[1..].iter().all(|row| row.energy_margin() > 0.0));
}

/// Radial inverse transform in ℝ³ against the Gaussian heat convolution.
#[test]
fn heat_layer_matches_physical_convolution() {
    let p = ModelParams::default();
    let d = GaussianData::single(3, [(0.8, 0.9), (-0.4, 1.3), (0.0, 1.0)]).unwrap();
    let g = RadialGrid::with_defaults(3).unwrap();
    let bnu = p.bnu();
    let heat = |a: f64, s: f64, z: f64, rho: f64, lap: bool| {
        let s2 = s * s + 2.0 * z;
        let amp = a * (s * s / s2).powf(1.5);
        let e = amp * (-0.5 * rho * rho / s2).exp();
        if lap {
            e * (rho * rho / (s2 * s2) - 3.0 / s2)
        } else {
            e
        }
    };
    for z in [0.0, 0.1, 1.0, 5.0] {
        for rho in [0.0, 0.5, 1.7, 4.0] {
            let got = (2.0 * PI).powf(-1.5)
                * g.integrate(Zone::All, |r| {
                    let sinc = if rho == 0.0 { 1.0 } else { (r * rho).sin() / (r * rho) };
                    [heat_layer(d.hat(0, r), d.hat(1, r), &p, r, z).unwrap() * sinc]
                })
                .unwrap()[0];
            let want = (p.gamma() - 1.0) * (heat(-0.4, 1.3, z, rho, false) - bnu * heat(0.8, 0.9, z, rho, true));
            assert!((got - want).abs() < 1e-10, "z={z} ρ={rho}: {got} vs {want}");
        }
    }
}

#[test]
fn limit_envelope_bound() {
    let p = ModelParams::default();
    let rs = logspace(1e-3, 1e2, 40);
    let ts = logspace(1e-2, 1e3, 40);
    let fit = limit_envelope_fit(1.0, 0.5, &p, &rs, &ts).unwrap();
    assert!(fit.c_rate > 0.0 && fit.c_const > 0.0 && fit.c_const < 10.0, "{fit:?}");
    for r in &rs {
        for t in &ts {
            let (v, _) = solve_limit_mode(1.0, 0.5, &p, *r, *t).unwrap();
            let env = (-fit.c_rate * r * r * t / (1.0 + r * r)).exp() * (r.powi(3) + 0.5 * r * r);
            assert!(r.powi(3) * v.abs() <= fit.c_const * env * (1.0 + 1e-12));
        }
    }
}

/// Measured κ-rates on smooth data are one order better than the theorems' √κ and κ√κ;
/// the frozen values below document that behaviour.
#[test]
fn kappa_rates_on_smooth_data() {
    let p = ModelParams::default();
    let d = limit_data(3, &p);
    let cfg = SweepConfig::default();
    let first = first_order_rate_study(&d, &p, 3, &default_kappa_sweep(), &cfg).unwrap();
    assert!(!first.sweep.edge_maximizer);
    for fit in [
        first.u_l2,
        first.ut_l2,
        first.energy_l2,
        first.u_linf,
        first.ut_linf,
        first.energy_linf,
    ] {
        assert!((fit.slope - 0.975).abs() < 0.05, "{fit:?}");
    }
    let second = second_order_rate_study(&d, &p, 3, &default_kappa_sweep(), &cfg).unwrap();
    for fit in [second.remainder_l2, second.remainder_linf] {
        assert!((fit.slope - 1.97).abs() < 0.05, "{fit:?}");
    }
    assert!((second.ratio_fit.slope - 1.0).abs() < 0.1);
    // no κ⁰ offset: the error vanishes with κ
    assert!(first.sweep.rows.last().unwrap().u_l2.value < 1e-3);
}

#[test]
fn short_time_grid_extends_once() {
    let p = ModelParams::default();
    let d = limit_data(3, &p);
    let cfg = SweepConfig {
        t_grid: logspace(1e-2, 0.5, 8),
        ..SweepConfig::default()
    };
    let s = first_order_rate_study(&d, &p, 3, &default_kappa_sweep(), &cfg).unwrap();
    assert_eq!(s.sweep.t_grid.len(), 13);
    assert!((s.sweep.t_grid.last().unwrap() - 5.0).abs() < 1e-9);
}

#[test]
fn viscous_limit_rate() {
    let p = ModelParams::default().with_kappa(VISCOUS_STUDY_KAPPA).unwrap();
    let d = GaussianData::single(3, VISCOUS_DATA).unwrap();
    let mut eps = vec![0.0];
    eps.extend(default_epsbar_sweep());
    let s = viscous_limit_study(&d, &p, 3, &eps, &SweepConfig::default()).unwrap();
    assert_eq!(s.rows[0].linf.value, 0.0);
    assert!(s.monotone);
    assert!(s.fit.slope >= 0.8, "{:?}", s.fit);
    let low = viscous_limit_study(&d, &p, 3, &logspace(1e-3, 1e-5, 5), &SweepConfig::default()).unwrap();
    assert!((low.fit.slope - 1.0).abs() < 0.05, "{:?}", low.fit);
}
