mod common;

use blackstock_core::model::{characteristic_roots, logspace, ModelParams};
use blackstock_core::nonlinear_box::*;
use blackstock_core::phase_solver::kernels_at;
use blackstock_core::quad::adaptive_gk_real;
use common::*;
use num_complex::Complex64;

#[test]
fn manufactured_forcing_matches_scalar_duhamel() {
    let p = ModelParams::default();
    let cfg = NonlinearConfig::default();
    let g = cfg.grid().unwrap();
    let st = Stepper::new(&g, &p, cfg.dt).unwrap();
    let profile = g.sample(|x| x[0].cos());
    let force = |t: f64| profile.iter().map(|c| c * (-t).exp()).collect::<Vec<Complex64>>();
    let mut s = NonlinearState::zero(&g);
    for _ in 0..cfg.steps().unwrap() {
        s = st.duhamel_step(&s, &Source::External(&force)).unwrap();
    }
    let roots = characteristic_roots(&p, 1.0).unwrap();
    let t = s.t;
    for level in 0..3 {
        let want = 0.5
            * adaptive_gk_real(
                |sig| {
                    let k = kernels_at(&roots, t - sig).unwrap();
                    [k.k[2], k.dk[2], k.d2k[2]][level].re * (-sig).exp()
                },
                0.0,
                t,
                1e-14,
                1e-13,
                1000,
            )
            .unwrap();
        let got = s.fields[level][1];
        // ψₜₜ sees the predictor-stage error undamped by the time integration
        let tol = if level == 2 { 1e-7 } else { 1e-8 };
        assert!(
            (got.re - want).abs() < tol && got.im.abs() < 1e-14,
            "level {level}: {got} vs {want}"
        );
        assert!((s.fields[level][g.len() - 1] - got.conj()).norm() < 1e-14);
    }
}

fn nonlinear_end(cfg: &NonlinearConfig, data: &TorusData, p: &ModelParams) -> NonlinearState {
    let st = Stepper::new(&cfg.grid().unwrap(), p, cfg.dt).unwrap();
    let mut s = data.state();
    for _ in 0..cfg.steps().unwrap() {
        s = st.duhamel_step(&s, &Source::Nonlinear).unwrap();
    }
    s
}

#[test]
fn exponential_integrator_is_second_order() {
    let p = ModelParams::default();
    let base = NonlinearConfig {
        m: 64,
        dt: 0.02,
        ..NonlinearConfig::default()
    };
    let g = base.grid().unwrap();
    let data = TorusData::reference(&g).scaled(0.2);
    let at = |dt: f64| nonlinear_end(&NonlinearConfig { dt, ..base }, &data, &p);
    let reference = at(base.dt / 8.0);
    let err = |s: &NonlinearState| {
        let d: Vec<Complex64> = s.psi().iter().zip(reference.psi()).map(|(a, b)| a - b).collect();
        g.l2_norm(&d)
    };
    let coarse = err(&at(base.dt));
    let fine = err(&at(base.dt / 2.0));
    assert!(coarse > 0.0 && coarse / fine >= 3.5, "{coarse} {fine}");
}

#[test]
fn state_stays_real_and_dealiased() {
    let p = ModelParams::default();
    let cfg = NonlinearConfig {
        d: 2,
        m: 32,
        dt: 1e-2,
        ..NonlinearConfig::default()
    };
    let g = cfg.grid().unwrap();
    let s = nonlinear_end(&cfg, &TorusData::reference(&g).scaled(0.1), &p);
    for f in &s.fields {
        assert!(g.conjugate_defect(f) < 1e-12);
        assert!(f.iter().zip(&g.mask).all(|(c, keep)| *keep || c.norm() == 0.0));
    }
}

#[test]
fn picard_contracts_and_scales_quadratically() {
    let p = ModelParams::default();
    let cfg = NonlinearConfig::default();
    let g = cfg.grid().unwrap();
    let runs = contraction_scan(&TorusData::reference(&g), &p, &cfg, &[1e-3, 2e-3], 4).unwrap();
    assert!(!runs[0].non_contraction && runs[0].worst_ratio() < 0.5, "{:?}", runs[0]);
    let q = runs[1].differences[0] / runs[0].differences[0];
    assert!((q / 4.0 - 1.0).abs() < 0.1, "{q}");
}

/// Below the threshold the differences contract, far above it they do not.
#[test]
fn contraction_has_a_boundary() {
    let p = ModelParams::default();
    let cfg = NonlinearConfig {
        m: 64,
        ..NonlinearConfig::default()
    };
    let g = cfg.grid().unwrap();
    let scan = contraction_scan(&TorusData::reference(&g), &p, &cfg, &picard_amplitudes(), 6).unwrap();
    let threshold = scan
        .iter()
        .take_while(|r| r.worst_ratio() < 1.0)
        .last()
        .map(|r| r.epsilon)
        .expect("smallest amplitude contracts");
    assert!((0.1..1.0).contains(&threshold), "ε* = {threshold}");
    let top = scan.last().unwrap();
    assert!(top.non_contraction && top.worst_ratio() >= 1.0);
}

#[test]
fn small_data_run_is_bounded_with_quadratic_gap() {
    let p = ModelParams::default();
    let cfg = NonlinearConfig {
        t_end: 10.0,
        ..NonlinearConfig::default()
    };
    let g = cfg.grid().unwrap();
    let data = TorusData::reference(&g);
    let run = small_data_run(&data.scaled(cfg.epsilon), &p, &cfg, 100).unwrap();
    assert!(run.bounded(), "{}", run.envelope_ratio);
    assert_eq!(run.rows.len(), 101);
    let gr = gap_richardson(&data, &p, &cfg).unwrap();
    assert!(gr.relative_change() < 0.2, "{gr:?}");
}

#[test]
fn large_data_blow_up_is_reported() {
    let p = ModelParams::default();
    let cfg = NonlinearConfig {
        m: 32,
        dt: 1e-2,
        t_end: 5.0,
        ..NonlinearConfig::default()
    };
    let g = cfg.grid().unwrap();
    let r = small_data_run(&TorusData::reference(&g).scaled(50.0), &p, &cfg, 10);
    assert!(
        matches!(r, Err(NonlinearError::BlowUp { .. } | NonlinearError::NotFinite { .. })),
        "{r:?}"
    );
}

#[test]
fn weighted_convolution_lemma() {
    let t = logspace(1e-1, 1e5, 25);
    for (a1, a2) in CONVOLUTION_PAIRS {
        let c = convolution_check(a1, a2, &t).unwrap();
        assert!(c.hypothesis());
        assert!(c.constant.is_finite() && c.constant < 10.0, "{c:?}");
        // the bound is attained: the ratio settles instead of decaying
        let tail = &c.ratios[c.ratios.len() - 5..];
        assert!(tail.iter().all(|r| *r > 0.2 * c.constant), "{c:?}");
        let direct: f64 = {
            let tt = 50.0;
            let n = 200_000;
            let h = tt / n as f64;
            (0..n)
                .map(|i| {
                    let s = (i as f64 + 0.5) * h;
                    (1.0 + tt - s).powf(-a1) * (1.0 + s).powf(-a2) * h
                })
                .sum()
        };
        let quad = weighted_convolution(50.0, a1, a2).unwrap();
        assert!((quad - direct).abs() < 1e-8 * quad);
    }
}
