//! Comparisons against closed forms and against the independent reference
//! implementations in `gelliptic-oracles`.

use std::f64::consts::PI;

use gelliptic::gelliptic::{am_pq, arcsn_pq, complete_k};
use gelliptic::gtrig::{arcsin_pq, pi_pq};
use gelliptic::spectra::{eigen_pe_interior, lambda1_star, phi};
use gelliptic::{EllipticContext, GenTrig, HalfPeriod, Modulus, PQPair, ProblemSpec};
use gelliptic_oracles as oracle;

fn pair(p: f64, q: f64) -> PQPair<f64> {
    PQPair::new(p, q).unwrap()
}

#[test]
fn classical_sine_and_pi() {
    let trig = GenTrig::new(pair(2.0, 2.0)).unwrap();
    assert!((trig.half_period().value().unwrap() - PI).abs() <= 1e-12);
    let worst = (0..200)
        .map(|i| -7.0 + 14.0 * i as f64 / 199.0)
        .map(|t| (trig.sin(t) - t.sin()).abs().max((trig.cos(t) - t.cos()).abs()))
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "max deviation {worst:e}");
    assert!((trig.sin(1.0) - 0.841_470_984_807_896_5).abs() < 1e-12);
    assert!((trig.cos(PI) + 1.0).abs() < 1e-12);
}

#[test]
fn pi_pp_closed_form() {
    for p in [1.5, 2.0, 3.0, 4.0, 5.0] {
        let v = pi_pq(pair(p, p)).unwrap().value().unwrap();
        assert!((v - oracle::pi_pp(p)).abs() <= 1e-10, "p = {p}: {v} vs {}", oracle::pi_pp(p));
    }
    // p close to 1: the beta integrand is (1 - z)^(-1/p), barely integrable
    for p in [1.01, 1.003, 1.0008, 1.0002] {
        let v = pi_pq(pair(p, p)).unwrap().value().unwrap();
        assert!((v / oracle::pi_pp(p) - 1.0).abs() <= 1e-10, "p = {p}: {v} vs {}", oracle::pi_pp(p));
    }
    let v = pi_pq(pair(4.0, 4.0)).unwrap().value().unwrap();
    assert!((v - PI / 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(pi_pq(pair(1.0, 2.0)).unwrap(), HalfPeriod::Infinite);
}

#[test]
fn hyperbolic_degeneration() {
    let trig = GenTrig::new(pair(1.0, 2.0)).unwrap();
    let worst = (0..=200)
        .map(|i| 5.0 * i as f64 / 200.0)
        .map(|t| (trig.sin(t) - t.tanh()).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "max deviation {worst:e}");
    assert!((trig.sin(2.0) - 0.964_027_580_075_817).abs() < 1e-12);
    assert!((arcsin_pq(pair(1.0, 2.0), 0.5).unwrap() - 0.5f64.atanh()).abs() < 1e-13);
    assert!(matches!(
        arcsin_pq(pair(1.0, 2.0), 1.0),
        Err(gelliptic::Error::Divergent(_))
    ));
}

#[test]
fn complete_integral_matches_agm() {
    for i in 1..=9 {
        let k = i as f64 / 10.0;
        let ours = complete_k(pair(2.0, 2.0), Modulus::new(k).unwrap()).unwrap();
        assert!((ours - oracle::complete_k(k)).abs() <= 1e-9, "k = {k}");
    }
    let half = arcsn_pq(pair(2.0, 2.0), Modulus::new(0.5).unwrap(), 1.0).unwrap();
    assert!((half - 1.685_750_354_812_596).abs() < 1e-12);
}

#[test]
fn jacobi_functions_match_landen() {
    for i in 1..=9 {
        let k = i as f64 / 10.0;
        let ctx = EllipticContext::new(pair(2.0, 2.0), Modulus::new(k).unwrap()).unwrap();
        let quarter = ctx.complete_k().unwrap();
        for j in 0..=80 {
            let t = -4.0 * quarter + 8.0 * quarter * j as f64 / 80.0;
            let (sn, cn, dn) = ctx.try_sn_cn_dn(t).unwrap();
            let reference = oracle::jacobi(t, k);
            assert!((sn - reference.sn).abs() <= 1e-8, "sn at k = {k}, t = {t}");
            assert!((cn - reference.cn).abs() <= 1e-8, "cn at k = {k}, t = {t}");
            assert!((dn - reference.dn).abs() <= 1e-8, "dn at k = {k}, t = {t}");
        }
    }
    let ctx = EllipticContext::new(pair(2.0, 2.0), Modulus::new(0.7).unwrap()).unwrap();
    let reference = oracle::jacobi(0.9, 0.7);
    assert!((ctx.sn(0.9) - reference.sn).abs() < 1e-9);
    assert!((ctx.cn(0.9) - reference.cn).abs() < 1e-9);
    assert!((ctx.dn(0.9) - reference.dn).abs() < 1e-9);
}

#[test]
fn amplitude_matches_landen() {
    let am = am_pq(pair(2.0, 2.0), Modulus::new(0.5).unwrap(), 0.8).unwrap();
    assert!((am - oracle::jacobi(0.8, 0.5).am).abs() < 1e-9);
}

#[test]
fn generalized_complete_integral_matches_midpoint_oracle() {
    for (p, q) in [(1.5, 2.0), (3.0, 2.0), (2.0, 4.0), (4.0, 3.0)] {
        for k in [0.0, 0.3, 0.6, 0.9] {
            let ours = complete_k(pair(p, q), Modulus::new(k).unwrap()).unwrap();
            let reference = oracle::generalized_k(p, q, k, 4000);
            assert!((ours - reference).abs() < 1e-8, "p = {p}, q = {q}, k = {k}");
        }
    }
}

#[test]
fn first_threshold_matches_grid_scan() {
    let (p, q) = (2.0, 4.0);
    let spec = ProblemSpec::new(pair(p, q), 1.0, None).unwrap();
    let oracle_phi = |k: f64| {
        let kq = k.powf(q);
        (1.0 + kq).powf(1.0 / p)
            * (2.0 * kq / (1.0 + kq)).powf(1.0 / q - 1.0 / p)
            * oracle::generalized_k(p, q, k, 100)
    };
    let (k_grid, phi_grid) = oracle::grid_argmin(oracle_phi, 1e-5, 1.0 - 1e-5, 100_000);
    let (k_star, lambda_1) = lambda1_star(&spec).unwrap();
    let phi_star = phi(&spec, Modulus::new(k_star).unwrap()).unwrap();
    assert!((k_star - k_grid).abs() <= 1e-5, "{k_star} vs {k_grid}");
    assert!((phi_star - phi_grid).abs() <= 1e-5, "{phi_star} vs {phi_grid}");
    // λ_1 = (q/p*)(2Φ(k_*)/T)^p with q/p* = 2
    assert!((lambda_1 - 2.0 * (2.0 * phi_grid).powi(2)).abs() <= 1e-4 * lambda_1);
}

#[test]
fn classical_pe_eigenvalue_from_agm() {
    let spec = ProblemSpec::new(pair(2.0, 2.0), PI, None).unwrap();
    let u = eigen_pe_interior(&spec, Modulus::new(0.5).unwrap(), 1).unwrap();
    let expected = 1.25 * (2.0 * oracle::complete_k(0.5) / PI).powi(2);
    assert!((u.lambda() - expected).abs() < 1e-10);
    assert!((u.lambda() - 1.439_7).abs() < 1e-4);
}
