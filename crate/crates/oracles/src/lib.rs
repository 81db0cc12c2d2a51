//! Reference implementations used to check `gelliptic` from the outside.
//!
//! Nothing here shares code with the library: the classical Jacobi functions come
//! from the arithmetic-geometric mean and descending Landen transformation, the
//! quadrature oracle is a plain midpoint rule, and minimizers are located by grid
//! scans. Everything is `f64`.

use std::f64::consts::PI;

/// Arithmetic-geometric mean of `a` and `b`.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    a
}

/// Classical complete elliptic integral of the first kind, modulus convention `K(k)`.
pub fn complete_k(k: f64) -> f64 {
    assert!((0.0..1.0).contains(&k), "modulus must lie in [0,1)");
    PI / (2.0 * agm(1.0, (1.0 - k * k).sqrt()))
}

/// Classical Jacobi amplitude and `(sn, cn, dn)` for real argument `u` and modulus `k`,
/// computed by the descending Landen / AGM scheme.
#[derive(Debug, Clone, Copy)]
pub struct Jacobi {
    pub am: f64,
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

pub fn jacobi(u: f64, k: f64) -> Jacobi {
    assert!((0.0..1.0).contains(&k), "modulus must lie in [0,1)");
    if k == 0.0 {
        return Jacobi {
            am: u,
            sn: u.sin(),
            cn: u.cos(),
            dn: 1.0,
        };
    }
    let mut a = vec![1.0_f64];
    let mut c = vec![k];
    let mut b = (1.0 - k * k).sqrt();
    while c.last().unwrap().abs() > 1e-17 && a.len() < 40 {
        let an = *a.last().unwrap();
        let next_a = 0.5 * (an + b);
        let next_c = 0.5 * (an - b);
        b = (an * b).sqrt();
        a.push(next_a);
        c.push(next_c);
    }
    let n = a.len() - 1;
    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    for i in (1..=n).rev() {
        phi = 0.5 * (phi + (c[i] / a[i] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    // cn / cos(φ_1 - φ_0) is 0/0 at odd quarter periods
    let dn = (1.0 - k * k * sn * sn).sqrt();
    Jacobi { am: phi, sn, cn, dn }
}

/// Composite midpoint rule with `panels` equal panels.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    // pairwise-ish accumulation in blocks keeps the rounding error well below 1e-12
    let mut total = 0.0;
    let block = 1024;
    let mut i = 0;
    while i < panels {
        let end = (i + block).min(panels);
        let mut partial = 0.0;
        for j in i..end {
            partial += f(a + (j as f64 + 0.5) * h);
        }
        total += partial;
        i = end;
    }
    total * h
}

/// Grid scan over `points` equally spaced nodes of `[lo, hi]`, returning `(argmin, min)`.
pub fn grid_argmin<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let mut best = (lo, f64::INFINITY);
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Golden-section refinement started from a grid bracket; used to sharpen a grid scan
/// when the scan resolution alone is coarser than the comparison tolerance.
pub fn grid_then_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let (x0, _) = grid_argmin(&f, lo, hi, points);
    let step = (hi - lo) / (points - 1) as f64;
    let (mut a, mut b) = ((x0 - step).max(lo), (x0 + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `π_p = 2π / (p sin(π/p))`, the half period of the one-parameter generalized sine.
pub fn pi_pp(p: f64) -> f64 {
    2.0 * PI / (p * (PI / p).sin())
}

/// `∫_0^1 (1 - s^q)^(-1/p) (1 - k^q s^q)^(-1/p) ds` for `p > 1`, by the midpoint rule
/// after `s = 1 - u^(p/(p-1))`, which leaves a bounded integrand, plus one Richardson
/// step. Accurate to roughly `panels^-4` for moduli away from 1.
pub fn generalized_k(p: f64, q: f64, k: f64, panels: usize) -> f64 {
    assert!(p > 1.0 && q > 0.0 && (0.0..1.0).contains(&k));
    let m = p / (p - 1.0);
    let f = |u: f64| {
        let d = u.powf(m);
        let s = 1.0 - d;
        // (1 - s^q)/d without cancellation
        let ratio = if d == 0.0 { q } else { -(q * (-d).ln_1p()).exp_m1() / d };
        let weight = m * ratio.powf(-1.0 / p);
        weight * (1.0 - (k * s).powf(q)).powf(-1.0 / p)
    };
    let coarse = midpoint(f, 0.0, 1.0, panels);
    let fine = midpoint(f, 0.0, 1.0, 2 * panels);
    (4.0 * fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agm_complete_k_known_value() {
        // K(k = 0.5) = 1.685750354812596...
        assert!((complete_k(0.5) - 1.685_750_354_812_596).abs() < 1e-14);
        assert!((complete_k(0.0) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_identities_hold() {
        for &k in &[0.1, 0.5, 0.7, 0.9, 0.99] {
            for i in 0..20 {
                let u = -3.0 + 0.37 * i as f64;
                let j = jacobi(u, k);
                assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-14);
                assert!((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs() < 1e-14);
            }
            let kk = complete_k(k);
            assert!((jacobi(kk, k).sn - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobi_derivative_matches_cn_dn() {
        let (u, k, h) = (0.9, 0.7, 1e-5);
        let d = (jacobi(u + h, k).sn - jacobi(u - h, k).sn) / (2.0 * h);
        let j = jacobi(u, k);
        assert!((d - j.cn * j.dn).abs() < 1e-9);
    }

    #[test]
    fn pi_pp_classical() {
        assert!((pi_pp(2.0) - PI).abs() < 1e-15);
    }

    #[test]
    fn generalized_k_reduces_to_classical() {
        for k in [0.0, 0.3, 0.8] {
            assert!((generalized_k(2.0, 2.0, k, 2000) - complete_k(k)).abs() < 1e-10);
        }
        assert!((2.0 * generalized_k(3.0, 3.0, 0.0, 2000) - pi_pp(3.0)).abs() < 1e-9);
    }
}
