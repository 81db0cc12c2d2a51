//! Generalized trigonometric functions `arcsin_pq`, `π_pq`, `sin_pq`, `cos_pq`.
//!
//! `arcsin_pq(σ) = ∫_0^σ (1 - s^q)^(-1/p) ds`. For `p > 1` its inverse on
//! `[0, π_pq/2]` is reflected about `π_pq/2`, extended as an odd function and then
//! `2π_pq`-periodically. For `0 < p ≤ 1` the integral diverges at `σ = 1`, so `sin_pq`
//! is the odd extension of a monotone function with range `(-1, 1)`.
//!
//! `cos_pq = (1 - sin_pq^q)^(1/p)` on the rising quarter and is continued to the whole
//! line as the derivative of the extended `sin_pq`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::error::{domain, Error, Result};
use crate::numerics::{integrate_with_gaps, QuadratureSpec, Tolerance};
use crate::real::{lit, one_minus_pow, Real};
use crate::wave::{Kernel, Point, Wave, WavePoint};

/// Which side of `p = 1` the first exponent falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `p > 1`: finite half period.
    Super,
    /// `0 < p ≤ 1`: the defining integral diverges at `σ = 1`.
    Sub,
}

/// Exponent pair `(p, q)`, both positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PQPair<T> {
    p: T,
    q: T,
}

impl<T: Real> PQPair<T> {
    pub fn new(p: T, q: T) -> Result<Self> {
        if !(p > T::zero()) || !(q > T::zero()) || !p.is_finite() || !q.is_finite() {
            return Err(domain(format!("exponents must be positive and finite, got p = {p}, q = {q}")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn regime(&self) -> Regime {
        if self.p > T::one() {
            Regime::Super
        } else {
            Regime::Sub
        }
    }

    /// Conjugate exponent `p/(p-1)`, defined for `p > 1`.
    pub fn p_star(&self) -> Option<T> {
        (self.p > T::one()).then(|| self.p / (self.p - T::one()))
    }

    /// The pair `(p/2, q)` governing the `k → 1` limit and flat-core profiles.
    pub fn halved(&self) -> Result<Self> {
        Self::new(self.p * lit(0.5), self.q)
    }
}

/// Half period `π_pq`, or the divergence marker in the sub-regime. Also used for the
/// quarter period `K_pq` of the elliptic functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfPeriod<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> HalfPeriod<T> {
    pub fn value(&self) -> Option<T> {
        match *self {
            HalfPeriod::Finite(v) => Some(v),
            HalfPeriod::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, HalfPeriod::Finite(_))
    }
}

type MemoKey = (u64, u64, u64, u64, usize);

fn pi_memo() -> &'static RwLock<HashMap<MemoKey, f64>> {
    static MEMO: OnceLock<RwLock<HashMap<MemoKey, f64>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn bits<T: Real>(x: T) -> u64 {
    x.to_f64().unwrap_or(f64::NAN).to_bits()
}

/// `π_pq = (2/q) B(1/q, 1/p*)`, evaluated by quadrature of the beta integral and memoized
/// per `(p, q, tolerance)`.
fn compute_pi<T: Real>(pq: &PQPair<T>, tol: &Tolerance<T>) -> Result<T> {
    let key = (
        bits(pq.p),
        bits(pq.q),
        bits(tol.rel),
        bits(tol.abs),
        std::mem::size_of::<T>(),
    );
    if let Some(v) = pi_memo().read().ok().and_then(|m| m.get(&key).copied()) {
        return Ok(lit(v));
    }
    let a = pq.q.recip();
    let b_minus_one = -pq.p.recip();
    let left = (T::one() - a).max(T::zero());
    let spec = QuadratureSpec::new(left, pq.p.recip(), *tol)?;
    let beta = integrate_with_gaps(
        |z: T, _, one_minus_z: T| z.powf(a - T::one()) * one_minus_z.powf(b_minus_one),
        T::zero(),
        T::one(),
        &spec,
    )?;
    let pi = lit::<T>(2.0) / pq.q * beta;
    if let Ok(mut m) = pi_memo().write() {
        m.insert(key, pi.to_f64().unwrap_or(f64::NAN));
    }
    Ok(pi)
}

/// Generalized trigonometric functions for a fixed exponent pair.
#[derive(Debug, Clone)]
pub struct GenTrig<T> {
    pq: PQPair<T>,
    half_period: HalfPeriod<T>,
    wave: Wave<T>,
}

impl<T: Real> GenTrig<T> {
    pub fn new(pq: PQPair<T>) -> Result<Self> {
        Self::with_tolerance(pq, Tolerance::default())
    }

    pub fn with_tolerance(pq: PQPair<T>, tol: Tolerance<T>) -> Result<Self> {
        let half_period = match pq.regime() {
            Regime::Super => HalfPeriod::Finite(compute_pi(&pq, &tol)?),
            Regime::Sub => HalfPeriod::Infinite,
        };
        let kernel = Kernel::new(pq.p, pq.q, T::zero(), T::one(), tol);
        let quarter = half_period.value().map(|v| v * lit(0.5));
        Ok(Self {
            pq,
            half_period,
            wave: Wave::new(kernel, quarter)?,
        })
    }

    pub fn pair(&self) -> PQPair<T> {
        self.pq
    }

    /// `π_pq`.
    pub fn half_period(&self) -> HalfPeriod<T> {
        self.half_period
    }

    pub fn arcsin(&self, sigma: T) -> Result<T> {
        check_unit_argument(self.pq.regime(), sigma, "arcsin_pq")?;
        self.wave.arc(Point {
            sigma,
            one_minus: T::one() - sigma,
        })
    }

    pub(crate) fn arc_point(&self, point: Point<T>) -> Result<T> {
        self.wave.arc(point)
    }

    pub(crate) fn point(&self, t: T) -> Result<WavePoint<T>> {
        self.wave.eval(t)
    }

    pub fn try_sin(&self, t: T) -> Result<T> {
        Ok(self.point(t)?.value)
    }

    pub fn try_cos(&self, t: T) -> Result<T> {
        let pt = self.point(t)?;
        Ok(self.cos_from(&pt))
    }

    pub(crate) fn cos_from(&self, pt: &WavePoint<T>) -> T {
        let magnitude = one_minus_pow(pt.value.abs(), pt.one_minus, self.pq.q)
            .max(T::zero())
            .powf(self.pq.p.recip());
        if pt.rising {
            magnitude
        } else {
            -magnitude
        }
    }

    /// `sin_pq(t)`; `NaN` if the underlying quadrature fails.
    pub fn sin(&self, t: T) -> T {
        self.try_sin(t).unwrap_or_else(|_| T::nan())
    }

    /// `cos_pq(t)`; `NaN` if the underlying quadrature fails.
    pub fn cos(&self, t: T) -> T {
        self.try_cos(t).unwrap_or_else(|_| T::nan())
    }
}

pub(crate) fn check_unit_argument<T: Real>(regime: Regime, sigma: T, name: &str) -> Result<()> {
    if !(sigma >= T::zero() && sigma <= T::one()) {
        return Err(domain(format!("{name} requires σ in [0, 1], got {sigma}")));
    }
    if regime == Regime::Sub && sigma == T::one() {
        return Err(Error::Divergent(format!("{name}(1) diverges for p ≤ 1")));
    }
    Ok(())
}

pub fn arcsin_pq<T: Real>(pq: PQPair<T>, sigma: T) -> Result<T> {
    GenTrig::new(pq)?.arcsin(sigma)
}

pub fn pi_pq<T: Real>(pq: PQPair<T>) -> Result<HalfPeriod<T>> {
    match pq.regime() {
        Regime::Super => Ok(HalfPeriod::Finite(compute_pi(&pq, &Tolerance::default())?)),
        Regime::Sub => Ok(HalfPeriod::Infinite),
    }
}

pub fn sin_pq<T: Real>(pq: PQPair<T>, t: T) -> T {
    GenTrig::new(pq).map(|g| g.sin(t)).unwrap_or_else(|_| T::nan())
}

pub fn cos_pq<T: Real>(pq: PQPair<T>, t: T) -> T {
    GenTrig::new(pq).map(|g| g.cos(t)).unwrap_or_else(|_| T::nan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pair(p: f64, q: f64) -> PQPair<f64> {
        PQPair::new(p, q).unwrap()
    }

    #[test]
    fn rejects_nonpositive_exponents() {
        assert!(PQPair::new(0.0, 2.0).is_err());
        assert!(PQPair::new(2.0, -1.0).is_err());
        assert_eq!(pair(2.0, 2.0).p_star(), Some(2.0));
        assert_eq!(pair(1.0, 2.0).p_star(), None);
        assert_eq!(pair(1.0, 2.0).regime(), Regime::Sub);
    }

    #[test]
    fn arcsin_examples() {
        assert!((arcsin_pq(pair(2.0, 2.0), 1.0).unwrap() - PI / 2.0).abs() < 1e-12);
        assert_eq!(arcsin_pq(pair(3.0, 1.5), 0.0).unwrap(), 0.0);
        assert!((arcsin_pq(pair(1.0, 2.0), 0.5).unwrap() - 0.5f64.atanh()).abs() < 1e-12);
    }

    #[test]
    fn arcsin_domain_errors() {
        let g = GenTrig::new(pair(2.0, 2.0)).unwrap();
        assert!(matches!(g.arcsin(1.5), Err(Error::Domain(_))));
        assert!(matches!(g.arcsin(-0.1), Err(Error::Domain(_))));
        let sub = GenTrig::new(pair(1.0, 2.0)).unwrap();
        assert!(matches!(sub.arcsin(1.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn pi_examples() {
        let v = pi_pq(pair(2.0, 2.0)).unwrap().value().unwrap();
        assert!((v - PI).abs() < 1e-12);
        let v = pi_pq(pair(4.0, 4.0)).unwrap().value().unwrap();
        assert!((v - PI / 2f64.sqrt()).abs() < 1e-10);
        assert!((v - 2.221_441_469_079_183).abs() < 1e-10);
        assert_eq!(pi_pq(pair(1.0, 2.0)).unwrap(), HalfPeriod::Infinite);
    }

    #[test]
    fn sin_cos_examples() {
        let g = GenTrig::new(pair(2.0, 2.0)).unwrap();
        assert_eq!(g.sin(0.0), 0.0);
        assert!((g.sin(1.0) - 1f64.sin()).abs() < 1e-12);
        assert!((g.cos(0.0) - 1.0).abs() < 1e-15);
        assert!(g.cos(PI / 2.0).abs() < 1e-7);
        assert!((g.cos(PI) + 1.0).abs() < 1e-12);
        let h = GenTrig::new(pair(1.0, 2.0)).unwrap();
        assert!((h.sin(2.0) - 2f64.tanh()).abs() < 1e-12);
        assert!((h.sin(-2.0) + 2f64.tanh()).abs() < 1e-12);
    }

    #[test]
    fn cos_vanishes_at_quarter_period() {
        for (p, q) in [(1.5, 2.0), (3.0, 2.0), (2.5, 4.0)] {
            let g = GenTrig::new(pair(p, q)).unwrap();
            let half = g.half_period().value().unwrap();
            assert_eq!(g.cos(half / 2.0).abs(), 0.0);
            assert!((g.sin(half / 2.0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sub_regime_range_stays_open() {
        let g = GenTrig::new(pair(1.0, 2.0)).unwrap();
        assert!(g.sin(40.0) < 1.0);
        assert!(g.cos(40.0) > 0.0);
    }

    #[test]
    fn memoized_value_is_reused() {
        let a = pi_pq(pair(2.7, 3.3)).unwrap();
        let b = pi_pq(pair(2.7, 3.3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_precision_sine() {
        let g = GenTrig::<f32>::new(PQPair::new(2.0, 2.0).unwrap()).unwrap();
        assert!((g.sin(1.0) - 1f32.sin()).abs() < 1e-5);
    }
}
