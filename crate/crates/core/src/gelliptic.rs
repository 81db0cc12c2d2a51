//! Generalized Jacobian elliptic functions.
//!
//! `arcsn_pq(σ, k) = ∫_0^σ ((1 - s^q)(1 - k^q s^q))^(-1/p) ds` and
//! `K_pq(k) = arcsn_pq(1, k)`. `sn_pq(·, k)` inverts `arcsn_pq` on `[0, K_pq]` and is
//! extended by `sn(2K - t) = sn(t)`, oddness and `4K` periodicity (odd monotone
//! extension when `p ≤ 1`). `cn_pq = (1 - sn^q)^(1/p)` follows the sign of `d/dt sn_pq`;
//! `dn_pq = (1 - k^q sn^q)^(1/p)` stays positive.

use crate::error::{domain, Error, Result};
use crate::gtrig::{check_unit_argument, GenTrig, HalfPeriod, PQPair, Regime};
use crate::numerics::{integrate_with_gaps, QuadratureSpec, Tolerance};
use crate::real::{lit, one_minus_pow, Real};
use crate::wave::{Kernel, Point, Wave};

/// Largest quarter period returned before the modulus is refused as numerically
/// indistinguishable from the divergent limit.
pub const MAX_QUARTER_PERIOD: f64 = 1e8;

/// Elliptic modulus `k ∈ [0, 1)`, stored together with `1 - k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus<T> {
    k: T,
    complement: T,
}

impl<T: Real> Modulus<T> {
    pub fn new(k: T) -> Result<Self> {
        if !(k >= T::zero() && k < T::one()) {
            return Err(domain(format!("modulus must satisfy 0 ≤ k < 1, got {k}")));
        }
        Ok(Self {
            k,
            complement: T::one() - k,
        })
    }

    /// Modulus `1 - delta`, keeping `delta` exact.
    pub fn from_complement(delta: T) -> Result<Self> {
        if !(delta > T::zero() && delta <= T::one()) {
            return Err(domain(format!("complementary modulus must lie in (0, 1], got {delta}")));
        }
        Ok(Self {
            k: T::one() - delta,
            complement: delta,
        })
    }

    pub fn zero() -> Self {
        Self {
            k: T::zero(),
            complement: T::one(),
        }
    }

    pub fn value(&self) -> T {
        self.k
    }

    pub fn complement(&self) -> T {
        self.complement
    }
}

/// Everything needed to evaluate the elliptic functions for one `(p, q, k)`, including
/// the cached quarter period `K_pq(k)`.
#[derive(Debug, Clone)]
pub struct EllipticContext<T> {
    pq: PQPair<T>,
    modulus: Modulus<T>,
    quarter: HalfPeriod<T>,
    wave: Wave<T>,
    trig: GenTrig<T>,
}

impl<T: Real> EllipticContext<T> {
    pub fn new(pq: PQPair<T>, modulus: Modulus<T>) -> Result<Self> {
        Self::with_tolerance(pq, modulus, Tolerance::default())
    }

    pub fn with_tolerance(pq: PQPair<T>, modulus: Modulus<T>, tol: Tolerance<T>) -> Result<Self> {
        let trig = GenTrig::with_tolerance(pq, tol)?;
        let kernel = Kernel::new(pq.p(), pq.q(), modulus.k, modulus.complement, tol);
        let quarter = quarter_from(&pq, &modulus, &kernel, &trig)?;
        let wave = Wave::new(kernel, quarter.value())?;
        Ok(Self {
            pq,
            modulus,
            quarter,
            wave,
            trig,
        })
    }

    pub fn pair(&self) -> PQPair<T> {
        self.pq
    }

    pub fn modulus(&self) -> Modulus<T> {
        self.modulus
    }

    pub fn quarter_period(&self) -> HalfPeriod<T> {
        self.quarter
    }

    /// `K_pq(k)`; divergent for `p ≤ 1`.
    pub fn complete_k(&self) -> Result<T> {
        self.quarter
            .value()
            .ok_or_else(|| Error::Divergent("K_pq is infinite for p ≤ 1".into()))
    }

    pub fn trig(&self) -> &GenTrig<T> {
        &self.trig
    }

    pub fn arcsn(&self, sigma: T) -> Result<T> {
        check_unit_argument(self.pq.regime(), sigma, "arcsn_pq")?;
        self.wave.arc(Point {
            sigma,
            one_minus: T::one() - sigma,
        })
    }

    pub fn try_sn(&self, t: T) -> Result<T> {
        Ok(self.wave.eval(t)?.value)
    }

    pub fn try_cn(&self, t: T) -> Result<T> {
        let pt = self.wave.eval(t)?;
        Ok(self.trig.cos_from(&pt))
    }

    pub fn try_dn(&self, t: T) -> Result<T> {
        let pt = self.wave.eval(t)?;
        Ok(self.dn_from(pt.value.abs(), pt.one_minus))
    }

    fn dn_from(&self, sigma: T, one_minus: T) -> T {
        let (k, kc) = (self.modulus.k, self.modulus.complement);
        if k == T::zero() {
            return T::one();
        }
        one_minus_pow(k * sigma, kc + k * one_minus, self.pq.q())
            .max(T::zero())
            .powf(self.pq.p().recip())
    }

    /// `(sn, cn, dn)` from a single inversion.
    pub fn try_sn_cn_dn(&self, t: T) -> Result<(T, T, T)> {
        let pt = self.wave.eval(t)?;
        Ok((
            pt.value,
            self.trig.cos_from(&pt),
            self.dn_from(pt.value.abs(), pt.one_minus),
        ))
    }

    /// `sn_pq(t, k)`; `NaN` if the underlying quadrature fails.
    pub fn sn(&self, t: T) -> T {
        self.try_sn(t).unwrap_or_else(|_| T::nan())
    }

    pub fn cn(&self, t: T) -> T {
        self.try_cn(t).unwrap_or_else(|_| T::nan())
    }

    pub fn dn(&self, t: T) -> T {
        self.try_dn(t).unwrap_or_else(|_| T::nan())
    }

    /// Amplitude `am_pq(t, k) = arcsin_pq(sn_pq(t, k))` for `t ∈ [0, K_pq(k)]`.
    pub fn am(&self, t: T) -> Result<T> {
        let in_range = match self.quarter.value() {
            Some(k) => t >= T::zero() && t <= k,
            None => t >= T::zero() && t.is_finite(),
        };
        if !in_range {
            return Err(domain(format!("am_pq requires t in [0, K_pq(k)], got {t}")));
        }
        let pt = self.wave.invert(t)?;
        self.trig.arc_point(pt)
    }
}

fn quarter_from<T: Real>(
    pq: &PQPair<T>,
    modulus: &Modulus<T>,
    kernel: &Kernel<T>,
    trig: &GenTrig<T>,
) -> Result<HalfPeriod<T>> {
    Ok(match pq.regime() {
        Regime::Sub => HalfPeriod::Infinite,
        Regime::Super if modulus.k == T::zero() => {
            HalfPeriod::Finite(trig.half_period().value().unwrap() * lit(0.5))
        }
        Regime::Super => {
            let near_divergent = || Error::NearDivergentModulus {
                k: modulus.k.to_f64().unwrap_or(f64::NAN),
                limit: MAX_QUARTER_PERIOD,
            };
            let k = kernel.complete().map_err(|e| match e {
                Error::QuadratureFailure(_) if pq.p() <= lit(2.0) => near_divergent(),
                other => other,
            })?;
            if !(k <= lit(MAX_QUARTER_PERIOD)) {
                return Err(near_divergent());
            }
            HalfPeriod::Finite(k)
        }
    })
}

/// `K_pq(k)` alone, without setting up the inverse functions.
pub(crate) fn quarter_period_only<T: Real>(
    pq: PQPair<T>,
    modulus: Modulus<T>,
    tol: Tolerance<T>,
) -> Result<T> {
    let trig = GenTrig::with_tolerance(pq, tol)?;
    let kernel = Kernel::new(pq.p(), pq.q(), modulus.k, modulus.complement, tol);
    quarter_from(&pq, &modulus, &kernel, &trig)?
        .value()
        .ok_or_else(|| Error::Divergent("K_pq is infinite for p ≤ 1".into()))
}

/// `lim_{k→1} K_pq(k) = ∫_0^1 (1 - s^q)^(-2/p) ds`, finite only for `p > 2`.
pub fn limit_complete_k<T: Real>(pq: PQPair<T>, tol: Tolerance<T>) -> Result<T> {
    if !(pq.p() > lit(2.0)) {
        return Err(Error::Divergent(format!(
            "K_pq(k) → ∞ as k → 1 for p ≤ 2 (p = {})",
            pq.p()
        )));
    }
    let exponent = lit::<T>(2.0) / pq.p();
    let spec = QuadratureSpec::right_singular(exponent, tol)?;
    let q = pq.q();
    integrate_with_gaps(
        |s: T, _, d: T| one_minus_pow(s, d, q).powf(-exponent),
        T::zero(),
        T::one(),
        &spec,
    )
}

pub fn arcsn_pq<T: Real>(pq: PQPair<T>, k: Modulus<T>, sigma: T) -> Result<T> {
    EllipticContext::new(pq, k)?.arcsn(sigma)
}

pub fn complete_k<T: Real>(pq: PQPair<T>, k: Modulus<T>) -> Result<T> {
    if pq.regime() == Regime::Sub {
        return Err(Error::Divergent("K_pq is infinite for p ≤ 1".into()));
    }
    EllipticContext::new(pq, k)?.complete_k()
}

pub fn sn_pq<T: Real>(pq: PQPair<T>, k: Modulus<T>, t: T) -> T {
    EllipticContext::new(pq, k).map(|c| c.sn(t)).unwrap_or_else(|_| T::nan())
}

pub fn cn_pq<T: Real>(pq: PQPair<T>, k: Modulus<T>, t: T) -> T {
    EllipticContext::new(pq, k).map(|c| c.cn(t)).unwrap_or_else(|_| T::nan())
}

pub fn dn_pq<T: Real>(pq: PQPair<T>, k: Modulus<T>, t: T) -> T {
    EllipticContext::new(pq, k).map(|c| c.dn(t)).unwrap_or_else(|_| T::nan())
}

pub fn am_pq<T: Real>(pq: PQPair<T>, k: Modulus<T>, t: T) -> Result<T> {
    EllipticContext::new(pq, k)?.am(t)
}
