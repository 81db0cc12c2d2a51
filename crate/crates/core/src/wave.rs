//! Shared machinery behind `sin_pq` and `sn_pq`: the integrand
//! `(1 - s^q)^(-1/p) (1 - k^q s^q)^(-1/p)`, its integral, the inverse of that integral
//! and the periodic extension.
//!
//! The integral is split at `σ_s = 2^(-1/q)`. Below the split it is integrated directly
//! in `s`; above it the variable `d = 1 - s` is carried explicitly so that `1 - σ` (and
//! hence `cos_pq`, `cn_pq`) keeps full relative precision near the peak. For `p > 1`
//! the tail uses `d = u^(p*)`, which turns the `(1 - s)^(-1/p)` singularity into a
//! bounded integrand; for `p ≤ 1` it uses `d = e^(-w)`.

use crate::error::Result;
use crate::numerics::{integrate, try_invert_monotone, QuadratureSpec, Tolerance};
use crate::real::{lit, one_minus_pow, Real};

/// A point on the rising quarter wave: `sigma ∈ [0, 1]` with `one_minus = 1 - sigma`
/// carried to full relative precision.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Point<T> {
    pub sigma: T,
    pub one_minus: T,
}

/// Value of the periodically extended function at some `t`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WavePoint<T> {
    /// Signed function value.
    pub value: T,
    /// `1 - |value|`.
    pub one_minus: T,
    /// Sign of the derivative at `t` (`true` when non-decreasing).
    pub rising: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct Kernel<T> {
    p: T,
    q: T,
    k: T,
    k_complement: T,
    tol: Tolerance<T>,
    split_sigma: T,
    split_complement: T,
}

impl<T: Real> Kernel<T> {
    pub fn new(p: T, q: T, k: T, k_complement: T, tol: Tolerance<T>) -> Self {
        let split_sigma = lit::<T>(0.5).powf(q.recip());
        let split_complement = -(-(lit::<T>(2.0).ln()) / q).exp_m1();
        Self {
            p,
            q,
            k,
            k_complement,
            tol,
            split_sigma,
            split_complement,
        }
    }

    /// `p*` = exponent of the tail substitution `d = u^(p*)`.
    fn tail_power(&self) -> T {
        self.p / (self.p - T::one())
    }

    /// `(1 - k^q s^q)^(-1/p)` given `s` and `d = 1 - s`.
    fn modulus_factor(&self, s: T, d: T) -> T {
        if self.k == T::zero() {
            return T::one();
        }
        let x = self.k * s;
        let one_minus_x = self.k_complement + self.k * d;
        one_minus_pow(x, one_minus_x, self.q).powf(-self.p.recip())
    }

    fn integrand(&self, s: T, d: T) -> T {
        one_minus_pow(s, d, self.q).powf(-self.p.recip()) * self.modulus_factor(s, d)
    }

    /// `(1 - s^q) / d` for `s = 1 - d`, tending to `q` as `d → 0`.
    fn ratio(&self, d: T) -> T {
        if d == T::zero() {
            self.q
        } else {
            one_minus_pow(T::one() - d, d, self.q) / d
        }
    }

    fn quad(&self) -> QuadratureSpec<T> {
        QuadratureSpec::regular(self.tol)
    }

    /// `∫_0^σ`, for `σ ≤ σ_s`.
    fn head(&self, sigma: T) -> Result<T> {
        integrate(|s| self.integrand(s, T::one() - s), T::zero(), sigma, &self.quad())
    }

    /// `∫_{1-U^(p*)}^1` in the substituted variable (`p > 1`).
    fn tail(&self, upper: T) -> Result<T> {
        let m = self.tail_power();
        let inv_p = self.p.recip();
        let g = |u: T| {
            let d = u.powf(m);
            m * self.ratio(d).powf(-inv_p) * self.modulus_factor(T::one() - d, d)
        };
        integrate(g, T::zero(), upper, &self.quad())
    }

    /// `∫_{1-e^(-w0)}^{1-e^(-w1)}` in the logarithmic variable (`p ≤ 1`).
    fn log_tail(&self, w0: T, w1: T) -> Result<T> {
        let expo = T::one() - self.p.recip();
        let inv_p = self.p.recip();
        let g = |w: T| {
            let d = (-w).exp();
            d.powf(expo) * self.ratio(d).powf(-inv_p) * self.modulus_factor(T::one() - d, d)
        };
        integrate(g, w0, w1, &self.quad())
    }

    fn split_tail_upper(&self) -> T {
        self.split_complement.powf(self.tail_power().recip())
    }

    fn split_log(&self) -> T {
        -self.split_complement.ln()
    }

    /// Complete integral `∫_0^1` (only finite for `p > 1`).
    pub fn complete(&self) -> Result<T> {
        Ok(self.head(self.split_sigma)? + self.tail(self.split_tail_upper())?)
    }
}

/// Inverse of the kernel integral on its rising quarter, with the periodic extension.
#[derive(Debug, Clone)]
pub(crate) struct Wave<T> {
    kernel: Kernel<T>,
    /// Quarter period for `p > 1`; `None` when the integral diverges.
    quarter: Option<T>,
    head_at_split: T,
}

impl<T: Real> Wave<T> {
    pub fn new(kernel: Kernel<T>, quarter: Option<T>) -> Result<Self> {
        let head_at_split = kernel.head(kernel.split_sigma)?;
        Ok(Self {
            kernel,
            quarter,
            head_at_split,
        })
    }

    fn inversion_tol() -> Tolerance<T> {
        Tolerance {
            abs: T::min_positive_value(),
            ..Tolerance::machine()
        }
    }

    /// Integral from 0 to `sigma`, where `one_minus = 1 - sigma`.
    pub fn arc(&self, point: Point<T>) -> Result<T> {
        let k = &self.kernel;
        if point.sigma <= k.split_sigma {
            return k.head(point.sigma);
        }
        match self.quarter {
            Some(quarter) => {
                let upper = point.one_minus.powf(k.tail_power().recip());
                Ok(quarter - k.tail(upper)?)
            }
            None => Ok(self.head_at_split + k.log_tail(k.split_log(), -point.one_minus.ln())?),
        }
    }

    /// Solves `arc(σ) = x` for `x ≥ 0` (and `x ≤ quarter` when the quarter is finite).
    pub fn invert(&self, x: T) -> Result<Point<T>> {
        let k = &self.kernel;
        let tol = Self::inversion_tol();
        if x <= self.head_at_split {
            let sigma = try_invert_monotone(|s| k.head(s), x, T::zero(), k.split_sigma, &tol)?;
            return Ok(Point {
                sigma,
                one_minus: T::one() - sigma,
            });
        }
        match self.quarter {
            Some(quarter) => {
                let rest = quarter - x;
                if rest <= T::zero() {
                    return Ok(Point {
                        sigma: T::one(),
                        one_minus: T::zero(),
                    });
                }
                let upper = k.split_tail_upper();
                let u = try_invert_monotone(|u| k.tail(u), rest, T::zero(), upper, &tol)?;
                let d = u.powf(k.tail_power());
                Ok(Point {
                    sigma: T::one() - d,
                    one_minus: d,
                })
            }
            None => {
                let rest = x - self.head_at_split;
                let w0 = k.split_log();
                let mut span = T::one();
                while k.log_tail(w0, w0 + span)? < rest {
                    span = span + span;
                    if !span.is_finite() {
                        return Err(crate::error::domain("argument too large to invert"));
                    }
                }
                let w = try_invert_monotone(|w| k.log_tail(w0, w), rest, w0, w0 + span, &tol)?;
                let d = (-w).exp();
                // keep the value inside the open range (-1, 1)
                let below_one = T::one() - T::epsilon() * lit(0.5);
                Ok(Point {
                    sigma: (T::one() - d).min(below_one),
                    one_minus: d,
                })
            }
        }
    }

    /// Odd, `4·quarter`-periodic extension symmetric about the quarter point, or the odd
    /// extension of the monotone inverse when the quarter is infinite.
    pub fn eval(&self, t: T) -> Result<WavePoint<T>> {
        let sign = if t < T::zero() { -T::one() } else { T::one() };
        let a = t.abs();
        let Some(quarter) = self.quarter else {
            let pt = self.invert(a)?;
            return Ok(WavePoint {
                value: sign * pt.sigma,
                one_minus: pt.one_minus,
                rising: true,
            });
        };
        let half = quarter + quarter;
        let period = half + half;
        let mut r = a - period * (a / period).floor();
        let mut negate = false;
        if r >= half {
            r = r - half;
            negate = true;
        }
        let (x, rising_half) = if r <= quarter { (r, true) } else { (half - r, false) };
        let x = x.max(T::zero()).min(quarter);
        let pt = self.invert(x)?;
        let value = if negate { -pt.sigma } else { pt.sigma };
        Ok(WavePoint {
            value: sign * value,
            one_minus: pt.one_minus,
            rising: rising_half != negate,
        })
    }
}
