//! Closed-form eigenpairs of the Dirichlet problems on `(0, T)`
//!
//! ```text
//! (E)   (φ_p(u'))' + λ φ_q(u) = 0
//! (PE)  (φ_p(u'))' + λ φ_q(u)(1 - |u|^q) = 0
//! ```
//!
//! and the classification of every solution of (PE) at a fixed `λ`.
//!
//! Interior solutions of (PE) are parametrised by the modulus `k` through
//! `Φ(k) = (1+k^q)^(1/p) (2k^q/(1+k^q))^(1/q-1/p) K_pq(k)`; mode `j` is present at `λ`
//! exactly when `Φ(k) = (T/2j)(λ p*/q)^(1/p)` has a root. For `p > 2` the roots near
//! `k = 1` are replaced by flat-core solutions that sit at `±1` for a while.

use crate::error::{domain, Error, Result};
use crate::gelliptic::{quarter_period_only, EllipticContext, Modulus};
use crate::gtrig::{GenTrig, PQPair};
use crate::numerics::{
    fd_derivative, fd_step, try_invert_monotone, try_minimize_unimodal, DerivativeOrder,
    Tolerance,
};
use crate::real::{lit, signed_pow, Real};

/// Relative slack used to decide that `λ` sits exactly on a threshold.
pub const THRESHOLD_REL_TOL: f64 = 1e-10;
/// Default number of modes reported by [`spectrum_at_lambda`].
pub const DEFAULT_MAX_MODE: usize = 10;

const MODULUS_FLOOR: f64 = 1e-12;
/// `1 - k` below which `Φ` is replaced by its limit when `p > 2`.
const LIMIT_CLIP: f64 = 1e-10;
/// Smallest `1 - k` tried when `p ≤ 2`.
const DIVERGENT_CLIP_DIGITS: i32 = 12;
const SCAN_POINTS: usize = 64;
/// Samples closer than this many finite-difference steps to a kink are refused.
const SINGULAR_CLEARANCE: f64 = 10.0;

/// Exponents, interval length and (optionally) the eigenvalue parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec<T> {
    pq: PQPair<T>,
    length: T,
    lambda: Option<T>,
    tol: Tolerance<T>,
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(pq: PQPair<T>, length: T, lambda: Option<T>) -> Result<Self> {
        if !(pq.p() > T::one() && pq.q() > T::one()) {
            return Err(domain(format!(
                "the boundary value problems need p > 1 and q > 1, got p = {}, q = {}",
                pq.p(),
                pq.q()
            )));
        }
        if !(length > T::zero() && length.is_finite()) {
            return Err(domain(format!("interval length must be positive, got {length}")));
        }
        if let Some(l) = lambda {
            if !(l > T::zero() && l.is_finite()) {
                return Err(domain(format!("lambda must be positive, got {l}")));
            }
        }
        Ok(Self {
            pq,
            length,
            lambda,
            tol: Tolerance::default(),
        })
    }

    pub fn with_tolerance(self, tol: Tolerance<T>) -> Self {
        Self { tol, ..self }
    }

    pub fn with_lambda(self, lambda: T) -> Result<Self> {
        Self::new(self.pq, self.length, Some(lambda)).map(|s| s.with_tolerance(self.tol))
    }

    pub fn pair(&self) -> PQPair<T> {
        self.pq
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn lambda(&self) -> Option<T> {
        self.lambda
    }

    pub fn tolerance(&self) -> Tolerance<T> {
        self.tol
    }

    fn p(&self) -> T {
        self.pq.p()
    }

    fn q(&self) -> T {
        self.pq.q()
    }

    fn p_star(&self) -> T {
        self.p() / (self.p() - T::one())
    }

    /// `q / p*`, the constant in front of every eigenvalue formula.
    fn scale(&self) -> T {
        self.q() / self.p_star()
    }

    fn require_lambda(&self) -> Result<T> {
        self.lambda
            .ok_or_else(|| domain("this query needs lambda"))
    }

    fn flat_pair(&self) -> Result<PQPair<T>> {
        if !(self.p() > lit(2.0)) {
            return Err(Error::NoFlatCores(self.p().to_f64().unwrap_or(f64::NAN)));
        }
        self.pq.halved()
    }

    /// `π_{p/2,q}`.
    fn flat_pi(&self) -> Result<T> {
        let trig = GenTrig::with_tolerance(self.flat_pair()?, self.tol)?;
        Ok(trig.half_period().value().unwrap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    /// `R sin_pq(nπ_pq t/T)`, a solution of (E).
    EInterior,
    /// `R sn_pq(2nK t/T, k)` with `|u| < 1`, a solution of (PE).
    PEInterior,
    /// Solution of (PE) with `n` cores where `u ≡ ±1`.
    PEFlatCore,
    /// `u ≡ 0`.
    Trivial,
}

#[derive(Debug, Clone)]
enum Shape<T> {
    Zero,
    Trig {
        trig: GenTrig<T>,
        omega: T,
    },
    Elliptic {
        ctx: EllipticContext<T>,
        omega: T,
    },
    Cores {
        trig: GenTrig<T>,
        omega: T,
        /// `(T - τ)/(2n)`: length of each rising or falling flank.
        flank: T,
        /// `T_0 = 0, T_1, …, T_n`.
        breaks: Vec<T>,
    },
}

/// An eigenvalue together with its closed-form eigenfunction.
#[derive(Debug, Clone)]
pub struct EigenSolution<T> {
    kind: EigenKind,
    n: usize,
    lambda: T,
    spec: ProblemSpec<T>,
    amplitude: T,
    modulus: Option<Modulus<T>>,
    pauses: Vec<T>,
    shape: Shape<T>,
}

impl<T: Real> EigenSolution<T> {
    /// The zero solution, which solves both problems for every `λ`.
    pub fn trivial(spec: &ProblemSpec<T>) -> Self {
        Self {
            kind: EigenKind::Trivial,
            n: 0,
            lambda: spec.lambda.unwrap_or_else(T::zero),
            spec: *spec,
            amplitude: T::zero(),
            modulus: None,
            pauses: Vec::new(),
            shape: Shape::Zero,
        }
    }

    pub fn kind(&self) -> EigenKind {
        self.kind
    }

    /// Mode number; the eigenfunction has `n - 1` interior zeros.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    /// `max |u|`.
    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn modulus(&self) -> Option<Modulus<T>> {
        self.modulus
    }

    /// `τ_1, …, τ_n` for flat-core solutions, empty otherwise.
    pub fn pauses(&self) -> &[T] {
        &self.pauses
    }

    /// `τ = Σ τ_i`.
    pub fn total_pause(&self) -> T {
        self.pauses.iter().fold(T::zero(), |s, &x| s + x)
    }

    fn check_t(&self, t: T) -> Result<()> {
        if !(t >= T::zero() && t <= self.spec.length) {
            return Err(domain(format!(
                "t = {t} outside [0, {}]",
                self.spec.length
            )));
        }
        Ok(())
    }

    /// Flat-core segment containing `t`: `(j, T_{j-1}, T_j)` with `j` counted from 1.
    fn segment(breaks: &[T], t: T) -> (usize, T, T) {
        let n = breaks.len() - 1;
        let j = breaks[1..n].iter().take_while(|&&b| t > b).count() + 1;
        (j, breaks[j - 1], breaks[j])
    }

    fn parity(j: usize) -> T {
        if j % 2 == 1 {
            T::one()
        } else {
            -T::one()
        }
    }

    /// `u(t)` for `t ∈ [0, T]`.
    pub fn value(&self, t: T) -> Result<T> {
        self.check_t(t)?;
        Ok(match &self.shape {
            Shape::Zero => T::zero(),
            Shape::Trig { trig, omega } => self.amplitude * trig.try_sin(*omega * t)?,
            Shape::Elliptic { ctx, omega } => self.amplitude * ctx.try_sn(*omega * t)?,
            Shape::Cores {
                trig,
                omega,
                flank,
                breaks,
            } => {
                let (j, start, end) = Self::segment(breaks, t);
                let sign = Self::parity(j);
                if t <= start + *flank {
                    sign * trig.try_sin(*omega * (t - start))?
                } else if t >= end - *flank {
                    sign * trig.try_sin(*omega * (end - t))?
                } else {
                    sign
                }
            }
        })
    }

    /// `u(t)`, or `NaN` when evaluation fails.
    pub fn u(&self, t: T) -> T {
        self.value(t).unwrap_or_else(|_| T::nan())
    }

    /// `u'(t)` from the analytic derivatives `sin' = cos`, `sn' = cn·dn`.
    pub fn derivative(&self, t: T) -> Result<T> {
        self.check_t(t)?;
        Ok(match &self.shape {
            Shape::Zero => T::zero(),
            Shape::Trig { trig, omega } => self.amplitude * *omega * trig.try_cos(*omega * t)?,
            Shape::Elliptic { ctx, omega } => {
                let (_, cn, dn) = ctx.try_sn_cn_dn(*omega * t)?;
                self.amplitude * *omega * cn * dn
            }
            Shape::Cores {
                trig,
                omega,
                flank,
                breaks,
            } => {
                let (j, start, end) = Self::segment(breaks, t);
                let sign = Self::parity(j);
                if t <= start + *flank {
                    sign * *omega * trig.try_cos(*omega * (t - start))?
                } else if t >= end - *flank {
                    -sign * *omega * trig.try_cos(*omega * (end - t))?
                } else {
                    T::zero()
                }
            }
        })
    }

    /// Core intervals `[T_{j-1} + (T-τ)/2n, T_j - (T-τ)/2n]` where `u ≡ ±1`.
    pub fn core_intervals(&self) -> Vec<(T, T)> {
        match &self.shape {
            Shape::Cores { flank, breaks, .. } => breaks
                .windows(2)
                .map(|w| (w[0] + *flank, w[1] - *flank))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Points where `u'` vanishes or `φ_p(u')` fails to be smooth, plus both ends.
    pub fn singular_points(&self) -> Vec<T> {
        let length = self.spec.length;
        let mut points = vec![T::zero()];
        match &self.shape {
            Shape::Zero => {}
            Shape::Trig { .. } | Shape::Elliptic { .. } => {
                let n = lit::<T>(self.n as f64);
                for i in 0..self.n {
                    let odd = lit::<T>((2 * i + 1) as f64);
                    points.push(odd * length / (n + n));
                }
            }
            Shape::Cores { .. } => {
                for (a, b) in self.core_intervals() {
                    points.push(a);
                    if b > a {
                        points.push(b);
                    }
                }
            }
        }
        points.push(length);
        points
    }

    /// Refuses `t` within ten finite-difference steps of a singular point.
    fn check_clearance(&self, t: T) -> Result<()> {
        let reach = fd_step(t, DerivativeOrder::First) * lit(SINGULAR_CLEARANCE);
        if self
            .singular_points()
            .iter()
            .any(|&s| (t - s).abs() < reach)
        {
            return Err(Error::NearSingularSample(t.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    /// Central difference of `φ_m(u')` at `t`.
    fn flux_derivative(&self, m: T, t: T) -> Result<T> {
        let d = fd_derivative(
            |s| match self.derivative(s) {
                Ok(v) => signed_pow(v, m),
                Err(_) => T::nan(),
            },
            t,
            DerivativeOrder::First,
        );
        if !d.is_finite() {
            return Err(Error::QuadratureFailure(format!(
                "could not differentiate the flux at t = {t}"
            )));
        }
        Ok(d)
    }
}

/// `λ_n(R) = (q/p*)(nπ_pq/T)^p R^(p-q)` with eigenfunction `R sin_pq(nπ_pq t/T)`.
pub fn eigen_e<T: Real>(spec: &ProblemSpec<T>, amplitude: T, n: usize) -> Result<EigenSolution<T>> {
    if !(amplitude > T::zero() && amplitude.is_finite()) {
        return Err(domain(format!("amplitude must be positive, got {amplitude}")));
    }
    check_mode(n)?;
    let trig = GenTrig::with_tolerance(spec.pq, spec.tol)?;
    let pi = trig.half_period().value().unwrap();
    let omega = lit::<T>(n as f64) * pi / spec.length;
    let lambda = spec.scale() * omega.powf(spec.p()) * amplitude.powf(spec.p() - spec.q());
    Ok(EigenSolution {
        kind: EigenKind::EInterior,
        n,
        lambda,
        spec: *spec,
        amplitude,
        modulus: None,
        pauses: Vec::new(),
        shape: Shape::Trig { trig, omega },
    })
}

fn check_mode(n: usize) -> Result<()> {
    if n == 0 {
        return Err(domain("mode number must be at least 1"));
    }
    Ok(())
}

/// `k = (R^q/(2 - R^q))^(1/q)` for `0 < R < 1`.
pub fn k_from_amplitude<T: Real>(q: T, amplitude: T) -> Result<T> {
    if !(amplitude > T::zero() && amplitude < T::one()) {
        return Err(domain(format!("amplitude must lie in (0, 1), got {amplitude}")));
    }
    let rq = amplitude.powf(q);
    Ok((rq / (lit::<T>(2.0) - rq)).powf(q.recip()))
}

/// `R = (2k^q/(1 + k^q))^(1/q)` for `0 < k < 1`.
pub fn amplitude_from_k<T: Real>(q: T, k: T) -> Result<T> {
    if !(k > T::zero() && k < T::one()) {
        return Err(domain(format!("modulus must lie in (0, 1), got {k}")));
    }
    let kq = k.powf(q);
    Ok((lit::<T>(2.0) * kq / (T::one() + kq)).powf(q.recip()))
}

fn interior_lambda<T: Real>(spec: &ProblemSpec<T>, k: T, quarter: T, n: usize) -> T {
    let (p, q) = (spec.p(), spec.q());
    let kq = k.powf(q);
    let two = lit::<T>(2.0);
    spec.scale()
        * (T::one() + kq)
        * (two * kq / (T::one() + kq)).powf(p / q - T::one())
        * (two * lit::<T>(n as f64) * quarter / spec.length).powf(p)
}

/// `λ_n(k)` and `u = (2k^q/(1+k^q))^(1/q) sn_pq(2nK t/T, k)`, with `|u| < 1`.
pub fn eigen_pe_interior<T: Real>(
    spec: &ProblemSpec<T>,
    modulus: Modulus<T>,
    n: usize,
) -> Result<EigenSolution<T>> {
    let k = modulus.value();
    if !(k > T::zero()) {
        return Err(domain("interior solutions need 0 < k < 1, got k = 0"));
    }
    check_mode(n)?;
    let ctx = EllipticContext::with_tolerance(spec.pq, modulus, spec.tol)?;
    let quarter = ctx.complete_k()?;
    let omega = lit::<T>(2.0 * n as f64) * quarter / spec.length;
    Ok(EigenSolution {
        kind: EigenKind::PEInterior,
        n,
        lambda: interior_lambda(spec, k, quarter, n),
        spec: *spec,
        amplitude: amplitude_from_k(spec.q(), k)?,
        modulus: Some(modulus),
        pauses: Vec::new(),
        shape: Shape::Elliptic { ctx, omega },
    })
}

fn flat_lambda<T: Real>(spec: &ProblemSpec<T>, flat_pi: T, n: usize, tau: T) -> T {
    lit::<T>(2.0) * spec.scale() * (lit::<T>(n as f64) * flat_pi / (spec.length - tau)).powf(spec.p())
}

/// `Λ_n(τ) = (2q/p*)(nπ_{p/2,q}/(T - τ))^p` and the eigenfunction that rests at
/// `(-1)^(j-1)` for a time `τ_j` in its `j`-th hump.
pub fn eigen_pe_flatcore<T: Real>(
    spec: &ProblemSpec<T>,
    pauses: &[T],
    n: usize,
) -> Result<EigenSolution<T>> {
    let pair = spec.flat_pair()?;
    check_mode(n)?;
    if pauses.len() != n {
        return Err(domain(format!(
            "mode {n} needs {n} pauses, got {}",
            pauses.len()
        )));
    }
    if let Some(bad) = pauses.iter().find(|&&x| !(x >= T::zero() && x.is_finite())) {
        return Err(domain(format!("pauses must be non-negative, got {bad}")));
    }
    let tau = pauses.iter().fold(T::zero(), |s, &x| s + x);
    if !(tau < spec.length) {
        return Err(domain(format!(
            "total pause {tau} must be shorter than T = {}",
            spec.length
        )));
    }
    let trig = GenTrig::with_tolerance(pair, spec.tol)?;
    let flat_pi = trig.half_period().value().unwrap();
    let active = spec.length - tau;
    let nn = lit::<T>(n as f64);
    let mut breaks = Vec::with_capacity(n + 1);
    breaks.push(T::zero());
    let mut rested = T::zero();
    for (j, &pause) in pauses.iter().enumerate() {
        rested = rested + pause;
        breaks.push(active * lit::<T>((j + 1) as f64) / nn + rested);
    }
    Ok(EigenSolution {
        kind: EigenKind::PEFlatCore,
        n,
        lambda: flat_lambda(spec, flat_pi, n, tau),
        spec: *spec,
        amplitude: T::one(),
        modulus: None,
        pauses: pauses.to_vec(),
        shape: Shape::Cores {
            trig,
            omega: nn * flat_pi / active,
            flank: active / (nn + nn),
            breaks,
        },
    })
}

fn phi_at<T: Real>(spec: &ProblemSpec<T>, modulus: Modulus<T>) -> Result<T> {
    let (p, q) = (spec.p(), spec.q());
    let k = modulus.value();
    let kq = k.powf(q);
    let quarter = quarter_period_only(spec.pq, modulus, spec.tol)?;
    Ok((T::one() + kq).powf(p.recip())
        * (lit::<T>(2.0) * kq / (T::one() + kq)).powf(q.recip() - p.recip())
        * quarter)
}

/// `Φ(k) = (1+k^q)^(1/p) (2k^q/(1+k^q))^(1/q-1/p) K_pq(k)`.
pub fn phi<T: Real>(spec: &ProblemSpec<T>, modulus: Modulus<T>) -> Result<T> {
    if !(modulus.value() > T::zero()) {
        return Err(domain("Φ needs 0 < k < 1, got k = 0"));
    }
    phi_at(spec, modulus)
}

/// `lim_{k→1} Φ(k) = 2^(1/p-1) π_{p/2,q}`, finite only for `p > 2`.
pub fn phi_limit<T: Real>(spec: &ProblemSpec<T>) -> Result<T> {
    let flat_pi = spec.flat_pi().map_err(|e| match e {
        Error::NoFlatCores(_) => Error::Divergent(format!(
            "Φ(k) → ∞ as k → 1 for p ≤ 2 (p = {})",
            spec.p()
        )),
        other => other,
    })?;
    Ok(lit::<T>(2.0).powf(spec.p().recip() - T::one()) * flat_pi)
}

/// Right-hand side of the branch equation, `(T/2j)(λ p*/q)^(1/p)`.
pub fn branch_target<T: Real>(spec: &ProblemSpec<T>, j: usize, lambda: T) -> T {
    spec.length / lit::<T>(2.0 * j as f64) * (lambda / spec.scale()).powf(spec.p().recip())
}

fn modulus_from_r<T: Real>(q: T, r: T) -> Result<Modulus<T>> {
    Modulus::new((r / (T::one() - r)).powf(q.recip()))
}

fn r_from_k<T: Real>(q: T, k: T) -> T {
    let kq = k.powf(q);
    kq / (T::one() + kq)
}

/// Largest modulus at which `Φ` is evaluated directly.
fn modulus_ceiling<T: Real>(spec: &ProblemSpec<T>) -> T {
    if spec.p() > lit(2.0) {
        T::one() - lit::<T>(LIMIT_CLIP)
    } else {
        T::one() - lit::<T>(10f64.powi(-DIVERGENT_CLIP_DIGITS))
    }
}

/// Minimiser `k_*` of `Φ` and the first threshold `λ_1 = (q/p*)(2Φ(k_*)/T)^p`, for
/// `p < q`.
///
/// `Φ` is convex in `r = k^q/(1+k^q)`; a coarse scan in `r` brackets the minimum
/// before Brent's search refines it. Scan points where `Φ` cannot be evaluated
/// (moduli too close to 1 for `p ≤ 2`) are skipped.
pub fn lambda1_star<T: Real>(spec: &ProblemSpec<T>) -> Result<(T, T)> {
    let (p, q) = (spec.p(), spec.q());
    if !(p < q) {
        return Err(Error::NoInteriorMinimum {
            p: p.to_f64().unwrap_or(f64::NAN),
            q: q.to_f64().unwrap_or(f64::NAN),
        });
    }
    let r_lo = r_from_k(q, lit::<T>(MODULUS_FLOOR));
    let r_hi = r_from_k(q, modulus_ceiling(spec));
    let psi = |r: T| phi_at(spec, modulus_from_r(q, r)?);
    let step = (r_hi - r_lo) / lit::<T>(SCAN_POINTS as f64);
    let grid: Vec<T> = (0..=SCAN_POINTS)
        .map(|i| {
            if i == SCAN_POINTS {
                r_hi
            } else {
                r_lo + step * lit::<T>(i as f64)
            }
        })
        .collect();
    let mut best: Option<(usize, T)> = None;
    for (i, &r) in grid.iter().enumerate() {
        if let Ok(v) = psi(r) {
            if best.map_or(true, |(_, b)| v < b) {
                best = Some((i, v));
            }
        }
    }
    let (i, _) = best.ok_or_else(|| {
        Error::QuadratureFailure("Φ could not be evaluated on any scan point".into())
    })?;
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(SCAN_POINTS)];
    let tol = Tolerance {
        abs: r_lo,
        ..spec.tol
    };
    let (r_star, phi_star) = try_minimize_unimodal(psi, lo, hi, &tol)?;
    let k_star = modulus_from_r(q, r_star)?.value();
    let lambda_1 = spec.scale() * (lit::<T>(2.0) * phi_star / spec.length).powf(p);
    Ok((k_star, lambda_1))
}

fn root_tolerance<T: Real>() -> Tolerance<T> {
    Tolerance {
        rel: T::epsilon() * lit(4.0),
        abs: T::min_positive_value(),
        max_iter: 200,
    }
}

/// Solves `Φ(k) = target` on `[lo, hi]`, `Φ` monotone there. For `p > 2` the ceiling
/// point carries the analytic limit; for `p ≤ 2` the right end is pushed towards 1
/// one decade at a time until `Φ` exceeds the target.
fn solve_branch<T: Real>(spec: &ProblemSpec<T>, target: T, lo: T, hi: T, limit: Option<T>) -> Result<T> {
    let ceiling = modulus_ceiling(spec);
    let eval = |k: T| -> Result<T> {
        match limit {
            Some(l) if k >= ceiling => Ok(l),
            _ => phi_at(spec, Modulus::new(k)?),
        }
    };
    let tol = root_tolerance();
    if limit.is_some() || hi < ceiling {
        return try_invert_monotone(eval, target, lo, hi, &tol);
    }
    let mut left = lo;
    for digits in 1..=DIVERGENT_CLIP_DIGITS {
        let right = T::one() - lit::<T>(10f64.powi(-digits));
        if right <= left {
            continue;
        }
        match eval(right) {
            Ok(v) if v >= target => return try_invert_monotone(eval, target, left, right, &tol),
            Ok(_) => left = right,
            Err(Error::NearDivergentModulus { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    // the root lies above `left`, where K_pq is no longer evaluable
    Err(Error::NearDivergentModulus {
        k: left.to_f64().unwrap_or(f64::NAN),
        limit: crate::gelliptic::MAX_QUARTER_PERIOD,
    })
}

/// Splits an upper-root search into a resolved root or the lower bound it is
/// known to exceed.
fn upper_root<T: Real>(found: Result<T>) -> Result<std::result::Result<T, T>> {
    match found {
        Ok(k) => Ok(Ok(k)),
        Err(Error::NearDivergentModulus { k, .. }) => Ok(Err(lit(k))),
        Err(e) => Err(e),
    }
}

/// One family of solutions of mode `n` at the given `λ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Branch<T> {
    /// Root `k_n` of the branch equation on the large-amplitude side.
    Upper { k: T, lambda_check: T },
    /// Root `ℓ_n < k_*`, present only for `p < q`.
    Lower { ell: T, lambda_check: T },
    /// Flat-core family: every choice of `τ_i ≥ 0` with `Σ τ_i = budget`. The
    /// representative uses equal pauses.
    FlatCore {
        budget: T,
        canonical_pauses: Vec<T>,
        lambda_check: T,
    },
}

impl<T: Real> Branch<T> {
    /// `λ` recomputed from the forward formula at the recovered parameter.
    pub fn lambda_check(&self) -> T {
        match self {
            Branch::Upper { lambda_check, .. }
            | Branch::Lower { lambda_check, .. }
            | Branch::FlatCore { lambda_check, .. } => *lambda_check,
        }
    }

    /// The eigenfunction this branch stands for.
    pub fn solution(&self, spec: &ProblemSpec<T>, n: usize) -> Result<EigenSolution<T>> {
        match self {
            Branch::Upper { k, .. } => eigen_pe_interior(spec, Modulus::new(*k)?, n),
            Branch::Lower { ell, .. } => eigen_pe_interior(spec, Modulus::new(*ell)?, n),
            Branch::FlatCore {
                canonical_pauses, ..
            } => eigen_pe_flatcore(spec, canonical_pauses, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeReport<T> {
    pub n: usize,
    /// `(T/2n)(λ p*/q)^(1/p)`.
    pub target: T,
    pub branches: Vec<Branch<T>>,
    /// For `p ≤ 2` the upper root can lie closer to 1 than any modulus at which
    /// `K_pq` is evaluable. It then exists but is only known to exceed this value.
    pub unresolved_upper: Option<T>,
}

impl<T> ModeReport<T> {
    pub fn is_empty(&self) -> bool {
        self.branches.is_empty() && self.unresolved_upper.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds<T> {
    /// First threshold `λ_1` when `p < q`; mode `j` appears at `j^p λ_1`.
    pub lambda_1: Option<T>,
    pub k_star: Option<T>,
    /// `(2q/p*)(jπ_{p/2,q}/T)^p` for `j = 1..=n_max`, when `p > 2`.
    pub flat_core_onsets: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport<T> {
    pub lambda: T,
    pub modes: Vec<ModeReport<T>>,
    pub thresholds: Thresholds<T>,
}

fn at_or_above<T: Real>(x: T, threshold: T) -> bool {
    x >= threshold * (T::one() - lit::<T>(THRESHOLD_REL_TOL))
}

fn on_threshold<T: Real>(x: T, threshold: T) -> bool {
    (x - threshold).abs() <= lit::<T>(THRESHOLD_REL_TOL) * threshold
}

/// Every nontrivial solution of (PE) at `spec.lambda`, for modes `1..=n_max`.
///
/// Modes without solutions are reported with an empty branch list.
pub fn spectrum_at_lambda<T: Real>(spec: &ProblemSpec<T>, n_max: usize) -> Result<SpectrumReport<T>> {
    let lambda = spec.require_lambda()?;
    if n_max == 0 {
        return Err(domain("n_max must be at least 1"));
    }
    let (p, q) = (spec.p(), spec.q());
    let star = if p < q { Some(lambda1_star(spec)?) } else { None };
    let (flat_pi, limit) = if p > lit(2.0) {
        (Some(spec.flat_pi()?), Some(phi_limit(spec)?))
    } else {
        (None, None)
    };
    let onsets: Vec<T> = flat_pi
        .map(|fp| (1..=n_max).map(|j| flat_lambda(spec, fp, j, T::zero())).collect())
        .unwrap_or_default();
    let pi_pq = if p == q {
        Some(GenTrig::with_tolerance(spec.pq, spec.tol)?.half_period().value().unwrap())
    } else {
        None
    };

    let mut modes = Vec::with_capacity(n_max);
    for j in 1..=n_max {
        let target = branch_target(spec, j, lambda);
        let jj = lit::<T>(j as f64);
        let mut branches = Vec::new();
        let mut unresolved_upper = None;
        let flat = onsets.get(j - 1).is_some_and(|&onset| at_or_above(lambda, onset));
        let interior = |k: T| -> Result<T> {
            let quarter = quarter_period_only(spec.pq, Modulus::new(k)?, spec.tol)?;
            Ok(interior_lambda(spec, k, quarter, j))
        };

        match star {
            None => {
                let present = match pi_pq {
                    // p = q: Φ(0⁺) = π_pq/2
                    Some(pi) => {
                        let onset = spec.scale() * (jj * pi / spec.length).powf(p);
                        lambda > onset && !on_threshold(lambda, onset)
                    }
                    None => true,
                };
                if present && !flat {
                    match upper_root(solve_branch(spec, target, lit(MODULUS_FLOOR), modulus_ceiling(spec), limit))? {
                        Ok(k) => branches.push(Branch::Upper {
                            k,
                            lambda_check: interior(k)?,
                        }),
                        Err(bound) => unresolved_upper = Some(bound),
                    }
                }
            }
            Some((k_star, lambda_1)) => {
                let onset = jj.powf(p) * lambda_1;
                if on_threshold(lambda, onset) {
                    branches.push(Branch::Upper {
                        k: k_star,
                        lambda_check: interior(k_star)?,
                    });
                } else if lambda > onset {
                    if !flat {
                        let found = solve_branch(spec, target, k_star, modulus_ceiling(spec), limit)
                            .or_else(|e| degenerate_root(e, k_star));
                        match upper_root(found)? {
                            Ok(k) => branches.push(Branch::Upper {
                                k,
                                lambda_check: interior(k)?,
                            }),
                            Err(bound) => unresolved_upper = Some(bound),
                        }
                    }
                    let ell = solve_branch(spec, target, lit(MODULUS_FLOOR), k_star, limit)
                        .or_else(|e| degenerate_root(e, k_star))?;
                    branches.push(Branch::Lower {
                        ell,
                        lambda_check: interior(ell)?,
                    });
                }
            }
        }

        if flat {
            let fp = flat_pi.unwrap();
            let onset = onsets[j - 1];
            let budget = if on_threshold(lambda, onset) {
                T::zero()
            } else {
                let used = jj * fp * (lit::<T>(2.0) * spec.scale() / lambda).powf(p.recip());
                (spec.length - used).max(T::zero())
            };
            branches.push(Branch::FlatCore {
                budget,
                canonical_pauses: vec![budget / jj; j],
                lambda_check: flat_lambda(spec, fp, j, budget),
            });
        }
        modes.push(ModeReport {
            n: j,
            target,
            branches,
            unresolved_upper,
        });
    }

    Ok(SpectrumReport {
        lambda,
        modes,
        thresholds: Thresholds {
            lambda_1: star.map(|s| s.1),
            k_star: star.map(|s| s.0),
            flat_core_onsets: onsets,
        },
    })
}

/// Just above `j^p λ_1` both roots sit within the resolution of `k_*`; a failed
/// bracket there means the two have merged.
fn degenerate_root<T: Real>(e: Error, k_star: T) -> Result<T> {
    match e {
        Error::BracketFailure { .. } => Ok(k_star),
        other => Err(other),
    }
}

fn same_problem<T: Real>(spec: &ProblemSpec<T>, u: &EigenSolution<T>) -> Result<()> {
    if spec.pq != u.spec.pq || spec.length != u.spec.length {
        return Err(domain("solution was built for a different problem"));
    }
    Ok(())
}

/// Finite-difference left-hand side of (PE) at `t`, or of (E) for
/// [`EigenKind::EInterior`] solutions, evaluated with the solution's own `λ`.
pub fn residual_pe<T: Real>(spec: &ProblemSpec<T>, u: &EigenSolution<T>, t: T) -> Result<T> {
    same_problem(spec, u)?;
    if u.kind == EigenKind::Trivial {
        u.check_t(t)?;
        return Ok(T::zero());
    }
    u.check_clearance(t)?;
    let (p, q) = (spec.p(), spec.q());
    let flux = u.flux_derivative(p, t)?;
    let v = u.value(t)?;
    let source = match u.kind {
        EigenKind::EInterior => signed_pow(v, q),
        _ => signed_pow(v, q) * (T::one() - v.abs().powf(q)),
    };
    Ok(flux + u.lambda * source)
}

/// Eigenvalue `((p-2)q/p)(nπ_{p/2,q}/(T-τ))^(p/2)` of the `p/2`-Laplacian problem
/// that a flat-core solution satisfies wherever `|u| < 1`.
pub fn corollary_halfp<T: Real>(spec: &ProblemSpec<T>, u: &EigenSolution<T>) -> Result<T> {
    same_problem(spec, u)?;
    let flat_pi = spec.flat_pi()?;
    if u.kind != EigenKind::PEFlatCore {
        return Err(domain("the half-p identity applies to flat-core solutions only"));
    }
    let p = spec.p();
    let two = lit::<T>(2.0);
    let active = spec.length - u.total_pause();
    Ok((p - two) * spec.q() / p * (lit::<T>(u.n as f64) * flat_pi / active).powf(p / two))
}

/// Finite-difference residual of `(φ_{p/2}(u'))' + μ φ_q(u) = 0` at a point where
/// `|u| < 1`, with `μ` from [`corollary_halfp`].
pub fn corollary_residual<T: Real>(spec: &ProblemSpec<T>, u: &EigenSolution<T>, t: T) -> Result<T> {
    let mu = corollary_halfp(spec, u)?;
    if u
        .core_intervals()
        .iter()
        .any(|&(a, b)| t >= a && t <= b)
    {
        return Err(domain(format!("t = {t} lies on a flat core")));
    }
    u.check_clearance(t)?;
    let flux = u.flux_derivative(spec.p() / lit(2.0), t)?;
    Ok(flux + mu * signed_pow(u.value(t)?, spec.q()))
}
