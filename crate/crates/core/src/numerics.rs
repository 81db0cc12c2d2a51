//! Numerical kernels: endpoint-singular quadrature, bracketed inversion of monotone
//! functions, unimodal minimization and central finite differences.
//!
//! All routines are pure functions of their inputs and are generic over [`Real`].

use crate::error::{domain, Error, Result};
use crate::real::{lit, Real};

/// Stopping criteria shared by the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub rel: T,
    pub abs: T,
    pub max_iter: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(rel: T, abs: T, max_iter: usize) -> Result<Self> {
        if !(rel > T::zero()) || !(abs > T::zero()) || max_iter == 0 {
            return Err(Error::InvalidTolerance(format!(
                "rel = {rel}, abs = {abs}, max_iter = {max_iter}"
            )));
        }
        Ok(Self { rel, abs, max_iter })
    }

    /// Both `rel` and `abs` set to `value`, default iteration cap.
    pub fn uniform(value: T) -> Result<Self> {
        Self::new(value, value, 200)
    }

    /// Tolerance at the working precision of `T`, used for internal inversions.
    pub(crate) fn machine() -> Self {
        let e = T::epsilon() * lit(4.0);
        Self {
            rel: e,
            abs: e,
            max_iter: 200,
        }
    }

    fn target(&self, value: T) -> T {
        self.abs.max(self.rel * value.abs())
    }
}

impl<T: Real> Default for Tolerance<T> {
    /// `rel = abs = 1e-12` with at most 200 iterations; clamped to `256 ε` for
    /// scalar types too coarse to resolve `1e-12`.
    fn default() -> Self {
        let v = lit::<T>(1e-12).max(T::epsilon() * lit(256.0));
        Self {
            rel: v,
            abs: v,
            max_iter: 200,
        }
    }
}

/// Declares algebraic endpoint singularities of an integrand: near `a` it behaves like
/// `(s - a)^(-left_exponent)`, near `b` like `(b - s)^(-right_exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub left_exponent: T,
    pub right_exponent: T,
    pub tol: Tolerance<T>,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(left_exponent: T, right_exponent: T, tol: Tolerance<T>) -> Result<Self> {
        let spec = Self {
            left_exponent,
            right_exponent,
            tol,
        };
        spec.check()?;
        Ok(spec)
    }

    /// No endpoint singularities.
    pub fn regular(tol: Tolerance<T>) -> Self {
        Self {
            left_exponent: T::zero(),
            right_exponent: T::zero(),
            tol,
        }
    }

    pub fn right_singular(exponent: T, tol: Tolerance<T>) -> Result<Self> {
        Self::new(T::zero(), exponent, tol)
    }

    fn check(&self) -> Result<()> {
        for e in [self.left_exponent, self.right_exponent] {
            if !(e < T::one()) {
                return Err(Error::NonIntegrableSingularity(e.to_f64().unwrap_or(f64::NAN)));
            }
        }
        Ok(())
    }
}

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
/// Substitution exponents above this get one quadrature panel per decade of the gap.
const DECADE_SPLIT_M: f64 = 8.0;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

fn gauss_kronrod<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Result<Panel<T>> {
    let half = (hi - lo) * lit(0.5);
    let center = (hi + lo) * lit(0.5);
    let fc = f(center);
    let mut kronrod = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    let mut resabs = kronrod.abs();
    let mut values = [(T::zero(), T::zero()); 7];
    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * lit(XGK[j]);
        let (f1, f2) = (f(center - dx), f(center + dx));
        let w = lit::<T>(WGK[j]);
        kronrod = kronrod + w * (f1 + f2);
        resabs = resabs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + lit::<T>(WG[j / 2]) * (f1 + f2);
        }
        *slot = (f1, f2);
    }
    if !kronrod.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integrand on [{lo}, {hi}]"
        )));
    }
    let mean = kronrod * lit(0.5);
    let mut resasc = lit::<T>(WGK[7]) * (fc - mean).abs();
    for (j, (f1, f2)) in values.iter().enumerate() {
        resasc = resasc + lit::<T>(WGK[j]) * ((*f1 - mean).abs() + (*f2 - mean).abs());
    }
    let h = half.abs();
    let (resabs, resasc) = (resabs * h, resasc * h);
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != T::zero() && error != T::zero() {
        error = resasc * T::one().min((lit::<T>(200.0) * error / resasc).powf(lit(1.5)));
    }
    if resabs > T::min_positive_value() / (lit::<T>(50.0) * T::epsilon()) {
        error = error.max(lit::<T>(50.0) * T::epsilon() * resabs);
    }
    Ok(Panel {
        lo,
        hi,
        value: kronrod * half,
        error,
    })
}

/// Globally adaptive Gauss-Kronrod on a regular integrand.
fn adaptive<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T, tol: &Tolerance<T>) -> Result<T> {
    let mut panels = vec![gauss_kronrod(f, lo, hi)?];
    let mut frozen: Vec<Panel<T>> = Vec::new();
    for _ in 0..tol.max_iter {
        let total = panels.iter().chain(&frozen).fold(T::zero(), |s, p| s + p.value);
        let err = panels.iter().chain(&frozen).fold(T::zero(), |s, p| s + p.error);
        if err <= tol.target(total) {
            return Ok(total);
        }
        let Some(worst) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap())
            .map(|(i, _)| i)
        else {
            break;
        };
        let p = panels.swap_remove(worst);
        let mid = (p.lo + p.hi) * lit(0.5);
        if !(mid > p.lo && mid < p.hi)
            || (p.hi - p.lo) <= lit::<T>(100.0) * T::epsilon() * p.lo.abs().max(p.hi.abs())
        {
            frozen.push(p);
            continue;
        }
        panels.push(gauss_kronrod(f, p.lo, mid)?);
        panels.push(gauss_kronrod(f, mid, p.hi)?);
    }
    let total = panels.iter().chain(&frozen).fold(T::zero(), |s, p| s + p.value);
    let err = panels.iter().chain(&frozen).fold(T::zero(), |s, p| s + p.error);
    if err <= tol.target(total) {
        return Ok(total);
    }
    Err(Error::QuadratureFailure(format!(
        "estimated error {err} above tolerance after {} subdivisions on [{lo}, {hi}]",
        tol.max_iter
    )))
}

/// Integrates `f` over `[a, b]`, removing the declared endpoint singularities by the
/// substitution `s = b - v^(1/(1-α))` (mirrored at `a`) before adaptive Gauss-Kronrod
/// refinement. When both ends are singular the interval is split at its midpoint.
///
/// Near a singular endpoint `b - s` cannot be recovered from `s` without cancellation;
/// integrands that need it should use [`integrate_with_gaps`].
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T> {
    // `s` only carries the gap to the nearer endpoint up to rounding; rescale by the
    // declared power so that the leading singular behaviour sees the exact gap.
    let near = |s: T, end: T, exact_gap: T, alpha: T, inward: T| {
        if alpha == T::zero() {
            return f(s);
        }
        let s = if s == end { end + inward * end.abs() * T::epsilon() } else { s };
        let represented = (end - s).abs();
        f(s) * (represented / exact_gap).powf(alpha)
    };
    let midpoint = a + (b - a) * lit(0.5);
    integrate_with_gaps(
        |s, left, right| {
            if s < midpoint {
                near(s, a, left, spec.left_exponent, T::one())
            } else {
                near(s, b, right, spec.right_exponent, -T::one())
            }
        },
        a,
        b,
        spec,
    )
}

/// Like [`integrate`], but the integrand receives `(s, s - a, b - s)` with both gaps
/// computed exactly from the substitution variable.
pub fn integrate_with_gaps<T: Real, F: Fn(T, T, T) -> T>(
    f: F,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<T> {
    spec.check()?;
    if !(a <= b) {
        return Err(domain(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(T::zero());
    }
    let left = spec.left_exponent > T::zero();
    let right = spec.right_exponent > T::zero();
    let width = b - a;
    match (left, right) {
        (false, false) => adaptive(&|s| f(s, s - a, b - s), a, b, &spec.tol),
        (false, true) => substituted(&|gap| f(b - gap, width - gap, gap), width, spec.right_exponent, &spec.tol),
        (true, false) => substituted(&|gap| f(a + gap, gap, width - gap), width, spec.left_exponent, &spec.tol),
        (true, true) => {
            let half_width = width * lit(0.5);
            let half_tol = Tolerance {
                abs: spec.tol.abs * lit(0.5),
                ..spec.tol
            };
            let lower = substituted(
                &|gap| f(a + gap, gap, width - gap),
                half_width,
                spec.left_exponent,
                &half_tol,
            )?;
            let upper = substituted(
                &|gap| f(b - gap, width - gap, gap),
                width - half_width,
                spec.right_exponent,
                &half_tol,
            )?;
            Ok(lower + upper)
        }
    }
}

/// `∫_0^span h(gap) d(gap)` for `h ~ gap^(-alpha)`, via `gap = v^m`, `m = 1/(1-alpha)`.
fn substituted<T: Real, H: Fn(T) -> T>(h: &H, span: T, alpha: T, tol: &Tolerance<T>) -> Result<T> {
    let m = (T::one() - alpha).recip();
    let upper = span.powf(m.recip());
    let tiny = T::min_positive_value();
    let g = |v: T| {
        let gap = v.powf(m);
        if gap < tiny {
            // for large m the gap underflows long before v does; the regular part
            // gap^α h(gap) is continuous, so evaluate it at the smallest normal gap
            return h(tiny) * tiny.powf(alpha) * m;
        }
        // weight before m: h(gap) alone can sit within a factor m of overflow
        h(gap) * v.powf(m - T::one()) * m
    };
    if m <= lit(DECADE_SPLIT_M) {
        return adaptive(&g, T::zero(), upper, tol);
    }
    // For large m every decade of the gap is squeezed into a sliver of v near
    // `upper`, where GK nodes can miss it entirely. One panel per decade, down to
    // where the regular part no longer changes at working precision.
    let decades = (-T::epsilon().log10()).ceil().to_usize().unwrap_or(16) + 1;
    let panel_tol = Tolerance {
        abs: tol.abs / lit((decades + 1) as f64),
        ..*tol
    };
    let shrink = lit::<T>(10.0).powf(-m.recip());
    let mut hi = upper;
    let mut total = T::zero();
    for _ in 0..decades {
        let lo = hi * shrink;
        total = total + adaptive(&g, lo, hi, &panel_tol)?;
        hi = lo;
    }
    Ok(total + adaptive(&g, T::zero(), hi, &panel_tol)?)
}

/// Solves `F(x) = target` for strictly monotone `F` on `[lo, hi]`.
pub fn invert_monotone<T: Real, F: Fn(T) -> T>(
    f: F,
    target: T,
    lo: T,
    hi: T,
    tol: &Tolerance<T>,
) -> Result<T> {
    try_invert_monotone(|x| Ok(f(x)), target, lo, hi, tol)
}

/// [`invert_monotone`] for fallible functions.
///
/// Uses Brent's bracketing scheme (bisection safeguarding secant and inverse quadratic
/// steps). Stops once the bracket is narrower than `max(abs, rel·|x|)` or the residual
/// vanishes at working precision.
pub fn try_invert_monotone<T: Real, F: FnMut(T) -> Result<T>>(
    mut f: F,
    target: T,
    lo: T,
    hi: T,
    tol: &Tolerance<T>,
) -> Result<T> {
    if !(lo <= hi) {
        return Err(domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)? - target;
    let mut fb = f(b)? - target;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        let slack = tol.target(target);
        if fa.abs() <= slack && fa.abs() <= fb.abs() {
            return Ok(a);
        }
        if fb.abs() <= slack {
            return Ok(b);
        }
        let (low, high) = if fa < fb { (fa, fb) } else { (fb, fa) };
        return Err(Error::BracketFailure {
            target: target.to_f64().unwrap_or(f64::NAN),
            low: (low + target).to_f64().unwrap_or(f64::NAN),
            high: (high + target).to_f64().unwrap_or(f64::NAN),
        });
    }
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xtol = tol.abs.max(tol.rel * b.abs());
        let tol1 = two * T::epsilon() * b.abs() + half * xtol;
        let m = half * (c - b);
        if m.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if two * p < (lit::<T>(3.0) * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 { b + d } else { b + tol1 * m.signum() };
        fb = f(b)? - target;
    }
    Ok(b)
}

/// Locates the minimum of a unimodal `F` on `[lo, hi]` by Brent's golden-section /
/// parabolic-interpolation search. Returns `(x_min, F(x_min))`.
pub fn minimize_unimodal<T: Real, F: Fn(T) -> T>(
    f: F,
    lo: T,
    hi: T,
    tol: &Tolerance<T>,
) -> Result<(T, T)> {
    try_minimize_unimodal(|x| Ok(f(x)), lo, hi, tol)
}

/// [`minimize_unimodal`] for fallible functions.
///
/// The location is resolved to `max(abs, √ε·|x|)`; a function comparison cannot
/// resolve a smooth minimum more finely than that.
pub fn try_minimize_unimodal<T: Real, F: FnMut(T) -> Result<T>>(
    mut f: F,
    lo: T,
    hi: T,
    tol: &Tolerance<T>,
) -> Result<(T, T)> {
    if !(lo < hi) {
        return Err(domain(format!("empty interval [{lo}, {hi}]")));
    }
    let golden = lit::<T>(0.381_966_011_250_105_15);
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let sqrt_eps = T::epsilon().sqrt();
    let (mut a, mut b) = (lo, hi);
    let mut x = a + golden * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let mut d = T::zero();
    let mut e = T::zero();
    for _ in 0..tol.max_iter {
        let xm = half * (a + b);
        let tol1 = sqrt_eps * x.abs() + tol.abs / lit(3.0);
        let tol2 = two * tol1;
        if (x - xm).abs() <= tol2 - half * (b - a) {
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = two * (q - r);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (half * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if (u - a) < tol2 || (b - u) < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x >= xm { a - x } else { b - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok((x, fx))
}

/// Order of a central finite-difference derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Step used by [`fd_derivative`] at `t`: `ε^(1/3)·max(1,|t|)` for the first
/// derivative, `ε^(1/4)·max(1,|t|)` for the second.
pub fn fd_step<T: Real>(t: T, order: DerivativeOrder) -> T {
    let power = match order {
        DerivativeOrder::First => lit::<T>(1.0 / 3.0),
        DerivativeOrder::Second => lit::<T>(0.25),
    };
    let h = T::epsilon().powf(power) * T::one().max(t.abs());
    // make t ± h exactly representable
    (t + h) - t
}

/// Central finite-difference derivative of `f` at `t`.
pub fn fd_derivative<T: Real, F: Fn(T) -> T>(f: F, t: T, order: DerivativeOrder) -> T {
    let h = fd_step(t, order);
    match order {
        DerivativeOrder::First => (f(t + h) - f(t - h)) / (h + h),
        DerivativeOrder::Second => (f(t + h) - lit::<T>(2.0) * f(t) + f(t - h)) / (h * h),
    }
}
