//! Built-in invariant suites behind `gelliptic verify`.
//!
//! Each group collects checks of the form "observed ≤ limit" (or ≥ for growth
//! bounds). Random sample points come from a ChaCha8 stream seeded by `--seed`, so
//! a run is reproducible for a given seed.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use gelliptic::numerics::{fd_derivative, DerivativeOrder};
use gelliptic::spectra::{
    amplitude_from_k, branch_target, corollary_halfp, corollary_residual, eigen_e,
    eigen_pe_flatcore, eigen_pe_interior, k_from_amplitude, lambda1_star, phi, residual_pe,
    spectrum_at_lambda,
};
use gelliptic::{
    signed_pow, Branch, EigenSolution, EllipticContext, Error, GenTrig, Modulus, PQPair,
    ProblemSpec, Result,
};
use gelliptic_oracles as oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;

pub const GROUPS: [&str; 9] = [
    "classical",
    "closed-form",
    "identities",
    "ode-residual",
    "limits",
    "round-trip",
    "regimes",
    "flat-core",
    "corollary",
];

/// `(p, q)` pairs covering p < 2, p = 2, p > 2 against q < p, q = p, q > p.
pub const SWEEP: [(f64, f64); 6] = [(1.5, 1.5), (1.5, 3.0), (2.0, 1.5), (2.0, 2.0), (3.0, 2.0), (4.0, 6.0)];
pub const MODULI: [f64; 3] = [0.0, 0.5, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub observed: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.observed <= self.limit,
            Bound::AtLeast => self.observed >= self.limit,
        }
    }

    /// Observed value relative to the limit; above 1 means failure.
    pub fn severity(&self) -> f64 {
        if !self.observed.is_finite() {
            return f64::INFINITY;
        }
        match self.bound {
            Bound::AtMost if self.limit > 0.0 => self.observed / self.limit,
            Bound::AtMost => {
                if self.observed <= 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Bound::AtLeast => self.limit / self.observed.max(f64::MIN_POSITIVE),
        }
    }
}

#[derive(Debug, Default)]
pub struct Checks(Vec<Check>);

impl Checks {
    pub fn at_most(&mut self, label: impl Into<String>, observed: f64, limit: f64) {
        self.0.push(Check {
            label: label.into(),
            observed,
            limit,
            bound: Bound::AtMost,
        });
    }

    pub fn at_least(&mut self, label: impl Into<String>, observed: f64, limit: f64) {
        self.0.push(Check {
            label: label.into(),
            observed,
            limit,
            bound: Bound::AtLeast,
        });
    }

    /// A library error counts as a failed check.
    fn failed(&mut self, label: impl Into<String>, err: &Error) {
        self.at_most(format!("{}: {err}", label.into()), f64::NAN, 0.0);
    }
}

#[derive(Debug)]
pub struct GroupReport {
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl GroupReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    pub fn worst(&self) -> Option<&Check> {
        self.checks
            .iter()
            .max_by(|a, b| a.severity().partial_cmp(&b.severity()).unwrap_or(Ordering::Greater))
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let detail = match self.worst() {
            Some(c) => {
                let op = if c.bound == Bound::AtMost { "<=" } else { ">=" };
                format!("worst {:.3e} {op} {:.0e} ({})", c.observed, c.limit, c.label)
            }
            None => "no checks ran".to_string(),
        };
        format!(
            "{status}  {:<13} {:>4} checks  {:>6.2}s  {detail}",
            self.name,
            self.checks.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

fn group_rng(seed: u64, name: &str) -> ChaCha8Rng {
    // each group gets its own stream so --only sees the same points as a full run
    let salt = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

pub fn run_group(name: &str, seed: u64) -> std::result::Result<GroupReport, CliError> {
    let (name, body): (&'static str, fn(&mut ChaCha8Rng, &mut Checks) -> Result<()>) = match name {
        "classical" => ("classical", classical),
        "closed-form" => ("closed-form", closed_form),
        "identities" => ("identities", identities),
        "ode-residual" => ("ode-residual", ode_residual),
        "limits" => ("limits", limits),
        "round-trip" => ("round-trip", round_trip),
        "regimes" => ("regimes", regimes),
        "flat-core" => ("flat-core", flat_core),
        "corollary" => ("corollary", corollary),
        other => {
            return Err(CliError::Usage(format!(
                "unknown group {other:?}; expected one of {}",
                GROUPS.join(", ")
            )))
        }
    };
    let start = Instant::now();
    let mut rng = group_rng(seed, name);
    let mut checks = Checks::default();
    if let Err(e) = body(&mut rng, &mut checks) {
        checks.failed("aborted", &e);
    }
    Ok(GroupReport {
        name,
        checks: checks.0,
        elapsed: start.elapsed(),
    })
}

/// Runs the selected groups, printing one line per group. Returns whether all passed.
pub fn run(seed: u64, only: Option<&str>, stdout: &mut dyn Write) -> std::result::Result<bool, CliError> {
    let names: Vec<&str> = match only {
        Some(name) => vec![name],
        None => GROUPS.to_vec(),
    };
    let start = Instant::now();
    let mut failed = 0;
    for name in &names {
        let report = run_group(name, seed)?;
        if !report.passed() {
            failed += 1;
        }
        writeln!(stdout, "{}", report.line()).map_err(|e| CliError::Usage(e.to_string()))?;
        for c in report.checks.iter().filter(|c| !c.passed()) {
            writeln!(stdout, "      failed: {} = {:e} (limit {:e})", c.label, c.observed, c.limit)
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
    }
    let summary = if failed == 0 {
        format!("all {} groups passed (seed {seed}, {:.1}s)", names.len(), start.elapsed().as_secs_f64())
    } else {
        format!("{failed} of {} groups failed (seed {seed})", names.len())
    };
    writeln!(stdout, "{summary}").map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(failed == 0)
}

fn pair(p: f64, q: f64) -> Result<PQPair<f64>> {
    PQPair::new(p, q)
}

fn trig(p: f64, q: f64) -> Result<GenTrig<f64>> {
    GenTrig::new(pair(p, q)?)
}

fn context(p: f64, q: f64, k: f64) -> Result<EllipticContext<f64>> {
    EllipticContext::new(pair(p, q)?, Modulus::new(k)?)
}

fn spec(p: f64, q: f64, length: f64) -> Result<ProblemSpec<f64>> {
    ProblemSpec::new(pair(p, q)?, length, None)
}

fn half_period(f: &GenTrig<f64>) -> Result<f64> {
    f.half_period()
        .value()
        .ok_or_else(|| Error::Divergent("half period is infinite".into()))
}

/// Distance from `t` to the nearest odd multiple of `quarter`.
fn peak_distance(t: f64, quarter: f64) -> f64 {
    let x = (t / quarter - 1.0) / 2.0;
    (x - x.round()).abs() * 2.0 * quarter
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// `count` random points in `(lo, hi)` that keep `clearance` from every point of `avoid`.
fn sample_points(rng: &mut ChaCha8Rng, lo: f64, hi: f64, count: usize, avoid: impl Fn(f64) -> bool) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t = rng.gen_range(lo..hi);
        if !avoid(t) {
            out.push(t);
        }
    }
    out
}

fn classical(rng: &mut ChaCha8Rng, checks: &mut Checks) -> Result<()> {
    let f = trig(2.0, 2.0)?;
    checks.at_most("|π_22 - π|", (half_period(&f)? - PI).abs(), 1e-12);
    let ts: Vec<f64> = (0..200).map(|_| rng.gen_range(-7.0..7.0)).collect();
    checks.at_most("sin_22 vs sin", max_abs(ts.iter().map(|&t| f.sin(t) - t.sin())), 1e-9);
    checks.at_most("cos_22 vs cos", max_abs(ts.iter().map(|&t| f.cos(t) - t.cos())), 1e-9);

    let h = trig(1.0, 2.0)?;
    let ts: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..5.0)).collect();
    checks.at_most("sin_12 vs tanh", max_abs(ts.iter().map(|&t| h.sin(t) - t.tanh())), 1e-9);

    for i in 1..=9 {
        let k = i as f64 / 10.0;
        let ctx = context(2.0, 2.0, k)?;
        let quarter = ctx.complete_k()?;
        checks.at_most(format!("K_22({k}) vs AGM"), (quarter - oracle::complete_k(k)).abs(), 1e-9);
        let mut worst = 0.0f64;
        for _ in 0..80 {
            let t = rng.gen_range(-4.0 * quarter..4.0 * quarter);
            let (sn, cn, dn) = ctx.try_sn_cn_dn(t)?;
            let reference = oracle::jacobi(t, k);
            worst = worst
                .max((sn - reference.sn).abs())
                .max((cn - reference.cn).abs())
                .max((dn - reference.dn).abs());
        }
        checks.at_most(format!("sn,cn,dn_22(k = {k}) vs Landen"), worst, 1e-8);
        let t = rng.gen_range(0.0..quarter);
        checks.at_most(format!("am_22(k = {k}) vs Landen"), (ctx.am(t)? - oracle::jacobi(t, k).am).abs(), 1e-9);
    }
    Ok(())
}

fn closed_form(_: &mut ChaCha8Rng, checks: &mut Checks) -> Result<()> {
    for p in [1.5, 2.0, 3.0, 5.0] {
        let v = half_period(&trig(p, p)?)?;
        checks.at_most(format!("π_pp at p = {p}"), (v - oracle::pi_pp(p)).abs(), 1e-10);
    }
    for (p, q) in SWEEP {
        let ctx = context(p, q, 0.0)?;
        checks.at_most(
            format!("2K_pq(0) - π_pq at ({p}, {q})"),
            (2.0 * ctx.complete_k()? - half_period(ctx.trig())?).abs(),
            1e-12,
        );
    }
    for (p, q) in [(1.5, 2.0), (3.0, 2.0), (2.0, 4.0)] {
        for k in [0.3, 0.8] {
            let ours = context(p, q, k)?.complete_k()?;
            let reference = oracle::generalized_k(p, q, k, 4000);
            checks.at_most(format!("K_pq({k}) at ({p}, {q}) vs midpoint"), (ours - reference).abs(), 1e-8);
        }
    }

    let s = spec(2.0, 2.0, PI)?;
    let u = eigen_pe_interior(&s, Modulus::new(0.5)?, 1)?;
    checks.at_most("PE amplitude at k = 0.5", (u.amplitude() - (0.5f64 / 1.25).sqrt()).abs(), 1e-12);
    checks.at_most("PE peak value at k = 0.5", (u.value(PI / 2.0)? - (0.4f64).sqrt()).abs(), 1e-10);
    let expected = 1.25 * (2.0 * oracle::complete_k(0.5) / PI).powi(2);
    checks.at_most("PE λ at k = 0.5 vs AGM", (u.lambda() - expected).abs(), 1e-10);

    let e = eigen_e(&s, 1.0, 2)?;
    checks.at_most("E λ for sin(2t)", (e.lambda() - 4.0).abs(), 1e-12);
    let worst = (0..=100)
        .map(|i| PI * i as f64 / 100.0)
        .map(|t| Ok(e.value(t)? - (2.0 * t).sin()))
        .collect::<Result<Vec<_>>>()?;
    checks.at_most("E eigenfunction vs sin(2t)", max_abs(worst), 1e-9);

    // λ_1 for p = 2, q = 4 against a refined grid scan of the oracle Φ
    let (p, q) = (2.0, 4.0);
    let oracle_phi = |k: f64| {
        let kq = k.powf(q);
        (1.0 + kq).powf(1.0 / p) * (2.0 * kq / (1.0 + kq)).powf(1.0 / q - 1.0 / p) * oracle::generalized_k(p, q, k, 400)
    };
    let (k_grid, phi_grid) = oracle::grid_then_golden(oracle_phi, 1e-5, 1.0 - 1e-5, 2000);
    let s = spec(p, q, 1.0)?;
    let (k_star, lambda_1) = lambda1_star(&s)?;
    checks.at_most("k_* vs grid scan", (k_star - k_grid).abs(), 1e-5);
    checks.at_most("Φ(k_*) vs grid scan", (phi(&s, Modulus::new(k_star)?)? - phi_grid).abs(), 1e-8);
    checks.at_most(
        "λ_1 vs grid scan (relative)",
        (lambda_1 / (2.0 * (2.0 * phi_grid).powi(2)) - 1.0).abs(),
        1e-7,
    );
    Ok(())
}

fn identities(rng: &mut ChaCha8Rng, checks: &mut Checks) -> Result<()> {
    for (p, q) in SWEEP {
        let f = trig(p, q)?;
        let half = half_period(&f)?;
        let mut pyth = 0.0f64;
        let mut odd = 0.0f64;
        let mut periodic = 0.0f64;
        for _ in 0..40 {
            let t = rng.gen_range(-2.0 * half..2.0 * half);
            let (s, c) = (f.try_sin(t)?, f.try_cos(t)?);
            pyth = pyth.max((c.abs().powf(p) + s.abs().powf(q) - 1.0).abs());
            odd = odd.max((f.sin(-t) + s).abs());
            periodic = periodic.max((f.sin(t + 2.0 * half) - s).abs());
        }
        checks.at_most(format!("cos^p + sin^q = 1 at ({p}, {q})"), pyth, 1e-10);
        checks.at_most(format!("sin odd at ({p}, {q})"), odd, 0.0);
        checks.at_most(format!("sin 2π_pq-periodic at ({p}, {q})"), periodic, 1e-12);

        // the derivative is only Hölder at the peaks when p > 2
        let ts = sample_points(rng, 1e-3, 2.0 * half, 40, |t| peak_distance(t, half / 2.0) < 0.05);
        let d = max_abs(ts.iter().map(|&t| fd_derivative(|s| f.sin(s), t, DerivativeOrder::First) - f.cos(t)));
        checks.at_most(format!("sin' = cos at ({p}, {q})"), d, 1e-6);

        for k in MODULI {
            let e = context(p, q, k)?;
            let quarter = e.complete_k()?;
            let (mut sn_cn, mut dn_sn) = (0.0f64, 0.0f64);
            for _ in 0..40 {
                let t = rng.gen_range(-4.0 * quarter..4.0 * quarter);
                let (sn, cn, dn) = e.try_sn_cn_dn(t)?;
                sn_cn = sn_cn.max((cn.abs().powf(p) + sn.abs().powf(q) - 1.0).abs());
                dn_sn = dn_sn.max((dn.powf(p) + k.powf(q) * sn.abs().powf(q) - 1.0).abs());
            }
            checks.at_most(format!("cn^p + sn^q = 1 at ({p}, {q}, {k})"), sn_cn, 1e-10);
            checks.at_most(format!("dn^p + k^q sn^q = 1 at ({p}, {q}, {k})"), dn_sn, 1e-10);
            let ts = sample_points(rng, 1e-3, 4.0 * quarter, 40, |t| peak_distance(t, quarter) < 0.05);
            let d = max_abs(ts.iter().map(|&t| fd_derivative(|s| e.sn(s), t, DerivativeOrder::First) - e.cn(t) * e.dn(t)));
            checks.at_most(format!("sn' = cn dn at ({p}, {q}, {k})"), d, 1e-6);
        }
    }
    for p in [0.5, 1.0] {
        let f = trig(p, 2.0)?;
        let mut pyth = 0.0f64;
        for _ in 0..40 {
            let t = rng.gen_range(-20.0..20.0);
            let (s, c) = (f.try_sin(t)?, f.try_cos(t)?);
            pyth = pyth.max((c.powf(p) + s.abs().powf(2.0) - 1.0).abs());
        }
        checks.at_most(format!("cos^p + sin^q = 1 at ({p}, 2)"), pyth, 1e-10);
    }
    Ok(())
}

/// Finite-difference `(φ_p(u'))'` from the analytic `u'`.
fn flux_derivative(p: f64, du: impl Fn(f64) -> f64, t: f64) -> f64 {
    fd_derivative(|s| signed_pow(du(s), p), t, DerivativeOrder::First)
}

fn ode_residual(rng: &mut ChaCha8Rng, checks: &mut Checks) -> Result<()> {
    for (p, q) in SWEEP {
        let scale = q * (p - 1.0) / p;
        let f = trig(p, q)?;
        let half = half_period(&f)?;
        let ts = sample_points(rng, 0.02, 2.0 * half - 0.02, 50, |t| {
            peak_distance(t, half / 2.0) < 0.02 || (t - half).abs() < 0.02
        });
        let worst = max_abs(
            ts.iter()
                .map(|&t| flux_derivative(p, |s| f.cos(s), t) + scale * signed_pow(f.sin(t), q)),
        );
        checks.at_most(format!("sin_pq residual / scale at ({p}, {q})"), worst / scale, 1e-5);

        for k in MODULI {
            let e = context(p, q, k)?;
            let quarter = e.complete_k()?;
            let kq = k.powf(q);
            let ts = sample_points(rng, 0.02, 4.0 * quarter - 0.02, 50, |t| {
                peak_distance(t, quarter) < 0.02 || (t - 2.0 * quarter).abs() < 0.02
            });
            let worst = max_abs(ts.iter().map(|&t| {
                let u = e.sn(t);
                flux_derivative(p, |s| e.cn(s) * e.dn(s), t)
                    + scale * signed_pow(u, q) * (1.0 + kq - 2.0 * kq * u.abs().powf(q))
            }));
            checks.at_most(format!("sn_pq residual / scale at ({p}, {q}, {k})"), worst / scale, 1e-5);
        }
    }
    Ok(())
}

const LADDER: [f64; 3] = [1e-2, 1e-4, 1e-6];

/// Number of places where a sequence fails to decrease strictly.
fn increases(values: &[f64]) -> f64 {
    values.windows(2).filter(|w| !(w[0] > w[1])).count() as f64
}

fn limits(rng: &mut ChaCha8Rng, checks: &mut Checks) -> Result<()> {
    let target = half_period(&trig(2.0, 2.0)?)?;
    let errors = LADDER
        .iter()
        .map(|&d| {
            let ctx = EllipticContext::new(pair(4.0, 2.0)?, Modulus::from_complement(d)?)?;
            Ok((2.0 * ctx.complete_k()? - target).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    checks.at_most("|2K_42(1-δ) - π_22| non-decreasing steps", increases(&errors), 0.0);
    checks.at_most("|2K_42(1-δ) - π_22| at δ = 1e-6", errors[2], 1e-2);

    let ks = [LADDER[0], LADDER[2]]
        .iter()
        .map(|&d| EllipticContext::new(pair(2.0, 2.0)?, Modulus::from_complement(d)?)?.complete_k())
        .collect::<Result<Vec<_>>>()?;
    checks.at_least("K_22 growth from δ = 1e-2 to 1e-6", ks[1] - ks[0], 2.0);

    let ladder_check = |checks: &mut Checks, label: &str, p: f64, reference: &dyn Fn(f64) -> f64, ts: &[f64]| -> Result<()> {
        let contexts = LADDER
            .iter()
            .map(|&d| EllipticContext::new(pair(p, 2.0)?, Modulus::from_complement(d)?))
            .collect::<Result<Vec<_>>>()?;
        let mut violations = 0.0;
        for &t in ts {
            let errs: Vec<f64> = contexts.iter().map(|c| (c.sn(t) - reference(t)).abs()).collect();
            violations += increases(&errs);
        }
        checks.at_most(label, violations, 0.0);
        Ok(())
    };
    let half_sine = trig(2.0, 2.0)?;
    let ts: Vec<f64> = (0..20).map(|_| rng.gen_range(0.05..1.4)).collect();
    ladder_check(checks, "sn_42 → sin_22 non-decreasing errors", 4.0, &|t| half_sine.sin(t), &ts)?;
    let ts: Vec<f64> = (0..20).map(|_| rng.gen_range(0.1..3.0)).collect();
    ladder_check(checks, "sn_22 → tanh non-decreasing errors", 2.0, &f64::tanh, &ts)?;
    Ok(())
}

/// Recovered moduli of a mode, upper and lower.
fn moduli(branches: &[Branch<f64>]) -> (Option<f64>, Option<f64>) {
    let mut out = (None, None);
    for b in branches {
        match b {
            Branch::Upper { k, .. } => out.0 = Some(*k),
            Branch::Lower { ell, .. } => out.1 = Some(*ell),
            Branch::FlatCore { .. } => {}
        }
    }
    out
}

fn flat_budget(branches: &[Branch<f64>]) -> Option<f64> {
    branches.iter().find_map(|b| match b {
        Branch::FlatCore { budget, .. } => Some(*budget),
        _ => None,
    })
}

/// Random `(p, q, T, k, n)` with `p` and `q` in the given relation.
pub fn draw_problem(rng: &mut ChaCha8Rng, relation: Ordering) -> (f64, f64, f64, f64, usize) {
    let a: f64 = rng.gen_range(1.2..5.0);
    let b: f64 = rng.gen_range(1.2..5.0);
    let (p, q) = match relation {
        Ordering::Greater => (a.max(b) + 0.1, a.min(b)),
        Ordering::Equal => (a, a),
        Ordering::Less => (a.min(b), a.max(b) + 0.1),
    };
    (p, q, rng.gen_range(0.5..5.0), rng.gen_range(0.05..0.95), rng.gen_range(1..=4))
}

fn round_trip(rng: &mut ChaCha8Rng, checks: &mut Checks) -> Result<()> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        // near the peak 1 - sin_pq(t) falls below the f64 resolution of 1 once p is close to 1
        let (p, q) = (rng.gen_range(1.2..6.0), rng.gen_range(1.05..6.0));
        let f = trig(p, q)?;
        let t = rng.gen_range(0.0..0.45 * half_period(&f)?);
        worst = worst.max((f.arcsin(f.try_sin(t)?)? - t).abs());
    }
    checks.at_most("arcsin_pq(sin_pq(t)) - t, p ≥ 1.2", worst, 1e-9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = trig(rng.gen_range(0.2..0.8), rng.gen_range(1.05..5.0))?;
        let t = rng.gen_range(0.0..20.0);
        worst = worst.max((f.arcsin(f.try_sin(t)?)? - t).abs());
    }
    checks.at_most("arcsin_pq(sin_pq(t)) - t, p < 1", worst, 1e-9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let e = context(rng.gen_range(1.2..6.0), rng.gen_range(1.05..6.0), rng.gen_range(0.0..0.95))?;
        let t = rng.gen_range(0.0..0.9 * e.complete_k()?);
        worst = worst.max((e.arcsn(e.try_sn(t)?)? - t).abs());
    }
    checks.at_most("arcsn_pq(sn_pq(t)) - t", worst, 1e-9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let q: f64 = rng.gen_range(1.1..6.0);
        let r: f64 = rng.gen_range(0.001..0.999);
        worst = worst.max((amplitude_from_k(q, k_from_amplitude(q, r)?)? - r).abs());
    }
    checks.at_most("R(k(R)) - R", worst, 1e-14);

    for (relation, name) in [(Ordering::Greater, "p > q"), (Ordering::Equal, "p = q"), (Ordering::Less, "p < q")] {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let (p, q, length, k, n) = draw_problem(rng, relation);
            let s = spec(p, q, length)?;
            let lambda = eigen_pe_interior(&s, Modulus::new(k)?, n)?.lambda();
            let report = spectrum_at_lambda(&s.with_lambda(lambda)?, n)?;
            let (upper, lower) = moduli(&report.modes[n - 1].branches);
            let miss = [upper, lower]
                .into_iter()
                .flatten()
                .map(|found| (found - k).abs())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(miss);
        }
        checks.at_most(format!("k recovered from λ, {name}"), worst, 1e-8);
    }

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = rng.gen_range(2.2..6.0);
        let q = rng.gen_range(1.2..6.0);
        let length = rng.gen_range(1.0..10.0);
        let n = rng.gen_range(1..=4);
        let tau = rng.gen_range(0.0..0.9) * length;
        let s = spec(p, q, length)?;
        let pauses = vec![tau / n as f64; n];
        let lambda = eigen_pe_flatcore(&s, &pauses, n)?.lambda();
        let report = spectrum_at_lambda(&s.with_lambda(lambda)?, n)?;
        let miss = flat_budget(&report.modes[n - 1].branches).map_or(f64::INFINITY, |b| (b - tau).abs());
        worst = worst.max(miss);
    }
    checks.at_most("τ recovered from λ, p > 2", worst, 1e-8);
    Ok(())
}

fn regimes(_: &mut ChaCha8Rng, checks: &mut Checks) -> Result<()> {
    // p = q = 2, T = π: mode n exists iff λ > n²
    let s = spec(2.0, 2.0, PI)?;
    let mut wrong = 0.0;
    for n in 1..=5usize {
        let edge = (n * n) as f64;
        for (lambda, present_up_to) in [(edge, n - 1), (edge * (1.0 + 1e-9), n)] {
            let report = spectrum_at_lambda(&s.with_lambda(lambda)?, 5)?;
            for m in &report.modes {
                if m.is_empty() == (m.n <= present_up_to) {
                    wrong += 1.0;
                }
            }
        }
    }
    checks.at_most("p = q = 2: modes present iff λ > n²", wrong, 0.0);
    let report = spectrum_at_lambda(&s.with_lambda(1.0)?, 10)?;
    checks.at_most(
        "p = q = 2, λ = 1: nonempty modes",
        report.modes.iter().filter(|m| !m.is_empty()).count() as f64,
        0.0,
    );

    for (p, q) in [(2.0, 4.0), (1.5, 3.0), (3.0, 5.0)] {
        let s = spec(p, q, 1.0)?;
        let (k_star, lambda_1) = lambda1_star(&s)?;
        let lambda = 3.5f64.powf(p) * lambda_1;
        let s = s.with_lambda(lambda)?;
        let report = spectrum_at_lambda(&s, 5)?;
        let mut misplaced = 0.0;
        let mut mismatch = 0.0f64;
        for mode in &report.modes[..3] {
            let target = branch_target(&s, mode.n, lambda);
            let (k, ell) = moduli(&mode.branches);
            // for p > 2 the upper root may have run past k = 1 into a flat-core family
            let upper_ok = match k {
                Some(k) => {
                    mismatch = mismatch.max((phi(&s, Modulus::new(k)?)? - target).abs() / target);
                    k > k_star
                }
                None => flat_budget(&mode.branches).is_some(),
            };
            match ell {
                Some(ell) if ell < k_star && upper_ok => {
                    mismatch = mismatch.max((phi(&s, Modulus::new(ell)?)? - target).abs() / target);
                }
                _ => misplaced += 1.0,
            }
        }
        let extra = report.modes[3..].iter().filter(|m| !m.is_empty()).count() as f64;
        checks.at_most(format!("p < q ({p}, {q}): roots not straddling k_*"), misplaced + extra, 0.0);
        checks.at_most(format!("p < q ({p}, {q}): |Φ - target| / target at both roots"), mismatch, 1e-9);
    }

    for (p, q) in [(3.0, 2.0), (1.8, 1.3), (5.0, 2.5)] {
        let s = spec(p, q, 1.0)?.with_lambda(30.0)?;
        let report = spectrum_at_lambda(&s, 10)?;
        let ks: Vec<f64> = report.modes.iter().filter_map(|m| moduli(&m.branches).0).collect();
        let missing = (10 - ks.len()) as f64;
        checks.at_most(format!("p > q ({p}, {q}): k_j not decreasing for j ≤ 10"), increases(&ks) + missing, 0.0);
    }
    Ok(())
}

/// Worst `|residual| / λ` over `samples` interior points, skipping kinks.
fn worst_relative_residual(u: &EigenSolution<f64>, samples: usize) -> Result<(f64, usize)> {
    let length = u.spec().length();
    let mut worst = 0.0f64;
    let mut used = 0;
    for i in 1..=samples {
        let t = length * (i as f64 - 0.37) / samples as f64;
        match residual_pe(u.spec(), u, t) {
            Ok(r) => {
                worst = worst.max(r.abs() / u.lambda());
                used += 1;
            }
            Err(Error::NearSingularSample(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((worst, used))
}

fn flat_core(rng: &mut ChaCha8Rng, checks: &mut Checks) -> Result<()> {
    let (p, q, length) = (4.0, 2.0, 10.0);
    let s = spec(p, q, length)?;
    let flat_pi = half_period(&trig(p / 2.0, q)?)?;
    let p_star = p / (p - 1.0);
    let (mut off_core, mut boundary, mut residual, mut lambda_err) = (0.0, 0.0f64, 0.0f64, 0.0f64);
    let mut used = usize::MAX;
    for n in 1..=3usize {
        for _ in 0..5 {
            let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = weights.iter().sum();
            let tau = rng.gen_range(0.5..6.0);
            let pauses: Vec<f64> = weights.iter().map(|w| w / total * tau).collect();
            let u = eigen_pe_flatcore(&s, &pauses, n)?;
            for (j, (a, b)) in u.core_intervals().into_iter().enumerate() {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                for i in 0..=20 {
                    if u.value(a + (b - a) * i as f64 / 20.0)? != sign {
                        off_core += 1.0;
                    }
                }
            }
            boundary = boundary.max(u.value(0.0)?.abs()).max(u.value(length)?.abs());
            let (worst, count) = worst_relative_residual(&u, 60)?;
            residual = residual.max(worst);
            used = used.min(count);
            let expected = 2.0 * q / p_star * (n as f64 * flat_pi / (length - u.total_pause())).powf(p);
            lambda_err = lambda_err.max((u.lambda() - expected).abs() / expected);
        }
    }
    checks.at_most("core samples not exactly ±1", off_core, 0.0);
    checks.at_most("|u(0)|, |u(T)|", boundary, 1e-10);
    checks.at_most("residual / λ off breakpoints", residual, 1e-5);
    checks.at_least("residual samples used per solution", used as f64, 40.0);
    checks.at_most("Λ_n vs (2q/p*)(nπ_{p/2,q}/(T-τ))^p, relative", lambda_err, 1e-12);

    let u = eigen_pe_flatcore(&s, &[2.0], 1)?;
    let cores = u.core_intervals();
    let core_err = match cores.as_slice() {
        [(a, b)] => (a - 4.0).abs().max((b - 6.0).abs()),
        _ => f64::INFINITY,
    };
    checks.at_most("τ = [2] core is [4, 6]", core_err, 1e-12);
    Ok(())
}

fn corollary(rng: &mut ChaCha8Rng, checks: &mut Checks) -> Result<()> {
    let (p, q) = (4.0, 2.0);
    for n in 1..=3usize {
        let length = rng.gen_range(1.0..10.0);
        let s = spec(p, q, length)?;
        let u = eigen_pe_flatcore(&s, &vec![0.0; n], n)?;
        let mu = corollary_halfp(&s, &u)?;
        let reference = eigen_e(&spec(p / 2.0, q, length)?, 1.0, n)?.lambda();
        checks.at_most(format!("μ vs E_(p/2,q) eigenvalue, n = {n}, relative"), (mu - reference).abs() / reference, 1e-10);
        let mut worst = 0.0f64;
        let mut used = 0;
        for i in 1..=60 {
            let t = length * (i as f64 - 0.41) / 60.0;
            match corollary_residual(&s, &u, t) {
                Ok(r) => {
                    worst = worst.max(r.abs() / mu);
                    used += 1;
                }
                Err(Error::NearSingularSample(_)) | Err(Error::Domain(_)) => {}
                Err(e) => return Err(e),
            }
        }
        checks.at_most(format!("p/2 residual / μ, n = {n}"), worst, 1e-5);
        checks.at_least(format!("p/2 residual samples, n = {n}"), used as f64, 40.0);
    }
    Ok(())
}
