use std::io::Write;

use gelliptic::spectra::{eigen_e, eigen_pe_flatcore, eigen_pe_interior, spectrum_at_lambda};
use gelliptic::{
    Branch, EigenKind, EigenSolution, EllipticContext, GenTrig, Modulus, PQPair, ProblemSpec,
    SpectrumReport, Tolerance,
};
use serde_json::{json, Map, Value};

use crate::args::{
    ConstArgs, ConstName, EigenArgs, EvalArgs, Format, FunctionName, Problem, SpectrumArgs,
};
use crate::output::{emit, grid, pretty, significant15, FunctionTrace};
use crate::CliError;

fn check_samples(samples: usize) -> Result<(), CliError> {
    if samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {samples}")));
    }
    Ok(())
}

fn meta(entries: &[(&str, Value)]) -> Map<String, Value> {
    entries
        .iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

pub fn cmd_const(args: &ConstArgs, tol: Tolerance<f64>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let pair = PQPair::new(args.p, args.q)?;
    let (key, value) = match args.name {
        ConstName::Pi => {
            let half = GenTrig::with_tolerance(pair, tol)?.half_period();
            let v = half.value().ok_or_else(|| {
                CliError::Usage(format!("π_pq is infinite for p ≤ 1 (p = {})", args.p))
            })?;
            ("pi_pq", v)
        }
        ConstName::K => {
            let k = args
                .k
                .ok_or_else(|| CliError::Usage("--k is required for K".into()))?;
            let ctx = EllipticContext::with_tolerance(pair, Modulus::new(k)?, tol)?;
            ("K_pq", ctx.complete_k()?)
        }
    };
    let text = match args.output.format {
        Format::Csv => format!("{}\n", significant15(value)),
        Format::Json => pretty(&json!({ key: value })),
    };
    emit(&text, args.output.out.as_deref(), stdout)
}

pub fn eval_trace(args: &EvalArgs, tol: Tolerance<f64>) -> Result<FunctionTrace, CliError> {
    check_samples(args.samples)?;
    if !(args.from < args.to) {
        return Err(CliError::Usage(format!(
            "--from must be below --to, got [{}, {}]",
            args.from, args.to
        )));
    }
    let pair = PQPair::new(args.p, args.q)?;
    let ts = grid(args.from, args.to, args.samples);
    let rows: Vec<(f64, f64)> = if args.function.is_elliptic() {
        let k = args.k.ok_or_else(|| {
            CliError::Usage(format!("--k is required for {}", args.function.name()))
        })?;
        let ctx = EllipticContext::with_tolerance(pair, Modulus::new(k)?, tol)?;
        ts.iter()
            .map(|&t| {
                let u = match args.function {
                    FunctionName::Sn => ctx.try_sn(t),
                    FunctionName::Cn => ctx.try_cn(t),
                    FunctionName::Dn => ctx.try_dn(t),
                    _ => ctx.am(t),
                }?;
                Ok((t, u))
            })
            .collect::<Result<_, CliError>>()?
    } else {
        let trig = GenTrig::with_tolerance(pair, tol)?;
        ts.iter()
            .map(|&t| {
                let u = match args.function {
                    FunctionName::Sin => trig.try_sin(t),
                    _ => trig.try_cos(t),
                }?;
                Ok((t, u))
            })
            .collect::<Result<_, CliError>>()?
    };
    let k = if args.function.is_elliptic() { json!(args.k) } else { Value::Null };
    Ok(FunctionTrace {
        meta: meta(&[
            ("fn", json!(args.function.name())),
            ("p", json!(args.p)),
            ("q", json!(args.q)),
            ("k", k),
            ("from", json!(args.from)),
            ("to", json!(args.to)),
            ("samples", json!(args.samples)),
        ]),
        rows,
    })
}

pub fn cmd_eval(args: &EvalArgs, tol: Tolerance<f64>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let trace = eval_trace(args, tol)?;
    emit(&trace.render(args.output.format), args.output.out.as_deref(), stdout)
}

fn kind_name(kind: EigenKind) -> &'static str {
    match kind {
        EigenKind::EInterior => "E",
        EigenKind::PEInterior => "PE-interior",
        EigenKind::PEFlatCore => "PE-flatcore",
        EigenKind::Trivial => "trivial",
    }
}

pub fn eigen_solution(args: &EigenArgs, tol: Tolerance<f64>) -> Result<EigenSolution<f64>, CliError> {
    let spec = ProblemSpec::new(PQPair::new(args.p, args.q)?, args.length, None)?.with_tolerance(tol);
    let solution = match args.problem {
        Problem::E => {
            if args.k.is_some() || args.tau.is_some() {
                return Err(CliError::Usage("--problem E takes --R, not --k or --tau".into()));
            }
            let r = args
                .amplitude
                .ok_or_else(|| CliError::Usage("--R is required for --problem E".into()))?;
            eigen_e(&spec, r, args.n)?
        }
        Problem::Pe => match (args.k, &args.tau) {
            (Some(k), None) => eigen_pe_interior(&spec, Modulus::new(k)?, args.n)?,
            (None, Some(tau)) => eigen_pe_flatcore(&spec, tau, args.n)?,
            _ => {
                return Err(CliError::Usage(
                    "--problem PE takes exactly one of --k (interior) or --tau (flat core)".into(),
                ))
            }
        },
    };
    Ok(solution)
}

pub fn eigen_trace(args: &EigenArgs, tol: Tolerance<f64>) -> Result<FunctionTrace, CliError> {
    check_samples(args.samples)?;
    let u = eigen_solution(args, tol)?;
    let rows = grid(0.0, args.length, args.samples)
        .into_iter()
        .map(|t| Ok((t, u.value(t)?)))
        .collect::<Result<_, CliError>>()?;
    let tau = match u.kind() {
        EigenKind::PEFlatCore => json!(u.pauses()),
        _ => Value::Null,
    };
    Ok(FunctionTrace {
        meta: meta(&[
            ("problem", json!(kind_name(u.kind()))),
            ("p", json!(args.p)),
            ("q", json!(args.q)),
            ("T", json!(args.length)),
            ("n", json!(args.n)),
            ("lambda", json!(u.lambda())),
            ("R", json!(u.amplitude())),
            ("k", json!(u.modulus().map(|m| m.value()))),
            ("tau", tau),
            ("samples", json!(args.samples)),
        ]),
        rows,
    })
}

pub fn cmd_eigen(args: &EigenArgs, tol: Tolerance<f64>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let trace = eigen_trace(args, tol)?;
    emit(&trace.render(args.output.format), args.output.out.as_deref(), stdout)
}

fn branch_json(branch: &Branch<f64>) -> Value {
    match branch {
        Branch::Upper { k, lambda_check } => json!({
            "type": "interior",
            "side": "upper",
            "k": k,
            "lambda_check": lambda_check,
        }),
        Branch::Lower { ell, lambda_check } => json!({
            "type": "interior",
            "side": "lower",
            "ell": ell,
            "lambda_check": lambda_check,
        }),
        Branch::FlatCore {
            budget,
            canonical_pauses,
            lambda_check,
        } => json!({
            "type": "flatcore",
            "tau": budget,
            "pauses": canonical_pauses,
            "lambda_check": lambda_check,
        }),
    }
}

pub fn spectrum_json(args: &SpectrumArgs, report: &SpectrumReport<f64>) -> Value {
    let modes: Vec<Value> = report
        .modes
        .iter()
        .map(|m| {
            json!({
                "n": m.n,
                "target": m.target,
                "branches": m.branches.iter().map(branch_json).collect::<Vec<_>>(),
                "unresolved_upper": m.unresolved_upper,
            })
        })
        .collect();
    json!({
        "meta": {
            "p": args.p,
            "q": args.q,
            "T": args.length,
            "lambda": args.lambda,
            "nmax": args.nmax,
        },
        "modes": modes,
        "thresholds": {
            "lambda_1": report.thresholds.lambda_1,
            "k_star": report.thresholds.k_star,
            "flat_core_onsets": report.thresholds.flat_core_onsets,
        },
    })
}

pub fn spectrum_report(args: &SpectrumArgs, tol: Tolerance<f64>) -> Result<Value, CliError> {
    let spec = ProblemSpec::new(PQPair::new(args.p, args.q)?, args.length, Some(args.lambda))?
        .with_tolerance(tol);
    let report = spectrum_at_lambda(&spec, args.nmax)?;
    Ok(spectrum_json(args, &report))
}

pub fn cmd_spectrum(args: &SpectrumArgs, tol: Tolerance<f64>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let value = spectrum_report(args, tol)?;
    emit(&pretty(&value), args.out.as_deref(), stdout)
}
