//! One function per command; each returns a report and the first failed
//! certified check, if any.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use lipfree_core::basis::{analyze_free, verify_norming, DyadicElement};
use lipfree_core::constants::{bm_bound, c_const, rho, tau, HolderExponent, PExponent};
use lipfree_core::free::{
    dual_lower_bound, exact_norm_p1, exact_norm_small, upper_bound_from, Decomposition, DualCertificate, FreeElement,
    DEFAULT_CAP,
};
use lipfree_core::lambda::{load_complex, CubeComplex};
use lipfree_core::metric::load_l1_space;
use lipfree_core::retraction::RetractionContext;
use lipfree_core::sampling::{estimate_lipschitz, SamplerConfig};
use lipfree_core::{Complex, Error};

use crate::config::{Command, RunConfig};

const TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum RunError {
    /// Bad flags, files or parameter ranges.
    Input(String),
    /// A certified check failed; names the invariant.
    Check(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Residual(_) | Error::Certificate(_) => RunError::Check(e.to_string()),
            other => RunError::Input(other.to_string()),
        }
    }
}

pub struct Outcome {
    pub report: Value,
    pub failure: Option<String>,
}

type Run = Result<Outcome, RunError>;

fn input(msg: impl Into<String>) -> RunError {
    RunError::Input(msg.into())
}

fn required<'a>(path: &'a Option<std::path::PathBuf>, flag: &str, cmd: Command) -> Result<&'a Path, RunError> {
    path.as_deref().ok_or_else(|| input(format!("{} needs {flag}", cmd.name())))
}

fn p_of(c: &RunConfig) -> Result<PExponent<f64>, RunError> {
    Ok(PExponent::new(c.p.unwrap_or(1.0))?)
}

fn alpha_of(c: &RunConfig) -> Result<HolderExponent<f64>, RunError> {
    Ok(HolderExponent::new(c.alpha.unwrap_or(0.5))?)
}

fn d_of(c: &RunConfig) -> Result<usize, RunError> {
    match c.d.unwrap_or(1) {
        0 => Err(input("--d must be positive")),
        d => Ok(d),
    }
}

fn complex_of(c: &RunConfig) -> Result<Complex, RunError> {
    match &c.input {
        Some(path) => Ok(load_complex(path)?),
        None => {
            let r = c.r.unwrap_or(1.0);
            Ok(CubeComplex::unit_cube(d_of(c)?, r)?)
        }
    }
}

fn element_of(c: &RunConfig, host: Arc<lipfree_core::Metric>) -> Result<FreeElement<f64>, RunError> {
    let path = required(&c.element, "--element", c.command.unwrap_or(Command::Norm))?;
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    FreeElement::parse(host, &text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn object<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value).expect("reports serialize") {
        Value::Object(map) => map,
        _ => unreachable!("reports are structs"),
    }
}

fn terms(decomp: &Decomposition<f64>) -> Vec<(f64, usize, usize)> {
    decomp.terms().iter().map(|t| (t.a, t.molecule.x, t.molecule.y)).collect()
}

#[derive(Serialize)]
struct NormReport {
    points: usize,
    support: usize,
    p: f64,
    alpha: Option<f64>,
    /// `"transport"` at p = 1, `"enumeration"` for small hosts, otherwise `"bounds"`.
    method: &'static str,
    norm: Option<f64>,
    lower_bound: f64,
    upper_bound: f64,
    decomposition: Vec<(f64, usize, usize)>,
}

pub fn norm(c: &RunConfig) -> Run {
    let p = p_of(c)?;
    let mut host = load_l1_space::<f64>(required(&c.input, "--in", Command::Norm)?)?;
    if let Some(a) = c.alpha {
        host = host.holder_distort(HolderExponent::new(a)?);
    }
    let host = Arc::new(host);
    let m = element_of(c, host.clone())?;

    let (transport, plan) = exact_norm_p1(&m)?;
    let exact = if p.get() == 1.0 {
        Some(("transport", transport, plan.clone()))
    } else if host.len() <= DEFAULT_CAP {
        let (v, decomp) = exact_norm_small(&m, p)?;
        Some(("enumeration", v, decomp))
    } else {
        None
    };
    let f: Vec<f64> = (0..host.len()).map(|z| host.dist(z, host.base())).collect();
    let lower = dual_lower_bound(&m, p, &DualCertificate::from_functions(&host, vec![f], 1))?;
    let upper = upper_bound_from(&m, p, &plan)?;

    let slack = |x: f64| TOL * x.abs().max(1.0);
    let failure = match &exact {
        Some((_, v, _)) if lower > v + slack(*v) => Some("dual lower bound below the norm"),
        Some((_, v, _)) if *v > upper + slack(upper) => Some("norm below the transport upper bound"),
        None if lower > upper + slack(upper) => Some("dual lower bound below the upper bound"),
        _ => None,
    };
    let report = NormReport {
        points: host.len(),
        support: m.support().len(),
        p: p.get(),
        alpha: c.alpha,
        method: exact.as_ref().map_or("bounds", |e| e.0),
        norm: exact.as_ref().map(|e| e.1),
        lower_bound: lower,
        upper_bound: upper,
        decomposition: terms(exact.as_ref().map_or(&plan, |e| &e.2)),
    };
    Ok(Outcome { report: Value::Object(object(&report)), failure: failure.map(String::from) })
}

pub fn retraction_verify(c: &RunConfig) -> Run {
    let ctx = RetractionContext::new(complex_of(c)?, p_of(c)?)?;
    let config = SamplerConfig {
        n_samples: c.samples.unwrap_or(1000),
        seed: c.seed.unwrap_or(0),
        exact_norms: false,
        include_witness: true,
    };
    let report = estimate_lipschitz(&ctx, &config)?;
    let failure = report.first_failure().map(String::from);
    Ok(Outcome { report: Value::Object(object(&report)), failure })
}

pub fn basis_verify(c: &RunConfig) -> Run {
    let report = verify_norming(d_of(c)?, alpha_of(c)?, p_of(c)?, c.kmax.unwrap_or(2))?;
    let failure = report.first_failure().map(String::from);
    Ok(Outcome { report: Value::Object(object(&report)), failure })
}

#[derive(Serialize)]
struct Coefficient {
    point: String,
    level: u32,
    coeff: f64,
}

#[derive(Serialize)]
struct DecomposeReport {
    d: usize,
    alpha: f64,
    p: f64,
    coefficients: Vec<Coefficient>,
    cost: f64,
    max_residual: f64,
}

/// Basis coefficients of an element over dyadic points of the cube; the
/// point file must list the origin as its base.
pub fn decompose(c: &RunConfig) -> Run {
    let (p, alpha) = (p_of(c)?, alpha_of(c)?);
    let a = alpha.get();
    let host = load_l1_space::<f64>(required(&c.input, "--in", Command::Decompose)?)?;
    let d = host.coords().and_then(|pts| pts.first()).map_or(0, Vec::len);
    let host = Arc::new(host.holder_distort(alpha));
    let m = element_of(c, host)?;
    let combination = analyze_free(d, alpha, &m)?;
    let residual = combination.synthesize(a).max_residual(&DyadicElement::from_free(&m)?, a);
    let report = DecomposeReport {
        d,
        alpha: a,
        p: p.get(),
        coefficients: combination
            .iter()
            .map(|(i, &coeff)| Coefficient { point: i.point().to_string(), level: i.level(), coeff })
            .collect(),
        cost: combination.cost(p, a),
        max_residual: residual,
    };
    let failure = (residual >= TOL).then(|| "synthesis of the coefficients reproduces the element".to_string());
    Ok(Outcome { report: Value::Object(object(&report)), failure })
}

#[derive(Serialize)]
struct BmReport {
    d: usize,
    alpha: f64,
    p: f64,
    rho: f64,
    tau: f64,
    /// `C(p, 2^d)`.
    c_p_2d: f64,
    /// `d^α C(p, 2^d)`.
    basis_bound: f64,
    /// `τ^d ρ^d`.
    molecule_bound: f64,
    bm_bound: f64,
}

pub fn bm_report(c: &RunConfig) -> Run {
    let (d, p, alpha) = (d_of(c)?, p_of(c)?, alpha_of(c)?);
    if d > 62 {
        return Err(input("--d must be at most 62"));
    }
    let (r, t) = (rho(p, alpha), tau(p, alpha, d as u32)?);
    let cp = c_const(p, 1u64 << d)?;
    let report = BmReport {
        d,
        alpha: alpha.get(),
        p: p.get(),
        rho: r,
        tau: t,
        c_p_2d: cp,
        basis_bound: (d as f64).powf(alpha.get()) * cp,
        molecule_bound: (t * r).powi(d as i32),
        bm_bound: bm_bound(p, alpha, d as u32)?,
    };
    Ok(Outcome { report: Value::Object(object(&report)), failure: None })
}

#[derive(Serialize)]
struct LambdaReport {
    d: usize,
    #[serde(rename = "R")]
    r: f64,
    complex: Vec<Vec<i64>>,
    n_samples: usize,
    seed: u64,
    max_partition_error: f64,
    min_weight: f64,
    kronecker_exact: bool,
}

/// Partition of unity at random points and the Kronecker property at every vertex.
pub fn lambda_check(c: &RunConfig) -> Run {
    let complex = complex_of(c)?;
    let n = c.samples.unwrap_or(1000);
    let seed = c.seed.unwrap_or(0);
    let cubes: Vec<Vec<i64>> = complex.offsets().cloned().collect();
    let scale = complex.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err = 0.0f64;
    let mut min_weight = f64::INFINITY;
    for _ in 0..n {
        let w = &cubes[rng.gen_range(0..cubes.len())];
        let x: Vec<f64> = w.iter().map(|&o| (o as f64 + rng.gen::<f64>()) * scale).collect();
        let support = complex.lambda_support(&x)?;
        max_err = max_err.max((support.iter().map(|s| s.weight).sum::<f64>() - 1.0).abs());
        min_weight = support.iter().map(|s| s.weight).fold(min_weight, f64::min);
    }
    let vertices = complex.vertices();
    let mut kronecker = true;
    for u in &vertices {
        let at = complex.vertex_coords(u);
        for v in &vertices {
            kronecker &= complex.lambda(v, &at)? == if u == v { 1.0 } else { 0.0 };
        }
    }
    let failure = if max_err > 1e-12 {
        Some("weights sum to one")
    } else if min_weight < 0.0 {
        Some("weights are nonnegative")
    } else if !kronecker {
        Some("vertex weights are Kronecker deltas")
    } else {
        None
    };
    let report = LambdaReport {
        d: complex.dim(),
        r: scale,
        complex: cubes,
        n_samples: n,
        seed,
        max_partition_error: max_err,
        min_weight: if n == 0 { 0.0 } else { min_weight },
        kronecker_exact: kronecker,
    };
    Ok(Outcome { report: Value::Object(object(&report)), failure: failure.map(String::from) })
}

/// Dispatches and wraps the report with the command name and status.
pub fn run(c: &RunConfig) -> Result<Outcome, RunError> {
    let command = c.command.ok_or_else(|| input("--command is required"))?;
    let Outcome { report, failure } = match command {
        Command::Norm => norm(c),
        Command::RetractionVerify => retraction_verify(c),
        Command::BasisVerify => basis_verify(c),
        Command::Decompose => decompose(c),
        Command::BmReport => bm_report(c),
        Command::LambdaCheck => lambda_check(c),
    }?;
    let mut out = Map::new();
    out.insert("command".into(), Value::String(command.name().into()));
    if let Value::Object(fields) = report {
        out.extend(fields);
    }
    out.insert("status".into(), Value::String(if failure.is_some() { "failed" } else { "ok" }.into()));
    out.insert("failed_invariant".into(), failure.clone().map_or(Value::Null, Value::String));
    Ok(Outcome { report: Value::Object(out), failure })
}
