//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lipfree_core::basis::{
    analyze, basis_norm_check, hat_decompose, hat_identity, line_path, verify_norming, BasisCombination, BasisIndex,
    Hat,
};
use lipfree_core::constants::{c_const_sup_oracle, HolderExponent, PExponent};
use lipfree_core::dyadic::{dyadic_grid, DyadicPoint, DyadicScalar};
use lipfree_core::free::{exact_norm_p1, exact_norm_small, FreeElement};
use lipfree_core::lambda::CubeComplex;
use lipfree_core::metric::PointedFiniteMetric;
use lipfree_core::retraction::{lower_bound_witness, rescale_check, RetractionContext};
use lipfree_core::sampling::{estimate_lipschitz, SamplerConfig};

type Check = Result<String, String>;

/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Check);

fn pe(p: f64) -> PExponent<f64> {
    PExponent::new(p).unwrap()
}

fn al(a: f64) -> HolderExponent<f64> {
    HolderExponent::new(a).unwrap()
}

/// `n^(1/p - 1)`.
fn c_closed(p: f64, n: f64) -> f64 {
    n.powf(1.0 / p - 1.0)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn constant_formula() -> Check {
    let mut worst = 0.0f64;
    for &p in &[1.0, 0.75, 0.5, 0.25] {
        for n in 1..=16u64 {
            let oracle = c_const_sup_oracle(pe(p), n, 10_000).map_err(|e| e.to_string())?;
            let exact = c_closed(p, n as f64);
            let rel = (oracle - exact).abs() / exact;
            worst = worst.max(rel);
            ensure(rel <= 1e-3, || format!("p = {p}, n = {n}: oracle {oracle} vs {exact}"))?;
        }
    }
    Ok(format!("max relative gap {worst:.1e}"))
}

fn random_complex(rng: &mut ChaCha8Rng, d: usize) -> CubeComplex<f64> {
    let count = rng.gen_range(1..=4);
    let mut cubes = vec![vec![0i64; d]];
    while cubes.len() < count {
        let w: Vec<i64> = (0..d).map(|_| rng.gen_range(-1..=2)).collect();
        if !cubes.contains(&w) {
            cubes.push(w);
        }
    }
    let scale = rng.gen_range(0.25..3.0);
    CubeComplex::new(d, scale, cubes, vec![0; d]).unwrap()
}

fn lambda_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut points = 0;
    while points < 10_000 {
        let d = rng.gen_range(1..=3);
        let complex = random_complex(&mut rng, d);
        let cubes: Vec<Vec<i64>> = complex.offsets().cloned().collect();
        for _ in 0..250 {
            let w = &cubes[rng.gen_range(0..cubes.len())];
            let x: Vec<f64> = w.iter().map(|&c| (c as f64 + rng.gen::<f64>()) * complex.scale()).collect();
            let support = complex.lambda_support(&x).map_err(|e| e.to_string())?;
            let sum: f64 = support.iter().map(|vw| vw.weight).sum();
            worst = worst.max((sum - 1.0).abs());
            ensure((sum - 1.0).abs() <= 1e-12, || format!("weights at {x:?} sum to {sum}"))?;
            points += 1;
        }
        let vertices = complex.vertices();
        for u in &vertices {
            let at = complex.vertex_coords(u);
            for v in &vertices {
                let value = complex.lambda(v, &at).map_err(|e| e.to_string())?;
                let expected = if u == v { 1.0 } else { 0.0 };
                ensure(value == expected, || format!("Λ({v:?}, {u:?}) = {value}"))?;
            }
        }
    }
    Ok(format!("{points} points, max |Σ Λ − 1| = {worst:.1e}"))
}

/// Shortest-path closure of a random symmetric matrix: always a metric.
fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> PointedFiniteMetric<f64> {
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let r = rng.gen_range(0.1..3.0);
            dist[i][j] = r;
            dist[j][i] = r;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    PointedFiniteMetric::from_matrix(dist, 0).unwrap()
}

fn random_element(rng: &mut ChaCha8Rng, host: &Arc<PointedFiniteMetric<f64>>) -> FreeElement<f64> {
    let weights: Vec<(usize, f64)> = (1..host.len()).map(|i| (i, rng.gen_range(-2.0..2.0))).collect();
    FreeElement::from_weights(host.clone(), weights).unwrap()
}

fn p1_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = rng.gen_range(2..=6);
        let host = Arc::new(random_metric(&mut rng, n));
        let m = random_element(&mut rng, &host);
        let (flow, _) = exact_norm_p1(&m).map_err(|e| e.to_string())?;
        let (enumerated, _) = exact_norm_small(&m, PExponent::one()).map_err(|e| e.to_string())?;
        let gap = (flow - enumerated).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-7, || format!("case {case}: transport {flow} vs enumeration {enumerated}"))?;
    }
    Ok(format!("100 spaces, max gap {worst:.1e}"))
}

fn witness_values() -> Check {
    let mut worst = 0.0f64;
    for d in 1..=3usize {
        for &p in &[1.0, 0.75, 0.5] {
            let (_, w) = lower_bound_witness(d, pe(p)).map_err(|e| e.to_string())?;
            let expected = c_closed(p, (1u64 << (d - 1)) as f64);
            for (name, v) in [("dual", w.certified_value), ("upper", w.upper_value)] {
                let gap = (v - expected).abs();
                worst = worst.max(gap);
                ensure(gap <= 1e-9, || format!("d = {d}, p = {p}: {name} bound {v} vs {expected}"))?;
            }
        }
    }
    Ok(format!("9 configurations, max gap {worst:.1e}"))
}

fn complexes(d: usize) -> Vec<(f64, Vec<Vec<i64>>)> {
    let e = |i: usize| -> Vec<i64> { (0..d).map(|j| (j == i) as i64).collect() };
    let origin = vec![0; d];
    let far: Vec<i64> = vec![2; d];
    let mut second = e(0);
    second[d - 1] += if d > 1 { 1 } else { 0 };
    vec![
        (1.0, vec![origin.clone()]),
        (0.5, vec![origin.clone(), e(0)]),
        (2.0, vec![origin.clone(), e(0), second]),
        (1.5, vec![origin, e(0), e(d - 1), far]),
    ]
}

fn retraction_upper_bound() -> Check {
    let mut worst_ratio = 0.0f64;
    let mut worst_residual = 0.0f64;
    let mut configs = 0;
    for d in 1..=3usize {
        for (scale, cubes) in complexes(d) {
            for &p in &[1.0, 0.5] {
                let complex = CubeComplex::new(d, scale, cubes.clone(), vec![0; d]).map_err(|e| e.to_string())?;
                let ctx = RetractionContext::new(complex, pe(p)).map_err(|e| e.to_string())?;
                let config = SamplerConfig { n_samples: 1000, seed: 17 + configs, exact_norms: false, include_witness: false };
                let r = estimate_lipschitz(&ctx, &config).map_err(|e| e.to_string())?;
                let n = |k: f64| c_closed(p, k);
                let bound = n((1u64 << (d - 1)) as f64) * n(d as f64) * n(3.0);
                worst_ratio = worst_ratio.max(r.max_upper_cost_ratio / bound);
                worst_residual = worst_residual.max(r.max_residual);
                ensure(r.max_upper_cost_ratio <= bound * (1.0 + 1e-9), || {
                    format!("d = {d}, cubes {cubes:?}, p = {p}: cost ratio {} > {bound}", r.max_upper_cost_ratio)
                })?;
                ensure(r.max_residual <= 1e-9, || {
                    format!("d = {d}, cubes {cubes:?}, p = {p}: residual {:e}", r.max_residual)
                })?;
                configs += 1;
            }
        }
    }
    Ok(format!(
        "{configs} configurations x 1000 pairs, max cost/bound {worst_ratio:.3}, max residual {worst_residual:.1e}"
    ))
}

fn hat_expansion() -> Check {
    let frame = DyadicPoint::new(vec![0], 0);
    let (u1, u2) = (DyadicScalar::ZERO, DyadicScalar::ONE);
    let mut worst_residual = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for &alpha in &[0.25, 0.5, 0.75] {
        for num in 0..=1024i64 {
            let v = DyadicScalar::new(num, 10);
            let hat: Hat<f64> = hat_decompose(u1, u2, v, al(alpha)).map_err(|e| e.to_string())?;
            let (lhs, rhs) = hat_identity(&frame, 0, u1, u2, v, &hat, alpha);
            let residual = lhs.max_residual(&rhs, alpha);
            worst_residual = worst_residual.max(residual);
            ensure(residual <= 1e-9, || format!("α = {alpha}, v = {v}: residual {residual:e}"))?;
            ensure(hat.mu1 >= 0.0 && hat.mu2 >= 0.0 && (hat.mu1 + hat.mu2 - 1.0).abs() <= 1e-12, || {
                format!("α = {alpha}, v = {v}: μ = ({}, {})", hat.mu1, hat.mu2)
            })?;
            ensure(hat.terms.windows(2).all(|w| w[0].level < w[1].level), || format!("v = {v}: repeated level"))?;
            for &p in &[1.0, 0.5] {
                let cost = (hat.terms.iter().map(|t| t.nu.abs().powf(p)).sum::<f64>()).powf(1.0 / p);
                let bound = 2f64.powf(-alpha) * (1.0 / (1.0 - 2f64.powf(-p * alpha))).powf(1.0 / p);
                worst_ratio = worst_ratio.max(cost / bound);
                ensure(cost <= bound, || format!("α = {alpha}, p = {p}, v = {v}: cost {cost} > {bound}"))?;
            }
        }
    }
    Ok(format!("max residual {worst_residual:.1e}, max cost/bound {worst_ratio:.4}"))
}

fn dyadic_paths() -> Check {
    let n = 8u32;
    let top = 1i64 << n;
    let params: Vec<(f64, f64)> =
        [1.0, 0.5].iter().flat_map(|&p| [0.25, 0.5, 0.75].map(move |a| (p, a))).collect();
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for x in 0..=top {
        for y in 0..=top {
            if x == y {
                continue;
            }
            let (u, v) = (DyadicScalar::new(x, n), DyadicScalar::new(y, n));
            let path = line_path(u, v).map_err(|e| e.to_string())?;
            ensure(path.first() == Some(&u) && path.last() == Some(&v), || format!("{u} -> {v}: wrong endpoints"))?;
            for w in path.windows(2) {
                let gap = (w[1] - w[0]).abs();
                let k = gap.level();
                let on_grid = |s: DyadicScalar| s.level() <= k;
                ensure(gap.numerator() == 1 && k <= n && on_grid(w[0]) && on_grid(w[1]), || {
                    format!("{u} -> {v}: step {} -> {} is not mesh-adjacent", w[0], w[1])
                })?;
                ensure(w[0] >= u.min(v) && w[1] <= u.max(v) && w[1] >= u.min(v) && w[0] <= u.max(v), || {
                    format!("{u} -> {v}: leaves [u, v]")
                })?;
            }
            let length = (u - v).abs().to_f64();
            for &(p, a) in &params {
                let lhs: f64 = path.windows(2).map(|w| (w[1] - w[0]).abs().to_f64().powf(p * a)).sum::<f64>().powf(1.0 / p);
                let rhs = 2f64.powf(1.0 / p) * (1.0 / (1.0 - 2f64.powf(-p * a))).powf(1.0 / p) * length.powf(a);
                worst = worst.max(lhs / rhs);
                ensure(lhs < rhs, || format!("{u} -> {v}, p = {p}, α = {a}: {lhs} >= {rhs}"))?;
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs, max lhs/rhs {worst:.4}"))
}

/// `C(p, 2^d) ρ^d τ^d` written out from the closed forms.
fn bm_closed(d: usize, p: f64, a: f64) -> f64 {
    let df = d as f64;
    let rho = (c_closed(p, 2.0).powf(p)
        + (1.0 + 2f64.powf(1.0 - p)) * 2f64.powf(-p * a) / (1.0 - 2f64.powf(-p * a)))
    .powf(1.0 / p);
    let tau = c_closed(p * a, df).powf(a)
        * 2f64.powf(2.0 / p)
        * (1.0 / (1.0 - 2f64.powf(p * (a - 1.0)))).powf(1.0 / p)
        * (1.0 / (1.0 - 2f64.powf(-p * a))).powf(1.0 / p)
        * (1.0 + (df - 1.0).powf(p * a)).powf(1.0 / p);
    c_closed(p, 2f64.powi(d as i32)) * rho.powi(d as i32) * tau.powi(d as i32)
}

fn norming_truncation() -> Check {
    let mut molecules = 0;
    let mut worst = 0.0f64;
    for d in 1..=2usize {
        for &a in &[0.25, 0.5] {
            for &p in &[1.0, 0.5] {
                let r = verify_norming(d, al(a), pe(p), 2).map_err(|e| e.to_string())?;
                let tag = format!("d = {d}, α = {a}, p = {p}");
                ensure(r.complete, || format!("{tag}: incomplete"))?;
                ensure(r.max_residual < 1e-9, || format!("{tag}: residual {:e}", r.max_residual))?;
                ensure(r.max_molecule_cost <= r.molecule_bound, || {
                    format!("{tag}: molecule cost {} > {}", r.max_molecule_cost, r.molecule_bound)
                })?;
                let bm = bm_closed(d, p, a);
                ensure((r.bm_bound - bm).abs() <= 1e-9 * bm, || format!("{tag}: bound {} vs {bm}", r.bm_bound))?;
                worst = worst.max(r.max_molecule_cost / r.molecule_bound);
                molecules += r.molecule_count;

                let basis_bound = (d as f64).powf(a) * c_closed(p, 2f64.powi(d as i32));
                for v in dyadic_grid(d, 3).into_iter().filter(|v| !v.is_origin()) {
                    let index = BasisIndex::of(v.clone()).unwrap();
                    let c = basis_norm_check(d, al(a), pe(p), &index).map_err(|e| e.to_string())?;
                    ensure(c.value <= basis_bound + 1e-9, || format!("{tag}: ‖ι(e_{v})‖ = {} > {basis_bound}", c.value))?;
                }
            }
        }
    }
    Ok(format!("{molecules} molecules, max cost/bound {worst:.2e}"))
}

fn symmetries() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=5);
        let mut pts: Vec<Vec<f64>> = vec![vec![0.0; d]];
        while pts.len() < n {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-2..=2) as f64).collect();
            if !pts.contains(&v) {
                pts.push(v);
            }
        }
        let host = Arc::new(PointedFiniteMetric::l1_space(pts, 0).unwrap());
        let m = random_element(&mut rng, &host);
        let scale = rng.gen_range(0.1..4.0);
        let shift: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
        let p = [1.0, 0.75, 0.5][rng.gen_range(0..3)];
        let (lhs, rhs) = rescale_check(&m, scale, &shift, pe(p)).map_err(|e| e.to_string())?;
        let gap = (lhs - rhs).abs() / rhs.max(1.0);
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("rescale case {case}: {lhs} vs {rhs}"))?;
    }
    for case in 0..50 {
        let d = rng.gen_range(1..=3);
        let complex = random_complex(&mut rng, d);
        let cubes: Vec<Vec<i64>> = complex.offsets().cloned().collect();
        let scale = complex.scale();
        let ctx = RetractionContext::new(complex, PExponent::one()).map_err(|e| e.to_string())?;
        let w = &cubes[rng.gen_range(0..cubes.len())];
        let target = &cubes[rng.gen_range(0..cubes.len())];
        let x: Vec<f64> = w.iter().map(|&c| (c as f64 + rng.gen::<f64>()) * scale).collect();
        let s: Vec<f64> = w.iter().zip(target).map(|(a, b)| (b - a) as f64 * scale).collect();
        let moved: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a + b).collect();
        let direct = ctx.retract(&moved).map_err(|e| e.to_string())?;
        let weights = ctx.retract_weights(&x).map_err(|e| e.to_string())?;
        let translated = ctx.translate_element(&weights, &s).map_err(|e| e.to_string())?;
        let gap = direct.max_residual(&translated);
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("translation case {case}: residual {gap:e}"))?;
    }
    Ok(format!("100 cases, max gap {worst:.1e}"))
}

fn round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let d = rng.gen_range(1..=2);
        let alpha = rng.gen_range(0.05..0.95);
        let grid: Vec<DyadicPoint> = dyadic_grid(d, 3).into_iter().filter(|v| !v.is_origin()).collect();
        let mut c = BasisCombination::<f64>::zero(d);
        for _ in 0..rng.gen_range(1..=8) {
            let v = grid[rng.gen_range(0..grid.len())].clone();
            c.add_term(&BasisIndex::of(v).unwrap(), rng.gen_range(-3.0..3.0));
        }
        let back = analyze(d, al(alpha), &c.synthesize(alpha)).map_err(|e| e.to_string())?;
        let indices: std::collections::BTreeSet<_> = c.iter().chain(back.iter()).map(|(i, _)| i.clone()).collect();
        let gap = indices.iter().map(|i| (c.coeff(i) - back.coeff(i)).abs()).fold(0.0, f64::max);
        worst = worst.max(gap);
        ensure(gap < 1e-9, || format!("case {case}: coefficient gap {gap:e}"))?;
    }
    Ok(format!("100 combinations, max gap {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("constant formula C(p, n) = n^(1/p - 1)", 10, constant_formula),
        ("partition of unity and vertex Kronecker property", 10, lambda_properties),
        ("transport equals enumeration at p = 1", 60, p1_oracle),
        ("retraction witness attains C(p, 2^(d-1))", 60, witness_values),
        ("retraction upper decomposition within its bound", 120, retraction_upper_bound),
        ("hat expansion reconstructs within its cost bound", 10, hat_expansion),
        ("dyadic paths are mesh-adjacent and cheap", 30, dyadic_paths),
        ("molecule and basis norm certificates at desk scale", 300, norming_truncation),
        ("rescaling and translation symmetries", 30, symmetries),
        ("analysis inverts synthesis", 30, round_trip),
    ];
    let mut failures = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {limit} s limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {:>2} {status} {name} [{:.2} s / {limit} s] {detail}",
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 10 criteria fail");
        ExitCode::FAILURE
    }
}
