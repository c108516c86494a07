//! Seeded sampling of point pairs to probe the Lipschitz constant of the
//! retraction between its certified lower and upper estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::retraction_bounds;
use crate::error::Result;
use crate::free::{evaluate, exact_norm_p1, exact_norm_small, p_cost, DEFAULT_CAP};
use crate::retraction::RetractionContext;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Use the exact norm for lower bounds when the vertex set is within the
    /// enumeration cap; otherwise the transport (p = 1) value is used.
    pub exact_norms: bool,
    pub include_witness: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { n_samples: 1000, seed: 0, exact_norms: false, include_witness: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub d: usize,
    pub p: f64,
    #[serde(rename = "R")]
    pub r: f64,
    /// Cube offsets of the complex.
    pub complex: Vec<Vec<i64>>,
    pub base_vertex: Vec<i64>,
    pub n_samples: usize,
    pub seed: u64,
    /// `"exact"` or `"transport"`: how per-pair lower bounds were certified.
    pub lower_bound_method: String,
    pub min_lower_ratio: f64,
    pub max_lower_ratio: f64,
    pub max_upper_cost_ratio: f64,
    pub max_residual: f64,
    pub theoretical_lower: f64,
    pub theoretical_upper: f64,
    /// Certified lower bound for the witness pair per unit `|x − y|_1`.
    pub witness_value: Option<f64>,
    pub witness_upper: Option<f64>,
    pub upper_bound_holds: bool,
    pub decompositions_reproduce: bool,
    pub lower_below_upper: bool,
    pub witness_attains_lower: bool,
}

impl LipschitzReport {
    /// The first violated certified check, if any.
    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.decompositions_reproduce {
            Some("decomposition evaluates to r(x) - r(y)")
        } else if !self.upper_bound_holds {
            Some("decomposition cost within the upper Lipschitz bound")
        } else if !self.lower_below_upper {
            Some("certified lower bounds below the upper Lipschitz bound")
        } else if !self.witness_attains_lower {
            Some("witness certificate attains the lower constant")
        } else {
            None
        }
    }
}

struct PairResult {
    lower_ratio: f64,
    upper_ratio: f64,
    residual: f64,
}

fn sample_pairs<S: Scalar>(ctx: &RetractionContext<S>, config: &SamplerConfig) -> Vec<(Vec<S>, Vec<S>)> {
    let complex = ctx.complex();
    let d = complex.dim();
    let scale = complex.scale().as_f64();
    let cubes: Vec<&Vec<i64>> = complex.offsets().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let in_cube = |rng: &mut ChaCha8Rng, w: &[i64]| -> Vec<f64> {
        (0..d).map(|i| (w[i] as f64 + rng.gen::<f64>()) * scale).collect()
    };
    (0..config.n_samples)
        .map(|k| {
            let w = cubes[rng.gen_range(0..cubes.len())];
            let x = in_cube(&mut rng, w);
            let y = match k % 3 {
                0 => in_cube(&mut rng, w),
                1 => {
                    let mut y = x.clone();
                    let j = rng.gen_range(0..d);
                    y[j] = (w[j] as f64 + rng.gen::<f64>()) * scale;
                    y
                }
                _ => {
                    let u = cubes[rng.gen_range(0..cubes.len())];
                    in_cube(&mut rng, u)
                }
            };
            (x.into_iter().map(S::of).collect(), y.into_iter().map(S::of).collect())
        })
        .collect()
}

/// Samples `config.n_samples` seeded pairs and reports the extreme ratios of
/// certified lower bounds and of constructed decomposition costs to `|x − y|_1`.
pub fn estimate_lipschitz<S: Scalar>(ctx: &RetractionContext<S>, config: &SamplerConfig) -> Result<LipschitzReport> {
    let complex = ctx.complex();
    let d = complex.dim();
    let p = ctx.p();
    let (lower, upper) = retraction_bounds(p, d as u32)?;
    let (lower, upper) = (lower.as_f64(), upper.as_f64());
    let exact = config.exact_norms && ctx.vertices().len() <= DEFAULT_CAP;

    let pairs = sample_pairs(ctx, config);
    let results = pairs
        .par_iter()
        .map(|(x, y)| -> Result<Option<PairResult>> {
            let gap: S = x.iter().zip(y).map(|(a, b)| (*a - *b).abs()).sum();
            if gap == S::zero() {
                return Ok(None);
            }
            let target = ctx.retract(x)?.try_sub(&ctx.retract(y)?)?;
            let decomp = ctx.lipschitz_upper_decomposition(x, y)?;
            let residual = evaluate(&decomp)?.max_residual(&target);
            let certified = if exact { exact_norm_small(&target, p)?.0 } else { exact_norm_p1(&target)?.0 };
            Ok(Some(PairResult {
                lower_ratio: (certified / gap).as_f64(),
                upper_ratio: (p_cost(&decomp, p) / gap).as_f64(),
                residual: residual.as_f64(),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<PairResult> = results.into_iter().flatten().collect();

    let (witness_value, witness_upper) = if config.include_witness {
        let first = complex.offsets().next().expect("complexes are nonempty").clone();
        let w = ctx.witness_in_cube(&first)?;
        let scale = complex.scale();
        (Some((w.certified_value / scale).as_f64()), Some((w.upper_value / scale).as_f64()))
    } else {
        (None, None)
    };

    let fold = |f: fn(&PairResult) -> f64, init: f64, pick: fn(f64, f64) -> f64| results.iter().map(f).fold(init, pick);
    let mut max_lower = fold(|r| r.lower_ratio, 0.0, f64::max);
    if let Some(v) = witness_value {
        max_lower = max_lower.max(v);
    }
    let min_lower = fold(|r| r.lower_ratio, f64::INFINITY, f64::min);
    let max_upper = fold(|r| r.upper_ratio, 0.0, f64::max);
    let max_residual = fold(|r| r.residual, 0.0, f64::max);
    let slack = 1.0 + 1e-9;

    Ok(LipschitzReport {
        d,
        p: p.get().as_f64(),
        r: complex.scale().as_f64(),
        complex: complex.offsets().cloned().collect(),
        base_vertex: complex.base_vertex().clone(),
        n_samples: config.n_samples,
        seed: config.seed,
        lower_bound_method: if exact { "exact" } else { "transport" }.into(),
        min_lower_ratio: min_lower,
        max_lower_ratio: max_lower,
        max_upper_cost_ratio: max_upper,
        max_residual,
        theoretical_lower: lower,
        theoretical_upper: upper,
        witness_value,
        witness_upper,
        upper_bound_holds: max_upper <= upper * slack,
        decompositions_reproduce: max_residual <= 1e-9,
        lower_below_upper: max_lower <= upper * slack,
        witness_attains_lower: witness_value.is_none_or(|v| (v - lower).abs() <= 1e-9 * lower.max(1.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PExponent;
    use crate::lambda::CubeComplex;

    fn ctx(d: usize, cubes: &[Vec<i64>], p: f64) -> RetractionContext<f64> {
        let complex = CubeComplex::new(d, 1.0, cubes.iter().cloned(), vec![0; d]).unwrap();
        RetractionContext::new(complex, PExponent::new(p).unwrap()).unwrap()
    }

    #[test]
    fn line_ratios_stay_in_band() {
        let c = ctx(1, &[vec![0], vec![1], vec![3]], 0.5);
        let config = SamplerConfig { n_samples: 300, seed: 7, ..Default::default() };
        let r = estimate_lipschitz(&c, &config).unwrap();
        assert!(r.min_lower_ratio >= 1.0 - 1e-9, "{}", r.min_lower_ratio);
        assert!(r.max_upper_cost_ratio <= r.theoretical_upper * (1.0 + 1e-9));
        assert_eq!(r.first_failure(), None);
    }

    #[test]
    fn witness_enters_the_maximum() {
        let c = ctx(2, &[vec![0, 0]], 0.5);
        let config = SamplerConfig { n_samples: 50, seed: 1, exact_norms: true, include_witness: true };
        let r = estimate_lipschitz(&c, &config).unwrap();
        assert_eq!(r.lower_bound_method, "exact");
        assert!((r.witness_value.unwrap() - 2.0).abs() < 1e-12);
        assert!(r.max_lower_ratio >= 2.0 - 1e-12);
        assert_eq!(r.first_failure(), None);
    }

    #[test]
    fn p1_within_cube_costs_are_isometric() {
        let c = ctx(1, &[vec![0]], 1.0);
        let config = SamplerConfig { n_samples: 200, seed: 3, ..Default::default() };
        let r = estimate_lipschitz(&c, &config).unwrap();
        assert!(r.max_upper_cost_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn reports_are_reproducible() {
        let c = ctx(2, &[vec![0, 0], vec![1, 0], vec![1, 1]], 0.5);
        let config = SamplerConfig { n_samples: 120, seed: 42, ..Default::default() };
        assert_eq!(estimate_lipschitz(&c, &config).unwrap(), estimate_lipschitz(&c, &config).unwrap());
    }
}
