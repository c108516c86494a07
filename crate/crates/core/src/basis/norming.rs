//! Finite-level check of the basis sandwich: basis vectors stay in a fixed
//! ball, and every molecule over the grid has a cheap basis expansion.

use rayon::prelude::*;
use serde::Serialize;

use super::element::{basis_norm_check, BasisIndex, DyadicElement};
use super::molecule::{molecule_bound, molecule_decompose};
use crate::constants::{bm_bound, c_const, HolderExponent, PExponent};
use crate::dyadic::{dyadic_grid, DyadicPoint};
use crate::error::{domain, Result};

/// Most molecules a single report walks; larger grids are cut off and the
/// report is marked incomplete.
pub const MOLECULE_BUDGET: usize = 250_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormingReport {
    pub d: usize,
    pub alpha: f64,
    pub p: f64,
    pub k_max: u32,
    pub basis_count: usize,
    pub max_basis_norm: f64,
    pub basis_bound: f64,
    pub molecule_count: usize,
    pub max_molecule_cost: f64,
    pub molecule_bound: f64,
    pub max_residual: f64,
    pub bm_bound: f64,
    pub basis_ok: bool,
    pub molecules_ok: bool,
    pub complete: bool,
}

impl NormingReport {
    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.basis_ok {
            Some("basis vector norm within d^alpha C(p, 2^d)")
        } else if self.max_residual >= 1e-9 {
            Some("molecule expansion reconstructs the molecule")
        } else if !self.molecules_ok {
            Some("molecule expansion cost within tau^d rho^d")
        } else {
            None
        }
    }
}

/// Checks every basis vector of level `≤ k_max` and every molecule over
/// `V_{k_max}`, and reports `C(p, 2^d) ρ^d τ^d`.
pub fn verify_norming(
    d: usize,
    alpha: HolderExponent<f64>,
    p: PExponent<f64>,
    k_max: u32,
) -> Result<NormingReport> {
    if d == 0 {
        return domain("dimension must be positive");
    }
    if k_max > 16 {
        return domain(format!("k_max = {k_max} is beyond any feasible grid"));
    }
    let a = alpha.get();
    let grid = dyadic_grid(d, k_max as i32);

    let indices: Vec<BasisIndex> = grid.iter().filter(|v| !v.is_origin()).map(|v| BasisIndex::of(v.clone())).collect::<Result<_>>()?;
    let norms = indices
        .par_iter()
        .map(|i| basis_norm_check(d, alpha, p, i))
        .collect::<Result<Vec<_>>>()?;
    let max_basis_norm = norms.iter().map(|c| c.value).fold(0.0, f64::max);
    let basis_bound = (d as f64).powf(a) * c_const(p, 1u64 << d)?;

    let total = grid.len() * (grid.len() - 1) / 2;
    let complete = total <= MOLECULE_BUDGET;
    let pairs: Vec<(&DyadicPoint, &DyadicPoint)> = grid
        .iter()
        .enumerate()
        .flat_map(|(i, u)| grid[i + 1..].iter().map(move |v| (u, v)))
        .take(MOLECULE_BUDGET)
        .collect();
    let bound = molecule_bound(d, p, alpha)?;
    let checks = pairs
        .par_iter()
        .map(|&(u, v)| -> Result<(f64, f64)> {
            let c = molecule_decompose(d, alpha, u, v)?;
            let mut target = DyadicElement::<f64>::delta(u);
            target.add_weight(v, -1.0);
            let target = target.scaled(&u.l1_dist(v).to_f64().powf(a).recip());
            Ok((c.cost(p, a), c.synthesize(a).max_residual(&target, a)))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_molecule_cost = checks.iter().map(|c| c.0).fold(0.0, f64::max);
    let max_residual = checks.iter().map(|c| c.1).fold(0.0, f64::max);

    Ok(NormingReport {
        d,
        alpha: a,
        p: p.get(),
        k_max,
        basis_count: indices.len(),
        max_basis_norm,
        basis_bound,
        molecule_count: pairs.len(),
        max_molecule_cost,
        molecule_bound: bound,
        max_residual,
        bm_bound: bm_bound(p, alpha, d as u32)?,
        basis_ok: norms.iter().all(|c| c.passes()),
        molecules_ok: max_molecule_cost <= bound && max_residual < 1e-9,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{rho, tau};

    fn al(a: f64) -> HolderExponent<f64> {
        HolderExponent::new(a).unwrap()
    }

    #[test]
    fn interval_at_level_three() {
        let (alpha, p) = (al(0.5), PExponent::one());
        let r = verify_norming(1, alpha, p, 3).unwrap();
        assert!(r.complete);
        assert_eq!(r.first_failure(), None);
        assert_eq!(r.basis_count, 8);
        assert_eq!(r.molecule_count, 36);
        let expected = rho(p, alpha) * tau(p, alpha, 1).unwrap();
        assert!((r.bm_bound - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn square_at_level_two() {
        let r = verify_norming(2, al(0.5), PExponent::new(0.5).unwrap(), 2).unwrap();
        assert_eq!(r.first_failure(), None);
        assert_eq!(r.molecule_count, 300);
    }

    #[test]
    fn corners_only() {
        let r = verify_norming(2, al(0.25), PExponent::new(0.5).unwrap(), 0).unwrap();
        assert_eq!(r.first_failure(), None);
        assert_eq!(r.basis_count, 3);
        assert_eq!(r.molecule_count, 6);
        assert!(r.max_molecule_cost <= r.molecule_bound);
    }
}
