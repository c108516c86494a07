//! Basis coefficients of an element supported on a dyadic grid.

use super::coeff::Coeff;
use super::element::{basis_vector, BasisCombination, BasisIndex, DyadicElement};
use crate::constants::HolderExponent;
use crate::error::{domain, Result};
use crate::free::FreeElement;

/// The unique `c` with `Σ c_v ι(e_v) = m`. The finest level of the residual
/// only meets the `δ(v)` term of `ι(e_v)`, so peeling levels from the finest
/// down fixes one coefficient per point.
pub fn analyze<C: Coeff>(d: usize, alpha: HolderExponent<f64>, m: &DyadicElement<C>) -> Result<BasisCombination<C>> {
    if m.dim() != d {
        return domain(format!("element has dimension {}, not {d}", m.dim()));
    }
    if let Some((v, _)) = m.iter().find(|(v, _)| !v.in_unit_cube()) {
        return domain(format!("{v} lies outside the unit cube"));
    }
    let a = alpha.get();
    let mut residual = m.clone();
    let mut out = BasisCombination::zero(d);
    while let Some(k) = residual.iter().map(|(v, _)| v.level()).max() {
        let top: Vec<_> = residual.iter().filter(|(v, _)| v.level() == k).map(|(v, c)| (v.clone(), c.clone())).collect();
        for (v, w) in top {
            let index = BasisIndex::new(v, k).expect("nonzero point of the cube at its own level");
            let c = w * C::two_pow_alpha(-(k as i32), a);
            residual.add_scaled(&basis_vector(&index, a), &-c.clone());
            out.add_term(&index, c);
        }
    }
    Ok(out)
}

/// [`analyze`] for an element over a host of dyadic points based at the origin.
pub fn analyze_free(d: usize, alpha: HolderExponent<f64>, m: &FreeElement<f64>) -> Result<BasisCombination<f64>> {
    analyze(d, alpha, &DyadicElement::from_free(m)?)
}
