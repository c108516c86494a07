//! Second differences `2^{nα}(δ(v) − ½(δ(v⁺) + δ(v⁻)))` along one axis,
//! expanded in the basis.

use std::collections::HashMap;

use super::coeff::Coeff;
use super::element::{BasisCombination, BasisIndex, DyadicElement};
use super::hat::{hat_decompose, Hat};
use crate::constants::{rho, HolderExponent, PExponent};
use crate::dyadic::{DyadicPoint, DyadicScalar};
use crate::error::{domain, Result};

pub(crate) type StepMemo<C> = HashMap<(DyadicPoint, usize, u32), BasisCombination<C>>;

fn check(v: &DyadicPoint, i: usize, n: u32) -> Result<()> {
    if i >= v.dim() {
        return domain(format!("axis {i} out of range for dimension {}", v.dim()));
    }
    if !v.in_unit_cube() {
        return domain(format!("{v} lies outside the unit cube"));
    }
    if n == 0 || v.coord(i).level() != n {
        return domain(format!("coordinate {i} of {v} is not at level {n} >= 1"));
    }
    Ok(())
}

/// The target `2^{nα}(δ(v) − ½(δ(v + 2^{-n} e_i) + δ(v − 2^{-n} e_i)))`.
pub fn step_target<C: Coeff>(v: &DyadicPoint, i: usize, n: u32, alpha: f64) -> Result<DyadicElement<C>> {
    check(v, i, n)?;
    let h = DyadicScalar::mesh(n);
    let mut el = DyadicElement::delta(v);
    el.add_weight(&v.shifted(i, h), -C::half());
    el.add_weight(&v.shifted(i, -h), -C::half());
    Ok(el.scaled(&C::two_pow_alpha(n as i32, alpha)))
}

/// The basis expansion of [`step_target`]. Aligned points expand directly;
/// otherwise the smallest coordinate `j` finer than `2^{-n}` is split by a
/// hat expansion and each piece recurses with one fewer fine coordinate.
pub fn step_decompose<C: Coeff>(
    d: usize,
    alpha: HolderExponent<f64>,
    v: &DyadicPoint,
    i: usize,
    n: u32,
) -> Result<BasisCombination<C>> {
    if v.dim() != d {
        return domain(format!("{v} does not have dimension {d}"));
    }
    check(v, i, n)?;
    let mut memo = StepMemo::new();
    Ok(expand(v, i, n, alpha, &mut memo))
}

pub(crate) fn step_memoized<C: Coeff>(
    v: &DyadicPoint,
    i: usize,
    n: u32,
    alpha: HolderExponent<f64>,
    memo: &mut StepMemo<C>,
) -> BasisCombination<C> {
    expand(v, i, n, alpha, memo)
}

fn expand<C: Coeff>(
    v: &DyadicPoint,
    i: usize,
    n: u32,
    alpha: HolderExponent<f64>,
    memo: &mut StepMemo<C>,
) -> BasisCombination<C> {
    let key = (v.clone(), i, n);
    if let Some(c) = memo.get(&key) {
        return c.clone();
    }
    let d = v.dim();
    let h = DyadicScalar::mesh(n);
    let mut out = BasisCombination::zero(d);
    let fine = (0..d).find(|&j| v.coord(j).level() > n);
    match fine {
        None => {
            // ι(e_w) at level n; neighbours of lower level contribute nothing
            out.add_term(&BasisIndex::of(v.clone()).expect("v has level n"), C::one());
            for w in [v.shifted(i, h), v.shifted(i, -h)] {
                if w.level() == n {
                    out.add_term(&BasisIndex::of(w).expect("level n point"), -C::half());
                }
            }
        }
        Some(j) => {
            let x = v.coord(j);
            let u1 = DyadicScalar::new(x.numerator() >> (x.level() - n), n);
            let u2 = u1 + h;
            let hat: Hat<C> =
                hat_decompose(u1, u2, x, alpha).expect("x lies strictly inside a level-n interval");
            for (mu, u) in [(&hat.mu1, u1), (&hat.mu2, u2)] {
                if !mu.is_negligible() {
                    let part = expand(&v.with_coord(j, u), i, n, alpha, memo);
                    out.add_scaled(&part, mu);
                }
            }
            for t in &hat.terms {
                let y = v.with_coord(j, t.point);
                let centre = expand(&y, j, t.level, alpha, memo);
                out.add_scaled(&centre, &t.nu);
                let half_nu = -(C::half() * t.nu.clone());
                for s in [h, -h] {
                    let side = expand(&y.shifted(i, s), j, t.level, alpha, memo);
                    out.add_scaled(&side, &half_nu);
                }
            }
        }
    }
    memo.insert(key, out.clone());
    out
}

/// `ρ^{l+1}`, `l` the number of coordinates of `v` finer than `2^{-n}`.
pub fn step_cost_bound(v: &DyadicPoint, n: u32, p: PExponent<f64>, alpha: HolderExponent<f64>) -> f64 {
    rho(p, alpha).powi(v.count_finer_than(n) as i32 + 1)
}
