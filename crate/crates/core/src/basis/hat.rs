//! Expansion of a point evaluation inside a dyadic interval into its two
//! endpoints and the second differences of finer levels.

use std::collections::HashMap;

use super::coeff::Coeff;
use crate::constants::{HolderExponent, PExponent};
use crate::dyadic::{DyadicPoint, DyadicScalar};
use crate::error::{domain, Result};

use super::element::DyadicElement;

#[derive(Debug, Clone, PartialEq)]
pub struct HatTerm<C> {
    pub nu: C,
    /// Level `n_i` of `v_i`.
    pub level: u32,
    pub point: DyadicScalar,
}

/// `2^{nα} δ(v) = μ1 2^{nα} δ(u1) + μ2 2^{nα} δ(u2) + Σ ν_i h_{n_i}(v_i)`
/// with `h_k(w) = 2^{kα}(δ(w) − ½(δ(w⁻) + δ(w⁺)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hat<C> {
    pub mu1: C,
    pub mu2: C,
    /// Sorted by level, one per level.
    pub terms: Vec<HatTerm<C>>,
}

impl<C: Coeff> Hat<C> {
    pub fn cost(&self, p: PExponent<f64>, alpha: f64) -> f64 {
        p.root(self.terms.iter().map(|t| t.nu.to_f64(alpha).abs().powf(p.get())).sum())
    }
}

/// `2^{-α} (1 / (1 − 2^{-pα}))^{1/p}`.
pub fn hat_bound(p: PExponent<f64>, alpha: HolderExponent<f64>) -> f64 {
    let a = alpha.get();
    (-a).exp2() * p.root(1.0 / (1.0 - (-p.get() * a).exp2()))
}

/// Interval level `n` with `u2 − u1 = 2^{-n}`, both endpoints on `2^{-n} Z`.
fn interval_level(u1: DyadicScalar, u2: DyadicScalar) -> Result<u32> {
    let gap = u2 - u1;
    if gap.numerator() != 1 {
        return domain(format!("[{u1}, {u2}] is not a dyadic interval"));
    }
    let n = gap.level();
    if u1.level() > n || u2.level() > n {
        return domain(format!("[{u1}, {u2}] is not aligned to its mesh"));
    }
    Ok(n)
}

/// Expands `v ∈ [u1, u2]` by recursion on its level, each step splitting
/// `2^{nα} δ(v)` into the level-`k` second difference at `v` and the halves at
/// `v ∓ 2^{-k}`.
pub fn hat_decompose<C: Coeff>(
    u1: DyadicScalar,
    u2: DyadicScalar,
    v: DyadicScalar,
    alpha: HolderExponent<f64>,
) -> Result<Hat<C>> {
    let n = interval_level(u1, u2)?;
    if v < u1 || v > u2 {
        return domain(format!("{v} lies outside [{u1}, {u2}]"));
    }
    let mut memo = HashMap::new();
    Ok(expand(u1, u2, n, v, alpha.get(), &mut memo))
}

fn expand<C: Coeff>(
    u1: DyadicScalar,
    u2: DyadicScalar,
    n: u32,
    v: DyadicScalar,
    alpha: f64,
    memo: &mut HashMap<DyadicScalar, Hat<C>>,
) -> Hat<C> {
    if v == u1 {
        return Hat { mu1: C::one(), mu2: C::zero(), terms: Vec::new() };
    }
    if v == u2 {
        return Hat { mu1: C::zero(), mu2: C::one(), terms: Vec::new() };
    }
    if let Some(h) = memo.get(&v) {
        return h.clone();
    }
    let k = v.level();
    debug_assert!(k > n);
    let (lo, hi) = v.neighbors().expect("interior points have level >= 1");
    let a = expand(u1, u2, n, lo, alpha, memo);
    let b = expand(u1, u2, n, hi, alpha, memo);
    let half = C::half();
    let mut merged: Vec<HatTerm<C>> = Vec::new();
    for t in a.terms.into_iter().chain(b.terms) {
        let nu = half.clone() * t.nu;
        match merged.iter_mut().find(|m| m.point == t.point) {
            Some(m) => m.nu = m.nu.clone() + nu,
            None => merged.push(HatTerm { nu, ..t }),
        }
    }
    merged.push(HatTerm { nu: C::two_pow_alpha(n as i32 - k as i32, alpha), level: k, point: v });
    merged.sort_by_key(|t| t.level);
    let h = Hat {
        mu1: half.clone() * (a.mu1 + b.mu1),
        mu2: half * (a.mu2 + b.mu2),
        terms: merged,
    };
    memo.insert(v, h.clone());
    h
}

/// Both sides of the hat identity along the line through `frame` in direction
/// `axis`, the coordinate `axis` of `frame` being replaced.
pub fn hat_identity<C: Coeff>(
    frame: &DyadicPoint,
    axis: usize,
    u1: DyadicScalar,
    u2: DyadicScalar,
    v: DyadicScalar,
    hat: &Hat<C>,
    alpha: f64,
) -> (DyadicElement<C>, DyadicElement<C>) {
    let n = (u2 - u1).level() as i32;
    let at = |t: DyadicScalar| frame.with_coord(axis, t);
    let scale = C::two_pow_alpha(n, alpha);
    let lhs = DyadicElement::delta(&at(v)).scaled(&scale);
    let mut rhs = DyadicElement::zero(frame.dim());
    rhs.add_weight(&at(u1), hat.mu1.clone() * scale.clone());
    rhs.add_weight(&at(u2), hat.mu2.clone() * scale);
    for t in &hat.terms {
        let s = C::two_pow_alpha(t.level as i32, alpha);
        let (lo, hi) = t.point.neighbors().expect("hat points have level >= 1");
        let c = t.nu.clone() * s;
        rhs.add_weight(&at(t.point), c.clone());
        rhs.add_weight(&at(lo), -(C::half() * c.clone()));
        rhs.add_weight(&at(hi), -(C::half() * c));
    }
    (lhs, rhs)
}
