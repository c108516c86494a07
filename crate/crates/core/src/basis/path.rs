//! Paths between dyadic points of `[0, 1]` whose steps are mesh-adjacent at
//! geometrically shrinking levels.

use crate::constants::{HolderExponent, PExponent};
use crate::dyadic::DyadicScalar;
use crate::error::{domain, Result};

/// Points `a_1 = u, …, a_l = v` of `[u, v]`. Starting from the unique point of
/// the coarsest grid meeting `[u, v]` (the origin counting as level `-1`),
/// each finer level contributes at most one point past either end of what
/// was already collected.
pub fn line_path(u: DyadicScalar, v: DyadicScalar) -> Result<Vec<DyadicScalar>> {
    if u == v {
        return domain("path endpoints coincide");
    }
    if !u.in_unit_interval() || !v.in_unit_interval() {
        return domain(format!("{u} or {v} lies outside [0, 1]"));
    }
    let (lo, hi) = if u < v { (u, v) } else { (v, u) };
    let n = lo.level().max(hi.level());
    let (a, b) = (lo.numerator_at(n), hi.numerator_at(n));

    // coarsest grid meeting [a, b]; for a = 0 that is the origin at level -1
    let grid_point = |step: i64| -> Option<i64> {
        let first = (a + step - 1).div_euclid(step) * step;
        (first <= b).then_some(first)
    };
    let (mut left, mut right, start) = if a == 0 {
        (0, 0, 0)
    } else {
        let k0 = (0..=n).find(|&k| grid_point(1 << (n - k)).is_some()).expect("level n meets [a, b]");
        let x = grid_point(1 << (n - k0)).unwrap();
        (x, x, k0 + 1)
    };
    let mut points = vec![left];
    for k in start..=n {
        let step = 1i64 << (n - k);
        if left - step >= a {
            left -= step;
            points.push(left);
        }
        if right + step <= b {
            right += step;
            points.push(right);
        }
    }
    debug_assert!(left == a && right == b);
    points.sort_unstable();
    let mut path: Vec<DyadicScalar> = points.into_iter().map(|x| DyadicScalar::new(x, n)).collect();
    if u > v {
        path.reverse();
    }
    Ok(path)
}

/// `Σ |a_{i+1} − a_i|^{pα}`.
pub fn path_cost(path: &[DyadicScalar], p: PExponent<f64>, alpha: HolderExponent<f64>) -> f64 {
    let e = p.get() * alpha.get();
    path.windows(2).map(|w| (w[1] - w[0]).abs().to_f64().powf(e)).sum()
}

/// `2 / (1 − 2^{-pα}) |u − v|^{pα}`, so that `path_cost < path_bound`
/// is the strict estimate raised to the power `p`.
pub fn path_bound(u: DyadicScalar, v: DyadicScalar, p: PExponent<f64>, alpha: HolderExponent<f64>) -> f64 {
    let e = p.get() * alpha.get();
    2.0 / (1.0 - (-e).exp2()) * (u - v).abs().to_f64().powf(e)
}

/// Whether consecutive points share a grid `2^{-k} Z`, `k ≤ n`, and differ by
/// exactly its mesh.
pub fn steps_are_mesh_adjacent(path: &[DyadicScalar], n: u32) -> bool {
    path.windows(2).all(|w| {
        let gap = (w[1] - w[0]).abs();
        gap.numerator() == 1 && gap.level() <= n && w[0].level() <= gap.level() && w[1].level() <= gap.level()
    })
}
