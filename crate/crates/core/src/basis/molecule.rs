//! Basis expansions of differences `δ(u) − δ(v)` of dyadic points, by
//! induction over the faces of the cube.
//!
//! A difference along one axis walks a [`line_path`]; each mesh-adjacent step
//! peels the second difference at its finer endpoint and halves the rest onto
//! the coarser level, down to the full edge `δ(z) − δ(y)`. The edge endpoints
//! are expanded against the smallest corner of their face, which is a lower
//! dimensional difference.

use super::coeff::Coeff;
use super::element::{BasisCombination, BasisIndex};
use super::path::line_path;
use super::step::{step_memoized, StepMemo};
use crate::constants::{rho, tau, HolderExponent, PExponent};
use crate::dyadic::{DyadicPoint, DyadicScalar};
use crate::error::{domain, Result};

struct Expander<C> {
    alpha: HolderExponent<f64>,
    memo: StepMemo<C>,
}

impl<C: Coeff> Expander<C> {
    /// `δ(u) − δ(v)` for points agreeing off `free`, where they sit on corners.
    fn difference(&mut self, u: &DyadicPoint, v: &DyadicPoint, free: &[bool]) -> BasisCombination<C> {
        let mut out = BasisCombination::zero(u.dim());
        let mut cur = v.clone();
        for j in 0..u.dim() {
            if u.coord(j) != v.coord(j) {
                debug_assert!(free[j]);
                let next = cur.with_coord(j, u.coord(j));
                let part = self.along_axis(&next, &cur, j, free);
                out.add_scaled(&part, &C::one());
                cur = next;
            }
        }
        out
    }

    /// `δ(a) − δ(b)` for points differing only in coordinate `i`.
    fn along_axis(&mut self, a: &DyadicPoint, b: &DyadicPoint, i: usize, free: &[bool]) -> BasisCombination<C> {
        let path = line_path(a.coord(i), b.coord(i)).expect("distinct points of the cube");
        let mut out = BasisCombination::zero(a.dim());
        for w in path.windows(2) {
            let n = (w[1] - w[0]).abs().level();
            let part = self.adjacent(a, i, w[0], w[1], n, free);
            out.add_scaled(&part, &C::one());
        }
        out
    }

    /// `δ(x_i(s)) − δ(x_i(t))` for `|s − t| = 2^{-n}`, both on `2^{-n} Z`.
    fn adjacent(
        &mut self,
        frame: &DyadicPoint,
        i: usize,
        s: DyadicScalar,
        t: DyadicScalar,
        n: u32,
        free: &[bool],
    ) -> BasisCombination<C> {
        if n == 0 {
            let edge = self.edge(frame, i, free);
            return if s > t { edge } else { scaled(&edge, -C::one()) };
        }
        if s.level() < n {
            return scaled(&self.adjacent(frame, i, t, s, n, free), -C::one());
        }
        // δ(w) − δ(w + h) = 2^{-nα} T(w) + ½ (δ(w − h) − δ(w + h))
        let h = t - s;
        let w = frame.with_coord(i, s);
        let mut out = self.step(&w, i, n);
        out = scaled(&out, C::two_pow_alpha(-(n as i32), self.alpha.get()));
        let rest = self.adjacent(frame, i, s - h, t, n - 1, free);
        out.add_scaled(&rest, &C::half());
        out
    }

    fn step(&mut self, w: &DyadicPoint, i: usize, n: u32) -> BasisCombination<C> {
        step_memoized(w, i, n, self.alpha, &mut self.memo)
    }

    /// `δ(z) − δ(y)` with `z_i = 1`, `y_i = 0`, the rest taken from `frame`.
    fn edge(&mut self, frame: &DyadicPoint, i: usize, free: &[bool]) -> BasisCombination<C> {
        let mut face = free.to_vec();
        face[i] = false;
        let mut out = self.corner_expansion(&frame.with_coord(i, DyadicScalar::ONE), &face);
        let low = self.corner_expansion(&frame.with_coord(i, DyadicScalar::ZERO), &face);
        out.add_scaled(&low, &-C::one());
        out
    }

    /// `δ(y) = (δ(y) − δ(y′)) + δ(y′)`, `y′` the corner zeroing the `face` coordinates.
    fn corner_expansion(&mut self, y: &DyadicPoint, face: &[bool]) -> BasisCombination<C> {
        let mut corner = y.clone();
        for (j, &f) in face.iter().enumerate() {
            if f {
                corner = corner.with_coord(j, DyadicScalar::ZERO);
            }
        }
        let mut out = self.difference(y, &corner, face);
        if !corner.is_origin() {
            out.add_term(&BasisIndex::of(corner).expect("nonzero corner"), C::one());
        }
        out
    }
}

fn scaled<C: Coeff>(c: &BasisCombination<C>, a: C) -> BasisCombination<C> {
    let mut out = BasisCombination::zero(c.dim());
    out.add_scaled(c, &a);
    out
}

fn check_pair(d: usize, u: &DyadicPoint, v: &DyadicPoint) -> Result<()> {
    for x in [u, v] {
        if x.dim() != d || !x.in_unit_cube() {
            return domain(format!("{x} is not a point of [0, 1]^{d}"));
        }
    }
    if u == v {
        return domain("molecule endpoints coincide");
    }
    Ok(())
}

/// Basis expansion of the unnormalized difference `δ(u) − δ(v)`; exact in
/// any coefficient ring.
pub fn difference_decompose<C: Coeff>(
    d: usize,
    alpha: HolderExponent<f64>,
    u: &DyadicPoint,
    v: &DyadicPoint,
) -> Result<BasisCombination<C>> {
    check_pair(d, u, v)?;
    let mut ex = Expander { alpha, memo: StepMemo::new() };
    Ok(ex.difference(u, v, &vec![true; d]))
}

/// Basis expansion of the molecule `(δ(u) − δ(v)) / |u − v|_1^α`.
pub fn molecule_decompose(
    d: usize,
    alpha: HolderExponent<f64>,
    u: &DyadicPoint,
    v: &DyadicPoint,
) -> Result<BasisCombination<f64>> {
    let diff: BasisCombination<f64> = difference_decompose(d, alpha, u, v)?;
    let length = u.l1_dist(v).to_f64().powf(alpha.get());
    Ok(scaled(&diff, length.recip()))
}

/// `τ^d ρ^d`.
pub fn molecule_bound(d: usize, p: PExponent<f64>, alpha: HolderExponent<f64>) -> Result<f64> {
    let di = d as i32;
    Ok(tau(p, alpha, d as u32)?.powi(di) * rho(p, alpha).powi(di))
}
