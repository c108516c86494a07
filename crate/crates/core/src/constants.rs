//! Closed-form constants: the p-convexity constant `C(p, n)`, the step and
//! molecule constants of the dyadic decomposition, the retraction sandwich and
//! the resulting Banach–Mazur estimate.

use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Exponent `0 < p <= 1` of a p-norm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PExponent<S>(S);

impl<S: Scalar> PExponent<S> {
    pub fn new(p: S) -> Result<Self> {
        if p > S::zero() && p <= S::one() {
            Ok(Self(p))
        } else {
            domain(format!("p must lie in (0, 1], got {p}"))
        }
    }

    pub fn one() -> Self {
        Self(S::one())
    }

    #[inline]
    pub fn get(self) -> S {
        self.0
    }

    /// `x^(1/p)`, the inverse of raising to the p-th power.
    #[inline]
    pub fn root(self, x: S) -> S {
        x.powf(self.0.recip())
    }
}

/// Hölder exponent `0 < alpha < 1` of a snowflaked metric.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HolderExponent<S>(S);

impl<S: Scalar> HolderExponent<S> {
    pub fn new(alpha: S) -> Result<Self> {
        if alpha > S::zero() && alpha < S::one() {
            Ok(Self(alpha))
        } else {
            domain(format!("alpha must lie in (0, 1), got {alpha}"))
        }
    }

    #[inline]
    pub fn get(self) -> S {
        self.0
    }
}

/// `C(p, n) = n^(1/p - 1)`.
pub fn c_const<S: Scalar>(p: PExponent<S>, n: u64) -> Result<S> {
    if n == 0 {
        return domain("C(p, n) needs n >= 1");
    }
    let n = S::of(n as f64);
    Ok(n.powf(p.get().recip() - S::one()))
}

/// Upper bound on the number of lattice points the sup oracle visits.
const SIMPLEX_GRID_BUDGET: f64 = 2.0e5;

/// Numerical supremum of `(sum w_i^p)^(1/p)` over the simplex `sum w_i <= 1`.
///
/// Walks the lattice `{w : w_i = c_i / r, sum c_i = r}`, where `r` is the
/// largest value `<= grid_resolution` whose lattice fits the point budget,
/// and adds the uniform candidate `w_i = 1/n`. The objective is increasing in
/// each `w_i`, so the face `sum w_i = 1` carries the maximum.
pub fn c_const_sup_oracle<S: Scalar>(p: PExponent<S>, n: u64, grid_resolution: u64) -> Result<S> {
    if n == 0 {
        return domain("C(p, n) needs n >= 1");
    }
    if grid_resolution == 0 {
        return domain("grid resolution must be positive");
    }
    let parts = n as usize;
    let mut r = grid_resolution;
    while r > 1 && lattice_size(r, n) > SIMPLEX_GRID_BUDGET {
        r = if lattice_size(r / 2, n) > SIMPLEX_GRID_BUDGET { r / 2 } else { r - 1 };
    }

    let pe = p.get();
    let step = S::of(r as f64).recip();
    let table: Vec<S> = (0..=r).map(|c| (S::of(c as f64) * step).powf(pe)).collect();

    let mut best = S::zero();
    let mut counts = vec![0u64; parts];
    // odometer over compositions of r into `parts` nonnegative parts
    fn walk<S: Scalar>(
        slot: usize,
        remaining: u64,
        counts: &mut [u64],
        table: &[S],
        best: &mut S,
    ) {
        if slot + 1 == counts.len() {
            counts[slot] = remaining;
            let value: S = counts.iter().map(|&c| table[c as usize]).sum();
            if value > *best {
                *best = value;
            }
            return;
        }
        for c in 0..=remaining {
            counts[slot] = c;
            walk(slot + 1, remaining - c, counts, table, best);
        }
    }
    walk(0, r, &mut counts, &table, &mut best);

    let n_s = S::of(n as f64);
    let uniform = n_s * n_s.recip().powf(pe);
    if uniform > best {
        best = uniform;
    }
    Ok(p.root(best))
}

/// `binom(r + n - 1, n - 1)` in floating point.
fn lattice_size(r: u64, n: u64) -> f64 {
    let k = n.saturating_sub(1);
    (1..=k).fold(1.0, |acc, i| acc * (r + i) as f64 / i as f64)
}

/// Constant of the one-dimensional step estimate:
/// `(C(p,2)^p + (1 + 2^(1-p)) 2^(-p alpha) / (1 - 2^(-p alpha)))^(1/p)`.
pub fn rho<S: Scalar>(p: PExponent<S>, alpha: HolderExponent<S>) -> S {
    let pe = p.get();
    let two = S::of(2.0);
    let c2 = c_const(p, 2).expect("n = 2 is valid");
    let decay = two.powf(-pe * alpha.get());
    let tail = (S::one() + two.powf(S::one() - pe)) * decay / (S::one() - decay);
    p.root(c2.powf(pe) + tail)
}

/// Per-face constant of the molecule decomposition, the product of
/// `C(p alpha, d)^alpha`, `2^(2/p)`, the two geometric factors and
/// `(1 + (d-1)^(p alpha))^(1/p)`.
pub fn tau<S: Scalar>(p: PExponent<S>, alpha: HolderExponent<S>, d: u32) -> Result<S> {
    if d == 0 {
        return domain("dimension must be positive");
    }
    let pe = p.get();
    let a = alpha.get();
    let two = S::of(2.0);
    let p_alpha = PExponent::new(pe * a)?;
    let corner = c_const(p_alpha, d as u64)?.powf(a);
    let coarse = p.root((S::one() - two.powf(pe * (a - S::one()))).recip());
    let fine = p.root((S::one() - two.powf(-pe * a)).recip());
    let face = p.root(S::one() + S::of((d - 1) as f64).powf(pe * a));
    Ok(corner * two.powf(two / pe) * coarse * fine * face)
}

/// Lower and upper bound on the Lipschitz constant of the cube retraction:
/// `C(p, 2^(d-1))` and `C(p, 2^(d-1)) C(p, d) C(p, 3)`.
pub fn retraction_bounds<S: Scalar>(p: PExponent<S>, d: u32) -> Result<(S, S)> {
    if d == 0 {
        return domain("dimension must be positive");
    }
    let lower = c_const(p, 1u64 << (d - 1))?;
    let upper = lower * c_const(p, d as u64)? * c_const(p, 3)?;
    Ok((lower, upper))
}

/// `C(p, 2^d) rho^d tau^d`, the distance estimate between the free p-space over
/// the snowflaked cube and `l_p`.
pub fn bm_bound<S: Scalar>(p: PExponent<S>, alpha: HolderExponent<S>, d: u32) -> Result<S> {
    if d == 0 {
        return domain("dimension must be positive");
    }
    let di = d as i32;
    Ok(c_const(p, 1u64 << d)? * rho(p, alpha).powi(di) * tau(p, alpha, d)?.powi(di))
}
