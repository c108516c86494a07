//! Exact free p-norm on small spaces by enumerating molecule bases.
//!
//! `Σ |a_i|^p` is concave on every sign orthant of the solution set of
//! `Σ a_i μ_i = m`, so some minimizer uses linearly independent molecules.
//! Any independent support extends to a basis of the span with zero
//! coefficients, hence the minimum over all bases of the unique solution's
//! cost is the norm.

use rayon::prelude::*;

use super::{residual_tolerance, Decomposition, FreeElement, Molecule};
use crate::constants::PExponent;
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Largest host handled by [`exact_norm_small`].
pub const DEFAULT_CAP: usize = 8;

pub fn exact_norm_small<S: Scalar>(m: &FreeElement<S>, p: PExponent<S>) -> Result<(S, Decomposition<S>)> {
    exact_norm_small_capped(m, p, DEFAULT_CAP)
}

pub fn exact_norm_small_capped<S: Scalar>(
    m: &FreeElement<S>,
    p: PExponent<S>,
    cap: usize,
) -> Result<(S, Decomposition<S>)> {
    let n = m.host().len();
    if n > cap {
        return Err(Error::CapExceeded { points: n, cap });
    }
    let all: Vec<usize> = (0..n).collect();
    solve(m, p, &all)
}

/// Infimum over decompositions into molecules with both endpoints in `subset`.
pub fn restricted_norm<S: Scalar>(m: &FreeElement<S>, p: PExponent<S>, subset: &[usize]) -> Result<S> {
    restricted_norm_capped(m, p, subset, DEFAULT_CAP).map(|(v, _)| v)
}

pub fn restricted_norm_capped<S: Scalar>(
    m: &FreeElement<S>,
    p: PExponent<S>,
    subset: &[usize],
    cap: usize,
) -> Result<(S, Decomposition<S>)> {
    let mut pts = subset.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if let Some(&bad) = pts.iter().find(|&&i| i >= m.host().len()) {
        return domain(format!("subset index {bad} out of range"));
    }
    if pts.len() > cap {
        return Err(Error::CapExceeded { points: pts.len(), cap });
    }
    if let Some(i) = m.support().into_iter().find(|i| pts.binary_search(i).is_err()) {
        return domain(format!("support point {i} lies outside the subset"));
    }
    solve(m, p, &pts)
}

struct Best<S> {
    psum: S,
    combo: Vec<usize>,
    coeffs: Vec<S>,
}

fn better<S: Scalar>(a: Option<Best<S>>, b: Option<Best<S>>) -> Option<Best<S>> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            let a_wins = a.psum < b.psum || (a.psum == b.psum && a.combo <= b.combo);
            Some(if a_wins { a } else { b })
        }
    }
}

/// Next `k`-combination of `0..n` after `c` in lexicographic order.
fn advance(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Molecule columns are independent exactly when their edges form a forest.
fn is_forest(combo: &[usize], edges: &[(usize, usize)], parent: &mut [usize]) -> bool {
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, v) in parent.iter_mut().enumerate() {
        *v = i;
    }
    for &c in combo {
        let (a, b) = (find(parent, edges[c].0), find(parent, edges[c].1));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

struct System<'a, S> {
    columns: &'a [Vec<S>],
    rhs: &'a [S],
    rank_scale: S,
    residual_tol: S,
}

impl<S: Scalar> System<'_, S> {
    /// Solves `A_combo a = rhs`; `None` if the columns are dependent or the
    /// system is inconsistent.
    fn solve(&self, combo: &[usize], work: &mut Vec<S>) -> Option<Vec<S>> {
        let rows = self.rhs.len();
        let r = combo.len();
        let w = r + 1;
        work.clear();
        for i in 0..rows {
            for &c in combo {
                work.push(self.columns[c][i]);
            }
            work.push(self.rhs[i]);
        }
        let tol = S::rank_tol() * self.rank_scale;
        for col in 0..r {
            let (piv, pval) = (col..rows)
                .map(|i| (i, work[i * w + col].abs()))
                .fold((col, S::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pval <= tol {
                return None;
            }
            if piv != col {
                for j in 0..w {
                    work.swap(piv * w + j, col * w + j);
                }
            }
            let d = work[col * w + col];
            for i in col + 1..rows {
                let f = work[i * w + col] / d;
                if f != S::zero() {
                    for j in col..w {
                        work[i * w + j] = work[i * w + j] - f * work[col * w + j];
                    }
                }
            }
        }
        let mut x = vec![S::zero(); r];
        for i in (0..r).rev() {
            let mut s = work[i * w + r];
            for j in i + 1..r {
                s = s - work[i * w + j] * x[j];
            }
            x[i] = s / work[i * w + i];
        }
        let biggest = x.iter().fold(S::zero(), |acc, v| acc.max(v.abs()));
        let snapped: Vec<S> =
            x.iter().map(|&v| if v.abs() <= S::rank_tol() * biggest { S::zero() } else { v }).collect();
        if self.residual(combo, &snapped) <= self.residual_tol {
            Some(snapped)
        } else if self.residual(combo, &x) <= self.residual_tol {
            Some(x)
        } else {
            None
        }
    }

    fn residual(&self, combo: &[usize], x: &[S]) -> S {
        (0..self.rhs.len())
            .map(|i| {
                let ax: S = combo.iter().zip(x).map(|(&c, &a)| self.columns[c][i] * a).sum();
                (ax - self.rhs[i]).abs()
            })
            .fold(S::zero(), S::max)
    }
}

fn solve<S: Scalar>(m: &FreeElement<S>, p: PExponent<S>, pts: &[usize]) -> Result<(S, Decomposition<S>)> {
    let host = m.host().clone();
    if m.is_zero() {
        return Ok((S::zero(), Decomposition::new(host)));
    }
    if pts.len() < 2 {
        return Err(Error::NotRepresentable);
    }
    let base = host.base();
    let rows: Vec<usize> = pts.iter().copied().filter(|&i| i != base).collect();
    let row_of = |i: usize| rows.iter().position(|&r| r == i);
    let pairs: Vec<(usize, usize)> =
        (0..pts.len()).flat_map(|a| (a + 1..pts.len()).map(move |b| (pts[a], pts[b]))).collect();
    let columns: Vec<Vec<S>> = pairs
        .iter()
        .map(|&(x, y)| {
            let r = host.dist(x, y);
            let mut col = vec![S::zero(); rows.len()];
            if let Some(i) = row_of(x) {
                col[i] = S::one() / r;
            }
            if let Some(i) = row_of(y) {
                col[i] = -S::one() / r;
            }
            col
        })
        .collect();
    let rhs: Vec<S> = rows.iter().map(|&i| m.weight(i)).collect();
    let rank_scale = columns.iter().flatten().fold(S::zero(), |acc, v| acc.max(v.abs()));
    let system = System { columns: &columns, rhs: &rhs, rank_scale, residual_tol: residual_tolerance(m) };

    // the span of molecules on k points has dimension k - 1
    let r = pts.len() - 1;
    let np = pairs.len();
    let q = r.min(2);
    let mut prefixes = Vec::new();
    let mut c: Vec<usize> = (0..q).collect();
    loop {
        prefixes.push(c.clone());
        if !advance(&mut c, np) {
            break;
        }
    }
    // pairs as edges between positions in pts, for the forest filter
    let edges: Vec<(usize, usize)> =
        (0..pts.len()).flat_map(|a| (a + 1..pts.len()).map(move |b| (a, b))).collect();
    let pw = p.get();
    let best = prefixes
        .par_iter()
        .map(|prefix| {
            let last = prefix.last().copied();
            let start = last.map_or(0, |l| l + 1);
            let tail_len = r - q;
            if start + tail_len > np {
                return None;
            }
            let mut tail: Vec<usize> = (start..start + tail_len).collect();
            let mut combo = prefix.clone();
            combo.extend_from_slice(&tail);
            let mut work = Vec::new();
            let mut parent = vec![0; pts.len()];
            let mut best: Option<Best<S>> = None;
            loop {
                let solved = if is_forest(&combo, &edges, &mut parent) { system.solve(&combo, &mut work) } else { None };
                if let Some(coeffs) = solved {
                    let psum: S = coeffs.iter().map(|a| a.abs().powf(pw)).sum();
                    let candidate = Best { psum, combo: combo.clone(), coeffs };
                    best = better(best, Some(candidate));
                }
                if tail_len == 0 || !advance_tail(&mut tail, start, np) {
                    break;
                }
                combo.truncate(q);
                combo.extend_from_slice(&tail);
            }
            best
        })
        .reduce(|| None, better);
    let best = best.ok_or(Error::NotRepresentable)?;

    let mut witness = Decomposition::new(host);
    for (&c, &a) in best.combo.iter().zip(&best.coeffs) {
        if a != S::zero() {
            let (x, y) = pairs[c];
            witness.push(a, Molecule { x, y })?;
        }
    }
    Ok((p.root(best.psum), witness))
}

/// Like [`advance`] for combinations of `start..n`.
fn advance_tail(tail: &mut [usize], start: usize, n: usize) -> bool {
    for v in tail.iter_mut() {
        *v -= start;
    }
    let more = advance(tail, n - start);
    for v in tail.iter_mut() {
        *v += start;
    }
    more
}
