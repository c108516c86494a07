//! Lower bounds from families of 1-Lipschitz functions with bounded overlap.
//!
//! If every molecule is seen by at most `κ` of the functions and each
//! function kills the molecules it does not see, then for any decomposition
//! `m = Σ a_i μ_i` subadditivity of `t ↦ t^p` gives
//! `Σ_j |⟨f_j, m⟩|^p ≤ κ Σ_i |a_i|^p`.

use std::collections::BTreeSet;

use super::FreeElement;
use crate::constants::PExponent;
use crate::error::{Error, Result};
use crate::metric::PointedFiniteMetric;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct DualCertificate<S> {
    /// Values of each function on every host point.
    pub functions: Vec<Vec<S>>,
    /// Unordered pairs `(i, j)`, `i < j`, on which each function may separate points.
    pub activity: Vec<BTreeSet<(usize, usize)>>,
    pub multiplicity: usize,
}

fn reject<T>(msg: String) -> Result<T> {
    Err(Error::Certificate(msg))
}

impl<S: Scalar> DualCertificate<S> {
    /// Builds a certificate whose activity sets are read off the functions:
    /// a pair is active exactly when the function separates it.
    pub fn from_functions(host: &PointedFiniteMetric<S>, functions: Vec<Vec<S>>, multiplicity: usize) -> Self {
        let n = host.len();
        let activity = functions
            .iter()
            .map(|f| {
                (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| f.len() == n && f[i] != f[j])
                    .collect()
            })
            .collect();
        Self { functions, activity, multiplicity }
    }

    /// Checks every condition the lower bound relies on.
    pub fn validate(&self, host: &PointedFiniteMetric<S>) -> Result<()> {
        let n = host.len();
        if self.multiplicity == 0 {
            return reject("multiplicity must be positive".into());
        }
        if self.activity.len() != self.functions.len() {
            return reject(format!(
                "{} functions but {} activity sets",
                self.functions.len(),
                self.activity.len()
            ));
        }
        let tol = S::residual_tol();
        let mut load = vec![0usize; n * n];
        for (k, (f, active)) in self.functions.iter().zip(&self.activity).enumerate() {
            if f.len() != n {
                return reject(format!("function {k} has {} values for {n} points", f.len()));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return reject(format!("function {k} has a non-finite value"));
            }
            if f[host.base()].abs() > tol {
                return reject(format!("function {k} does not vanish at the base point"));
            }
            for &(i, j) in active {
                if i >= j || j >= n {
                    return reject(format!("function {k} lists malformed pair ({i}, {j})"));
                }
                load[i * n + j] += 1;
                if load[i * n + j] > self.multiplicity {
                    return reject(format!(
                        "pair ({i}, {j}) is active for more than {} functions",
                        self.multiplicity
                    ));
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    let gap = (f[i] - f[j]).abs();
                    let r = host.dist(i, j);
                    if gap > r * (S::one() + tol) {
                        return reject(format!(
                            "function {k} has Lipschitz ratio {} > 1 on pair ({i}, {j})",
                            gap / r
                        ));
                    }
                    if gap > tol * r && !active.contains(&(i, j)) {
                        return reject(format!("function {k} does not annihilate inactive molecule ({i}, {j})"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `(Σ_j |⟨f_j, m⟩|^p / κ)^{1/p}`, a lower bound on `‖m‖_p`.
pub fn dual_lower_bound<S: Scalar>(m: &FreeElement<S>, p: PExponent<S>, cert: &DualCertificate<S>) -> Result<S> {
    cert.validate(m.host())?;
    let total: S = cert.functions.iter().map(|f| m.pair(f).abs().powf(p.get())).sum();
    Ok(p.root(total / S::of(cert.multiplicity as f64)))
}
