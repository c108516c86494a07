//! Finitely supported elements of the free p-space over a pointed finite
//! metric space, molecule decompositions and the free p-norm.
//!
//! Exact values come from [`exact_norm_p1`] (transport) and
//! [`exact_norm_small`] (support enumeration). Certified bounds come from
//! explicit decompositions ([`upper_bound_from`]) and Lipschitz dual
//! certificates ([`dual_lower_bound`]).

mod dual;
mod enumerate;
mod flow;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::constants::PExponent;
use crate::error::{domain, Error, Result};
use crate::metric::{content_lines, parse_field, parse_real, PointedFiniteMetric};
use crate::scalar::Scalar;

pub use dual::{dual_lower_bound, DualCertificate};
pub use enumerate::{exact_norm_small, exact_norm_small_capped, restricted_norm, restricted_norm_capped, DEFAULT_CAP};
pub use flow::exact_norm_p1;

pub type Host<S> = Arc<PointedFiniteMetric<S>>;

fn same_host<S: Scalar>(a: &Host<S>, b: &Host<S>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// `Σ w_i δ(x_i)` with the base coordinate dropped (`δ(base) = 0`).
#[derive(Debug, Clone)]
pub struct FreeElement<S> {
    host: Host<S>,
    weights: BTreeMap<usize, S>,
}

impl<S: Scalar> FreeElement<S> {
    pub fn zero(host: Host<S>) -> Self {
        Self { host, weights: BTreeMap::new() }
    }

    /// Sums repeated indices, drops the base index and exact zeros.
    pub fn from_weights(host: Host<S>, weights: impl IntoIterator<Item = (usize, S)>) -> Result<Self> {
        let mut el = Self::zero(host);
        for (i, w) in weights {
            el.add_weight(i, w)?;
        }
        Ok(el)
    }

    pub fn delta(host: Host<S>, x: usize) -> Result<Self> {
        Self::from_weights(host, [(x, S::one())])
    }

    /// The element a molecule denotes, `(δ(x) − δ(y)) / ρ(x, y)`.
    pub fn molecule(host: Host<S>, m: Molecule) -> Result<Self> {
        m.check(&host)?;
        let r = host.dist(m.x, m.y);
        Self::from_weights(host, [(m.x, S::one() / r), (m.y, -S::one() / r)])
    }

    pub fn add_weight(&mut self, i: usize, w: S) -> Result<()> {
        if i >= self.host.len() {
            return domain(format!("point index {i} out of range for {} points", self.host.len()));
        }
        if !w.is_finite() {
            return domain(format!("non-finite weight at point {i}"));
        }
        if i == self.host.base() || w == S::zero() {
            return Ok(());
        }
        let entry = self.weights.entry(i).or_insert(S::zero());
        *entry = *entry + w;
        if *entry == S::zero() {
            self.weights.remove(&i);
        }
        Ok(())
    }

    pub fn host(&self) -> &Host<S> {
        &self.host
    }

    pub fn weight(&self, i: usize) -> S {
        self.weights.get(&i).copied().unwrap_or(S::zero())
    }

    /// Nonzero weights in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.weights.iter().map(|(&i, &w)| (i, w))
    }

    pub fn support(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn scaled(&self, a: S) -> Self {
        let weights = if a == S::zero() {
            BTreeMap::new()
        } else {
            self.weights.iter().map(|(&i, &w)| (i, a * w)).collect()
        };
        Self { host: self.host.clone(), weights }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !same_host(&self.host, &other.host) {
            return Err(Error::MixedHosts);
        }
        let mut out = self.clone();
        for (i, w) in other.iter() {
            out.add_weight(i, w)?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scaled(-S::one()))
    }

    /// `⟨f, m⟩ = Σ w_i f(x_i)`.
    pub fn pair(&self, f: &[S]) -> S {
        self.iter().map(|(i, w)| w * f[i]).sum()
    }

    /// Largest coordinate difference to `other`.
    pub fn max_residual(&self, other: &Self) -> S {
        let mut worst = S::zero();
        for i in self.weights.keys().chain(other.weights.keys()) {
            worst = worst.max((self.weight(*i) - other.weight(*i)).abs());
        }
        worst
    }

    pub fn max_abs_weight(&self) -> S {
        self.weights.values().fold(S::zero(), |acc, w| acc.max(w.abs()))
    }

    /// One `w index` line per nonzero weight.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.iter() {
            let _ = writeln!(out, "{w:e} {i}");
        }
        out
    }

    pub fn parse(host: Host<S>, text: &str) -> Result<Self> {
        let mut el = Self::zero(host);
        for (line, content) in content_lines(text) {
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [w, i] = fields[..] else {
                return Err(Error::Parse { line, msg: "expected \"w point-index\"".into() });
            };
            let w: S = parse_real(w, line)?;
            let i: usize = parse_field(i, line)?;
            el.add_weight(i, w).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        }
        Ok(el)
    }
}

/// `(δ(x) − δ(y)) / ρ(x, y)` for distinct points `x`, `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Molecule {
    pub x: usize,
    pub y: usize,
}

impl Molecule {
    pub fn new(x: usize, y: usize) -> Result<Self> {
        if x == y {
            return domain(format!("a molecule needs two distinct points, got {x} twice"));
        }
        Ok(Self { x, y })
    }

    fn check<S: Scalar>(&self, host: &PointedFiniteMetric<S>) -> Result<()> {
        if self.x == self.y {
            return domain(format!("degenerate molecule ({0}, {0})", self.x));
        }
        if self.x.max(self.y) >= host.len() {
            return domain(format!("molecule ({}, {}) out of range", self.x, self.y));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<S> {
    pub a: S,
    pub molecule: Molecule,
}

/// `Σ a_i μ_i` over a fixed host.
#[derive(Debug, Clone)]
pub struct Decomposition<S> {
    host: Host<S>,
    terms: Vec<Term<S>>,
}

impl<S: Scalar> Decomposition<S> {
    pub fn new(host: Host<S>) -> Self {
        Self { host, terms: Vec::new() }
    }

    pub fn from_terms(host: Host<S>, terms: impl IntoIterator<Item = (S, usize, usize)>) -> Result<Self> {
        let mut d = Self::new(host);
        for (a, x, y) in terms {
            d.push(a, Molecule::new(x, y)?)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, a: S, molecule: Molecule) -> Result<()> {
        molecule.check(&self.host)?;
        self.terms.push(Term { a, molecule });
        Ok(())
    }

    /// Appends the terms of `other`; both must live over the same host.
    pub fn extend(&mut self, other: &Self) -> Result<()> {
        if !same_host(&self.host, &other.host) {
            return Err(Error::MixedHosts);
        }
        self.terms.extend_from_slice(&other.terms);
        Ok(())
    }

    pub fn host(&self) -> &Host<S> {
        &self.host
    }

    pub fn terms(&self) -> &[Term<S>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// One `a x y` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            let _ = writeln!(out, "{:e} {} {}", t.a, t.molecule.x, t.molecule.y);
        }
        out
    }

    pub fn parse(host: Host<S>, text: &str) -> Result<Self> {
        let mut d = Self::new(host);
        for (line, content) in content_lines(text) {
            let fields: Vec<&str> = content.split_whitespace().collect();
            let [a, x, y] = fields[..] else {
                return Err(Error::Parse { line, msg: "expected \"a x y\"".into() });
            };
            let a: S = parse_real(a, line)?;
            let x: usize = parse_field(x, line)?;
            let y: usize = parse_field(y, line)?;
            Molecule::new(x, y)
                .and_then(|m| d.push(a, m))
                .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        }
        Ok(d)
    }
}

/// `Σ a_i (δ(x_i) − δ(y_i)) / ρ(x_i, y_i)`.
pub fn evaluate<S: Scalar>(decomp: &Decomposition<S>) -> Result<FreeElement<S>> {
    let host = &decomp.host;
    let mut el = FreeElement::zero(host.clone());
    for t in &decomp.terms {
        let r = host.dist(t.molecule.x, t.molecule.y);
        el.add_weight(t.molecule.x, t.a / r)?;
        el.add_weight(t.molecule.y, -t.a / r)?;
    }
    Ok(el)
}

/// `(Σ |a_i|^p)^{1/p}`.
pub fn p_cost<S: Scalar>(decomp: &Decomposition<S>, p: PExponent<S>) -> S {
    coefficient_cost(decomp.terms.iter().map(|t| t.a), p)
}

pub(crate) fn coefficient_cost<S: Scalar>(coeffs: impl IntoIterator<Item = S>, p: PExponent<S>) -> S {
    p.root(coeffs.into_iter().map(|a| a.abs().powf(p.get())).sum())
}

/// Tolerance for "decomposition evaluates to m", relative to the element size.
pub(crate) fn residual_tolerance<S: Scalar>(m: &FreeElement<S>) -> S {
    S::residual_tol() * m.max_abs_weight().max(S::one())
}

/// The p-cost of `decomp`, after checking that it evaluates to `m`.
pub fn upper_bound_from<S: Scalar>(m: &FreeElement<S>, p: PExponent<S>, decomp: &Decomposition<S>) -> Result<S> {
    if !same_host(m.host(), decomp.host()) {
        return Err(Error::MixedHosts);
    }
    let residual = evaluate(decomp)?.max_residual(m);
    if residual > residual_tolerance(m) {
        return Err(Error::Residual(residual.as_f64()));
    }
    Ok(p_cost(decomp, p))
}
