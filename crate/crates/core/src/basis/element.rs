//! Elements supported on dyadic points, basis indices, basis combinations and
//! the basis vectors `ι(e_v)` themselves.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::coeff::Coeff;
use crate::constants::{c_const, HolderExponent, PExponent};
use crate::dyadic::{level_of, DyadicPoint, DyadicScalar};
use crate::error::{domain, Error, Result};
use crate::free::{exact_norm_p1, exact_norm_small, upper_bound_from, Decomposition, FreeElement, Host, DEFAULT_CAP};
use crate::metric::PointedFiniteMetric;

/// A point `v ∈ V_k \ V_{k-1}` of the unit cube, `v ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    v: DyadicPoint,
    k: u32,
}

impl BasisIndex {
    /// Rejects points outside the cube, the origin, and stale levels.
    pub fn new(v: DyadicPoint, k: u32) -> Result<Self> {
        if !v.in_unit_cube() {
            return domain(format!("{v} lies outside the unit cube"));
        }
        if v.is_origin() {
            return domain("the origin carries no basis vector");
        }
        let level = level_of(&v);
        if level != k {
            return domain(format!("{v} has level {level}, not {k}"));
        }
        Ok(Self { v, k })
    }

    pub fn of(v: DyadicPoint) -> Result<Self> {
        let k = level_of(&v);
        Self::new(v, k)
    }

    pub fn point(&self) -> &DyadicPoint {
        &self.v
    }

    pub fn level(&self) -> u32 {
        self.k
    }
}

/// `Σ c_x δ(x)` over dyadic points of the cube; `δ(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicElement<C> {
    d: usize,
    weights: BTreeMap<DyadicPoint, C>,
}

impl<C: Coeff> DyadicElement<C> {
    pub fn zero(d: usize) -> Self {
        Self { d, weights: BTreeMap::new() }
    }

    pub fn delta(v: &DyadicPoint) -> Self {
        let mut el = Self::zero(v.dim());
        el.add_weight(v, C::one());
        el
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn add_weight(&mut self, v: &DyadicPoint, c: C) {
        assert_eq!(v.dim(), self.d, "point {v} has the wrong dimension");
        if v.is_origin() {
            return;
        }
        let sum = match self.weights.remove(v) {
            Some(w) => w + c,
            None => c,
        };
        if !sum.is_negligible() {
            self.weights.insert(v.clone(), sum);
        }
    }

    pub fn weight(&self, v: &DyadicPoint) -> C {
        self.weights.get(v).cloned().unwrap_or_else(C::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DyadicPoint, &C)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    /// `self += a * other`.
    pub fn add_scaled(&mut self, other: &Self, a: &C) {
        for (v, c) in &other.weights {
            self.add_weight(v, a.clone() * c.clone());
        }
    }

    pub fn scaled(&self, a: &C) -> Self {
        let mut out = Self::zero(self.d);
        out.add_scaled(self, a);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-C::one());
        out
    }

    /// Largest coordinate of `self − other`, evaluated at `alpha`.
    pub fn max_residual(&self, other: &Self, alpha: f64) -> f64 {
        self.sub(other).iter().map(|(_, c)| c.to_f64(alpha).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_weight(&self, alpha: f64) -> f64 {
        self.iter().map(|(_, c)| c.to_f64(alpha).abs()).fold(0.0, f64::max)
    }

    /// The same element over the snowflaked l1 space on `{0} ∪ support`.
    pub fn to_free(&self, alpha: HolderExponent<f64>) -> Result<FreeElement<f64>> {
        let host = snowflake_host(self.d, self.weights.keys(), alpha)?;
        self.to_free_on(&host, alpha.get())
    }

    /// The same element over a host whose points carry coordinates.
    pub fn to_free_on(&self, host: &Host<f64>, alpha: f64) -> Result<FreeElement<f64>> {
        let mut out = FreeElement::zero(host.clone());
        for (v, c) in &self.weights {
            let i = host
                .index_of(&v.to_f64())
                .ok_or_else(|| Error::Domain(format!("{v} is not a point of the host")))?;
            out.add_weight(i, c.to_f64(alpha))?;
        }
        Ok(out)
    }
}

impl DyadicElement<f64> {
    /// Reads an element over a host of dyadic points based at the origin.
    pub fn from_free(m: &FreeElement<f64>) -> Result<Self> {
        let host = m.host();
        let coords = host
            .coords()
            .ok_or_else(|| Error::Domain("host points carry no coordinates".into()))?;
        let point = |i: usize| {
            DyadicPoint::from_f64(&coords[i])
                .ok_or_else(|| Error::Domain(format!("point {:?} is not dyadic", coords[i])))
        };
        let base = point(host.base())?;
        if !base.is_origin() {
            return domain(format!("host must be based at the origin, not {base}"));
        }
        let mut out = Self::zero(base.dim());
        for (i, w) in m.iter() {
            let v = point(i)?;
            if !v.in_unit_cube() {
                return domain(format!("{v} lies outside the unit cube"));
            }
            out.add_weight(&v, w);
        }
        Ok(out)
    }
}

/// `({0} ∪ points, |·|_1^α)` based at the origin, points in iteration order.
pub fn snowflake_host<'a>(
    d: usize,
    points: impl IntoIterator<Item = &'a DyadicPoint>,
    alpha: HolderExponent<f64>,
) -> Result<Host<f64>> {
    let mut coords = vec![vec![0.0; d]];
    coords.extend(points.into_iter().filter(|v| !v.is_origin()).map(|v| v.to_f64()));
    Ok(Arc::new(PointedFiniteMetric::l1_space(coords, 0)?.holder_distort(alpha)))
}

/// `Σ c_v ι(e_v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisCombination<C> {
    d: usize,
    coeffs: BTreeMap<BasisIndex, C>,
}

impl<C: Coeff> BasisCombination<C> {
    pub fn zero(d: usize) -> Self {
        Self { d, coeffs: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn add_term(&mut self, index: &BasisIndex, c: C) {
        assert_eq!(index.v.dim(), self.d, "index {:?} has the wrong dimension", index.v);
        let sum = match self.coeffs.remove(index) {
            Some(w) => w + c,
            None => c,
        };
        if !sum.is_negligible() {
            self.coeffs.insert(index.clone(), sum);
        }
    }

    /// `self += a * other`.
    pub fn add_scaled(&mut self, other: &Self, a: &C) {
        for (i, c) in &other.coeffs {
            self.add_term(i, a.clone() * c.clone());
        }
    }

    pub fn coeff(&self, index: &BasisIndex) -> C {
        self.coeffs.get(index).cloned().unwrap_or_else(C::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &C)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(Σ |c_v|^p)^{1/p}`, the ℓ_p norm of the coefficient vector.
    pub fn cost(&self, p: PExponent<f64>, alpha: f64) -> f64 {
        let pe = p.get();
        p.root(self.coeffs.values().map(|c| c.to_f64(alpha).abs().powf(pe)).sum())
    }

    /// `Σ c_v ι(e_v)` as an element.
    pub fn synthesize(&self, alpha: f64) -> DyadicElement<C> {
        let mut out = DyadicElement::zero(self.d);
        for (i, c) in &self.coeffs {
            out.add_scaled(&basis_vector(i, alpha), c);
        }
        out
    }
}

/// `ι(e_v) = 2^{kα}(δ(v) − Σ_u Λ(u, v) δ(u))`, the sum over `V_{k-1}`; for
/// `k = 0` the sum only meets `δ(0) = 0`.
pub(crate) fn basis_vector<C: Coeff>(index: &BasisIndex, alpha: f64) -> DyadicElement<C> {
    let v = &index.v;
    let k = index.k;
    let mut out = DyadicElement::delta(v);
    if k == 0 {
        return out;
    }
    let scale = C::two_pow_alpha(k as i32, alpha);
    let fine: Vec<usize> = (0..v.dim()).filter(|&j| v.coord(j).level() == k).collect();
    let weight = -C::from_dyadic(DyadicScalar::mesh(fine.len() as u32));
    let step = DyadicScalar::mesh(k);
    for mask in 0u32..(1 << fine.len()) {
        let mut coords = v.coords();
        for (b, &j) in fine.iter().enumerate() {
            coords[j] = if mask >> b & 1 == 1 { coords[j] + step } else { coords[j] - step };
        }
        out.add_weight(&DyadicPoint::from_scalars(&coords), weight.clone());
    }
    out.scaled(&scale)
}

/// `ι(e_v)` in dimension `d`.
pub fn basis_element<C: Coeff>(d: usize, alpha: HolderExponent<f64>, index: &BasisIndex) -> Result<DyadicElement<C>> {
    if index.v.dim() != d {
        return domain(format!("index {} does not have dimension {d}", index.v));
    }
    Ok(basis_vector(index, alpha.get()))
}

/// How [`basis_norm_check`] obtained its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    /// Transport value, exact for p = 1.
    Exact,
    /// Exact norm over the support; an upper bound on the norm in the cube.
    Restricted,
    /// Cost of the molecule decomposition `Σ_u Λ(u,v) (δ(v) − δ(u))`.
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisNormCheck {
    pub value: f64,
    pub bound: f64,
    pub method: NormMethod,
}

impl BasisNormCheck {
    pub fn passes(&self) -> bool {
        self.value <= self.bound + 1e-9
    }
}

/// `‖ι(e_v)‖_p`, or a certified upper estimate, against `d^α C(p, 2^d)`.
pub fn basis_norm_check(
    d: usize,
    alpha: HolderExponent<f64>,
    p: PExponent<f64>,
    index: &BasisIndex,
) -> Result<BasisNormCheck> {
    let a = alpha.get();
    let bound = (d as f64).powf(a) * c_const(p, 1u64 << d)?;
    let el: DyadicElement<f64> = basis_element(d, alpha, index)?;
    let points: Vec<DyadicPoint> = el.iter().map(|(v, _)| v.clone()).collect();
    let host = snowflake_host(d, &points, alpha)?;
    let m = el.to_free_on(&host, a)?;
    let (value, method) = if p.get() == 1.0 {
        (exact_norm_p1(&m)?.0, NormMethod::Exact)
    } else if host.len() <= DEFAULT_CAP {
        (exact_norm_small(&m, p)?.0, NormMethod::Restricted)
    } else {
        let v = host.index_of(&index.v.to_f64()).expect("v is in the support");
        let terms = (0..host.len()).filter(|&u| u != v).filter_map(|u| {
            // ι(e_v) = Σ_u c_u (δ(v) − δ(u)); the base takes the total mass
            let c = if u == host.base() { m.iter().map(|(_, w)| w).sum() } else { -m.weight(u) };
            (c != 0.0).then(|| (c * host.dist(v, u), v, u))
        });
        let decomp = Decomposition::from_terms(host.clone(), terms)?;
        (upper_bound_from(&m, p, &decomp)?, NormMethod::Estimate)
    };
    Ok(BasisNormCheck { value, bound, method })
}
