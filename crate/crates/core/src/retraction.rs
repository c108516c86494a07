//! The coordinatewise-affine retraction of a cube union onto the free
//! p-space over its vertices, `r(x) = Σ_v Λ(v, x) δ(v)`.
//!
//! Besides evaluating `r`, this module builds the explicit molecule
//! decompositions that bound `‖r(x) − r(y)‖_p` from above, and the point pair
//! plus indicator certificate that bounds it from below.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::constants::PExponent;
use crate::error::{domain, Error, Result};
use crate::free::{
    dual_lower_bound, exact_norm_small, upper_bound_from, Decomposition, DualCertificate, FreeElement, Host,
    Molecule,
};
use crate::lambda::{support_in_cube, CubeComplex, Lattice, VertexWeight};
use crate::metric::PointedFiniteMetric;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct RetractionContext<S> {
    complex: CubeComplex<S>,
    p: PExponent<S>,
    vertex_space: Host<S>,
    vertices: Vec<Lattice>,
    index: BTreeMap<Lattice, usize>,
}

impl<S: Scalar> RetractionContext<S> {
    /// Builds the vertex space `V` with the l1 metric, based at the complex's
    /// base vertex. Vertices are indexed in lexicographic order.
    pub fn new(complex: CubeComplex<S>, p: PExponent<S>) -> Result<Self> {
        let vertices = complex.vertices();
        let index: BTreeMap<Lattice, usize> = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let base = index[complex.base_vertex()];
        let coords = vertices.iter().map(|v| complex.vertex_coords(v)).collect();
        let vertex_space = Arc::new(PointedFiniteMetric::l1_space(coords, base)?);
        Ok(Self { complex, p, vertex_space, vertices, index })
    }

    pub fn complex(&self) -> &CubeComplex<S> {
        &self.complex
    }

    pub fn p(&self) -> PExponent<S> {
        self.p
    }

    pub fn vertex_space(&self) -> &Host<S> {
        &self.vertex_space
    }

    pub fn vertices(&self) -> &[Lattice] {
        &self.vertices
    }

    pub fn vertex_index(&self, v: &[i64]) -> Result<usize> {
        self.index.get(v).copied().ok_or_else(|| Error::MissingVertex(v.to_vec()))
    }

    /// Vertex weights of `r(x)`, base vertex included.
    pub fn retract_weights(&self, x: &[S]) -> Result<Vec<VertexWeight<S>>> {
        self.complex.lambda_support(x)
    }

    pub fn retract(&self, x: &[S]) -> Result<FreeElement<S>> {
        self.element_from_weights(&self.retract_weights(x)?)
    }

    /// `Σ w_v δ(v)` as an element of the free space over `V`.
    pub fn element_from_weights(&self, weights: &[VertexWeight<S>]) -> Result<FreeElement<S>> {
        let mut el = FreeElement::zero(self.vertex_space.clone());
        for vw in weights {
            el.add_weight(self.vertex_index(&vw.vertex)?, vw.weight)?;
        }
        Ok(el)
    }

    /// Converts a real shift to lattice units; it must lie in `R Z^d`.
    pub fn lattice_shift(&self, shift: &[S]) -> Result<Lattice> {
        if shift.len() != self.complex.dim() {
            return domain("shift has the wrong dimension");
        }
        let tol = S::of(1e-9);
        shift
            .iter()
            .map(|&s| {
                let t = s / self.complex.scale();
                let r = t.round();
                if (t - r).abs() > tol * r.abs().max(S::one()) {
                    return domain(format!("shift component {s} is not a multiple of the cube side"));
                }
                r.to_i64().ok_or_else(|| Error::Domain(format!("shift component {s} is too large")))
            })
            .collect()
    }

    /// Moves each weight from `v` to `v + shift`. Works on full vertex weights
    /// because an element of the free space has already forgotten the weight
    /// carried by the base point, which a translation does not fix.
    pub fn translate_element(&self, weights: &[VertexWeight<S>], shift: &[S]) -> Result<FreeElement<S>> {
        let s = self.lattice_shift(shift)?;
        let moved: Vec<VertexWeight<S>> = weights
            .iter()
            .map(|vw| VertexWeight { vertex: vw.vertex.iter().zip(&s).map(|(a, b)| a + b).collect(), weight: vw.weight })
            .collect();
        self.element_from_weights(&moved)
    }

    /// `Σ (x_j − y_j) Λ^{d−1}(u, ·) (δ(w + u¹) − δ(w + u⁰))` for points of one
    /// cube that differ in coordinate `j` only; `others` are the shared local
    /// coordinates.
    fn coordinate_step(
        &self,
        decomp: &mut Decomposition<S>,
        w: &[i64],
        j: usize,
        delta: S,
        others: &[S],
    ) -> Result<()> {
        if delta == S::zero() {
            return Ok(());
        }
        let d = self.complex.dim();
        for bits in 0..1usize << d {
            if (bits >> j) & 1 == 1 {
                continue;
            }
            let mut weight = S::one();
            let mut low: Lattice = w.to_vec();
            for i in (0..d).filter(|&i| i != j) {
                let b = ((bits >> i) & 1) as i64;
                low[i] += b;
                weight = weight * if b == 1 { others[i] } else { S::one() - others[i] };
            }
            if weight == S::zero() {
                continue;
            }
            let mut high = low.clone();
            high[j] += 1;
            let molecule = Molecule::new(self.vertex_index(&high)?, self.vertex_index(&low)?)?;
            decomp.push(delta * weight, molecule)?;
        }
        Ok(())
    }

    /// Chain through the intermediate points `z^i` taking `x`'s coordinates
    /// up to `i` and `y`'s after; both points lie in cube `w`.
    fn same_cube(&self, decomp: &mut Decomposition<S>, w: &[i64], gx: &[S], gy: &[S]) -> Result<()> {
        let d = self.complex.dim();
        let scale = self.complex.scale();
        let local = |g: &[S], i: usize| g[i] - S::of(w[i] as f64);
        for j in 0..d {
            let others: Vec<S> = (0..d).map(|i| if i < j { local(gx, i) } else { local(gy, i) }).collect();
            let delta = (gx[j] - gy[j]) * scale;
            self.coordinate_step(decomp, w, j, delta, &others)?;
        }
        Ok(())
    }

    /// Decomposition of `r(x) − r(y)` following the construction behind the
    /// upper Lipschitz estimate: a coordinate chain inside a common cube, or
    /// else `x → x'` in the cube of `x`, a lattice translation `x' → y'`, and
    /// `y' → y` in the cube of `y`.
    pub fn lipschitz_upper_decomposition(&self, x: &[S], y: &[S]) -> Result<Decomposition<S>> {
        let mut decomp = Decomposition::new(self.vertex_space.clone());
        let cx = self.complex.containing_cubes(x)?;
        let cy = self.complex.containing_cubes(y)?;
        let gx = self.complex.lattice_coords(x);
        let gy = self.complex.lattice_coords(y);
        if gx == gy {
            return Ok(decomp);
        }
        if let Some((w, _)) = cx.iter().find(|(w, _)| cy.iter().any(|(u, _)| u == w)) {
            self.same_cube(&mut decomp, w, &gx, &gy)?;
            return Ok(decomp);
        }
        let w = &cx[0].0;
        let u = &cy[0].0;
        let d = self.complex.dim();
        let tol = S::of(1e-12);
        let mut gx2 = gx.clone();
        let mut gy2 = gx.clone();
        for i in (0..d).filter(|&i| w[i] != u[i]) {
            let target = (gx[i] - gy[i]).abs();
            let mut chosen = None;
            'search: for n in [w[i], w[i] + 1] {
                for m in [u[i], u[i] + 1] {
                    let (nf, mf) = (S::of(n as f64), S::of(m as f64));
                    let split = (gx[i] - nf).abs() + (nf - mf).abs() + (mf - gy[i]).abs();
                    if split <= target + tol * target.max(S::one()) {
                        chosen = Some((nf, mf));
                        break 'search;
                    }
                }
            }
            let (nf, mf) = chosen.ok_or_else(|| Error::Domain(format!("no additive bridge in coordinate {i}")))?;
            gx2[i] = nf;
            gy2[i] = mf;
        }
        self.same_cube(&mut decomp, w, &gx, &gx2)?;

        let shift: Lattice = (0..d).map(|i| (gy2[i] - gx2[i]).round().to_i64().unwrap_or(0)).collect();
        let span = S::of(shift.iter().map(|s| s.abs()).sum::<i64>() as f64) * self.complex.scale();
        if span > S::zero() {
            let local: Vec<S> = (0..d).map(|i| gx2[i] - S::of(w[i] as f64)).collect();
            for vw in support_in_cube(w, &local) {
                let target: Lattice = vw.vertex.iter().zip(&shift).map(|(a, b)| a + b).collect();
                let molecule = Molecule::new(self.vertex_index(&vw.vertex)?, self.vertex_index(&target)?)?;
                decomp.push(vw.weight * span, molecule)?;
            }
        }

        self.same_cube(&mut decomp, u, &gy2, &gy)?;
        Ok(decomp)
    }

    /// The extremal pair for cube `w`: `x` at the centre of the bottom face in
    /// the last coordinate, `y` at the centre of the top face, with the
    /// indicator certificate that matches the upper decomposition.
    pub fn witness_in_cube(&self, w: &[i64]) -> Result<Witness<S>> {
        if !self.complex.contains_cube(w) {
            return domain(format!("cube {w:?} is not part of the complex"));
        }
        let d = self.complex.dim();
        let scale = self.complex.scale();
        let half = S::of(0.5);
        let point = |top: bool| -> Vec<S> {
            (0..d)
                .map(|i| {
                    let t = if i + 1 < d { half } else if top { S::one() } else { S::zero() };
                    (S::of(w[i] as f64) + t) * scale
                })
                .collect()
        };
        let x = point(false);
        let y = point(true);
        let element = self.retract(&y)?.try_sub(&self.retract(&x)?)?;

        let n = self.vertices.len();
        let base = self.vertex_space.base();
        let mut functions = Vec::new();
        let mut activity = Vec::new();
        for u in CubeComplex::<S>::cube_vertices(w) {
            let ui = self.vertex_index(&u)?;
            let f: Vec<S> = (0..n)
                .map(|z| {
                    let on = if ui == base { z != ui } else { z == ui };
                    if on {
                        scale
                    } else {
                        S::zero()
                    }
                })
                .collect();
            let active: BTreeSet<(usize, usize)> =
                (0..n).filter(|&z| z != ui).map(|z| (z.min(ui), z.max(ui))).collect();
            functions.push(f);
            activity.push(active);
        }
        let certificate = DualCertificate { functions, activity, multiplicity: 2 };
        let certified_value = dual_lower_bound(&element, self.p, &certificate)?;
        let upper = self.lipschitz_upper_decomposition(&y, &x)?;
        let upper_value = upper_bound_from(&element, self.p, &upper)?;
        Ok(Witness { x, y, element, certificate, upper, certified_value, upper_value })
    }
}

#[derive(Debug, Clone)]
pub struct Witness<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
    /// `r(y) − r(x)`.
    pub element: FreeElement<S>,
    pub certificate: DualCertificate<S>,
    /// The `2^{d−1}`-term decomposition of `element`.
    pub upper: Decomposition<S>,
    pub certified_value: S,
    pub upper_value: S,
}

/// The witness on the unit cube `[0, 1]^d` based at the origin.
pub fn lower_bound_witness<S: Scalar>(d: usize, p: PExponent<S>) -> Result<(RetractionContext<S>, Witness<S>)> {
    let ctx = RetractionContext::new(CubeComplex::unit_cube(d, S::one())?, p)?;
    let witness = ctx.witness_in_cube(&vec![0; d])?;
    Ok((ctx, witness))
}

/// Exact norms of `m` and of its image under `v ↦ R v + R shift`, as
/// `(‖image‖, R ‖m‖)`. The host of `m` must carry coordinates.
pub fn rescale_check<S: Scalar>(m: &FreeElement<S>, scale: S, shift: &[i64], p: PExponent<S>) -> Result<(S, S)> {
    if !(scale > S::zero()) {
        return domain("scale must be positive");
    }
    let host = m.host();
    let coords = host.coords().ok_or_else(|| Error::Domain("rescaling needs a host built from points".into()))?;
    let moved: Vec<Vec<S>> = coords
        .iter()
        .map(|v| {
            if v.len() != shift.len() {
                return domain("shift has the wrong dimension");
            }
            Ok(v.iter().zip(shift).map(|(&c, &s)| scale * c + scale * S::of(s as f64)).collect())
        })
        .collect::<Result<_>>()?;
    let image_host = Arc::new(PointedFiniteMetric::l1_space(moved, host.base())?);
    let image = FreeElement::from_weights(image_host, m.iter())?;
    let (lhs, _) = exact_norm_small(&image, p)?;
    let (norm, _) = exact_norm_small(m, p)?;
    Ok((lhs, scale * norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{c_const, retraction_bounds};
    use crate::free::{evaluate, p_cost};

    fn half() -> PExponent<f64> {
        PExponent::new(0.5).unwrap()
    }

    fn ctx(d: usize, scale: f64, cubes: &[Lattice], p: PExponent<f64>) -> RetractionContext<f64> {
        RetractionContext::new(CubeComplex::new(d, scale, cubes.iter().cloned(), vec![0; d]).unwrap(), p).unwrap()
    }

    #[test]
    fn vertices_are_fixed() {
        let c = ctx(2, 0.5, &[vec![0, 0], vec![1, 0]], half());
        for (i, v) in c.vertices().iter().enumerate() {
            let r = c.retract(&c.complex().vertex_coords(v)).unwrap();
            if i == c.vertex_space().base() {
                assert!(r.is_zero());
            } else {
                assert_eq!(r.iter().collect::<Vec<_>>(), vec![(i, 1.0)]);
            }
        }
    }

    #[test]
    fn retract_examples() {
        let c = ctx(1, 1.0, &[vec![0]], half());
        let r = c.retract(&[0.3]).unwrap();
        assert_eq!(r.support(), vec![c.vertex_index(&[1]).unwrap()]);
        assert!((r.weight(1) - 0.3).abs() < 1e-15);

        let c = ctx(2, 1.0, &[vec![0, 0]], half());
        let w = c.retract_weights(&[0.5, 0.5]).unwrap();
        assert_eq!(w.len(), 4);
        assert!(w.iter().all(|e| e.weight == 0.25));
    }

    #[test]
    fn translation_examples() {
        let c = ctx(2, 1.0, &[vec![0, 0], vec![1, 0]], half());
        let x = [0.3, 0.6];
        let w = c.retract_weights(&x).unwrap();
        let same = c.translate_element(&w, &[0.0, 0.0]).unwrap();
        assert_eq!(same.max_residual(&c.retract(&x).unwrap()), 0.0);
        let moved = c.translate_element(&w, &[1.0, 0.0]).unwrap();
        assert!(moved.max_residual(&c.retract(&[1.3, 0.6]).unwrap()) < 1e-15);
        assert!(c.translate_element(&w, &[0.5, 0.0]).is_err());
        assert!(matches!(c.translate_element(&w, &[2.0, 0.0]), Err(Error::MissingVertex(_))));
    }

    #[test]
    fn rescaling() {
        let h = Arc::new(PointedFiniteMetric::l1_space(vec![vec![0.0f64], vec![1.0]], 0).unwrap());
        let m = FreeElement::delta(h, 1).unwrap();
        let (lhs, rhs) = rescale_check(&m, 1.0, &[0], half()).unwrap();
        assert_eq!(lhs, rhs);
        let (lhs, rhs) = rescale_check(&m, 2.0, &[0], half()).unwrap();
        assert!((lhs - 2.0).abs() < 1e-14 && (rhs - 2.0).abs() < 1e-14);
    }

    #[test]
    fn equal_points_give_empty_decomposition() {
        let c = ctx(2, 1.0, &[vec![0, 0]], half());
        assert!(c.lipschitz_upper_decomposition(&[0.2, 0.4], &[0.2, 0.4]).unwrap().is_empty());
    }

    #[test]
    fn single_coordinate_difference() {
        for d in 1..=3usize {
            let c = ctx(d, 1.0, &[vec![0; d]], half());
            let mut x = vec![0.3; d];
            let mut y = x.clone();
            x[d - 1] = 0.1;
            y[d - 1] = 0.8;
            let dec = c.lipschitz_upper_decomposition(&x, &y).unwrap();
            assert!(dec.len() <= 1 << (d - 1));
            let bound = c_const(half(), 1 << (d - 1)).unwrap() * 0.7;
            assert!(p_cost(&dec, half()) <= bound * (1.0 + 1e-12));
            let target = c.retract(&x).unwrap().try_sub(&c.retract(&y).unwrap()).unwrap();
            assert!(evaluate(&dec).unwrap().max_residual(&target) < 1e-12);
        }
    }

    #[test]
    fn cross_cube_pair() {
        let c = ctx(2, 1.0, &[vec![0, 0], vec![1, 1]], half());
        let (x, y) = ([0.2, 0.7], [1.6, 1.9]);
        let dec = c.lipschitz_upper_decomposition(&x, &y).unwrap();
        let target = c.retract(&x).unwrap().try_sub(&c.retract(&y).unwrap()).unwrap();
        assert!(evaluate(&dec).unwrap().max_residual(&target) < 1e-12);
        let dist = 1.4 + 1.2;
        let (_, upper) = retraction_bounds(half(), 2).unwrap();
        assert!((upper - 12.0).abs() < 1e-12);
        assert!(p_cost(&dec, half()) <= 12.0 * dist);
    }

    #[test]
    fn witness_values() {
        for (d, p, expected) in [(1, 0.5, 1.0), (2, 0.5, 2.0), (3, 0.5, 4.0), (2, 1.0, 1.0)] {
            let p = PExponent::new(p).unwrap();
            let (_, w) = lower_bound_witness::<f64>(d, p).unwrap();
            assert!((w.certified_value - expected).abs() < 1e-12, "d={d}: {}", w.certified_value);
            assert!((w.upper_value - expected).abs() < 1e-12);
            assert_eq!(w.upper.len(), 1 << (d - 1));
            let gap: f64 = w.x.iter().zip(&w.y).map(|(a, b)| (a - b).abs()).sum();
            assert_eq!(gap, 1.0);
        }
    }

    #[test]
    fn scaled_witness_scales() {
        let c = ctx(2, 0.25, &[vec![0, 0], vec![1, 0]], half());
        let w = c.witness_in_cube(&[1, 0]).unwrap();
        assert!((w.certified_value - 0.5).abs() < 1e-12);
        assert!((w.upper_value - 0.5).abs() < 1e-12);
    }
}
