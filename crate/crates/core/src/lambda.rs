//! Multilinear vertex weights on unions of lattice cubes.
//!
//! A cube complex is a nonempty set of cubes `R w + R [0,1]^d`, `w ∈ Z^d`.
//! Inside a cube every point is the product-weighted combination of the
//! cube's `2^d` vertices; the weights agree on shared faces, so they define a
//! global partition of unity over the vertex set.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::metric::{content_lines, parse_field, parse_real};
use crate::scalar::Scalar;

/// Integer lattice index; the vertex it names sits at `R * index`.
pub type Lattice = Vec<i64>;

/// One-dimensional coefficient `x^(w)`: `x` for `w = 1`, `1 - x` for `w = 0`
/// and zero otherwise.
#[inline]
pub fn scalar_coeff<S: Scalar>(x: S, w: i64) -> S {
    match w {
        1 => x,
        0 => S::one() - x,
        _ => S::zero(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexWeight<S> {
    pub vertex: Lattice,
    pub weight: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubeComplex<S> {
    d: usize,
    scale: S,
    offsets: BTreeSet<Lattice>,
    base_vertex: Lattice,
}

impl<S: Scalar> CubeComplex<S> {
    pub fn new(d: usize, scale: S, offsets: impl IntoIterator<Item = Lattice>, base_vertex: Lattice) -> Result<Self> {
        if d == 0 {
            return domain("dimension must be positive");
        }
        if !(scale > S::zero() && scale.is_finite()) {
            return domain(format!("cube side must be positive, got {scale}"));
        }
        let offsets: BTreeSet<Lattice> = offsets.into_iter().collect();
        if offsets.is_empty() {
            return domain("a complex needs at least one cube");
        }
        if let Some(w) = offsets.iter().find(|w| w.len() != d) {
            return domain(format!("cube offset {w:?} does not have dimension {d}"));
        }
        if base_vertex.len() != d {
            return domain("base vertex has the wrong dimension");
        }
        let complex = Self { d, scale, offsets, base_vertex };
        if !complex.is_vertex(&complex.base_vertex) {
            return domain(format!("base vertex {:?} is not a vertex of the complex", complex.base_vertex));
        }
        Ok(complex)
    }

    /// `[0, R]^d` based at the origin.
    pub fn unit_cube(d: usize, scale: S) -> Result<Self> {
        Self::new(d, scale, [vec![0; d]], vec![0; d])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn scale(&self) -> S {
        self.scale
    }

    pub fn offsets(&self) -> impl Iterator<Item = &Lattice> {
        self.offsets.iter()
    }

    pub fn contains_cube(&self, w: &[i64]) -> bool {
        self.offsets.contains(w)
    }

    pub fn base_vertex(&self) -> &Lattice {
        &self.base_vertex
    }

    /// The vertices `w + {0,1}^d` of one cube, in binary counting order
    /// (first coordinate least significant).
    pub fn cube_vertices(w: &[i64]) -> Vec<Lattice> {
        let d = w.len();
        (0..1usize << d)
            .map(|bits| (0..d).map(|i| w[i] + ((bits >> i) & 1) as i64).collect())
            .collect()
    }

    /// All vertices of the complex in lexicographic order.
    pub fn vertices(&self) -> Vec<Lattice> {
        let set: BTreeSet<Lattice> = self.offsets.iter().flat_map(|w| Self::cube_vertices(w)).collect();
        set.into_iter().collect()
    }

    pub fn is_vertex(&self, v: &[i64]) -> bool {
        // v is a vertex iff some cube v - b, b ∈ {0,1}^d, is present
        (0..1usize << self.d).any(|bits| {
            let w: Lattice = (0..self.d).map(|i| v[i] - ((bits >> i) & 1) as i64).collect();
            self.offsets.contains(&w)
        })
    }

    pub fn vertex_coords(&self, v: &[i64]) -> Vec<S> {
        v.iter().map(|&c| S::of(c as f64) * self.scale).collect()
    }

    /// `x / R`, with coordinates within rounding of an integer snapped to it.
    pub(crate) fn lattice_coords(&self, x: &[S]) -> Vec<S> {
        let tol = S::epsilon() * S::of(1024.0);
        x.iter()
            .map(|&xi| {
                let t = xi / self.scale;
                let r = t.round();
                if (t - r).abs() <= tol * t.abs().max(S::one()) {
                    r
                } else {
                    t
                }
            })
            .collect()
    }

    /// Every cube of the complex containing `x`, paired with the local
    /// coordinates of `x` in it. The plain floor cube comes first.
    pub fn containing_cubes(&self, x: &[S]) -> Result<Vec<(Lattice, Vec<S>)>> {
        if x.len() != self.d {
            return domain(format!("point has dimension {}, complex has {}", x.len(), self.d));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::OutsideComplex(x.iter().map(|c| c.as_f64()).collect()));
        }
        let t = self.lattice_coords(x);
        let floor: Vec<i64> = t.iter().map(|c| c.floor().to_i64().unwrap_or(i64::MAX)).collect();
        // integer coordinates sit on the boundary of two neighbouring cubes
        let boundary: Vec<usize> = (0..self.d).filter(|&i| t[i].fract() == S::zero()).collect();
        let mut found = Vec::new();
        for mask in 0..1usize << boundary.len() {
            let mut w = floor.clone();
            for (bit, &i) in boundary.iter().enumerate() {
                if (mask >> bit) & 1 == 1 {
                    w[i] -= 1;
                }
            }
            if self.offsets.contains(&w) {
                let local = (0..self.d).map(|i| t[i] - S::of(w[i] as f64)).collect();
                found.push((w, local));
            }
        }
        if found.is_empty() {
            return Err(Error::OutsideComplex(x.iter().map(|c| c.as_f64()).collect()));
        }
        Ok(found)
    }

    /// The cube used to evaluate weights at `x`.
    pub fn containing_cube(&self, x: &[S]) -> Result<(Lattice, Vec<S>)> {
        Ok(self.containing_cubes(x)?.swap_remove(0))
    }

    /// `Λ(v, x)` for a lattice vertex `v` and a point `x` of the complex.
    pub fn lambda(&self, v: &[i64], x: &[S]) -> Result<S> {
        let (w, local) = self.containing_cube(x)?;
        if v.len() != self.d {
            return domain("vertex has the wrong dimension");
        }
        Ok(weight_in_cube(&w, &local, v))
    }

    /// Vertices carrying nonzero weight at `x`, at most `2^d` of them, in
    /// binary counting order over the containing cube. Tiny weights are kept.
    pub fn lambda_support(&self, x: &[S]) -> Result<Vec<VertexWeight<S>>> {
        let (w, local) = self.containing_cube(x)?;
        Ok(support_in_cube(&w, &local))
    }

    /// Same as [`lambda_support`](Self::lambda_support) but through an
    /// explicitly chosen containing cube.
    pub fn lambda_support_via(&self, cube: &[i64], x: &[S]) -> Result<Vec<VertexWeight<S>>> {
        let (w, local) = self
            .containing_cubes(x)?
            .into_iter()
            .find(|(w, _)| w.as_slice() == cube)
            .ok_or_else(|| Error::OutsideComplex(x.iter().map(|c| c.as_f64()).collect()))?;
        Ok(support_in_cube(&w, &local))
    }
}

pub(crate) fn weight_in_cube<S: Scalar>(w: &[i64], local: &[S], v: &[i64]) -> S {
    local
        .iter()
        .zip(v.iter().zip(w))
        .fold(S::one(), |acc, (&t, (&vi, &wi))| acc * scalar_coeff(t, vi - wi))
}

pub(crate) fn support_in_cube<S: Scalar>(w: &[i64], local: &[S]) -> Vec<VertexWeight<S>> {
    CubeComplex::<S>::cube_vertices(w)
        .into_iter()
        .filter_map(|vertex| {
            let weight = weight_in_cube(w, local, &vertex);
            (weight != S::zero()).then_some(VertexWeight { vertex, weight })
        })
        .collect()
}

/// Parses a complex description: `d R` on the first line, then one integer
/// cube offset per line, and the base vertex on the last line.
pub fn parse_complex<S: Scalar>(text: &str) -> Result<CubeComplex<S>> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    let Some(&(hline, header)) = lines.first() else {
        return Err(Error::Parse { line: 1, msg: "missing header line \"d R\"".into() });
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse { line: hline, msg: "header must be \"d R\"".into() });
    }
    let d: usize = parse_field(fields[0], hline)?;
    let scale: S = parse_real(fields[1], hline)?;
    if lines.len() < 3 {
        return Err(Error::Parse {
            line: hline,
            msg: "need at least one cube offset and a base vertex line".into(),
        });
    }
    let parse_vec = |(line, content): (usize, &str)| -> Result<Lattice> {
        let v = content
            .split_whitespace()
            .map(|f| parse_field::<i64>(f, line))
            .collect::<Result<Lattice>>()?;
        if v.len() != d {
            return Err(Error::Parse { line, msg: format!("expected {d} integers, found {}", v.len()) });
        }
        Ok(v)
    };
    let offsets = lines[1..lines.len() - 1].iter().map(|&l| parse_vec(l)).collect::<Result<Vec<_>>>()?;
    let base = parse_vec(lines[lines.len() - 1])?;
    CubeComplex::new(d, scale, offsets, base).map_err(|e| Error::Parse { line: hline, msg: e.to_string() })
}

pub fn load_complex<S: Scalar>(path: impl AsRef<Path>) -> Result<CubeComplex<S>> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{}: {e}", path.as_ref().display()),
    })?;
    parse_complex(&text)
}
