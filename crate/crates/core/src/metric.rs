//! Finite pointed metric spaces.

use std::path::Path;

use crate::constants::HolderExponent;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite metric space with a distinguished base point, stored as a dense
/// distance matrix. Coordinates are kept when the space was built from points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointedFiniteMetric<S> {
    len: usize,
    base: usize,
    dist: Vec<S>,
    coords: Option<Vec<Vec<S>>>,
}

impl<S: Scalar> PointedFiniteMetric<S> {
    /// Builds a space from a row-major distance matrix and validates every
    /// metric axiom, including the triangle inequality on all triples.
    pub fn from_matrix(dist: Vec<Vec<S>>, base: usize) -> Result<Self> {
        let len = dist.len();
        if len == 0 {
            return Err(Error::InvalidMetric("empty point set".into()));
        }
        if dist.iter().any(|row| row.len() != len) {
            return Err(Error::InvalidMetric("distance matrix is not square".into()));
        }
        let space = Self {
            len,
            base,
            dist: dist.into_iter().flatten().collect(),
            coords: None,
        };
        space.validate()?;
        Ok(space)
    }

    /// `points[i]` with the l1 distance.
    pub fn l1_space(points: Vec<Vec<S>>, base: usize) -> Result<Self> {
        let len = points.len();
        if len == 0 {
            return Err(Error::InvalidMetric("empty point set".into()));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidMetric("points have mixed dimensions".into()));
        }
        if base >= len {
            return Err(Error::InvalidMetric(format!("base index {base} out of range")));
        }
        let mut dist = vec![S::zero(); len * len];
        for i in 0..len {
            for j in (i + 1)..len {
                let d: S = points[i].iter().zip(&points[j]).map(|(a, b)| (*a - *b).abs()).sum();
                if d == S::zero() {
                    return Err(Error::DuplicatePoint(i, j));
                }
                dist[i * len + j] = d;
                dist[j * len + i] = d;
            }
        }
        Ok(Self {
            len,
            base,
            dist,
            coords: Some(points),
        })
    }

    /// Snowflakes the metric: every distance is raised to `alpha`.
    pub fn holder_distort(&self, alpha: HolderExponent<S>) -> Self {
        self.power(alpha.get())
    }

    /// Raises every distance to `exponent`. Exponents in `(0, 1]` keep the
    /// result a metric.
    pub(crate) fn power(&self, exponent: S) -> Self {
        Self {
            len: self.len,
            base: self.base,
            dist: self.dist.iter().map(|d| d.powf(exponent)).collect(),
            coords: self.coords.clone(),
        }
    }

    /// Same points with a different base point.
    pub fn rebased(&self, base: usize) -> Result<Self> {
        if base >= self.len {
            return Err(Error::InvalidMetric(format!("base index {base} out of range")));
        }
        Ok(Self { base, ..self.clone() })
    }

    /// Multiplies every distance by `factor > 0`.
    pub fn scaled(&self, factor: S) -> Self {
        Self {
            dist: self.dist.iter().map(|&d| d * factor).collect(),
            coords: self
                .coords
                .as_ref()
                .map(|c| c.iter().map(|p| p.iter().map(|&x| x * factor).collect()).collect()),
            ..self.clone()
        }
    }

    /// Checks symmetry, positivity and every triangle inequality, with a
    /// relative slack of `1e-12` (scaled for lower precision scalars).
    pub fn validate(&self) -> Result<()> {
        let n = self.len;
        if self.base >= n {
            return Err(Error::InvalidMetric(format!("base index {} out of range", self.base)));
        }
        let slack = S::epsilon().max(S::of(1e-12)) * S::of(4.0);
        for i in 0..n {
            if self.dist(i, i) != S::zero() {
                return Err(Error::InvalidMetric(format!("dist({i},{i}) is not zero")));
            }
            for j in 0..n {
                let dij = self.dist(i, j);
                if !dij.is_finite() {
                    return Err(Error::InvalidMetric(format!("dist({i},{j}) is not finite")));
                }
                if dij != self.dist(j, i) {
                    return Err(Error::InvalidMetric(format!("dist({i},{j}) is not symmetric")));
                }
                if i != j && dij <= S::zero() {
                    return Err(Error::InvalidMetric(format!("dist({i},{j}) is not positive")));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let dij = self.dist(i, j);
                for k in 0..n {
                    let via = self.dist(i, k) + self.dist(k, j);
                    if dij > via * (S::one() + slack) {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn base(&self) -> usize {
        self.base
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> S {
        self.dist[i * self.len + j]
    }

    pub fn coords(&self) -> Option<&[Vec<S>]> {
        self.coords.as_deref()
    }

    /// Index of the point with exactly these coordinates, if any.
    pub fn index_of(&self, point: &[S]) -> Option<usize> {
        self.coords.as_ref()?.iter().position(|p| p.as_slice() == point)
    }

    /// Smallest distance between two distinct points (infinite for one point).
    pub fn separation(&self) -> S {
        let mut best = S::infinity();
        for i in 0..self.len {
            for j in (i + 1)..self.len {
                best = best.min(self.dist(i, j));
            }
        }
        best
    }
}

/// Parses a point file: the first line holds the dimension and the base
/// index, every further non-empty line one point as whitespace-separated
/// coordinates. `#` starts a comment.
pub fn parse_points<S: Scalar>(text: &str) -> Result<(usize, Vec<Vec<S>>)> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header line \"d base\"".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse {
            line: hline,
            msg: "header must be \"d base\"".into(),
        });
    }
    let d: usize = parse_field(fields[0], hline)?;
    let base: usize = parse_field(fields[1], hline)?;
    let mut points = Vec::new();
    for (line, content) in lines {
        let coords = content
            .split_whitespace()
            .map(|f| parse_real::<S>(f, line))
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != d {
            return Err(Error::Parse {
                line,
                msg: format!("expected {d} coordinates, found {}", coords.len()),
            });
        }
        points.push(coords);
    }
    if base >= points.len() {
        return Err(Error::Parse {
            line: hline,
            msg: format!("base index {base} out of range for {} points", points.len()),
        });
    }
    Ok((base, points))
}

/// Reads a point file and builds the l1 space over it.
pub fn load_l1_space<S: Scalar>(path: impl AsRef<Path>) -> Result<PointedFiniteMetric<S>> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{}: {e}", path.as_ref().display()),
    })?;
    let (base, points) = parse_points(&text)?;
    PointedFiniteMetric::l1_space(points, base)
}

pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub(crate) fn parse_field<T: std::str::FromStr>(field: &str, line: usize) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {field:?}"),
    })
}

/// Accepts decimal reals and fractions such as `3/8`.
pub(crate) fn parse_real<S: Scalar>(field: &str, line: usize) -> Result<S> {
    let value = match field.split_once('/') {
        Some((num, den)) => {
            let num: f64 = parse_field(num, line)?;
            let den: f64 = parse_field(den, line)?;
            num / den
        }
        None => parse_field::<f64>(field, line)?,
    };
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("{field:?} is not a finite number"),
        });
    }
    Ok(S::of(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn l1_distances() {
        let s = PointedFiniteMetric::l1_space(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]], 0)
            .unwrap();
        assert_eq!(s.dist(0, 2), 2.0);
        assert_eq!(s.dist(1, 2), 1.0);
        assert!(matches!(
            PointedFiniteMetric::l1_space(vec![vec![0.5], vec![0.5]], 0),
            Err(Error::DuplicatePoint(0, 1))
        ));
    }

    #[test]
    fn unit_square_distances() {
        let square = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let s = PointedFiniteMetric::l1_space(square, 0).unwrap();
        let mut seen = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                seen.push(s.dist(i, j));
            }
        }
        assert_eq!(seen.len(), 6);
        assert!(seen.iter().all(|&d| d == 1.0 || d == 2.0));
        assert_eq!(seen.iter().filter(|&&d| d == 2.0).count(), 2);
    }

    #[test]
    fn holder_distortion() {
        let s = PointedFiniteMetric::l1_space(vec![vec![0.0], vec![4.0]], 0).unwrap();
        let h = s.holder_distort(HolderExponent::new(0.5).unwrap());
        assert_eq!(h.dist(0, 1), 2.0);
        assert_eq!(s.power(1.0), s);
    }

    #[test]
    fn rejects_broken_matrices() {
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(matches!(
            PointedFiniteMetric::from_matrix(bad, 0),
            Err(Error::InvalidMetric(_))
        ));
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(PointedFiniteMetric::from_matrix(asym, 0).is_err());
        let ok = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(PointedFiniteMetric::from_matrix(ok.clone(), 2).is_err());
        assert!(PointedFiniteMetric::from_matrix(ok, 1).is_ok());
    }

    #[test]
    fn parses_point_files() {
        let text = "# square\n2 0\n0 0\n1 0\n0 1/2\n";
        let (base, pts) = parse_points::<f64>(text).unwrap();
        assert_eq!(base, 0);
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.5]]);
        assert!(matches!(parse_points::<f64>("2 0\n0 0 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_points::<f64>("2 5\n0 0\n").is_err());
        assert!(parse_points::<f64>("").is_err());
    }

    proptest! {
        #[test]
        fn snowflake_keeps_triangle_inequality(
            pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..7),
            alpha in 0.05f64..0.95,
        ) {
            if let Ok(s) = PointedFiniteMetric::l1_space(pts, 0) {
                let h = s.holder_distort(HolderExponent::new(alpha).unwrap());
                prop_assert!(h.validate().is_ok());
                // brute force over all ordered triples
                for i in 0..h.len() {
                    for j in 0..h.len() {
                        for k in 0..h.len() {
                            prop_assert!(h.dist(i, j) <= (h.dist(i, k) + h.dist(k, j)) * (1.0 + 1e-12));
                        }
                    }
                }
            }
        }
    }
}
