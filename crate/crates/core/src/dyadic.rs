//! Exact dyadic coordinates, dyadic grids of the unit cube and the coordinate
//! helpers used by the basis decompositions.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{domain, Result};

/// Highest level any coordinate may carry; keeps numerators far from overflow.
pub const MAX_LEVEL: u32 = 60;

/// A dyadic rational `num / 2^level` in canonical form (`num` odd or `level == 0`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicScalar {
    num: i64,
    level: u32,
}

impl DyadicScalar {
    pub const ZERO: Self = Self { num: 0, level: 0 };
    pub const ONE: Self = Self { num: 1, level: 0 };

    pub fn new(mut num: i64, mut level: u32) -> Self {
        assert!(level <= MAX_LEVEL, "dyadic level {level} exceeds {MAX_LEVEL}");
        if num == 0 {
            return Self::ZERO;
        }
        while level > 0 && num % 2 == 0 {
            num /= 2;
            level -= 1;
        }
        Self { num, level }
    }

    /// Exact conversion; `None` unless `x` is a dyadic rational of level at
    /// most [`MAX_LEVEL`].
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let scaled = x * (1u64 << MAX_LEVEL) as f64;
        if scaled.fract() != 0.0 || scaled.abs() >= 9.0e18 {
            return None;
        }
        Some(Self::new(scaled as i64, MAX_LEVEL))
    }

    #[inline]
    pub fn numerator(self) -> i64 {
        self.num
    }

    /// The unique `n` with `x` in `2^-n Z \ 2^-(n-1) Z`; zero for integers.
    #[inline]
    pub fn level(self) -> u32 {
        self.level
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.level) as f64
    }

    /// Numerator at a finer level `k >= self.level()`.
    pub fn numerator_at(self, k: u32) -> i64 {
        assert!(k >= self.level, "level {k} is coarser than {}", self.level);
        self.num << (k - self.level)
    }

    pub fn in_unit_interval(self) -> bool {
        self.num >= 0 && self.num <= (1i64 << self.level)
    }

    /// `2^-k`.
    pub fn mesh(k: u32) -> Self {
        Self::new(1, k)
    }

    /// Coarser neighbours `(x - 2^-n, x + 2^-n)` of a scalar at level `n >= 1`.
    pub fn neighbors(self) -> Result<(Self, Self)> {
        if self.level == 0 {
            return domain(format!("{self} has level 0 and no canonical neighbours"));
        }
        Ok((
            Self::new(self.num - 1, self.level),
            Self::new(self.num + 1, self.level),
        ))
    }

    pub fn abs(self) -> Self {
        Self { num: self.num.abs(), ..self }
    }

    fn aligned(self, other: Self) -> (i64, i64, u32) {
        let k = self.level.max(other.level);
        (self.numerator_at(k), other.numerator_at(k), k)
    }
}

impl std::ops::Add for DyadicScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b, k) = self.aligned(rhs);
        Self::new(a + b, k)
    }
}

impl std::ops::Sub for DyadicScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b, k) = self.aligned(rhs);
        Self::new(a - b, k)
    }
}

impl std::ops::Neg for DyadicScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self { num: -self.num, ..self }
    }
}

impl Ord for DyadicScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for DyadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for DyadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u64 << self.level)
        }
    }
}

/// Least level of a scalar.
pub fn coordinate_level(x: DyadicScalar) -> u32 {
    x.level()
}

/// A point of `2^-k Z^d` stored as integer numerators over a common level,
/// with the level as small as possible.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    nums: Vec<i64>,
    level: u32,
}

impl DyadicPoint {
    pub fn new(mut nums: Vec<i64>, mut level: u32) -> Self {
        assert!(level <= MAX_LEVEL, "dyadic level {level} exceeds {MAX_LEVEL}");
        while level > 0 && nums.iter().all(|n| n % 2 == 0) {
            nums.iter_mut().for_each(|n| *n /= 2);
            level -= 1;
        }
        Self { nums, level }
    }

    pub fn origin(d: usize) -> Self {
        Self { nums: vec![0; d], level: 0 }
    }

    pub fn from_scalars(coords: &[DyadicScalar]) -> Self {
        let level = coords.iter().map(|c| c.level()).max().unwrap_or(0);
        Self::new(coords.iter().map(|c| c.numerator_at(level)).collect(), level)
    }

    pub fn from_f64(coords: &[f64]) -> Option<Self> {
        let scalars = coords
            .iter()
            .map(|&x| DyadicScalar::from_f64(x))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::from_scalars(&scalars))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.nums.len()
    }

    /// Least `k` with the point in `2^-k Z^d`.
    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn numerators(&self) -> &[i64] {
        &self.nums
    }

    pub fn coord(&self, i: usize) -> DyadicScalar {
        DyadicScalar::new(self.nums[i], self.level)
    }

    pub fn coords(&self) -> Vec<DyadicScalar> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let scale = (1u64 << self.level) as f64;
        self.nums.iter().map(|&n| n as f64 / scale).collect()
    }

    pub fn is_origin(&self) -> bool {
        self.nums.iter().all(|&n| n == 0)
    }

    pub fn in_unit_cube(&self) -> bool {
        let top = 1i64 << self.level;
        self.nums.iter().all(|&n| (0..=top).contains(&n))
    }

    /// Whether every coordinate is 0 or 1.
    pub fn is_corner(&self) -> bool {
        self.level == 0 && self.nums.iter().all(|&n| n == 0 || n == 1)
    }

    /// `x^j_eps`: the point with coordinate `axis` moved by `eps`.
    pub fn shifted(&self, axis: usize, eps: DyadicScalar) -> Self {
        self.with_coord(axis, self.coord(axis) + eps)
    }

    pub fn with_coord(&self, axis: usize, value: DyadicScalar) -> Self {
        let mut coords = self.coords();
        coords[axis] = value;
        Self::from_scalars(&coords)
    }

    /// `pi_j`: the coordinates with `axis` removed.
    pub fn project(&self, axis: usize) -> Vec<DyadicScalar> {
        let mut coords = self.coords();
        coords.remove(axis);
        coords
    }

    /// l1 distance, exactly.
    pub fn l1_dist(&self, other: &Self) -> DyadicScalar {
        let k = self.level.max(other.level);
        let total: i64 = self
            .nums
            .iter()
            .zip(&other.nums)
            .map(|(&a, &b)| ((a << (k - self.level)) - (b << (k - other.level))).abs())
            .sum();
        DyadicScalar::new(total, k)
    }

    /// Number of coordinates that do not lie on the grid `2^-n Z`.
    pub fn count_finer_than(&self, n: u32) -> usize {
        (0..self.dim()).filter(|&i| self.coord(i).level() > n).count()
    }
}

impl Ord for DyadicPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim().cmp(&other.dim()).then_with(|| {
            for i in 0..self.dim() {
                match self.coord(i).cmp(&other.coord(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for DyadicPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.coord(i))?;
        }
        write!(f, ")")
    }
}

/// Least level of a point.
pub fn level_of(v: &DyadicPoint) -> u32 {
    v.level()
}

/// `V_k = [0,1]^d ∩ 2^-k Z^d`, with `V_{-1} = {0}`. Points come out in
/// lexicographic numerator order.
pub fn dyadic_grid(d: usize, k: i32) -> Vec<DyadicPoint> {
    assert!(d >= 1, "dimension must be positive");
    assert!(k >= -1, "grid level must be at least -1");
    if k < 0 {
        return vec![DyadicPoint::origin(d)];
    }
    let k = k as u32;
    let side = (1i64 << k) + 1;
    let total = (side as usize).pow(d as u32);
    let mut out = Vec::with_capacity(total);
    let mut nums = vec![0i64; d];
    for _ in 0..total {
        out.push(DyadicPoint::new(nums.clone(), k));
        for slot in (0..d).rev() {
            nums[slot] += 1;
            if nums[slot] < side {
                break;
            }
            nums[slot] = 0;
        }
    }
    out
}

/// Coarser neighbours of a scalar; see [`DyadicScalar::neighbors`].
pub fn neighbors(x: DyadicScalar) -> Result<(DyadicScalar, DyadicScalar)> {
    x.neighbors()
}

/// A coordinate line `t -> (x_1, .., t, .., x_{d-1})` through the cube, the
/// `axis` slot receiving the free parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateFrame {
    axis: usize,
    fixed: Vec<DyadicScalar>,
}

impl CoordinateFrame {
    pub fn new(axis: usize, fixed: Vec<DyadicScalar>) -> Result<Self> {
        if axis > fixed.len() {
            return domain(format!("axis {axis} out of range for dimension {}", fixed.len() + 1));
        }
        if fixed.iter().any(|c| !c.in_unit_interval()) {
            return domain("fixed coordinates must lie in [0, 1]");
        }
        Ok(Self { axis, fixed })
    }

    /// The line through `v` along `axis`.
    pub fn through(v: &DyadicPoint, axis: usize) -> Self {
        Self {
            axis,
            fixed: v.project(axis),
        }
    }

    pub fn dim(&self) -> usize {
        self.fixed.len() + 1
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn point(&self, t: DyadicScalar) -> DyadicPoint {
        let mut coords = self.fixed.clone();
        coords.insert(self.axis, t);
        DyadicPoint::from_scalars(&coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(num: i64, level: u32) -> DyadicScalar {
        DyadicScalar::new(num, level)
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(ds(4, 3), ds(1, 1));
        assert_eq!(ds(0, 7), DyadicScalar::ZERO);
        assert_eq!(ds(3, 3).level(), 3);
        assert_eq!(coordinate_level(ds(3, 3)), 3);
        assert_eq!(coordinate_level(ds(5, 0)), 0);
        assert_eq!(DyadicScalar::from_f64(0.375), Some(ds(3, 3)));
        assert_eq!(DyadicScalar::from_f64(1e-30), None);
        assert_eq!(DyadicScalar::from_f64(f64::NAN), None);
        let v = DyadicPoint::from_scalars(&[ds(1, 1), ds(1, 2)]);
        assert_eq!(level_of(&v), 2);
        assert_eq!(v.numerators(), &[2, 1]);
    }

    #[test]
    fn neighbour_pairs() {
        assert_eq!(neighbors(ds(1, 1)).unwrap(), (ds(0, 0), ds(1, 0)));
        assert_eq!(neighbors(ds(3, 3)).unwrap(), (ds(1, 2), ds(1, 1)));
        assert!(neighbors(ds(1, 0)).is_err());
    }

    #[test]
    fn neighbours_exhaustive() {
        for n in 1..=6u32 {
            for num in (1..(1i64 << n)).step_by(2) {
                let x = ds(num, n);
                let (lo, hi) = x.neighbors().unwrap();
                assert!(lo < x && x < hi);
                assert!(lo.in_unit_interval() && hi.in_unit_interval());
                assert!(lo.level() < n && hi.level() < n);
                assert_eq!(x - lo, DyadicScalar::mesh(n));
                assert_eq!(hi - x, DyadicScalar::mesh(n));
            }
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(dyadic_grid(1, 0), vec![DyadicPoint::origin(1), DyadicPoint::new(vec![1], 0)]);
        assert_eq!(dyadic_grid(2, 1).len(), 9);
        assert_eq!(dyadic_grid(3, 2).len(), 125);
        assert_eq!(dyadic_grid(3, -1), vec![DyadicPoint::origin(3)]);
        for d in 1..=3 {
            for k in 0..3 {
                let coarse = dyadic_grid(d, k);
                let fine = dyadic_grid(d, k + 1);
                assert!(coarse.iter().all(|p| fine.contains(p)));
                let expected = (2usize.pow(k as u32 + 1) + 1).pow(d as u32) - (2usize.pow(k as u32) + 1).pow(d as u32);
                assert_eq!(fine.len() - coarse.len(), expected);
            }
        }
    }

    #[test]
    fn grid_levels_exhaustive() {
        for v in dyadic_grid(2, 3) {
            let lvl = level_of(&v);
            assert!(lvl <= 3);
            let odd_at_three = (0..2).any(|i| v.coord(i).numerator_at(3) % 2 != 0);
            assert_eq!(lvl == 3, odd_at_three);
            assert!(v.in_unit_cube());
        }
    }

    #[test]
    fn coordinate_helpers() {
        let v = DyadicPoint::from_scalars(&[ds(1, 1), ds(1, 2), ds(1, 0)]);
        assert_eq!(v.project(1), vec![ds(1, 1), ds(1, 0)]);
        assert_eq!(v.shifted(1, ds(1, 2)).coord(1), ds(1, 1));
        let frame = CoordinateFrame::through(&v, 1);
        assert_eq!(frame.point(ds(1, 2)), v);
        assert_eq!(frame.point(DyadicScalar::ZERO).coord(1), DyadicScalar::ZERO);
        // u^0 / u^1 suffix extension is insertion into the last slot
        let base = CoordinateFrame::new(2, vec![ds(1, 0), ds(0, 0)]).unwrap();
        assert_eq!(base.point(DyadicScalar::ONE), DyadicPoint::new(vec![1, 0, 1], 0));
        assert_eq!(v.l1_dist(&DyadicPoint::origin(3)), ds(7, 2));
        assert_eq!(v.count_finer_than(1), 1);
        assert!(CoordinateFrame::new(3, vec![ds(0, 0)]).is_err());
    }

    #[test]
    fn ordering_is_by_value() {
        assert!(ds(1, 2) < ds(1, 1));
        let a = DyadicPoint::from_scalars(&[ds(1, 2), ds(1, 0)]);
        let b = DyadicPoint::from_scalars(&[ds(1, 1), ds(0, 0)]);
        assert!(a < b);
    }
}
