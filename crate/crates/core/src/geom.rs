//! Exact integer planar geometry.
//!
//! Every predicate here is decided with integer arithmetic only. Products go
//! through `i128` so coordinates up to 2^40 never overflow.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::Error;

/// A planar integer vector. Doubles as a grid cell, an offset and a period.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const ZERO: Point = Point { x: 0, y: 0 };

    #[inline]
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Squared Euclidean norm.
    #[inline]
    pub fn norm2(self) -> i128 {
        dot(self, self)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<i64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: i64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// `u.x * v.y - u.y * v.x`.
#[inline]
pub fn cross(u: Point, v: Point) -> i128 {
    u.x as i128 * v.y as i128 - u.y as i128 * v.x as i128
}

#[inline]
pub fn dot(u: Point, v: Point) -> i128 {
    u.x as i128 * v.x as i128 + u.y as i128 * v.y as i128
}

/// Orders `a * sqrt(3)` against `b`.
pub fn sqrt3_cmp(a: i64, b: i64) -> Ordering {
    let (a, b) = (a as i128, b as i128);
    match (a.signum(), b.signum()) {
        (0, _) => 0.cmp(&b),
        (1, s) if s <= 0 => Ordering::Greater,
        (-1, s) if s >= 0 => Ordering::Less,
        // Same strict sign: compare squares, flipping for negatives.
        (1, _) => (3 * a * a).cmp(&(b * b)),
        _ => (b * b).cmp(&(3 * a * a)),
    }
}

/// Orders `sqrt(3) * a + c` against `sqrt(3) * b + d`.
#[inline]
pub fn sqrt3_affine_cmp(a: i64, c: i64, b: i64, d: i64) -> Ordering {
    // sqrt3*(a-b) vs d-c
    sqrt3_cmp(a - b, d - c)
}

/// The quadrants and the 30-degree cones used to orient period vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cone {
    /// `(0, inf) x [0, inf)`
    Q1,
    /// `(-inf, 0] x (0, inf)`
    Q2,
    /// `(-inf, 0) x (-inf, 0]`
    Q3,
    /// `[0, inf) x (-inf, 0)`
    Q4,
    /// `y >= -x/sqrt3` and `y >= -x*sqrt3`, origin excluded.
    Q1Plus,
    /// `y > -x/sqrt3` and `y < -x*sqrt3`.
    Q2Minus,
    /// Negation of `Q1Plus`.
    Q3Plus,
    /// Negation of `Q2Minus`.
    Q4Minus,
}

/// Index 1..=4 of the quadrant holding `w`. `w` must be non-zero.
pub fn quadrant(w: Point) -> Result<u8, Error> {
    let q = if w.x > 0 && w.y >= 0 {
        1
    } else if w.x <= 0 && w.y > 0 {
        2
    } else if w.x < 0 && w.y <= 0 {
        3
    } else if w.x >= 0 && w.y < 0 {
        4
    } else {
        return Err(Error::ZeroVector);
    };
    Ok(q)
}

/// Membership in `Q1Plus`: `sqrt3*y >= -x` and `y >= -sqrt3*x`.
pub fn in_q1_plus(w: Point) -> bool {
    if w == Point::ZERO {
        return false;
    }
    // sqrt3*y >= -x  and  sqrt3*x >= -y
    sqrt3_cmp(w.y, -w.x) != Ordering::Less && sqrt3_cmp(w.x, -w.y) != Ordering::Less
}

/// Membership in `Q2Minus`: `sqrt3*y > -x` and `y < -sqrt3*x`.
pub fn in_q2_minus(w: Point) -> bool {
    sqrt3_cmp(w.y, -w.x) == Ordering::Greater && sqrt3_cmp(-w.x, w.y) == Ordering::Greater
}

/// Whether `w` lies in the given cone.
pub fn in_cone(w: Point, cone: Cone) -> bool {
    match cone {
        Cone::Q1 => w.x > 0 && w.y >= 0,
        Cone::Q2 => w.x <= 0 && w.y > 0,
        Cone::Q3 => w.x < 0 && w.y <= 0,
        Cone::Q4 => w.x >= 0 && w.y < 0,
        Cone::Q1Plus => in_q1_plus(w),
        Cone::Q2Minus => in_q2_minus(w),
        Cone::Q3Plus => in_q1_plus(-w),
        Cone::Q4Minus => in_q2_minus(-w),
    }
}

pub const ALL_CONES: [Cone; 8] = [
    Cone::Q1,
    Cone::Q2,
    Cone::Q3,
    Cone::Q4,
    Cone::Q1Plus,
    Cone::Q2Minus,
    Cone::Q3Plus,
    Cone::Q4Minus,
];

/// All cones containing `w`, in declaration order.
pub fn classify_cone(w: Point) -> Result<alloc::vec::Vec<Cone>, Error> {
    if w == Point::ZERO {
        return Err(Error::ZeroVector);
    }
    Ok(ALL_CONES.iter().copied().filter(|&c| in_cone(w, c)).collect())
}

/// Rotates by 90 degrees counterclockwise, mapping `Q_i` onto `Q_{i+1}`.
#[inline]
pub fn rot90(w: Point) -> Point {
    Point::new(-w.y, w.x)
}

/// Rotates by 90 degrees clockwise, inverse of [`rot90`].
#[inline]
pub fn rot270(w: Point) -> Point {
    Point::new(w.y, -w.x)
}

/// Largest integer `r` with `r * r <= v`.
pub fn isqrt(v: i128) -> i128 {
    if v <= 0 {
        return 0;
    }
    // Newton from above; the initial guess is a power of two >= sqrt(v).
    let bits = 128 - v.leading_zeros();
    let mut r: i128 = 1 << bits.div_ceil(2);
    loop {
        let next = (r + v / r) / 2;
        if next >= r {
            return r;
        }
        r = next;
    }
}

/// Smallest integer `r` with `r * r >= v`.
pub fn isqrt_ceil(v: i128) -> i128 {
    let r = isqrt(v);
    if r * r == v {
        r
    } else {
        r + 1
    }
}

/// Floor division for signed integers.
#[inline]
pub fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

/// Ceiling division for signed integers.
#[inline]
pub fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}
