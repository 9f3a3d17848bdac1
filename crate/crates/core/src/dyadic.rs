//! Dyadic rationals and the standard dyadic grid of half-open intervals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{parse_q, pow2, Q};

/// Exact value `num / 2^exp`, kept canonical (`num` odd, or zero with `exp = 0`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    num: i128,
    exp: i32,
}

impl DyadicRational {
    pub const ZERO: DyadicRational = DyadicRational { num: 0, exp: 0 };

    pub fn new(num: i128, exp: i32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let tz = num.trailing_zeros() as i32;
        DyadicRational {
            num: num >> tz,
            exp: exp - tz,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(n as i128, 0)
    }

    /// `j * 2^k`.
    pub fn grid_point(j: i64, k: i32) -> Self {
        Self::new(j as i128, -k)
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn exponent(&self) -> i32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    /// `self * 2^k`.
    pub fn mul_pow2(&self, k: i32) -> Self {
        if self.num == 0 {
            return *self;
        }
        DyadicRational {
            num: self.num,
            exp: self.exp - k,
        }
    }

    pub fn to_q(&self) -> Q {
        Q::from_integer(BigInt::from(self.num)) * pow2(-self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 * (-(self.exp as f64)).exp2()
    }

    /// Exact conversion; fails when the denominator is not a power of two.
    pub fn from_q(x: &Q) -> Result<Self> {
        let d = x.denom();
        let bits = d.bits();
        if bits == 0 || (d.clone() & (d - BigInt::one())) != BigInt::zero() {
            return Err(Error::Parse(format!("{x} is not a dyadic rational")));
        }
        let exp = (bits - 1) as i32;
        let num = x
            .numer()
            .to_i128()
            .ok_or_else(|| Error::Parse(format!("numerator of {x} too large")))?;
        Ok(Self::new(num, exp))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::from_q(&parse_q(s)?)
    }

    /// Largest `j` with `j * 2^k <= self`.
    pub fn floor_div_pow2(&self, k: i32) -> i64 {
        // self / 2^k = num / 2^(exp + k)
        let shift = self.exp + k;
        let v = if shift <= 0 {
            self.num
                .checked_shl((-shift) as u32)
                .filter(|v| v >> ((-shift) as u32) == self.num)
                .expect("dyadic overflow")
        } else if shift >= 127 {
            if self.num < 0 {
                -1
            } else {
                0
            }
        } else {
            self.num >> shift
        };
        v as i64
    }

    /// Smallest `j` with `j * 2^k >= self`.
    pub fn ceil_div_pow2(&self, k: i32) -> i64 {
        -(-*self).floor_div_pow2(k)
    }

    /// Finest scale `k` at which `self` is a grid point.
    pub fn grid_scale(&self) -> Option<i32> {
        if self.num == 0 {
            None
        } else {
            Some(-self.exp)
        }
    }

    fn aligned(a: &Self, b: &Self) -> (i128, i128, i32) {
        let e = a.exp.max(b.exp);
        let lift = |x: &Self| -> i128 {
            if x.num == 0 {
                return 0;
            }
            let s = (e - x.exp) as u32;
            let v = x.num.checked_shl(s).expect("dyadic overflow");
            assert_eq!(v >> s, x.num, "dyadic overflow");
            v
        };
        (lift(a), lift(b), e)
    }
}

impl Add for DyadicRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b, e) = Self::aligned(&self, &rhs);
        Self::new(a.checked_add(b).expect("dyadic overflow"), e)
    }
}

impl Sub for DyadicRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for DyadicRational {
    type Output = Self;
    fn neg(self) -> Self {
        DyadicRational {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Self::aligned(self, other);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp <= 0 {
            write!(f, "{}", self.to_q())
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for DyadicRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DyadicRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// The dyadic interval `(pos * 2^scale, (pos + 1) * 2^scale]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub scale: i32,
    pub pos: i64,
}

/// Grid neighbours of a dyadic interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relatives {
    pub parent: DyadicInterval,
    pub sibling: DyadicInterval,
    pub left_child: DyadicInterval,
    pub right_child: DyadicInterval,
}

impl DyadicInterval {
    pub fn new(scale: i32, pos: i64) -> Self {
        DyadicInterval { scale, pos }
    }

    /// The grid interval at `scale` whose closure-right contains `x`, i.e. `x ∈ (l, r]`.
    pub fn containing(x: &DyadicRational, scale: i32) -> Self {
        DyadicInterval::new(scale, x.ceil_div_pow2(scale) - 1)
    }

    pub fn left(&self) -> DyadicRational {
        DyadicRational::grid_point(self.pos, self.scale)
    }

    pub fn right(&self) -> DyadicRational {
        DyadicRational::grid_point(self.pos + 1, self.scale)
    }

    pub fn midpoint(&self) -> DyadicRational {
        DyadicRational::grid_point(2 * self.pos + 1, self.scale - 1)
    }

    pub fn length(&self) -> Q {
        pow2(self.scale)
    }

    pub fn length_dyadic(&self) -> DyadicRational {
        DyadicRational::grid_point(1, self.scale)
    }

    pub fn parent(&self) -> Self {
        DyadicInterval::new(self.scale + 1, self.pos.div_euclid(2))
    }

    pub fn sibling(&self) -> Self {
        DyadicInterval::new(self.scale, self.pos ^ 1)
    }

    pub fn left_child(&self) -> Self {
        DyadicInterval::new(self.scale - 1, 2 * self.pos)
    }

    pub fn right_child(&self) -> Self {
        DyadicInterval::new(self.scale - 1, 2 * self.pos + 1)
    }

    pub fn relatives(&self) -> Relatives {
        Relatives {
            parent: self.parent(),
            sibling: self.sibling(),
            left_child: self.left_child(),
            right_child: self.right_child(),
        }
    }

    /// Ancestor at `scale >= self.scale`.
    pub fn ancestor(&self, scale: i32) -> Self {
        assert!(scale >= self.scale);
        let shift = (scale - self.scale) as u32;
        let pos = if shift >= 63 {
            if self.pos < 0 {
                -1
            } else {
                0
            }
        } else {
            self.pos >> shift
        };
        DyadicInterval::new(scale, pos)
    }

    /// `self ⊆ other`.
    pub fn is_within(&self, other: &DyadicInterval) -> bool {
        self.scale <= other.scale && self.ancestor(other.scale) == *other
    }

    pub fn is_strictly_within(&self, other: &DyadicInterval) -> bool {
        self.scale < other.scale && self.is_within(other)
    }

    pub fn is_disjoint(&self, other: &DyadicInterval) -> bool {
        !self.is_within(other) && !other.is_within(self)
    }

    /// Whether `x` lies in the open interval `(l, r)`.
    pub fn has_interior_point(&self, x: &DyadicRational) -> bool {
        self.left() < *x && *x < self.right()
    }

    pub fn contains(&self, x: &DyadicRational) -> bool {
        self.left() < *x && *x <= self.right()
    }

    /// `+1` on the left child, `-1` on the right child.
    pub fn haar_sign_on(&self, sub: &DyadicInterval) -> i32 {
        debug_assert!(sub.is_strictly_within(self));
        if sub.is_within(&self.left_child()) {
            1
        } else {
            -1
        }
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.scale, self.pos)
    }

    pub fn parse_label(s: &str) -> Result<Self> {
        let (k, j) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("interval label {s:?} is not k:j")))?;
        let k = k.trim().parse().map_err(|_| Error::Parse(format!("bad scale in {s:?}")))?;
        let j = j.trim().parse().map_err(|_| Error::Parse(format!("bad position in {s:?}")))?;
        Ok(DyadicInterval::new(k, j))
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.left(), self.right())
    }
}

impl fmt::Debug for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I[{}:{}]{}", self.scale, self.pos, self)
    }
}

pub fn relatives(i: DyadicInterval) -> Relatives {
    i.relatives()
}
