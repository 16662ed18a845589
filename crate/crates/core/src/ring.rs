//! Exact arithmetic in the ring of integers of Q(sqrt(-D)).
//!
//! Every element is held as `(x + y*sqrt(-D))/2`. In the half lattice both
//! coordinates are even; in the full lattice they share a parity.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};
use serde::{Serialize, Serializer};

use crate::ball::{Ball, ComplexBall, Modulus};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Convention {
    /// D = 3 (mod 4): the ring is Z[(1+sqrt(-D))/2].
    FullLattice,
    /// D = 1, 2 (mod 4): the ring is Z[sqrt(-D)].
    HalfLattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingSpec {
    d: u64,
    convention: Convention,
}

fn is_squarefree(d: u64) -> bool {
    let mut p: u64 = 2;
    while p.saturating_mul(p) <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

impl RingSpec {
    pub fn new(d: u64) -> Result<RingSpec> {
        if d == 0 {
            return Err(Error::InvalidD {
                d,
                reason: "D must be positive",
            });
        }
        if !is_squarefree(d) {
            return Err(Error::InvalidD {
                d,
                reason: "D must be squarefree",
            });
        }
        let convention = if d % 4 == 3 {
            Convention::FullLattice
        } else {
            Convention::HalfLattice
        };
        Ok(RingSpec { d, convention })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn is_half(&self) -> bool {
        self.convention == Convention::HalfLattice
    }

    fn valid_coords(&self, x: &Integer, y: &Integer) -> bool {
        match self.convention {
            Convention::HalfLattice => x.is_even() && y.is_even(),
            Convention::FullLattice => x.is_even() == y.is_even(),
        }
    }

    /// The element `(x + y*sqrt(-D))/2`, rejected if it is not integral.
    pub fn from_half(&self, x: Integer, y: Integer) -> Result<QuadInt> {
        if !self.valid_coords(&x, &y) {
            return Err(Error::InvalidElement(format!(
                "({x} + {y}*sqrt(-{}))/2 is not in the ring",
                self.d
            )));
        }
        Ok(QuadInt { ring: *self, x, y })
    }

    pub fn half(&self, x: i64, y: i64) -> QuadInt {
        self.from_half(Integer::from(x), Integer::from(y))
            .expect("coordinates off the lattice")
    }

    pub fn int(&self, n: i64) -> QuadInt {
        self.from_integer(&Integer::from(n))
    }

    pub fn from_integer(&self, n: &Integer) -> QuadInt {
        QuadInt {
            ring: *self,
            x: Integer::from(n * 2u32),
            y: Integer::new(),
        }
    }

    pub fn zero(&self) -> QuadInt {
        self.int(0)
    }

    pub fn one(&self) -> QuadInt {
        self.int(1)
    }

    /// `sqrt(-D)`.
    pub fn root(&self) -> QuadInt {
        self.half(0, 2)
    }

    /// The basis element `w` of the textual syntax.
    pub fn w(&self) -> QuadInt {
        match self.convention {
            Convention::HalfLattice => self.half(0, 2),
            Convention::FullLattice => self.half(1, 1),
        }
    }

    /// `a + b*w`.
    pub fn from_ab(&self, a: &Integer, b: &Integer) -> QuadInt {
        let (x, y) = match self.convention {
            Convention::HalfLattice => (Integer::from(a * 2u32), Integer::from(b * 2u32)),
            Convention::FullLattice => (Integer::from(a * 2u32) + b, b.clone()),
        };
        QuadInt { ring: *self, x, y }
    }

    pub fn ab(&self, a: i64, b: i64) -> QuadInt {
        self.from_ab(&Integer::from(a), &Integer::from(b))
    }

    /// Units in the fixed order `1, -1, i, -i` or `1, -1, w, w^2, -w, -w^2`.
    pub fn units(&self) -> Vec<QuadInt> {
        let tags: &[UnitRoot] = match self.d {
            1 => &[
                UnitRoot::One,
                UnitRoot::MinusOne,
                UnitRoot::I,
                UnitRoot::MinusI,
            ],
            3 => &[
                UnitRoot::One,
                UnitRoot::MinusOne,
                UnitRoot::Omega,
                UnitRoot::OmegaSq,
                UnitRoot::MinusOmega,
                UnitRoot::MinusOmegaSq,
            ],
            _ => &[UnitRoot::One, UnitRoot::MinusOne],
        };
        tags.iter().map(|t| t.to_quadint(self).unwrap()).collect()
    }

    /// Parses `a+b*w`, `a-b*w`, `a`, `b*w`, `w` (spaces ignored).
    pub fn parse(&self, s: &str) -> Result<QuadInt> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let bad = || Error::Parse(format!("cannot parse element {s:?}; expected a+b*w"));
        let parse_int = |u: &str| -> Result<Integer> {
            let ok = !u.is_empty()
                && u.trim_start_matches(['+', '-'])
                    .chars()
                    .all(|c| c.is_ascii_digit())
                && u.trim_start_matches(['+', '-']).len() + 1 >= u.len();
            if !ok {
                return Err(bad());
            }
            Integer::from_str_radix(u.trim_start_matches('+'), 10).map_err(|_| bad())
        };
        let Some(body) = t.strip_suffix('w') else {
            let a = parse_int(&t)?;
            return Ok(self.from_ab(&a, &Integer::new()));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        // split at the last sign that is not the leading sign
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i)
            .last();
        let (a_str, b_str) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let a = parse_int(a_str)?;
        let b = match b_str {
            "" | "+" => Integer::from(1),
            "-" => Integer::from(-1),
            other => parse_int(other)?,
        };
        Ok(self.from_ab(&a, &b))
    }

    /// Every element of modulus at most `sqrt(r_sq)`, ordered by `(norm, x, y)`.
    pub fn enumerate_disk(&self, r_sq: &Rational) -> Vec<QuadInt> {
        if *r_sq < 0 {
            return Vec::new();
        }
        // x^2 + D y^2 <= 4 R^2
        let bound = Rational::from(r_sq * 4u32);
        let bound = bound.floor().numer().clone();
        let d = Integer::from(self.d);
        let y_max = Integer::from(&bound / &d).sqrt();
        let mut out = Vec::new();
        let mut y = Integer::from(-&y_max);
        while y <= y_max {
            let rest = &bound - Integer::from(y.square_ref()) * &d;
            if rest >= 0 {
                let x_max = rest.sqrt();
                let mut x = Integer::from(-&x_max);
                while x <= x_max {
                    if self.valid_coords(&x, &y) {
                        out.push(QuadInt {
                            ring: *self,
                            x: x.clone(),
                            y: y.clone(),
                        });
                    }
                    x += 1;
                }
            }
            y += 1;
        }
        out.sort();
        out
    }

    pub fn enumerate_disk_int(&self, r: i64) -> Vec<QuadInt> {
        self.enumerate_disk(&Rational::from(r * r))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt(-{}))", self.d)
    }
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            #[serde(rename = "D")]
            d: u64,
            convention: Convention,
        }
        Repr {
            d: self.d,
            convention: self.convention,
        }
        .serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum UnitRoot {
    One,
    MinusOne,
    I,
    MinusI,
    Omega,
    OmegaSq,
    MinusOmega,
    MinusOmegaSq,
}

impl UnitRoot {
    pub fn to_quadint(self, ring: &RingSpec) -> Result<QuadInt> {
        let need = match self {
            UnitRoot::One | UnitRoot::MinusOne => None,
            UnitRoot::I | UnitRoot::MinusI => Some(1),
            _ => Some(3),
        };
        if let Some(d) = need {
            if ring.d != d {
                return Err(Error::InvalidElement(format!(
                    "{self:?} is not a unit of {ring}"
                )));
            }
        }
        let (x, y) = match self {
            UnitRoot::One => (2, 0),
            UnitRoot::MinusOne => (-2, 0),
            UnitRoot::I => (0, 2),
            UnitRoot::MinusI => (0, -2),
            UnitRoot::Omega => (-1, 1),
            UnitRoot::OmegaSq => (-1, -1),
            UnitRoot::MinusOmega => (1, -1),
            UnitRoot::MinusOmegaSq => (1, 1),
        };
        Ok(ring.half(x, y))
    }

    pub fn from_quadint(u: &QuadInt) -> Option<UnitRoot> {
        let all = [
            UnitRoot::One,
            UnitRoot::MinusOne,
            UnitRoot::I,
            UnitRoot::MinusI,
            UnitRoot::Omega,
            UnitRoot::OmegaSq,
            UnitRoot::MinusOmega,
            UnitRoot::MinusOmegaSq,
        ];
        all.into_iter()
            .find(|t| t.to_quadint(&u.ring).ok().as_ref() == Some(u))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    ring: RingSpec,
    x: Integer,
    y: Integer,
}

impl QuadInt {
    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn x(&self) -> &Integer {
        &self.x
    }

    pub fn y(&self) -> &Integer {
        &self.y
    }

    fn same_ring(&self, other: &QuadInt) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch {
                left: self.ring.d,
                right: other.ring.d,
            });
        }
        Ok(())
    }

    fn raw(&self, x: Integer, y: Integer) -> QuadInt {
        QuadInt {
            ring: self.ring,
            x,
            y,
        }
    }

    pub fn checked_add(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_ring(other)?;
        Ok(self.raw(
            Integer::from(&self.x + &other.x),
            Integer::from(&self.y + &other.y),
        ))
    }

    pub fn checked_sub(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_ring(other)?;
        Ok(self.raw(
            Integer::from(&self.x - &other.x),
            Integer::from(&self.y - &other.y),
        ))
    }

    pub fn checked_mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.same_ring(other)?;
        let d = self.ring.d;
        let xx = Integer::from(&self.x * &other.x);
        let yy = Integer::from(&self.y * &other.y) * d;
        let xy = Integer::from(&self.x * &other.y) + Integer::from(&other.x * &self.y);
        let x = (xx - yy).div_exact(&Integer::from(2));
        let y = xy.div_exact(&Integer::from(2));
        Ok(self.raw(x, y))
    }

    pub fn mul_int(&self, k: &Integer) -> QuadInt {
        self.raw(Integer::from(&self.x * k), Integer::from(&self.y * k))
    }

    pub fn mul_i64(&self, k: i64) -> QuadInt {
        self.mul_int(&Integer::from(k))
    }

    pub fn pow(&self, n: u32) -> QuadInt {
        let mut acc = self.ring.one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn conj(&self) -> QuadInt {
        self.raw(self.x.clone(), Integer::from(-&self.y))
    }

    pub fn norm(&self) -> Integer {
        let s =
            Integer::from(self.x.square_ref()) + Integer::from(self.y.square_ref()) * self.ring.d;
        s.div_exact(&Integer::from(4))
    }

    pub fn abs_sq(&self) -> Integer {
        self.norm()
    }

    pub fn modulus(&self) -> Modulus {
        Modulus::from_sq(Rational::from(self.norm())).expect("norm is nonnegative")
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    pub fn is_rational(&self) -> bool {
        self.y == 0
    }

    /// The rational integer this element equals, if it has no imaginary part.
    pub fn as_integer(&self) -> Option<Integer> {
        (self.y == 0).then(|| Integer::from(&self.x / 2u32))
    }

    /// Sign of the real part.
    pub fn re_sign(&self) -> Ordering {
        self.x.cmp0()
    }

    /// `self / d` if it lies in the ring.
    pub fn div_exact(&self, d: &QuadInt) -> Result<Option<QuadInt>> {
        self.same_ring(d)?;
        if d.is_zero() {
            return Err(Error::InvalidModulus);
        }
        let n = d.norm();
        let p = self.checked_mul(&d.conj())?;
        if !p.x.is_divisible(&n) || !p.y.is_divisible(&n) {
            return Ok(None);
        }
        let x = p.x.div_exact(&n);
        let y = p.y.div_exact(&n);
        Ok(self.ring.valid_coords(&x, &y).then(|| self.raw(x, y)))
    }

    pub fn divides(&self, a: &QuadInt) -> Result<bool> {
        Ok(a.div_exact(self)?.is_some())
    }

    /// The unique `r` with `r^2 = self` and nonnegative real part (or positive imaginary part if purely imaginary).
    pub fn sqrt_exact(&self) -> Option<QuadInt> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let n = self.norm();
        let (rn, rem) = n.sqrt_rem(Integer::new());
        if rem != 0 {
            return None;
        }
        // r = (a + b sqrt(-D))/2 with a^2 = x + 2|r|^2, D b^2 = 2|r|^2 - x
        let two_rn = Integer::from(&rn * 2u32);
        let a2 = Integer::from(&self.x + &two_rn);
        let db2 = Integer::from(&two_rn - &self.x);
        let d = Integer::from(self.ring.d);
        if a2 < 0 || db2 < 0 || !db2.is_divisible(&d) {
            return None;
        }
        let b2 = db2.div_exact(&d);
        let (a, ra) = a2.sqrt_rem(Integer::new());
        let (b, rb) = b2.sqrt_rem(Integer::new());
        if ra != 0 || rb != 0 {
            return None;
        }
        // a*b = y fixes the relative sign
        let b = if Integer::from(&a * &b) == self.y {
            b
        } else {
            -b
        };
        if !self.ring.valid_coords(&a, &b) {
            return None;
        }
        let r = self.raw(a, b);
        (&r * &r == *self).then_some(r)
    }

    /// Exact test `d | (a - b)`.
    pub fn congruent(&self, b: &QuadInt, d: &QuadInt) -> Result<bool> {
        let diff = self.checked_sub(b)?;
        d.divides(&diff)
    }

    pub fn embed(&self, prec: u32) -> ComplexBall {
        let two = Ball::from_i64(2, prec);
        let re = Ball::from_integer(&self.x, prec) / &two;
        let sd = Ball::from_i64(self.ring.d as i64, prec).sqrt();
        let im = Ball::from_integer(&self.y, prec) * sd / &two;
        ComplexBall::new(re, im)
    }

    /// Coordinates in the basis `1, w` of the textual syntax.
    pub fn to_ab(&self) -> (Integer, Integer) {
        match self.ring.convention {
            Convention::HalfLattice => {
                (Integer::from(&self.x / 2u32), Integer::from(&self.y / 2u32))
            }
            Convention::FullLattice => (
                Integer::from(&self.x - &self.y).div_exact(&Integer::from(2)),
                self.y.clone(),
            ),
        }
    }

    pub fn in_sc(&self) -> bool {
        in_list(self, SC_LIST)
    }

    pub fn in_t(&self) -> bool {
        in_list(self, T_LIST)
    }

    pub fn in_t1(&self) -> bool {
        in_list(self, T_LIST) || in_list(self, T1_EXTRA)
    }
}

// (x, y, D) meaning (x + y sqrt(-D))/2, every sign combination; D = 0 for rationals.
type Pattern = (i64, i64, u64);

const SC_LIST: &[Pattern] = &[
    (2, 0, 0),
    (0, 2, 1),
    (2, 2, 1),
    (4, 2, 1),
    (2, 2, 2),
    (2, 2, 3),
    (1, 1, 3),
    (3, 1, 3),
];

const T_LIST: &[Pattern] = &[
    (2, 2, 1),
    (0, 2, 2),
    (1, 1, 7),
    (2, 2, 2),
    (0, 2, 3),
    (3, 1, 3),
    (1, 1, 11),
];

const T1_EXTRA: &[Pattern] = &[(0, 4, 1), (3, 1, 7), (1, 1, 15), (2, 2, 3)];

fn in_list(c: &QuadInt, list: &[Pattern]) -> bool {
    let ax = c.x.clone().abs();
    let ay = c.y.clone().abs();
    list.iter().any(|&(x, y, d)| {
        let ring_ok = if y == 0 { true } else { c.ring.d == d };
        ring_ok && ax == x && ay == y
    })
}

impl PartialOrd for QuadInt {
    fn partial_cmp(&self, other: &QuadInt) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadInt {
    fn cmp(&self, other: &QuadInt) -> Ordering {
        self.ring
            .d
            .cmp(&other.ring.d)
            .then_with(|| self.norm().cmp(&other.norm()))
            .then_with(|| self.x.cmp(&other.x))
            .then_with(|| self.y.cmp(&other.y))
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_ab();
        if b < 0 {
            write!(f, "{a}-{}*w", Integer::from(-&b))
        } else {
            write!(f, "{a}+{b}*w")
        }
    }
}

impl Serialize for QuadInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

macro_rules! quad_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&QuadInt> for &QuadInt {
            type Output = QuadInt;
            fn $m(self, rhs: &QuadInt) -> QuadInt {
                self.$checked(rhs).expect("mixed-ring arithmetic")
            }
        }
        impl $tr<QuadInt> for QuadInt {
            type Output = QuadInt;
            fn $m(self, rhs: QuadInt) -> QuadInt {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QuadInt> for QuadInt {
            type Output = QuadInt;
            fn $m(self, rhs: &QuadInt) -> QuadInt {
                (&self).$m(rhs)
            }
        }
        impl $tr<QuadInt> for &QuadInt {
            type Output = QuadInt;
            fn $m(self, rhs: QuadInt) -> QuadInt {
                self.$m(&rhs)
            }
        }
    };
}

quad_binop!(Add, add, checked_add);
quad_binop!(Sub, sub, checked_sub);
quad_binop!(Mul, mul, checked_mul);

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        self.raw(Integer::from(-&self.x), Integer::from(-&self.y))
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}
