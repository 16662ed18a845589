//! Outward-rounded interval arithmetic over MPFR floats.
//!
//! A [`Ball`] is stored as a closed interval `[lo, hi]`; midpoint and radius
//! are derived on demand. [`ComplexBall`] is a rectangle of two real balls.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Round, Special};
use rug::ops::{AssignRound, Pow};
use rug::{Float, Integer, Rational};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_PREC: u32 = 128;
pub const MAX_PREC: u32 = 16384;

fn down<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Down).0
}

fn up<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Up).0
}

fn fmin(a: Float, b: Float) -> Float {
    if b < a {
        b
    } else {
        a
    }
}

fn fmax(a: Float, b: Float) -> Float {
    if b > a {
        b
    } else {
        a
    }
}

/// Runs `f` at doubling precision until it stops reporting a precision error.
pub fn with_adaptive_prec<T>(start: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut prec = start.clamp(32, MAX_PREC);
    loop {
        match f(prec) {
            Err(e) if e.is_precision() && prec < MAX_PREC => prec = (prec * 2).min(MAX_PREC),
            r => return r,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Ball {
    lo: Float,
    hi: Float,
}

impl Ball {
    pub fn from_bounds(lo: Float, hi: Float) -> Ball {
        if lo.is_nan() || hi.is_nan() {
            return Ball::whole(lo.prec().max(hi.prec()));
        }
        debug_assert!(lo <= hi, "inverted interval");
        Ball { lo, hi }
    }

    pub fn whole(prec: u32) -> Ball {
        Ball {
            lo: Float::with_val(prec, Special::NegInfinity),
            hi: Float::with_val(prec, Special::Infinity),
        }
    }

    pub fn zero(prec: u32) -> Ball {
        Ball::from_i64(0, prec)
    }

    pub fn one(prec: u32) -> Ball {
        Ball::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Ball {
        Ball {
            lo: down(prec, v),
            hi: up(prec, v),
        }
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Ball {
        Ball {
            lo: down(prec, v),
            hi: up(prec, v),
        }
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Ball {
        Ball {
            lo: down(prec, v),
            hi: up(prec, v),
        }
    }

    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Ball {
        Ball::from_rational(&Rational::from((num, den)), prec)
    }

    pub fn from_float(v: &Float) -> Ball {
        Ball {
            lo: v.clone(),
            hi: v.clone(),
        }
    }

    pub fn pi(prec: u32) -> Ball {
        Ball {
            lo: Float::with_val_round(prec, rug::float::Constant::Pi, Round::Down).0,
            hi: Float::with_val_round(prec, rug::float::Constant::Pi, Round::Up).0,
        }
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    fn joint_prec(&self, other: &Ball) -> u32 {
        self.prec().max(other.prec())
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid(&self) -> Float {
        let p = self.prec() + 2;
        if !self.is_finite() {
            return Float::with_val(p, Special::Nan);
        }
        let s = Float::with_val(p, &self.lo + &self.hi);
        s / 2u32
    }

    pub fn rad(&self) -> Float {
        let m = self.mid();
        let p = self.prec();
        let a = up(p, &self.hi - &m);
        let b = up(p, &m - &self.lo);
        fmax(a, b)
    }

    pub fn width(&self) -> Float {
        up(self.prec(), &self.hi - &self.lo)
    }

    /// Width relative to the smallest magnitude in the ball; infinite if the ball touches 0.
    pub fn rel_width(&self) -> f64 {
        let w = self.width().to_f64();
        let m = self.abs().lo.to_f64();
        if m == 0.0 {
            f64::INFINITY
        } else {
            w / m
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn contains_float(&self, v: &Float) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn contains_integer(&self, v: &Integer) -> bool {
        self.lo <= *v && self.hi >= *v
    }

    pub fn contains_rational(&self, v: &Rational) -> bool {
        self.lo <= *v && self.hi >= *v
    }

    pub fn contains(&self, other: &Ball) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn certainly_pos(&self) -> bool {
        self.lo > 0
    }

    pub fn certainly_neg(&self) -> bool {
        self.hi < 0
    }

    pub fn certainly_nonzero(&self) -> bool {
        self.certainly_pos() || self.certainly_neg()
    }

    pub fn certainly_lt(&self, other: &Ball) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_gt(&self, other: &Ball) -> bool {
        self.lo > other.hi
    }

    pub fn certainly_le(&self, other: &Ball) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_ge(&self, other: &Ball) -> bool {
        self.lo >= other.hi
    }

    /// `Some(ordering)` when the two balls are separated, `None` when they overlap.
    pub fn cmp_certified(&self, other: &Ball) -> Option<Ordering> {
        if self.certainly_lt(other) {
            Some(Ordering::Less)
        } else if self.certainly_gt(other) {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn union(&self, other: &Ball) -> Ball {
        Ball {
            lo: fmin(self.lo.clone(), other.lo.clone()),
            hi: fmax(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn max(&self, other: &Ball) -> Ball {
        Ball {
            lo: fmax(self.lo.clone(), other.lo.clone()),
            hi: fmax(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn min(&self, other: &Ball) -> Ball {
        Ball {
            lo: fmin(self.lo.clone(), other.lo.clone()),
            hi: fmin(self.hi.clone(), other.hi.clone()),
        }
    }

    pub fn abs(&self) -> Ball {
        if self.lo >= 0 {
            self.clone()
        } else if self.hi <= 0 {
            -self
        } else {
            let p = self.prec();
            let nlo = Float::with_val(p, -&self.lo);
            Ball {
                lo: Float::with_val(p, 0),
                hi: fmax(nlo, self.hi.clone()),
            }
        }
    }

    pub fn sqr(&self) -> Ball {
        let a = self.abs();
        let p = a.prec();
        Ball {
            lo: down(p, a.lo.square_ref()),
            hi: up(p, a.hi.square_ref()),
        }
    }

    /// Square root of the nonnegative part of the ball.
    pub fn sqrt(&self) -> Ball {
        let p = self.prec();
        let zero = Float::with_val(p, 0);
        let lo = fmax(self.lo.clone(), zero.clone());
        let hi = fmax(self.hi.clone(), zero);
        Ball {
            lo: down(p, lo.sqrt_ref()),
            hi: up(p, hi.sqrt_ref()),
        }
    }

    /// Natural logarithm; the lower end is `-inf` if the ball reaches 0.
    pub fn ln(&self) -> Ball {
        let p = self.prec();
        let lo = if self.lo > 0 {
            down(p, self.lo.ln_ref())
        } else {
            Float::with_val(p, Special::NegInfinity)
        };
        let hi = if self.hi > 0 {
            up(p, self.hi.ln_ref())
        } else {
            Float::with_val(p, Special::NegInfinity)
        };
        Ball::from_bounds(lo, hi)
    }

    pub fn exp(&self) -> Ball {
        let p = self.prec();
        Ball {
            lo: down(p, self.lo.exp_ref()),
            hi: up(p, self.hi.exp_ref()),
        }
    }

    pub fn pow_u(&self, n: u32) -> Ball {
        if n == 0 {
            return Ball::one(self.prec());
        }
        let p = self.prec();
        if n.is_multiple_of(2) {
            let a = self.abs();
            Ball {
                lo: down(p, (&a.lo).pow(n)),
                hi: up(p, (&a.hi).pow(n)),
            }
        } else {
            Ball {
                lo: down(p, (&self.lo).pow(n)),
                hi: up(p, (&self.hi).pow(n)),
            }
        }
    }

    /// `self^e` for a base that is certainly positive.
    pub fn powf(&self, e: &Ball) -> Ball {
        (e * &self.ln()).exp()
    }

    pub fn recip(&self) -> Ball {
        Ball::one(self.prec()) / self
    }

    pub fn mul_i64(&self, k: i64) -> Ball {
        self * &Ball::from_i64(k, self.prec())
    }

    pub fn floor_certified(&self) -> Option<Integer> {
        let a = self.lo.clone().floor().to_integer()?;
        let b = self.hi.clone().floor().to_integer()?;
        (a == b).then_some(a)
    }

    /// The nearest integer `n` and the distance `|x - n|`, when `n` is the same for every point of the ball.
    pub fn nearest_int(&self) -> Option<(Integer, Ball)> {
        if !self.is_finite() {
            return None;
        }
        let p = self.prec();
        let half = Float::with_val(p, 0.5);
        let a = Float::with_val(p + 1, &self.lo + &half)
            .floor()
            .to_integer()?;
        let b = Float::with_val(p + 1, &self.hi + &half)
            .floor()
            .to_integer()?;
        if a != b {
            return None;
        }
        let d = (self - &Ball::from_integer(&a, p)).abs();
        if d.hi >= half {
            return None;
        }
        Some((a, d))
    }

    pub fn to_json(&self) -> BallJson {
        let digits = ((self.prec() as f64) * std::f64::consts::LOG10_2).ceil() as usize;
        let digits = digits.clamp(17, 60);
        let mid = self.mid();
        let mid_dec = if mid.is_zero() {
            "0".to_string()
        } else {
            mid.to_string_radix(10, Some(digits))
        };
        let rad = self.rad();
        let rad_dec = if rad.is_zero() {
            "0".to_string()
        } else {
            rad.to_string_radix_round(10, Some(6), Round::Up)
        };
        BallJson {
            mid_dec,
            rad_dec,
            prec_bits: self.prec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallJson {
    pub mid_dec: String,
    pub rad_dec: String,
    pub prec_bits: u32,
}

impl Serialize for Ball {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.mid();
        let r = self.rad();
        write!(
            f,
            "{} +/- {}",
            m.to_string_radix(10, Some(20)),
            r.to_string_radix_round(10, Some(3), Round::Up)
        )
    }
}

impl Neg for &Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        let p = self.prec();
        Ball {
            lo: Float::with_val(p, -&self.hi),
            hi: Float::with_val(p, -&self.lo),
        }
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        -&self
    }
}

fn ball_add(a: &Ball, b: &Ball) -> Ball {
    let p = a.joint_prec(b);
    Ball::from_bounds(down(p, &a.lo + &b.lo), up(p, &a.hi + &b.hi))
}

fn ball_sub(a: &Ball, b: &Ball) -> Ball {
    let p = a.joint_prec(b);
    Ball::from_bounds(down(p, &a.lo - &b.hi), up(p, &a.hi - &b.lo))
}

fn ball_mul(a: &Ball, b: &Ball) -> Ball {
    let p = a.joint_prec(b);
    let pairs = [
        (&a.lo, &b.lo),
        (&a.lo, &b.hi),
        (&a.hi, &b.lo),
        (&a.hi, &b.hi),
    ];
    let mut lo: Option<Float> = None;
    let mut hi: Option<Float> = None;
    for (x, y) in pairs {
        let l = down(p, x * y);
        let h = up(p, x * y);
        if l.is_nan() || h.is_nan() {
            return Ball::whole(p);
        }
        lo = Some(match lo {
            None => l,
            Some(v) => fmin(v, l),
        });
        hi = Some(match hi {
            None => h,
            Some(v) => fmax(v, h),
        });
    }
    Ball::from_bounds(lo.unwrap(), hi.unwrap())
}

fn ball_div(a: &Ball, b: &Ball) -> Ball {
    let p = a.joint_prec(b);
    if b.contains_zero() {
        return Ball::whole(p);
    }
    let pairs = [
        (&a.lo, &b.lo),
        (&a.lo, &b.hi),
        (&a.hi, &b.lo),
        (&a.hi, &b.hi),
    ];
    let mut lo: Option<Float> = None;
    let mut hi: Option<Float> = None;
    for (x, y) in pairs {
        let l = down(p, x / y);
        let h = up(p, x / y);
        if l.is_nan() || h.is_nan() {
            return Ball::whole(p);
        }
        lo = Some(match lo {
            None => l,
            Some(v) => fmin(v, l),
        });
        hi = Some(match hi {
            None => h,
            Some(v) => fmax(v, h),
        });
    }
    Ball::from_bounds(lo.unwrap(), hi.unwrap())
}

macro_rules! ball_binop {
    ($tr:ident, $m:ident, $f:ident, $ty:ty) => {
        impl $tr<&$ty> for &$ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty {
                $f(self, rhs)
            }
        }
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                $f(&self, &rhs)
            }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty {
                $f(&self, rhs)
            }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                $f(self, &rhs)
            }
        }
    };
}

ball_binop!(Add, add, ball_add, Ball);
ball_binop!(Sub, sub, ball_sub, Ball);
ball_binop!(Mul, mul, ball_mul, Ball);
ball_binop!(Div, div, ball_div, Ball);

#[derive(Clone, Debug)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> ComplexBall {
        ComplexBall { re, im }
    }

    pub fn real(re: Ball) -> ComplexBall {
        let p = re.prec();
        ComplexBall {
            re,
            im: Ball::zero(p),
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> ComplexBall {
        ComplexBall::real(Ball::from_i64(v, prec))
    }

    pub fn i(prec: u32) -> ComplexBall {
        ComplexBall::new(Ball::zero(prec), Ball::one(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, k: &Ball) -> ComplexBall {
        ComplexBall::new(&self.re * k, &self.im * k)
    }

    pub fn mul_i64(&self, k: i64) -> ComplexBall {
        ComplexBall::new(self.re.mul_i64(k), self.im.mul_i64(k))
    }

    pub fn abs_sq(&self) -> Ball {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(&self) -> Ball {
        self.abs_sq().sqrt()
    }

    pub fn sqr(&self) -> ComplexBall {
        let re = self.re.sqr() - self.im.sqr();
        let im = (&self.re * &self.im).mul_i64(2);
        ComplexBall::new(re, im)
    }

    pub fn recip(&self) -> ComplexBall {
        let n = self.abs_sq();
        ComplexBall::new(&self.re / &n, -(&self.im / &n))
    }

    pub fn pow_u(&self, mut n: u32) -> ComplexBall {
        let mut base = self.clone();
        let mut acc = ComplexBall::from_i64(1, self.prec());
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn certainly_nonzero(&self) -> bool {
        self.re.certainly_nonzero() || self.im.certainly_nonzero()
    }

    pub fn overlaps(&self, other: &ComplexBall) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn contains(&self, other: &ComplexBall) -> bool {
        self.re.contains(&other.re) && self.im.contains(&other.im)
    }

    /// Smallest disk radius around the midpoint enclosing the rectangle.
    pub fn rad(&self) -> Ball {
        let r = Ball::from_float(&self.re.rad());
        let i = Ball::from_float(&self.im.rad());
        (r.sqr() + i.sqr()).sqrt()
    }

    fn half_sqrt_parts(&self) -> (Ball, Ball) {
        let r = self.abs();
        let two = Ball::from_i64(2, self.prec());
        let s = ((&r + &self.re) / &two).sqrt();
        let t = ((&r - &self.re) / &two).sqrt();
        (s, t)
    }

    /// Principal square root with the argument in `(-pi, pi]`.
    pub fn principal_sqrt(&self) -> Result<ComplexBall> {
        let p = self.prec();
        let two = Ball::from_i64(2, p);
        if self.re.certainly_pos() {
            let (s, _) = self.half_sqrt_parts();
            let t = &self.im / &(&two * &s);
            return Ok(ComplexBall::new(s, t));
        }
        if self.im.certainly_pos() {
            let (s, t) = self.half_sqrt_parts();
            return Ok(ComplexBall::new(s, t));
        }
        if self.im.certainly_neg() {
            let (s, t) = self.half_sqrt_parts();
            return Ok(ComplexBall::new(s, -t));
        }
        let im_exact_zero = self.im.is_point() && self.im.lo().is_zero();
        if im_exact_zero && !self.re.certainly_pos() && self.re.hi() <= &0 {
            return Ok(ComplexBall::new(Ball::zero(p), (-&self.re).sqrt()));
        }
        Err(Error::precision(
            "principal square root near the branch cut",
            p,
        ))
    }

    /// Some square root, continuous across the negative real axis.
    pub fn any_sqrt(&self) -> Result<ComplexBall> {
        match self.principal_sqrt() {
            Ok(z) => Ok(z),
            Err(e) => {
                if self.re.certainly_neg() {
                    let p = self.prec();
                    let (_, t) = self.half_sqrt_parts();
                    let s = &self.im / &(&Ball::from_i64(2, p) * &t);
                    Ok(ComplexBall::new(s, t))
                } else {
                    Err(e)
                }
            }
        }
    }
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", self.re, self.im)
    }
}

impl Neg for &ComplexBall {
    type Output = ComplexBall;
    fn neg(self) -> ComplexBall {
        ComplexBall::new(-&self.re, -&self.im)
    }
}

impl Neg for ComplexBall {
    type Output = ComplexBall;
    fn neg(self) -> ComplexBall {
        -&self
    }
}

fn cadd(a: &ComplexBall, b: &ComplexBall) -> ComplexBall {
    ComplexBall::new(&a.re + &b.re, &a.im + &b.im)
}

fn csub(a: &ComplexBall, b: &ComplexBall) -> ComplexBall {
    ComplexBall::new(&a.re - &b.re, &a.im - &b.im)
}

fn cmul(a: &ComplexBall, b: &ComplexBall) -> ComplexBall {
    let re = &a.re * &b.re - &a.im * &b.im;
    let im = &a.re * &b.im + &a.im * &b.re;
    ComplexBall::new(re, im)
}

fn cdiv(a: &ComplexBall, b: &ComplexBall) -> ComplexBall {
    let n = b.abs_sq();
    let num = cmul(a, &b.conj());
    ComplexBall::new(&num.re / &n, &num.im / &n)
}

ball_binop!(Add, add, cadd, ComplexBall);
ball_binop!(Sub, sub, csub, ComplexBall);
ball_binop!(Mul, mul, cmul, ComplexBall);
ball_binop!(Div, div, cdiv, ComplexBall);

/// The exact nonnegative real `sqrt(sq)`, e.g. the modulus of an element of an imaginary quadratic ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    sq: Rational,
}

impl Modulus {
    pub fn from_sq(sq: Rational) -> Result<Modulus> {
        if sq < 0 {
            return Err(Error::Domain(format!("negative square {sq}")));
        }
        Ok(Modulus { sq })
    }

    pub fn from_integer(n: &Integer) -> Modulus {
        Modulus {
            sq: Rational::from(n.clone().square()),
        }
    }

    pub fn from_i64(n: i64) -> Modulus {
        Modulus::from_integer(&Integer::from(n))
    }

    pub fn sq(&self) -> &Rational {
        &self.sq
    }

    pub fn ball(&self, prec: u32) -> Ball {
        Ball::from_rational(&self.sq, prec).sqrt()
    }

    /// Exact comparison of the modulus with a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        if *r < 0 {
            return Ordering::Greater;
        }
        self.sq.cmp(&Rational::from(r.square_ref()))
    }

    pub fn cmp_i64(&self, n: i64) -> Ordering {
        self.cmp_rational(&Rational::from(n))
    }

    pub fn exact_integer(&self) -> Option<Integer> {
        if *self.sq.denom() != 1 {
            return None;
        }
        let (root, rem) = self.sq.numer().clone().sqrt_rem(Integer::new());
        (rem == 0).then_some(root)
    }
}

impl PartialOrd for Modulus {
    fn partial_cmp(&self, other: &Modulus) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Modulus {
    fn cmp(&self, other: &Modulus) -> Ordering {
        self.sq.cmp(&other.sq)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact_integer() {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "sqrt({})", self.sq),
        }
    }
}
