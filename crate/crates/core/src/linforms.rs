//! The linear form `log|Q| - log|P|` attached to `u_m = +-u'_n`, its size estimates,
//! and the Baker-Wustholz bounds on the indices.

use std::cmp::Ordering;

use rug::Integer;
use serde::Serialize;

use crate::ball::{Ball, ComplexBall, Modulus};
use crate::error::{Error, Result};
use crate::pell::{u_seq, uprime_seq};
use crate::ring::QuadInt;

/// Global caps on the heights, valid for every `|c| < 159108`.
pub const HEIGHT_CAP_UNIT: (i64, i64) = (2812, 100);
pub const HEIGHT_CAP_CONST: (i64, i64) = (27182, 100);
/// Degree bound for the field generated by the three logarithm arguments.
pub const FIELD_DEGREE: i64 = 2048;

/// `(-c, true)` when `Re(c) < 0` (the roles of `V` and `Z` swap), else `(c, false)`.
pub fn normalize_c(c: &QuadInt) -> (QuadInt, bool) {
    if c.re_sign() == Ordering::Less {
        (-c.clone(), true)
    } else {
        (c.clone(), false)
    }
}

/// Square root with argument in `(-pi/2, pi/2]`.
pub fn principal_sqrt(z: &ComplexBall) -> Result<ComplexBall> {
    z.principal_sqrt()
}

fn require_baker_domain(c: &QuadInt) -> Result<()> {
    if c.re_sign() == Ordering::Less {
        return Err(Error::Domain(format!("needs Re(c) >= 0, got c = {c}")));
    }
    let ring = *c.ring();
    for k in -2..=2 {
        if *c == ring.int(k) {
            return Err(Error::Domain(format!(
                "c = {c} is degenerate for the linear form"
            )));
        }
    }
    Ok(())
}

/// Principal roots `sqrt(c)`, `sqrt(c+2)`, `sqrt(c-2)` at one precision.
struct Roots {
    c: ComplexBall,
    sc: ComplexBall,
    sp: ComplexBall,
    sm: ComplexBall,
}

impl Roots {
    fn new(c: &QuadInt, prec: u32) -> Result<Roots> {
        require_baker_domain(c)?;
        let ring = *c.ring();
        let cb = c.embed(prec);
        Ok(Roots {
            sc: principal_sqrt(&cb)?,
            sp: principal_sqrt(&(c + &ring.int(2)).embed(prec))?,
            sm: principal_sqrt(&(c - &ring.int(2)).embed(prec))?,
            c: cb,
        })
    }

    fn prec(&self) -> u32 {
        self.c.prec()
    }

    /// `c + 1 + sqrt(c) sqrt(c+2)`.
    fn plus_base(&self) -> ComplexBall {
        &(&self.c + &ComplexBall::from_i64(1, self.prec())) + &(&self.sc * &self.sp)
    }

    /// `c - 1 + sqrt(c) sqrt(c-2)`.
    fn minus_base(&self) -> ComplexBall {
        &(&self.c - &ComplexBall::from_i64(1, self.prec())) + &(&self.sc * &self.sm)
    }

    fn p_head(&self) -> ComplexBall {
        &(&self.c + &(&self.sc * &self.sp)) / &self.sp
    }

    fn q_head(&self) -> ComplexBall {
        &(&self.c + &(&self.sc * &self.sm)) / &self.sm
    }
}

fn index_u32(k: u64) -> Result<u32> {
    u32::try_from(k).map_err(|_| Error::Domain(format!("index {k} is too large to expand")))
}

fn nonzero(z: &ComplexBall, what: &str) -> Result<()> {
    if z.certainly_nonzero() {
        Ok(())
    } else {
        Err(Error::precision(what, z.prec()))
    }
}

/// `(c + sqrt(c) sqrt(c+2)) (c + 1 + sqrt(c) sqrt(c+2))^m / sqrt(c+2)`.
pub fn build_p(c: &QuadInt, m: u64, prec: u32) -> Result<ComplexBall> {
    let r = Roots::new(c, prec)?;
    let p = &r.p_head() * &r.plus_base().pow_u(index_u32(m)?);
    nonzero(&p, "P")?;
    Ok(p)
}

/// `(c + sqrt(c) sqrt(c-2)) (c - 1 + sqrt(c) sqrt(c-2))^n / sqrt(c-2)`.
pub fn build_q(c: &QuadInt, n: u64, prec: u32) -> Result<ComplexBall> {
    let r = Roots::new(c, prec)?;
    let q = &r.q_head() * &r.minus_base().pow_u(index_u32(n)?);
    nonzero(&q, "Q")?;
    Ok(q)
}

/// Candidate coefficients `k` in `u_m = eps/(2 sqrt c) (P + k/P)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PCoefficient {
    /// `2c/(c+2)`
    OverCPlusTwo,
    /// `2c/(c+1)`
    OverCPlusOne,
}

impl PCoefficient {
    pub const ALL: [PCoefficient; 2] = [PCoefficient::OverCPlusTwo, PCoefficient::OverCPlusOne];

    fn value(self, c: &ComplexBall) -> ComplexBall {
        let shift = match self {
            PCoefficient::OverCPlusTwo => 2,
            PCoefficient::OverCPlusOne => 1,
        };
        &c.mul_i64(2) / &(c + &ComplexBall::from_i64(shift, c.prec()))
    }
}

/// `eps/(2 sqrt c) (P + k P^-1)` for the chosen coefficient `k`.
pub fn reconstruct_u(
    c: &QuadInt,
    eps: &QuadInt,
    m: u64,
    coeff: PCoefficient,
    prec: u32,
) -> Result<ComplexBall> {
    let r = Roots::new(c, prec)?;
    let p = build_p(c, m, prec)?;
    let inner = &p + &(&coeff.value(&r.c) * &p.recip());
    Ok(&(&eps.embed(prec) * &inner) / &r.sc.mul_i64(2))
}

/// `eps/(2 sqrt c) (Q - 2c/(c-2) Q^-1)`, equal to `+-u'_n`.
pub fn reconstruct_uprime(c: &QuadInt, eps: &QuadInt, n: u64, prec: u32) -> Result<ComplexBall> {
    let r = Roots::new(c, prec)?;
    let q = build_q(c, n, prec)?;
    let k = &r.c.mul_i64(2) / &(&r.c - &ComplexBall::from_i64(2, prec));
    let inner = &q - &(&k * &q.recip());
    Ok(&(&eps.embed(prec) * &inner) / &r.sc.mul_i64(2))
}

/// Whether the reconstruction with `coeff` encloses the recurrence value `u_m`.
pub fn reconstruction_holds(
    c: &QuadInt,
    eps: &QuadInt,
    m: u64,
    coeff: PCoefficient,
    prec: u32,
) -> Result<bool> {
    let ball = reconstruct_u(c, eps, m, coeff, prec)?;
    if !ball.is_finite() {
        return Err(Error::precision("reconstruction of u_m", prec));
    }
    Ok(ball.overlaps(&u_seq(c, eps, m).embed(prec)))
}

/// Whether `+-` the `Q` reconstruction encloses `u'_n`.
pub fn reconstruction_prime_holds(c: &QuadInt, eps: &QuadInt, n: u64, prec: u32) -> Result<bool> {
    let ball = reconstruct_uprime(c, eps, n, prec)?;
    if !ball.is_finite() {
        return Err(Error::precision("reconstruction of u'_n", prec));
    }
    let exact = uprime_seq(c, eps, n).embed(prec);
    Ok(ball.overlaps(&exact) || (-ball).overlaps(&exact))
}

/// The coefficients whose reconstruction encloses `u_m` for every sample `c` and `m <= m_max`.
pub fn surviving_coefficients(
    samples: &[QuadInt],
    m_max: u64,
    prec: u32,
) -> Result<Vec<PCoefficient>> {
    let mut out = Vec::new();
    'cand: for coeff in PCoefficient::ALL {
        for c in samples {
            let eps = c.ring().one();
            for m in 0..=m_max {
                if !reconstruction_holds(c, &eps, m, coeff, prec)? {
                    continue 'cand;
                }
            }
        }
        out.push(coeff);
    }
    Ok(out)
}

/// `eta = |c-1+sqrt(c)sqrt(c-2)|`, `vartheta = |c+1+sqrt(c(c+2))|` and the constant ratio of `|Q|/|P|`.
#[derive(Clone, Debug, Serialize)]
pub struct LinFormInstance {
    pub c: QuadInt,
    pub eta: Ball,
    pub vartheta: Ball,
    pub xi_const: Ball,
    pub m_bound: String,
    pub n_bound: String,
}

impl LinFormInstance {
    pub fn new(c: &QuadInt, prec: u32) -> Result<LinFormInstance> {
        let r = Roots::new(c, prec)?;
        let eta = r.minus_base().abs();
        let vartheta = r.plus_base().abs();
        let xi_const = r.q_head().abs() / r.p_head().abs();
        for (name, v) in [("eta", &eta), ("vartheta", &vartheta)] {
            match v.cmp_certified(&Ball::one(prec)) {
                Some(Ordering::Greater) => {}
                Some(_) => return Err(Error::Anomaly(format!("{name} <= 1 at c = {c}"))),
                None => return Err(Error::precision(name, prec)),
            }
        }
        let caps = bw_caps();
        Ok(LinFormInstance {
            c: c.clone(),
            eta,
            vartheta,
            xi_const,
            m_bound: caps.0.to_string(),
            n_bound: caps.1.to_string(),
        })
    }

    pub fn log_eta(&self) -> Ball {
        self.eta.ln()
    }

    pub fn log_vartheta(&self) -> Ball {
        self.vartheta.ln()
    }

    pub fn log_xi(&self) -> Ball {
        self.xi_const.ln()
    }
}

/// `Lambda = n log eta - m log vartheta + log xi`, checked against `log|Q| - log|P|`.
pub fn lambda_value(c: &QuadInt, m: u64, n: u64, prec: u32) -> Result<Ball> {
    let inst = LinFormInstance::new(c, prec)?;
    let three_term = &(&inst.log_eta() * &Ball::from_integer(&Integer::from(n), prec))
        - &(&inst.log_vartheta() * &Ball::from_integer(&Integer::from(m), prec))
        + inst.log_xi();
    let direct = build_q(c, n, prec)?.abs().ln() - build_p(c, m, prec)?.abs().ln();
    if !three_term.is_finite() || !direct.is_finite() {
        return Err(Error::precision("Lambda", prec));
    }
    if !three_term.overlaps(&direct) {
        return Err(Error::Anomaly(format!(
            "the two expressions for Lambda disagree at c = {c}, m = {m}, n = {n}"
        )));
    }
    Ok(three_term)
}

/// `(3^-m, 1.55^-n)`: the bounds on `|Lambda|` when `u_m = +-u'_n` with `m, n >= 2`.
pub fn lambda_upper_bounds(m: u64, n: u64, prec: u32) -> Result<(Ball, Ball)> {
    let m = index_u32(m)?;
    let n = index_u32(n)?;
    let a = Ball::from_i64(3, prec).pow_u(m).recip();
    let b = Ball::from_ratio(31, 20, prec).pow_u(n).recip();
    Ok((a, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LambdaStatus {
    NonzeroCertified,
    /// `Re(c) = 0`; here `u_m = +-u'_n` has no solution with `m, n > 0` at all.
    ZeroPossibleReZero,
}

pub fn lambda_nonzero(c: &QuadInt) -> Result<LambdaStatus> {
    if c.in_sc() {
        return Err(Error::Inapplicable(format!(
            "c = {c} lies in the exceptional set"
        )));
    }
    Ok(if c.re_sign() == Ordering::Equal {
        LambdaStatus::ZeroPossibleReZero
    } else {
        LambdaStatus::NonzeroCertified
    })
}

/// Certifies that `u_1 = +-u'_n` and `u_m = +-u'_1` are impossible for `m, n >= 1`.
pub fn exclude_index_one(c: &QuadInt, prec: u32) -> Result<bool> {
    if c.norm() < 2 {
        return Err(Error::Domain(format!("needs |c| >= sqrt 2, got c = {c}")));
    }
    if c.re_sign() == Ordering::Less {
        return Err(Error::Domain(format!("needs Re(c) >= 0, got c = {c}")));
    }
    let ring = *c.ring();
    let two_c = c.mul_i64(2);
    let u1 = &two_c + &ring.one();
    let up1 = &two_c - &ring.one();
    if u1 == up1 || u1 == -up1.clone() {
        return Ok(false);
    }
    let t = c.modulus().ball(prec);
    let one = Ball::one(prec);
    let small = &t.mul_i64(2) + &one;
    let growth = (&one + &t.sqr()).sqrt().mul_i64(2) - one.clone();
    let against_prime = &growth * &(&t.mul_i64(2) - &one);
    let against_u = growth.sqr();
    match (
        small.cmp_certified(&against_prime),
        small.cmp_certified(&against_u),
    ) {
        (Some(Ordering::Less), Some(Ordering::Less)) => Ok(true),
        (None, _) | (_, None) => Err(Error::precision("index-one exclusion", prec)),
        _ => Ok(false),
    }
}

/// `|c/(c-2)|`, bounded by 5 in the size estimates.
pub fn ratio_minus(c: &QuadInt, prec: u32) -> Result<Ball> {
    let d = c - &c.ring().int(2);
    if d.is_zero() {
        return Err(Error::Domain("c = 2".into()));
    }
    Ok((Ball::from_integer(&c.norm(), prec) / Ball::from_integer(&d.norm(), prec)).sqrt())
}

/// Height bounds for `(eta, vartheta, xi)`; below 159108 they sit under the global caps.
pub fn height_bounds(c_abs: &Modulus, prec: u32) -> Result<(Ball, Ball, Ball)> {
    if c_abs.cmp_i64(crate::bennett::LARGE_C) != Ordering::Less {
        return Err(Error::Domain(format!(
            "height bounds are used only for |c| < 159108, got {c_abs}"
        )));
    }
    let t = c_abs.ball(prec);
    let t2 = t.sqr();
    let unit = (Ball::from_i64(6, prec) + t.mul_i64(16) + t2.mul_i64(8))
        .mul_i64(8)
        .ln();
    let poly = Ball::from_i64(6435, prec)
        + t2.mul_i64(3168)
        + t2.sqr().mul_i64(112)
        + t2.pow_u(3).mul_i64(128);
    let konst = ((&t + &Ball::from_i64(2, prec)).pow_u(16).mul_i64(32) * poly).ln();
    Ok((unit.clone(), unit, konst))
}

/// `18 * 4! * 3^4 * (32 d)^5 * h1 h2 h3 * log(6 d)` for three logarithms over a field of degree `d`.
pub fn bw_constant(h1: &Ball, h2: &Ball, h3: &Ball, degree: i64, prec: u32) -> Ball {
    let d = Ball::from_i64(degree, prec);
    let lead = Ball::from_i64(18 * 24 * 81, prec) * d.mul_i64(32).pow_u(5);
    lead * h1 * h2 * h3 * d.mul_i64(6).ln()
}

fn bw_caps() -> (Integer, Integer) {
    (
        Integer::from(67) * Integer::from(Integer::u_pow_u(10, 35)),
        Integer::from(1715) * Integer::from(Integer::u_pow_u(10, 34)),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct BwBounds {
    pub constant: Ball,
    pub constant_below_8_6e34: bool,
    pub m_ratio: Ball,
    pub n_ratio: Ball,
    pub m_max: String,
    pub n_max: String,
    /// `m / log m` at `m_max` already exceeds `K / log 3`.
    pub m_cap_certified: bool,
    /// `n / log n` at `n_max` already exceeds `K / log 1.55`.
    pub n_cap_certified: bool,
}

impl BwBounds {
    pub fn m_max_int(&self) -> Integer {
        bw_caps().0
    }

    pub fn n_max_int(&self) -> Integer {
        bw_caps().1
    }
}

/// Recomputes the uniform constant and certifies the two index caps.
///
/// `x / log x` increases for `x > e`, so failure at the cap means failure beyond it.
pub fn bw_global_bounds(prec: u32) -> BwBounds {
    let hu = Ball::from_ratio(HEIGHT_CAP_UNIT.0, HEIGHT_CAP_UNIT.1, prec);
    let hc = Ball::from_ratio(HEIGHT_CAP_CONST.0, HEIGHT_CAP_CONST.1, prec);
    let k = bw_constant(&hu, &hu, &hc, FIELD_DEGREE, prec);
    let limit = Ball::from_ratio(86, 1, prec) * Ball::from_i64(10, prec).pow_u(33);
    let m_ratio = &k / &Ball::from_i64(3, prec).ln();
    let n_ratio = &k / &Ball::from_ratio(31, 20, prec).ln();
    let (m_max, n_max) = bw_caps();
    let at = |x: &Integer| {
        let b = Ball::from_integer(x, prec);
        &b / &b.ln()
    };
    BwBounds {
        constant_below_8_6e34: k.certainly_lt(&limit),
        m_cap_certified: at(&m_max).certainly_gt(&m_ratio),
        n_cap_certified: at(&n_max).certainly_gt(&n_ratio),
        constant: k,
        m_ratio,
        n_ratio,
        m_max: m_max.to_string(),
        n_max: n_max.to_string(),
    }
}

/// Per-`c` constant from the per-`c` height bounds (each at least `1/d`).
pub fn bw_constant_for(c_abs: &Modulus, prec: u32) -> Result<Ball> {
    let (h1, h2, h3) = height_bounds(c_abs, prec)?;
    let floor = Ball::from_ratio(1, FIELD_DEGREE, prec);
    Ok(bw_constant(
        &h1.max(&floor),
        &h2.max(&floor),
        &h3.max(&floor),
        FIELD_DEGREE,
        prec,
    ))
}
