//! The simultaneous Pellian system `cV^2 - (c+2)U^2 = -2mu`, `(c-2)U^2 - cZ^2 = -2mu`
//! and the four recurrence sequences that parametrise its solutions.

use std::cmp::Ordering;

use rug::Integer;
use serde::Serialize;

use crate::ball::{Ball, ComplexBall, Modulus};
use crate::error::{Error, Result};
use crate::ring::{QuadInt, RingSpec, UnitRoot};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MuEps {
    pub mu: QuadInt,
    pub eps: QuadInt,
}

/// Pairs `(mu, eps)` with `eps^2 = mu` and `eps` in the ring.
pub fn admissible_mu_eps(ring: &RingSpec) -> Vec<MuEps> {
    let mut out = vec![MuEps {
        mu: ring.one(),
        eps: ring.one(),
    }];
    let unit = |t: UnitRoot| t.to_quadint(ring).unwrap();
    match ring.d() {
        1 => out.push(MuEps {
            mu: ring.int(-1),
            eps: unit(UnitRoot::I),
        }),
        3 => {
            out.push(MuEps {
                mu: unit(UnitRoot::Omega),
                eps: unit(UnitRoot::OmegaSq),
            });
            out.push(MuEps {
                mu: unit(UnitRoot::OmegaSq),
                eps: unit(UnitRoot::Omega),
            });
        }
        _ => {}
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SeqKind {
    /// `u_m`: `eps, eps(2c+1)`, multiplier `2c+2`.
    UPlus,
    /// `v_m`: `eps, eps(2c+3)`, multiplier `2c+2`.
    VPlus,
    /// `u'_n`: `eps, eps(2c-1)`, multiplier `2c-2`.
    UMinus,
    /// `z_n`: `eps, eps(2c-3)`, multiplier `2c-2`.
    ZMinus,
}

impl SeqKind {
    fn shifts(self) -> (i64, i64) {
        // (offset in the first term, offset in the multiplier), both relative to 2c
        match self {
            SeqKind::UPlus => (1, 2),
            SeqKind::VPlus => (3, 2),
            SeqKind::UMinus => (-1, -2),
            SeqKind::ZMinus => (-3, -2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqState {
    pub kind: SeqKind,
    pub index: u64,
    pub current: QuadInt,
    pub previous: QuadInt,
    multiplier: QuadInt,
}

impl SeqState {
    /// State at index 0; `previous` holds the term at index -1.
    pub fn start(kind: SeqKind, c: &QuadInt, eps: &QuadInt) -> SeqState {
        let ring = *c.ring();
        let (first, mult) = kind.shifts();
        let two_c = c.mul_i64(2);
        let multiplier = &two_c + &ring.int(mult);
        let x1 = eps * &(&two_c + &ring.int(first));
        let previous = &(&multiplier * eps) - &x1;
        SeqState {
            kind,
            index: 0,
            current: eps.clone(),
            previous,
            multiplier,
        }
    }

    pub fn advance(&self) -> SeqState {
        let next = &(&self.multiplier * &self.current) - &self.previous;
        SeqState {
            kind: self.kind,
            index: self.index + 1,
            current: next,
            previous: self.current.clone(),
            multiplier: self.multiplier.clone(),
        }
    }

    pub fn multiplier(&self) -> &QuadInt {
        &self.multiplier
    }
}

/// Terms `0..=n` of a sequence.
pub fn seq_terms(kind: SeqKind, c: &QuadInt, eps: &QuadInt, n: u64) -> Vec<QuadInt> {
    let mut s = SeqState::start(kind, c, eps);
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(s.current.clone());
    for _ in 0..n {
        s = s.advance();
        out.push(s.current.clone());
    }
    out
}

fn nth(kind: SeqKind, c: &QuadInt, eps: &QuadInt, n: u64) -> QuadInt {
    let mut s = SeqState::start(kind, c, eps);
    for _ in 0..n {
        s = s.advance();
    }
    s.current
}

pub fn u_seq(c: &QuadInt, eps: &QuadInt, m: u64) -> QuadInt {
    nth(SeqKind::UPlus, c, eps, m)
}

pub fn v_seq(c: &QuadInt, eps: &QuadInt, m: u64) -> QuadInt {
    nth(SeqKind::VPlus, c, eps, m)
}

pub fn uprime_seq(c: &QuadInt, eps: &QuadInt, n: u64) -> QuadInt {
    nth(SeqKind::UMinus, c, eps, n)
}

pub fn z_seq(c: &QuadInt, eps: &QuadInt, n: u64) -> QuadInt {
    nth(SeqKind::ZMinus, c, eps, n)
}

/// `cV^2 - (c+2)U^2 + 2mu`.
pub fn pell_residual_1(u: &QuadInt, v: &QuadInt, c: &QuadInt, mu: &QuadInt) -> QuadInt {
    let ring = *c.ring();
    &(&(c * &(v * v)) - &(&(c + &ring.int(2)) * &(u * u))) + &mu.mul_i64(2)
}

/// `(c-2)U^2 - cZ^2 + 2mu`.
pub fn pell_residual_2(u: &QuadInt, z: &QuadInt, c: &QuadInt, mu: &QuadInt) -> QuadInt {
    let ring = *c.ring();
    &(&(&(c - &ring.int(2)) * &(u * u)) - &(c * &(z * z))) + &mu.mul_i64(2)
}

fn closed_form(c: &QuadInt, eps: &QuadInt, n: u64, shift: i64, prec: u32) -> Result<ComplexBall> {
    if c.re_sign() == Ordering::Less {
        return Err(Error::Domain(format!(
            "closed form needs Re(c) >= 0, got c = {c}"
        )));
    }
    let ring = *c.ring();
    if c.is_zero() || (c + &ring.int(2 * shift)).is_zero() {
        return Err(Error::Domain(format!("closed form degenerates at c = {c}")));
    }
    let n32 = u32::try_from(n).map_err(|_| Error::Domain("index too large".into()))?;
    let cb = c.embed(prec);
    let disc = &cb * &(c + &ring.int(2 * shift)).embed(prec);
    // the expression is symmetric in the sign of the root, so any branch will do
    let r = disc.any_sqrt()?;
    let base_shift = ComplexBall::from_i64(shift, prec);
    let b_plus = &(&cb + &base_shift) + &r;
    let b_minus = &(&cb + &base_shift) - &r;
    let num = &(&(&cb + &r) * &b_plus.pow_u(n32)) - &(&(&cb - &r) * &b_minus.pow_u(n32));
    let den = r.mul_i64(2);
    if !den.certainly_nonzero() {
        return Err(Error::precision("closed-form denominator", prec));
    }
    Ok(&eps.embed(prec) * &(&num / &den))
}

/// Closed form of `u_m`, checked against the recurrence.
pub fn closed_form_u(c: &QuadInt, eps: &QuadInt, m: u64, prec: u32) -> Result<ComplexBall> {
    let ball = closed_form(c, eps, m, 1, prec)?;
    let exact = u_seq(c, eps, m).embed(prec);
    if !ball.overlaps(&exact) {
        if !ball.is_finite() {
            return Err(Error::precision("closed form of u_m", prec));
        }
        return Err(Error::Anomaly(format!(
            "closed form of u_{m} at c = {c} misses the recurrence value"
        )));
    }
    Ok(ball)
}

/// Closed form of `u'_n`, checked against the recurrence.
pub fn closed_form_uprime(c: &QuadInt, eps: &QuadInt, n: u64, prec: u32) -> Result<ComplexBall> {
    let ball = closed_form(c, eps, n, -1, prec)?;
    let exact = uprime_seq(c, eps, n).embed(prec);
    if !ball.overlaps(&exact) {
        if !ball.is_finite() {
            return Err(Error::precision("closed form of u'_n", prec));
        }
        return Err(Error::Anomaly(format!(
            "closed form of u'_{n} at c = {c} misses the recurrence value"
        )));
    }
    Ok(ball)
}

/// Exact comparison of `d` with `q * sqrt(n)`.
fn cmp_surd(d: &Integer, q: &Integer, n: &Integer) -> Ordering {
    let sd = d.cmp0();
    let sq = if *n == 0 { Ordering::Equal } else { q.cmp0() };
    if sd != sq {
        return sd.cmp(&sq);
    }
    let lhs = Integer::from(d.square_ref());
    let rhs = Integer::from(q.square_ref()) * n;
    match sd {
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater => lhs.cmp(&rhs),
        Ordering::Less => rhs.cmp(&lhs),
    }
}

/// `(a + b sqrt(n))^k` as `(p, q)` meaning `p + q sqrt(n)`.
fn surd_pow(a: &Integer, b: &Integer, n: &Integer, k: u64) -> (Integer, Integer) {
    let mut p = Integer::from(1);
    let mut q = Integer::new();
    for _ in 0..k {
        let np = Integer::from(&p * a) + Integer::from(&q * b) * n;
        let nq = Integer::from(&p * b) + Integer::from(&q * a);
        p = np;
        q = nq;
    }
    (p, q)
}

/// Checks `(2|c|-3)^k <= |x_k| <= (2|c|+3)^k` for `k <= n_max`, exactly.
pub fn growth_bounds_check(c: &QuadInt, eps: &QuadInt, kind: SeqKind, n_max: u64) -> Result<bool> {
    if !matches!(kind, SeqKind::UPlus | SeqKind::UMinus) {
        return Err(Error::Inapplicable(format!(
            "growth bounds are stated for u and u' only, not {kind:?}"
        )));
    }
    let n = c.norm();
    if n < 4 {
        return Err(Error::Domain(format!(
            "growth bounds need |c| >= 2, got c = {c}"
        )));
    }
    let terms = seq_terms(kind, c, eps, n_max);
    for (k, x) in terms.iter().enumerate() {
        let nx = x.norm();
        // squared bounds: (2s -+ 3)^(2k) with s = sqrt(N(c))
        let (lp, lq) = surd_pow(&Integer::from(-3), &Integer::from(2), &n, 2 * k as u64);
        let (hp, hq) = surd_pow(&Integer::from(3), &Integer::from(2), &n, 2 * k as u64);
        let above_low = cmp_surd(&Integer::from(&nx - &lp), &lq, &n) != Ordering::Less;
        let below_high = cmp_surd(&Integer::from(&nx - &hp), &hq, &n) != Ordering::Greater;
        if !above_low || !below_high {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `eps(1 + m(m+1)c)`.
pub fn congruence_residue_u(m: u64, c: &QuadInt, eps: &QuadInt) -> QuadInt {
    let ring = *c.ring();
    let k = Integer::from(m) * (m + 1);
    eps * &(&ring.one() + &c.mul_int(&k))
}

/// `(-1)^n eps(1 - n(n+1)c)`.
pub fn congruence_residue_uprime(n: u64, c: &QuadInt, eps: &QuadInt) -> QuadInt {
    let ring = *c.ring();
    let k = Integer::from(n) * (n + 1);
    let r = eps * &(&ring.one() - &c.mul_int(&k));
    if n % 2 == 1 {
        -r
    } else {
        r
    }
}

/// `4c^2`, the modulus of the congruences.
pub fn congruence_modulus(c: &QuadInt) -> QuadInt {
    (c * c).mul_i64(4)
}

fn require_outside_sc(c: &QuadInt) -> Result<()> {
    if c.in_sc() {
        return Err(Error::Inapplicable(format!(
            "c = {c} lies in the exceptional set"
        )));
    }
    Ok(())
}

/// `sqrt(2|c| + 1/4) - 1/2`: any intersection `u_m = +-u'_n` other than `m = n = 0`
/// has `m` or `n` at least this large.
pub fn min_nontrivial_index(c: &QuadInt, prec: u32) -> Result<Ball> {
    require_outside_sc(c)?;
    Ok(index_bound_ball(&c.modulus(), prec))
}

fn index_bound_ball(c_abs: &Modulus, prec: u32) -> Ball {
    let quarter = Ball::from_ratio(1, 4, prec);
    let half = Ball::from_ratio(1, 2, prec);
    (&c_abs.ball(prec).mul_i64(2) + &quarter).sqrt() - half
}

/// `(2|c| - 3)^(sqrt(2|c| + 1/4) - 1/2)`, a lower bound for `|U|` when `U != +-eps`.
pub fn lower_bound_u(c: &QuadInt, prec: u32) -> Result<Ball> {
    require_outside_sc(c)?;
    let m = c.modulus();
    if m.cmp_i64(2) == Ordering::Less {
        return Err(Error::Domain(format!(
            "the bound needs |c| >= 2, got c = {c}"
        )));
    }
    Ok(lower_bound_u_abs(&m, prec))
}

/// The same bound as a function of `|c| >= 2` alone.
pub fn lower_bound_u_abs(c_abs: &Modulus, prec: u32) -> Ball {
    let base = c_abs.ball(prec).mul_i64(2) - Ball::from_i64(3, prec);
    let e = index_bound_ball(c_abs, prec);
    if base.lo() <= &1 && base.hi() >= &1 && base.is_point() {
        return Ball::one(prec);
    }
    base.powf(&e)
}

/// `log` of [`lower_bound_u_abs`], i.e. `(sqrt(2|c|+1/4) - 1/2) log(2|c| - 3)`.
pub fn log_lower_bound_u_abs(c_abs: &Modulus, prec: u32) -> Ball {
    let base = c_abs.ball(prec).mul_i64(2) - Ball::from_i64(3, prec);
    index_bound_ball(c_abs, prec) * base.ln()
}
