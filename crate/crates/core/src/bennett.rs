//! Simultaneous-approximation upper bound for `|U|` and the resulting closure
//! of all parameters with `|c| >= 159108`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::ball::{with_adaptive_prec, Ball, Modulus};
use crate::error::{Error, Result};
use crate::forms::{pq_from_uvz, thue_lhs, QuarticParams};
use crate::pell::{admissible_mu_eps, log_lower_bound_u_abs, pell_residual_1, pell_residual_2};
use crate::ring::{QuadInt, RingSpec};

/// Smallest `|c|` closed by the approximation argument.
pub const LARGE_C: i64 = 159_108;
/// Smallest integer `t` with `2 - lambda(t) > 0`.
pub const LAMBDA_WINDOW: i64 = 155_352;
/// Smallest `|c|` for which the approximation theorem's `L > 1`.
pub const L_ABOVE_ONE: i64 = 15;

#[derive(Clone, Debug, Serialize)]
pub struct BennettReport {
    pub c_abs: String,
    pub c_abs_ball: Ball,
    pub l: Ball,
    #[serde(rename = "L")]
    pub big_l: Ball,
    pub p_small: Ball,
    #[serde(rename = "P_big")]
    pub big_p: Ball,
    pub lambda: Ball,
    pub c_inv: Ball,
    pub theorem_applicable: bool,
    pub two_minus_lambda: Ball,
    pub two_minus_lambda_positive: bool,
    #[serde(rename = "upper_log_U")]
    pub upper_log_u: Option<Ball>,
    #[serde(rename = "lower_log_U")]
    pub lower_log_u: Ball,
    pub excludes_nontrivial: bool,
}

fn require_above_two(c_abs: &Modulus) -> Result<()> {
    if c_abs.cmp_i64(2) != Ordering::Greater {
        return Err(Error::Domain(format!("needs |c| > 2, got |c| = {c_abs}")));
    }
    Ok(())
}

/// `2 - lambda(t) = 1 - log(1024(t+3)) / log(27/4096 (t-2)^2)`.
pub fn two_minus_lambda(t: &Ball) -> Ball {
    let prec = t.prec();
    let num = (t + &Ball::from_i64(3, prec)).mul_i64(1024).ln();
    let den = (Ball::from_ratio(27, 4096, prec) * (t - &Ball::from_i64(2, prec)).sqr()).ln();
    Ball::one(prec) - num / den
}

/// Every quantity of the approximation theorem at `|c|`, plus the comparison of
/// the resulting upper bound for `log |U|` with the congruence lower bound.
pub fn bennett_params(c_abs: &Modulus, prec: u32) -> Result<BennettReport> {
    require_above_two(c_abs)?;
    let t = c_abs.ball(prec);
    let two = Ball::from_i64(2, prec);
    let three = Ball::from_i64(3, prec);
    let tm2 = &t - &two;
    let tp3 = &t + &three;

    let l = Ball::from_ratio(27, 64, prec) * &t / &tm2;
    let big_l = Ball::from_ratio(27, 4096, prec) * tm2.sqr();
    let p_small = (&tp3 / &tm2).sqrt();
    let big_p = tp3.mul_i64(1024);
    let lambda = Ball::one(prec) + big_p.ln() / big_l.ln();
    let two_l = l.mul_i64(2);
    let factor = two_l
        .max(&Ball::one(prec))
        .powf(&(&lambda - &Ball::one(prec)));
    let c_inv = (&p_small * &big_p).mul_i64(4) * factor;

    let theorem_applicable =
        c_abs.cmp_i64(L_ABOVE_ONE) != Ordering::Less && big_l.certainly_gt(&Ball::one(prec));
    let tml = two_minus_lambda(&t);
    let two_minus_lambda_positive = tml.certainly_pos();
    let upper_log_u = if theorem_applicable && two_minus_lambda_positive {
        let inner = c_inv.mul_i64(2) / (&t * &tm2).sqrt();
        Some(inner.ln() / tml.clone())
    } else {
        None
    };
    let lower_log_u = log_lower_bound_u_abs(c_abs, prec);
    let excludes_nontrivial = upper_log_u
        .as_ref()
        .is_some_and(|up| up.certainly_lt(&lower_log_u));
    Ok(BennettReport {
        c_abs: c_abs.to_string(),
        c_abs_ball: t,
        l,
        big_l,
        p_small,
        big_p,
        lambda,
        c_inv,
        theorem_applicable,
        two_minus_lambda: tml,
        two_minus_lambda_positive,
        upper_log_u,
        lower_log_u,
        excludes_nontrivial,
    })
}

/// `2 / sqrt(|c|(|c|-2)) * |U|^-2`.
pub fn approximation_bound(c_abs: &Modulus, u_abs: &Modulus, prec: u32) -> Result<Ball> {
    require_above_two(c_abs)?;
    if u_abs.sq().cmp0() == Ordering::Equal {
        return Err(Error::Domain("U must be nonzero".into()));
    }
    let t = c_abs.ball(prec);
    let root = (&t * &(&t - &Ball::from_i64(2, prec))).sqrt();
    Ok(Ball::from_i64(2, prec) / root / Ball::from_rational(u_abs.sq(), prec))
}

/// Whether only the trivial solutions survive at `|c|`, decided with adaptive precision.
pub fn resolve_large_c(c_abs: &Modulus) -> Result<bool> {
    require_above_two(c_abs)?;
    if c_abs.cmp_i64(L_ABOVE_ONE) == Ordering::Less {
        return Ok(false);
    }
    with_adaptive_prec(128, |prec| {
        let rep = bennett_params(c_abs, prec)?;
        if !rep.two_minus_lambda.certainly_nonzero() {
            return Err(Error::precision("sign of 2 - lambda", prec));
        }
        if !rep.two_minus_lambda_positive {
            return Ok(false);
        }
        let up = rep.upper_log_u.as_ref().expect("window is open");
        match up.cmp_certified(&rep.lower_log_u) {
            Some(Ordering::Less) => Ok(true),
            Some(_) => Ok(false),
            None => Err(Error::precision("comparison of the log |U| bounds", prec)),
        }
    })
}

fn eps_for(ring: &RingSpec, mu: &QuadInt) -> Result<QuadInt> {
    admissible_mu_eps(ring)
        .into_iter()
        .find(|p| &p.mu == mu)
        .map(|p| p.eps)
        .ok_or_else(|| Error::Inapplicable(format!("mu = {mu} is not admissible in {ring}")))
}

/// The eight triples `(+-eps, +-eps, +-eps)`, each checked against both Pell relations.
pub fn trivial_solution_set(
    ring: &RingSpec,
    mu: &QuadInt,
) -> Result<Vec<(QuadInt, QuadInt, QuadInt)>> {
    let eps = eps_for(ring, mu)?;
    let signs = [eps.clone(), -eps.clone()];
    let mut out = Vec::with_capacity(8);
    for u in &signs {
        for v in &signs {
            for z in &signs {
                // the residuals are affine in c, so vanishing at c = 0 and c = 1 covers every c
                for c in [ring.zero(), ring.one()] {
                    if !pell_residual_1(u, v, &c, mu).is_zero()
                        || !pell_residual_2(u, z, &c, mu).is_zero()
                    {
                        return Err(Error::Anomaly(format!(
                            "({u}, {v}, {z}) fails the Pell system"
                        )));
                    }
                }
                out.push((u.clone(), v.clone(), z.clone()));
            }
        }
    }
    Ok(out)
}

/// Every `(p, q)` with `thue(p, q) = mu` whose `(U, V, Z)` lies among the given triples.
pub fn thue_from_triples(
    params: &QuarticParams,
    mu: &QuadInt,
    triples: &[(QuadInt, QuadInt, QuadInt)],
) -> Vec<(QuadInt, QuadInt)> {
    let mut out = Vec::new();
    for (u, v, z) in triples {
        for pq in pq_from_uvz(u, v, z) {
            if &thue_lhs(&pq.0, &pq.1, params) == mu && !out.contains(&pq) {
                out.push(pq);
            }
        }
    }
    out.sort();
    out
}

/// All solutions of the Thue equation `thue(p, q) = mu` when `|c| >= 159108` and `c` is not exceptional.
pub fn thue_solutions_large_c(c: &QuadInt, mu: &QuadInt) -> Result<Vec<(QuadInt, QuadInt)>> {
    if c.in_sc() {
        return Err(Error::Inapplicable(format!(
            "c = {c} lies in the exceptional set"
        )));
    }
    if c.modulus().cmp_i64(LARGE_C) == Ordering::Less {
        return Err(Error::Inapplicable(format!("|c| < {LARGE_C} for c = {c}")));
    }
    let ring = *c.ring();
    let params = QuarticParams::new(c.clone())?;
    if !mu.is_unit() {
        return Err(Error::Domain(format!("mu = {mu} is not a unit")));
    }
    let triples = match trivial_solution_set(&ring, mu) {
        Ok(t) => t,
        // no admissible eps: the Pell system has no solutions at all
        Err(Error::Inapplicable(_)) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    Ok(thue_from_triples(&params, mu, &triples))
}
