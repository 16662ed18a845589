//! Continued-fraction reduction of the astronomically large index bounds.

use std::cmp::Ordering;

use rug::{float::Round, Integer, Rational};
use serde::Serialize;

use crate::ball::{Ball, MAX_PREC};
use crate::error::{Error, Result};
use crate::linforms::{BwBounds, LinFormInstance};
use crate::pell::{seq_terms, SeqKind};
use crate::ring::QuadInt;

/// Partial quotients tried per round before raising precision.
pub const CONVERGENT_ATTEMPTS: usize = 10;
pub const START_PREC: u32 = 512;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    #[serde(serialize_with = "ser_int")]
    pub p: Integer,
    #[serde(serialize_with = "ser_int")]
    pub q: Integer,
    pub index: usize,
}

fn ser_int<S: serde::Serializer>(v: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Certified partial quotients of `theta`, continued until some convergent has `q > q_min`
/// and then for `extra` more convergents. Returns the quotients and every convergent seen.
pub fn cf_convergents(
    theta: &Ball,
    q_min: &Integer,
    extra: usize,
) -> Result<(Vec<Integer>, Vec<Convergent>)> {
    let prec = theta.prec();
    let mut x = theta.clone();
    let mut quotients = Vec::new();
    let mut convs: Vec<Convergent> = Vec::new();
    let (mut p_prev, mut q_prev) = (Integer::from(0), Integer::from(1));
    let (mut p_cur, mut q_cur) = (Integer::from(1), Integer::from(0));
    let mut beyond = 0usize;
    loop {
        let a = x
            .floor_certified()
            .ok_or_else(|| Error::precision("partial quotient", prec))?;
        let p_next = Integer::from(&a * &p_cur) + &p_prev;
        let q_next = Integer::from(&a * &q_cur) + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        convs.push(Convergent {
            p: p_cur.clone(),
            q: q_cur.clone(),
            index: quotients.len(),
        });
        let frac = &x - &Ball::from_integer(&a, prec);
        quotients.push(a);
        if q_cur > *q_min {
            if beyond == extra {
                return Ok((quotients, convs));
            }
            beyond += 1;
        }
        if frac.is_point() && frac.contains_zero() {
            return Err(Error::Domain(
                "theta is rational: the expansion terminates".into(),
            ));
        }
        if !frac.certainly_pos() {
            return Err(Error::precision("partial quotient", prec));
        }
        x = frac.recip();
    }
}

/// First convergent of `theta` whose denominator exceeds `q_min`.
pub fn cf_expand(theta: &Ball, q_min: &Integer) -> Result<Convergent> {
    let (_, convs) = cf_convergents(theta, q_min, 0)?;
    Ok(convs.last().cloned().expect("at least one convergent"))
}

/// Value of `[a0; a1, ..., ak]` as an exact rational.
pub fn cf_value(quotients: &[Integer]) -> Rational {
    let mut it = quotients.iter().rev();
    let Some(last) = it.next() else {
        return Rational::new();
    };
    let mut acc = Rational::from(last);
    for a in it {
        acc = Rational::from(a) + acc.recip();
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionStep {
    pub q: String,
    pub eps_hat: Ball,
    pub new_bound: Option<String>,
}

fn nearest_distance(x: &Ball, what: &str) -> Result<Ball> {
    x.nearest_int()
        .map(|(_, d)| d)
        .ok_or_else(|| Error::precision(what, x.prec()))
}

/// One application of the convergent lemma: with `eps = ||gamma q|| - M ||theta q||`,
/// no solution of `|m theta - n + gamma| < delta a^-m` has `log(delta q/eps)/log a <= m <= M`.
/// `new_bound` is `None` when `eps` is not certifiably positive.
pub fn reduction_step(
    theta: &Ball,
    gamma: &Ball,
    delta: &Ball,
    a: &Rational,
    m_bound: &Integer,
    conv: &Convergent,
) -> Result<ReductionStep> {
    if conv.q <= Integer::from(m_bound * 6u32) {
        return Err(Error::Contract(format!(
            "convergent denominator {} is not above 6M",
            conv.q
        )));
    }
    if *a <= 1 {
        return Err(Error::Contract("the base a must exceed 1".into()));
    }
    let prec = theta.prec();
    let q = Ball::from_integer(&conv.q, prec);
    let dg = nearest_distance(&(gamma * &q), "||gamma q||")?;
    let dt = nearest_distance(&(theta * &q), "||theta q||")?;
    let eps_hat = dg - dt * Ball::from_integer(m_bound, prec);
    let new_bound = if eps_hat.certainly_pos() {
        let l = (delta * &q / eps_hat.clone()).ln() / Ball::from_rational(a, prec).ln();
        if !l.is_finite() {
            return Err(Error::precision("reduced bound", prec));
        }
        // every excluded m satisfies m < l, so the floor of the upper end is a safe bound
        let b = l
            .hi()
            .to_integer_round(Round::Down)
            .map(|(i, _)| i)
            .unwrap_or_default();
        Some(b.min(m_bound.clone()).max(Integer::new()))
    } else {
        None
    };
    Ok(ReductionStep {
        q: conv.q.to_string(),
        eps_hat,
        new_bound: new_bound.map(|b| b.to_string()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Instance {
    /// `|m theta - n + gamma| < delta 3^-m` for `m >= n`.
    Ineq333,
    /// `|n theta' - m + gamma'| < delta' 1.55^-n` for `n >= m`.
    Ineq155,
}

impl Instance {
    pub fn base(self) -> Rational {
        match self {
            Instance::Ineq333 => Rational::from(3),
            Instance::Ineq155 => Rational::from((31, 20)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ReductionStatus {
    Reduced,
    EpsilonNonpositive,
    PrecisionExhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionOutcome {
    pub c: QuadInt,
    pub instance: Instance,
    pub steps: Vec<ReductionStep>,
    pub final_bound: String,
    pub status: ReductionStatus,
    pub prec_bits: u32,
    #[serde(skip)]
    bound: Integer,
}

impl ReductionOutcome {
    pub fn final_bound_int(&self) -> &Integer {
        &self.bound
    }
}

/// `(theta, gamma, delta)` for one instance.
pub fn instance_data(inst: &LinFormInstance, which: Instance) -> (Ball, Ball, Ball) {
    let le = inst.log_eta();
    let lt = inst.log_vartheta();
    let lx = inst.log_xi();
    match which {
        Instance::Ineq333 => (&lt / &le, -(&lx / &le), le.abs().recip()),
        Instance::Ineq155 => (&le / &lt, &lx / &lt, lt.abs().recip()),
    }
}

enum Round1 {
    Improved(ReductionStep, Integer),
    NoImprovement(Vec<ReductionStep>),
}

/// One reduction round at `prec`: tries convergents past `6M`, skipping the first `skip`.
fn reduction_round(
    c: &QuadInt,
    which: Instance,
    m_bound: &Integer,
    skip: usize,
    prec: u32,
) -> Result<Round1> {
    let inst = LinFormInstance::new(c, prec)?;
    let (theta, gamma, delta) = instance_data(&inst, which);
    let q_min = Integer::from(m_bound * 6u32);
    let (_, convs) = cf_convergents(&theta, &q_min, skip + CONVERGENT_ATTEMPTS - 1)?;
    let first = convs
        .iter()
        .position(|cv| cv.q > q_min)
        .expect("expansion reached q_min");
    let mut tried = Vec::new();
    for conv in convs[first..].iter().skip(skip) {
        let step = reduction_step(&theta, &gamma, &delta, &which.base(), m_bound, conv)?;
        if let Some(b) = &step.new_bound {
            let b: Integer = b.parse().expect("decimal integer");
            if b < *m_bound {
                return Ok(Round1::Improved(step, b));
            }
        }
        tried.push(step);
    }
    Ok(Round1::NoImprovement(tried))
}

fn reduce_instance(
    c: &QuadInt,
    which: Instance,
    cap: &Integer,
    schedule: &[u32],
) -> Result<ReductionOutcome> {
    let mut bound = cap.clone();
    let mut steps = Vec::new();
    let mut misses = 0usize;
    let mut skip = 0usize;
    let mut status = ReductionStatus::Reduced;
    let mut used_prec = schedule.first().copied().unwrap_or(START_PREC);
    while misses < 2 {
        let mut result = None;
        for &prec in schedule {
            used_prec = prec;
            match reduction_round(c, which, &bound, skip, prec) {
                Err(e) if e.is_precision() => continue,
                Err(e) => return Err(e),
                Ok(Round1::NoImprovement(_))
                    if prec != *schedule.last().unwrap() && steps.is_empty() =>
                {
                    continue
                }
                Ok(r) => {
                    result = Some(r);
                    break;
                }
            }
        }
        match result {
            None => {
                if steps.is_empty() {
                    status = ReductionStatus::PrecisionExhausted;
                }
                break;
            }
            Some(Round1::Improved(step, b)) => {
                steps.push(step);
                bound = b;
                misses = 0;
                skip = 0;
            }
            Some(Round1::NoImprovement(tried)) => {
                if steps.is_empty() {
                    status = ReductionStatus::EpsilonNonpositive;
                    steps.extend(tried);
                    break;
                }
                misses += 1;
                skip += CONVERGENT_ATTEMPTS;
            }
        }
    }
    Ok(ReductionOutcome {
        c: c.clone(),
        instance: which,
        steps,
        final_bound: bound.to_string(),
        status,
        prec_bits: used_prec,
        bound,
    })
}

/// The default precision schedule: 512 bits, doubling up to the global cap.
pub fn default_schedule() -> Vec<u32> {
    let mut out = vec![START_PREC];
    while *out.last().unwrap() < MAX_PREC {
        out.push(out.last().unwrap() * 2);
    }
    out
}

/// Both reductions for `c` with `Re(c) > 0`, starting from the global caps and iterating
/// until two rounds in a row bring no improvement.
pub fn reduce_for_c(
    c: &QuadInt,
    bw: &BwBounds,
    schedule: &[u32],
) -> Result<(ReductionOutcome, ReductionOutcome)> {
    if c.re_sign() != Ordering::Greater {
        return Err(Error::Domain(format!(
            "reduction needs Re(c) > 0, got c = {c}"
        )));
    }
    if c.in_sc() {
        return Err(Error::Inapplicable(format!(
            "c = {c} lies in the exceptional set"
        )));
    }
    if c.norm() < 2 {
        return Err(Error::Domain(format!(
            "reduction needs |c| >= sqrt 2, got c = {c}"
        )));
    }
    if schedule.is_empty() {
        return Err(Error::Contract("empty precision schedule".into()));
    }
    let a = reduce_instance(c, Instance::Ineq333, &bw.m_max_int(), schedule)?;
    let b = reduce_instance(c, Instance::Ineq155, &bw.n_max_int(), schedule)?;
    Ok((a, b))
}

/// All `(m, n, sign)` with `1 <= m <= m_max`, `1 <= n <= n_max` and `u_m = sign * u'_n` (taking `eps = 1`).
pub fn finish_small_indices(c: &QuadInt, m_max: u64, n_max: u64) -> Vec<(u64, u64, i8)> {
    intersections(c, 1, m_max, n_max)
}

/// Intersections with `m = 0` or `n = 0` other than `m = n = 0`, up to the same limits.
pub fn zero_index_hits(c: &QuadInt, m_max: u64, n_max: u64) -> Vec<(u64, u64, i8)> {
    intersections(c, 0, m_max, n_max)
        .into_iter()
        .filter(|&(m, n, _)| (m == 0) != (n == 0))
        .collect()
}

fn intersections(c: &QuadInt, from: u64, m_max: u64, n_max: u64) -> Vec<(u64, u64, i8)> {
    let one = c.ring().one();
    let us = seq_terms(SeqKind::UPlus, c, &one, m_max);
    let ups = seq_terms(SeqKind::UMinus, c, &one, n_max);
    let mut out = Vec::new();
    for (m, u) in us.iter().enumerate().skip(from as usize) {
        for (n, up) in ups.iter().enumerate().skip(from as usize) {
            if u == up {
                out.push((m as u64, n as u64, 1));
            } else if *u == -up.clone() {
                out.push((m as u64, n as u64, -1));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linforms::bw_global_bounds;
    use crate::ring::RingSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(d: u64) -> RingSpec {
        RingSpec::new(d).unwrap()
    }

    #[test]
    fn golden_ratio_convergent() {
        let p = 256;
        let theta = (Ball::from_i64(5, p).sqrt() - Ball::one(p)) / Ball::from_i64(2, p);
        let conv = cf_expand(&theta, &Integer::from(10)).unwrap();
        assert_eq!((conv.p.to_i64(), conv.q.to_i64()), (Some(8), Some(13)));
    }

    #[test]
    fn rational_input_terminates() {
        let half = Ball::from_ratio(1, 2, 128);
        assert!(matches!(
            cf_expand(&half, &Integer::from(10)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cf_reconstruction_encloses_theta() {
        let p = 512;
        let theta = Ball::from_i64(2, p).sqrt() + Ball::from_i64(3, p).ln();
        let (qs, convs) = cf_convergents(&theta, &Integer::from(10u64.pow(15)), 0).unwrap();
        let approx = cf_value(&qs);
        let last = convs.last().unwrap();
        assert_eq!(approx, Rational::from((last.p.clone(), last.q.clone())));
        // the true value lies between consecutive convergents
        let prev = &convs[convs.len() - 2];
        let a = Rational::from((prev.p.clone(), prev.q.clone()));
        let mid = theta.mid().to_rational().unwrap();
        assert!((mid.clone() - &a) * (mid - &approx) <= 0);
        for w in convs.windows(2) {
            // q_0 = q_1 = 1 when a_1 = 1; strictly increasing afterwards
            assert!(w[1].q > w[0].q || w[1].index == 1);
            assert_eq!(Integer::from(w[1].p.gcd_ref(&w[1].q)), 1);
        }
    }

    #[test]
    fn paper_theta_and_first_convergent() {
        let c = r(2).ab(1, 66);
        let inst = LinFormInstance::new(&c, 512).unwrap();
        let (theta, _, _) = instance_data(&inst, Instance::Ineq333);
        assert!(theta.certainly_lt(&Ball::from_ratio(1_000_044, 1_000_000, 512)));
        assert!(theta.certainly_gt(&Ball::one(512)));
        let conv = cf_expand(&theta, &Integer::from(1)).unwrap();
        assert_eq!(conv.q, 22788);
    }

    #[test]
    fn reciprocal_thetas() {
        for c in [r(2).ab(1, 66), r(5).int(3), r(1).ab(4, 3)] {
            let inst = LinFormInstance::new(&c, 256).unwrap();
            let (t, _, _) = instance_data(&inst, Instance::Ineq333);
            let (t2, _, _) = instance_data(&inst, Instance::Ineq155);
            assert!((&t * &t2).overlaps(&Ball::one(256)));
        }
    }

    #[test]
    fn synthetic_step() {
        let p = 256;
        let theta = Ball::from_ratio(3_333_331, 10_000_000, p);
        let gamma = Ball::from_ratio(1, 4, p);
        let delta = Ball::from_i64(2, p);
        let m = Integer::from(1000);
        // theta is rational here, so stop at the first convergent past 6M
        let (_, convs) = cf_convergents(&theta, &Integer::from(6000), 0).unwrap();
        let conv = convs.last().unwrap();
        let step = reduction_step(&theta, &gamma, &delta, &Rational::from(3), &m, conv).unwrap();
        assert!(step.eps_hat.certainly_pos());
        let want = (2.0 * conv.q.to_f64() / step.eps_hat.to_f64()).ln() / 3f64.ln();
        let got: f64 = step.new_bound.unwrap().parse().unwrap();
        assert_eq!(got, want.floor());
        let small = Convergent {
            p: Integer::from(1),
            q: Integer::from(3),
            index: 0,
        };
        assert!(reduction_step(&theta, &gamma, &delta, &Rational::from(3), &m, &small).is_err());
    }

    #[test]
    fn planted_solutions_survive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = 512;
        for _ in 0..20 {
            let num: i64 = rng.gen_range(1_000_000..9_000_000);
            let theta = Ball::from_i64(2, p).sqrt() * Ball::from_ratio(num, 1_000_000, p);
            let m: i64 = rng.gen_range(2..30);
            let n = (theta.to_f64() * m as f64).round() as i64;
            // gamma makes (m, n) an exact solution of m theta - n + gamma = 0
            let gamma = Ball::from_i64(n, p) - theta.mul_i64(m);
            let delta = Ball::one(p);
            let mm = Integer::from(1000);
            let (_, convs) =
                cf_convergents(&theta, &Integer::from(6000), CONVERGENT_ATTEMPTS).unwrap();
            for conv in convs.iter().filter(|c| c.q > 6000) {
                let step =
                    reduction_step(&theta, &gamma, &delta, &Rational::from(3), &mm, conv).unwrap();
                if let Some(b) = step.new_bound {
                    assert!(b.parse::<i64>().unwrap() >= m);
                }
            }
        }
    }

    #[test]
    fn paper_example_reduces() {
        let bw = bw_global_bounds(256);
        let c = r(2).ab(1, 66);
        let (a, b) = reduce_for_c(&c, &bw, &default_schedule()).unwrap();
        assert_eq!(a.status, ReductionStatus::Reduced);
        assert_eq!(b.status, ReductionStatus::Reduced);
        assert!(*a.final_bound_int() <= 22, "{}", a.final_bound);
        assert!(*b.final_bound_int() <= 55, "{}", b.final_bound);
        for w in a.steps.windows(2) {
            let x: Integer = w[0].new_bound.as_ref().unwrap().parse().unwrap();
            let y: Integer = w[1].new_bound.as_ref().unwrap().parse().unwrap();
            assert!(y <= x);
        }
    }

    #[test]
    fn real_parameter_reduces_and_finishes() {
        let bw = bw_global_bounds(256);
        let c = r(5).int(3);
        let (a, b) = reduce_for_c(&c, &bw, &default_schedule()).unwrap();
        assert!(*a.final_bound_int() <= 22 && *b.final_bound_int() <= 55);
        let top = a
            .final_bound_int()
            .clone()
            .max(b.final_bound_int().clone())
            .to_u64()
            .unwrap();
        assert!(finish_small_indices(&c, top, top).is_empty());
        assert!(zero_index_hits(&c, top, top).is_empty());
        assert!(reduce_for_c(&r(1).ab(0, 5), &bw, &default_schedule()).is_err());
    }

    #[test]
    fn finish_examples() {
        assert!(finish_small_indices(&r(1).one(), 22, 55).is_empty());
        assert!(finish_small_indices(&r(1).ab(5, 2), 22, 55).is_empty());
        // u' runs 1, 1, -1, -1, ... at c = 1
        assert_eq!(
            zero_index_hits(&r(1).one(), 3, 3),
            vec![(0, 1, 1), (0, 2, -1), (0, 3, -1)]
        );
    }
}
