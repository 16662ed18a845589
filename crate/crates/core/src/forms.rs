//! The quartic `t^4 - 2c t^3 + 2t^2 + 2c t + 1` over the quadratic ring:
//! its index form, the resolvent cubic, and construction of generators.

use std::fmt;

use rug::Integer;
use serde::Serialize;

use crate::ball::{Ball, ComplexBall};
use crate::error::{Error, Result};
use crate::poly::{discriminant_monic, QuadIntPoly};
use crate::ring::{QuadInt, RingSpec};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuarticParams {
    c: QuadInt,
}

impl QuarticParams {
    pub fn new(c: QuadInt) -> Result<QuarticParams> {
        let ring = *c.ring();
        if c.is_zero() || c == ring.int(2) || c == ring.int(-2) {
            return Err(Error::Domain(format!(
                "c = {c} makes the quartic reducible"
            )));
        }
        Ok(QuarticParams { c })
    }

    pub fn c(&self) -> &QuadInt {
        &self.c
    }

    pub fn ring(&self) -> RingSpec {
        *self.c.ring()
    }

    /// Coefficients `(a1, a2, a3, a4)` of `t^4 + a1 t^3 + a2 t^2 + a3 t + a4`.
    pub fn coeffs(&self) -> [QuadInt; 4] {
        let r = self.ring();
        [self.c.mul_i64(-2), r.int(2), self.c.mul_i64(2), r.one()]
    }

    pub fn poly(&self) -> QuadIntPoly {
        let [a1, a2, a3, a4] = self.coeffs();
        QuadIntPoly::new(self.ring(), vec![a4, a3, a2, a1, self.ring().one()])
    }

    pub fn conj(&self) -> QuarticParams {
        QuarticParams { c: self.c.conj() }
    }
}

/// `alpha = x xi + y xi^2 + z xi^3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GeneratorTriple {
    pub x: QuadInt,
    pub y: QuadInt,
    pub z: QuadInt,
}

impl GeneratorTriple {
    pub fn new(x: QuadInt, y: QuadInt, z: QuadInt) -> Result<GeneratorTriple> {
        if x.is_zero() && y.is_zero() && z.is_zero() {
            return Err(Error::InvalidElement("zero generator triple".into()));
        }
        Ok(GeneratorTriple { x, y, z })
    }

    pub fn scale(&self, k: &QuadInt) -> GeneratorTriple {
        GeneratorTriple {
            x: &self.x * k,
            y: &self.y * k,
            z: &self.z * k,
        }
    }

    pub fn conj(&self) -> GeneratorTriple {
        GeneratorTriple {
            x: self.x.conj(),
            y: self.y.conj(),
            z: self.z.conj(),
        }
    }

    /// `xi`.
    pub fn xi(ring: &RingSpec) -> GeneratorTriple {
        GeneratorTriple {
            x: ring.one(),
            y: ring.zero(),
            z: ring.zero(),
        }
    }

    /// `2 xi - 2c xi^2 + xi^3`.
    pub fn second(params: &QuarticParams) -> GeneratorTriple {
        let r = params.ring();
        GeneratorTriple {
            x: r.int(2),
            y: params.c().mul_i64(-2),
            z: r.one(),
        }
    }
}

impl fmt::Display for GeneratorTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

fn generic_cubic(u: &QuadInt, v: &QuadInt, a: &[QuadInt; 4]) -> QuadInt {
    let [a1, a2, a3, a4] = a;
    let u2 = u * u;
    let v2 = v * v;
    let k1 = -a2.clone();
    let k2 = &(a1 * a3) - &a4.mul_i64(4);
    let k3 = &(&(a2 * a4).mul_i64(4) - &(a3 * a3)) - &(&(a1 * a1) * a4);
    &(&(&(&u2 * u) + &(&(&k1 * &u2) * v)) + &(&(&k2 * u) * &v2)) + &(&(&k3 * &v2) * v)
}

fn generic_q1(x: &QuadInt, y: &QuadInt, z: &QuadInt, a: &[QuadInt; 4]) -> QuadInt {
    let [a1, a2, a3, a4] = a;
    let t1 = x * x;
    let t2 = -(&(&(x * y) * a1));
    let t3 = &(y * y) * a2;
    let t4 = &(x * z) * &(&(a1 * a1) - &a2.mul_i64(2));
    let t5 = &(y * z) * &(a3 - &(a1 * a2));
    let t6 = &(z * z) * &(&(&(-(a1 * a3)) + &(a2 * a2)) + a4);
    t1 + t2 + t3 + t4 + t5 + t6
}

fn generic_q2(x: &QuadInt, y: &QuadInt, z: &QuadInt, a: &[QuadInt; 4]) -> QuadInt {
    let [a1, a2, _, _] = a;
    &(&(&(y * y) - &(x * z)) - &(&(y * z) * a1)) + &(&(z * z) * a2)
}

fn assert_agrees(label: &str, fast: &QuadInt, generic: &QuadInt) {
    assert_eq!(
        fast, generic,
        "{label}: specialised and generic evaluations disagree"
    );
}

/// `(u + 2v)(u - 2(c+1)v)(u + 2(c-1)v)`.
pub fn cubic_form_f(u: &QuadInt, v: &QuadInt, params: &QuarticParams) -> QuadInt {
    let c = params.c();
    let r = params.ring();
    let f1 = u + &v.mul_i64(2);
    let f2 = u - &(&(c + &r.one()) * v).mul_i64(2);
    let f3 = u + &(&(c - &r.one()) * v).mul_i64(2);
    let out = &(&f1 * &f2) * &f3;
    assert_agrees("F", &out, &generic_cubic(u, v, &params.coeffs()));
    out
}

pub fn q1(x: &QuadInt, y: &QuadInt, z: &QuadInt, params: &QuarticParams) -> QuadInt {
    let c = params.c();
    let r = params.ring();
    let c2 = c * c;
    let out = &(x * x)
        + &(&(x * y) * c).mul_i64(2)
        + (y * y).mul_i64(2)
        + (&(x * z) * &(&c2 - &r.one())).mul_i64(4)
        + (&(y * z) * c).mul_i64(6)
        + &(z * z) * &(&c2.mul_i64(4) + &r.int(5));
    assert_agrees("Q1", &out, &generic_q1(x, y, z, &params.coeffs()));
    out
}

pub fn q2(x: &QuadInt, y: &QuadInt, z: &QuadInt, params: &QuarticParams) -> QuadInt {
    let c = params.c();
    let out = &(&(&(y * y) - &(x * z)) + &(&(y * z) * c).mul_i64(2)) + &(z * z).mul_i64(2);
    assert_agrees("Q2", &out, &generic_q2(x, y, z, &params.coeffs()));
    out
}

/// Solutions `(eta, 0)` of `F(u, v) = unit`, one per unit `eta`.
///
/// The three linear factors are units, so `2(c+2)v` and `2(c-2)v` are
/// differences of units and have modulus at most 2; together this forces
/// `|4v| <= 2`, hence `v = 0`. A bounded search double-checks that nothing
/// with `v != 0` and `|u|, |v| <= 5` slips through.
pub fn solve_relative_cubic(params: &QuarticParams) -> Result<Vec<(QuadInt, QuadInt)>> {
    let ring = params.ring();
    let mut out = Vec::new();
    for eta in ring.units() {
        let val = cubic_form_f(&eta, &ring.zero(), params);
        if !val.is_unit() {
            return Err(Error::Anomaly(format!("F({eta}, 0) = {val} is not a unit")));
        }
        out.push((eta, ring.zero()));
    }
    if let Some((u, v)) = relative_cubic_sweep(params, 5) {
        return Err(Error::Anomaly(format!(
            "F({u}, {v}) is a unit with v != 0 for c = {}",
            params.c()
        )));
    }
    Ok(out)
}

/// First `(u, v)` with `v != 0`, `|u|, |v| <= radius` and `F(u, v)` a unit.
pub fn relative_cubic_sweep(params: &QuarticParams, radius: i64) -> Option<(QuadInt, QuadInt)> {
    let disk = params.ring().enumerate_disk_int(radius);
    for v in disk.iter().filter(|v| !v.is_zero()) {
        for u in &disk {
            if cubic_form_f(u, v, params).is_unit() {
                return Some((u.clone(), v.clone()));
            }
        }
    }
    None
}

/// `p^4 - 2c p^3 q + 2 p^2 q^2 + 2c p q^3 + q^4`.
pub fn thue_lhs(p: &QuadInt, q: &QuadInt, params: &QuarticParams) -> QuadInt {
    let c = params.c();
    let p2 = p * p;
    let q2 = q * q;
    let pq = p * q;
    let cross = &(c * &pq).mul_i64(2) * &(&q2 - &p2);
    &(&(&p2 * &p2) + &(&q2 * &q2)) + &(&(&p2 * &q2).mul_i64(2) + &cross)
}

/// `(U, V, Z) = (p^2 + q^2, p^2 + 2pq - q^2, -p^2 + 2pq + q^2)`.
pub fn uvz_from_pq(p: &QuadInt, q: &QuadInt) -> (QuadInt, QuadInt, QuadInt) {
    let p2 = p * p;
    let q2 = q * q;
    let two_pq = (p * q).mul_i64(2);
    let u = &p2 + &q2;
    let v = &(&p2 + &two_pq) - &q2;
    let z = &(&q2 + &two_pq) - &p2;
    (u, v, z)
}

/// All `(p, q)` mapping to `(U, V, Z)`; the pairs come in sign-flipped couples.
pub fn pq_from_uvz(u: &QuadInt, v: &QuadInt, z: &QuadInt) -> Vec<(QuadInt, QuadInt)> {
    let ring = *u.ring();
    let four = ring.int(4);
    let p2 = (&(&u.mul_i64(2) + v) - z).div_exact(&four);
    let q2 = (&(&u.mul_i64(2) - v) + z).div_exact(&four);
    let pq4 = v + z;
    let (Ok(Some(p2)), Ok(Some(q2))) = (p2, q2) else {
        return Vec::new();
    };
    let (Some(p), Some(q)) = (p2.sqrt_exact(), q2.sqrt_exact()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (pp, qq) in [(p.clone(), q.clone()), (p.clone(), -q.clone())] {
        if (&pp * &qq).mul_i64(4) == pq4 {
            let pair = (pp.clone(), qq.clone());
            let neg = (-pp, -qq);
            if !out.contains(&pair) {
                out.push(pair);
            }
            if !out.contains(&neg) {
                out.push(neg);
            }
        }
    }
    out
}

/// The triple `(2q^2 + p^2 - 2cpq, pq - 2cq^2, q^2)` for a solution of the Thue equation.
pub fn generator_from_pq(
    p: &QuadInt,
    q: &QuadInt,
    params: &QuarticParams,
) -> Result<GeneratorTriple> {
    let mu = thue_lhs(p, q, params);
    if !mu.is_unit() {
        return Err(Error::NotASolution(format!(
            "thue form at (p, q) = ({p}, {q}) is {mu}, not a unit"
        )));
    }
    let c = params.c();
    let pq = p * q;
    let q2 = q * q;
    let x = &(&q2.mul_i64(2) + &(p * p)) - &(c * &pq).mul_i64(2);
    let y = &pq - &(c * &q2).mul_i64(2);
    let g = GeneratorTriple::new(x, y, q2)?;
    let v = q2_of(&g, params);
    let u = q1_of(&g, params);
    if !v.is_zero() || !u.is_unit() {
        return Err(Error::Anomaly(format!(
            "generator {g} has Q1 = {u}, Q2 = {v}"
        )));
    }
    Ok(g)
}

pub fn q1_of(g: &GeneratorTriple, params: &QuarticParams) -> QuadInt {
    q1(&g.x, &g.y, &g.z, params)
}

pub fn q2_of(g: &GeneratorTriple, params: &QuarticParams) -> QuadInt {
    q2(&g.x, &g.y, &g.z, params)
}

fn printer_key(a: &QuadInt) -> (Integer, Integer) {
    let (u, v) = a.to_ab();
    (-u, -v)
}

/// Canonical member of the orbit `{eta * g}` under the units.
pub fn normalize_generator(g: &GeneratorTriple) -> GeneratorTriple {
    let ring = *g.x.ring();
    ring.units()
        .iter()
        .map(|eta| g.scale(eta))
        .min_by(|a, b| {
            let ka = (
                a.x.norm(),
                a.y.norm(),
                a.z.norm(),
                printer_key(&a.x),
                printer_key(&a.y),
                printer_key(&a.z),
            );
            let kb = (
                b.x.norm(),
                b.y.norm(),
                b.z.norm(),
                printer_key(&b.x),
                printer_key(&b.y),
                printer_key(&b.z),
            );
            ka.cmp(&kb)
        })
        .expect("the unit group is never empty")
}

/// The four roots of the quartic, in closed form.
///
/// Dividing by `t^2` turns `f` into `s^2 - 2cs + 4` with `s = t - 1/t`, so
/// `s = c +- sqrt(c^2 - 4)` and `t = (s +- sqrt(s^2 + 4))/2`.
pub fn quartic_roots(params: &QuarticParams, prec: u32) -> Result<[ComplexBall; 4]> {
    let c = params.c().embed(prec);
    let four = ComplexBall::from_i64(4, prec);
    let half = Ball::from_ratio(1, 2, prec);
    let d = (&c.sqr() - &four).any_sqrt()?;
    let mut roots = Vec::with_capacity(4);
    for s in [&c + &d, &c - &d] {
        let e = (&s.sqr() + &four).any_sqrt()?;
        roots.push((&s + &e).scale(&half));
        roots.push((&s - &e).scale(&half));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if !(&roots[i] - &roots[j]).certainly_nonzero() {
                return Err(Error::precision("separation of the quartic's roots", prec));
            }
        }
    }
    Ok([
        roots[0].clone(),
        roots[1].clone(),
        roots[2].clone(),
        roots[3].clone(),
    ])
}

/// Exact discriminant of the quartic, checked against `256 c^2 (c-2)^2 (c+2)^2`.
pub fn quartic_discriminant(params: &QuarticParams) -> Result<QuadInt> {
    let disc = discriminant_monic(&params.poly())?;
    let c = params.c();
    let r = params.ring();
    let closed = (&(&(c * c) * &(c - &r.int(2)).pow(2)) * &(c + &r.int(2)).pow(2)).mul_i64(256);
    if disc != closed {
        return Err(Error::Anomaly(format!(
            "discriminant {disc} differs from its closed form {closed}"
        )));
    }
    Ok(disc)
}

fn eval_triple(g: &GeneratorTriple, t: &ComplexBall, prec: u32) -> ComplexBall {
    let t2 = t.sqr();
    let t3 = &t2 * t;
    &(&(&g.x.embed(prec) * t) + &(&g.y.embed(prec) * &t2)) + &(&g.z.embed(prec) * &t3)
}

/// Relative index of `x xi + y xi^2 + z xi^3`, from the conjugate differences over both
/// embeddings of the quadratic field divided by `|N(disc f)|^(1/2)`.
pub fn relative_index_numeric(
    g: &GeneratorTriple,
    params: &QuarticParams,
    prec: u32,
) -> Result<Ball> {
    if prec < 64 {
        return Err(Error::Domain(format!("precision {prec} below 64 bits")));
    }
    let mut prod = Ball::one(prec);
    for (gi, pi) in [(g.clone(), params.clone()), (g.conj(), params.conj())] {
        let roots = quartic_roots(&pi, prec)?;
        let vals: Vec<ComplexBall> = roots.iter().map(|t| eval_triple(&gi, t, prec)).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                prod = &prod * &(&vals[i] - &vals[j]).abs();
            }
        }
    }
    // sqrt(|N(disc)|) = |disc| because the two conjugate discriminants have equal modulus
    let disc = quartic_discriminant(params)?;
    let denom = Ball::from_integer(&disc.norm(), prec).sqrt();
    Ok(&prod / &denom)
}
