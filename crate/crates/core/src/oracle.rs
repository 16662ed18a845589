//! Ground truth by exhaustion: small-disk Thue and Pellian searches, intersections of
//! `u_m` and `u'_n` as integer polynomials in `c`, and the parameters `c = +-1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::ball::{Ball, ComplexBall};
use crate::bennett::thue_from_triples;
use crate::error::{Error, Result};
use crate::forms::{
    generator_from_pq, normalize_generator, thue_lhs, uvz_from_pq, GeneratorTriple, QuarticParams,
};
use crate::pell::{admissible_mu_eps, pell_residual_1, pell_residual_2};
use crate::ring::{QuadInt, RingSpec};

/// Highest polynomial degree handled by [`intersection_roots`].
pub const MAX_DEGREE: u64 = 64;

/// Dense polynomial over the rational integers, index = degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<Integer>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<Integer>) -> IntPoly {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> IntPoly {
        IntPoly::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Integer {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn scale(&self, k: i64) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| Integer::from(c * k)).collect())
    }

    /// `(a t + b) * self`.
    fn mul_linear(&self, a: i64, b: i64) -> IntPoly {
        let mut out = vec![Integer::new(); self.coeffs.len() + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += Integer::from(c * b);
            out[i + 1] += Integer::from(c * a);
        }
        IntPoly::new(out)
    }

    pub fn eval(&self, c: &QuadInt) -> QuadInt {
        let ring = *c.ring();
        let mut acc = ring.zero();
        for k in self.coeffs.iter().rev() {
            acc = &(&acc * c) + &ring.from_integer(k);
        }
        acc
    }

    fn eval_ball(&self, z: &ComplexBall) -> ComplexBall {
        let p = z.prec();
        let mut acc = ComplexBall::from_i64(0, p);
        for k in self.coeffs.iter().rev() {
            acc = &(&acc * z) + &ComplexBall::real(Ball::from_integer(k, p));
        }
        acc
    }
}

/// Terms of `x_{k+1} = (2t + shift) x_k - x_{k-1}` as polynomials in `t`.
fn poly_seq(first_shift: i64, mult_shift: i64, k: u64) -> IntPoly {
    let mut prev = IntPoly::from_i64(&[1]);
    if k == 0 {
        return prev;
    }
    let mut cur = IntPoly::from_i64(&[first_shift, 2]);
    for _ in 1..k {
        let next = cur.mul_linear(2, mult_shift).add(&prev.scale(-1));
        prev = cur;
        cur = next;
    }
    assert_eq!(cur.degree(), Some(k as usize));
    assert_eq!(cur.leading(), Integer::from(1) << k as u32);
    cur
}

/// `U_m` with `u_m = eps U_m(c)`.
pub fn u_poly(m: u64) -> IntPoly {
    poly_seq(1, 2, m)
}

/// `U'_n` with `u'_n = eps U'_n(c)`.
pub fn uprime_poly(n: u64) -> IntPoly {
    poly_seq(-1, -2, n)
}

fn point(z: &ComplexBall) -> ComplexBall {
    ComplexBall::new(Ball::from_float(&z.re.mid()), Ball::from_float(&z.im.mid()))
}

/// Weierstrass iteration in double precision from points on a circle of Cauchy radius.
fn approximate_roots(h: &IntPoly, d: usize) -> Vec<Complex64> {
    let lc = h.leading().to_f64();
    let a: Vec<Complex64> = h
        .coeffs
        .iter()
        .map(|c| Complex64::new(c.to_f64() / lc, 0.0))
        .collect();
    let cauchy = a[..d].iter().map(|c| c.norm()).fold(0.0f64, f64::max) + 1.0;
    let eval = |t: Complex64| {
        a.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    };
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(cauchy, 2.0 * PI * k as f64 / d as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let den = (0..d)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            if den.norm() == 0.0 {
                continue;
            }
            let w = eval(z[i]) / den;
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// A disk guaranteed to be part of a cover of all complex roots.
#[derive(Clone, Debug)]
pub struct RootDisk {
    pub center: ComplexBall,
    /// `None` when the inclusion could not be certified; the caller then covers everything.
    pub radius: Option<Ball>,
}

/// Approximates all roots by simultaneous (Weierstrass) iteration, then certifies the cover
/// `D(z_i, d |W_i|)` with `W_i = h(z_i) / (lc prod_{j != i} (z_i - z_j))`, which contains every root.
pub fn certified_root_disks(h: &IntPoly, prec: u32) -> Result<Vec<RootDisk>> {
    let d = match h.degree() {
        None => {
            return Err(Error::Domain(
                "the zero polynomial has no isolated roots".into(),
            ))
        }
        Some(0) => return Ok(Vec::new()),
        Some(d) => d,
    };
    let lc = Ball::from_integer(&h.leading(), prec);
    let lc_c = ComplexBall::real(lc.clone());
    let z: Vec<ComplexBall> = approximate_roots(h, d)
        .into_iter()
        .map(|w| {
            ComplexBall::new(
                Ball::from_float(&Float::with_val(prec, w.re)),
                Ball::from_float(&Float::with_val(prec, w.im)),
            )
        })
        .collect();
    let mut z = z;
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
    // polish at full precision; the f64 start is already close
    for _ in 0..60 {
        let mut moved = Float::with_val(prec, 0);
        for i in 0..d {
            let mut den = lc_c.clone();
            for j in 0..d {
                if j != i {
                    den = &den * &(&z[i] - &z[j]);
                }
            }
            if !den.certainly_nonzero() {
                continue;
            }
            let w = point(&(&h.eval_ball(&z[i]) / &den));
            let step = w.abs().mid();
            if step > moved {
                moved = step;
            }
            z[i] = point(&(&z[i] - &w));
        }
        if moved < tol {
            break;
        }
    }
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let mut den = lc_c.clone();
        for j in 0..d {
            if j != i {
                den = &den * &(&z[i] - &z[j]);
            }
        }
        let radius = if den.certainly_nonzero() {
            let r = (&h.eval_ball(&z[i]) / &den).abs().mul_i64(d as i64);
            r.is_finite().then_some(r)
        } else {
            None
        };
        out.push(RootDisk {
            center: z[i].clone(),
            radius,
        });
    }
    Ok(out)
}

/// Lattice points of the ring with `|c| <= r` in any of the disks (the whole `r`-disk if a radius is missing).
fn lattice_candidates(ring: &RingSpec, disks: &[RootDisk], r: &Rational) -> Vec<QuadInt> {
    let sd = (ring.d() as f64).sqrt();
    let rf = r.to_f64();
    let x_cap = (2.0 * rf).ceil() as i64 + 1;
    let y_cap = (2.0 * rf / sd).ceil() as i64 + 1;
    let r_sq = Rational::from(r * r);
    let mut out: Vec<QuadInt> = Vec::new();
    for disk in disks {
        let (x_lo, x_hi, y_lo, y_hi) = match &disk.radius {
            Some(rad) if rad.hi().to_f64() < 4.0 * rf + 4.0 => {
                let rr = rad.hi().to_f64();
                let a = disk.center.re.to_f64();
                let b = disk.center.im.to_f64();
                (
                    ((2.0 * (a - rr)).floor() as i64 - 1).max(-x_cap),
                    ((2.0 * (a + rr)).ceil() as i64 + 1).min(x_cap),
                    ((2.0 * (b - rr) / sd).floor() as i64 - 1).max(-y_cap),
                    ((2.0 * (b + rr) / sd).ceil() as i64 + 1).min(y_cap),
                )
            }
            _ => (-x_cap, x_cap, -y_cap, y_cap),
        };
        for x in x_lo..=x_hi {
            for y in y_lo..=y_hi {
                if let Ok(c) = ring.from_half(Integer::from(x), Integer::from(y)) {
                    if c.norm() <= r_sq && !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Exact roots in the ring, of modulus at most `r`, of an integer polynomial.
pub fn lattice_roots(
    h: &IntPoly,
    ring: &RingSpec,
    r: &Rational,
    disks: &[RootDisk],
) -> Vec<QuadInt> {
    lattice_candidates(ring, disks, r)
        .into_iter()
        .filter(|c| h.eval(c).is_zero())
        .collect()
}

/// `U_m - sign U'_n`.
pub fn intersection_poly(m: u64, n: u64, sign: i8) -> IntPoly {
    u_poly(m).add(&uprime_poly(n).scale(-(sign as i64)))
}

/// All `c` with `|c| <= r` and `U_m(c) = sign U'_n(c)`.
pub fn intersection_roots(
    m: u64,
    n: u64,
    sign: i8,
    ring: &RingSpec,
    r: &Rational,
) -> Result<Vec<QuadInt>> {
    if m == 0 || n == 0 || m > MAX_DEGREE || n > MAX_DEGREE {
        return Err(Error::Domain(format!(
            "indices must lie in 1..={MAX_DEGREE}, got ({m}, {n})"
        )));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Domain("sign must be +1 or -1".into()));
    }
    let h = intersection_poly(m, n, sign);
    let disks = crate::ball::with_adaptive_prec(128, |prec| certified_root_disks(&h, prec))?;
    Ok(lattice_roots(&h, ring, r, &disks))
}

/// All `(p, q)` with `|p|, |q| <= h` and `thue(p, q) = mu`.
pub fn brute_thue(params: &QuarticParams, mu: &QuadInt, h: &Rational) -> Vec<(QuadInt, QuadInt)> {
    brute_thue_units(params, h)
        .into_iter()
        .filter(|(m, _, _)| m == mu)
        .map(|(_, p, q)| (p, q))
        .collect()
}

/// Every `(mu, p, q)` of the `h`-disk with `thue(p, q) = mu` a unit, sorted by `(p, q)`.
pub fn brute_thue_units(params: &QuarticParams, h: &Rational) -> Vec<(QuadInt, QuadInt, QuadInt)> {
    let disk = params.ring().enumerate_disk(&Rational::from(h * h));
    let c2 = params.c().mul_i64(2);
    // x, x^2, x^3, x^4 for each point of the disk
    let powers: Vec<[QuadInt; 4]> = disk
        .iter()
        .map(|x| {
            let x2 = x * x;
            let x3 = &x2 * x;
            let x4 = &x2 * &x2;
            [x.clone(), x2, x3, x4]
        })
        .collect();
    let mut out = Vec::new();
    for pp in &powers {
        for qp in &powers {
            // p^4 + 2p^2q^2 + q^4 - 2c(p^3 q - p q^3)
            let even = &(&pp[3] + &qp[3]) + &(&pp[1] * &qp[1]).mul_i64(2);
            let odd = &(&pp[2] * &qp[0]) - &(&pp[0] * &qp[2]);
            let val = &even - &(&c2 * &odd);
            if val.is_unit() {
                debug_assert_eq!(val, thue_lhs(&pp[0], &qp[0], params));
                out.push((val, pp[0].clone(), qp[0].clone()));
            }
        }
    }
    out.sort_by(|a, b| (&a.1, &a.2).cmp(&(&b.1, &b.2)));
    out
}

/// All `(U, V, Z)` in the `h`-disk satisfying both Pell relations. For each `U` of the disk the
/// relations pin `V^2` and `Z^2`, so solving them exactly covers every `(V, Z)` of the disk.
pub fn brute_system(
    c: &QuadInt,
    mu: &QuadInt,
    h: &Rational,
) -> Result<Vec<(QuadInt, QuadInt, QuadInt)>> {
    if c.is_zero() {
        return Err(Error::Domain("c = 0".into()));
    }
    let ring = *c.ring();
    let r_sq = Rational::from(h * h);
    let in_disk = |x: &QuadInt| x.norm() <= r_sq;
    let roots = |sq: Option<QuadInt>| -> Vec<QuadInt> {
        match sq.and_then(|s| s.sqrt_exact()) {
            Some(s) if s.is_zero() => vec![s],
            Some(s) => vec![s.clone(), -s],
            None => Vec::new(),
        }
    };
    let two_mu = mu.mul_i64(2);
    let mut out = Vec::new();
    for u in ring.enumerate_disk(&r_sq) {
        let u2 = &u * &u;
        let v2 = (&(&(c + &ring.int(2)) * &u2) - &two_mu).div_exact(c)?;
        let z2 = (&(&(c - &ring.int(2)) * &u2) + &two_mu).div_exact(c)?;
        for v in roots(v2).into_iter().filter(in_disk) {
            for z in roots(z2.clone()).into_iter().filter(in_disk) {
                if pell_residual_1(&u, &v, c, mu).is_zero()
                    && pell_residual_2(&u, &z, c, mu).is_zero()
                {
                    out.push((u.clone(), v.clone(), z));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Solutions for one `mu`: Pellian triples, the Thue pairs above them and their generators.
#[derive(Clone, Debug, Serialize)]
pub struct MuCase {
    pub mu: QuadInt,
    pub eps: Option<QuadInt>,
    pub solutions: Vec<(QuadInt, QuadInt, QuadInt)>,
    pub thue_solutions: Vec<(QuadInt, QuadInt)>,
    pub generators: Vec<GeneratorTriple>,
}

/// Normalized, deduplicated generators of a list of Thue solutions.
pub fn generators_of(
    params: &QuarticParams,
    pairs: &[(QuadInt, QuadInt)],
) -> Result<Vec<GeneratorTriple>> {
    let mut out: Vec<GeneratorTriple> = Vec::new();
    for (p, q) in pairs {
        let g = normalize_generator(&generator_from_pq(p, q, params)?);
        if !out.contains(&g) {
            out.push(g);
        }
    }
    Ok(out)
}

impl MuCase {
    pub fn from_triples(
        params: &QuarticParams,
        mu: &QuadInt,
        eps: Option<QuadInt>,
        triples: Vec<(QuadInt, QuadInt, QuadInt)>,
    ) -> Result<MuCase> {
        let thue = thue_from_triples(params, mu, &triples);
        Ok(MuCase {
            mu: mu.clone(),
            eps,
            generators: generators_of(params, &thue)?,
            solutions: triples,
            thue_solutions: thue,
        })
    }

    pub fn from_pairs(
        params: &QuarticParams,
        mu: &QuadInt,
        eps: Option<QuadInt>,
        mut pairs: Vec<(QuadInt, QuadInt)>,
    ) -> Result<MuCase> {
        pairs.sort();
        pairs.dedup();
        let mut triples: Vec<_> = pairs.iter().map(|(p, q)| uvz_from_pq(p, q)).collect();
        triples.sort();
        triples.dedup();
        Ok(MuCase {
            mu: mu.clone(),
            eps,
            generators: generators_of(params, &pairs)?,
            solutions: triples,
            thue_solutions: pairs,
        })
    }
}

/// Union of the generators over all `mu`, smallest norms first.
pub fn merged_generators(cases: &[MuCase]) -> Vec<GeneratorTriple> {
    let mut out: Vec<GeneratorTriple> = Vec::new();
    for g in cases.iter().flat_map(|m| m.generators.iter()) {
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    out.sort_by(|a, b| {
        let key = |g: &GeneratorTriple| {
            (
                g.x.norm(),
                g.y.norm(),
                g.z.norm(),
                g.x.clone(),
                g.y.clone(),
                g.z.clone(),
            )
        };
        key(a).cmp(&key(b))
    });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpecialStatus {
    Resolved,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecialCaseReport {
    pub ring: RingSpec,
    pub c: QuadInt,
    pub status: SpecialStatus,
    pub mu_cases: Vec<MuCase>,
    pub generators: Vec<GeneratorTriple>,
    /// The equation left open when the ring admits infinitely many solutions of it.
    pub witness: Option<String>,
}

/// `(U, V, Z)` at `c = 1` in `Z[i]`, from `(U - iZ)(U + iZ) = 2 mu` and `V^2 = 3U^2 - 2mu`.
fn gaussian_triples(ring: &RingSpec, mu: &QuadInt) -> Result<Vec<(QuadInt, QuadInt, QuadInt)>> {
    let i = ring.root();
    let two_mu = mu.mul_i64(2);
    let two = ring.int(2);
    let one = ring.one();
    let mut out = Vec::new();
    // every divisor of 2 mu has norm dividing 4
    for a in ring.enumerate_disk_int(2) {
        if a.is_zero() {
            continue;
        }
        let Some(b) = two_mu.div_exact(&a)? else {
            continue;
        };
        let Some(u) = (&a + &b).div_exact(&two)? else {
            continue;
        };
        // Z = (B - A) / (2i)
        let Some(z) = (&b - &a).div_exact(&i.mul_i64(2))? else {
            continue;
        };
        let Some(v) = (&u * &u).mul_i64(3).checked_sub(&two_mu)?.sqrt_exact() else {
            continue;
        };
        for v in [v.clone(), -v] {
            if pell_residual_1(&u, &v, &one, mu).is_zero()
                && pell_residual_2(&u, &z, &one, mu).is_zero()
            {
                let t = (u.clone(), v, z.clone());
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `(p, q)` at `c = 1` in `Z[w]`: `thue = X^2 + 3Y^2` with `X = p^2 - pq - q^2`, `Y = pq`, and
/// `(X - sqrt(-3) Y)(X + sqrt(-3) Y) = mu` forces both factors to be units.
fn eisenstein_pairs(
    ring: &RingSpec,
    params: &QuarticParams,
    mu: &QuadInt,
) -> Result<Vec<(QuadInt, QuadInt)>> {
    let root = ring.root();
    let two = ring.int(2);
    for a in ring.units() {
        let b = mu.div_exact(&a)?.expect("units divide units");
        let Some(_x) = (&a + &b).div_exact(&two)? else {
            continue;
        };
        let Some(y) = (&b - &a).div_exact(&root.mul_i64(2))? else {
            continue;
        };
        if !y.is_zero() {
            return Err(Error::Anomaly(format!(
                "X^2 + 3Y^2 = {mu} has a solution with Y = {y} != 0"
            )));
        }
    }
    // Y = pq = 0, so one coordinate vanishes and the other is a fourth root of mu
    let mut out = Vec::new();
    for u in ring.units() {
        if &u.pow(4) == mu {
            out.push((u.clone(), ring.zero()));
            out.push((ring.zero(), u));
        }
    }
    for (p, q) in &out {
        let x = &(&(p * p) - &(p * q)) - &(q * q);
        let y = p * q;
        let form = &(&x * &x) + &(&y * &y).mul_i64(3);
        if form != thue_lhs(p, q, params) || &form != mu {
            return Err(Error::Anomaly(format!(
                "({p}, {q}) breaks the X^2 + 3Y^2 identity"
            )));
        }
    }
    out.sort();
    Ok(out)
}

/// Complete solution of the Thue equation for `c = +-1` in `Z[i]` and `Z[w]`; other rings
/// are reported undetermined since `U^2 + Z^2 = 2` has infinitely many solutions there.
pub fn special_case_c1(c: &QuadInt) -> Result<SpecialCaseReport> {
    let ring = *c.ring();
    let negative = if *c == ring.one() {
        false
    } else if *c == ring.int(-1) {
        true
    } else {
        return Err(Error::Inapplicable(format!(
            "special case needs c = +-1, got {c}"
        )));
    };
    let params = QuarticParams::new(c.clone())?;
    let base = QuarticParams::new(ring.one())?;
    let flip = |pairs: Vec<(QuadInt, QuadInt)>| -> Vec<(QuadInt, QuadInt)> {
        if negative {
            pairs.into_iter().map(|(p, q)| (q, p)).collect()
        } else {
            pairs
        }
    };
    let mut mu_cases = Vec::new();
    let status = match ring.d() {
        1 => {
            for me in admissible_mu_eps(&ring) {
                let triples = gaussian_triples(&ring, &me.mu)?;
                let pairs = thue_from_triples(&base, &me.mu, &triples);
                mu_cases.push(MuCase::from_pairs(
                    &params,
                    &me.mu,
                    Some(me.eps),
                    flip(pairs),
                )?);
            }
            SpecialStatus::Resolved
        }
        3 => {
            for me in admissible_mu_eps(&ring) {
                let pairs = eisenstein_pairs(&ring, &base, &me.mu)?;
                mu_cases.push(MuCase::from_pairs(
                    &params,
                    &me.mu,
                    Some(me.eps),
                    flip(pairs),
                )?);
            }
            SpecialStatus::Resolved
        }
        _ => SpecialStatus::Undetermined,
    };
    for case in &mu_cases {
        for (p, q) in &case.thue_solutions {
            if thue_lhs(p, q, &params) != case.mu {
                return Err(Error::Anomaly(format!(
                    "({p}, {q}) does not solve the equation at c = {c}"
                )));
            }
        }
    }
    let generators = merged_generators(&mu_cases);
    Ok(SpecialCaseReport {
        ring,
        c: c.clone(),
        status,
        witness: (status == SpecialStatus::Undetermined).then(|| "U^2+Z^2=2".to_string()),
        mu_cases,
        generators,
    })
}
