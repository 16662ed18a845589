//! Absolute index of `alpha = A + eps alpha0` in the order generated by a root `xi` of the quartic:
//! exact characteristic polynomials over the quadratic ring and the resultant against the conjugate.

use rug::Integer;
use serde::Serialize;

use crate::ball::{Ball, ComplexBall};
use crate::error::{Error, Result};
use crate::forms::{quartic_roots, QuarticParams};
use crate::poly::{resultant, QuadIntPoly};
use crate::ring::{QuadInt, RingSpec};

/// `a + x xi + y xi^2 + z xi^3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderElement {
    pub a: QuadInt,
    pub x: QuadInt,
    pub y: QuadInt,
    pub z: QuadInt,
}

impl OrderElement {
    pub fn new(a: QuadInt, x: QuadInt, y: QuadInt, z: QuadInt) -> OrderElement {
        OrderElement { a, x, y, z }
    }

    pub fn constant(a: QuadInt) -> OrderElement {
        let r = *a.ring();
        OrderElement::new(a, r.zero(), r.zero(), r.zero())
    }

    pub fn one(ring: &RingSpec) -> OrderElement {
        OrderElement::constant(ring.one())
    }

    pub fn xi_power(ring: &RingSpec, k: usize) -> OrderElement {
        let mut c = [ring.zero(), ring.zero(), ring.zero(), ring.zero()];
        c[k] = ring.one();
        OrderElement::from_coords(c)
    }

    fn from_coords(c: [QuadInt; 4]) -> OrderElement {
        let [a, x, y, z] = c;
        OrderElement { a, x, y, z }
    }

    pub fn coords(&self) -> [QuadInt; 4] {
        [
            self.a.clone(),
            self.x.clone(),
            self.y.clone(),
            self.z.clone(),
        ]
    }

    pub fn add(&self, o: &OrderElement) -> OrderElement {
        OrderElement::new(
            &self.a + &o.a,
            &self.x + &o.x,
            &self.y + &o.y,
            &self.z + &o.z,
        )
    }

    pub fn scale(&self, k: &QuadInt) -> OrderElement {
        OrderElement::new(&self.a * k, &self.x * k, &self.y * k, &self.z * k)
    }

    /// Value at a complex root of the quartic, with the coefficients embedded as given.
    pub fn eval_at(&self, t: &ComplexBall, prec: u32) -> ComplexBall {
        let mut acc = ComplexBall::from_i64(0, prec);
        for k in self.coords().iter().rev() {
            acc = &(&acc * t) + &k.embed(prec);
        }
        acc
    }
}

/// Product reduced with `xi^4 = 2c xi^3 - 2 xi^2 - 2c xi - 1`.
pub fn mul_mod_f(u: &OrderElement, v: &OrderElement, params: &QuarticParams) -> OrderElement {
    let ring = params.ring();
    let (uc, vc) = (u.coords(), v.coords());
    let mut prod = vec![ring.zero(); 7];
    for i in 0..4 {
        for j in 0..4 {
            prod[i + j] = &prod[i + j] + &(&uc[i] * &vc[j]);
        }
    }
    let c2 = params.c().mul_i64(2);
    for k in (4..7).rev() {
        let top = std::mem::replace(&mut prod[k], ring.zero());
        if top.is_zero() {
            continue;
        }
        prod[k - 1] = &prod[k - 1] + &(&top * &c2);
        prod[k - 2] = &prod[k - 2] - &top.mul_i64(2);
        prod[k - 3] = &prod[k - 3] - &(&top * &c2);
        prod[k - 4] = &prod[k - 4] - &top;
    }
    OrderElement::from_coords([
        prod[0].clone(),
        prod[1].clone(),
        prod[2].clone(),
        prod[3].clone(),
    ])
}

/// Matrix of multiplication by `alpha` on `1, xi, xi^2, xi^3`; column `k` holds `alpha xi^k`.
pub fn multiplication_matrix(alpha: &OrderElement, params: &QuarticParams) -> Vec<Vec<QuadInt>> {
    let ring = params.ring();
    let mut m = vec![vec![ring.zero(); 4]; 4];
    for k in 0..4 {
        let col = mul_mod_f(alpha, &OrderElement::xi_power(&ring, k), params).coords();
        for (row, v) in m.iter_mut().zip(col) {
            row[k] = v;
        }
    }
    m
}

fn mat_mul(a: &[Vec<QuadInt>], b: &[Vec<QuadInt>], ring: &RingSpec) -> Vec<Vec<QuadInt>> {
    let n = a.len();
    let mut out = vec![vec![ring.zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] = &out[i][j] + &(&a[i][k] * &b[k][j]);
            }
        }
    }
    out
}

/// `det(tI - M)` by Faddeev-LeVerrier; the divisions by `k` are exact over the ring.
pub fn char_poly(alpha: &OrderElement, params: &QuarticParams) -> Result<QuadIntPoly> {
    let ring = params.ring();
    let a = multiplication_matrix(alpha, params);
    let n = 4;
    let mut coeffs = vec![ring.zero(); n + 1];
    coeffs[n] = ring.one();
    let mut mk = vec![vec![ring.zero(); n]; n];
    for k in 1..=n {
        mk = mat_mul(&a, &mk, &ring);
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] = &row[i] + &coeffs[n - k + 1];
        }
        let am = mat_mul(&a, &mk, &ring);
        let trace = (0..n).fold(ring.zero(), |acc, i| &acc + &am[i][i]);
        coeffs[n - k] = (-trace).div_exact(&ring.int(k as i64))?.ok_or_else(|| {
            Error::Anomaly(format!(
                "characteristic coefficient not integral at step {k}"
            ))
        })?;
    }
    Ok(QuadIntPoly::new(ring, coeffs))
}

pub fn conj_poly(g: &QuadIntPoly) -> QuadIntPoly {
    g.conj()
}

/// The element added to `A` in the generator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Alpha0 {
    Xi,
    SecondGen,
}

impl Alpha0 {
    pub fn element(self, params: &QuarticParams) -> OrderElement {
        let r = params.ring();
        match self {
            Alpha0::Xi => OrderElement::xi_power(&r, 1),
            Alpha0::SecondGen => {
                OrderElement::new(r.zero(), r.int(2), params.c().mul_i64(-2), r.one())
            }
        }
    }
}

/// `Res(g, conj g)` for `g` the characteristic polynomial of `alpha`; fixed by conjugation, so rational.
pub fn conjugate_resultant(alpha: &OrderElement, params: &QuarticParams) -> Result<Integer> {
    let g = char_poly(alpha, params)?;
    let r = resultant(&g, &conj_poly(&g))?;
    r.as_integer()
        .ok_or_else(|| Error::Anomaly(format!("Res(g, conj g) = {r} is not a rational integer")))
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexVerdict {
    pub d: u64,
    pub c: QuadInt,
    pub b: i64,
    pub eps: QuadInt,
    pub alpha0: Alpha0,
    pub resultant: String,
    pub divisible_by_4096_d2: bool,
    pub j: String,
    pub divisible_by_256: bool,
}

impl IndexVerdict {
    pub fn holds(&self) -> bool {
        self.divisible_by_4096_d2 && self.divisible_by_256
    }
}

/// `alpha = b sqrt(-D) + eps alpha0` at `c = p + q sqrt(-D)`.
pub fn alpha_for(params: &QuarticParams, b: i64, eps: &QuadInt, alpha0: Alpha0) -> OrderElement {
    let r = params.ring();
    OrderElement::constant(r.root().mul_i64(b)).add(&alpha0.element(params).scale(eps))
}

pub fn j_alpha_divisibility(
    d: u64,
    p: i64,
    q: i64,
    b: i64,
    eps: &QuadInt,
    alpha0: Alpha0,
) -> Result<IndexVerdict> {
    let ring = RingSpec::new(d)?;
    if !ring.is_half() {
        return Err(Error::Inapplicable(format!(
            "-{d} = 1 mod 4 is outside the scope of the index computation"
        )));
    }
    if eps.ring() != &ring {
        return Err(Error::RingMismatch {
            left: d,
            right: eps.ring().d(),
        });
    }
    if !eps.is_unit() {
        return Err(Error::Domain(format!("{eps} is not a unit")));
    }
    let c = &ring.int(p) + &ring.root().mul_i64(q);
    let params = QuarticParams::new(c.clone())?;
    let alpha = alpha_for(&params, b, eps, alpha0);
    let res = conjugate_resultant(&alpha, &params)?;
    let d2 = Integer::from(d * d);
    let abs = res.clone().abs();
    let div_big = abs.is_divisible(&Integer::from(&d2 * 4096u32));
    let norm = Integer::from(&d2 * 16u32);
    let (j, div_256) = if abs.is_divisible(&norm) {
        let j = Integer::from(&abs / &norm);
        let ok = j.is_divisible_u(256);
        (j.to_string(), ok)
    } else {
        (format!("{abs}/{norm}"), false)
    };
    Ok(IndexVerdict {
        d,
        c,
        b,
        eps: eps.clone(),
        alpha0,
        resultant: res.to_string(),
        divisible_by_4096_d2: div_big,
        j,
        divisible_by_256: div_256,
    })
}

/// Every tuple of the box, every unit `eps`, both `alpha0`; skips `c` in `{0, +-2}`.
pub fn sweep_tuples(
    ring: &RingSpec,
    pmax: i64,
    qmax: i64,
    bmax: i64,
) -> Vec<(i64, i64, i64, QuadInt, Alpha0)> {
    let mut out = Vec::new();
    for p in -pmax..=pmax {
        for q in -qmax..=qmax {
            if q == 0 && (p == 0 || p.abs() == 2) {
                continue;
            }
            for b in -bmax..=bmax {
                for eps in ring.units() {
                    for a0 in [Alpha0::Xi, Alpha0::SecondGen] {
                        out.push((p, q, b, eps.clone(), a0));
                    }
                }
            }
        }
    }
    out
}

/// Product of the sixteen `|alpha^(1,j1) - alpha^(2,j2)|` over both embeddings; equals `|Res(g, conj g)|`.
pub fn numeric_conjugate_product(
    alpha: &OrderElement,
    params: &QuarticParams,
    prec: u32,
) -> Result<Ball> {
    let first: Vec<ComplexBall> = quartic_roots(params, prec)?
        .iter()
        .map(|t| alpha.eval_at(t, prec))
        .collect();
    let conj = OrderElement::new(
        alpha.a.conj(),
        alpha.x.conj(),
        alpha.y.conj(),
        alpha.z.conj(),
    );
    let second: Vec<ComplexBall> = quartic_roots(&params.conj(), prec)?
        .iter()
        .map(|t| conj.eval_at(t, prec))
        .collect();
    let mut prod = Ball::one(prec);
    for u in &first {
        for v in &second {
            prod = &prod * &(u - v).abs();
        }
    }
    Ok(prod)
}
