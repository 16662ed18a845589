//! Dense polynomials over the quadratic ring and exact resultants.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{QuadInt, RingSpec};

/// Coefficients indexed by degree; trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadIntPoly {
    ring: RingSpec,
    coeffs: Vec<QuadInt>,
}

impl QuadIntPoly {
    pub fn new(ring: RingSpec, mut coeffs: Vec<QuadInt>) -> QuadIntPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QuadIntPoly { ring, coeffs }
    }

    pub fn zero(ring: RingSpec) -> QuadIntPoly {
        QuadIntPoly::new(ring, Vec::new())
    }

    pub fn constant(c: QuadInt) -> QuadIntPoly {
        QuadIntPoly::new(*c.ring(), vec![c])
    }

    /// `t - a`.
    pub fn linear_root(a: &QuadInt) -> QuadIntPoly {
        QuadIntPoly::new(*a.ring(), vec![-a, a.ring().one()])
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn coeffs(&self) -> &[QuadInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> QuadInt {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> QuadInt {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == self.ring.one()
    }

    pub fn conj(&self) -> QuadIntPoly {
        QuadIntPoly::new(self.ring, self.coeffs.iter().map(QuadInt::conj).collect())
    }

    pub fn derivative(&self) -> QuadIntPoly {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| a.mul_i64(i as i64))
            .collect();
        QuadIntPoly::new(self.ring, c)
    }

    pub fn eval(&self, t: &QuadInt) -> QuadInt {
        let mut acc = self.ring.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    pub fn add(&self, other: &QuadIntPoly) -> QuadIntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        QuadIntPoly::new(self.ring, c)
    }

    pub fn sub(&self, other: &QuadIntPoly) -> QuadIntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        QuadIntPoly::new(self.ring, c)
    }

    pub fn mul(&self, other: &QuadIntPoly) -> QuadIntPoly {
        if self.is_zero() || other.is_zero() {
            return QuadIntPoly::zero(self.ring);
        }
        let mut c = vec![self.ring.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        QuadIntPoly::new(self.ring, c)
    }

    pub fn pow(&self, n: u32) -> QuadIntPoly {
        let mut acc = QuadIntPoly::constant(self.ring.one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for QuadIntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Serialize for QuadIntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

/// Fraction-free (Bareiss) determinant of a square matrix over the ring.
pub fn determinant(ring: RingSpec, mut m: Vec<Vec<QuadInt>>) -> Result<QuadInt> {
    let n = m.len();
    if n == 0 {
        return Ok(ring.one());
    }
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::Contract("determinant of a non-square matrix".into()));
    }
    let mut negate = false;
    let mut prev = ring.one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(ring.zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev)?.ok_or_else(|| {
                    Error::Anomaly("inexact division in fraction-free elimination".into())
                })?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Sylvester-matrix resultant with no restriction on the leading coefficients.
pub fn sylvester_resultant(g: &QuadIntPoly, h: &QuadIntPoly) -> Result<QuadInt> {
    let ring = *g.ring();
    if ring != *h.ring() {
        return Err(Error::RingMismatch {
            left: ring.d(),
            right: h.ring().d(),
        });
    }
    let (Some(m), Some(n)) = (g.degree(), h.degree()) else {
        return Ok(ring.zero());
    };
    let size = m + n;
    if size == 0 {
        return Ok(ring.one());
    }
    let mut rows = Vec::with_capacity(size);
    // rows hold coefficients from the leading term down
    for i in 0..n {
        let mut row = vec![ring.zero(); size];
        for (k, c) in g.coeffs().iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![ring.zero(); size];
        for (k, c) in h.coeffs().iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    determinant(ring, rows)
}

/// Resultant of two monic polynomials.
pub fn resultant(g: &QuadIntPoly, h: &QuadIntPoly) -> Result<QuadInt> {
    if !g.is_monic() || !h.is_monic() {
        return Err(Error::Contract(
            "resultant expects monic polynomials".into(),
        ));
    }
    sylvester_resultant(g, h)
}

/// Discriminant of a monic polynomial of degree `n`: `(-1)^(n(n-1)/2) Res(g, g')`.
pub fn discriminant_monic(g: &QuadIntPoly) -> Result<QuadInt> {
    if !g.is_monic() {
        return Err(Error::Contract(
            "discriminant expects a monic polynomial".into(),
        ));
    }
    let n = g.degree().unwrap_or(0);
    let r = sylvester_resultant(g, &g.derivative())?;
    Ok(if (n * (n.saturating_sub(1)) / 2) % 2 == 1 {
        -r
    } else {
        r
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(d: u64) -> RingSpec {
        RingSpec::new(d).unwrap()
    }

    #[test]
    fn linear_resultant() {
        let g = r(2);
        let a = g.ab(3, 1);
        let b = g.ab(-1, 4);
        let res = resultant(&QuadIntPoly::linear_root(&a), &QuadIntPoly::linear_root(&b)).unwrap();
        assert_eq!(res, &a - &b);
    }

    #[test]
    fn self_resultant_vanishes() {
        let g = r(5);
        let p = QuadIntPoly::new(g, vec![g.ab(1, 1), g.ab(0, 2), g.int(3), g.one()]);
        assert!(resultant(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn non_monic_is_rejected() {
        let g = r(5);
        let p = QuadIntPoly::new(g, vec![g.int(1), g.int(2)]);
        assert!(matches!(resultant(&p, &p), Err(Error::Contract(_))));
    }

    #[test]
    fn quadratic_discriminant() {
        let g = r(1);
        // t^2 + b t + c has discriminant b^2 - 4c
        let b = g.ab(2, 3);
        let c = g.ab(-1, 5);
        let p = QuadIntPoly::new(g, vec![c.clone(), b.clone(), g.one()]);
        assert_eq!(discriminant_monic(&p).unwrap(), &(&b * &b) - &c.mul_i64(4));
    }

    #[test]
    fn determinant_with_pivoting() {
        let g = r(3);
        let m = vec![
            vec![g.zero(), g.one(), g.int(2)],
            vec![g.one(), g.zero(), g.int(3)],
            vec![g.int(4), g.int(5), g.half(1, 1)],
        ];
        // expand along the first row
        let e = g.half(1, 1);
        let want = -(&(e.clone() - g.int(12))) + g.int(2) * g.int(5);
        assert_eq!(determinant(g, m).unwrap(), want);
    }

    proptest! {
        #[test]
        fn resultant_of_products_of_linears(
            xs in proptest::collection::vec((-6i64..6, -6i64..6), 1..4),
            ys in proptest::collection::vec((-6i64..6, -6i64..6), 1..4),
            d in prop_oneof![Just(1u64), Just(2), Just(3), Just(7)],
        ) {
            let ring = r(d);
            let a: Vec<QuadInt> = xs.iter().map(|&(u, v)| ring.ab(u, v)).collect();
            let b: Vec<QuadInt> = ys.iter().map(|&(u, v)| ring.ab(u, v)).collect();
            let mut g = QuadIntPoly::constant(ring.one());
            for x in &a { g = g.mul(&QuadIntPoly::linear_root(x)); }
            let mut h = QuadIntPoly::constant(ring.one());
            for y in &b { h = h.mul(&QuadIntPoly::linear_root(y)); }
            let mut want = ring.one();
            for x in &a { for y in &b { want = &want * &(x - y); } }
            prop_assert_eq!(resultant(&g, &h).unwrap(), want);
        }
    }
}
