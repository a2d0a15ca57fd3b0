//! Polynomials in the Bernstein basis on [0, 1], with exact coefficients.
//!
//! A degree-n polynomial is stored as its n+1 Bernstein coefficients. All
//! operations (evaluation, differentiation, products, degree raising) stay in
//! the Bernstein basis; nothing is converted through the monomial basis, so
//! every result is exact.

use crate::exact::{binomial, normalize_primitive_slice, Rational, Vec3r};
use num::BigInt;
use serde::{Deserialize, Serialize};

/// Scalar polynomial in Bernstein form. `coeffs.len() == degree + 1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BernsteinPoly {
    pub coeffs: Vec<Rational>,
}

impl BernsteinPoly {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        BernsteinPoly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        BernsteinPoly { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// Evaluation by de Casteljau's algorithm.
    pub fn eval(&self, t: &Rational) -> Rational {
        let one_minus_t = &Rational::one() - t;
        let mut layer = self.coeffs.clone();
        while layer.len() > 1 {
            layer = layer
                .windows(2)
                .map(|w| &(&w[0] * &one_minus_t) + &(&w[1] * t))
                .collect();
        }
        layer.pop().unwrap()
    }

    /// Derivative; a constant differentiates to the zero constant.
    pub fn derivative(&self) -> BernsteinPoly {
        let n = self.degree();
        if n == 0 {
            return BernsteinPoly::zero();
        }
        let factor = Rational::from_int(n as i64);
        BernsteinPoly::new(
            self.coeffs
                .windows(2)
                .map(|w| &(&w[1] - &w[0]) * &factor)
                .collect(),
        )
    }

    /// Exact product. Degrees add; the coefficients follow the binomial
    /// convolution for Bernstein bases.
    pub fn mul(&self, other: &BernsteinPoly) -> BernsteinPoly {
        let m = self.degree();
        let n = other.degree();
        let mut coeffs = vec![Rational::zero(); m + n + 1];
        for (k, ck) in coeffs.iter_mut().enumerate() {
            let denom = Rational::from_bigint(binomial(m + n, k));
            let lo = k.saturating_sub(n);
            let hi = k.min(m);
            for i in lo..=hi {
                let weight = Rational::from_bigint(binomial(m, i) * binomial(n, k - i));
                *ck += &(&(&weight * &self.coeffs[i]) * &other.coeffs[k - i]);
            }
            *ck = &*ck / &denom;
        }
        BernsteinPoly::new(coeffs)
    }

    /// Rewrites the polynomial with degree raised by `by` without changing
    /// its values.
    pub fn degree_raised(&self, by: usize) -> BernsteinPoly {
        let mut p = self.clone();
        for _ in 0..by {
            let n = p.degree();
            let np1 = Rational::from_int(n as i64 + 1);
            let mut coeffs = Vec::with_capacity(n + 2);
            coeffs.push(p.coeffs[0].clone());
            for i in 1..=n {
                let alpha = &Rational::from_int(i as i64) / &np1;
                let c = &(&alpha * &p.coeffs[i - 1])
                    + &(&(&Rational::one() - &alpha) * &p.coeffs[i]);
                coeffs.push(c);
            }
            coeffs.push(p.coeffs[n].clone());
            p = BernsteinPoly::new(coeffs);
        }
        p
    }

    fn match_degrees(a: &BernsteinPoly, b: &BernsteinPoly) -> (BernsteinPoly, BernsteinPoly) {
        let (da, db) = (a.degree(), b.degree());
        if da == db {
            (a.clone(), b.clone())
        } else if da < db {
            (a.degree_raised(db - da), b.clone())
        } else {
            (a.clone(), b.degree_raised(da - db))
        }
    }

    pub fn add(&self, other: &BernsteinPoly) -> BernsteinPoly {
        let (a, b) = Self::match_degrees(self, other);
        BernsteinPoly::new(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        )
    }

    pub fn sub(&self, other: &BernsteinPoly) -> BernsteinPoly {
        let (a, b) = Self::match_degrees(self, other);
        BernsteinPoly::new(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x - y)
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> BernsteinPoly {
        BernsteinPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Primitive integer form of the coefficient vector: `(scale, ints)` with
    /// `scale * ints == coeffs`, gcd one, first nonzero entry positive.
    pub fn primitive(&self) -> (Rational, Vec<BigInt>) {
        normalize_primitive_slice(&self.coeffs)
    }
}

/// Polynomial curve in 3-space: one Bernstein polynomial per coordinate, all
/// of the same degree. Stored as vector-valued Bernstein coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct VecPoly3 {
    pub coeffs: Vec<Vec3r>,
}

impl VecPoly3 {
    pub fn new(coeffs: Vec<Vec3r>) -> Self {
        assert!(!coeffs.is_empty(), "curve needs at least one coefficient");
        VecPoly3 { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Vec3r::is_zero)
    }

    pub fn component(&self, axis: usize) -> BernsteinPoly {
        BernsteinPoly::new(self.coeffs.iter().map(|v| v.0[axis].clone()).collect())
    }

    pub fn from_components(x: &BernsteinPoly, y: &BernsteinPoly, z: &BernsteinPoly) -> Self {
        let d = x.degree().max(y.degree()).max(z.degree());
        let x = x.degree_raised(d - x.degree());
        let y = y.degree_raised(d - y.degree());
        let z = z.degree_raised(d - z.degree());
        VecPoly3::new(
            (0..=d)
                .map(|i| Vec3r::new(x.coeffs[i].clone(), y.coeffs[i].clone(), z.coeffs[i].clone()))
                .collect(),
        )
    }

    pub fn eval(&self, t: &Rational) -> Vec3r {
        let one_minus_t = &Rational::one() - t;
        let mut layer = self.coeffs.clone();
        while layer.len() > 1 {
            layer = layer
                .windows(2)
                .map(|w| &w[0].scale(&one_minus_t) + &w[1].scale(t))
                .collect();
        }
        layer.pop().unwrap()
    }

    pub fn derivative(&self) -> VecPoly3 {
        let n = self.degree();
        if n == 0 {
            return VecPoly3::new(vec![Vec3r::zero()]);
        }
        let factor = Rational::from_int(n as i64);
        VecPoly3::new(
            self.coeffs
                .windows(2)
                .map(|w| (&w[1] - &w[0]).scale(&factor))
                .collect(),
        )
    }

    pub fn sub(&self, other: &VecPoly3) -> VecPoly3 {
        let pair = |a: &VecPoly3, b: &VecPoly3, axis: usize| a.component(axis).sub(&b.component(axis));
        VecPoly3::from_components(
            &pair(self, other, 0),
            &pair(self, other, 1),
            &pair(self, other, 2),
        )
    }

    /// Componentwise cross product of two curves; degrees add.
    pub fn cross(&self, other: &VecPoly3) -> VecPoly3 {
        let [ax, ay, az] = [self.component(0), self.component(1), self.component(2)];
        let [bx, by, bz] = [other.component(0), other.component(1), other.component(2)];
        VecPoly3::from_components(
            &ay.mul(&bz).sub(&az.mul(&by)),
            &az.mul(&bx).sub(&ax.mul(&bz)),
            &ax.mul(&by).sub(&ay.mul(&bx)),
        )
    }

    pub fn dot(&self, other: &VecPoly3) -> BernsteinPoly {
        let mut acc = BernsteinPoly::zero();
        for axis in 0..3 {
            acc = acc.add(&self.component(axis).mul(&other.component(axis)));
        }
        acc
    }
}

/// Scalar triple product det[a(t), b(t), c(t)] as a Bernstein polynomial.
/// Degrees add: cubic, quadratic, cubic inputs give a degree-8 result.
pub fn vecpoly_det3(a: &VecPoly3, b: &VecPoly3, c: &VecPoly3) -> BernsteinPoly {
    a.dot(&b.cross(c))
}
