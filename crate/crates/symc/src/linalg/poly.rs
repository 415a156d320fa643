//! Dense univariate polynomials over the exact scalar field.
//!
//! Coefficients are stored low degree first.  Everything here is exact; the
//! main uses are minimal polynomials, squarefree parts, and the Bezout data
//! behind the Newton iteration for Jordan decompositions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    /// Coefficients, `coeffs[k]` multiplying `x^k`.  Always trimmed so the
    /// last entry is nonzero (the zero polynomial stores an empty vector).
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![Scalar::one()] }
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Polynomial { coeffs: vec![Scalar::zero(), Scalar::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Result<Polynomial> {
        let lead = self
            .leading()
            .ok_or_else(|| Error::arg("cannot normalize the zero polynomial"))?;
        if lead.is_one() {
            return Ok(self.clone());
        }
        let inv = lead.inv()?;
        Ok(Polynomial::new(
            self.coeffs.iter().map(|c| c * &inv).collect(),
        ))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero);
            let b = other.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero);
            out.push(&a + &b);
        }
        Polynomial::new(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero);
            let b = other.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero);
            out.push(&a - &b);
        }
        Polynomial::new(out)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Polynomial::new(out)
    }

    /// Euclidean division: returns `(q, r)` with `self = q*other + r` and
    /// `deg r < deg other`.
    pub fn divrem(&self, other: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dlead = other
            .leading()
            .ok_or_else(|| Error::arg("polynomial division by zero"))?;
        let dinv = dlead.inv()?;
        let ddeg = other.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= ddeg {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut quo = vec![Scalar::zero(); rem.len() - ddeg];
        for k in (ddeg..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let c = &rem[k] * &dinv;
            let shift = k - ddeg;
            for (j, d) in other.coeffs.iter().enumerate() {
                if !d.is_zero() {
                    rem[shift + j] -= &(&c * d);
                }
            }
            quo[shift] = c;
        }
        Ok((Polynomial::new(quo), Polynomial::new(rem)))
    }

    /// Scalar multiple of `self` with Gaussian-integer coefficients: multiply
    /// by the lcm of all coefficient denominators.
    fn integer_scaled(&self) -> Polynomial {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.re().denom());
            l = l.lcm(c.im().denom());
        }
        if l.is_one() {
            return self.clone();
        }
        let f = Scalar::from_rational(BigRational::from(l));
        Polynomial::new(self.coeffs.iter().map(|c| c * &f).collect())
    }

    /// Pseudo-remainder `lc(b)^{deg a − deg b + 1} · a  mod  b`, computed
    /// without any coefficient division, so Gaussian-integer inputs stay
    /// Gaussian-integer.  Requires `deg a ≥ deg b` and `b ≠ 0`.
    fn pseudo_rem(a: &Polynomial, b: &Polynomial) -> Polynomial {
        let db = b.degree().expect("pseudo-division by zero");
        let da = a.degree().expect("pseudo-division of zero");
        debug_assert!(da >= db);
        let lc = b.leading().expect("nonzero").clone();
        let mut r = a.clone();
        let mut e = da - db + 1;
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let rl = r.leading().expect("nonzero").clone();
            let shift = dr - db;
            // r ← lc·r − rl·x^shift·b; the top coefficients cancel exactly.
            let mut out = vec![Scalar::zero(); dr];
            for (k, slot) in out.iter_mut().enumerate() {
                let mut v = if r.coeffs[k].is_zero() {
                    Scalar::zero()
                } else {
                    &lc * &r.coeffs[k]
                };
                if k >= shift {
                    let bc = &b.coeffs[k - shift];
                    if !bc.is_zero() {
                        v = &v - &(&rl * bc);
                    }
                }
                *slot = v;
            }
            r = Polynomial::new(out);
            e -= 1;
        }
        // Compensate skipped multiplications when the degree dropped by more
        // than one per step, keeping the exact subresultant scaling.
        if e > 0 && !r.is_zero() {
            let mut f = Scalar::one();
            for _ in 0..e {
                f = &f * &lc;
            }
            r = Polynomial::new(r.coeffs.iter().map(|c| c * &f).collect());
        }
        r
    }

    /// Monic greatest common divisor, via the subresultant pseudo-remainder
    /// sequence over the Gaussian integers.  Plain Euclidean remainders square
    /// coefficient bit-lengths at every step on the large minimal polynomials
    /// this crate produces; the subresultant sequence keeps intermediate
    /// coefficients polynomially bounded and all its divisions are exact.
    pub fn gcd(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.is_zero() {
            return if other.is_zero() { Ok(Polynomial::zero()) } else { other.monic() };
        }
        if other.is_zero() {
            return self.monic();
        }
        let mut a = self.integer_scaled();
        let mut b = other.integer_scaled();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        if b.degree() == Some(0) {
            return Ok(Polynomial::one());
        }
        let mut g = Scalar::one();
        let mut h = Scalar::one();
        loop {
            let delta = a.degree().expect("nonzero") - b.degree().expect("nonzero");
            let r = Polynomial::pseudo_rem(&a, &b);
            if r.is_zero() {
                return b.monic();
            }
            if r.degree() == Some(0) {
                return Ok(Polynomial::one());
            }
            // Divide the remainder by g·h^δ; exact by the subresultant theorem.
            let mut divisor = g.clone();
            for _ in 0..delta {
                divisor = &divisor * &h;
            }
            let dinv = divisor.inv()?;
            a = b;
            b = Polynomial::new(r.coeffs.iter().map(|c| c * &dinv).collect());
            debug_assert!(
                b.coeffs.iter().all(Scalar::is_integral),
                "inexact subresultant division"
            );
            g = a.leading().expect("nonzero").clone();
            // h ← g^δ · h^{1−δ}, again exact.
            h = match delta {
                0 => h,
                1 => g.clone(),
                d => {
                    let mut num = Scalar::one();
                    for _ in 0..d {
                        num = &num * &g;
                    }
                    let mut den = Scalar::one();
                    for _ in 0..d - 1 {
                        den = &den * &h;
                    }
                    &num / &den
                }
            };
        }
    }

    /// Extended Euclid: returns `(g, u, v)` with `u*self + v*other = g`, `g`
    /// monic (or zero when both inputs are zero).
    pub fn extended_gcd(&self, other: &Polynomial) -> Result<(Polynomial, Polynomial, Polynomial)> {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut u0 = Polynomial::one();
        let mut u1 = Polynomial::zero();
        let mut v0 = Polynomial::zero();
        let mut v1 = Polynomial::one();
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            let nu = u0.sub(&q.mul(&u1));
            let nv = v0.sub(&q.mul(&v1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = nu;
            v0 = v1;
            v1 = nv;
        }
        if r0.is_zero() {
            return Ok((r0, u0, v0));
        }
        let lead = r0.leading().expect("nonzero").clone();
        let inv = lead.inv()?;
        let scale = Polynomial::new(vec![inv]);
        Ok((r0.monic()?, u0.mul(&scale), v0.mul(&scale)))
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| &Scalar::from_int(k as i64) * c)
            .collect();
        Polynomial::new(out)
    }

    /// The radical `self / gcd(self, self')`: same roots, all simple.
    /// Requires a nonzero input.
    pub fn squarefree_part(&self) -> Result<Polynomial> {
        if self.is_zero() {
            return Err(Error::arg("squarefree part of the zero polynomial"));
        }
        let g = self.gcd(&self.derivative())?;
        if g.is_one() || g.is_zero() {
            return self.monic();
        }
        let (q, r) = self.divrem(&g)?;
        debug_assert!(r.is_zero(), "gcd must divide the polynomial");
        q.monic()
    }

    /// Whether all roots are simple, i.e. `gcd(f, f') = 1`.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::arg("squarefree test on the zero polynomial"));
        }
        if self.coeffs.len() == 1 {
            return Ok(true);
        }
        let g = self.gcd(&self.derivative())?;
        Ok(g.is_one())
    }

    pub fn eval_scalar(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &Matrix) -> Result<Matrix> {
        if !m.is_square() {
            return Err(Error::Dimension("polynomial evaluation needs a square matrix".into()));
        }
        let n = m.nrows();
        let mut acc = Matrix::zero(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &acc * m;
            if !c.is_zero() {
                for i in 0..n {
                    acc.set(i, i, &acc.get(i, i).clone() + c);
                }
            }
        }
        Ok(acc)
    }

    /// Human-readable rendering, e.g. `x^2 - 3*x + 2`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_rational() && c.re_is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if out.is_empty() {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push(' ');
                out.push_str(sign);
                out.push(' ');
            }
            let coeff_str = mag.render();
            let coeff_one = mag.is_one();
            match k {
                0 => out.push_str(&coeff_str),
                1 => {
                    if !coeff_one {
                        out.push_str(&coeff_str);
                        out.push('*');
                    }
                    out.push_str(var);
                }
                _ => {
                    if !coeff_one {
                        out.push_str(&coeff_str);
                        out.push('*');
                    }
                    out.push_str(&format!("{var}^{k}"));
                }
            }
        }
        out
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[i64]) -> Polynomial {
        Polynomial::new(coeffs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    #[test]
    fn arithmetic_and_render() {
        // (x - 1)(x - 2) = x^2 - 3x + 2
        let f = p(&[-1, 1]).mul(&p(&[-2, 1]));
        assert_eq!(f, p(&[2, -3, 1]));
        assert_eq!(f.render("x"), "x^2 - 3*x + 2");
        assert_eq!(p(&[0, 1]).render("x"), "x");
        assert_eq!(p(&[0, 0, 2]).render("x"), "2*x^2");
        assert_eq!(Polynomial::zero().render("x"), "0");
    }

    #[test]
    fn division_with_remainder() {
        let f = p(&[2, -3, 1]); // x^2 - 3x + 2
        let g = p(&[-1, 1]); // x - 1
        let (q, r) = f.divrem(&g).unwrap();
        assert_eq!(q, p(&[-2, 1]));
        assert!(r.is_zero());
        let (q2, r2) = f.divrem(&p(&[0, 0, 0, 1])).unwrap();
        assert!(q2.is_zero());
        assert_eq!(r2, f);
        assert!(f.divrem(&Polynomial::zero()).is_err());
    }

    #[test]
    fn gcd_and_bezout() {
        let f = p(&[2, -3, 1]); // (x-1)(x-2)
        let g = p(&[-2, 3, -1]); // -(x-1)(x-2)... actually -(x^2-3x+2)
        assert_eq!(f.gcd(&g).unwrap(), f.monic().unwrap());
        let a = p(&[-1, 1]).mul(&p(&[-1, 1])); // (x-1)^2
        let b = p(&[-1, 0, 1]); // (x-1)(x+1)
        let (gg, u, v) = a.extended_gcd(&b).unwrap();
        assert_eq!(gg, p(&[-1, 1]));
        assert_eq!(u.mul(&a).add(&v.mul(&b)), gg);
    }

    #[test]
    fn squarefree_machinery() {
        let f = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[-2, 1])); // (x-1)^2 (x-2)
        assert!(!f.is_squarefree().unwrap());
        let rad = f.squarefree_part().unwrap();
        assert_eq!(rad, p(&[2, -3, 1])); // (x-1)(x-2)
        assert!(rad.is_squarefree().unwrap());
        assert!(Polynomial::zero().is_squarefree().is_err());
        assert!(p(&[5]).is_squarefree().unwrap());
    }

    #[test]
    fn evaluation() {
        let f = p(&[2, -3, 1]);
        assert!(f.eval_scalar(&Scalar::from_int(1)).is_zero());
        assert!(f.eval_scalar(&Scalar::from_int(2)).is_zero());
        assert_eq!(f.eval_scalar(&Scalar::from_int(3)), Scalar::from_int(2));
        // Evaluate at a diagonal matrix: result annihilates eigenvalues 1, 2.
        let m = Matrix::from_rows(vec![
            vec![Scalar::from_int(1), Scalar::zero()],
            vec![Scalar::zero(), Scalar::from_int(2)],
        ])
        .unwrap();
        let fm = f.eval_matrix(&m).unwrap();
        assert!(fm.is_zero());
    }

    #[test]
    fn derivative_rules() {
        let f = p(&[2, -3, 1]);
        assert_eq!(f.derivative(), p(&[-3, 2]));
        assert!(p(&[7]).derivative().is_zero());
    }
}
