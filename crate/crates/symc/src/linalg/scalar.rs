//! Gaussian rational scalars: elements of `ℚ(i)` with exact arithmetic.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element `re + im·i` of `ℚ(i)`.
///
/// Both parts are arbitrary-precision rationals kept reduced with positive
/// denominators (the `num-rational` invariants).  Purely rational values have
/// `im = 0` and all fast paths branch on that.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Scalar { re: BigRational::one(), im: BigRational::zero() }
    }

    /// The imaginary unit `i`.
    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(v: i64) -> Self {
        Scalar { re: BigRational::from(BigInt::from(v)), im: BigRational::zero() }
    }

    /// Rational `n/d`; panics if `d == 0` (callers pass literals).
    pub fn from_frac(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(n), BigInt::from(d)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    /// Whether the real part is strictly negative (used for rendering).
    pub fn re_is_negative(&self) -> bool {
        self.re < BigRational::zero()
    }

    /// True when both parts are integers (denominator 1).
    pub fn is_integral(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Squared modulus `re² + im²`, a non-negative rational.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::arg("division by zero scalar"));
        }
        if self.im.is_zero() {
            return Ok(Scalar { re: self.re.recip(), im: BigRational::zero() });
        }
        let n = self.norm();
        Ok(Scalar { re: &self.re / &n, im: -(&self.im / &n) })
    }

    /// Rough size measure used for pivot selection: total bit length of all
    /// numerators and denominators involved.
    pub fn weight(&self) -> u64 {
        fn bits(r: &BigRational) -> u64 {
            (r.numer().bits() + r.denom().bits()) as u64
        }
        bits(&self.re) + if self.im.is_zero() { 0 } else { bits(&self.im) }
    }

    /// Stable bytes for hashing into seed derivations.
    pub fn seed_bytes(&self, out: &mut Vec<u8>) {
        for part in [&self.re, &self.im] {
            out.extend_from_slice(&part.numer().to_signed_bytes_le());
            out.push(0xfe);
            out.extend_from_slice(&part.denom().to_signed_bytes_le());
            out.push(0xff);
        }
    }

    /// Parse the textual forms used by element files: `"p/q"`, `"p"`,
    /// `"p/q+r/s*i"`, `"p/q-r/s*i"`, `"r/s*i"`.
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        fn parse_rat(s: &str) -> Result<BigRational> {
            if s.is_empty() {
                return Err(Error::Parse("empty rational".into()));
            }
            let (n, d) = match s.split_once('/') {
                Some((n, d)) => (n, d),
                None => (s, "1"),
            };
            let n: BigInt = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator {n:?}")))?;
            let d: BigInt = d
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator {d:?}")))?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        }
        // Split off an imaginary part ending in `*i`, if present.
        if let Some(im_part) = s.strip_suffix("*i") {
            // Find the split point between real and imaginary summands: the
            // last '+' or '-' that is not a leading sign.
            let bytes = im_part.as_bytes();
            let mut split = None;
            for idx in (1..bytes.len()).rev() {
                if (bytes[idx] == b'+' || bytes[idx] == b'-') && bytes[idx - 1] != b'/' {
                    // also reject a sign that merely follows another sign
                    if bytes[idx - 1] == b'+' || bytes[idx - 1] == b'-' {
                        continue;
                    }
                    split = Some(idx);
                    break;
                }
            }
            match split {
                Some(idx) => {
                    let re = parse_rat(&im_part[..idx])?;
                    let sign = if bytes[idx] == b'-' { -1 } else { 1 };
                    let im = parse_rat(&im_part[idx + 1..])?
                        * BigRational::from(BigInt::from(sign));
                    Ok(Scalar { re, im })
                }
                None => Ok(Scalar { re: BigRational::zero(), im: parse_rat(im_part)? }),
            }
        } else {
            Ok(Scalar { re: parse_rat(&s)?, im: BigRational::zero() })
        }
    }

    /// Canonical display form, inverse to [`Scalar::parse`].
    pub fn render(&self) -> String {
        fn rat(r: &BigRational) -> String {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        if self.im.is_zero() {
            rat(&self.re)
        } else if self.im.is_negative() {
            format!("{}-{}*i", rat(&self.re), rat(&(-self.im.clone())))
        } else {
            format!("{}+{}*i", rat(&self.re), rat(&self.im))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        // Fast path: both rational.
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar { re: &self.re * &rhs.re, im: BigRational::zero() };
        }
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::from_frac(n, d)
    }

    #[test]
    fn arithmetic_basics() {
        let a = s(1, 2);
        let b = s(1, 3);
        assert_eq!((&a + &b).render(), "5/6");
        assert_eq!((&a - &b).render(), "1/6");
        assert_eq!((&a * &b).render(), "1/6");
        assert_eq!((&a / &b).render(), "3/2");
    }

    #[test]
    fn complex_mul_and_inverse() {
        // (1 + 2i)(3 - i) = 5 + 5i
        let a = Scalar::new(
            BigRational::from(BigInt::from(1)),
            BigRational::from(BigInt::from(2)),
        );
        let b = Scalar::new(
            BigRational::from(BigInt::from(3)),
            BigRational::from(BigInt::from(-1)),
        );
        let p = &a * &b;
        assert_eq!(p.render(), "5+5*i");
        let inv = a.inv().unwrap();
        assert!((&a * &inv).is_one());
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = Scalar::i();
        assert_eq!((&i * &i).render(), "-1");
    }

    #[test]
    fn parse_round_trips() {
        for text in ["3/4", "-7/2", "0", "5", "1/2+3/5*i", "1/2-3/5*i", "-2/3-1/7*i"] {
            let v = Scalar::parse(text).unwrap();
            assert_eq!(v.render(), text, "round trip of {text}");
        }
        // Lenient inputs normalize.
        assert_eq!(Scalar::parse("0/1").unwrap().render(), "0");
        assert_eq!(Scalar::parse("2/4").unwrap().render(), "1/2");
        assert_eq!(Scalar::parse("3*i").unwrap().render(), "0+3*i");
        assert_eq!(Scalar::parse(" 1/2 + 1/2*i ").unwrap().render(), "1/2+1/2*i");
    }

    #[test]
    fn parse_rejects_garbage() {
        for text in ["", "1/0", "x", "1/2+*i", "1//2"] {
            assert!(Scalar::parse(text).is_err(), "{text:?} should fail");
        }
    }

    #[test]
    fn division_by_zero_reported() {
        assert!(Scalar::zero().inv().is_err());
    }
}
