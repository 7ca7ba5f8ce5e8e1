//! Exact scalars and polynomials.
//!
//! [`Rat`] is an arbitrary-precision rational, always kept in lowest terms
//! with a positive denominator. [`UniPoly`] is a univariate polynomial with
//! rational coefficients whose [`Ord`] is the asymptotic order: `p < q` iff
//! `q - p` has a positive leading coefficient, i.e. `p(x) < q(x)` for `x ≫ 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"` (surrounding whitespace allowed).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let err = || Error::ParseRational(s.to_string());
    let trimmed = s.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(Rat::new(num, den))
}

/// Univariate polynomial over [`Rat`]; `coeffs[i]` multiplies `x^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// Builds a polynomial from coefficients, constant term first.
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Coefficient of `x^d` (zero beyond the degree).
    pub fn coeff(&self, d: usize) -> Rat {
        self.coeffs.get(d).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Asymptotic sign: the sign of the leading coefficient.
    pub fn signum(&self) -> Ordering {
        match self.leading() {
            None => Ordering::Equal,
            Some(c) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }
}

impl Ord for UniPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        (other - self).signum().reverse()
    }
}

impl PartialOrd for UniPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rat> for UniPoly {
    fn from(c: Rat) -> Self {
        Self::constant(c)
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for UniPoly {
            type Output = UniPoly;
            fn $m(self, rhs: UniPoly) -> UniPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let abs = c.abs();
            match d {
                0 => write!(f, "{}", format_rat(&abs))?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{}", format_rat(&abs))?;
                    }
                    if d == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer_ray(v: &[Rat]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rat::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}
