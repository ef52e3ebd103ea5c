//! Number domains.
//!
//! Two domains are supported: exact rationals ([`Rational`]) and complex
//! doubles ([`ComplexF`]). Generic code is written against [`Field`]; the
//! tagged [`Scalar`] is only used at the boundary (files, CLI), where the
//! domain is a runtime property.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt::{self, Debug};
use core::ops::Neg;
use core::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Float, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, RowEchelon};
use crate::matrix::Matrix;

/// Exact rational number; always normalized (positive denominator, reduced).
pub type Rational = BigRational;

/// Complex number with `f64` components.
pub type ComplexF = Complex64;

/// Relative pivot tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Rational,
    Complex,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Rational => "rational",
            Domain::Complex => "complex",
        }
    }

    pub fn is_exact(self) -> bool {
        self == Domain::Rational
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Domain::Rational),
            "complex" => Ok(Domain::Complex),
            _ => Err(Error::Parse {
                text: s.to_string(),
                reason: "expected \"rational\" or \"complex\"",
            }),
        }
    }
}

/// A scalar field the algorithms can run over.
///
/// Zero tests go through [`Field::negligible`]: rationals ignore the
/// threshold and test exactly, complex values compare their modulus.
pub trait Field: Num + Neg<Output = Self> + Clone + Debug + PartialEq + Send + Sync + 'static {
    const DOMAIN: Domain;

    fn from_i64(v: i64) -> Self;

    /// Modulus as a float (lossy for rationals).
    fn magnitude(&self) -> f64;

    fn to_complex(&self) -> ComplexF;

    fn negligible(&self, threshold: f64) -> bool;

    fn is_finite(&self) -> bool {
        true
    }

    /// Bits needed to store the value; zero for fixed-size domains.
    fn bit_size(&self) -> u64 {
        0
    }

    /// Some `m`-th root of `self`, if the domain contains one.
    ///
    /// Rationals return the real rational root when it exists; complex
    /// values return the principal root.
    fn root(&self, m: u32) -> Option<Self>;

    fn row_reduce(m: &Matrix<Self>, tol: f64) -> RowEchelon<Self>;

    fn determinant(m: &Matrix<Self>) -> Self;

    fn into_scalar(self) -> Scalar;

    fn from_scalar(s: &Scalar) -> Result<Self>;

    fn powi(&self, e: u32) -> Self {
        num_traits::pow(self.clone(), e as usize)
    }
}

impl Field for Rational {
    const DOMAIN: Domain = Domain::Rational;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_complex(&self) -> ComplexF {
        ComplexF::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn negligible(&self, _threshold: f64) -> bool {
        self.is_zero()
    }

    fn bit_size(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    fn root(&self, m: u32) -> Option<Self> {
        if m == 0 {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.is_negative() && m % 2 == 0 {
            return None;
        }
        let num = self.numer().nth_root(m);
        let den = self.denom().nth_root(m);
        let candidate = Rational::new(num, den);
        (candidate.powi(m) == *self).then_some(candidate)
    }

    fn row_reduce(m: &Matrix<Self>, _tol: f64) -> RowEchelon<Self> {
        linalg::bareiss_row_reduce(m)
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        linalg::bareiss_determinant(m)
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Rational(self)
    }

    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Rational(q) => Ok(q.clone()),
            Scalar::Complex(_) => Err(Error::DomainMismatch {
                left: "rational",
                right: "complex",
            }),
        }
    }
}

impl Field for ComplexF {
    const DOMAIN: Domain = Domain::Complex;

    fn from_i64(v: i64) -> Self {
        ComplexF::new(v as f64, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> ComplexF {
        *self
    }

    fn negligible(&self, threshold: f64) -> bool {
        self.norm() <= threshold
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn root(&self, m: u32) -> Option<Self> {
        if m == 0 {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        Some(ComplexF::from_polar(Float::powf(self.norm(), 1.0 / m as f64), self.arg() / m as f64))
    }

    fn row_reduce(m: &Matrix<Self>, tol: f64) -> RowEchelon<Self> {
        linalg::pivoting_row_reduce(m, tol)
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        linalg::lu_determinant(m)
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Complex(self)
    }

    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Complex(z) => Ok(*z),
            Scalar::Rational(_) => Err(Error::DomainMismatch {
                left: "complex",
                right: "rational",
            }),
        }
    }
}

/// Promotes a rational to a complex double. The flag is `true` when the
/// conversion lost information.
pub fn promote(q: &Rational) -> (ComplexF, bool) {
    let z = q.to_complex();
    let lossy = match Rational::from_float(z.re) {
        Some(back) => back != *q,
        None => true,
    };
    (z, lossy)
}

/// A scalar whose domain is known only at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(Rational),
    Complex(ComplexF),
}

impl Scalar {
    pub fn domain(&self) -> Domain {
        match self {
            Scalar::Rational(_) => Domain::Rational,
            Scalar::Complex(_) => Domain::Complex,
        }
    }

    /// Parses `text` in the given domain.
    ///
    /// Rationals are written `p` or `p/q`; complex values as `a`, `bi`,
    /// `a+bi` or `a-bi` with decimal floats.
    pub fn parse(text: &str, domain: Domain) -> Result<Self> {
        match domain {
            Domain::Rational => parse_rational(text).map(Scalar::Rational),
            Domain::Complex => parse_complex(text).map(Scalar::Complex),
        }
    }

    /// Explicit, possibly lossy, promotion into the complex domain.
    pub fn promote(&self) -> (ComplexF, bool) {
        match self {
            Scalar::Rational(q) => promote(q),
            Scalar::Complex(z) => (*z, false),
        }
    }

    fn same_domain(&self, other: &Scalar) -> Result<()> {
        if self.domain() == other.domain() {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                left: self.domain().name(),
                right: other.domain().name(),
            })
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.same_domain(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a + b),
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.same_domain(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a - b),
            _ => unreachable!(),
        })
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.same_domain(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a * b),
            _ => unreachable!(),
        })
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.same_domain(other)?;
        match (self, other) {
            (Scalar::Rational(_), Scalar::Rational(b)) if b.is_zero() => Err(Error::SingularMatrix),
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a / b)),
            (Scalar::Complex(a), Scalar::Complex(b)) => {
                let q = a / b;
                if q.is_finite() {
                    Ok(Scalar::Complex(q))
                } else {
                    Err(Error::NonFinite)
                }
            }
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{}", q),
            Scalar::Complex(z) => f.write_str(&format_complex(*z)),
        }
    }
}

/// Text form of a field element, in the syntax accepted by [`Scalar::parse`].
pub fn format_field<F: Field>(x: &F) -> String {
    x.clone().into_scalar().to_string()
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let err = |reason| Error::Parse {
        text: text.to_string(),
        reason,
    };
    if t.is_empty() {
        return Err(err("empty"));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let num = BigInt::from_str(num).map_err(|_| err("bad numerator"))?;
    let den = match den {
        Some(d) => BigInt::from_str(d).map_err(|_| err("bad denominator"))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn parse_complex(text: &str) -> Result<ComplexF> {
    let t = text.trim();
    let err = |reason| Error::Parse {
        text: text.to_string(),
        reason,
    };
    let float = |s: &str| -> Result<f64> {
        let v = f64::from_str(s).map_err(|_| err("bad float"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err("non-finite"))
        }
    };
    let imag_coeff = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => float(s),
        }
    };
    if t.is_empty() {
        return Err(err("empty"));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(ComplexF::new(float(t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(ComplexF::new(float(&body[..k])?, imag_coeff(&body[k..])?)),
        None => Ok(ComplexF::new(0.0, imag_coeff(body)?)),
    }
}

fn format_complex(z: ComplexF) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}
