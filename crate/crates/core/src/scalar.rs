//! Exact scalars: arbitrary-precision rationals and `r * sqrt(s)` expressions.
//!
//! Every basis entry that appears in the named lattices (BCC, FCC, the
//! hexagonal prism, ...) is a rational multiple of the square root of a
//! rational, so [`ScalarExpr`] keeps those entries exact while carrying the
//! evaluated `f64` alongside for the floating-point kernels.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("cannot parse {input:?} as a rational number")]
    BadRational { input: String },
    #[error("cannot parse {input:?} as a scalar expression: {reason}")]
    BadExpr { input: String, reason: String },
    #[error("radicand must be positive in {input:?}")]
    NonPositiveRadicand { input: String },
    #[error("no rational p/q with q <= {max_den} within {tol:e} of {x}")]
    NoRationalWithinTolerance { x: f64, max_den: u64, tol: f64 },
    #[error("value {0} is not finite")]
    NotFinite(f64),
}

/// Rational number in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        // BigRational::new reduces and normalises the sign.
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// The exact value of a finite double.
    pub fn from_f64_exact(x: f64) -> Result<Self, ScalarError> {
        BigRational::from_float(x)
            .map(Rational)
            .ok_or(ScalarError::NotFinite(x))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        Rational(&self.0 - self.0.floor())
    }

    pub fn to_f64(&self) -> f64 {
        // Scale down huge numerators/denominators before converting.
        if let (Some(n), Some(d)) = (self.numer().to_f64(), self.denom().to_f64()) {
            if n.is_finite() && d.is_finite() && d != 0.0 {
                return n / d;
            }
        }
        let bits = self.numer().bits().max(self.denom().bits());
        let shift = bits.saturating_sub(1000);
        let n = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

macro_rules! rational_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl FromStr for Rational {
    type Err = ScalarError;

    /// Accepts `n`, `p/q` and decimal literals such as `-0.311` or `2.5e-3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScalarError::BadRational { input: s.to_string() };
        let t = s.trim();
        if t.is_empty() {
            return Err(bad());
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Rational::new(p, q));
        }
        parse_decimal(t).ok_or_else(bad)
    }
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    if neg {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

/// Best rational approximation `p/q` with `q <= max_den`, found from the
/// continued-fraction expansion of the exact value of `x` (convergents and
/// the admissible semiconvergent). Fails if the best candidate is further
/// than `tol` from `x`.
pub fn rational_reconstruct(x: f64, max_den: u64, tol: f64) -> Result<Rational, ScalarError> {
    if !x.is_finite() {
        return Err(ScalarError::NotFinite(x));
    }
    assert!(max_den >= 1 && tol > 0.0, "max_den >= 1 and tol > 0 required");
    let target = Rational::from_f64_exact(x)?;
    let max_den = BigInt::from(max_den);

    // h/k convergent recurrences, seeded with h_{-1}/k_{-1} = 1/0 and h_{-2}/k_{-2} = 0/1.
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut rest = target.0.clone();
    let mut best: Option<Rational> = None;
    loop {
        let a = rest.floor().to_integer();
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > max_den {
            // Largest semiconvergent t with k_prev + t*k <= max_den.
            if !k.is_zero() {
                let t = (&max_den - &k_prev) / &k;
                if t.is_positive() {
                    let semi = Rational::new(&t * &h + &h_prev, &t * &k + &k_prev);
                    best = Some(closer(&target, best, semi));
                }
            }
            break;
        }
        let conv = Rational::new(h_next.clone(), k_next.clone());
        best = Some(closer(&target, best, conv));
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let frac = &rest - rest.floor();
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    let best = best.expect("at least the integer part is a convergent");
    let err = (&best - &target).abs().to_f64();
    if err > tol {
        return Err(ScalarError::NoRationalWithinTolerance {
            x,
            max_den: max_den.to_u64().unwrap_or(u64::MAX),
            tol,
        });
    }
    Ok(best)
}

fn closer(target: &Rational, current: Option<Rational>, candidate: Rational) -> Rational {
    match current {
        None => candidate,
        Some(cur) => {
            let e_cur = (&cur - target).abs();
            let e_new = (&candidate - target).abs();
            match e_new.cmp(&e_cur) {
                Ordering::Less => candidate,
                Ordering::Equal if candidate.denom() < cur.denom() => candidate,
                _ => cur,
            }
        }
    }
}

/// `coeff * sqrt(radicand)` with a cached double value.
///
/// The radicand is kept as a positive integer with small square factors
/// pulled into the coefficient, so two expressions with equal radicands
/// have a rational ratio.
#[derive(Clone, PartialEq)]
pub struct ScalarExpr {
    coeff: Rational,
    radicand: Option<BigInt>,
    value: f64,
}

const SQUARE_FACTOR_SEARCH: u64 = 100_000;

impl ScalarExpr {
    pub fn rational(r: Rational) -> Self {
        let value = r.to_f64();
        ScalarExpr { coeff: r, radicand: None, value }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    /// `r * sqrt(s)`; `s` must be positive.
    pub fn with_sqrt(r: Rational, s: Rational) -> Result<Self, ScalarError> {
        if !s.is_positive() {
            return Err(ScalarError::NonPositiveRadicand { input: format!("{r}*sqrt({s})") });
        }
        // sqrt(p/q) = sqrt(p*q)/q
        let n = s.numer() * s.denom();
        let coeff = &r / &Rational::from_integer(s.denom().clone());
        Ok(Self::canonical(coeff, n))
    }

    /// Exact value of a double, as a rational.
    pub fn from_f64(x: f64) -> Result<Self, ScalarError> {
        Ok(Self::rational(Rational::from_f64_exact(x)?))
    }

    fn canonical(coeff: Rational, radicand: BigInt) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        let (outside, inside) = extract_square(radicand);
        let coeff = coeff * Rational::from_integer(outside);
        if inside.is_one() {
            return Self::rational(coeff);
        }
        let value = coeff.to_f64() * inside.to_f64().unwrap_or(f64::NAN).sqrt();
        ScalarExpr { coeff, radicand: Some(inside), value }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn radicand(&self) -> Option<&BigInt> {
        self.radicand.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_none()
    }

    pub fn neg(&self) -> Self {
        ScalarExpr { coeff: -&self.coeff, radicand: self.radicand.clone(), value: -self.value }
    }

    pub fn mul(&self, other: &ScalarExpr) -> Self {
        let coeff = &self.coeff * &other.coeff;
        match (&self.radicand, &other.radicand) {
            (None, None) => Self::rational(coeff),
            (Some(a), None) | (None, Some(a)) => Self::canonical(coeff, a.clone()),
            (Some(a), Some(b)) => Self::canonical(coeff, a * b),
        }
    }

    /// Exact sum when both terms share a radicand (or one is zero).
    pub fn checked_add(&self, other: &ScalarExpr) -> Option<Self> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        if self.radicand != other.radicand {
            return None;
        }
        let coeff = &self.coeff + &other.coeff;
        Some(match &self.radicand {
            None => Self::rational(coeff),
            Some(r) => Self::canonical(coeff, r.clone()),
        })
    }

    /// `self / other` when the quotient is rational.
    pub fn rational_ratio(&self, other: &ScalarExpr) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Rational::zero());
        }
        (self.radicand == other.radicand).then(|| &self.coeff / &other.coeff)
    }
}

fn extract_square(mut n: BigInt) -> (BigInt, BigInt) {
    let mut outside = BigInt::one();
    let mut f = 2u64;
    while f <= SQUARE_FACTOR_SEARCH {
        let sq = BigInt::from(f * f);
        if sq > n {
            break;
        }
        while (&n % &sq).is_zero() {
            n /= &sq;
            outside *= f;
        }
        f += 1;
    }
    // A leftover perfect square (large prime squared) is still caught here.
    let root = n.sqrt();
    if &root * &root == n {
        outside *= root;
        n = BigInt::one();
    }
    (outside, n)
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.radicand {
            None => write!(f, "{}", self.coeff),
            Some(s) if self.coeff == Rational::one() => write!(f, "sqrt({s})"),
            Some(s) if self.coeff == -Rational::one() => write!(f, "-sqrt({s})"),
            Some(s) => write!(f, "{}*sqrt({})", self.coeff, s),
        }
    }
}

impl FromStr for ScalarExpr {
    type Err = ScalarError;

    /// Grammar: `R`, `[R*]sqrt(S)[/D]`, `-sqrt(S)`, `R/sqrt(S)` where `R`, `S`
    /// and `D` are integers, `p/q` fractions or decimals.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |reason: &str| ScalarError::BadExpr { input: s.to_string(), reason: reason.to_string() };
        let Some(open) = t.find("sqrt(") else {
            return Ok(ScalarExpr::rational(t.parse::<Rational>()?));
        };
        let close = t[open..].find(')').map(|i| i + open).ok_or_else(|| bad("unclosed sqrt("))?;
        let radicand: Rational = t[open + 5..close].parse()?;
        let prefix = &t[..open];
        let suffix = &t[close + 1..];

        // `R/sqrt(S)` is rewritten as (R/S)*sqrt(S).
        if let Some(num) = prefix.strip_suffix('/') {
            if !suffix.is_empty() {
                return Err(bad("unexpected trailing text"));
            }
            let r: Rational = num.parse()?;
            if !radicand.is_positive() {
                return Err(ScalarError::NonPositiveRadicand { input: s.to_string() });
            }
            return ScalarExpr::with_sqrt(&r / &radicand, radicand);
        }
        let coeff = match prefix {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            p => p
                .strip_suffix('*')
                .ok_or_else(|| bad("expected '*' before sqrt"))?
                .parse::<Rational>()?,
        };
        let coeff = if suffix.is_empty() {
            coeff
        } else {
            let d: Rational = suffix
                .strip_prefix('/')
                .ok_or_else(|| bad("unexpected trailing text"))?
                .parse()?;
            if d.is_zero() {
                return Err(bad("division by zero"));
            }
            &coeff / &d
        };
        ScalarExpr::with_sqrt(coeff, radicand)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!("311/1000".parse::<Rational>().unwrap(), Rational::new(311, 1000));
        assert_eq!("0.311".parse::<Rational>().unwrap(), Rational::new(311, 1000));
        assert_eq!("-2/4".parse::<Rational>().unwrap(), Rational::new(-1, 2));
        assert_eq!("2.5e-1".parse::<Rational>().unwrap(), Rational::new(1, 4));
        assert_eq!("7".parse::<Rational>().unwrap(), Rational::from_integer(7));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!(".".parse::<Rational>().is_err());
    }

    #[test]
    fn rational_is_lowest_terms() {
        let r = Rational::new(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(Rational::new(0, 5).denom(), &BigInt::from(1));
    }

    #[test]
    fn fract_and_floor() {
        let r = Rational::new(-7, 3);
        assert_eq!(r.floor(), BigInt::from(-3));
        assert_eq!(r.fract(), Rational::new(2, 3));
    }

    #[test]
    fn scalar_grammar() {
        let e: ScalarExpr = "2/3*sqrt(2)".parse().unwrap();
        assert_eq!(e.coeff(), &Rational::new(2, 3));
        assert_eq!(e.radicand(), Some(&BigInt::from(2)));
        assert!((e.value() - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);

        let e: ScalarExpr = "sqrt(2/3)".parse().unwrap();
        assert!((e.value() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(e.radicand(), Some(&BigInt::from(6)));

        let e: ScalarExpr = "-1/sqrt(5)".parse().unwrap();
        assert!((e.value() + 1.0 / 5f64.sqrt()).abs() < 1e-15);

        let e: ScalarExpr = "sqrt(3)/2".parse().unwrap();
        assert!((e.value() - 3f64.sqrt() / 2.0).abs() < 1e-15);

        let e: ScalarExpr = "3*sqrt(4)".parse().unwrap();
        assert!(e.is_rational());
        assert_eq!(e.coeff(), &Rational::from_integer(6));

        assert!("sqrt(-1)".parse::<ScalarExpr>().is_err());
        assert!("2sqrt(3)".parse::<ScalarExpr>().is_err());
    }

    #[test]
    fn ratio_of_same_radicand_is_rational() {
        let a: ScalarExpr = "-1/3*sqrt(2)".parse().unwrap();
        let b: ScalarExpr = "2/3*sqrt(2)".parse().unwrap();
        assert_eq!(a.rational_ratio(&b), Some(Rational::new(-1, 2)));
        let c: ScalarExpr = "sqrt(3)".parse().unwrap();
        assert_eq!(a.rational_ratio(&c), None);
        // sqrt(8) and sqrt(2) canonicalise to the same radicand
        let d: ScalarExpr = "sqrt(8)".parse().unwrap();
        assert_eq!(d.rational_ratio(&"sqrt(2)".parse().unwrap()), Some(Rational::from_integer(2)));
    }

    #[test]
    fn reconstruct_known_ratios() {
        assert_eq!(rational_reconstruct(0.311, 1_000_000, 1e-9).unwrap(), Rational::new(311, 1000));
        assert_eq!(rational_reconstruct(0.5, 10, 1e-9).unwrap(), Rational::new(1, 2));
        let r = rational_reconstruct(-1.0 / 3.0, 1_000_000, 1e-9).unwrap();
        // cross-multiplication check
        assert_eq!(r.numer() * BigInt::from(3), -r.denom());
    }

    #[test]
    fn reconstruct_fails_outside_tolerance() {
        let err = rational_reconstruct(std::f64::consts::PI, 10, 1e-9).unwrap_err();
        assert!(matches!(err, ScalarError::NoRationalWithinTolerance { .. }));
        // 22/7 is the best with q <= 10
        assert_eq!(rational_reconstruct(std::f64::consts::PI, 10, 1e-2).unwrap(), Rational::new(22, 7));
        // semiconvergent 333/106 beats 22/7 for q <= 110
        assert_eq!(rational_reconstruct(std::f64::consts::PI, 110, 1e-3).unwrap(), Rational::new(333, 106));
    }

    #[test]
    fn reconstruct_integers_and_negatives() {
        assert_eq!(rational_reconstruct(-4.0, 1, 1e-12).unwrap(), Rational::from_integer(-4));
        assert_eq!(rational_reconstruct(-0.75, 100, 1e-12).unwrap(), Rational::new(-3, 4));
    }
}
