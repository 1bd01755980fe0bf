//! Exact unit-complex arithmetic.
//!
//! A [`Phase`] `q` stands for `exp(2 pi i q)` with `q` taken modulo one, and an
//! [`Amplitude`] pairs a phase with the exact square of its modulus. Both the
//! additive characters `chi_v` and the eighth-root-of-unity factors `lambda_v`
//! land in [`Phase`], so every identity between them is a rational identity.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{digits, fractional_part, sign_of, unit_part, Place, Prime};
use crate::Rational;

/// A rational reduced into `[0, 1)`, denoting `exp(2 pi i value)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Phase(Rational);

impl Phase {
    pub fn new(q: Rational) -> Self {
        let r = &q - q.floor();
        Phase(r)
    }

    pub fn zero() -> Self {
        Phase(Rational::zero())
    }

    /// `n / d` reduced modulo one.
    pub fn from_ratio(n: i64, d: i64) -> Self {
        Phase::new(Rational::new(n.into(), d.into()))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Smallest `n` with `n * self == 0`.
    pub fn order(&self) -> BigInt {
        self.0.denom().clone()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        &self + &rhs
    }
}

impl<'a> Add<&'a Phase> for &'a Phase {
    type Output = Phase;
    fn add(self, rhs: &Phase) -> Phase {
        let s = &self.0 + &rhs.0;
        if s >= Rational::one() {
            Phase(s - Rational::one())
        } else {
            Phase(s)
        }
    }
}

impl AddAssign for Phase {
    fn add_assign(&mut self, rhs: Phase) {
        *self = &*self + &rhs;
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        -&self
    }
}

impl Neg for &Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        if self.0.is_zero() {
            Phase::zero()
        } else {
            Phase(Rational::one() - &self.0)
        }
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        &self + &(-&rhs)
    }
}

/// `sqrt(modulus_sq) * exp(2 pi i phase)` with both parts exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Amplitude {
    modulus_sq: Rational,
    phase: Phase,
}

impl Amplitude {
    /// Builds an amplitude; a zero modulus collapses the phase to zero.
    pub fn new(modulus_sq: Rational, phase: Phase) -> Result<Self> {
        if modulus_sq.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "squared modulus {modulus_sq} is negative"
            )));
        }
        Ok(Self::new_unchecked(modulus_sq, phase))
    }

    pub(crate) fn new_unchecked(modulus_sq: Rational, phase: Phase) -> Self {
        debug_assert!(!modulus_sq.is_negative());
        if modulus_sq.is_zero() {
            Amplitude::zero()
        } else {
            Amplitude { modulus_sq, phase }
        }
    }

    pub fn zero() -> Self {
        Amplitude {
            modulus_sq: Rational::zero(),
            phase: Phase::zero(),
        }
    }

    pub fn one() -> Self {
        Amplitude {
            modulus_sq: Rational::one(),
            phase: Phase::zero(),
        }
    }

    pub fn unit(phase: Phase) -> Self {
        Amplitude {
            modulus_sq: Rational::one(),
            phase,
        }
    }

    pub fn modulus_sq(&self) -> &Rational {
        &self.modulus_sq
    }

    pub fn phase(&self) -> &Phase {
        &self.phase
    }

    pub fn is_zero(&self) -> bool {
        self.modulus_sq.is_zero()
    }

    pub fn conj(&self) -> Amplitude {
        Amplitude {
            modulus_sq: self.modulus_sq.clone(),
            phase: -&self.phase,
        }
    }

    /// Floating-point value `sqrt(modulus_sq) * (cos 2 pi phase, sin 2 pi phase)`.
    ///
    /// Relative error is bounded by a few ulps of `F`; for `f64` well under `1e-12`.
    pub fn render<F: Float + FromPrimitive>(&self) -> Complex<F> {
        if self.is_zero() {
            return Complex::new(F::zero(), F::zero());
        }
        let r = F::from_f64(self.modulus_sq.to_f64().unwrap_or(f64::INFINITY).sqrt())
            .expect("modulus representable");
        let (s, c) = sin_cos_turns(&self.phase);
        Complex::new(r * F::from_f64(c).unwrap(), r * F::from_f64(s).unwrap())
    }
}

/// `(sin 2 pi q, cos 2 pi q)` with the quarter-turn values returned exactly.
fn sin_cos_turns(q: &Phase) -> (f64, f64) {
    let quarters = q.value() * Rational::from_integer(4.into());
    if quarters.is_integer() {
        return match quarters.to_integer().to_u8() {
            Some(0) => (0.0, 1.0),
            Some(1) => (1.0, 0.0),
            Some(2) => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    (std::f64::consts::TAU * q.to_f64()).sin_cos()
}

impl Mul for Amplitude {
    type Output = Amplitude;
    fn mul(self, rhs: Amplitude) -> Amplitude {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Amplitude> for &'a Amplitude {
    type Output = Amplitude;
    fn mul(self, rhs: &Amplitude) -> Amplitude {
        Amplitude::new_unchecked(&self.modulus_sq * &rhs.modulus_sq, &self.phase + &rhs.phase)
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sqrt({})*e(2pi i*{})", self.modulus_sq, self.phase)
    }
}

/// Product of two amplitudes.
pub fn amp_mul(a: &Amplitude, b: &Amplitude) -> Amplitude {
    a * b
}

pub fn amp_render(a: &Amplitude) -> Complex<f64> {
    a.render()
}

/// Value of a Legendre symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LegendreValue {
    MinusOne,
    Zero,
    One,
}

impl LegendreValue {
    pub fn as_i8(self) -> i8 {
        match self {
            LegendreValue::MinusOne => -1,
            LegendreValue::Zero => 0,
            LegendreValue::One => 1,
        }
    }
}

/// Additive character: `chi_inf(x) = exp(-2 pi i x)`, `chi_p(x) = exp(2 pi i {x}_p)`.
pub fn chi(v: Place, x: &Rational) -> Phase {
    match v {
        Place::Real => -Phase::new(x.clone()),
        Place::Prime(p) => Phase(fractional_part(x, p)),
    }
}

/// Legendre symbol `(a/p)` by Euler's criterion, for odd `p`.
pub fn legendre(a: &BigInt, p: Prime) -> Result<LegendreValue> {
    if p.get() == 2 {
        return Err(Error::InvalidArgument(
            "the Legendre symbol needs an odd prime".into(),
        ));
    }
    let pb = p.as_bigint();
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return Ok(LegendreValue::Zero);
    }
    let e = (&pb - 1u32) / 2u32;
    let t = r.modpow(&e, &pb);
    Ok(if t.is_one() {
        LegendreValue::One
    } else {
        LegendreValue::MinusOne
    })
}

/// The eighth-root-of-unity factor `lambda_v(a)` of the Gauss integral, as a phase.
pub fn lambda(v: Place, a: &Rational) -> Result<Phase> {
    if a.is_zero() {
        return Err(Error::InvalidArgument(
            "lambda_v is evaluated only at a != 0".into(),
        ));
    }
    let p = match v {
        // (1 - i sign a) / sqrt 2
        Place::Real => {
            return Ok(match sign_of(a) {
                Sign::Minus => Phase::from_ratio(1, 8),
                _ => Phase::from_ratio(7, 8),
            })
        }
        Place::Prime(p) => p,
    };
    let (nu, unit) = unit_part(a, p);
    let count = if p.get() == 2 { 3 } else { 1 };
    let d = digits(&unit, p, count)?;
    Ok(lambda_from_digits(p, nu, &d.digits))
}

/// `lambda_v` of a p-adic number known through its valuation and leading unit digits.
///
/// `unit_digits` must hold at least one digit for odd `p` and three for `p = 2`.
pub(crate) fn lambda_from_digits(p: Prime, nu: i64, unit_digits: &[u64]) -> Phase {
    if p.get() == 2 {
        let (a1, a2) = (unit_digits[1], unit_digits[2]);
        let mut phase = if a1 == 0 {
            Phase::from_ratio(1, 8)
        } else {
            Phase::from_ratio(7, 8)
        };
        if nu.is_odd() && (a1 + a2).is_odd() {
            phase += Phase::from_ratio(1, 2);
        }
        return phase;
    }
    if nu.is_even() {
        return Phase::zero();
    }
    let symbol = legendre(&BigInt::from(unit_digits[0]), p).expect("odd prime");
    match (p.get() % 4, symbol == LegendreValue::MinusOne) {
        (1, false) => Phase::zero(),
        (1, true) => Phase::from_ratio(1, 2),
        (_, false) => Phase::from_ratio(1, 4),
        (_, true) => Phase::from_ratio(3, 4),
    }
}
