//! p-adic analytic functions through truncated power series.
//!
//! Values are [`PadicTruncation`]s: a p-adic number known modulo `p^P`.
//! Arithmetic never overstates precision, and [`series_eval`] stops only once
//! a proven tail bound (or, for streams without one, a conservative window
//! heuristic) places every remaining term inside `O(p^P)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::characters::legendre;
use crate::characters::LegendreValue;
use crate::error::{Error, Result};
use crate::rational::{digits, linear_cmp, residue_mod_prime_power, unit_part, valuation, Prime};
use crate::Rational;

/// Precision recorded for a value that is exactly zero.
const EXACT: i64 = i64::MAX / 8;

/// A p-adic number `p^v (d_0 + d_1 p + ...) + O(p^P)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicTruncation {
    prime: Prime,
    valuation: i64,
    digits: Vec<u64>,
    precision: i64,
}

impl PadicTruncation {
    /// `O(p^precision)`
    pub fn zero(prime: Prime, precision: i64) -> Self {
        PadicTruncation {
            prime,
            valuation: precision,
            digits: Vec::new(),
            precision,
        }
    }

    /// `x + O(p^precision)`.
    pub fn from_rational(x: &Rational, prime: Prime, precision: i64) -> Self {
        let v = match valuation(x, prime).finite() {
            Some(v) if v < precision => v,
            _ => return PadicTruncation::zero(prime, precision),
        };
        let expansion = digits(x, prime, (precision - v) as usize).expect("x is nonzero");
        let mut t = PadicTruncation {
            prime,
            valuation: v,
            digits: expansion.digits,
            precision,
        };
        t.normalize();
        t
    }

    fn normalize(&mut self) {
        let lead = self.digits.iter().position(|d| *d != 0);
        match lead {
            None => {
                self.digits.clear();
                self.valuation = self.precision;
            }
            Some(i) => {
                self.digits.drain(..i);
                self.valuation += i as i64;
            }
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// Absolute precision `P`: the value is known modulo `p^P`.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// Valuation, or `None` when the value is indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.valuation)
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// The rational `p^v sum_i d_i p^i` carried by the known digits.
    pub fn to_rational(&self) -> Rational {
        if self.is_zero() {
            return Rational::zero();
        }
        let p = self.prime.as_bigint();
        let mut acc = BigInt::zero();
        for d in self.digits.iter().rev() {
            acc = acc * &p + BigInt::from(*d);
        }
        Rational::from_integer(acc) * self.prime.rational_pow(self.valuation)
    }

    /// Valuation used in error propagation: a zero counts as `O(p^P)`.
    fn magnitude_exponent(&self) -> i64 {
        self.valuation
    }

    /// Drops digits beyond `p^precision`; never raises precision.
    pub fn with_precision(&self, precision: i64) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        PadicTruncation::from_rational(&self.to_rational(), self.prime, precision)
    }

    /// True when both values are known modulo `p^k` and agree there.
    pub fn congruent(&self, other: &Self, k: i64) -> bool {
        if self.precision < k || other.precision < k || self.prime != other.prime {
            return false;
        }
        let diff = self.to_rational() - other.to_rational();
        valuation(&diff, self.prime).finite().is_none_or(|v| v >= k)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prime, other.prime);
        let precision = self.precision.min(other.precision);
        PadicTruncation::from_rational(
            &(self.to_rational() + other.to_rational()),
            self.prime,
            precision,
        )
    }

    pub fn neg(&self) -> Self {
        PadicTruncation::from_rational(&-self.to_rational(), self.prime, self.precision)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.prime, other.prime);
        let precision = self
            .magnitude_exponent()
            .saturating_add(other.precision)
            .min(other.magnitude_exponent().saturating_add(self.precision))
            .min(EXACT);
        PadicTruncation::from_rational(
            &(self.to_rational() * other.to_rational()),
            self.prime,
            precision,
        )
    }

    /// Multiplication by an exact rational.
    pub fn scale(&self, c: &Rational) -> Self {
        match valuation(c, self.prime).finite() {
            None => PadicTruncation::zero(self.prime, EXACT),
            Some(vc) => PadicTruncation::from_rational(
                &(self.to_rational() * c),
                self.prime,
                self.precision.saturating_add(vc).min(EXACT),
            ),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::PrecisionInsufficient {
                needed: self.precision + 1,
                available: self.precision,
            });
        }
        let precision = self.precision - 2 * self.valuation;
        Ok(PadicTruncation::from_rational(
            &self.to_rational().recip(),
            self.prime,
            precision,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// `{x}_p`, defined once the value is known modulo `Z_p`.
    pub fn fractional_part(&self) -> Result<Rational> {
        if self.precision < 0 {
            return Err(Error::PrecisionInsufficient {
                needed: 0,
                available: self.precision,
            });
        }
        Ok(crate::rational::fractional_part(
            &self.to_rational(),
            self.prime,
        ))
    }
}

impl fmt::Display for PadicTruncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prime;
        if !self.is_zero() {
            write!(f, "{p}^{}·(", self.valuation)?;
            for (i, d) in self.digits.iter().enumerate() {
                match i {
                    0 => write!(f, "{d}")?,
                    1 => write!(f, " + {d}·{p}")?,
                    _ => write!(f, " + {d}·{p}^{i}")?,
                }
            }
            write!(f, ") + ")?;
        }
        write!(f, "O({p}^{})", self.precision)
    }
}

/// Rational coefficients `c_0, c_1, ...` of a power series `sum c_k x^k`.
pub trait CoefficientStream {
    fn coefficient(&self, k: usize) -> Rational;

    /// A lower bound for `v_p(c_j x^j)` over every `j >= k`, if one is known.
    fn tail_valuation_bound(&self, _k: usize, _p: Prime, _x_valuation: i64) -> Option<i64> {
        None
    }
}

/// Coefficients given by a closure, with no tail bound.
pub struct FromFn<F>(pub F);

impl<F: Fn(usize) -> Rational> CoefficientStream for FromFn<F> {
    fn coefficient(&self, k: usize) -> Rational {
        (self.0)(k)
    }
}

/// `sum x^k`
#[derive(Debug, Clone, Copy, Default)]
pub struct Geometric;

impl CoefficientStream for Geometric {
    fn coefficient(&self, _k: usize) -> Rational {
        Rational::one()
    }

    fn tail_valuation_bound(&self, k: usize, _p: Prime, xv: i64) -> Option<i64> {
        (xv > 0).then(|| k as i64 * xv)
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k as u64).fold(BigInt::one(), |acc, i| acc * i)
}

/// Lower bound `j v - floor((j - 1)/(p - 1))` on `v_p(x^j / j!)` for all `j >= k >= 1`,
/// valid when the bound increases with `j`.
fn factorial_series_bound(k: usize, p: Prime, xv: i64) -> Option<i64> {
    let pm1 = p.get() as i64 - 1;
    // slope xv - 1/(p-1) must be positive
    if xv * pm1 <= 1 {
        return None;
    }
    if k == 0 {
        return Some(0);
    }
    let k = k as i64;
    Some(k * xv - Integer::div_floor(&(k - 1), &pm1))
}

/// `sum x^k / k!`
#[derive(Debug, Clone, Copy, Default)]
pub struct ExpSeries;

impl CoefficientStream for ExpSeries {
    fn coefficient(&self, k: usize) -> Rational {
        Rational::new(BigInt::one(), factorial(k))
    }

    fn tail_valuation_bound(&self, k: usize, p: Prime, xv: i64) -> Option<i64> {
        factorial_series_bound(k, p, xv)
    }
}

/// `sum (-1)^m x^(2m+1) / (2m+1)!`
#[derive(Debug, Clone, Copy, Default)]
pub struct SinSeries;

impl CoefficientStream for SinSeries {
    fn coefficient(&self, k: usize) -> Rational {
        if k % 2 == 0 {
            return Rational::zero();
        }
        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
        Rational::new(BigInt::from(sign), factorial(k))
    }

    fn tail_valuation_bound(&self, k: usize, p: Prime, xv: i64) -> Option<i64> {
        factorial_series_bound(k, p, xv)
    }
}

/// `sum (-1)^m x^(2m) / (2m)!`
#[derive(Debug, Clone, Copy, Default)]
pub struct CosSeries;

impl CoefficientStream for CosSeries {
    fn coefficient(&self, k: usize) -> Rational {
        if k % 2 == 1 {
            return Rational::zero();
        }
        let sign = if (k / 2) % 2 == 0 { 1 } else { -1 };
        Rational::new(BigInt::from(sign), factorial(k))
    }

    fn tail_valuation_bound(&self, k: usize, p: Prime, xv: i64) -> Option<i64> {
        factorial_series_bound(k, p, xv)
    }
}

const MAX_TERMS: usize = 20_000;
const WINDOW: usize = 8;

/// `sum c_k x^k` modulo `p^precision`.
pub fn series_eval<S: CoefficientStream + ?Sized>(
    series: &S,
    x: &Rational,
    p: Prime,
    precision: i64,
) -> Result<PadicTruncation> {
    if x.is_zero() {
        return Ok(PadicTruncation::from_rational(
            &series.coefficient(0),
            p,
            precision,
        ));
    }
    let xv = valuation(x, p).finite().expect("x is nonzero");
    let mut sum = Rational::zero();
    let mut power = Rational::one();
    // valuations of terms, `None` for vanishing ones
    let mut history: Vec<Option<i64>> = Vec::new();
    for k in 0..MAX_TERMS {
        if series
            .tail_valuation_bound(k, p, xv)
            .is_some_and(|b| b >= precision)
        {
            return Ok(PadicTruncation::from_rational(&sum, p, precision));
        }
        let term = series.coefficient(k) * &power;
        history.push(valuation(&term, p).finite());
        sum += term;
        power *= x;

        if history.len() >= 2 * WINDOW {
            let recent = window_min(&history[history.len() - WINDOW..]);
            let before = window_min(&history[history.len() - 2 * WINDOW..history.len() - WINDOW]);
            if let (Some(r), Some(b)) = (recent, before) {
                if r <= b {
                    return Err(Error::Domain(format!(
                        "series terms stop shrinking at x = {x} in Q_{p}"
                    )));
                }
            }
            if recent.is_none_or(|r| r >= precision) && before.is_none_or(|b| b >= precision) {
                return Ok(PadicTruncation::from_rational(&sum, p, precision));
            }
        }
    }
    Err(Error::Domain(format!(
        "series did not settle within {MAX_TERMS} terms"
    )))
}

fn window_min(vals: &[Option<i64>]) -> Option<i64> {
    vals.iter().flatten().copied().min()
}

fn check_trig_domain(x: &Rational, p: Prime) -> Result<()> {
    let least = if p.get() == 2 { 2 } else { 1 };
    match valuation(x, p).finite() {
        Some(v) if v < least => Err(Error::Domain(format!(
            "|{x}|_{p} exceeds {p}^-{least}, outside the trigonometric disc"
        ))),
        _ => Ok(()),
    }
}

pub fn sin_p(x: &Rational, p: Prime, precision: i64) -> Result<PadicTruncation> {
    check_trig_domain(x, p)?;
    series_eval(&SinSeries, x, p, precision)
}

pub fn cos_p(x: &Rational, p: Prime, precision: i64) -> Result<PadicTruncation> {
    check_trig_domain(x, p)?;
    series_eval(&CosSeries, x, p, precision)
}

/// `sin x / cos x`; `cos x` is a unit on the disc, so no precision is lost.
pub fn tan_p(x: &Rational, p: Prime, precision: i64) -> Result<PadicTruncation> {
    let s = sin_p(x, p, precision)?;
    let c = cos_p(x, p, precision)?;
    Ok(s.div(&c)?.with_precision(precision))
}

/// Square root of `a mod p` for an odd prime and a nonzero residue.
fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    let a = a % p;
    if pow(a, (p - 1) / 2) != 1 {
        return None;
    }
    // Tonelli-Shanks
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|z| pow(*z, (p - 1) / 2) == p - 1)?;
    let (mut m, mut c, mut t, mut r) = (s, pow(z, q), pow(a, q), pow(a, q.div_ceil(2)));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul(tt, tt);
            i += 1;
        }
        let b = pow(c, 1 << (m - i - 1));
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    Some(r)
}

/// Root of the unit `u` modulo `p^k` (`k >= 1`, `k >= 2` for `p = 2`), any branch.
fn unit_sqrt(u: &Rational, p: Prime, k: u32) -> Result<BigInt> {
    let modulus = p.pow(k);
    if p.get() == 2 {
        let target = residue_mod_prime_power(u, p, k + 1);
        if (&target % 8u32) != BigInt::one() {
            return Err(Error::NoSquareRoot(2));
        }
        let big_mod = p.pow(k + 1);
        let mut r = BigInt::one();
        for bit in 3..=k {
            // r^2 = u mod 2^bit; fix the next bit of the square
            let next = BigInt::one() << (bit + 1);
            if (&r * &r - &target).mod_floor(&next) != BigInt::zero() {
                r += BigInt::one() << (bit - 1);
            }
        }
        debug_assert!((&r * &r - &target).mod_floor(&big_mod).is_zero() || k < 3);
        return Ok(r.mod_floor(&modulus));
    }
    let u0 = residue_mod_prime_power(u, p, 1)
        .to_u64()
        .expect("digit fits");
    if legendre(&BigInt::from(u0), p)? != LegendreValue::One {
        return Err(Error::NoSquareRoot(p.get()));
    }
    let target = residue_mod_prime_power(u, p, k);
    let mut r = BigInt::from(sqrt_mod_prime(u0, p.get()).ok_or(Error::NoSquareRoot(p.get()))?);
    // Newton: each step doubles the number of correct digits.
    let mut correct = 1u32;
    while correct < k {
        let f = (&r * &r - &target).mod_floor(&modulus);
        let inv = (BigInt::from(2) * &r)
            .modinv(&modulus)
            .expect("2r is a unit");
        r = (&r - f * inv).mod_floor(&modulus);
        correct *= 2;
    }
    debug_assert!((&r * &r - &target).mod_floor(&modulus).is_zero());
    Ok(r)
}

/// Canonical square root: of the two roots, the one first in the linear order.
///
/// The result is known modulo `p^P'` for some `P' >= precision` and squares to
/// `x` modulo `p^precision`.
pub fn sqrt_p(x: &Rational, p: Prime, precision: i64) -> Result<PadicTruncation> {
    if x.is_zero() {
        return Err(Error::InvalidArgument("sqrt_p needs x != 0".into()));
    }
    let (nu, unit) = unit_part(x, p);
    if nu.is_odd() {
        return Err(Error::NoSquareRoot(p.get()));
    }
    let h = nu / 2;
    let floor = if p.get() == 2 { 3 } else { 1 };
    let k = (precision - h).max(precision - 2 * h).max(floor) as u32;
    let r = unit_sqrt(&unit, p, k)?;
    let modulus = p.pow(k);
    let other = (&modulus - &r).mod_floor(&modulus);
    let (r, other) = (Rational::from_integer(r), Rational::from_integer(other));
    let chosen = if linear_cmp(&r, &other, p).is_le() {
        r
    } else {
        other
    };
    let y = chosen * p.rational_pow(h);
    Ok(PadicTruncation::from_rational(&y, p, h + k as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn pr(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn geometric_series_at_three() {
        let t = series_eval(&Geometric, &q("3"), pr(3), 4).unwrap();
        assert_eq!(t, PadicTruncation::from_rational(&q("-1/2"), pr(3), 4));
        let t = series_eval(&FromFn(|_| Rational::one()), &q("3"), pr(3), 4).unwrap();
        assert!(t.congruent(&PadicTruncation::from_rational(&q("-1/2"), pr(3), 4), 4));
    }

    #[test]
    fn series_at_zero_is_constant_term() {
        let t = series_eval(
            &FromFn(|k| Rational::from_integer((k as i64 + 5).into())),
            &q("0"),
            pr(5),
            3,
        )
        .unwrap();
        assert_eq!(t.to_rational(), q("5"));
        assert_eq!(
            sin_p(&q("0"), pr(7), 5).unwrap(),
            PadicTruncation::zero(pr(7), 5)
        );
    }

    #[test]
    fn exp_diverges_at_unit() {
        assert!(matches!(
            series_eval(&ExpSeries, &q("1"), pr(3), 5),
            Err(Error::Domain(_))
        ));
        let inv = FromFn(|k| Rational::new(BigInt::one(), factorial(k)));
        assert!(matches!(
            series_eval(&inv, &q("1"), pr(3), 5),
            Err(Error::Domain(_))
        ));
    }

    /// Partial sum of the sine series far past the point where terms vanish mod p^P.
    fn sin_partial_sum(x: &Rational, terms: usize) -> Rational {
        (0..terms).fold(Rational::zero(), |acc, m| {
            let k = 2 * m + 1;
            let sign = if m % 2 == 0 { 1 } else { -1 };
            acc + Rational::new(BigInt::from(sign), factorial(k)) * num_traits::pow(x.clone(), k)
        })
    }

    #[test]
    fn sin_three_matches_partial_sums() {
        // term m has valuation >= (2m+1) - m = m + 1, so 30 terms settle mod 3^6
        let oracle = PadicTruncation::from_rational(&sin_partial_sum(&q("3"), 30), pr(3), 6);
        let s = sin_p(&q("3"), pr(3), 6).unwrap();
        assert_eq!(s, oracle);
        assert_eq!(s.valuation(), Some(1));
        // 3 - 27/6 = 3 - 9/2: same residue mod 3^3 as the leading two terms
        assert!(s.congruent(&PadicTruncation::from_rational(&q("-3/2"), pr(3), 3), 3));
    }

    #[test]
    fn trig_domain_errors() {
        assert!(matches!(sin_p(&q("1"), pr(3), 5), Err(Error::Domain(_))));
        assert!(matches!(cos_p(&q("2"), pr(2), 5), Err(Error::Domain(_))));
        assert!(cos_p(&q("4"), pr(2), 5).is_ok());
    }

    #[test]
    fn sqrt_examples() {
        let r = sqrt_p(&q("7"), pr(3), 2).unwrap();
        assert!(r.congruent(&PadicTruncation::from_rational(&q("4"), pr(3), 2), 2));
        assert_eq!(sqrt_p(&q("3"), pr(3), 5), Err(Error::NoSquareRoot(3)));
        assert_eq!(sqrt_p(&q("2"), pr(5), 5), Err(Error::NoSquareRoot(5)));
        assert_eq!(sqrt_p(&q("3"), pr(2), 5), Err(Error::NoSquareRoot(2)));
        for (c, p) in [
            ("1", 3),
            ("2", 3),
            ("5/7", 5),
            ("3", 2),
            ("-9/4", 7),
            ("12", 2),
        ] {
            let c = q(c);
            let r = sqrt_p(&(&c * &c), pr(p), 10).unwrap();
            let plus = PadicTruncation::from_rational(&c, pr(p), 10);
            let minus = PadicTruncation::from_rational(&-&c, pr(p), 10);
            assert!(
                r.congruent(&plus, 10) || r.congruent(&minus, 10),
                "sqrt({c}^2) in Q_{p}"
            );
        }
        // canonical branch: leading digit 1 beats 2 in Q_3
        let r = sqrt_p(&q("4"), pr(3), 4).unwrap();
        assert_eq!(r.digits()[0], 1);
    }

    #[test]
    fn tan_is_sin_over_cos() {
        let x = q("6/5");
        let t = tan_p(&x, pr(3), 12).unwrap();
        let back = t.mul(&cos_p(&x, pr(3), 12).unwrap());
        assert!(back.congruent(&sin_p(&x, pr(3), 12).unwrap(), 12));
    }

    #[test]
    fn display_format() {
        let t = PadicTruncation::from_rational(&q("5"), pr(3), 3);
        assert_eq!(t.to_string(), "3^0·(2 + 1·3 + 0·3^2) + O(3^3)");
        assert_eq!(PadicTruncation::zero(pr(2), 4).to_string(), "O(2^4)");
    }

    #[test]
    fn arithmetic_precision_is_pessimistic() {
        let a = PadicTruncation::from_rational(&q("3"), pr(3), 5);
        let b = PadicTruncation::from_rational(&q("9"), pr(3), 4);
        assert_eq!(a.mul(&b).precision(), 5);
        assert_eq!(a.add(&b).precision(), 4);
        assert_eq!(a.recip().unwrap().precision(), 3);
        assert!(PadicTruncation::zero(pr(3), 4).recip().is_err());
        assert_eq!(a.scale(&q("1/9")).precision(), 3);
        assert_eq!(
            PadicTruncation::from_rational(&q("1/9"), pr(3), 0)
                .fractional_part()
                .unwrap(),
            q("1/9")
        );
        assert!(PadicTruncation::from_rational(&q("1/9"), pr(3), -1)
            .fractional_part()
            .is_err());
    }

    fn domain_arg() -> impl Strategy<Value = (u64, Rational)> {
        (
            prop::sample::select(vec![2u64, 3, 5, 7]),
            -30i64..30,
            1i64..20,
            0u32..3,
        )
            .prop_map(|(p, n, d, extra)| {
                let lift = if p == 2 { 2 } else { 1 } + extra;
                let mut den = d;
                while den % p as i64 == 0 {
                    den += 1;
                }
                let x = Rational::new(n.into(), den.into())
                    * Rational::from_integer(BigInt::from(p).pow(lift));
                (p, x)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn precision_soundness((p, x) in domain_arg(), extra in 1i64..6) {
            let lo = sin_p(&x, pr(p), 8).unwrap();
            let hi = sin_p(&x, pr(p), 8 + extra).unwrap();
            prop_assert!(hi.congruent(&lo, 8));
            let lo = cos_p(&x, pr(p), 8).unwrap();
            let hi = cos_p(&x, pr(p), 8 + extra).unwrap();
            prop_assert!(hi.congruent(&lo, 8));
        }

        #[test]
        fn sine_is_odd_cosine_is_even((p, x) in domain_arg()) {
            let s = sin_p(&x, pr(p), 10).unwrap();
            let sn = sin_p(&-&x, pr(p), 10).unwrap();
            prop_assert!(sn.congruent(&s.neg(), 10));
            let c = cos_p(&x, pr(p), 10).unwrap();
            prop_assert!(cos_p(&-&x, pr(p), 10).unwrap().congruent(&c, 10));
        }

        #[test]
        fn pythagoras_and_double_angle((p, x) in domain_arg()) {
            let s = sin_p(&x, pr(p), 12).unwrap();
            let c = cos_p(&x, pr(p), 12).unwrap();
            let one = PadicTruncation::from_rational(&Rational::one(), pr(p), 12);
            prop_assert!(s.mul(&s).add(&c.mul(&c)).congruent(&one, 12));
            let two_x = &x * Rational::from_integer(2.into());
            let s2 = sin_p(&two_x, pr(p), 12).unwrap();
            prop_assert!(s2.congruent(&s.mul(&c).scale(&Rational::from_integer(2.into())), 12));
        }

        #[test]
        fn sqrt_round_trip(p in prop::sample::select(vec![2u64, 3, 5, 7]), n in 1i64..200, d in 1i64..50, w in 0i64..40, shift in -3i64..3) {
            let c = Rational::new(n.into(), d.into()) * Rational::new(BigInt::from(p).pow(2 * (shift + 3) as u32), BigInt::from(p).pow(6));
            let unit = if p == 2 { 1 + 8 * w } else { 1 + p as i64 * w };
            let x = &c * &c * Rational::from_integer(unit.into());
            let r = sqrt_p(&x, pr(p), 15).unwrap();
            let back = r.mul(&r);
            prop_assert!(back.congruent(&PadicTruncation::from_rational(&x, pr(p), 15), 15));
        }
    }
}
