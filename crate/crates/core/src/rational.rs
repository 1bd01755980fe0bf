//! Exact rationals viewed through the places of `Q`.
//!
//! Every scalar in the library is a [`Rational`]. This module supplies the
//! p-adic valuation and norm, the canonical digit expansion
//! `x = p^v (x_0 + x_1 p + x_2 p^2 + ...)`, the p-adic fractional part, and the
//! digit-wise linear order used to arrange time partitions over `Q_p`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
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
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A rational prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn as_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` for `k >= 0`.
    pub fn pow(self, k: u32) -> BigInt {
        num_traits::pow(self.as_bigint(), k as usize)
    }

    /// `p^k` as a rational, `k` of either sign.
    pub fn rational_pow(self, k: i64) -> Rational {
        let magnitude = self.pow(k.unsigned_abs() as u32);
        if k >= 0 {
            Rational::from_integer(magnitude)
        } else {
            Rational::new(BigInt::one(), magnitude)
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A completion of `Q`: the real place or the p-adic place of a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Place {
    Real,
    Prime(Prime),
}

impl Place {
    pub fn prime(p: u64) -> Result<Self> {
        Prime::new(p).map(Place::Prime)
    }

    pub fn as_prime(self) -> Option<Prime> {
        match self {
            Place::Real => None,
            Place::Prime(p) => Some(p),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => f.write_str("inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("real") || s == "∞" {
            return Ok(Place::Real);
        }
        let p: u64 = s.parse().map_err(|_| {
            Error::Parse(format!("invalid place {s:?}: expected \"inf\" or a prime"))
        })?;
        Place::prime(p)
    }
}

/// Parse a rational written as `num/den` or as a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        let t = t.trim();
        let t = t.strip_prefix('+').unwrap_or(t);
        t.parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("invalid integer {t:?} in rational {s:?}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// The p-adic valuation, extended by `+inf` at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

/// Strip every factor `p` from a nonzero integer; returns the count and the cofactor.
pub(crate) fn split_prime_power(n: &BigInt, p: Prime) -> (i64, BigInt) {
    debug_assert!(!n.is_zero());
    let pb = p.as_bigint();
    let mut count = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            return (count, rest);
        }
        rest = q;
        count += 1;
    }
}

/// Returns `(v, u)` with `x = p^v * u` and `u` a p-adic unit. `x` must be nonzero.
pub(crate) fn unit_part(x: &Rational, p: Prime) -> (i64, Rational) {
    let (vn, n) = split_prime_power(x.numer(), p);
    let (vd, d) = split_prime_power(x.denom(), p);
    (vn - vd, Rational::new(n, d))
}

pub fn valuation(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let (vn, _) = split_prime_power(x.numer(), p);
    let (vd, _) = split_prime_power(x.denom(), p);
    Valuation::Finite(vn - vd)
}

/// `|x|_v`, exact.
pub fn norm(x: &Rational, v: Place) -> Rational {
    match v {
        Place::Real => x.abs(),
        Place::Prime(p) => match valuation(x, p) {
            Valuation::Infinite => Rational::zero(),
            Valuation::Finite(k) => p.rational_pow(-k),
        },
    }
}

/// `n * d^{-1} mod p^k` for a rational whose denominator is prime to `p`.
pub(crate) fn residue_mod_prime_power(x: &Rational, p: Prime, k: u32) -> BigInt {
    let modulus = p.pow(k);
    if k == 0 {
        return BigInt::zero();
    }
    let inv = x
        .denom()
        .mod_floor(&modulus)
        .modinv(&modulus)
        .expect("denominator must be prime to p");
    (x.numer() * inv).mod_floor(&modulus)
}

/// Canonical expansion `p^valuation * sum_i digits[i] p^i`, truncated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitExpansion {
    pub prime: Prime,
    pub valuation: i64,
    pub digits: Vec<u64>,
}

impl DigitExpansion {
    /// The rational `p^v * sum_i x_i p^i` carried by the known digits.
    pub fn reconstruct(&self) -> Rational {
        let p = self.prime.as_bigint();
        let mut acc = BigInt::zero();
        for d in self.digits.iter().rev() {
            acc = acc * &p + BigInt::from(*d);
        }
        Rational::from_integer(acc) * self.prime.rational_pow(self.valuation)
    }
}

/// First `count` canonical digits of a nonzero rational.
pub fn digits(x: &Rational, p: Prime, count: usize) -> Result<DigitExpansion> {
    if x.is_zero() {
        return Err(Error::ZeroExpansion);
    }
    let (v, unit) = unit_part(x, p);
    let residue = residue_mod_prime_power(&unit, p, count as u32);
    let pb = p.as_bigint();
    let mut rest = residue;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (q, r) = rest.div_rem(&pb);
        out.push(r.to_u64().expect("digit fits in u64"));
        rest = q;
    }
    Ok(DigitExpansion {
        prime: p,
        valuation: v,
        digits: out,
    })
}

/// Digit `m` (counting from the leading digit) of a nonzero rational.
pub(crate) fn digit_at(x: &Rational, p: Prime, m: u32) -> u64 {
    let (_, unit) = unit_part(x, p);
    let residue = residue_mod_prime_power(&unit, p, m + 1);
    (residue / p.pow(m)).to_u64().expect("digit fits in u64")
}

/// `{x}_p`: the sum of the negative-power terms of the canonical expansion.
pub fn fractional_part(x: &Rational, p: Prime) -> Rational {
    let v = match valuation(x, p) {
        Valuation::Infinite => return Rational::zero(),
        Valuation::Finite(v) if v >= 0 => return Rational::zero(),
        Valuation::Finite(v) => v,
    };
    // x = n / (p^k m) with m prime to p; {x}_p = c / p^k with c = n m^{-1} mod p^k.
    let k = (-v) as u32;
    let modulus = p.pow(k);
    let m = x.denom() / &modulus;
    let inv = m
        .mod_floor(&modulus)
        .modinv(&modulus)
        .expect("cofactor is prime to p");
    let c = (x.numer() * inv).mod_floor(&modulus);
    Rational::new(c, modulus)
}

/// The linear order on `Q_p`: first by norm, then by the first differing digit.
pub fn linear_cmp(x: &Rational, y: &Rational, p: Prime) -> Ordering {
    if x == y {
        return Ordering::Equal;
    }
    let (vx, vy) = (valuation(x, p), valuation(y, p));
    // Larger valuation means smaller norm.
    match vy.cmp(&vx) {
        Ordering::Equal => {}
        other => return other,
    }
    let v = vx
        .finite()
        .expect("x != y and equal valuations exclude zero");
    // Digits agree below index m and differ at m, where v + m = val(x - y).
    let diff = valuation(&(x - y), p).finite().expect("x != y");
    let m = (diff - v) as u32;
    digit_at(x, p, m).cmp(&digit_at(y, p, m))
}

pub fn linear_less(x: &Rational, y: &Rational, p: Prime) -> bool {
    linear_cmp(x, y, p) == Ordering::Less
}

/// The prime factors of a nonzero integer, by trial division.
#[cfg(test)]
pub(crate) fn prime_support(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut f = 2u64;
    while !n.is_one() && !n.is_zero() {
        let fb = BigInt::from(f);
        if &fb * &fb > n {
            out.push(n.to_u64().expect("trial division leaves a small cofactor"));
            break;
        }
        if (&n % &fb).is_zero() {
            out.push(f);
            while (&n % &fb).is_zero() {
                n /= &fb;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    out
}

pub(crate) fn sign_of(x: &Rational) -> Sign {
    x.numer().sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&q("9/4"), p(3)), Valuation::Finite(2));
        assert_eq!(valuation(&q("5/6"), p(2)), Valuation::Finite(-1));
        assert_eq!(valuation(&q("0"), p(7)), Valuation::Infinite);
        assert!(Valuation::Finite(i64::MAX) < Valuation::Infinite);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&q("3"), Place::prime(3).unwrap()), q("1/3"));
        assert_eq!(norm(&q("1/12"), Place::prime(2).unwrap()), q("4"));
        assert_eq!(norm(&q("-5/2"), Place::Real), q("5/2"));
        assert_eq!(norm(&q("0"), Place::prime(5).unwrap()), q("0"));
    }

    /// Residue extraction one digit at a time: subtract the digit, divide by p.
    fn digits_by_peeling(x: &Rational, prime: Prime, count: usize) -> (i64, Vec<u64>) {
        let (v, mut u) = unit_part(x, prime);
        let pr = Rational::from_integer(prime.as_bigint());
        let mut out = Vec::new();
        for _ in 0..count {
            let d = (0..prime.get())
                .find(|d| {
                    let t = &u - Rational::from_integer(BigInt::from(*d));
                    t.is_zero() || valuation(&t, prime) >= Valuation::Finite(1)
                })
                .unwrap();
            out.push(d);
            u = (u - Rational::from_integer(BigInt::from(d))) / &pr;
        }
        (v, out)
    }

    #[test]
    fn digit_examples() {
        let d = digits(&q("5"), p(3), 3).unwrap();
        assert_eq!((d.valuation, d.digits), (0, vec![2, 1, 0]));
        let d = digits(&q("-1"), p(3), 4).unwrap();
        assert_eq!(digits_by_peeling(&q("-1"), p(3), 4), (0, vec![2, 2, 2, 2]));
        assert_eq!((d.valuation, d.digits), (0, vec![2, 2, 2, 2]));
        let d = digits(&q("1/3"), p(3), 2).unwrap();
        assert_eq!((d.valuation, d.digits), (-1, vec![1, 0]));
        assert_eq!(digits(&q("0"), p(3), 2), Err(Error::ZeroExpansion));
    }

    #[test]
    fn digits_match_peeling_oracle() {
        for s in ["7/10", "-22/9", "1/7", "250/3", "-1/2"] {
            for pr in [2, 3, 5, 7] {
                let d = digits(&q(s), p(pr), 8).unwrap();
                assert_eq!(
                    (d.valuation, d.digits.clone()),
                    digits_by_peeling(&q(s), p(pr), 8)
                );
            }
        }
    }

    #[test]
    fn fractional_part_examples() {
        assert_eq!(fractional_part(&q("7/5"), p(3)), q("0"));
        assert_eq!(fractional_part(&q("10/9"), p(3)), q("1/9"));
        // -1/3 = 2*3^-1 + 2 + 2*3 + ...
        let d = digits(&q("-1/3"), p(3), 1).unwrap();
        assert_eq!(d.reconstruct(), q("2/3"));
        assert_eq!(fractional_part(&q("-1/3"), p(3)), q("2/3"));
        assert_eq!(fractional_part(&q("0"), p(3)), q("0"));
    }

    #[test]
    fn linear_order_examples() {
        assert!(linear_less(&q("3"), &q("1"), p(3)));
        assert!(linear_less(&q("1"), &q("4"), p(3)));
        assert!(!linear_less(&q("4"), &q("4"), p(3)));
        assert!(linear_less(&q("0"), &q("27"), p(3)));
    }

    #[test]
    fn parsing() {
        assert_eq!(q("6/4"), Rational::new(3.into(), 2.into()));
        assert_eq!(q("-7"), Rational::from_integer((-7).into()));
        assert_eq!(q("3/-6"), q("-1/2"));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!("inf".parse::<Place>().unwrap(), Place::Real);
        assert_eq!("13".parse::<Place>().unwrap(), Place::prime(13).unwrap());
        assert_eq!("12".parse::<Place>(), Err(Error::NotPrime(12)));
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|n| is_prime(*n)).collect();
        assert_eq!(
            small,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn prime_support_of_integers() {
        assert_eq!(prime_support(&BigInt::from(360)), vec![2, 3, 5]);
        assert_eq!(prime_support(&BigInt::from(-49)), vec![7]);
        assert!(prime_support(&BigInt::from(1)).is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn prime() -> impl Strategy<Value = Prime> {
            prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]).prop_map(|n| Prime::new(n).unwrap())
        }

        fn rational() -> impl Strategy<Value = Rational> {
            (
                -5000i64..5000,
                1i64..3000,
                -4i64..4,
                prop::sample::select(vec![2u64, 3, 5]),
            )
                .prop_map(|(n, d, k, b)| {
                    Rational::new(n.into(), d.into()) * Prime::new(b).unwrap().rational_pow(k)
                })
        }

        fn nonzero() -> impl Strategy<Value = Rational> {
            rational().prop_filter("nonzero", |x| !x.is_zero())
        }

        proptest! {
            #[test]
            fn ultrametric(x in rational(), y in rational(), pr in prime()) {
                let v = Place::Prime(pr);
                let bound = norm(&x, v).max(norm(&y, v));
                prop_assert!(norm(&(&x + &y), v) <= bound);
            }

            #[test]
            fn norms_are_multiplicative(x in rational(), y in rational(), pr in prime()) {
                for v in [Place::Real, Place::Prime(pr)] {
                    prop_assert_eq!(norm(&(&x * &y), v), norm(&x, v) * norm(&y, v));
                }
            }

            #[test]
            fn product_formula(x in nonzero()) {
                let mut primes = prime_support(x.numer());
                primes.extend(prime_support(x.denom()));
                let product = primes
                    .into_iter()
                    .fold(norm(&x, Place::Real), |acc, p| acc * norm(&x, Place::prime(p).unwrap()));
                prop_assert_eq!(product, Rational::one());
            }

            #[test]
            fn fractional_part_is_additive_mod_one(x in rational(), y in rational(), pr in prime()) {
                let (fx, fy) = (fractional_part(&x, pr), fractional_part(&y, pr));
                prop_assert!(fx >= Rational::zero() && fx < Rational::one());
                let diff = fractional_part(&(&x + &y), pr) - fx.clone() - fy;
                prop_assert!(diff.is_integer());
                let rest = &x - fx;
                prop_assert!(rest.is_zero() || valuation(&rest, pr) >= Valuation::Finite(0));
            }

            #[test]
            fn digits_reconstruct_modulo_precision(x in nonzero(), pr in prime(), k in 1usize..12) {
                let d = digits(&x, pr, k).unwrap();
                prop_assert!(d.digits[0] != 0);
                prop_assert!(d.digits.iter().all(|c| *c < pr.get()));
                let err = &x - d.reconstruct();
                prop_assert!(err.is_zero() || valuation(&err, pr) >= Valuation::Finite(d.valuation + k as i64));
            }

            #[test]
            fn linear_order_is_strict_and_total(x in rational(), y in rational(), z in rational(), pr in prime()) {
                let (xy, yx) = (linear_less(&x, &y, pr), linear_less(&y, &x, pr));
                prop_assert_eq!(u8::from(xy) + u8::from(yx) + u8::from(x == y), 1);
                if xy && linear_less(&y, &z, pr) {
                    prop_assert!(linear_less(&x, &z, pr));
                }
            }
        }
    }
}
