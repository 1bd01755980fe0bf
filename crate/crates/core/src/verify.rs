//! Seeded invariant suites: each returns the witnesses of every failed trial.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::characters::{chi, lambda, Amplitude, Phase};
use crate::error::{Error, Result};
use crate::gauss::{
    coset_cap, coset_constant_resolution, fresnel_oracle, gauss_full, gauss_stabilization_radius,
    haar_oracle, quad_char_integral_ball, BallSpec,
};
use crate::propagators::{
    finite_n_propagator, k_constant_field, overlap_ball_integral, overlap_vanishing_threshold,
    semigroup_residual, PartitionSpec, System,
};
use crate::rational::{linear_cmp, norm, Place, Prime};
use crate::Rational;

/// Random rationals from a fixed seed.
pub struct Sampler {
    rng: ChaCha8Rng,
}

const BASES: [u64; 4] = [2, 3, 5, 7];

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn integer(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    /// `n/d * p^k` with `p` drawn near the place, so valuations spread out.
    pub fn nonzero(&mut self, place: Place) -> Rational {
        let n = self.integer(1, 9999) * if self.rng.random_bool(0.5) { 1 } else { -1 };
        let d = self.integer(1, 999);
        let base = match place {
            Place::Prime(p) if self.rng.random_bool(0.75) => p,
            _ => Prime::new(BASES[self.rng.random_range(0..BASES.len())]).unwrap(),
        };
        let k = self.integer(-4, 4);
        Rational::new(n.into(), d.into()) * base.rational_pow(k)
    }

    /// Like [`Sampler::nonzero`], but zero one time in eight.
    pub fn rational(&mut self, place: Place) -> Rational {
        if self.rng.random_range(0..8) == 0 {
            Rational::zero()
        } else {
            self.nonzero(place)
        }
    }

    /// `count` distinct times, increasing in the order of the place.
    pub fn times(&mut self, place: Place, count: usize) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::with_capacity(count);
        while out.len() < count {
            let t = self.rational(place);
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out.sort_by(|x, y| place_cmp(place, x, y));
        out
    }

    /// A unit of `Z_p` with small numerator and denominator.
    pub fn small_unit(&mut self, p: Prime) -> Rational {
        loop {
            let n = self.integer(-40, 40);
            let d = self.integer(1, 12);
            let pi = p.get() as i64;
            if n % pi != 0 && d % pi != 0 {
                return Rational::new(n.into(), d.into());
            }
        }
    }
}

fn fmt_list(xs: &[Rational]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

pub fn place_cmp(place: Place, x: &Rational, y: &Rational) -> Ordering {
    match place {
        Place::Real => x.cmp(y),
        Place::Prime(p) => linear_cmp(x, y, p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Lambda,
    Composition,
    Semigroup,
    Overlap,
    Gauss,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Lambda,
        Check::Composition,
        Check::Semigroup,
        Check::Overlap,
        Check::Gauss,
    ];
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Lambda => "lambda",
            Check::Composition => "composition",
            Check::Semigroup => "semigroup",
            Check::Overlap => "overlap",
            Check::Gauss => "gauss",
        })
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub check: Check,
    pub place: Place,
    pub trials: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the check; the real place is rejected for the p-adic-only overlap suite.
pub fn run_check(check: Check, place: Place, trials: usize, seed: u64) -> Result<VerifyReport> {
    let failures = match check {
        Check::Lambda => verify_lambda(place, trials, seed)?,
        Check::Composition => verify_composition(place, trials, seed)?,
        Check::Semigroup => verify_semigroup(place, trials, seed)?,
        Check::Overlap => match place {
            Place::Prime(p) => verify_overlap(p, trials, seed)?,
            Place::Real => {
                return Err(Error::InvalidArgument("overlap needs a prime place".into()))
            }
        },
        Check::Gauss => verify_gauss(place, trials, seed)?,
    };
    Ok(VerifyReport {
        check,
        place,
        trials,
        failures,
    })
}

/// Draws every trial's input up front, then evaluates them in parallel.
fn run_trials<I, F>(inputs: Vec<I>, eval: F) -> Result<Vec<String>>
where
    I: Send + Sync,
    F: Fn(usize, &I) -> Result<Option<String>> + Send + Sync,
{
    let results: Vec<Result<Option<String>>> = inputs
        .par_iter()
        .enumerate()
        .map(|(i, x)| eval(i, x))
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok(failures)
}

fn verify_lambda(place: Place, trials: usize, seed: u64) -> Result<Vec<String>> {
    let mut s = Sampler::new(seed);
    let inputs: Vec<_> = (0..trials)
        .map(|_| (s.nonzero(place), s.nonzero(place)))
        .collect();
    run_trials(inputs, |i, (a, b)| {
        let squares = lambda(place, &(a * a * b))? == lambda(place, b)?;
        let sum = a + b;
        let product = sum.is_zero()
            || lambda(place, a)? + lambda(place, b)?
                == lambda(place, &sum)? + lambda(place, &(a.recip() + b.recip()))?;
        Ok((!(squares && product))
            .then(|| format!("trial {i}: lambda identities fail at a = {a}, b = {b}")))
    })
}

fn verify_composition(place: Place, trials: usize, seed: u64) -> Result<Vec<String>> {
    let mut s = Sampler::new(seed);
    let inputs: Vec<_> = (0..trials)
        .map(|_| {
            let n = s.integer(2, 16) as usize;
            (
                s.rational(place),
                s.times(place, n + 1),
                s.rational(place),
                s.rational(place),
            )
        })
        .collect();
    run_trials(inputs, |i, (a, points, q1, q2)| {
        let partition = PartitionSpec::new(place, points.clone())?;
        let system = System::ConstantField { a: a.clone() };
        let folded = finite_n_propagator(&system, &partition, q1, q2)?;
        let direct = k_constant_field(place, a, &partition.total_time(), q1, q2)?;
        Ok((folded != direct).then(|| {
            format!(
                "trial {i}: N = {} a = {a} q' = {q1} q'' = {q2} times = {}: {folded} != {direct}",
                partition.len(),
                fmt_list(points)
            )
        }))
    })
}

fn random_system(s: &mut Sampler, place: Place) -> System {
    match s.integer(0, 2) {
        0 => System::Free,
        1 => System::ConstantField {
            a: s.rational(place),
        },
        _ => System::DeSitter {
            lam: s.rational(place),
        },
    }
}

fn verify_semigroup(place: Place, trials: usize, seed: u64) -> Result<Vec<String>> {
    let mut s = Sampler::new(seed);
    let inputs: Vec<_> = (0..trials)
        .map(|_| {
            (
                random_system(&mut s, place),
                s.times(place, 3),
                s.rational(place),
                s.rational(place),
            )
        })
        .collect();
    run_trials(inputs, |i, (system, t, q1, q2)| {
        let r = semigroup_residual(place, system, (&t[0], &t[1], &t[2]), q1, q2)?;
        Ok((!r.is_zero()).then(|| {
            format!(
                "trial {i}: {system} times {} q' = {q1} q'' = {q2}: {} != {}",
                fmt_list(t),
                r.composed,
                r.direct
            )
        }))
    })
}

/// Radii probed past the vanishing threshold.
const OVERLAP_EXTRA: i64 = 3;

fn verify_overlap(p: Prime, trials: usize, seed: u64) -> Result<Vec<String>> {
    let v = Place::Prime(p);
    let mut s = Sampler::new(seed);
    let inputs: Vec<_> = (0..trials)
        .map(|_| {
            let times = s.times(v, 2);
            let x1 = s.rational(v);
            let mut x2 = s.rational(v);
            while x2 == x1 {
                x2 = s.rational(v);
            }
            (times, x1, x2)
        })
        .collect();
    run_trials(inputs, |i, (t, x1, x2)| {
        let times = (&t[0], &t[1]);
        let elapsed = &t[1] - &t[0];
        let witness = || {
            format!(
                "trial {i}: t = {} t'' = {} x' = {x1} x'' = {x2}",
                t[0], t[1]
            )
        };
        let n0 = overlap_vanishing_threshold(p, &System::Free, times, x1, x2)?.expect("x'' != x'");
        for n in n0..n0 + OVERLAP_EXTRA {
            if !overlap_ball_integral(p, &System::Free, times, x1, x2, n)?.is_zero() {
                return Ok(Some(format!(
                    "{}: nonzero at N = {n} >= N0 = {n0}",
                    witness()
                )));
            }
        }
        if overlap_ball_integral(p, &System::Free, times, x1, x2, n0 - 1)?.is_zero() {
            return Ok(Some(format!("{}: already zero below N0 = {n0}", witness())));
        }
        for n in n0 - 1..n0 + OVERLAP_EXTRA {
            let mass = p.rational_pow(n) / norm(&elapsed, v);
            let expected = Amplitude::new(&mass * &mass, Phase::zero())?;
            if overlap_ball_integral(p, &System::Free, times, x1, x1, n)? != expected {
                return Ok(Some(format!(
                    "{}: diagonal mass wrong at N = {n}",
                    witness()
                )));
            }
        }
        Ok(None)
    })
}

/// Float tolerance for the Haar coset-sum oracle.
pub const HAAR_TOLERANCE: f64 = 1e-10;
/// Float tolerance for the damped Fresnel quadrature.
pub const FRESNEL_TOLERANCE: f64 = 1e-6;

/// One Gauss-integral comparison: exact stabilization plus the float oracle.
pub fn check_gauss_pair(p: Prime, a: &Rational, b: &Rational, cap: u64) -> Result<Option<String>> {
    let v = Place::Prime(p);
    let full = gauss_full(v, a, b)?;
    let n0 = gauss_stabilization_radius(p, a, b)?;
    for n in [n0, n0 + 1] {
        let ball = quad_char_integral_ball(p, a, b, n)?;
        if ball != full {
            return Ok(Some(format!(
                "a = {a} b = {b}: ball N = {n} gives {ball}, closed form {full}"
            )));
        }
    }
    for n in [n0 - 1, n0] {
        let ball = quad_char_integral_ball(p, a, b, n)?;
        let m = coset_constant_resolution(p, a, b, n);
        let spec = BallSpec::new(p, n, m)?;
        let oracle: Complex<f64> = haar_oracle(
            &spec,
            |x| Amplitude::unit(chi(v, &(a * x * x + b * x))).render(),
            cap,
        )?;
        let err = (oracle - ball.render::<f64>()).norm();
        if err > HAAR_TOLERANCE {
            return Ok(Some(format!(
                "a = {a} b = {b} N = {n}: Haar oracle off by {err:e}"
            )));
        }
    }
    Ok(None)
}

fn verify_gauss(place: Place, trials: usize, seed: u64) -> Result<Vec<String>> {
    let mut s = Sampler::new(seed);
    match place {
        Place::Real => {
            let inputs: Vec<_> = (0..trials)
                .map(|_| {
                    let a = Rational::new(s.integer(1, 40).into(), s.integer(1, 20).into())
                        * if s.integer(0, 1) == 0 {
                            Rational::one()
                        } else {
                            -Rational::one()
                        };
                    let b = Rational::new(s.integer(-20, 20).into(), s.integer(1, 10).into());
                    (a, b)
                })
                .collect();
            run_trials(inputs, |i, (a, b)| {
                let exact = gauss_full(place, a, b)?.render::<f64>();
                let oracle = fresnel_oracle(a, b)?;
                let err = (exact - oracle).norm();
                Ok((err > FRESNEL_TOLERANCE)
                    .then(|| format!("trial {i}: a = {a} b = {b}: Fresnel off by {err:e}")))
            })
        }
        Place::Prime(p) => {
            let inputs: Vec<_> = (0..trials)
                .map(|_| {
                    let a = s.small_unit(p) * p.rational_pow(s.integer(-2, 2));
                    let b = if s.integer(0, 5) == 0 {
                        Rational::zero()
                    } else {
                        s.small_unit(p) * p.rational_pow(s.integer(-2, 2))
                    };
                    (a, b)
                })
                .collect();
            let cap = coset_cap();
            run_trials(inputs, |i, (a, b)| {
                Ok(check_gauss_pair(p, a, b, cap)?.map(|f| format!("trial {i}: {f}")))
            })
        }
    }
}
