//! Gauss integrals `int chi_v(a x^2 + b x) dx` over `Q_v` and over p-adic balls.
//!
//! [`gauss_full`] is the closed form. [`quad_char_integral_ball`] evaluates the
//! ball-restricted integral exactly by summing the integrand over cosets on
//! which it is constant, then identifying the resulting sum of roots of unity
//! with an [`Amplitude`]. [`haar_oracle`] and [`fresnel_oracle`] are floating
//! point oracles that share no code path with either.

use std::collections::HashMap;

use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Float, FromPrimitive, ToPrimitive, Zero};

use crate::characters::{chi, lambda, Amplitude, Phase};
use crate::cyclotomic::CyclotomicSum;
use crate::error::{Error, Result};
use crate::rational::{
    norm, residue_mod_prime_power, unit_part, valuation, Place, Prime, Valuation,
};
use crate::Rational;

/// Default bound on the number of cosets any single enumeration may visit.
pub const DEFAULT_COSET_CAP: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_COSET_CAP`].
pub const COSET_CAP_ENV: &str = "PADIC_PATH_COSET_CAP";

/// Coset cap from the environment, falling back to [`DEFAULT_COSET_CAP`].
pub fn coset_cap() -> u64 {
    std::env::var(COSET_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_COSET_CAP)
}

/// The ball `|x|_p <= p^N`, cut into cosets `r + p^M Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallSpec {
    pub prime: Prime,
    pub radius_exponent: i64,
    pub resolution_exponent: i64,
}

impl BallSpec {
    pub fn new(prime: Prime, radius_exponent: i64, resolution_exponent: i64) -> Result<Self> {
        if resolution_exponent < -radius_exponent {
            return Err(Error::InvalidArgument(format!(
                "resolution exponent {resolution_exponent} is coarser than the ball radius {radius_exponent}"
            )));
        }
        Ok(BallSpec {
            prime,
            radius_exponent,
            resolution_exponent,
        })
    }

    /// `p^(N + M)`
    pub fn coset_count(&self) -> u128 {
        let e = (self.radius_exponent + self.resolution_exponent) as u32;
        (self.prime.get() as u128).saturating_pow(e)
    }

    /// Haar measure of one coset, `p^-M`.
    pub fn coset_measure(&self) -> Rational {
        self.prime.rational_pow(-self.resolution_exponent)
    }

    fn checked_count(&self, cap: u64) -> Result<u64> {
        let n = self.coset_count();
        if n > cap as u128 {
            return Err(Error::ResourceLimit { required: n, cap });
        }
        Ok(n as u64)
    }
}

/// `lambda_v(a) |2a|_v^{-1/2} chi_v(-b^2 / 4a)`, exactly.
pub fn gauss_full(v: Place, a: &Rational, b: &Rational) -> Result<Amplitude> {
    if a.is_zero() {
        return Err(Error::DegenerateQuadratic);
    }
    let two_a = a * Rational::from_integer(2.into());
    let modulus_sq = norm(&two_a, v).recip();
    let shift = -(b * b) / (a * Rational::from_integer(4.into()));
    let phase = lambda(v, a)? + chi(v, &shift);
    Ok(Amplitude::new_unchecked(modulus_sq, phase))
}

/// `int_{|x|_p <= p^N} chi_p(beta x) dx`: `p^N` when `|beta|_p <= p^-N`, else zero.
pub fn linear_char_integral_ball(p: Prime, beta: &Rational, radius_exponent: i64) -> Amplitude {
    let inside = match valuation(beta, p) {
        Valuation::Infinite => true,
        Valuation::Finite(v) => v >= radius_exponent,
    };
    if inside {
        let m = p.rational_pow(radius_exponent);
        Amplitude::new_unchecked(&m * &m, Phase::zero())
    } else {
        Amplitude::zero()
    }
}

fn finite_valuation(x: &Rational, p: Prime) -> Option<i64> {
    valuation(x, p).finite()
}

/// Smallest ball radius exponent from which the ball integral equals [`gauss_full`].
pub fn gauss_stabilization_radius(p: Prime, alpha: &Rational, beta: &Rational) -> Result<i64> {
    let va = finite_valuation(alpha, p).ok_or(Error::DegenerateQuadratic)?;
    let two = i64::from(p.get() == 2);
    // Rescaled to Z_p the quadratic coefficient must have valuation <= -1 - two,
    // and the square-completing shift must stay inside Z_p.
    let mut n0 = Integer::div_ceil(&(va + 1 + two), &2);
    if let Some(vb) = finite_valuation(beta, p) {
        n0 = n0.max(va - vb + two);
    }
    Ok(n0)
}

/// Finest-needed resolution `M` making `alpha x^2 + beta x` coset-constant on the ball.
pub fn coset_constant_resolution(
    p: Prime,
    alpha: &Rational,
    beta: &Rational,
    radius_exponent: i64,
) -> i64 {
    let mut m = -radius_exponent;
    if let Some(va) = finite_valuation(alpha, p) {
        let v2a = va + i64::from(p.get() == 2);
        m = m
            .max(Integer::div_ceil(&(-va), &2))
            .max(radius_exponent - v2a);
    }
    if let Some(vb) = finite_valuation(beta, p) {
        m = m.max(-vb);
    }
    m
}

/// Exponent `d` and residue `r` with `{c y^k}_p = (r y^k mod p^d) / p^d` for integer `y`.
fn character_coefficient(c: &Rational, p: Prime) -> (u32, u128) {
    match finite_valuation(c, p) {
        Some(v) if v < 0 => {
            let d = (-v) as u32;
            let (_, unit) = unit_part(c, p);
            let r = residue_mod_prime_power(&unit, p, d);
            (d, r.to_u128().expect("residue fits in u128"))
        }
        _ => (0, 0),
    }
}

/// Largest phase denominator exponent the exact summation will allocate.
const MAX_PHASE_BITS: u32 = 56;

/// `int_{|x|_p <= p^N} chi_p(alpha x^2 + beta x) dx`, exactly, with the default coset cap.
pub fn quad_char_integral_ball(
    p: Prime,
    alpha: &Rational,
    beta: &Rational,
    radius_exponent: i64,
) -> Result<Amplitude> {
    quad_char_integral_ball_capped(p, alpha, beta, radius_exponent, coset_cap())
}

pub fn quad_char_integral_ball_capped(
    p: Prime,
    alpha: &Rational,
    beta: &Rational,
    radius_exponent: i64,
    cap: u64,
) -> Result<Amplitude> {
    let n_exp = radius_exponent;
    let m_exp = coset_constant_resolution(p, alpha, beta, n_exp);
    let ball = BallSpec::new(p, n_exp, m_exp)?;
    let cosets = ball.checked_count(cap)?;

    // Representatives x = y p^-N, y in [0, p^(N+M)).
    let a = alpha * p.rational_pow(-2 * n_exp);
    let b = beta * p.rational_pow(-n_exp);
    let (da, ra) = character_coefficient(&a, p);
    let (db, rb) = character_coefficient(&b, p);
    let mut k = da.max(db);
    if p.get() == 2 {
        k = k.max(3);
    }
    let bits = (p.get() as f64).log2() * k as f64;
    if bits > MAX_PHASE_BITS as f64 {
        return Err(Error::ResourceLimit {
            required: (p.get() as u128).saturating_pow(k),
            cap,
        });
    }
    let pk = p.get() as u128;
    let order = pk.pow(k);
    let ca = ra * pk.pow(k - da) % order;
    let cb = rb * pk.pow(k - db) % order;

    let mut counts: HashMap<u64, i64> = HashMap::new();
    for y in 0..cosets as u128 {
        let ym = y % order;
        let e = (ca * (ym * ym % order) + cb * ym) % order;
        *counts.entry(e as u64).or_insert(0) += 1;
    }
    let total = CyclotomicSum::from_counts(p.get(), k, counts);
    identify_amplitude(p, &total, m_exp)
}

/// Recognises `p^-M * total` as `sqrt(m) exp(2 pi i phi)`, verified exactly in `Z[zeta]`.
fn identify_amplitude(p: Prime, total: &CyclotomicSum, m_exp: i64) -> Result<Amplitude> {
    if total.is_zero() {
        return Ok(Amplitude::zero());
    }
    let z = total.to_complex();
    let mag2 = z.norm_sqr();
    let pf = p.get() as f64;
    let j = (mag2.ln() / pf.ln()).round() as i64;
    if j < 0 || ((mag2 / pf.powi(j as i32)) - 1.0).abs() > 1e-6 {
        return Err(Error::NotAnAmplitude(format!(
            "|sum|^2 = {mag2} is not a power of {p}"
        )));
    }
    let k = total.exponent();
    let order = total.order();
    // sqrt(p^j) = p^h * w, with w = 1, the quadratic Gauss sum, or zeta_8 + zeta_8^-1.
    let h = j / 2;
    let (w, w_phase) = if j % 2 == 0 {
        let mut one = CyclotomicSum::new(p.get(), k);
        one.add_term(0, 1);
        (one, Phase::zero())
    } else if p.get() == 2 {
        (CyclotomicSum::sqrt_two(k), Phase::zero())
    } else {
        if k == 0 {
            return Err(Error::NotAnAmplitude(
                "odd power of p at trivial phase".into(),
            ));
        }
        let ph = if p.get() % 4 == 1 {
            Phase::zero()
        } else {
            Phase::from_ratio(1, 4)
        };
        (CyclotomicSum::quadratic_gauss_sum(p.get(), k), ph)
    };
    let turns = z.arg() / std::f64::consts::TAU - w_phase.to_f64();
    let grid = if order % 2 == 1 { 2 * order } else { order };
    let t = ((turns * grid as f64).round() as i64).rem_euclid(grid as i64) as u64;
    let (shift, sign) = if grid == order {
        (t, 1)
    } else if t % 2 == 0 {
        (t / 2, 1)
    } else {
        (((t + order) / 2) % order, -1)
    };
    let scale = i64::try_from(p.get().pow(h as u32))
        .map_err(|_| Error::NotAnAmplitude("modulus overflow".into()))?;
    let candidate = w.rotated(shift, sign).scaled(scale);
    if !total.sub(&candidate).is_zero() {
        return Err(Error::NotAnAmplitude(format!(
            "exact check failed for |sum|^2 = {p}^{j}"
        )));
    }
    let phase = w_phase + Phase::new(Rational::new((t as i64).into(), (grid as i64).into()));
    Ok(Amplitude::new_unchecked(
        p.rational_pow(j - 2 * m_exp),
        phase,
    ))
}

/// Pairwise summation over a fixed binary tree; bit-identical however it is scheduled.
pub fn pairwise_sum<F: Float + Send + Sync>(values: &[Complex<F>]) -> Complex<F> {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return values
            .iter()
            .fold(Complex::new(F::zero(), F::zero()), |acc, v| acc + *v);
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    let (a, b) = if values.len() > 1 << 14 {
        rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi))
    } else {
        (pairwise_sum(lo), pairwise_sum(hi))
    };
    a + b
}

/// `p^-M * sum_r f(r)` over the coset representatives `r = y p^-N`, `0 <= y < p^(N+M)`.
pub fn haar_oracle<F, G>(ball: &BallSpec, f: G, cap: u64) -> Result<Complex<F>>
where
    F: Float + FromPrimitive + Send + Sync,
    G: Fn(&Rational) -> Complex<F> + Sync,
{
    use rayon::prelude::*;
    let count = ball.checked_count(cap)?;
    let scale = ball.prime.rational_pow(-ball.radius_exponent);
    let values: Vec<Complex<F>> = (0..count)
        .into_par_iter()
        .map(|y| f(&(Rational::from_integer(y.into()) * &scale)))
        .collect();
    let measure = F::from_f64(ball.coset_measure().to_f64().unwrap_or(0.0)).unwrap();
    Ok(pairwise_sum(&values) * measure)
}

/// Damping sequence used by [`fresnel_oracle`].
pub const FRESNEL_DAMPINGS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// `int exp(-2 pi i (a x^2 + b x)) exp(-damping x^2) dx` by Gauss-Legendre panels.
pub fn fresnel_damped(a: f64, b: f64, damping: f64) -> Result<Complex<f64>> {
    if !(damping > 0.0) || !a.is_finite() || !b.is_finite() || a == 0.0 {
        return Err(Error::InvalidArgument(
            "fresnel needs a != 0 and damping > 0".into(),
        ));
    }
    // exp(-damping L^2) < 1e-17
    let half_width = (40.0 / damping).sqrt();
    let max_rate = 2.0 * a.abs() * half_width + b.abs();
    let panel = (0.5 / max_rate.max(1e-3)).min(0.25 / damping.sqrt());
    let panels = (2.0 * half_width / panel).ceil();
    if panels > 5e7 {
        return Err(Error::NumericFailure(format!(
            "{panels} quadrature panels needed at damping {damping}"
        )));
    }
    let panels = panels as usize;
    let h = 2.0 * half_width / panels as f64;
    let (nodes, weights) = gauss_legendre(20);
    let integrand = |x: f64| {
        let env = (-damping * x * x).exp();
        let (s, c) = (-std::f64::consts::TAU * (a * x * x + b * x)).sin_cos();
        Complex::new(env * c, env * s)
    };
    use rayon::prelude::*;
    let pieces: Vec<Complex<f64>> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let mid = -half_width + (i as f64 + 0.5) * h;
            nodes
                .iter()
                .zip(&weights)
                .fold(Complex::new(0.0, 0.0), |acc, (t, w)| {
                    acc + integrand(mid + 0.5 * h * t) * *w
                })
                * (0.5 * h)
        })
        .collect();
    let total = pairwise_sum(&pieces);
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(Error::NumericFailure(
            "quadrature produced a non-finite value".into(),
        ));
    }
    Ok(total)
}

/// Real-place Gauss integral by damped quadrature, extrapolated to zero damping.
pub fn fresnel_oracle(a: &Rational, b: &Rational) -> Result<Complex<f64>> {
    fresnel_oracle_with(a, b, &FRESNEL_DAMPINGS)
}

pub fn fresnel_oracle_with(a: &Rational, b: &Rational, dampings: &[f64]) -> Result<Complex<f64>> {
    if a.is_zero() {
        return Err(Error::DegenerateQuadratic);
    }
    if dampings.len() < 2 {
        return Err(Error::InvalidArgument(
            "need at least two damping values".into(),
        ));
    }
    let af = a.to_f64().unwrap_or(f64::NAN);
    let bf = b.to_f64().unwrap_or(f64::NAN);
    let samples = dampings
        .iter()
        .map(|d| fresnel_damped(af, bf, *d))
        .collect::<Result<Vec<_>>>()?;
    let full = neville_at_zero(dampings, &samples);
    let tail = dampings.len() - 2;
    let coarse = neville_at_zero(&dampings[tail..], &samples[tail..]);
    let tolerance = 1e-4 * full.norm().max(1.0);
    if (full - coarse).norm() > tolerance {
        return Err(Error::NumericFailure(format!(
            "damping extrapolation unstable: {full} vs {coarse}"
        )));
    }
    Ok(full)
}

/// Polynomial extrapolation of `(x_i, y_i)` to `x = 0`.
fn neville_at_zero(xs: &[f64], ys: &[Complex<f64>]) -> Complex<f64> {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
    }
    p[0]
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
