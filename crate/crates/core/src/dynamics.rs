//! Classical paths and actions for quadratic Lagrangians, exact over Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{FromPrimitive, Num, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Dense polynomial `c_0 + c_1 t + ...`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Num + Clone + FromPrimitive> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `t^k`.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, t: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * T::from_usize(k).expect("degree fits the scalar"))
            .collect();
        Polynomial::new(coeffs)
    }

    /// The antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![T::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() / T::from_usize(k + 1).expect("degree fits the scalar"));
        }
        Polynomial::new(coeffs)
    }

    /// `int_lo^hi p(t) dt`
    pub fn integrate(&self, lo: &T, hi: &T) -> T {
        let f = self.antiderivative();
        f.eval(hi) - f.eval(lo)
    }

    pub fn scale(&self, c: &T) -> Self {
        Polynomial::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }
}

impl<T: Num + Clone + FromPrimitive> Add for Polynomial<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Num + Clone + FromPrimitive> Neg for Polynomial<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Polynomial::new(self.coeffs.into_iter().map(|c| T::zero() - c).collect())
    }
}

impl<T: Num + Clone + FromPrimitive> Sub for Polynomial<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Num + Clone + FromPrimitive> Mul for Polynomial<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }
}

impl<T: fmt::Display + Num + Clone + FromPrimitive> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{k}")?,
            }
        }
        Ok(())
    }
}

/// A path `q(t)` between `(t', q')` and `(t'', q'')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialPath {
    q: Polynomial<Rational>,
    t_start: Rational,
    t_end: Rational,
    q_start: Rational,
    q_end: Rational,
}

impl PolynomialPath {
    /// The path `q` over `[t_start, t_end]`; endpoint values are read off `q`.
    pub fn new(q: Polynomial<Rational>, t_start: Rational, t_end: Rational) -> Self {
        let q_start = q.eval(&t_start);
        let q_end = q.eval(&t_end);
        PolynomialPath {
            q,
            t_start,
            t_end,
            q_start,
            q_end,
        }
    }

    pub fn polynomial(&self) -> &Polynomial<Rational> {
        &self.q
    }

    pub fn start(&self) -> (&Rational, &Rational) {
        (&self.t_start, &self.q_start)
    }

    pub fn end(&self) -> (&Rational, &Rational) {
        (&self.t_end, &self.q_end)
    }
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

/// Classical path of `L = q'^2/2 + a q` from `(0, q')` to `(T, q'')`.
pub fn classical_path_constant_field(
    a: &Rational,
    t: &Rational,
    q1: &Rational,
    q2: &Rational,
) -> Result<PolynomialPath> {
    if t.is_zero() {
        return Err(Error::DegenerateInterval);
    }
    let h = a * half();
    let linear = (q2 - q1 - &h * t * t) / t;
    let q = Polynomial::new(vec![q1.clone(), linear, h]);
    Ok(PolynomialPath::new(q, Rational::zero(), t.clone()))
}

/// `q'' - a`; the zero polynomial exactly on classical paths.
pub fn euler_lagrange_residual(path: &PolynomialPath, a: &Rational) -> Polynomial<Rational> {
    path.q.derivative().derivative() - Polynomial::constant(a.clone())
}

/// `(q''-q')^2/(2T) + (a/2)(q''+q')T - a^2 T^3/24`
pub fn action_constant_field(
    a: &Rational,
    t: &Rational,
    q1: &Rational,
    q2: &Rational,
) -> Result<Rational> {
    Ok(action_form_constant_field(a, t)?.eval(q2, q1))
}

/// `int (q'^2/2 + a q) dt` along the path.
pub fn action_integral(path: &PolynomialPath, a: &Rational) -> Rational {
    let v = path.q.derivative();
    let lagrangian = (v.clone() * v).scale(&half()) + path.q.scale(a);
    lagrangian.integrate(&path.t_start, &path.t_end)
}

/// `alpha x''^2 + beta x'^2 + gamma x'' x' + delta x'' + epsilon x' + zeta`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticActionForm<S = Rational> {
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
    pub delta: S,
    pub epsilon: S,
    pub zeta: S,
}

impl<S: Num + Clone> QuadraticActionForm<S> {
    /// `S(x'', x')`
    pub fn eval(&self, x2: &S, x1: &S) -> S {
        self.alpha.clone() * x2.clone() * x2.clone()
            + self.beta.clone() * x1.clone() * x1.clone()
            + self.gamma.clone() * x2.clone() * x1.clone()
            + self.delta.clone() * x2.clone()
            + self.epsilon.clone() * x1.clone()
            + self.zeta.clone()
    }

    /// `d^2 S / dx'' dx'`
    pub fn mixed_partial(&self) -> &S {
        &self.gamma
    }

    pub fn map<U>(&self, f: impl Fn(&S) -> U) -> QuadraticActionForm<U> {
        QuadraticActionForm {
            alpha: f(&self.alpha),
            beta: f(&self.beta),
            gamma: f(&self.gamma),
            delta: f(&self.delta),
            epsilon: f(&self.epsilon),
            zeta: f(&self.zeta),
        }
    }
}

/// A two-step action with the intermediate point left free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    /// `S_later(x'', x) + S_earlier(x, x')` at its stationary `x`.
    pub form: QuadraticActionForm,
    /// Coefficient of `x^2` in the two-step action.
    pub curvature: Rational,
    /// `x* = center_x2 x'' + center_x1 x' + center_const`
    pub center: (Rational, Rational, Rational),
}

/// Eliminates the intermediate point of `S_later(x'', x) + S_earlier(x, x')`.
pub fn eliminate_midpoint(
    later: &QuadraticActionForm,
    earlier: &QuadraticActionForm,
) -> Result<Elimination> {
    let s = &later.beta + &earlier.alpha;
    if s.is_zero() {
        return Err(Error::DegenerateQuadratic);
    }
    let e = &later.epsilon + &earlier.delta;
    let four_s = Rational::from_integer(4.into()) * &s;
    let two_s = Rational::from_integer(2.into()) * &s;
    let form = QuadraticActionForm {
        alpha: &later.alpha - &later.gamma * &later.gamma / &four_s,
        beta: &earlier.beta - &earlier.gamma * &earlier.gamma / &four_s,
        gamma: -(&earlier.gamma * &later.gamma) / &two_s,
        delta: &later.delta - &later.gamma * &e / &two_s,
        epsilon: &earlier.epsilon - &earlier.gamma * &e / &two_s,
        zeta: &earlier.zeta + &later.zeta - &e * &e / &four_s,
    };
    let center = (
        -&later.gamma / &two_s,
        -&earlier.gamma / &two_s,
        -&e / &two_s,
    );
    Ok(Elimination {
        form,
        curvature: s,
        center,
    })
}

impl Elimination {
    pub fn stationary_point(&self, x2: &Rational, x1: &Rational) -> Rational {
        &self.center.0 * x2 + &self.center.1 * x1 + &self.center.2
    }
}

/// The constant-field action as a quadratic form in `(q'', q')`.
pub fn action_form_constant_field(a: &Rational, t: &Rational) -> Result<QuadraticActionForm> {
    if t.is_zero() {
        return Err(Error::DegenerateInterval);
    }
    let inv = t.recip();
    let h = &inv * half();
    let lin = a * t * half();
    Ok(QuadraticActionForm {
        alpha: h.clone(),
        beta: h,
        gamma: -inv,
        delta: lin.clone(),
        epsilon: lin,
        zeta: -(a * a * t * t * t) / Rational::from_integer(24.into()),
    })
}

pub fn action_form_free(t: &Rational) -> Result<QuadraticActionForm> {
    action_form_constant_field(&Rational::zero(), t)
}
