//! Feynman kernels `K_v(x'', t''; x', t')` for quadratic actions at every place.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, Signed, ToPrimitive, Zero};

use crate::characters::{chi, lambda, lambda_from_digits, Amplitude, Phase};
use crate::dynamics::{action_form_constant_field, eliminate_midpoint, QuadraticActionForm};
use crate::error::{Error, Result};
use crate::gauss::{gauss_full, quad_char_integral_ball};
use crate::padic::{sin_p, sqrt_p, tan_p, PadicTruncation};
use crate::rational::{linear_less, norm, valuation, Place, Prime};
use crate::Rational;

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn check_time(t: &Rational) -> Result<()> {
    if t.is_zero() {
        Err(Error::DegenerateInterval)
    } else {
        Ok(())
    }
}

/// `K` for `L = q'^2/2 + a q`.
pub fn k_constant_field(
    v: Place,
    a: &Rational,
    t: &Rational,
    q1: &Rational,
    q2: &Rational,
) -> Result<Amplitude> {
    check_time(t)?;
    let dq = q2 - q1;
    let arg =
        -(&dq * &dq) / (int(2) * t) - a * (q2 + q1) * t / int(2) + a * a * t * t * t / int(24);
    Amplitude::new(norm(t, v).recip(), lambda(v, &(int(2) * t))? + chi(v, &arg))
}

/// The free-particle kernel.
pub fn k_free(v: Place, t: &Rational, q1: &Rational, q2: &Rational) -> Result<Amplitude> {
    check_time(t)?;
    let dq = q2 - q1;
    Amplitude::new(
        norm(t, v).recip(),
        lambda(v, &(int(2) * t))? + chi(v, &(-(&dq * &dq) / (int(2) * t))),
    )
}

/// The de Sitter minisuperspace kernel with cosmological constant `lam`.
pub fn k_desitter(
    v: Place,
    lam: &Rational,
    t: &Rational,
    q1: &Rational,
    q2: &Rational,
) -> Result<Amplitude> {
    check_time(t)?;
    let dq = q2 - q1;
    let arg = &dq * &dq / (int(8) * t) + (lam * (q2 + q1) - int(2)) * t / int(4)
        - lam * lam * t * t * t / int(24);
    Amplitude::new(
        norm(&(int(4) * t), v).recip(),
        lambda(v, &(int(-2) * t))? + chi(v, &arg),
    )
}

/// `lambda_v(-2 gamma) |gamma|_v^(1/2) chi_v(-S(x'', x'))` with `gamma` the mixed partial.
pub fn k_general_quadratic(
    v: Place,
    form: &QuadraticActionForm,
    x2: &Rational,
    x1: &Rational,
) -> Result<Amplitude> {
    let gamma = form.mixed_partial();
    if gamma.is_zero() {
        return Err(Error::DegenerateForm);
    }
    Amplitude::new(
        norm(gamma, v),
        lambda(v, &(int(-2) * gamma))? + chi(v, &-form.eval(x2, x1)),
    )
}

/// The same formula in floating point at the real place.
pub fn k_general_quadratic_real<F: Float + FromPrimitive>(
    form: &QuadraticActionForm<F>,
    x2: F,
    x1: F,
) -> Result<Complex<F>> {
    let gamma = *form.mixed_partial();
    if gamma.is_zero() {
        return Err(Error::DegenerateForm);
    }
    let eighth = F::from_f64(0.125).unwrap();
    let lam = if gamma < F::zero() {
        F::one() - eighth
    } else {
        eighth
    };
    let turns = lam + form.eval(&x2, &x1);
    let angle = F::from_f64(std::f64::consts::TAU).unwrap() * turns;
    Ok(Complex::from_polar(gamma.abs().sqrt(), angle))
}

/// Systems with closed-form kernels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum System {
    Free,
    ConstantField { a: Rational },
    DeSitter { lam: Rational },
}

impl System {
    pub fn name(&self) -> &'static str {
        match self {
            System::Free => "free",
            System::ConstantField { .. } => "const-field",
            System::DeSitter { .. } => "desitter",
        }
    }

    /// Classical action over time `t` as a form in `(x'', x')`.
    pub fn action_form(&self, t: &Rational) -> Result<QuadraticActionForm> {
        match self {
            System::Free => action_form_constant_field(&Rational::zero(), t),
            System::ConstantField { a } => action_form_constant_field(a, t),
            System::DeSitter { lam } => action_form_desitter(lam, t),
        }
    }

    pub fn kernel(
        &self,
        v: Place,
        t: &Rational,
        q1: &Rational,
        q2: &Rational,
    ) -> Result<Amplitude> {
        match self {
            System::Free => k_free(v, t, q1, q2),
            System::ConstantField { a } => k_constant_field(v, a, t, q1, q2),
            System::DeSitter { lam } => k_desitter(v, lam, t, q1, q2),
        }
    }

    /// The kernel over time `t` with its endpoints left symbolic.
    pub fn kernel_form(&self, v: Place, t: &Rational) -> Result<KernelForm> {
        check_time(t)?;
        let (modulus_sq, lambda_phase) = match self {
            System::DeSitter { .. } => (norm(&(int(4) * t), v).recip(), lambda(v, &(int(-2) * t))?),
            _ => (norm(t, v).recip(), lambda(v, &(int(2) * t))?),
        };
        Ok(KernelForm {
            place: v,
            modulus_sq,
            lambda_phase,
            action: self.action_form(t)?,
        })
    }
}

impl std::fmt::Display for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            System::Free => write!(f, "free"),
            System::ConstantField { a } => write!(f, "const-field(a = {a})"),
            System::DeSitter { lam } => write!(f, "desitter(lam = {lam})"),
        }
    }
}

/// The de Sitter action read back from the phase of its kernel.
pub fn action_form_desitter(lam: &Rational, t: &Rational) -> Result<QuadraticActionForm> {
    check_time(t)?;
    let quad = -(int(8) * t).recip();
    let lin = -(lam * t) / int(4);
    Ok(QuadraticActionForm {
        alpha: quad.clone(),
        beta: quad,
        gamma: (int(4) * t).recip(),
        delta: lin.clone(),
        epsilon: lin,
        zeta: t / int(2) + lam * lam * t * t * t / int(24),
    })
}

/// `|K|^2 = modulus_sq`, phase `lambda_phase + chi(-S(x'', x'))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelForm {
    pub place: Place,
    pub modulus_sq: Rational,
    pub lambda_phase: Phase,
    pub action: QuadraticActionForm,
}

impl KernelForm {
    pub fn eval(&self, x2: &Rational, x1: &Rational) -> Amplitude {
        Amplitude::new_unchecked(
            self.modulus_sq.clone(),
            self.lambda_phase.clone() + chi(self.place, &-self.action.eval(x2, x1)),
        )
    }

    /// `int K_later(x'', x) K_earlier(x, x') dx`, done on coefficients.
    pub fn then(&self, later: &KernelForm) -> Result<KernelForm> {
        debug_assert_eq!(self.place, later.place);
        let elim = eliminate_midpoint(&later.action, &self.action)?;
        let gauss = gauss_full(self.place, &-&elim.curvature, &Rational::zero())?;
        Ok(KernelForm {
            place: self.place,
            modulus_sq: &self.modulus_sq * &later.modulus_sq * gauss.modulus_sq(),
            lambda_phase: self.lambda_phase.clone()
                + later.lambda_phase.clone()
                + gauss.phase().clone(),
            action: elim.form,
        })
    }
}

/// Constant-field kernel over `t1` followed by one over `t2`, integrated over the midpoint.
pub fn compose(v: Place, a: &Rational, t1: &Rational, t2: &Rational) -> Result<KernelForm> {
    check_time(&(t1 + t2))?;
    let system = System::ConstantField { a: a.clone() };
    system.kernel_form(v, t1)?.then(&system.kernel_form(v, t2)?)
}

/// Time points `t_0 < t_1 < ... < t_N` in the order of the place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    place: Place,
    points: Vec<Rational>,
}

impl PartitionSpec {
    pub fn new(place: Place, points: Vec<Rational>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPartition(
                "need at least two time points".into(),
            ));
        }
        for w in points.windows(2) {
            let increasing = match place {
                Place::Real => w[0] < w[1],
                Place::Prime(p) => linear_less(&w[0], &w[1], p),
            };
            if !increasing {
                return Err(Error::InvalidPartition(format!(
                    "{} does not precede {} at place {place}",
                    w[0], w[1]
                )));
            }
        }
        Ok(PartitionSpec { place, points })
    }

    pub fn place(&self) -> Place {
        self.place
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    /// Number of subintervals `N`.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self) -> impl Iterator<Item = Rational> + '_ {
        self.points.windows(2).map(|w| &w[1] - &w[0])
    }

    pub fn total_time(&self) -> Rational {
        self.points.last().unwrap() - &self.points[0]
    }
}

/// `K^(N)` with normalization `prod lambda_v(2 eps_i) |eps_i|_v^(-1/2)`, integrating out
/// each intermediate point in turn.
pub fn finite_n_propagator(
    system: &System,
    partition: &PartitionSpec,
    q1: &Rational,
    q2: &Rational,
) -> Result<Amplitude> {
    let v = partition.place();
    let mut steps = partition.steps();
    let first = steps.next().expect("partition has a step");
    let mut acc = system.kernel_form(v, &first)?;
    for eps in steps {
        acc = acc.then(&system.kernel_form(v, &eps)?)?;
    }
    Ok(acc.eval(q2, q1))
}

/// Both sides of `int K(x'',t'';x,t) K(x,t;x',t') dx = K(x'',t'';x',t')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub composed: Amplitude,
    pub direct: Amplitude,
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        self.composed == self.direct
    }

    /// The difference, when it is itself an amplitude.
    pub fn amplitude(&self) -> Result<Amplitude> {
        if self.is_zero() {
            Ok(Amplitude::zero())
        } else if self.direct.is_zero() {
            Ok(self.composed.clone())
        } else if self.composed.is_zero() {
            Ok(Amplitude::new_unchecked(
                self.direct.modulus_sq().clone(),
                self.direct.phase().clone() + Phase::from_ratio(1, 2),
            ))
        } else {
            Err(Error::NotAnAmplitude(format!(
                "{} - {}",
                self.composed, self.direct
            )))
        }
    }

    pub fn magnitude(&self) -> f64 {
        (self.composed.render::<f64>() - self.direct.render::<f64>()).norm()
    }
}

/// Integrates the product of kernels over the intermediate point with the endpoints fixed,
/// through the Gauss integral of the resulting quadratic in `x`.
pub fn semigroup_residual(
    v: Place,
    system: &System,
    times: (&Rational, &Rational, &Rational),
    q1: &Rational,
    q2: &Rational,
) -> Result<Residual> {
    let (t1, t, t2) = times;
    PartitionSpec::new(v, vec![t1.clone(), t.clone(), t2.clone()])?;
    let early = system.kernel_form(v, &(t - t1))?;
    let late = system.kernel_form(v, &(t2 - t))?;
    let (s1, s2) = (&early.action, &late.action);
    // -S2(q'', x) - S1(x, q') = -(c x^2 + l x + r)
    let c = &s2.beta + &s1.alpha;
    let l = &s2.gamma * q2 + &s1.gamma * q1 + &s2.epsilon + &s1.delta;
    let r = &s2.alpha * q2 * q2
        + &s2.delta * q2
        + &s2.zeta
        + &s1.beta * q1 * q1
        + &s1.epsilon * q1
        + &s1.zeta;
    let gauss = gauss_full(v, &-c, &-l)?;
    let composed = Amplitude::new_unchecked(
        &early.modulus_sq * &late.modulus_sq * gauss.modulus_sq(),
        early.lambda_phase + late.lambda_phase + chi(v, &-r) + gauss.phase().clone(),
    );
    Ok(Residual {
        composed,
        direct: system.kernel(v, &(t2 - t1), q1, q2)?,
    })
}

/// `int_{|x|_p <= p^N} conj K(x'',t'';x,t) K(x',t'';x,t) dx`, exactly.
pub fn overlap_ball_integral(
    p: Prime,
    system: &System,
    times: (&Rational, &Rational),
    x1: &Rational,
    x2: &Rational,
    radius_exponent: i64,
) -> Result<Amplitude> {
    let (t, t2) = times;
    let form = system.kernel_form(Place::Prime(p), &(t2 - t))?;
    let s = &form.action;
    let dx = x2 - x1;
    let constant = &s.alpha * (x2 * x2 - x1 * x1) + &s.delta * &dx;
    let ball = quad_char_integral_ball(p, &Rational::zero(), &(&s.gamma * &dx), radius_exponent)?;
    Amplitude::new(
        &form.modulus_sq * &form.modulus_sq * ball.modulus_sq(),
        chi(Place::Prime(p), &constant) + ball.phase().clone(),
    )
}

/// Least `N` from which the overlap vanishes, or `None` when `x'' = x'`.
pub fn overlap_vanishing_threshold(
    p: Prime,
    system: &System,
    times: (&Rational, &Rational),
    x1: &Rational,
    x2: &Rational,
) -> Result<Option<i64>> {
    let (t, t2) = times;
    let gamma = system.action_form(&(t2 - t))?.gamma;
    Ok(valuation(&(gamma * (x2 - x1)), p).finite().map(|v| v + 1))
}

/// Boundary values of the auxiliary functions `gamma(t)`, `s(t)` of the
/// time-dependent oscillator, at `t'` (suffix 1) and `t''` (suffix 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OscillatorBoundaryData {
    pub x1: Rational,
    pub x2: Rational,
    pub gamma1: Rational,
    pub gamma2: Rational,
    pub gamma_dot1: Rational,
    pub gamma_dot2: Rational,
    pub s1: Rational,
    pub s2: Rational,
    pub s_dot1: Rational,
    pub s_dot2: Rational,
    /// Also require `gamma_dot s^2` to agree at both ends.
    pub check_wronskian: bool,
}

impl OscillatorBoundaryData {
    fn validate(&self) -> Result<()> {
        if self.s1.is_zero() || self.s2.is_zero() {
            return Err(Error::InvalidArgument("s' and s'' must be nonzero".into()));
        }
        if self.gamma1 == self.gamma2 {
            return Err(Error::Domain("sin(gamma'' - gamma') vanishes".into()));
        }
        if self.gamma_dot1.is_zero() || self.gamma_dot2.is_zero() {
            return Err(Error::InvalidArgument("gamma-dot must be nonzero".into()));
        }
        if self.check_wronskian
            && &self.gamma_dot1 * &self.s1 * &self.s1 != &self.gamma_dot2 * &self.s2 * &self.s2
        {
            return Err(Error::InvalidArgument(
                "gamma-dot s^2 differs between the endpoints".into(),
            ));
        }
        Ok(())
    }

    fn delta(&self) -> Rational {
        &self.gamma2 - &self.gamma1
    }

    /// `(1/2)(s-dot' x'^2/s' - s-dot'' x''^2/s'')`
    fn boundary_term(&self) -> Rational {
        (&self.s_dot1 * &self.x1 * &self.x1 / &self.s1
            - &self.s_dot2 * &self.x2 * &self.x2 / &self.s2)
            / int(2)
    }
}

/// Which square root of `gamma-dot'' gamma-dot'` entered a kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SqrtBranch {
    /// The root first in the linear order of `Q_p`.
    Canonical(PadicTruncation),
    /// The positive real root.
    Positive,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OscillatorValue {
    Exact {
        amplitude: Amplitude,
        branch: SqrtBranch,
    },
    Approximate(Complex<f64>),
}

impl OscillatorValue {
    pub fn render(&self) -> Complex<f64> {
        match self {
            OscillatorValue::Exact { amplitude, .. } => amplitude.render(),
            OscillatorValue::Approximate(z) => *z,
        }
    }
}

struct OscillatorParts {
    sin: PadicTruncation,
    inv_tan: PadicTruncation,
    root: PadicTruncation,
    root_over_sin: PadicTruncation,
}

fn oscillator_parts(
    p: Prime,
    data: &OscillatorBoundaryData,
    precision: i64,
) -> Result<OscillatorParts> {
    data.validate()?;
    let delta = data.delta();
    let sin = sin_p(&delta, p, precision)?;
    let tan = tan_p(&delta, p, precision)?;
    let root = sqrt_p(&(&data.gamma_dot1 * &data.gamma_dot2), p, precision)?;
    let inv_tan = tan.recip()?;
    let root_over_sin = root.div(&sin)?;
    Ok(OscillatorParts {
        sin,
        inv_tan,
        root,
        root_over_sin,
    })
}

/// Time-dependent oscillator kernel. At a prime place `sin`, `tan` and the
/// square root are evaluated modulo `p^precision`; the real place uses `f64`.
pub fn k_oscillator_td(
    v: Place,
    data: &OscillatorBoundaryData,
    precision: i64,
) -> Result<OscillatorValue> {
    let p = match v {
        Place::Real => return k_oscillator_real(data).map(OscillatorValue::Approximate),
        Place::Prime(p) => p,
    };
    let parts = oscillator_parts(p, data, precision)?;

    let two_sin = parts.sin.scale(&int(2));
    let nu = two_sin.valuation().ok_or(Error::PrecisionInsufficient {
        needed: two_sin.precision() + 1,
        available: two_sin.precision(),
    })?;
    let need = if p.get() == 2 { 3 } else { 1 };
    if two_sin.digits().len() < need {
        return Err(Error::PrecisionInsufficient {
            needed: nu + need as i64,
            available: two_sin.precision(),
        });
    }
    let lam = lambda_from_digits(p, nu, two_sin.digits());

    let ratio_val = parts
        .root_over_sin
        .valuation()
        .expect("root and sine are nonzero");
    let modulus_sq = p.rational_pow(-ratio_val);

    let quad =
        -(&data.gamma_dot2 * &data.x2 * &data.x2 + &data.gamma_dot1 * &data.x1 * &data.x1) / int(2);
    let series_part = parts
        .inv_tan
        .scale(&quad)
        .add(&parts.root_over_sin.scale(&(&data.x2 * &data.x1)));
    let phase = lam + chi(v, &data.boundary_term()) + Phase::new(series_part.fractional_part()?);
    Ok(OscillatorValue::Exact {
        amplitude: Amplitude::new(modulus_sq, phase)?,
        branch: SqrtBranch::Canonical(parts.root),
    })
}

fn to_f64(x: &Rational) -> f64 {
    x.to_f64().expect("rational converts to f64")
}

fn k_oscillator_real(data: &OscillatorBoundaryData) -> Result<Complex<f64>> {
    data.validate()?;
    let product = &data.gamma_dot1 * &data.gamma_dot2;
    if !product.is_positive() {
        return Err(Error::NoSquareRoot(0));
    }
    let delta = to_f64(&data.delta());
    let (sin, tan) = (delta.sin(), delta.tan());
    let root = to_f64(&product).sqrt();
    let (x1, x2) = (to_f64(&data.x1), to_f64(&data.x2));
    let lam = if sin > 0.0 { 0.875 } else { 0.125 };
    let arg = to_f64(&data.boundary_term())
        - (to_f64(&data.gamma_dot2) * x2 * x2 + to_f64(&data.gamma_dot1) * x1 * x1) / (2.0 * tan)
        + x2 * x1 * root / sin;
    Ok(Complex::from_polar(
        (root / sin).abs().sqrt(),
        std::f64::consts::TAU * (lam - arg),
    ))
}

/// The quadratic action whose general-formula kernel should reproduce the oscillator
/// kernel, with `sin`, `tan` and the root taken modulo `p^precision`.
pub fn oscillator_action_form(
    p: Prime,
    data: &OscillatorBoundaryData,
    precision: i64,
) -> Result<QuadraticActionForm> {
    let parts = oscillator_parts(p, data, precision)?;
    let inv_tan = parts.inv_tan.to_rational();
    Ok(QuadraticActionForm {
        alpha: &data.gamma_dot2 * &inv_tan / int(2) + &data.s_dot2 / (int(2) * &data.s2),
        beta: &data.gamma_dot1 * &inv_tan / int(2) - &data.s_dot1 / (int(2) * &data.s1),
        gamma: -parts.root_over_sin.to_rational(),
        delta: Rational::zero(),
        epsilon: Rational::zero(),
        zeta: Rational::zero(),
    })
}

/// The same action at the real place, in `f64`.
pub fn oscillator_action_form_real(
    data: &OscillatorBoundaryData,
) -> Result<QuadraticActionForm<f64>> {
    data.validate()?;
    let delta = to_f64(&data.delta());
    let root = to_f64(&(&data.gamma_dot1 * &data.gamma_dot2)).sqrt();
    Ok(QuadraticActionForm {
        alpha: to_f64(&data.gamma_dot2) / (2.0 * delta.tan())
            + to_f64(&data.s_dot2) / (2.0 * to_f64(&data.s2)),
        beta: to_f64(&data.gamma_dot1) / (2.0 * delta.tan())
            - to_f64(&data.s_dot1) / (2.0 * to_f64(&data.s1)),
        gamma: -root / delta.sin(),
        delta: 0.0,
        epsilon: 0.0,
        zeta: 0.0,
    })
}
