//! Exact Feynman propagators over every completion of the rationals.

pub mod characters;
mod cyclotomic;
pub mod dynamics;
pub mod error;
pub mod gauss;
pub mod padic;
pub mod propagators;
pub mod rational;
pub mod verify;

pub use characters::{amp_mul, amp_render, chi, lambda, legendre, Amplitude, LegendreValue, Phase};
pub use dynamics::{
    action_constant_field, action_form_constant_field, action_form_free, action_integral,
    classical_path_constant_field, eliminate_midpoint, euler_lagrange_residual, Polynomial,
    PolynomialPath, QuadraticActionForm,
};
pub use error::{Error, Result};
pub use gauss::{
    fresnel_oracle, gauss_full, haar_oracle, linear_char_integral_ball, quad_char_integral_ball,
    BallSpec,
};
pub use padic::{cos_p, series_eval, sin_p, sqrt_p, tan_p, CoefficientStream, PadicTruncation};
pub use propagators::{
    compose, finite_n_propagator, k_constant_field, k_desitter, k_free, k_general_quadratic,
    k_oscillator_td, overlap_ball_integral, semigroup_residual, KernelForm, OscillatorBoundaryData,
    OscillatorValue, PartitionSpec, Residual, System,
};
pub use rational::{
    digits, fractional_part, linear_cmp, linear_less, norm, parse_rational, valuation,
    DigitExpansion, Place, Prime, Valuation,
};
pub use verify::{run_check, Check, Sampler, VerifyReport};

/// The scalar type of every input: an arbitrary-precision fraction.
pub type Rational = num_rational::BigRational;
