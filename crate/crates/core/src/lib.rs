//! Numerical core for the function
//!
//! ```text
//! psi_z(x) = sum_{n >= 1} (n + x)^(-z)
//! ```
//!
//! and for the half-line operator experiments built around it: the momentum
//! operator with a Dirichlet condition at the origin, the unit shift on
//! `L^2(0, inf)`, the difference operator `f(x) - f(x - 1)` and the dilation
//! generator on weighted spaces.
//!
//! The crate is `no_std` (it needs `alloc`) unless the default `std` feature
//! is enabled. All operations are pure functions of their arguments.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod norm;
pub mod operator;
pub mod psi;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use norm::{
    a_alpha_eigendata, convergence_classify, default_tail_samples, tail_exponent_fit,
    weighted_dilation_check, weighted_norm_integral, ConvergenceVerdict, OriginCheck, Verdict,
    WeightExponent, MARGINAL_BAND,
};
pub use operator::{
    build_momentum_dirichlet, deficiency_diagnostic, delta_apply, dilation_generator_residual,
    exp_eigen_residual, exp_growth_ratio, intertwine_check, shift_adjoint_apply,
    shift_adjoint_eigen_residual, shift_apply, shift_isometry_check, AdjointShift,
    DeficiencyClass, DeficiencyReport, DeficiencySign, EigenSign, Grid,
    GridFunction, IntertwineReport, SpectralResidual, StencilMatrix,
};
pub use psi::{
    boundary_zeta_residual, evaluate, functional_equation_residual, pole_probe,
    psi_euler_maclaurin, psi_euler_maclaurin_auto, psi_integral, psi_series, BoundaryResidual,
    EvalFlags, EvalResult, IdentityResidual, Method, QuadratureSpec,
};
pub use special::{complex_gamma, complex_power, reference_zeta, ComplexValue};
