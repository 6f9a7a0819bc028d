//! Pole sensitivity from partial-fraction residues.
//!
//! For a plant `G = N/D` under gain feedback, the closed-loop poles are the
//! roots of `Δ(s, K) = D(s) + K N(s)` and each simple pole moves with
//! velocity `dp_j/dK = -k̄_j`, the negated residue of `N/Δ` at `p_j`. The
//! crate provides
//!
//! * polynomial arithmetic and an all-roots solver ([`poly`]),
//! * transfer functions and cover-up residues ([`ratfun`]),
//! * gain and parameter velocities ([`sensitivity`]),
//! * a residue-driven root-locus tracer with an exact baseline ([`tracer`]),
//! * a timing/accuracy harness over ten reference plants ([`bench`]).
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the common choices.
//!
//! ```
//! use reslocus::{gain_velocities, RationalTF64};
//!
//! // G(s) = 4s / ((s + 4)(s^2 + 2s + 5))
//! let g = RationalTF64::from_coeffs(&[0.0, 4.0], &[20.0, 13.0, 6.0, 1.0]).unwrap();
//! let field = gain_velocities(&g, 0.0).unwrap();
//! let v = field.finite().find(|(p, _)| (p.re + 4.0).abs() < 1e-9).unwrap().1;
//! assert!((v.re - 16.0 / 13.0).abs() < 1e-12);
//! ```

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod matching;
pub mod models;
pub mod poly;
pub mod ratfun;
pub mod scalar;
pub mod sensitivity;
pub mod tracer;

pub use poly::{PolyError, Polynomial, RootSet};
pub use ratfun::{PoleResidue, PoleResidueSet, Properness, RatfunError, RationalTF, Warning};
pub use scalar::{Coefficient, Real};
pub use sensitivity::{
    gain_velocities, multiple_pole_speed, ParamCharPoly, ParamKind, SensitivityError, Velocity, VelocityField,
};
pub use tracer::{
    exact_contour, exact_locus, locus_error, step_update, trace_contour, trace_locus, EventKind, Locus, LocusEvent,
    LocusSample, TraceConfig, TraceError, TraceMethod,
};

use num_complex::Complex;

pub type Polynomial64 = Polynomial<Complex<f64>>;
pub type Polynomial32 = Polynomial<Complex<f32>>;
/// Exact rational coefficients, for structural checks.
pub type ExactPolynomial = Polynomial<num_rational::Rational64>;
pub type RationalTF64 = RationalTF<f64>;
pub type RationalTF32 = RationalTF<f32>;
pub type Locus64 = Locus<f64>;
pub type Locus32 = Locus<f32>;
pub type TraceConfig64 = TraceConfig<f64>;
pub type VelocityField64 = VelocityField<f64>;
pub type ParamCharPoly64 = ParamCharPoly<f64>;
