//! Pole velocities.
//!
//! For the feedback loop `G0 = N / (D + K N)` the velocity of a simple pole
//! with respect to the gain is the negated residue of `G0` at that pole.
//! Repeated poles move with unbounded speed; their leading Laurent
//! coefficient gives the finite law `|dp| = (|k̄| |dK|)^(1/r)`.
//!
//! Parameter sensitivities reuse the same machinery on
//! `∂Δ/∂h_i / Δ`, see [`param`].

pub mod param;

use crate::ratfun::{PoleResidueSet, RatfunError, RationalTF};
use crate::scalar::Real;
use num_complex::Complex;
use thiserror::Error;

pub use param::{AffineSplit, CharPolyEvaluator, ParamCharPoly, ParamKind, Parameter};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("multiplicity must be at least 2, got {0}")]
    InvalidMultiplicity(usize),
    #[error("gain increment must be positive and finite")]
    InvalidIncrement,
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
    #[error("parameter {name}: analytic and numeric derivatives disagree (relative {relative:e})")]
    FallbackInconsistent { name: String, relative: f64 },
    #[error("parameter {name}: finite-difference derivative is unstable (relative {relative:e})")]
    UnstableNumericDerivative { name: String, relative: f64 },
    #[error("parameter {name}: no affine decomposition and no evaluator")]
    MissingDecomposition { name: String },
    #[error("parameter {name}: dependence is not affine in the declared form (relative {relative:e})")]
    NonAffineParameter { name: String, relative: f64 },
    #[error("parameter {name}: decomposition does not reassemble the characteristic polynomial (relative {relative:e})")]
    InconsistentDecomposition { name: String, relative: f64 },
    #[error("parameter {name}: kind {kind:?} is incompatible with the declared dependence")]
    KindMismatch { name: String, kind: ParamKind },
    #[error("model has no parameters")]
    EmptyModel,
    #[error(transparent)]
    Ratfun(#[from] RatfunError),
}

impl From<crate::poly::PolyError> for SensitivityError {
    fn from(e: crate::poly::PolyError) -> Self {
        SensitivityError::Ratfun(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Velocity<T> {
    Finite(Complex<T>),
    /// Repeated pole: the modulus diverges. `kbar` is the generalized
    /// residue that sets the finite-increment law.
    Infinite { kbar: Complex<T> },
}

impl<T: Real> Velocity<T> {
    pub fn finite(&self) -> Option<Complex<T>> {
        match *self {
            Velocity::Finite(v) => Some(v),
            Velocity::Infinite { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleVelocity<T> {
    pub pole: Complex<T>,
    pub multiplicity: usize,
    pub velocity: Velocity<T>,
}

impl<T: Real> PoleVelocity<T> {
    /// Expected displacement magnitude for a parameter increment `dk`:
    /// `|v| dk` for simple poles, `(|k̄| dk)^(1/r)` for repeated ones.
    pub fn displacement(&self, dk: T) -> T {
        match self.velocity {
            Velocity::Finite(v) => v.norm() * dk.abs(),
            Velocity::Infinite { kbar } => {
                (kbar.norm() * dk.abs()).powf(T::one() / T::from_usize(self.multiplicity).unwrap())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField<T> {
    /// Gain or parameter value the field was computed at.
    pub at: T,
    pub entries: Vec<PoleVelocity<T>>,
    /// `-(r-1)/r` for the highest multiplicity `r > 1` present.
    pub log_slope: Option<T>,
}

impl<T: Real> VelocityField<T> {
    pub fn from_residues(set: &PoleResidueSet<T>, at: T) -> Self {
        let entries: Vec<PoleVelocity<T>> = set
            .entries
            .iter()
            .map(|e| PoleVelocity {
                pole: e.pole,
                multiplicity: e.multiplicity,
                velocity: if e.multiplicity == 1 {
                    Velocity::Finite(-e.residue)
                } else {
                    Velocity::Infinite { kbar: e.residue }
                },
            })
            .collect();
        let log_slope = entries
            .iter()
            .map(|e| e.multiplicity)
            .filter(|&r| r > 1)
            .max()
            .map(|r| {
                let r = T::from_usize(r).unwrap();
                -(r - T::one()) / r
            });
        Self {
            at,
            entries,
            log_slope,
        }
    }

    pub fn is_simple(&self) -> bool {
        self.entries.iter().all(|e| e.multiplicity == 1)
    }

    /// `(pole, velocity)` for the simple poles.
    pub fn finite(&self) -> impl Iterator<Item = (Complex<T>, Complex<T>)> + '_ {
        self.entries
            .iter()
            .filter_map(|e| e.velocity.finite().map(|v| (e.pole, v)))
    }
}

/// `dp_j/dK = -k̄_j` at gain `k`.
pub fn gain_velocities<T: Real>(g: &RationalTF<T>, k: T) -> Result<VelocityField<T>, SensitivityError> {
    let set = g.closed_loop_residues(k)?;
    Ok(VelocityField::from_residues(&set, k))
}

/// Speed of a pole of multiplicity `r` under a finite gain increment `dk`:
/// `(|k̄| / dk^(r-1))^(1/r)`, which diverges as `dk -> 0`.
pub fn multiple_pole_speed<T: Real>(kbar: Complex<T>, r: usize, dk: T) -> Result<T, SensitivityError> {
    if r < 2 {
        return Err(SensitivityError::InvalidMultiplicity(r));
    }
    if !(dk > T::zero()) || !dk.is_finite() {
        return Err(SensitivityError::InvalidIncrement);
    }
    let r_t = T::from_usize(r).unwrap();
    Ok((kbar.norm() / dk.powf(r_t - T::one())).powf(r_t.recip()))
}
