//! Characteristic polynomials with declared parameter dependence.
//!
//! Dynamic and static parameters enter `Δ(s, h)` linearly; connection
//! parameters enter through their square. Each parameter may carry the
//! split `Δ = A_i + φ_i(h_i) B_i` (with `φ_i(h) = h` or `h²`) evaluated at
//! the operating point of the other parameters, and the model may carry a
//! numeric evaluator of the whole polynomial as a fallback.

use super::{SensitivityError, VelocityField};
use crate::poly::Polynomial;
use crate::ratfun::residues;
use crate::scalar::Real;
use num_complex::Complex;
use std::fmt;
use std::sync::Arc;

/// Agreement required between the declared splits and Δ.
pub const REASSEMBLY_TOL: f64 = 1e-10;
/// Agreement required between analytic and finite-difference derivatives.
pub const FALLBACK_TOL: f64 = 1e-6;
/// Affine refit from the evaluator must predict a third point this well.
pub const AFFINE_REFIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    /// Stores energy (inductance, inertia).
    Dynamic,
    /// Dissipates energy (resistance, friction).
    Static,
    /// Converts energy (torque constant); enters Δ squared.
    Connection,
}

impl ParamKind {
    pub fn is_squared(self) -> bool {
        matches!(self, ParamKind::Connection)
    }
}

/// `Δ = a + φ(h) b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSplit<T> {
    pub a: Polynomial<Complex<T>>,
    pub b: Polynomial<Complex<T>>,
    pub squared: bool,
}

impl<T: Real> AffineSplit<T> {
    pub fn phi(&self, h: T) -> T {
        if self.squared {
            h * h
        } else {
            h
        }
    }

    pub fn dphi(&self, h: T) -> T {
        if self.squared {
            h + h
        } else {
            T::one()
        }
    }

    pub fn at(&self, h: T) -> Polynomial<Complex<T>> {
        self.a.add(&self.b.scale(&Complex::new(self.phi(h), T::zero())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter<T> {
    pub name: String,
    pub value: T,
    pub kind: ParamKind,
    pub split: Option<AffineSplit<T>>,
}

pub type CharPolyEvaluator<T> = Arc<dyn Fn(&[T]) -> Polynomial<Complex<T>> + Send + Sync>;

#[derive(Clone)]
pub struct ParamCharPoly<T> {
    params: Vec<Parameter<T>>,
    evaluator: Option<CharPolyEvaluator<T>>,
    charpoly: Polynomial<Complex<T>>,
}

impl<T: Real> fmt::Debug for ParamCharPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamCharPoly")
            .field("params", &self.params)
            .field("evaluator", &self.evaluator.is_some())
            .field("charpoly", &self.charpoly)
            .finish()
    }
}

fn relative_gap<T: Real>(a: &Polynomial<Complex<T>>, b: &Polynomial<Complex<T>>, scale: f64) -> f64 {
    a.sub(b).max_modulus() / scale.max(f64::MIN_POSITIVE)
}

impl<T: Real> ParamCharPoly<T> {
    /// Validates the declared structure: connection parameters use squared
    /// splits and all others linear ones, and every split reassembles the
    /// same Δ (and matches the evaluator, when present).
    pub fn new(params: Vec<Parameter<T>>, evaluator: Option<CharPolyEvaluator<T>>) -> Result<Self, SensitivityError> {
        if params.is_empty() {
            return Err(SensitivityError::EmptyModel);
        }
        let values: Vec<T> = params.iter().map(|p| p.value).collect();
        let mut reference: Option<Polynomial<Complex<T>>> = evaluator.as_ref().map(|f| f(&values));
        for p in &params {
            match &p.split {
                Some(split) => {
                    if split.squared != p.kind.is_squared() {
                        return Err(SensitivityError::KindMismatch {
                            name: p.name.clone(),
                            kind: p.kind,
                        });
                    }
                    let delta = split.at(p.value);
                    match &reference {
                        Some(r) => {
                            let rel = relative_gap(&delta, r, r.max_modulus());
                            if rel > REASSEMBLY_TOL {
                                return Err(SensitivityError::InconsistentDecomposition {
                                    name: p.name.clone(),
                                    relative: rel,
                                });
                            }
                        }
                        None => reference = Some(delta),
                    }
                }
                None if evaluator.is_none() => {
                    return Err(SensitivityError::MissingDecomposition { name: p.name.clone() })
                }
                None => {}
            }
        }
        Ok(Self {
            params,
            evaluator,
            charpoly: reference.expect("at least one parameter"),
        })
    }

    pub fn params(&self) -> &[Parameter<T>] {
        &self.params
    }

    pub fn values(&self) -> Vec<T> {
        self.params.iter().map(|p| p.value).collect()
    }

    /// Δ at the operating point.
    pub fn charpoly(&self) -> &Polynomial<Complex<T>> {
        &self.charpoly
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    fn param(&self, i: usize) -> Result<&Parameter<T>, SensitivityError> {
        self.params
            .get(i)
            .ok_or_else(|| SensitivityError::UnknownParameter(format!("#{i}")))
    }

    /// Δ with parameter `i` moved to `h`, all others at the operating point.
    pub fn charpoly_with(&self, i: usize, h: T) -> Result<Polynomial<Complex<T>>, SensitivityError> {
        let p = self.param(i)?;
        if let Some(split) = &p.split {
            return Ok(split.at(h));
        }
        let f = self.evaluator.as_ref().ok_or_else(|| SensitivityError::MissingDecomposition {
            name: p.name.clone(),
        })?;
        let mut values = self.values();
        values[i] = h;
        Ok(f(&values))
    }

    /// The split for parameter `i`, refitted from the evaluator when no
    /// analytic one was declared.
    pub fn affine_split(&self, i: usize) -> Result<AffineSplit<T>, SensitivityError> {
        let p = self.param(i)?;
        if let Some(split) = &p.split {
            return Ok(split.clone());
        }
        let squared = p.kind.is_squared();
        let phi = |h: T| if squared { h * h } else { h };
        let h0 = p.value;
        let spread = T::lit(0.5) * T::one().max(h0.abs());
        let (h1, h2) = (h0 + spread, h0 - spread * T::lit(0.75));
        let d0 = self.charpoly_with(i, h0)?;
        let d1 = self.charpoly_with(i, h1)?;
        let d2 = self.charpoly_with(i, h2)?;
        let dphi = phi(h1) - phi(h0);
        let b = d1.sub(&d0).scale(&Complex::new(dphi.recip(), T::zero()));
        let a = d0.sub(&b.scale(&Complex::new(phi(h0), T::zero())));
        let split = AffineSplit { a, b, squared };
        let scale = d0.max_modulus().max(d1.max_modulus()).max(d2.max_modulus());
        let rel = relative_gap(&split.at(h2), &d2, scale);
        if rel > AFFINE_REFIT_TOL {
            return Err(SensitivityError::NonAffineParameter {
                name: p.name.clone(),
                relative: rel,
            });
        }
        Ok(split)
    }

    /// `∂Δ/∂h_i`: `B_i` for linear parameters, `2 h_i B_i` for squared ones,
    /// otherwise a Richardson-extrapolated central difference of the
    /// evaluator. When both routes exist they are cross-checked.
    pub fn param_derivative(&self, i: usize) -> Result<Polynomial<Complex<T>>, SensitivityError> {
        let p = self.param(i)?;
        let analytic = p.split.as_ref().map(|s| s.b.scale(&Complex::new(s.dphi(p.value), T::zero())));
        let numeric = match &self.evaluator {
            Some(_) => Some(self.numeric_derivative(i)?),
            None => None,
        };
        match (analytic, numeric) {
            (Some(a), Some(n)) => {
                let scale = a
                    .max_modulus()
                    .max(self.charpoly.max_modulus() / p.value.abs().max(T::one()).to_f64_lossy());
                let rel = relative_gap(&a, &n, scale);
                if rel > FALLBACK_TOL {
                    return Err(SensitivityError::FallbackInconsistent {
                        name: p.name.clone(),
                        relative: rel,
                    });
                }
                Ok(a)
            }
            (Some(a), None) => Ok(a),
            (None, Some(n)) => Ok(n),
            (None, None) => Err(SensitivityError::MissingDecomposition { name: p.name.clone() }),
        }
    }

    fn numeric_derivative(&self, i: usize) -> Result<Polynomial<Complex<T>>, SensitivityError> {
        let p = self.param(i)?;
        let f = self.evaluator.as_ref().expect("checked by caller");
        let h = p.value;
        let step = T::lit(1e-6) * T::one().max(h.abs());
        let central = |d: T| {
            let mut up = self.values();
            let mut down = up.clone();
            up[i] = h + d;
            down[i] = h - d;
            f(&up)
                .sub(&f(&down))
                .scale(&Complex::new((d + d).recip(), T::zero()))
        };
        let coarse = central(step);
        let fine = central(step * T::lit(0.5));
        let scale = fine
            .max_modulus()
            .max(self.charpoly.max_modulus() / h.abs().max(T::one()).to_f64_lossy());
        let rel = relative_gap(&coarse, &fine, scale);
        if rel > 1e-4 {
            return Err(SensitivityError::UnstableNumericDerivative {
                name: p.name.clone(),
                relative: rel,
            });
        }
        let four_thirds = Complex::new(T::lit(4.0 / 3.0), T::zero());
        let third = Complex::new(T::lit(1.0 / 3.0), T::zero());
        Ok(fine.scale(&four_thirds).sub(&coarse.scale(&third)))
    }

    /// `dp_j/dh_i = -k̃_ji`, the negated residues of `(∂Δ/∂h_i) / Δ`.
    pub fn param_velocities(&self, i: usize) -> Result<VelocityField<T>, SensitivityError> {
        let derivative = self.param_derivative(i)?;
        let set = residues(&derivative, &self.charpoly)?;
        Ok(VelocityField::from_residues(&set, self.params[i].value))
    }

    /// Velocity fields for every parameter, in declaration order.
    pub fn all_velocities(&self) -> Result<Vec<VelocityField<T>>, SensitivityError> {
        (0..self.params.len()).map(|i| self.param_velocities(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::dc_motor_model;

    #[test]
    fn dc_motor_derivatives_match_closed_forms() {
        let m = dc_motor_model(0.005, 1.0, 0.010, 0.002, 0.96).unwrap();
        let l = m.param_derivative(m.index_of("L").unwrap()).unwrap();
        // s (J s + b)
        assert_eq!(l, Polynomial::from_real(&[0.0, 0.002, 0.010]));
        let ke = m.param_derivative(m.index_of("Ke").unwrap()).unwrap();
        assert_eq!(ke, Polynomial::from_real(&[2.0 * 0.96]));
    }

    #[test]
    fn absent_parameter_has_zero_velocity() {
        let a = Polynomial::from_real(&[2.0, 3.0, 1.0]);
        let model = ParamCharPoly::new(
            vec![Parameter {
                name: "unused".into(),
                value: 4.0,
                kind: ParamKind::Static,
                split: Some(AffineSplit {
                    a,
                    b: Polynomial::zero(),
                    squared: false,
                }),
            }],
            None,
        )
        .unwrap();
        assert!(model.param_derivative(0).unwrap().is_zero());
        let field = model.param_velocities(0).unwrap();
        assert_eq!(field.entries.len(), 2);
        assert!(field.finite().all(|(_, v)| v.norm() == 0.0));
    }

    #[test]
    fn kind_and_split_must_agree() {
        let err = ParamCharPoly::new(
            vec![Parameter {
                name: "k".into(),
                value: 1.0,
                kind: ParamKind::Connection,
                split: Some(AffineSplit {
                    a: Polynomial::from_real(&[0.0, 1.0]),
                    b: Polynomial::from_real(&[1.0]),
                    squared: false,
                }),
            }],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, SensitivityError::KindMismatch { .. }));
    }

    #[test]
    fn inconsistent_splits_rejected() {
        let p = |name: &str, a: &[f64], b: &[f64], v: f64| Parameter {
            name: name.into(),
            value: v,
            kind: ParamKind::Static,
            split: Some(AffineSplit {
                a: Polynomial::from_real(a),
                b: Polynomial::from_real(b),
                squared: false,
            }),
        };
        // first reassembles s + 3, second s + 4
        let err = ParamCharPoly::new(vec![p("x", &[1.0, 1.0], &[1.0], 2.0), p("y", &[0.0, 1.0], &[2.0], 2.0)], None)
            .unwrap_err();
        assert!(matches!(err, SensitivityError::InconsistentDecomposition { .. }));
    }

    #[test]
    fn evaluator_only_model_refits_and_differentiates() {
        // Δ = s^2 + c s + k^2, with c linear and k a connection parameter
        let eval: CharPolyEvaluator<f64> = Arc::new(|h: &[f64]| Polynomial::from_real(&[h[1] * h[1], h[0], 1.0]));
        let model = ParamCharPoly::new(
            vec![
                Parameter {
                    name: "c".into(),
                    value: 0.4,
                    kind: ParamKind::Static,
                    split: None,
                },
                Parameter {
                    name: "k".into(),
                    value: 1.5,
                    kind: ParamKind::Connection,
                    split: None,
                },
            ],
            Some(eval),
        )
        .unwrap();
        let dk = model.param_derivative(1).unwrap();
        assert!((dk.coeff(0).re - 3.0).abs() < 1e-8);
        let split = model.affine_split(1).unwrap();
        assert!(split.squared);
        assert!((split.b.coeff(0).re - 1.0).abs() < 1e-10);
        assert!(split.a.coeff(0).norm() < 1e-10);
    }

    #[test]
    fn non_affine_dependence_detected() {
        // cubic dependence on a parameter declared linear
        let eval: CharPolyEvaluator<f64> = Arc::new(|h: &[f64]| Polynomial::from_real(&[h[0].powi(3), 1.0]));
        let model = ParamCharPoly::new(
            vec![Parameter {
                name: "x".into(),
                value: 1.0,
                kind: ParamKind::Dynamic,
                split: None,
            }],
            Some(eval),
        )
        .unwrap();
        assert!(matches!(
            model.affine_split(0),
            Err(SensitivityError::NonAffineParameter { .. })
        ));
    }

    #[test]
    fn analytic_and_numeric_disagreement_detected() {
        let eval: CharPolyEvaluator<f64> = Arc::new(|h: &[f64]| Polynomial::from_real(&[h[0] * 2.0, 1.0]));
        let model = ParamCharPoly::new(
            vec![Parameter {
                name: "x".into(),
                value: 0.0,
                kind: ParamKind::Static,
                // claims slope 1, evaluator has slope 2; both give Δ = s at x = 0
                split: Some(AffineSplit {
                    a: Polynomial::from_real(&[0.0, 1.0]),
                    b: Polynomial::from_real(&[1.0]),
                    squared: false,
                }),
            }],
            Some(eval),
        )
        .unwrap();
        assert!(matches!(
            model.param_derivative(0),
            Err(SensitivityError::FallbackInconsistent { .. })
        ));
    }
}
