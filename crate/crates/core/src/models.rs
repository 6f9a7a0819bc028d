//! Reference physical models.

use crate::poly::Polynomial;
use crate::scalar::{Coefficient, Real};
use crate::sensitivity::{AffineSplit, CharPolyEvaluator, ParamCharPoly, ParamKind, Parameter, SensitivityError};
use num_complex::Complex;
use std::sync::Arc;

/// Names of the DC motor parameters, in model order.
pub const DC_MOTOR_PARAMS: [&str; 5] = ["L", "R", "J", "b", "Ke"];

fn linear<C: Coefficient>(slope: &C, offset: &C) -> Polynomial<C> {
    Polynomial::new(vec![offset.clone(), slope.clone()])
}

/// `(L s + R)(J s + b) + Ke²` for a permanent-magnet DC motor with armature
/// inductance `L`, resistance `R`, rotor inertia `J`, viscous friction `b`
/// and torque constant `Ke`.
pub fn dc_motor_charpoly<C: Coefficient>(l: &C, r: &C, j: &C, b: &C, ke: &C) -> Polynomial<C> {
    let electrical = linear(l, r);
    let mechanical = linear(j, b);
    electrical
        .mul(&mechanical)
        .add(&Polynomial::constant(ke.clone() * ke.clone()))
}

/// The motor as a [`ParamCharPoly`] with analytic splits for all five
/// parameters plus the closed-form evaluator as a cross-check.
pub fn dc_motor_model<T: Real>(l: T, r: T, j: T, b: T, ke: T) -> Result<ParamCharPoly<T>, SensitivityError> {
    let c = |x: T| Complex::new(x, T::zero());
    let (lc, rc, jc, bc, kc) = (c(l), c(r), c(j), c(b), c(ke));
    let zero = c(T::zero());
    let s = Polynomial::<Complex<T>>::s();
    let ke2 = Polynomial::constant(kc * kc);
    let electrical = linear(&lc, &rc);
    let mechanical = linear(&jc, &bc);

    let split = |a: Polynomial<Complex<T>>, b: Polynomial<Complex<T>>, squared| Some(AffineSplit { a, b, squared });
    let param = |name: &str, value: T, kind, split| Parameter {
        name: name.to_string(),
        value,
        kind,
        split,
    };
    let params = vec![
        param(
            "L",
            l,
            ParamKind::Dynamic,
            split(linear(&zero, &rc).mul(&mechanical).add(&ke2), s.mul(&mechanical), false),
        ),
        param(
            "R",
            r,
            ParamKind::Static,
            split(linear(&lc, &zero).mul(&mechanical).add(&ke2), mechanical.clone(), false),
        ),
        param(
            "J",
            j,
            ParamKind::Dynamic,
            split(electrical.mul(&linear(&zero, &bc)).add(&ke2), s.mul(&electrical), false),
        ),
        param(
            "b",
            b,
            ParamKind::Static,
            split(electrical.mul(&linear(&jc, &zero)).add(&ke2), electrical.clone(), false),
        ),
        param(
            "Ke",
            ke,
            ParamKind::Connection,
            split(electrical.mul(&mechanical), Polynomial::constant(c(T::one())), true),
        ),
    ];
    let evaluator: CharPolyEvaluator<T> =
        Arc::new(move |h: &[T]| dc_motor_charpoly(&c(h[0]), &c(h[1]), &c(h[2]), &c(h[3]), &c(h[4])));
    ParamCharPoly::new(params, Some(evaluator))
}

/// Operating point used throughout the examples and tests.
pub fn dc_motor_reference<T: Real>() -> ParamCharPoly<T> {
    dc_motor_model(T::lit(0.005), T::one(), T::lit(0.010), T::lit(0.002), T::lit(0.96))
        .expect("reference motor model is consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn charpoly_expansion() {
        let p = dc_motor_charpoly(&2.0, &3.0, &5.0, &7.0, &11.0);
        // 10 s^2 + (14 + 15) s + 21 + 121
        assert_eq!(p.coeffs(), &[142.0, 29.0, 10.0]);
    }

    #[test]
    fn exact_rational_operating_point() {
        let r = |n, d| Rational64::new(n, d);
        let p = dc_motor_charpoly(&r(1, 200), &r(1, 1), &r(1, 100), &r(1, 500), &r(24, 25));
        assert_eq!(p.coeffs(), &[r(1, 500) + r(576, 625), r(1, 100_000) + r(1, 100), r(1, 20_000)]);
    }

    #[test]
    fn reference_model_builds() {
        let m = dc_motor_reference::<f64>();
        assert_eq!(m.params().len(), 5);
        let names: Vec<&str> = m.params().iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, DC_MOTOR_PARAMS);
        for i in 0..5 {
            m.param_derivative(i).unwrap();
        }
    }
}
