//! Dense univariate polynomials.
//!
//! Coefficients are stored in ascending degree order (`coeffs[0]` is the
//! constant term). Ring arithmetic works for any [`Coefficient`]; root
//! finding lives in [`roots`] and requires complex floating-point
//! coefficients.

pub mod roots;

use crate::scalar::{Coefficient, Real};
use num_complex::Complex;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

pub use roots::RootSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("polynomial has degree zero (or is the zero polynomial); it has no roots")]
    DegreeZero,
    #[error("root iteration did not converge after {iterations} iterations (worst scaled residual {worst_residual:e})")]
    NoConvergence { iterations: usize, worst_residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<C> {
    coeffs: Vec<C>,
}

impl<C: Coefficient> Polynomial<C> {
    /// Builds a polynomial from ascending coefficients. Exact trailing zeros
    /// are dropped; near-zero values are kept (see [`Polynomial::trimmed`]).
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Builds from descending coefficients (highest degree first).
    pub fn from_descending(mut coeffs: Vec<C>) -> Self {
        coeffs.reverse();
        Self::new(coeffs)
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `s`.
    pub fn s() -> Self {
        Self::new(vec![C::zero(), C::one()])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    /// Coefficient of `s^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> C {
        self.coeffs.get(i).cloned().unwrap_or_else(C::zero)
    }

    pub fn max_modulus(&self) -> f64 {
        self.coeffs.iter().map(Coefficient::modulus).fold(0.0, f64::max)
    }

    /// Drops trailing coefficients with `|c| <= rel * reference`.
    pub fn trimmed(mut self, rel: f64, reference: f64) -> Self {
        let cut = rel * reference;
        while self.coeffs.last().is_some_and(|c| c.modulus() <= cut) {
            self.coeffs.pop();
        }
        self
    }

    /// Horner evaluation.
    pub fn eval(&self, s: &C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::zero(), |acc, c| acc * s.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| C::from_usize(i) * c.clone())
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Sum with cancellation-aware trimming: trailing coefficients below
    /// `trim_threshold * max(|a|, |b|)` become zero.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        let reference = self.max_modulus().max(other.max_modulus());
        Self::new(coeffs).trimmed(C::trim_threshold(), reference)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg_ref())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    fn neg_ref(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// `leading * Π (s - r)`.
    pub fn from_roots(roots: &[C], leading: C) -> Result<Self, PolyError> {
        if leading.is_zero() {
            return Err(PolyError::ZeroLeadingCoefficient);
        }
        let mut coeffs = vec![leading];
        for r in roots {
            // multiply in place by (s - r)
            coeffs.push(C::zero());
            for i in (0..coeffs.len()).rev() {
                let lower = if i > 0 { coeffs[i - 1].clone() } else { C::zero() };
                coeffs[i] = lower - r.clone() * coeffs[i].clone();
            }
        }
        Ok(Self { coeffs })
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Real> Polynomial<Complex<T>> {
    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, T::zero())).collect())
    }

    /// True when every coefficient has an exactly zero imaginary part.
    pub fn has_real_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == T::zero())
    }

    /// Value and first derivative at `s` in one Horner pass.
    pub fn eval_with_derivative(&self, s: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut p = Complex::new(T::zero(), T::zero());
        let mut dp = p;
        for c in self.coeffs.iter().rev() {
            dp = dp * s + p;
            p = p * s + c;
        }
        (p, dp)
    }

    /// `Σ |c_i| |s|^i`, the scale of rounding error in Horner evaluation.
    pub fn eval_abs(&self, s: Complex<T>) -> T {
        let r = s.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * r + c.norm())
    }
}

impl<C: Coefficient> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        Polynomial::add(self, rhs)
    }
}

impl<C: Coefficient> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        Polynomial::sub(self, rhs)
    }
}

impl<C: Coefficient> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        Polynomial::mul(self, rhs)
    }
}

impl<C: Coefficient> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.neg_ref()
    }
}
