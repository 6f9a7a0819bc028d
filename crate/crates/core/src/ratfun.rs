//! Rational transfer functions, closed-loop characteristic polynomials and
//! cover-up residues.

use crate::poly::{PolyError, Polynomial, RootSet};
use crate::scalar::Real;
use num_complex::Complex;
use thiserror::Error;

/// Distance under which a zero and a pole are reported as a common factor.
pub const COMMON_FACTOR_TOL: f64 = 1e-8;
/// A proper plant's closed-loop leading coefficient must exceed this.
pub const DEGREE_DROP_TOL: f64 = 1e-12;
/// Relative size of `|N(p)|` under which a residue is flagged as zero.
pub const STATIONARY_POLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatfunError {
    #[error("denominator must have degree >= 1")]
    DegenerateDenominator,
    #[error("improper transfer function: numerator degree {num_degree} exceeds denominator degree {den_degree}")]
    ImproperTransferFunction { num_degree: usize, den_degree: usize },
    #[error("closed-loop leading coefficient vanishes at K = {k}")]
    DegreeDropAtK { k: f64 },
    #[error("numerator degree {num_degree} exceeds characteristic polynomial degree {den_degree}")]
    ImproperInput { num_degree: usize, den_degree: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Properness {
    StrictlyProper,
    Proper,
    Improper,
}

/// Non-fatal diagnostics attached to transfer functions and residue sets.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// A numerator root lies within [`COMMON_FACTOR_TOL`] of a pole. The
    /// factor is kept.
    CommonFactor { zero: Complex<f64>, pole: Complex<f64> },
    ZeroNumerator,
    /// `N(p)` vanishes at this pole: zero residue, stationary pole.
    PoleAtNumeratorRoot { pole: Complex<f64> },
}

/// Proper rational function `N(s)/D(s)` with monic `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTF<T> {
    num: Polynomial<Complex<T>>,
    den: Polynomial<Complex<T>>,
    properness: Properness,
    warnings: Vec<Warning>,
}

impl<T: Real> RationalTF<T> {
    pub fn new(num: Polynomial<Complex<T>>, den: Polynomial<Complex<T>>) -> Result<Self, RatfunError> {
        let den_degree = match den.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(RatfunError::DegenerateDenominator),
        };
        let lead_inv = den.leading().copied().unwrap().inv();
        let den = den.scale(&lead_inv);
        let num = num.scale(&lead_inv);

        let properness = match num.degree() {
            Some(d) if d > den_degree => {
                return Err(RatfunError::ImproperTransferFunction {
                    num_degree: d,
                    den_degree,
                })
            }
            Some(d) if d == den_degree => Properness::Proper,
            _ => Properness::StrictlyProper,
        };

        let mut warnings = Vec::new();
        match num.degree() {
            None => warnings.push(Warning::ZeroNumerator),
            Some(d) if d >= 1 => {
                let zeros = num.roots_best_effort()?;
                let poles = den.roots_best_effort()?;
                for &z in &zeros.distinct {
                    for &p in &poles.distinct {
                        if (z - p).norm() < T::lit(COMMON_FACTOR_TOL) {
                            warnings.push(Warning::CommonFactor {
                                zero: to_c64(z),
                                pole: to_c64(p),
                            });
                        }
                    }
                }
            }
            _ => {}
        }

        Ok(Self {
            num,
            den,
            properness,
            warnings,
        })
    }

    /// From real coefficient lists in ascending order.
    pub fn from_coeffs(num: &[T], den: &[T]) -> Result<Self, RatfunError> {
        Self::new(Polynomial::from_real(num), Polynomial::from_real(den))
    }

    /// `gain * Π(s - z) / Π(s - p)`.
    pub fn from_zpk(zeros: &[Complex<T>], poles: &[Complex<T>], gain: T) -> Result<Self, RatfunError> {
        let one = Complex::new(T::one(), T::zero());
        let num = if gain == T::zero() {
            Polynomial::zero()
        } else {
            Polynomial::from_roots(zeros, Complex::new(gain, T::zero()))?
        };
        Self::new(num, Polynomial::from_roots(poles, one)?)
    }

    pub fn num(&self) -> &Polynomial<Complex<T>> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<Complex<T>> {
        &self.den
    }

    /// Number of open-loop poles, `n = deg D`.
    pub fn order(&self) -> usize {
        self.den.degree().unwrap_or(0)
    }

    pub fn properness(&self) -> Properness {
        self.properness
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn eval(&self, s: Complex<T>) -> Complex<T> {
        self.num.eval(&s) / self.den.eval(&s)
    }

    /// Leading coefficient of `D + K N` (the denominator is monic).
    pub fn closed_loop_leading(&self, k: T) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        match self.properness {
            Properness::Proper => one + self.num.leading().copied().unwrap() * k,
            _ => one,
        }
    }

    /// `Δ(s, K) = D(s) + K N(s)`.
    pub fn closed_loop_charpoly(&self, k: T) -> Result<Polynomial<Complex<T>>, RatfunError> {
        if self.closed_loop_leading(k).norm() <= T::lit(DEGREE_DROP_TOL) {
            return Err(RatfunError::DegreeDropAtK { k: k.to_f64_lossy() });
        }
        Ok(self.charpoly_unchecked(k))
    }

    /// `D + K N` without the degree check; may have reduced degree.
    pub fn charpoly_unchecked(&self, k: T) -> Polynomial<Complex<T>> {
        self.den.add(&self.num.scale(&Complex::new(k, T::zero())))
    }

    /// Residues of `G0(s) = N(s) / Δ(s, K)` at its poles.
    pub fn closed_loop_residues(&self, k: T) -> Result<PoleResidueSet<T>, RatfunError> {
        let charpoly = self.closed_loop_charpoly(k)?;
        let mut set = residues(&self.num, &charpoly)?;
        set.gain = Some(k);
        Ok(set)
    }
}

fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleResidue<T> {
    pub pole: Complex<T>,
    pub multiplicity: usize,
    /// Cover-up residue for simple poles; leading Laurent coefficient
    /// `G(s)(s-p)^r |_{s=p}` for a pole of multiplicity `r`.
    pub residue: Complex<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleResidueSet<T> {
    pub entries: Vec<PoleResidue<T>>,
    /// Gain at which the set was computed, when it came from a closed loop.
    pub gain: Option<T>,
    pub warnings: Vec<Warning>,
}

impl<T: Real> PoleResidueSet<T> {
    pub fn poles(&self) -> impl Iterator<Item = Complex<T>> + '_ {
        self.entries.iter().map(|e| e.pole)
    }

    pub fn residue_sum(&self) -> Complex<T> {
        self.entries.iter().map(|e| e.residue).sum()
    }
}

/// Cover-up residues of `num / charpoly` at the clustered roots of
/// `charpoly`.
pub fn residues<T: Real>(
    num: &Polynomial<Complex<T>>,
    charpoly: &Polynomial<Complex<T>>,
) -> Result<PoleResidueSet<T>, RatfunError> {
    let den_degree = charpoly.degree().unwrap_or(0);
    if let Some(nd) = num.degree() {
        if nd > den_degree {
            return Err(RatfunError::ImproperInput {
                num_degree: nd,
                den_degree,
            });
        }
    }
    let roots = charpoly.roots()?;
    Ok(residues_at_roots(num, charpoly, &roots))
}

/// Residues given already-computed roots of `charpoly`.
pub fn residues_at_roots<T: Real>(
    num: &Polynomial<Complex<T>>,
    charpoly: &Polynomial<Complex<T>>,
    roots: &RootSet<T>,
) -> PoleResidueSet<T> {
    let lead = charpoly
        .leading()
        .copied()
        .unwrap_or(Complex::new(T::one(), T::zero()));
    let num_scale = T::lit(num.max_modulus());
    let num_degree = num.degree().unwrap_or(0) as i32;
    let mut warnings = Vec::new();
    let entries = roots
        .distinct
        .iter()
        .enumerate()
        .map(|(j, &pole)| {
            let others: Complex<T> = roots
                .distinct
                .iter()
                .zip(&roots.multiplicities)
                .enumerate()
                .filter(|&(h, _)| h != j)
                .map(|(_, (&p, &m))| (pole - p).powu(m as u32))
                .product();
            let value = num.eval(&pole);
            let scale = num_scale * T::one().max(pole.norm()).powi(num_degree);
            if value.norm() < T::lit(STATIONARY_POLE_TOL) * scale {
                warnings.push(Warning::PoleAtNumeratorRoot { pole: to_c64(pole) });
            }
            PoleResidue {
                pole,
                multiplicity: roots.multiplicities[j],
                residue: value / (lead * others),
            }
        })
        .collect();
    PoleResidueSet {
        entries,
        gain: None,
        warnings,
    }
}
