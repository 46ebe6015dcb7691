//! Weights ρ on [0, 1].
//!
//! The solver only ever touches a weight through its moment vector
//! `b_m = (-1)^(k+1) ∫ (1-t)^(k+m) ρ(t) dt` and its iterated integral
//! `I(x) = ∫_0^x (x-t)^(k-1)/(k-1)! ρ(t) dt`. Both are exact for every kind
//! whose parameters are rational, which is all of them: the text format only
//! admits rational literals.

pub mod parse;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numcore::{sturm, Field, PiecewisePolynomial, Polynomial};

pub use parse::parse_weight;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("invalid weight: {0}")]
    Domain(String),
    #[error("unsupported weight: {0}")]
    Unsupported(String),
}

/// A non-negative weight (or measure) on [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Poly(Polynomial<BigRational>),
    PiecewisePoly(PiecewisePolynomial<BigRational>),
    /// `χ_[a,b] / (b - a)`.
    Indicator { a: BigRational, b: BigRational },
    /// `δ(x - a)`.
    Dirac { a: BigRational },
    /// `x^(-alpha)`, `0 <= alpha < 1`.
    Power { alpha: BigRational },
    /// `x^(-order)`; only order 1 is handled downstream.
    Hardy { order: u32 },
}

/// Right-hand side of the seed system.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector<T> {
    pub k: usize,
    pub b: Vec<T>,
}

/// `I(x) = ∫_0^x (x-t)^(k-1)/(k-1)! ρ(t) dt`.
#[derive(Clone, Debug, PartialEq)]
pub enum IteratedIntegral<T> {
    Piecewise(PiecewisePolynomial<T>),
    /// `coeff · x^(exponent - alpha)`.
    Power { coeff: T, exponent: usize, alpha: T },
}

impl<T: Field> IteratedIntegral<T> {
    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            IteratedIntegral::Piecewise(pw) => pw.eval_f64(x),
            IteratedIntegral::Power { coeff, exponent, alpha } => {
                coeff.to_f64() * x.powf(*exponent as f64 - alpha.to_f64())
            }
        }
    }
}

fn zero() -> BigRational {
    BigRational::zero()
}

fn one() -> BigRational {
    BigRational::one()
}

fn factorial<T: Field>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_i64(i as i64))
}

impl Weight {
    /// Polynomial weight, certified non-negative on [0, 1].
    pub fn poly(p: Polynomial<BigRational>) -> Result<Self, WeightError> {
        if !sturm::is_nonnegative_on(&p, &zero(), &one()) {
            return Err(WeightError::Domain(format!(
                "polynomial `{p}` takes negative values on [0,1]"
            )));
        }
        Ok(Weight::Poly(p))
    }

    /// Piecewise polynomial weight, certified non-negative piece by piece.
    pub fn piecewise(pw: PiecewisePolynomial<BigRational>) -> Result<Self, WeightError> {
        for (l, r, p) in pw.intervals() {
            if !sturm::is_nonnegative_on(p, l, r) {
                return Err(WeightError::Domain(format!(
                    "piece `{p}` takes negative values on its interval"
                )));
            }
        }
        Ok(Weight::PiecewisePoly(pw))
    }

    pub fn indicator(a: BigRational, b: BigRational) -> Result<Self, WeightError> {
        if a.is_negative() || b > one() || b <= a {
            return Err(WeightError::Domain(
                "indicator needs 0 <= a < b <= 1".into(),
            ));
        }
        Ok(Weight::Indicator { a, b })
    }

    pub fn dirac(a: BigRational) -> Result<Self, WeightError> {
        if !a.is_positive() || a >= one() {
            return Err(WeightError::Domain(
                "Dirac location must lie strictly inside (0,1)".into(),
            ));
        }
        Ok(Weight::Dirac { a })
    }

    pub fn power(alpha: BigRational) -> Result<Self, WeightError> {
        if alpha.is_negative() || alpha >= one() {
            return Err(WeightError::Domain(
                "power weight x^(-alpha) needs 0 <= alpha < 1".into(),
            ));
        }
        Ok(Weight::Power { alpha })
    }

    pub fn hardy(order: u32) -> Result<Self, WeightError> {
        if order != 1 {
            return Err(WeightError::Domain(
                "only the Hardy weight 1/x (order 1) is supported".into(),
            ));
        }
        Ok(Weight::Hardy { order })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Weight::Poly(_) => "poly",
            Weight::PiecewisePoly(_) => "pw",
            Weight::Indicator { .. } => "chi",
            Weight::Dirac { .. } => "dirac",
            Weight::Power { .. } => "pow",
            Weight::Hardy { .. } => "hardy",
        }
    }

    /// Measures and non-integrable weights: the sign-definiteness result is
    /// stated for integrable weights only, but the machinery still applies.
    pub fn outside_theorem_scope(&self) -> bool {
        matches!(self, Weight::Dirac { .. } | Weight::Hardy { .. })
    }

    pub fn has_exact_moments(&self) -> bool {
        !matches!(self, Weight::Hardy { .. })
    }

    /// The weight as a piecewise polynomial, when it is one.
    pub fn as_piecewise<T: Field>(&self) -> Option<PiecewisePolynomial<T>> {
        let conv = |p: &Polynomial<BigRational>| p.map_into(T::from_rational);
        match self {
            Weight::Poly(p) => Some(PiecewisePolynomial::single(conv(p))),
            Weight::PiecewisePoly(pw) => {
                let bps = pw.breakpoints().iter().map(T::from_rational).collect();
                let pieces = pw.pieces().iter().map(conv).collect();
                Some(PiecewisePolynomial::new(bps, pieces).expect("validated breakpoints"))
            }
            Weight::Indicator { a, b } => {
                let height = one() / (b.clone() - a.clone());
                let mut bps = vec![zero()];
                let mut pieces = Vec::new();
                if a.is_positive() {
                    bps.push(a.clone());
                    pieces.push(Polynomial::zero());
                }
                pieces.push(Polynomial::constant(height));
                if *b < one() {
                    bps.push(b.clone());
                    pieces.push(Polynomial::zero());
                }
                bps.push(one());
                let bps = bps.iter().map(T::from_rational).collect();
                let pieces = pieces.iter().map(conv).collect();
                Some(PiecewisePolynomial::new(bps, pieces).expect("validated indicator"))
            }
            _ => None,
        }
    }

    /// `c · ρ` for `c > 0`. Indicators become piecewise polynomials since
    /// their mass is fixed at one.
    pub fn scaled(&self, c: &BigRational) -> Result<Weight, WeightError> {
        if !c.is_positive() {
            return Err(WeightError::Domain("scale factor must be positive".into()));
        }
        match self {
            Weight::Poly(p) => Ok(Weight::Poly(p.scale(c))),
            Weight::PiecewisePoly(_) | Weight::Indicator { .. } => {
                Ok(Weight::PiecewisePoly(self.as_piecewise::<BigRational>().unwrap().scale(c)))
            }
            _ => Err(WeightError::Unsupported(format!(
                "cannot scale a `{}` weight",
                self.kind_name()
            ))),
        }
    }

    /// `x ↦ ρ(1 - x)`.
    pub fn reflected(&self) -> Result<Weight, WeightError> {
        let flip = |p: &Polynomial<BigRational>| p.compose_affine(&-one(), &one());
        match self {
            Weight::Poly(p) => Ok(Weight::Poly(flip(p))),
            Weight::PiecewisePoly(pw) => {
                let bps = pw.breakpoints().iter().rev().map(|b| one() - b.clone()).collect();
                let pieces = pw.pieces().iter().rev().map(flip).collect();
                let pw = PiecewisePolynomial::new(bps, pieces)
                    .map_err(|e| WeightError::Domain(e.to_string()))?;
                Ok(Weight::PiecewisePoly(pw))
            }
            Weight::Indicator { a, b } => Weight::indicator(one() - b.clone(), one() - a.clone()),
            Weight::Dirac { a } => Weight::dirac(one() - a.clone()),
            _ => Err(WeightError::Unsupported(format!(
                "cannot reflect a `{}` weight",
                self.kind_name()
            ))),
        }
    }

    /// `∫_0^1 f ρ` for a piecewise polynomial `f`; Dirac masses sift.
    pub fn pair_piecewise<T: Field>(
        &self,
        f: &PiecewisePolynomial<T>,
    ) -> Result<T, WeightError> {
        if let Some(rho) = self.as_piecewise::<T>() {
            return Ok(rho.mul(f).integral());
        }
        match self {
            Weight::Dirac { a } => Ok(f.eval(&T::from_rational(a))),
            Weight::Power { alpha } => {
                // ∫ x^(i-α) on each piece is only rational on [0, 1] itself.
                if f.pieces().len() != 1 {
                    return Err(WeightError::Unsupported(
                        "power weight paired with a multi-piece function".into(),
                    ));
                }
                let alpha = T::from_rational(alpha);
                Ok(f.pieces()[0].coeffs().iter().enumerate().fold(T::zero(), |acc, (i, c)| {
                    acc + c.clone() / (T::from_i64(i as i64 + 1) - alpha.clone())
                }))
            }
            Weight::Hardy { order } => {
                if f.pieces().len() != 1 {
                    return Err(WeightError::Unsupported(
                        "Hardy weight paired with a multi-piece function".into(),
                    ));
                }
                let order = *order as usize;
                let p = &f.pieces()[0];
                if (0..order).any(|i| !p.coeff(i).is_zero()) {
                    return Err(WeightError::Domain(
                        "integrand is not integrable against the Hardy weight".into(),
                    ));
                }
                Ok(p.coeffs().iter().enumerate().skip(order).fold(T::zero(), |acc, (i, c)| {
                    acc + c.clone() / T::from_i64((i + 1 - order) as i64)
                }))
            }
            _ => unreachable!("piecewise kinds handled above"),
        }
    }

    /// `∫_0^1 x^j ρ(x) dx`.
    pub fn monomial_moment<T: Field>(&self, j: usize) -> Result<T, WeightError> {
        self.pair_piecewise(&PiecewisePolynomial::single(Polynomial::monomial(T::one(), j)))
    }

    /// `b_m = (-1)^(k+1) ∫_0^1 (1-t)^(k+m) ρ(t) dt`, `m = 0..k-1`.
    pub fn moments<T: Field>(&self, k: usize) -> Result<MomentVector<T>, WeightError> {
        assert!(k >= 1, "order k must be at least 1");
        let sign = if k % 2 == 1 { T::one() } else { -T::one() };
        let raw: Vec<T> = match self {
            Weight::Hardy { .. } => {
                return Err(WeightError::Unsupported(
                    "Hardy weight has divergent moments; use the closed form".into(),
                ))
            }
            Weight::Dirac { a } => {
                let s = T::one() - T::from_rational(a);
                (0..k).map(|m| pow(&s, k + m)).collect()
            }
            Weight::Power { alpha } => {
                // Beta(1-α, n+1) = n! / Π_{i=0}^{n} (i+1-α)
                let alpha = T::from_rational(alpha);
                (0..k)
                    .map(|m| {
                        let n = k + m;
                        let denom = (0..=n).fold(T::one(), |acc, i| {
                            acc * (T::from_i64(i as i64 + 1) - alpha.clone())
                        });
                        factorial::<T>(n) / denom
                    })
                    .collect()
            }
            _ => {
                let rho = self.as_piecewise::<T>().expect("piecewise kind");
                let one_minus_t = Polynomial::new(vec![T::one(), -T::one()]);
                (0..k)
                    .map(|m| {
                        let kernel = PiecewisePolynomial::single(one_minus_t.pow(k + m));
                        rho.mul(&kernel).integral()
                    })
                    .collect()
            }
        };
        Ok(MomentVector {
            k,
            b: raw.into_iter().map(|v| sign.clone() * v).collect(),
        })
    }

    /// `I(x) = ∫_0^x (x-t)^(k-1)/(k-1)! ρ(t) dt`, without the `(-1)^k μ` prefactor.
    pub fn iterated_integral<T: Field>(&self, k: usize) -> Result<IteratedIntegral<T>, WeightError> {
        assert!(k >= 1, "order k must be at least 1");
        match self {
            Weight::Hardy { .. } => Err(WeightError::Unsupported(
                "Hardy weight: iterated integral from 0 diverges".into(),
            )),
            Weight::Dirac { a } => {
                let a = T::from_rational(a);
                let shifted = Polynomial::new(vec![-a.clone(), T::one()]).pow(k - 1);
                let right = shifted.scale(&(T::one() / factorial::<T>(k - 1)));
                let pw = PiecewisePolynomial::new(
                    vec![T::zero(), a, T::one()],
                    vec![Polynomial::zero(), right],
                )
                .expect("0 < a < 1");
                Ok(IteratedIntegral::Piecewise(pw))
            }
            Weight::Power { alpha } => {
                let alpha = T::from_rational(alpha);
                let denom = (1..=k).fold(T::one(), |acc, i| {
                    acc * (T::from_i64(i as i64) - alpha.clone())
                });
                Ok(IteratedIntegral::Power {
                    coeff: T::one() / denom,
                    exponent: k,
                    alpha,
                })
            }
            _ => Ok(IteratedIntegral::Piecewise(
                self.as_piecewise::<T>().expect("piecewise kind").nth_antiderivative(k),
            )),
        }
    }

    /// Pointwise value `ρ(x)`.
    pub fn eval(&self, x: f64) -> Result<f64, WeightError> {
        match self {
            Weight::Dirac { .. } => Err(WeightError::Unsupported(
                "a Dirac mass has no pointwise values".into(),
            )),
            Weight::Indicator { a, b } => {
                let (a, b) = (a.to_f64(), b.to_f64());
                Ok(if (a..=b).contains(&x) { 1.0 / (b - a) } else { 0.0 })
            }
            Weight::Power { alpha } => Ok(x.powf(-alpha.to_f64())),
            Weight::Hardy { order } => Ok(x.powi(-(*order as i32))),
            _ => Ok(self.as_piecewise::<f64>().unwrap().eval(&x)),
        }
    }

    /// Points in (0, 1) where the weight is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Weight::PiecewisePoly(pw) => {
                let b = pw.breakpoints();
                b[1..b.len() - 1].iter().map(Field::to_f64).collect()
            }
            Weight::Indicator { a, b } => [a, b]
                .into_iter()
                .map(Field::to_f64)
                .filter(|&x| x > 0.0 && x < 1.0)
                .collect(),
            Weight::Dirac { a } => vec![a.to_f64()],
            _ => Vec::new(),
        }
    }

    /// Whether the weight blows up at x = 0.
    pub fn singular_at_zero(&self) -> bool {
        match self {
            Weight::Power { alpha } => alpha.is_positive(),
            Weight::Hardy { .. } => true,
            _ => false,
        }
    }
}

fn pow<T: Field>(base: &T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, _| acc * base.clone())
}

impl fmt::Display for Weight {
    /// Renders in the same text format accepted by [`parse_weight`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::numcore::format_rational as fr;
        match self {
            Weight::Poly(p) => write!(f, "poly:{p}"),
            Weight::PiecewisePoly(pw) => {
                f.write_str("pw:")?;
                for (i, (l, r, p)) in pw.intervals().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "[{},{}]={}", fr(l), fr(r), p)?;
                }
                Ok(())
            }
            Weight::Indicator { a, b } => write!(f, "chi:{},{}", fr(a), fr(b)),
            Weight::Dirac { a } => write!(f, "dirac:{}", fr(a)),
            Weight::Power { alpha } => write!(f, "pow:{}", fr(alpha)),
            Weight::Hardy { order } => write!(f, "hardy:{order}"),
        }
    }
}
