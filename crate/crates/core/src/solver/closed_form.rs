//! Closed-form constants for the classical weights, used as fast paths and as
//! cross-checks of the moment pipeline.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::profile::Profile;
use super::SolveError;
use crate::numcore::{Field, PiecewisePolynomial, Polynomial};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm<T> {
    pub mu: T,
    /// Normalized extremizer (`∫ u ρ = 1`), when a formula for it is known.
    pub u: Option<Profile<T>>,
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn int(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// `μ = (2k)! (2k+1)! / (k!)²` for `ρ ≡ 1`.
pub fn uniform_mu(k: usize) -> BigRational {
    let kf = factorial(k);
    int(factorial(2 * k) * factorial(2 * k + 1)) / int(&kf * &kf)
}

/// `(2k+1)!/(k!)² · xᵏ(1-x)ᵏ`, the uniform-weight extremizer with `∫ u = 1`.
pub fn uniform_minimizer(k: usize) -> Polynomial<BigRational> {
    let kf = factorial(k);
    let c = int(factorial(2 * k + 1)) / int(&kf * &kf);
    let bump = Polynomial::new(vec![BigRational::zero(), BigRational::one(), -BigRational::one()]);
    bump.pow(k).scale(&c)
}

/// `μ = 12 / (4(2a+b) - 3(a+b)²)` for `k = 1`, `ρ = χ_[a,b]/(b-a)`.
pub fn indicator_mu_k1(a: &BigRational, b: &BigRational) -> BigRational {
    let four = int(4.into());
    let three = int(3.into());
    let two = int(2.into());
    let s = a + b;
    int(12.into()) / (four * (two * a + b) - three * &s * &s)
}

/// `μ = (2k-1) ((k-1)!)² / (a(1-a))^(2k-1)` for `ρ = δ(x - a)`.
pub fn dirac_mu(k: usize, a: &BigRational) -> BigRational {
    let kf = factorial(k - 1);
    let base = a * (BigRational::one() - a);
    let denom = num_traits::pow(base, 2 * k - 1);
    int(BigInt::from(2 * k - 1) * &kf * &kf) / denom
}

pub fn closed_form<T: Field>(k: usize, weight: &Weight) -> Result<ClosedForm<T>, SolveError> {
    match weight {
        Weight::Poly(p) if p.degree() == Some(0) => {
            let c = p.coeff(0);
            let mu = uniform_mu(k) / (&c * &c);
            let u = uniform_minimizer(k).scale(&(BigRational::one() / c));
            Ok(ClosedForm {
                mu: T::from_rational(&mu),
                u: Some(Profile::Piecewise(PiecewisePolynomial::single(
                    u.map_into(T::from_rational),
                ))),
            })
        }
        Weight::Indicator { a, b } if k == 1 => Ok(ClosedForm {
            mu: T::from_rational(&indicator_mu_k1(a, b)),
            u: None,
        }),
        Weight::Dirac { a } => Ok(ClosedForm {
            mu: T::from_rational(&dirac_mu(k, a)),
            u: None,
        }),
        Weight::Hardy { order: 1 } if k == 1 => Ok(ClosedForm {
            mu: T::one(),
            u: Some(Profile::NegXLogX { scale: T::one(), order: 0 }),
        }),
        _ => Err(SolveError::NotAvailable),
    }
}

/// `H(x, a) = Σ_{n<k} xⁿ Σ_{m≤n} C(2k-1, m) C(k-1+n-m, n-m) a^(k-1-m)`.
pub fn printed_h(k: usize, a: &BigRational) -> Polynomial<BigRational> {
    let coeffs = (0..k)
        .map(|n| {
            (0..=n).fold(BigRational::zero(), |acc, m| {
                let c = binomial(BigInt::from(2 * k - 1), BigInt::from(m))
                    * binomial(BigInt::from(k - 1 + n - m), BigInt::from(n - m));
                acc + int(c) * num_traits::pow(a.clone(), k - 1 - m)
            })
        })
        .collect();
    Polynomial::new(coeffs)
}

/// The point-mass minimizer in its published closed form:
/// `(1-a)ᵏ xᵏ H(1-x, 1-a)` on `[0, a]` and `aᵏ (1-x)ᵏ H(x, a)` on `[a, 1]`,
/// without any normalization.
pub fn printed_dirac_minimizer(k: usize, a: &BigRational) -> PiecewisePolynomial<BigRational> {
    let one = BigRational::one();
    let b = &one - a;
    let x = Polynomial::<BigRational>::x();
    let one_minus_x = Polynomial::new(vec![one.clone(), -one.clone()]);
    let left = x
        .pow(k)
        .mul(&printed_h(k, &b).compose_affine(&-one.clone(), &one))
        .scale(&num_traits::pow(b.clone(), k));
    let right = one_minus_x
        .pow(k)
        .mul(&printed_h(k, a))
        .scale(&num_traits::pow(a.clone(), k));
    PiecewisePolynomial::new(vec![BigRational::zero(), a.clone(), one], vec![left, right])
        .expect("0 < a < 1")
}

/// Outcome of checking the published point-mass minimizer against the
/// pipeline's extremizer.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracComparison {
    pub k: usize,
    pub a: BigRational,
    /// Printed formula's value at `a` from the left and from the right.
    pub printed_value_left: BigRational,
    pub printed_value_right: BigRational,
    /// Jump of the printed formula's first derivative across `a`.
    pub printed_slope_jump: BigRational,
    /// Largest deviation on a 1/64 grid after rescaling the printed
    /// formula so its right value at `a` is one (the pipeline has `u(a) = 1`).
    pub max_deviation: f64,
    /// Whether the printed formula is a constant multiple of the extremizer.
    pub proportional: bool,
}

pub fn compare_printed_dirac(
    k: usize,
    a: &BigRational,
    pipeline_u: &PiecewisePolynomial<BigRational>,
) -> DiracComparison {
    let printed = printed_dirac_minimizer(k, a);
    let left = printed.eval_left(a);
    let right = printed.eval(a);
    let slope = printed.derivative();
    let slope_jump = slope.eval(a) - slope.eval_left(a);
    let rescaled = printed.scale(&(BigRational::one() / &right));
    let diff = rescaled.sub(pipeline_u);
    let max_deviation = (0..=64)
        .map(|i| {
            let x = BigRational::new(i.into(), 64.into());
            diff.eval(&x).to_f64().abs().max(diff.eval_left(&x).to_f64().abs())
        })
        .fold(0.0, f64::max);
    let proportional = diff.pieces().iter().all(Polynomial::is_zero);
    DiracComparison {
        k,
        a: a.clone(),
        printed_value_left: left,
        printed_value_right: right,
        printed_slope_jump: slope_jump,
        max_deviation,
        proportional,
    }
}
