//! The moment pipeline.
//!
//! Integrating `(-1)ᵏ u⁽²ᵏ⁾ = μ ρ` k times from zero gives
//!
//! ```text
//! u⁽ᵏ⁾(x) = μ v(x),   v(x) = Σⱼ sⱼ x^(k-1-j)/(k-1-j)! + (-1)ᵏ I(x),
//! ```
//!
//! where `I` is the weight's iterated integral and `sⱼ = u^(2k-1-j)(0)/μ` are
//! the unknown seeds. The clamped conditions at `x = 1` turn into the k×k
//! system `A s = b` with `A[m][j] = (k+m)!/(k+m-j)!` and the moment vector
//! `b`. Once `v` is known, `μ = 1/∫v²` and `u` is `μ` times the k-fold
//! antiderivative of `v`.

pub mod closed_form;
pub mod profile;

use num_rational::BigRational;
use thiserror::Error;

use crate::numcore::linalg::Matrix;
use crate::numcore::{Field, Mode, NumError, PiecewisePolynomial, Polynomial, Scalar};
use crate::weight::{IteratedIntegral, MomentVector, Weight, WeightError};

pub use closed_form::{closed_form, ClosedForm};
pub use profile::{FractionalPoly, Profile};

/// Float-mode boundary residual threshold, relative to the size of the
/// derivative being tested.
pub const FLOAT_BOUNDARY_TOL: f64 = 1e-8;
/// Float-mode agreement required between the pipeline and a closed form.
pub const FLOAT_CLOSED_FORM_RTOL: f64 = 1e-10;
/// Grid used for the sampled positivity diagnostic.
pub const POSITIVITY_GRID: i64 = 1 << 12;
/// Exact mode has the Sturm certificate, so its sampled minimum is coarser.
pub const EXACT_POSITIVITY_GRID: i64 = 1 << 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("order k must be at least 1 (got {0})")]
    InvalidOrder(usize),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("weight is identically zero")]
    ZeroWeight,
    #[error("boundary residual {residual:e} exceeds tolerance")]
    BoundaryResidualExceeded { residual: f64 },
    #[error("pipeline and closed form disagree: {0}")]
    ClosedFormMismatch(String),
    #[error("no closed form for this problem")]
    NotAvailable,
    #[error("exact mode needs exact moments; `{0}` weights only support float mode")]
    ModeUnavailable(String),
}

/// Order, weight and arithmetic mode of one problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub k: usize,
    pub weight: Weight,
    pub mode: Mode,
}

impl ProblemSpec {
    pub fn new(k: usize, weight: Weight, mode: Mode) -> Result<Self, SolveError> {
        if k == 0 {
            return Err(SolveError::InvalidOrder(k));
        }
        // Hardy has no moments but its closed form is exact, so both modes pass.
        Ok(ProblemSpec { k, weight, mode })
    }
}

/// `A s = b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem<T> {
    pub a: Matrix<T>,
    pub b: MomentVector<T>,
}

impl<T: Field> LinearSystem<T> {
    pub fn new(k: usize, weight: &Weight) -> Result<Self, SolveError> {
        Ok(LinearSystem {
            a: build_matrix(k),
            b: weight.moments(k)?,
        })
    }
}

/// `s[j] = u^(2k-1-j)(0) / μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeSeeds<T> {
    pub s: Vec<T>,
}

impl<T: Field> DerivativeSeeds<T> {
    /// `Σⱼ sⱼ x^(k-1-j)/(k-1-j)!`.
    pub fn polynomial(&self) -> Polynomial<T> {
        let k = self.s.len();
        self.s
            .iter()
            .enumerate()
            .fold(Polynomial::zero(), |acc, (j, s)| {
                let n = k - 1 - j;
                let fact = (1..=n).fold(T::one(), |f, i| f * T::from_i64(i as i64));
                acc.add(&Polynomial::monomial(s.clone() / fact, n))
            })
    }

    /// The actual derivative values `u^(2k-1-j)(0) = μ sⱼ`.
    pub fn derivatives(&self, mu: &T) -> Vec<T> {
        self.s.iter().map(|s| s.clone() * mu.clone()).collect()
    }
}

/// `A[m][j] = (k+m)!/(k+m-j)!`, a falling factorial.
pub fn build_matrix<T: Field>(k: usize) -> Matrix<T> {
    (0..k)
        .map(|m| {
            (0..k)
                .map(|j| {
                    (0..j).fold(T::one(), |acc, i| acc * T::from_i64((k + m - i) as i64))
                })
                .collect()
        })
        .collect()
}

pub fn solve_seeds<T: Field>(
    a: &Matrix<T>,
    b: &MomentVector<T>,
) -> Result<DerivativeSeeds<T>, SolveError> {
    Ok(DerivativeSeeds { s: T::solve_dense(a, &b.b)? })
}

/// `v = u⁽ᵏ⁾/μ`.
pub fn assemble_uk<T: Field>(
    k: usize,
    seeds: &DerivativeSeeds<T>,
    integral: &IteratedIntegral<T>,
) -> Profile<T> {
    let sign = if k % 2 == 0 { T::one() } else { -T::one() };
    let base = seeds.polynomial();
    match integral {
        IteratedIntegral::Piecewise(i) => {
            Profile::Piecewise(PiecewisePolynomial::single(base).add(&i.scale(&sign)))
        }
        IteratedIntegral::Power { coeff, exponent, alpha } => Profile::Fractional(FractionalPoly {
            regular: base,
            singular: Polynomial::monomial(sign * coeff.clone(), *exponent),
            alpha: alpha.clone(),
        }),
    }
}

/// `μ = 1 / ∫ v²`.
pub fn compute_mu<T: Field>(v: &Profile<T>) -> Result<T, SolveError> {
    let energy = v.integral_sq();
    let degenerate = match T::MODE {
        Mode::Exact => energy.is_zero(),
        Mode::Float => !(energy.to_f64() > 0.0) || !energy.to_f64().is_finite(),
    };
    if degenerate {
        return Err(SolveError::ZeroWeight);
    }
    Ok(T::one() / energy)
}

/// Residuals and sign checks attached to every solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    /// `max_j max(|u⁽ʲ⁾(0)|, |u⁽ʲ⁾(1)|)` over `j < k`.
    pub boundary_residual: f64,
    /// The same, each term divided by a bound on `|u⁽ʲ⁾|` over [0, 1].
    pub boundary_residual_relative: f64,
    /// `|∫ u ρ - 1|`.
    pub normalization_residual: f64,
    /// Smallest value of `u` on the interior points of a uniform grid.
    pub min_interior: f64,
    /// Exact certificate that `u > 0` on (0, 1); `None` when unavailable.
    pub sturm_positive: Option<bool>,
    /// `|∫(u⁽ᵏ⁾)²/μ² - ∫v²| / ∫v²`.
    pub dual_mu_residual: f64,
}

/// Values `(u⁽ʲ⁾(0), u⁽ʲ⁾(1))` for `j < k`.
pub fn boundary_values<T: Field>(u: &Profile<T>, k: usize) -> Vec<(T, T)> {
    (0..k)
        .map(|j| {
            let d = u.nth_derivative(j);
            let at_zero = match &d {
                Profile::Piecewise(pw) => pw.eval(&T::zero()),
                Profile::Fractional(fp) => {
                    assert!(fp.singular.coeff(0).is_zero());
                    fp.regular.coeff(0)
                }
                Profile::NegXLogX { order: 0, .. } => T::zero(),
                Profile::NegXLogX { .. } => unreachable!("u' of -x ln x is unbounded at 0"),
            };
            (at_zero, d.eval_at_one())
        })
        .collect()
}

fn magnitude_bound<T: Field>(p: &Profile<T>) -> f64 {
    let sum = |poly: &Polynomial<T>| poly.coeffs().iter().map(|c| c.to_f64().abs()).sum::<f64>();
    match p {
        Profile::Piecewise(pw) => pw.pieces().iter().map(sum).fold(0.0, f64::max),
        Profile::Fractional(fp) => sum(&fp.regular) + sum(&fp.singular),
        Profile::NegXLogX { scale, .. } => scale.to_f64().abs(),
    }
}

/// Sturm certificate that a piecewise-polynomial `u` is positive on (0, 1).
pub fn certify_positive<T: Field>(u: &Profile<T>) -> Option<bool> {
    let Profile::Piecewise(pw) = u else { return None };
    let mut ok = true;
    for (l, r, p) in pw.intervals() {
        ok &= T::certify_positive(p, l, r)?;
    }
    for b in &pw.breakpoints()[1..pw.breakpoints().len() - 1] {
        ok &= pw.eval(b) > T::zero();
    }
    Some(ok)
}

fn min_on_grid<T: Field>(u: &Profile<T>) -> f64 {
    let n = match T::MODE {
        Mode::Exact => EXACT_POSITIVITY_GRID,
        Mode::Float => POSITIVITY_GRID,
    };
    (1..n)
        .map(|i| u.sample(&T::ratio(i, n)))
        .fold(f64::INFINITY, f64::min)
}

fn diagnose<T: Field>(
    k: usize,
    weight: &Weight,
    u: &Profile<T>,
    v: &Profile<T>,
    mu: &T,
) -> Result<Diagnostics, SolveError> {
    let mut boundary_residual = 0.0f64;
    let mut boundary_residual_relative = 0.0f64;
    for (j, (at0, at1)) in boundary_values(u, k).into_iter().enumerate() {
        let res = at0.to_f64().abs().max(at1.to_f64().abs());
        let scale = magnitude_bound(&u.nth_derivative(j)).max(f64::MIN_POSITIVE);
        boundary_residual = boundary_residual.max(res);
        boundary_residual_relative = boundary_residual_relative.max(res / scale);
    }
    let normalization = u.pair(weight)? - T::one();
    let (lhs, rhs) = dual_mu_pair(u, v, k, mu);
    let dual = ((lhs - rhs.clone()) / rhs).to_f64().abs();
    Ok(Diagnostics {
        boundary_residual,
        boundary_residual_relative,
        normalization_residual: normalization.to_f64().abs(),
        min_interior: min_on_grid(u),
        sturm_positive: certify_positive(u),
        dual_mu_residual: dual,
    })
}

/// `(∫(u⁽ᵏ⁾)²/μ², ∫v²)`: equal by integration by parts.
fn dual_mu_pair<T: Field>(u: &Profile<T>, v: &Profile<T>, k: usize, mu: &T) -> (T, T) {
    let energy = u.nth_derivative(k).integral_sq();
    (energy / (mu.clone() * mu.clone()), v.integral_sq())
}

/// `u = μ ∫∫…∫ v` with all integration constants zero, plus diagnostics.
pub fn assemble_u<T: Field>(
    k: usize,
    weight: &Weight,
    v: &Profile<T>,
    mu: &T,
) -> Result<(Profile<T>, Diagnostics), SolveError> {
    let u = v.nth_antiderivative(k).scale(mu);
    let diagnostics = diagnose(k, weight, &u, v, mu)?;
    let broken = match T::MODE {
        Mode::Exact => diagnostics.boundary_residual != 0.0,
        Mode::Float => diagnostics.boundary_residual_relative > FLOAT_BOUNDARY_TOL,
    };
    if broken {
        return Err(SolveError::BoundaryResidualExceeded {
            residual: diagnostics.boundary_residual,
        });
    }
    Ok((u, diagnostics))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Pipeline,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pipeline => "pipeline",
            Method::ClosedForm => "closed_form",
        }
    }
}

/// A solved problem: `μ`, `Λ = μ^(-1/2)`, the extremizer and its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalSolution<T> {
    pub k: usize,
    pub weight: Weight,
    pub mu: T,
    pub lambda: f64,
    /// `None` for the Hardy closed form, which bypasses the seed system.
    pub seeds: Option<DerivativeSeeds<T>>,
    /// `u⁽ᵏ⁾ / μ`.
    pub v: Profile<T>,
    pub u: Profile<T>,
    pub u_k: Profile<T>,
    pub method: Method,
    /// Closed-form `μ` that was checked against the pipeline, if any.
    pub closed_form_mu: Option<T>,
    pub diagnostics: Diagnostics,
}

impl<T: Field> ExtremalSolution<T> {
    /// `(∫(u⁽ᵏ⁾)²/μ², 1/μ)`.
    pub fn dual_mu(&self) -> (T, T) {
        dual_mu_pair(&self.u, &self.v, self.k, &self.mu)
    }

    pub fn boundary_values(&self) -> Vec<(T, T)> {
        boundary_values(&self.u, self.k)
    }

    /// `∫ u ρ`.
    pub fn normalization(&self) -> Result<T, SolveError> {
        Ok(self.u.pair(&self.weight)?)
    }
}

fn lambda_of<T: Field>(mu: &T) -> f64 {
    1.0 / mu.to_f64().sqrt()
}

fn hardy_solution<T: Field>(k: usize, weight: &Weight) -> Result<ExtremalSolution<T>, SolveError> {
    let Weight::Hardy { order } = weight else { unreachable!() };
    if *order != 1 || k != 1 {
        return Err(WeightError::Unsupported(format!(
            "Hardy weight x^-{order} with k = {k}; only k = 1 has a known sharp constant"
        ))
        .into());
    }
    let form = closed_form::<T>(k, weight)?;
    let u = form.u.expect("Hardy closed form has a minimizer");
    let v = u.derivative();
    let diagnostics = diagnose(k, weight, &u, &v, &form.mu)?;
    Ok(ExtremalSolution {
        k,
        weight: weight.clone(),
        lambda: lambda_of(&form.mu),
        mu: form.mu.clone(),
        seeds: None,
        u_k: v.scale(&form.mu),
        v,
        u,
        method: Method::ClosedForm,
        closed_form_mu: Some(form.mu),
        diagnostics,
    })
}

fn agrees<T: Field>(a: &T, b: &T) -> bool {
    match T::MODE {
        Mode::Exact => a == b,
        Mode::Float => {
            let (a, b) = (a.to_f64(), b.to_f64());
            (a - b).abs() <= FLOAT_CLOSED_FORM_RTOL * a.abs().max(b.abs())
        }
    }
}

fn profiles_agree<T: Field>(a: &Profile<T>, b: &Profile<T>) -> bool {
    match (a, b) {
        (Profile::Piecewise(p), Profile::Piecewise(q)) => {
            let diff = p.sub(q);
            let scale = magnitude_bound(a).max(1.0);
            diff.pieces()
                .iter()
                .flat_map(|piece| piece.coeffs())
                .all(|c| match T::MODE {
                    Mode::Exact => c.is_zero(),
                    Mode::Float => c.to_f64().abs() <= FLOAT_CLOSED_FORM_RTOL * scale,
                })
        }
        _ => false,
    }
}

/// Runs the full pipeline in the arithmetic of `T`, cross-checking against a
/// closed form whenever one exists.
pub fn solve_in<T: Field>(k: usize, weight: &Weight) -> Result<ExtremalSolution<T>, SolveError> {
    if k == 0 {
        return Err(SolveError::InvalidOrder(k));
    }
    if matches!(weight, Weight::Hardy { .. }) {
        return hardy_solution(k, weight);
    }
    let system = LinearSystem::<T>::new(k, weight)?;
    let seeds = solve_seeds(&system.a, &system.b)?;
    let integral = weight.iterated_integral::<T>(k)?;
    let v = assemble_uk(k, &seeds, &integral);
    let mu = compute_mu(&v)?;
    let (u, diagnostics) = assemble_u(k, weight, &v, &mu)?;

    let closed = match closed_form::<T>(k, weight) {
        Ok(form) => Some(form),
        Err(SolveError::NotAvailable) => None,
        Err(e) => return Err(e),
    };
    if let Some(form) = &closed {
        if !agrees(&form.mu, &mu) {
            return Err(SolveError::ClosedFormMismatch(format!(
                "mu: pipeline {:?}, closed form {:?}",
                mu, form.mu
            )));
        }
        if let Some(expected) = &form.u {
            if !profiles_agree(expected, &u) {
                return Err(SolveError::ClosedFormMismatch("extremizer differs".into()));
            }
        }
    }
    Ok(ExtremalSolution {
        k,
        weight: weight.clone(),
        lambda: lambda_of(&mu),
        u_k: v.scale(&mu),
        mu,
        seeds: Some(seeds),
        v,
        u,
        method: Method::Pipeline,
        closed_form_mu: closed.map(|c| c.mu),
        diagnostics,
    })
}

/// A solution in either arithmetic mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Exact(ExtremalSolution<BigRational>),
    Float(ExtremalSolution<f64>),
}

macro_rules! with_solution {
    ($self:expr, $s:ident => $body:expr) => {
        match $self {
            Solution::Exact($s) => $body,
            Solution::Float($s) => $body,
        }
    };
}

impl Solution {
    pub fn mode(&self) -> Mode {
        match self {
            Solution::Exact(_) => Mode::Exact,
            Solution::Float(_) => Mode::Float,
        }
    }

    pub fn k(&self) -> usize {
        with_solution!(self, s => s.k)
    }

    pub fn weight(&self) -> &Weight {
        with_solution!(self, s => &s.weight)
    }

    pub fn mu(&self) -> Scalar {
        with_solution!(self, s => s.mu.clone().into_scalar())
    }

    pub fn lambda(&self) -> f64 {
        with_solution!(self, s => s.lambda)
    }

    pub fn method(&self) -> Method {
        with_solution!(self, s => s.method)
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        with_solution!(self, s => &s.diagnostics)
    }

    pub fn closed_form_checked(&self) -> bool {
        with_solution!(self, s => s.closed_form_mu.is_some())
    }

    /// `(x, u(x), u⁽ᵏ⁾(x))` at `n >= 2` uniformly spaced points of [0, 1].
    pub fn samples(&self, n: usize) -> Vec<(f64, f64, f64)> {
        assert!(n >= 2, "need at least two samples");
        with_solution!(self, s => sample_profiles(&s.u, &s.u_k, n))
    }
}

fn sample_profiles<T: Field>(u: &Profile<T>, uk: &Profile<T>, n: usize) -> Vec<(f64, f64, f64)> {
    let last = (n - 1) as i64;
    (0..=last)
        .map(|i| {
            let x = T::ratio(i, last);
            let at = |p: &Profile<T>| {
                if i == 0 {
                    p.eval_at_zero_f64()
                } else {
                    p.sample(&x)
                }
            };
            (x.to_f64(), at(u), at(uk))
        })
        .collect()
}

/// Solves `spec` in its requested arithmetic mode.
pub fn solve(spec: &ProblemSpec) -> Result<Solution, SolveError> {
    match spec.mode {
        Mode::Exact => solve_in::<BigRational>(spec.k, &spec.weight).map(Solution::Exact),
        Mode::Float => solve_in::<f64>(spec.k, &spec.weight).map(Solution::Float),
    }
}
