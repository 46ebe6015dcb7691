//! Function representations for extremizers and their derivatives.

use crate::numcore::{Field, PiecewisePolynomial, Polynomial};
use crate::weight::{Weight, WeightError};

/// `regular(x) + x^(-alpha) · singular(x)` on [0, 1].
///
/// Produced by power weights, whose iterated integrals carry `x^(k - alpha)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalPoly<T> {
    pub regular: Polynomial<T>,
    pub singular: Polynomial<T>,
    pub alpha: T,
}

impl<T: Field> FractionalPoly<T> {
    fn shifted(&self, i: usize) -> T {
        T::from_i64(i as i64) - self.alpha.clone()
    }

    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![T::zero()];
        for (i, c) in self.singular.coeffs().iter().enumerate() {
            coeffs.push(c.clone() / self.shifted(i + 1));
        }
        FractionalPoly {
            regular: self.regular.antiderivative(),
            singular: Polynomial::new(coeffs),
            alpha: self.alpha.clone(),
        }
    }

    /// Panics if the constant singular coefficient is nonzero, since
    /// `x^(-1-alpha)` is not representable.
    pub fn derivative(&self) -> Self {
        assert!(
            self.singular.coeff(0).is_zero(),
            "derivative leaves the representable class"
        );
        let coeffs = self
            .singular
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * self.shifted(i))
            .collect();
        FractionalPoly {
            regular: self.regular.derivative(),
            singular: Polynomial::new(coeffs),
            alpha: self.alpha.clone(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        FractionalPoly {
            regular: self.regular.scale(c),
            singular: self.singular.scale(c),
            alpha: self.alpha.clone(),
        }
    }

    /// `∫_0^1 f²`, exact in exact mode.
    pub fn integral_sq(&self) -> T {
        let (r, s) = (self.regular.coeffs(), self.singular.coeffs());
        let two_alpha = self.alpha.clone() + self.alpha.clone();
        let mut acc = self.regular.mul(&self.regular).integrate(&T::zero(), &T::one());
        let nz = |c: &&T| !c.is_zero();
        for (i, ri) in r.iter().enumerate().filter(|(_, c)| nz(c)) {
            for (j, sj) in s.iter().enumerate().filter(|(_, c)| nz(c)) {
                acc = acc + T::from_i64(2) * ri.clone() * sj.clone() / self.shifted(i + j + 1);
            }
        }
        for (i, si) in s.iter().enumerate().filter(|(_, c)| nz(c)) {
            for (j, sj) in s.iter().enumerate().filter(|(_, c)| nz(c)) {
                acc = acc
                    + si.clone() * sj.clone() / (T::from_i64((i + j + 1) as i64) - two_alpha.clone());
            }
        }
        acc
    }

    /// `∫_0^1 f · x^(-alpha)`.
    pub fn pair_power(&self) -> T {
        let two_alpha = self.alpha.clone() + self.alpha.clone();
        let reg = self
            .regular
            .coeffs()
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, c)| acc + c.clone() / self.shifted(i + 1));
        self.singular
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(reg, |acc, (j, c)| {
                acc + c.clone() / (T::from_i64(j as i64 + 1) - two_alpha.clone())
            })
    }

    pub fn eval_at_one(&self) -> T {
        self.regular.eval(&T::one()) + self.singular.eval(&T::one())
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let alpha = self.alpha.to_f64();
        let sing: f64 = self
            .singular
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let e = i as f64 - alpha;
                let xe = if x == 0.0 && e > 0.0 { 0.0 } else { x.powf(e) };
                c.to_f64() * xe
            })
            .sum();
        self.regular.to_f64().eval(&x) + sing
    }
}

/// A solver-built function on [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub enum Profile<T> {
    Piecewise(PiecewisePolynomial<T>),
    Fractional(FractionalPoly<T>),
    /// `scale · d^order/dx^order (-x ln x)`, for `order <= 1`.
    NegXLogX { scale: T, order: usize },
}

impl<T: Field> Profile<T> {
    pub fn antiderivative(&self) -> Self {
        match self {
            Profile::Piecewise(pw) => Profile::Piecewise(pw.antiderivative()),
            Profile::Fractional(fp) => Profile::Fractional(fp.antiderivative()),
            Profile::NegXLogX { scale, order } => {
                assert!(*order == 1, "antiderivative of -x ln x is not tracked");
                Profile::NegXLogX { scale: scale.clone(), order: 0 }
            }
        }
    }

    pub fn nth_antiderivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.antiderivative())
    }

    pub fn derivative(&self) -> Self {
        match self {
            Profile::Piecewise(pw) => Profile::Piecewise(pw.derivative()),
            Profile::Fractional(fp) => Profile::Fractional(fp.derivative()),
            Profile::NegXLogX { scale, order } => {
                assert!(*order == 0, "only the first derivative of -x ln x is tracked");
                Profile::NegXLogX { scale: scale.clone(), order: 1 }
            }
        }
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, c: &T) -> Self {
        match self {
            Profile::Piecewise(pw) => Profile::Piecewise(pw.scale(c)),
            Profile::Fractional(fp) => Profile::Fractional(fp.scale(c)),
            Profile::NegXLogX { scale, order } => Profile::NegXLogX {
                scale: scale.clone() * c.clone(),
                order: *order,
            },
        }
    }

    /// `∫_0^1 f²`.
    pub fn integral_sq(&self) -> T {
        match self {
            Profile::Piecewise(pw) => pw.mul(pw).integral(),
            Profile::Fractional(fp) => fp.integral_sq(),
            // ∫ x² ln² x = 2/27 and ∫ (ln x + 1)² = 1.
            Profile::NegXLogX { scale, order } => {
                let base = if *order == 0 { T::ratio(2, 27) } else { T::one() };
                scale.clone() * scale.clone() * base
            }
        }
    }

    /// Exact value at a point, when the representation allows it.
    pub fn eval_exact(&self, x: &T) -> Option<T> {
        match self {
            Profile::Piecewise(pw) => Some(pw.eval(x)),
            _ => None,
        }
    }

    /// Value at `x = 1` (left limit for piecewise functions).
    pub fn eval_at_one(&self) -> T {
        match self {
            Profile::Piecewise(pw) => pw.eval_left(&T::one()),
            Profile::Fractional(fp) => fp.eval_at_one(),
            // -x ln x and -ln x - 1 at x = 1.
            Profile::NegXLogX { scale, order } => {
                if *order == 0 {
                    T::zero()
                } else {
                    -scale.clone()
                }
            }
        }
    }

    /// Value at `x = 0` (right limit). Infinite for `-ln x - 1`.
    pub fn eval_at_zero_f64(&self) -> f64 {
        match self {
            Profile::Piecewise(pw) => pw.eval(&T::zero()).to_f64(),
            Profile::Fractional(fp) => fp.eval_f64(0.0),
            Profile::NegXLogX { scale, order } => {
                if *order == 0 {
                    0.0
                } else {
                    f64::INFINITY * scale.to_f64().signum()
                }
            }
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        match self {
            Profile::Piecewise(pw) => pw.eval_f64(x),
            Profile::Fractional(fp) => fp.eval_f64(x),
            Profile::NegXLogX { scale, order } => {
                let s = scale.to_f64();
                match (*order, x == 0.0) {
                    (0, true) => 0.0,
                    (0, false) => -s * x * x.ln(),
                    (_, true) => f64::INFINITY * s.signum(),
                    (_, false) => -s * (x.ln() + 1.0),
                }
            }
        }
    }

    /// Best available value at `x`: exact evaluation rounded once when
    /// possible, double-precision evaluation otherwise.
    pub fn sample(&self, x: &T) -> f64 {
        match self.eval_exact(x) {
            Some(v) => v.to_f64(),
            None => self.eval_f64(x.to_f64()),
        }
    }

    /// `∫_0^1 f ρ` (for a Dirac mass, `f(a)`).
    pub fn pair(&self, weight: &Weight) -> Result<T, WeightError> {
        match (self, weight) {
            (Profile::Piecewise(pw), _) => weight.pair_piecewise(pw),
            (Profile::Fractional(fp), Weight::Power { alpha })
                if T::from_rational(alpha) == fp.alpha =>
            {
                Ok(fp.pair_power())
            }
            // ∫ (-x ln x)/x = 1
            (Profile::NegXLogX { scale, order: 0 }, Weight::Hardy { order: 1 }) => {
                Ok(scale.clone())
            }
            _ => Err(WeightError::Unsupported(format!(
                "cannot pair this profile with a `{}` weight",
                weight.kind_name()
            ))),
        }
    }
}
