//! Piecewise polynomials on [0, 1].

use super::poly::Polynomial;
use super::scalar::Field;
use super::NumError;

/// Breakpoints `0 = b_0 < b_1 < ... < b_n = 1` with one polynomial per interval.
///
/// Continuity is not required; see [`PiecewisePolynomial::is_continuous`].
/// Evaluation at an interior breakpoint uses the piece to its right.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePolynomial<T> {
    breakpoints: Vec<T>,
    pieces: Vec<Polynomial<T>>,
}

impl<T: Field> PiecewisePolynomial<T> {
    pub fn new(breakpoints: Vec<T>, pieces: Vec<Polynomial<T>>) -> Result<Self, NumError> {
        if breakpoints.len() < 2 || pieces.len() + 1 != breakpoints.len() {
            return Err(NumError::InvalidBreakpoints(
                "need n+1 breakpoints for n pieces".into(),
            ));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(NumError::InvalidBreakpoints(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NumError::InvalidBreakpoints(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(PiecewisePolynomial { breakpoints, pieces })
    }

    /// A single polynomial on all of [0, 1].
    pub fn single(p: Polynomial<T>) -> Self {
        PiecewisePolynomial {
            breakpoints: vec![T::zero(), T::one()],
            pieces: vec![p],
        }
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial<T>] {
        &self.pieces
    }

    /// Iterates over `(left, right, piece)`.
    pub fn intervals(&self) -> impl Iterator<Item = (&T, &T, &Polynomial<T>)> {
        self.breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| (&w[0], &w[1], p))
    }

    fn piece_index(&self, x: &T) -> usize {
        let n = self.pieces.len();
        // Number of interior breakpoints <= x.
        self.breakpoints[1..n]
            .iter()
            .take_while(|b| *b <= x)
            .count()
    }

    pub fn eval(&self, x: &T) -> T {
        self.pieces[self.piece_index(x)].eval(x)
    }

    /// Value at `x` using the piece to the left of a breakpoint.
    pub fn eval_left(&self, x: &T) -> T {
        let idx = self.breakpoints[1..self.pieces.len()]
            .iter()
            .take_while(|b| *b < x)
            .count();
        self.pieces[idx].eval(x)
    }

    fn map_pieces(&self, f: impl Fn(&Polynomial<T>) -> Polynomial<T>) -> Self {
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map_pieces(|p| p.scale(c))
    }

    pub fn derivative(&self) -> Self {
        self.map_pieces(Polynomial::derivative)
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        self.map_pieces(|p| p.nth_derivative(n))
    }

    /// The continuous antiderivative `x ↦ ∫_0^x p`.
    pub fn antiderivative(&self) -> Self {
        let mut offset = T::zero();
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (l, r, p) in self.intervals() {
            let anti = p.antiderivative();
            let shifted = anti.sub(&Polynomial::constant(anti.eval(l) - offset.clone()));
            offset = shifted.eval(r);
            pieces.push(shifted);
        }
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces,
        }
    }

    pub fn nth_antiderivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.antiderivative())
    }

    /// `∫_0^1`.
    pub fn integral(&self) -> T {
        self.intervals()
            .fold(T::zero(), |acc, (l, r, p)| acc + p.integrate(l, r))
    }

    /// Both operands re-expressed on the union of their breakpoints.
    pub fn refine_with(&self, other: &Self) -> (Self, Self) {
        let mut merged: Vec<T> = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.breakpoints.len() || j < other.breakpoints.len() {
            let next = match (self.breakpoints.get(i), other.breakpoints.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                    a.clone()
                }
                (Some(a), Some(b)) if a < b => {
                    i += 1;
                    a.clone()
                }
                (Some(_), Some(b)) => {
                    j += 1;
                    b.clone()
                }
                (Some(a), None) => {
                    i += 1;
                    a.clone()
                }
                (None, Some(b)) => {
                    j += 1;
                    b.clone()
                }
                (None, None) => unreachable!(),
            };
            merged.push(next);
        }
        (self.resample(&merged), other.resample(&merged))
    }

    fn resample(&self, breakpoints: &[T]) -> Self {
        let pieces = breakpoints
            .windows(2)
            .map(|w| self.pieces[self.piece_index(&w[0])].clone())
            .collect();
        PiecewisePolynomial {
            breakpoints: breakpoints.to_vec(),
            pieces,
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&Polynomial<T>, &Polynomial<T>) -> Polynomial<T>,
    ) -> Self {
        let (a, b) = self.refine_with(other);
        PiecewisePolynomial {
            pieces: a.pieces.iter().zip(&b.pieces).map(|(p, q)| f(p, q)).collect(),
            breakpoints: a.breakpoints,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, Polynomial::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, Polynomial::sub)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, Polynomial::mul)
    }

    /// Largest jump of any derivative of order `0..=m` across an interior
    /// breakpoint; zero means `C^m` (exactly, in exact mode).
    pub fn max_jump(&self, m: usize) -> T {
        let mut worst = T::zero();
        for (idx, b) in self.breakpoints[1..self.pieces.len()].iter().enumerate() {
            let (left, right) = (&self.pieces[idx], &self.pieces[idx + 1]);
            for order in 0..=m {
                let jump = (left.nth_derivative(order).eval(b)
                    - right.nth_derivative(order).eval(b))
                .abs();
                if jump > worst {
                    worst = jump;
                }
            }
        }
        worst
    }

    pub fn is_continuous(&self, m: usize, tol: f64) -> bool {
        self.max_jump(m).is_negligible(tol)
    }

    pub fn to_f64(&self) -> PiecewisePolynomial<f64> {
        PiecewisePolynomial {
            breakpoints: self.breakpoints.iter().map(Field::to_f64).collect(),
            pieces: self.pieces.iter().map(Polynomial::to_f64).collect(),
        }
    }

    /// Evaluates in double precision, converting breakpoints and coefficients.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let n = self.pieces.len();
        let idx = self.breakpoints[1..n]
            .iter()
            .take_while(|b| b.to_f64() <= x)
            .count();
        self.pieces[idx].to_f64().eval(&x)
    }
}
