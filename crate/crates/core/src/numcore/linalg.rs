//! Small dense linear solves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::Field;
use super::NumError;

pub type Matrix<T> = Vec<Vec<T>>;

fn check_square<T>(a: &Matrix<T>, b: &[T]) -> Result<usize, NumError> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) || b.len() != n {
        return Err(NumError::DimensionMismatch);
    }
    Ok(n)
}

/// Gaussian elimination. Exact mode pivots on the first nonzero entry; float
/// mode uses partial pivoting.
pub fn solve<T: Field>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>, NumError> {
    let n = check_square(a, b)?;
    let mut m: Matrix<T> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = match T::MODE {
            super::Mode::Exact => (col..n).find(|&r| !m[r][col].is_zero()),
            super::Mode::Float => (col..n)
                .filter(|&r| !m[r][col].is_zero())
                .max_by(|&r, &s| m[r][col].abs().partial_cmp(&m[s][col].abs()).unwrap()),
        }
        .ok_or(NumError::SingularMatrix)?;
        m.swap(col, pivot);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / m[col][col].clone();
            for c in col..=n {
                let delta = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
    }
    back_substitute(&m, n)
}

fn back_substitute<T: Field>(m: &Matrix<T>, n: usize) -> Result<Vec<T>, NumError> {
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut acc = m[r][n].clone();
        for c in r + 1..n {
            acc = acc - m[r][c].clone() * x[c].clone();
        }
        if m[r][r].is_zero() {
            return Err(NumError::SingularMatrix);
        }
        x[r] = acc / m[r][r].clone();
    }
    Ok(x)
}

/// Bareiss fraction-free elimination on the integer-scaled augmented system.
/// Every intermediate entry stays an integer, so no gcd work happens until
/// the final back substitution.
pub fn solve_fraction_free(
    a: &Matrix<BigRational>,
    b: &[BigRational],
) -> Result<Vec<BigRational>, NumError> {
    let n = check_square(a, b)?;
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let lcm = row
                .iter()
                .chain(std::iter::once(rhs))
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|v| (v * BigRational::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n)
            .find(|&r| !m[r][k].is_zero())
            .ok_or(NumError::SingularMatrix)?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let q: Matrix<BigRational> = m
        .into_iter()
        .map(|row| row.into_iter().map(BigRational::from_integer).collect())
        .collect();
    back_substitute(&q, n)
}

/// Square-root-free Cholesky factorization `G = L D Lᵀ` with unit lower `L`.
///
/// Fails when a pivot is not positive; in float mode a pivot below
/// `rel_tol · G_ii` is treated as a failure as well.
pub fn ldlt<T: Field>(g: &Matrix<T>, rel_tol: f64) -> Result<(Matrix<T>, Vec<T>), NumError> {
    let n = g.len();
    if g.iter().any(|row| row.len() != n) {
        return Err(NumError::DimensionMismatch);
    }
    let mut l = vec![vec![T::zero(); n]; n];
    let mut d: Vec<T> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = g[j][j].clone();
        for k in 0..j {
            dj = dj - l[j][k].clone() * l[j][k].clone() * d[k].clone();
        }
        let floor = match T::MODE {
            super::Mode::Exact => 0.0,
            super::Mode::Float => rel_tol * g[j][j].to_f64().abs(),
        };
        if dj <= T::zero() || dj.to_f64() <= floor {
            return Err(NumError::NotPositiveDefinite { index: j });
        }
        l[j][j] = T::one();
        for i in j + 1..n {
            let mut v = g[i][j].clone();
            for k in 0..j {
                v = v - l[i][k].clone() * l[j][k].clone() * d[k].clone();
            }
            l[i][j] = v / dj.clone();
        }
        d.push(dj);
    }
    Ok((l, d))
}

/// Solves `L y = r` for unit lower-triangular `L`.
pub fn forward_substitute<T: Field>(l: &Matrix<T>, r: &[T]) -> Vec<T> {
    let mut y: Vec<T> = Vec::with_capacity(r.len());
    for i in 0..r.len() {
        let mut v = r[i].clone();
        for (k, yk) in y.iter().enumerate() {
            v = v - l[i][k].clone() * yk.clone();
        }
        y.push(v);
    }
    y
}

pub fn mat_vec<T: Field>(a: &Matrix<T>, x: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
        })
        .collect()
}
