//! Exact sign certification for rational polynomials via Sturm sequences.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::Polynomial;

type QPoly = Polynomial<BigRational>;

/// `p, p', -rem(p, p'), ...` until the remainder vanishes.
pub fn sturm_sequence(p: &QPoly) -> Vec<QPoly> {
    let mut seq = vec![p.clone()];
    if p.is_zero() {
        return seq;
    }
    let mut next = p.derivative();
    while !next.is_zero() {
        let prev = seq.last().unwrap().clone();
        seq.push(next.clone());
        next = prev.div_rem(&next).1.neg();
    }
    seq
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|q| q.eval(x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots strictly inside `(a, b)`.
pub fn count_roots_open(p: &QPoly, a: &BigRational, b: &BigRational) -> usize {
    assert!(!p.is_zero(), "root count of the zero polynomial");
    let p = p.deflate_root(a).deflate_root(b);
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let seq = sturm_sequence(&p);
    sign_changes(&seq, a).saturating_sub(sign_changes(&seq, b))
}

/// Yun's square-free decomposition: `p = c · Π a_i^i`, returned as `[a_1, a_2, ...]`.
pub fn squarefree_decomposition(p: &QPoly) -> Vec<QPoly> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_rem(&a0).0;
    let c = dp.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut factors = Vec::new();
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let b_next = b.div_rem(&a).0;
        let c_next = d.div_rem(&a).0;
        d = c_next.sub(&b_next.derivative());
        b = b_next;
        factors.push(a);
    }
    factors
}

/// Product of the square-free factors with odd multiplicity; these are exactly
/// the roots where `p` changes sign.
pub fn odd_multiplicity_part(p: &QPoly) -> QPoly {
    squarefree_decomposition(p)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| i % 2 == 0)
        .fold(QPoly::one(), |acc, (_, f)| acc.mul(&f))
}

/// A point of `(a, b)` where `p` does not vanish.
fn nonroot_point(p: &QPoly, a: &BigRational, b: &BigRational) -> BigRational {
    let n = p.degree().unwrap_or(0) as i64 + 2;
    (1..n)
        .map(|j| a.clone() + (b.clone() - a.clone()) * BigRational::new(j.into(), n.into()))
        .find(|t| !p.eval(t).is_zero())
        .expect("nonzero polynomial has at most deg roots")
}

/// Certifies `p >= 0` on `[a, b]`.
pub fn is_nonnegative_on(p: &QPoly, a: &BigRational, b: &BigRational) -> bool {
    if p.is_zero() {
        return true;
    }
    let odd = odd_multiplicity_part(p);
    if odd.degree().unwrap_or(0) > 0 && count_roots_open(&odd, a, b) > 0 {
        return false;
    }
    p.eval(&nonroot_point(p, a, b)).is_positive()
}

/// Certifies `p > 0` on the open interval `(a, b)`.
pub fn is_positive_on_open(p: &QPoly, a: &BigRational, b: &BigRational) -> bool {
    if p.is_zero() {
        return false;
    }
    count_roots_open(p, a, b) == 0 && p.eval(&nonroot_point(p, a, b)).is_positive()
}

/// Certifies `p > 0` on `(0, 1)` for the unit-interval case.
pub fn is_positive_on_unit_interval(p: &QPoly) -> bool {
    is_positive_on_open(p, &BigRational::zero(), &BigRational::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn p(c: &[i64]) -> QPoly {
        Polynomial::new(c.iter().map(|&v| q(v, 1)).collect())
    }

    fn roots(rs: &[(i64, i64)]) -> QPoly {
        rs.iter().fold(QPoly::one(), |acc, &(n, d)| {
            acc.mul(&Polynomial::new(vec![-q(n, d), q(1, 1)]))
        })
    }

    #[test]
    fn counts_distinct_roots() {
        let f = roots(&[(1, 4), (1, 2), (1, 2), (3, 4), (2, 1)]);
        assert_eq!(count_roots_open(&f, &q(0, 1), &q(1, 1)), 3);
        assert_eq!(count_roots_open(&f, &q(1, 4), &q(3, 4)), 1);
        assert_eq!(count_roots_open(&p(&[1, 0, 1]), &q(-9, 1), &q(9, 1)), 0);
    }

    #[test]
    fn odd_part_drops_double_roots() {
        let f = roots(&[(1, 3), (1, 3), (1, 2)]);
        let odd = odd_multiplicity_part(&f);
        assert_eq!(odd.degree(), Some(1));
        assert_eq!(odd.eval(&q(1, 2)), q(0, 1));
        let dec = squarefree_decomposition(&roots(&[(0, 1), (1, 1), (1, 1), (2, 1), (2, 1), (2, 1)]));
        assert_eq!(dec.len(), 3);
    }

    #[test]
    fn nonnegativity() {
        // (x - 1/2)^2 touches zero but never goes negative.
        assert!(is_nonnegative_on(&roots(&[(1, 2), (1, 2)]), &q(0, 1), &q(1, 1)));
        // x(1-x) vanishes at the endpoints only.
        assert!(is_nonnegative_on(&p(&[0, 1, -1]), &q(0, 1), &q(1, 1)));
        assert!(!is_nonnegative_on(&p(&[-1, 4]), &q(0, 1), &q(1, 1)));
        assert!(!is_nonnegative_on(&p(&[-1]), &q(0, 1), &q(1, 1)));
        // Negative only outside the interval.
        assert!(is_nonnegative_on(&p(&[-1, 4]), &q(1, 2), &q(1, 1)));
    }

    #[test]
    fn positivity_on_open_interval() {
        assert!(is_positive_on_unit_interval(&p(&[0, 0, 1, -2, 1])));
        assert!(!is_positive_on_unit_interval(&roots(&[(0, 1), (1, 1), (1, 2), (1, 2)])));
        assert!(!is_positive_on_unit_interval(&p(&[0, -1, 1])));
    }
}
