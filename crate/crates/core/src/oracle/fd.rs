//! Clamped finite-difference discretization of `(-1)ᵏ d^(2k)/dx^(2k)` for
//! `k = 1, 2` on the interior points `x_i = i h`, `h = 1/(n+1)`.

use super::OracleError;
use crate::numcore::Field;
use crate::weight::Weight;

/// Banded symmetric positive definite operator, factored once as `L D Lᵀ`.
#[derive(Clone, Debug)]
pub struct FdOperator {
    k: usize,
    n: usize,
    h: f64,
    /// `lower[i][d]` is `L[i][i-1-d]`.
    lower: Vec<Vec<f64>>,
    diag: Vec<f64>,
}

impl FdOperator {
    pub fn new(k: usize, n: usize) -> Result<Self, OracleError> {
        if !(1..=2).contains(&k) {
            return Err(OracleError::Unsupported(format!(
                "finite differences are only provided for k = 1, 2 (got {k})"
            )));
        }
        if n < 2 * k + 1 {
            return Err(OracleError::InvalidGrid(n));
        }
        let h = 1.0 / (n + 1) as f64;
        let scale = h.powi(2 * k as i32);
        // Stencils: [-1, 2, -1] and [1, -4, 6, -4, 1]; the clamped ghost value
        // u_{-1} = u_1 turns the first (and last) diagonal entry 6 into 7.
        let band: &[f64] = if k == 1 { &[2.0, -1.0] } else { &[6.0, -4.0, 1.0] };
        let entry = |i: usize, j: usize| -> f64 {
            let d = i.abs_diff(j);
            if d >= band.len() {
                return 0.0;
            }
            let mut v = band[d];
            if k == 2 && d == 0 && (i == 0 || i == n - 1) {
                v += 1.0;
            }
            v / scale
        };
        let mut lower = vec![vec![0.0; k]; n];
        let mut diag = vec![0.0; n];
        let l_at = |lower: &Vec<Vec<f64>>, i: usize, j: usize| -> f64 {
            if j < i && i - 1 - j < k {
                lower[i][i - 1 - j]
            } else {
                0.0
            }
        };
        for i in 0..n {
            let first = i.saturating_sub(k);
            for j in first..i {
                let mut v = entry(i, j);
                for m in first..j {
                    v -= l_at(&lower, i, m) * l_at(&lower, j, m) * diag[m];
                }
                lower[i][i - 1 - j] = v / diag[j];
            }
            let mut v = entry(i, i);
            for m in first..i {
                v -= l_at(&lower, i, m).powi(2) * diag[m];
            }
            diag[i] = v;
        }
        Ok(FdOperator { k, n, h, lower, diag })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (1..=self.n).map(|i| i as f64 * self.h).collect()
    }

    /// Solves `A u = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, k) = (self.n, self.k);
        let mut y = rhs.to_vec();
        for i in 0..n {
            for d in 0..k.min(i) {
                y[i] -= self.lower[i][d] * y[i - 1 - d];
            }
        }
        for i in 0..n {
            y[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            for d in 0..k {
                let j = i + 1 + d;
                if j < n {
                    y[i] -= self.lower[j][d] * y[j];
                }
            }
        }
        y
    }

    fn padded(&self, u: &[f64]) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n + 2);
        p.push(0.0);
        p.extend_from_slice(u);
        p.push(0.0);
        p
    }

    /// Discrete `∫ (u⁽ᵏ⁾)²`, summed so that it equals `h uᵀ A u`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let p = self.padded(u);
        let h = self.h;
        if self.k == 1 {
            p.windows(2).map(|w| ((w[1] - w[0]) / h).powi(2)).sum::<f64>() * h
        } else {
            let m = p.len();
            let second = |i: usize| {
                let left = if i == 0 { p[1] } else { p[i - 1] };
                let right = if i == m - 1 { p[m - 2] } else { p[i + 1] };
                (left - 2.0 * p[i] + right) / (h * h)
            };
            (0..m)
                .map(|i| {
                    let w = if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
                    w * second(i).powi(2)
                })
                .sum::<f64>()
                * h
        }
    }

    /// Nodal load for `ρ`: cell averages over `[x_i - h/2, x_i + h/2]` for
    /// piecewise polynomials, so a jump on a node costs O(h²) rather than
    /// O(h); point values for singular weights; for a Dirac mass, its unit
    /// weight split linearly between the two neighbouring nodes.
    pub fn load(&self, weight: &Weight) -> Result<Vec<f64>, OracleError> {
        match weight {
            Weight::Dirac { a } => {
                let a = a.to_f64();
                let s = a / self.h;
                let j = (s.floor() as usize).min(self.n);
                let theta = s - j as f64;
                let mut load = vec![0.0; self.n];
                // Node j sits at x = j h; nodes 0 and n+1 are boundary nodes.
                for (node, share) in [(j, 1.0 - theta), (j + 1, theta)] {
                    if (1..=self.n).contains(&node) {
                        load[node - 1] += share / self.h;
                    }
                }
                Ok(load)
            }
            _ if weight.as_piecewise::<f64>().is_some() => {
                let cumulative = weight.as_piecewise::<f64>().unwrap().antiderivative();
                let half = self.h / 2.0;
                Ok(self
                    .nodes()
                    .into_iter()
                    .map(|x| (cumulative.eval(&(x + half)) - cumulative.eval(&(x - half))) / self.h)
                    .collect())
            }
            _ => self
                .nodes()
                .into_iter()
                .map(|x| weight.eval(x).map_err(OracleError::from))
                .collect(),
        }
    }

    /// Trapezoid `∫ |u| ρ` (boundary values vanish).
    pub fn weighted_l1(&self, u: &[f64], load: &[f64]) -> f64 {
        u.iter().zip(load).map(|(u, r)| u.abs() * r).sum::<f64>() * self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_is_exact_for_quadratics() {
        // -w'' = 1 → w = x(1-x)/2; the second difference is exact on quadratics.
        let op = FdOperator::new(1, 9).unwrap();
        let w = op.solve(&[1.0; 9]);
        for (x, w) in op.nodes().into_iter().zip(w) {
            assert!((w - x * (1.0 - x) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn beam_converges_at_second_order() {
        let err = |n: usize| {
            let op = FdOperator::new(2, n).unwrap();
            let w = op.solve(&vec![1.0; n]);
            op.nodes()
                .into_iter()
                .zip(w)
                .map(|(x, w)| (w - (x * (1.0 - x)).powi(2) / 24.0).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(49), err(99));
        assert!(e1 / e2 > 3.0, "{e1} {e2}");
    }

    #[test]
    fn energy_matches_quadratic_form() {
        for k in 1..=2 {
            let op = FdOperator::new(k, 20).unwrap();
            let u: Vec<f64> = (0..20).map(|i| ((i * 7 % 5) as f64) - 1.5).collect();
            let au = op.solve(&u);
            // uᵀ A⁻¹ u h = energy(A⁻¹ u)
            let lhs: f64 = u.iter().zip(&au).map(|(a, b)| a * b).sum::<f64>() * op.h();
            assert!((lhs - op.energy(&au)).abs() < 1e-10 * lhs.abs());
        }
    }

    #[test]
    fn dirac_load_has_unit_mass() {
        let op = FdOperator::new(1, 99).unwrap();
        let load = op.load(&Weight::dirac(num_rational::BigRational::new(1.into(), 3.into())).unwrap()).unwrap();
        assert!((load.iter().sum::<f64>() * op.h() - 1.0).abs() < 1e-12);
        assert_eq!(load.iter().filter(|v| **v > 0.0).count(), 2);
    }

    #[test]
    fn rejects_bad_orders_and_grids() {
        assert!(FdOperator::new(3, 99).is_err());
        assert!(FdOperator::new(2, 4).is_err());
    }
}
