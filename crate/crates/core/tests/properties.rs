use num_bigint::BigInt;
use num_rational::BigRational as Q;
use num_traits::{One, Zero};
use proptest::prelude::*;

use sobolev_core::numcore::{quad_numeric, Field, Mode, Polynomial, QuadOptions};
use sobolev_core::oracle::{galerkin_history, sign_iteration, SignIterationConfig};
use sobolev_core::solver::closed_form::dirac_mu;
use sobolev_core::solver::{solve_in, ProblemSpec};
use sobolev_core::weight::{parse_weight, Weight};

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn rational(lo: i64, hi: i64) -> impl Strategy<Value = Q> {
    (1i64..=12).prop_flat_map(move |d| (lo * d..=hi * d).prop_map(move |n| q(n, d)))
}

fn poly(max_len: usize) -> impl Strategy<Value = Polynomial<Q>> {
    prop::collection::vec(rational(-3, 3), 1..=max_len).prop_map(Polynomial::new)
}

/// `q₁² + x(1-x) q₂² + c`, non-negative on [0, 1] and never zero.
fn nonnegative_poly() -> impl Strategy<Value = Polynomial<Q>> {
    (poly(3), poly(2), rational(0, 2)).prop_map(|(a, b, c)| {
        let bump = Polynomial::new(vec![q(0, 1), q(1, 1), q(-1, 1)]);
        let p = a.mul(&a).add(&bump.mul(&b.mul(&b))).add(&Polynomial::constant(c));
        if p.is_zero() {
            Polynomial::one()
        } else {
            p
        }
    })
}

fn interior_point() -> impl Strategy<Value = Q> {
    (2i64..=30).prop_flat_map(|d| (1..d).prop_map(move |n| q(n, d)))
}

fn mu(k: usize, w: &Weight) -> Q {
    solve_in::<Q>(k, w).unwrap().mu
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn polynomial_ring_laws_hold_exactly(a in poly(5), b in poly(5), c in poly(5)) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).derivative(), a.derivative().mul(&b).add(&a.mul(&b.derivative())));
    }

    #[test]
    fn exact_integral_matches_quadrature(p in poly(8), lo in rational(0, 1), hi in rational(0, 1)) {
        let exact = p.integrate(&lo, &hi).to_f64();
        let f = p.to_f64();
        let (a, b) = (lo.to_f64(), hi.to_f64());
        let (a, b, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        let numeric = sign * quad_numeric(|x| f.eval(&x), a, b, &QuadOptions::new(1e-13)).unwrap().value;
        prop_assert!((exact - numeric).abs() <= 1e-11 * (1.0 + exact.abs()), "{} vs {}", exact, numeric);
    }

    #[test]
    fn moments_are_linear(a in nonnegative_poly(), b in nonnegative_poly(), c in rational(1, 5), k in 1usize..=4) {
        let wa = Weight::poly(a.clone()).unwrap();
        let wb = Weight::poly(b.clone()).unwrap();
        let sum = Weight::poly(a.scale(&c).add(&b)).unwrap();
        let (ma, mb, ms) = (wa.moments::<Q>(k).unwrap(), wb.moments::<Q>(k).unwrap(), sum.moments::<Q>(k).unwrap());
        for i in 0..k {
            prop_assert_eq!(&ms.b[i], &(&c * &ma.b[i] + &mb.b[i]));
        }
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn homogeneity_and_reflection(p in nonnegative_poly(), c in rational(1, 4), k in 1usize..=3) {
        let w = Weight::poly(p).unwrap();
        let base = mu(k, &w);
        prop_assert_eq!(mu(k, &w.scaled(&c).unwrap()), &base / (&c * &c));
        prop_assert_eq!(mu(k, &w.reflected().unwrap()), base);
    }

    #[test]
    fn reflection_of_point_masses_and_indicators(a in interior_point(), b in interior_point(), k in 1usize..=3) {
        let d = Weight::dirac(a.clone()).unwrap();
        prop_assert_eq!(mu(k, &d), mu(k, &d.reflected().unwrap()));
        if a < b {
            let chi = Weight::indicator(a, b).unwrap();
            prop_assert_eq!(mu(k, &chi), mu(k, &chi.reflected().unwrap()));
        }
    }

    #[test]
    fn shrinking_indicators_approach_the_point_mass(a in interior_point(), k in 1usize..=2) {
        let target = dirac_mu(k, &a).to_f64();
        let err = |j: u32| {
            let eps = Q::new(BigInt::one(), BigInt::one() << j);
            let chi = Weight::indicator(&a - &eps, &a + &eps).unwrap();
            (mu(k, &chi).to_f64() - target).abs() / target
        };
        let (coarse, fine) = (err(8), err(12));
        prop_assert!(fine < coarse, "{} !< {}", fine, coarse);
        prop_assert!(fine < 2e-2, "relative error {} at ε = 2⁻¹²", fine);
    }

    /// For `u = xᵏ(1-x)ᵏ g` with `g >= 0`, `(∫uρ)² <= ∫(u⁽ᵏ⁾)² / μ`, exactly.
    #[test]
    fn no_test_function_beats_the_constant(rho in nonnegative_poly(), g in nonnegative_poly(), k in 1usize..=3) {
        let w = Weight::poly(rho.clone()).unwrap();
        let bump = Polynomial::new(vec![q(0, 1), q(1, 1), q(-1, 1)]).pow(k);
        let u = bump.mul(&g);
        let mass = u.mul(&rho).integrate(&Q::zero(), &Q::one());
        let uk = u.nth_derivative(k);
        let energy = uk.mul(&uk).integrate(&Q::zero(), &Q::one());
        prop_assert!(&mass * &mass <= energy / mu(k, &w));
    }

    /// Sign-changing test functions, with `∫|u|ρ` by quadrature.
    #[test]
    fn sign_changing_test_functions_obey_the_bound(rho in nonnegative_poly(), g in poly(5), k in 1usize..=3) {
        prop_assume!(!g.is_zero());
        let w = Weight::poly(rho.clone()).unwrap();
        let bump = Polynomial::new(vec![q(0, 1), q(1, 1), q(-1, 1)]).pow(k);
        let u = bump.mul(&g);
        let (uf, rf) = (u.to_f64(), rho.to_f64());
        let mass = quad_numeric(|x| uf.eval(&x).abs() * rf.eval(&x), 0.0, 1.0, &QuadOptions::new(1e-13)).unwrap().value;
        let uk = u.nth_derivative(k);
        let bound = (uk.mul(&uk).integrate(&Q::zero(), &Q::one()) / mu(k, &w)).to_f64().sqrt();
        prop_assert!(mass <= bound * (1.0 + 1e-9), "{} > {}", mass, bound);
    }

    #[test]
    fn galerkin_values_increase_toward_the_constant(a in interior_point(), b in interior_point(), k in 1usize..=2) {
        prop_assume!(a < b);
        let w = Weight::indicator(a, b).unwrap();
        let target = Q::one() / mu(k, &w);
        let hist = galerkin_history::<Q>(k, &w, 8).unwrap();
        prop_assert!(hist.windows(2).all(|p| p[0] <= p[1]));
        prop_assert!(hist.iter().all(|h| *h <= target));
        let float = galerkin_history::<f64>(k, &w, 24).unwrap();
        prop_assert!(float.windows(2).all(|p| p[0] <= p[1] * (1.0 + 1e-14)));
        prop_assert!(*float.last().unwrap() <= target.to_f64() * (1.0 + 1e-12));
    }
}

/// Halving `h` must shrink the nodal error against the exact extremizer by
/// about four; three leaves room for the preasymptotic regime.
#[test]
fn sign_iteration_converges_at_second_order() {
    for (k, spec) in [(1, "poly:1"), (1, "poly:1+x"), (2, "poly:1"), (2, "poly:1+x^2"), (1, "chi:1/4,3/4")] {
        let w = parse_weight(spec).unwrap();
        let exact = solve_in::<Q>(k, &w).unwrap();
        let errors: Vec<f64> = [49, 99, 199]
            .iter()
            .map(|&n| {
                let problem = ProblemSpec::new(k, w.clone(), Mode::Float).unwrap();
                let report = sign_iteration(&problem, &SignIterationConfig::new(n)).unwrap();
                assert!(report.sign_definite);
                report
                    .solution
                    .iter()
                    .map(|(x, u)| (u - exact.u.eval_f64(*x)).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for pair in errors.windows(2) {
            assert!(pair[0] / pair[1] >= 3.0, "k={k}, {spec}: errors {errors:?}");
        }
    }
}
