//! Shared pieces of the acceptance suite: seeded generators for random
//! weights and a reporter that prints one verdict line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sobolev_core::numcore::Polynomial;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform over fractions `n/d` in `[lo, hi]` with `d <= max_den`.
pub fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Q {
    let d = rng.gen_range(1..=max_den);
    let n = rng.gen_range(lo * d..=hi * d);
    q(n, d)
}

/// `0 <= a < b <= 1`.
pub fn random_interval(rng: &mut ChaCha8Rng, max_den: i64) -> (Q, Q) {
    loop {
        let a = random_rational(rng, 0, 1, max_den);
        let b = random_rational(rng, 0, 1, max_den);
        if a < b {
            return (a, b);
        }
        if b < a {
            return (b, a);
        }
    }
}

/// `q₁² + x(1-x) q₂² + c` with `deg q₁ <= 2`, `deg q₂ <= 1`, `c >= 0`:
/// non-negative on [0, 1] by construction, degree at most 4, never zero.
pub fn random_nonnegative_poly(rng: &mut ChaCha8Rng) -> Polynomial<Q> {
    let mut coeffs = |n: usize| -> Polynomial<Q> {
        Polynomial::new((0..n).map(|_| random_rational(rng, -2, 2, 9)).collect())
    };
    let q1 = coeffs(3);
    let q2 = coeffs(2);
    let bump = Polynomial::new(vec![q(0, 1), q(1, 1), q(-1, 1)]);
    let c = random_rational(rng, 0, 1, 7);
    let p = q1.mul(&q1).add(&bump.mul(&q2.mul(&q2))).add(&Polynomial::constant(c));
    if p.is_zero() {
        Polynomial::one()
    } else {
        p
    }
}

/// Runs criteria in isolation; a panic counts as a failure of that criterion only.
#[derive(Default)]
pub struct Report {
    outcomes: Vec<(String, bool)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// `check` returns a one-line detail on success or the reason for failure.
    pub fn run(&mut self, id: &str, title: &str, check: impl FnOnce() -> Result<String, String>) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        println!("[{}] {id} {title} ({secs:.2}s): {detail}", if ok { "PASS" } else { "FAIL" });
        self.outcomes.push((id.to_string(), ok));
    }

    pub fn failures(&self) -> Vec<&str> {
        self.outcomes.iter().filter(|(_, ok)| !ok).map(|(id, _)| id.as_str()).collect()
    }

    pub fn finish(self) -> ExitCode {
        let failed = self.failures();
        println!(
            "acceptance: {} passed, {} failed{}",
            self.outcomes.len() - failed.len(),
            failed.len(),
            if failed.is_empty() { String::new() } else { format!(" ({})", failed.join(", ")) }
        );
        if failed.is_empty() {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        }
    }
}

/// `Err(msg)` unless `cond`.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sobolev_core::numcore::sturm::is_nonnegative_on;

    #[test]
    fn random_polys_are_nonnegative_and_small() {
        let mut r = rng(7);
        for _ in 0..200 {
            let p = random_nonnegative_poly(&mut r);
            assert!(p.degree().unwrap() <= 4);
            assert!(is_nonnegative_on(&p, &q(0, 1), &q(1, 1)));
        }
    }

    #[test]
    fn intervals_are_ordered() {
        let mut r = rng(1);
        for _ in 0..100 {
            let (a, b) = random_interval(&mut r, 12);
            assert!(q(0, 1) <= a && a < b && b <= q(1, 1));
        }
    }

    #[test]
    fn report_isolates_panics() {
        let mut report = Report::new();
        report.run("X1", "ok", || Ok("fine".into()));
        report.run("X2", "panics", || panic!("boom"));
        report.run("X3", "fails", || Err("no".into()));
        assert_eq!(report.failures(), ["X2", "X3"]);
    }
}
