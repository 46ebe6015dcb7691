//! Picard iteration on the sign pattern of the discrete eigenproblem
//! `(-1)ᵏ u⁽²ᵏ⁾ = μ ρ sign(u)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fd::FdOperator;
use super::{OracleError, OracleMethod, OracleReport};
use crate::numcore::Scalar;
use crate::solver::ProblemSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignInit {
    Positive,
    Alternating,
    /// Independent fair ±1 entries, one draw per restart.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignIterationConfig {
    pub grid: usize,
    pub max_iter: usize,
    /// Entries with `|u_i| <= tol · max |u|` count as zero and take the sign
    /// of the largest entry.
    pub tol: f64,
    pub restarts: usize,
    pub init: SignInit,
    pub seed: u64,
}

impl SignIterationConfig {
    pub fn new(grid: usize) -> Self {
        SignIterationConfig {
            grid,
            max_iter: 100,
            tol: 1e-12,
            restarts: 1,
            init: SignInit::Positive,
            seed: 0,
        }
    }

    pub fn with_init(mut self, init: SignInit, restarts: usize, seed: u64) -> Self {
        self.init = init;
        self.restarts = restarts.max(1);
        self.seed = seed;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

/// Outcome of one restart.
#[derive(Clone, Debug, PartialEq)]
pub struct SignRun {
    pub iterations: usize,
    pub converged: bool,
    pub sign_definite: bool,
    pub mu_h: f64,
    /// Normalized nodal values, flipped to be positive when sign-definite.
    pub u: Vec<f64>,
}

fn initial_signs(init: SignInit, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match init {
        SignInit::Positive => vec![1.0; n],
        SignInit::Alternating => (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        SignInit::Random => (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect(),
    }
}

fn run(op: &FdOperator, load: &[f64], mut sigma: Vec<f64>, cfg: &SignIterationConfig) -> SignRun {
    let mut iterations = 0;
    loop {
        iterations += 1;
        let rhs: Vec<f64> = load.iter().zip(&sigma).map(|(r, s)| r * s).collect();
        let w = op.solve(&rhs);
        let mass = op.weighted_l1(&w, load);
        let mut u: Vec<f64> = w.iter().map(|v| v / mass).collect();
        let peak = u.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        let floor = cfg.tol * peak.abs();
        let next: Vec<f64> = u
            .iter()
            .map(|v| if v.abs() <= floor { peak.signum() } else { v.signum() })
            .collect();
        let converged = next == sigma;
        if converged || iterations >= cfg.max_iter {
            let sign_definite = next.iter().all(|s| *s == next[0]);
            if sign_definite && next[0] < 0.0 {
                u.iter_mut().for_each(|v| *v = -*v);
            }
            return SignRun {
                iterations,
                converged,
                sign_definite: converged && sign_definite,
                mu_h: op.energy(&u),
                u,
            };
        }
        sigma = next;
    }
}

/// Runs every restart of the iteration and returns them individually.
pub fn sign_iteration_runs(
    spec: &ProblemSpec,
    cfg: &SignIterationConfig,
) -> Result<(FdOperator, Vec<SignRun>), OracleError> {
    let op = FdOperator::new(spec.k, cfg.grid)?;
    let load = op.load(&spec.weight)?;
    if load.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(OracleError::NonFinite);
    }
    if load.iter().all(|v| *v == 0.0) {
        return Err(OracleError::Unsupported("weight vanishes on every grid node".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let runs = (0..cfg.restarts)
        .map(|_| run(&op, &load, initial_signs(cfg.init, op.n(), &mut rng), cfg))
        .collect();
    Ok((op, runs))
}

/// Non-convergence is reported through `converged = false`, never as an error.
pub fn sign_iteration(spec: &ProblemSpec, cfg: &SignIterationConfig) -> Result<OracleReport, OracleError> {
    let (op, runs) = sign_iteration_runs(spec, cfg)?;
    let best = runs
        .iter()
        .filter(|r| r.sign_definite)
        .chain(runs.iter())
        .next()
        .expect("at least one restart");
    let mut report = OracleReport::new(OracleMethod::SignIteration, Scalar::Float(1.0 / best.mu_h));
    report.converged = runs.iter().all(|r| r.converged);
    report.sign_definite = runs.iter().all(|r| r.sign_definite);
    report.history = runs
        .iter()
        .enumerate()
        .map(|(i, r)| (i as f64, Scalar::Float(r.mu_h)))
        .collect();
    report.solution = op.nodes().into_iter().zip(best.u.iter().copied()).collect();
    let count = |p: fn(&SignRun) -> bool| runs.iter().filter(|r| p(r)).count() as f64;
    report.details.insert("grid".into(), cfg.grid as f64);
    report.details.insert("mu_h".into(), best.mu_h);
    report.details.insert("restarts".into(), runs.len() as f64);
    report.details.insert("restarts_converged".into(), count(|r| r.converged));
    report.details.insert("restarts_sign_definite".into(), count(|r| r.sign_definite));
    report.details.insert(
        "max_iterations".into(),
        runs.iter().map(|r| r.iterations).max().unwrap_or(0) as f64,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::Mode;
    use crate::weight::parse_weight;

    fn spec(k: usize, w: &str) -> ProblemSpec {
        ProblemSpec::new(k, parse_weight(w).unwrap(), Mode::Float).unwrap()
    }

    #[test]
    fn uniform_k1() {
        let r = sign_iteration(&spec(1, "poly:1"), &SignIterationConfig::new(99)).unwrap();
        assert!(r.sign_definite && r.converged);
        let mu = r.details["mu_h"];
        assert!((mu / 12.0 - 1.0).abs() < 0.02, "{mu}");
        assert!(r.solution.iter().all(|(_, u)| *u > 0.0));
    }

    #[test]
    fn uniform_k2() {
        let r = sign_iteration(&spec(2, "poly:1"), &SignIterationConfig::new(199)).unwrap();
        assert!(r.sign_definite);
        let mu = r.details["mu_h"];
        assert!((mu / 720.0 - 1.0).abs() < 0.02, "{mu}");
    }

    #[test]
    fn alternating_start_recovers() {
        // The first solve is a zigzag that vanishes on every other node.
        let cfg = SignIterationConfig::new(99).with_init(SignInit::Alternating, 1, 0);
        let r = sign_iteration(&spec(1, "poly:1"), &cfg).unwrap();
        assert!(r.sign_definite && r.converged);
        assert!(r.solution.iter().all(|(_, u)| *u > 0.0));
        assert!((r.details["mu_h"] / 12.0 - 1.0).abs() < 0.02);
    }

    #[test]
    fn dirac_load() {
        let r = sign_iteration(&spec(1, "dirac:1/2"), &SignIterationConfig::new(99)).unwrap();
        // The discrete tent is exact: μ_h = 4.
        assert!((r.details["mu_h"] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn seeded_restarts_are_reproducible() {
        let cfg = SignIterationConfig::new(49).with_init(SignInit::Random, 4, 7);
        let a = sign_iteration(&spec(2, "poly:1+x"), &cfg).unwrap();
        let b = sign_iteration(&spec(2, "poly:1+x"), &cfg).unwrap();
        assert_eq!(a, b);
    }
}
