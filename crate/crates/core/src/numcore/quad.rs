//! Adaptive Gauss–Legendre quadrature with graded meshes at declared
//! endpoint singularities.
//!
//! Each cell is integrated with the 15-point Gauss rule on the whole cell and
//! on its two halves; the difference of the two estimates is the error
//! indicator and the two-half value is kept. The cell with the largest
//! indicator is bisected until the summed indicator drops below the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use super::NumError;

const ORDER: usize = 15;

/// Nodes and weights of the 15-point rule on [-1, 1].
fn gauss_rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            // Chebyshev-like initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn gauss15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_rule();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// Options for [`quad_numeric`].
#[derive(Clone, Debug)]
pub struct QuadOptions {
    /// Absolute tolerance on the summed error estimate.
    pub tol: f64,
    /// The integrand behaves like `(x - a)^(-α)`, `α < 1`, at the left end.
    pub singular_left: bool,
    /// Same at the right end.
    pub singular_right: bool,
    /// Interior points where the integrand is not smooth.
    pub breakpoints: Vec<f64>,
    /// Maximum number of bisections.
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        QuadOptions {
            tol,
            singular_left: false,
            singular_right: false,
            breakpoints: Vec::new(),
            max_subdivisions: 20_000,
        }
    }

    pub fn singular_left(mut self) -> Self {
        self.singular_left = true;
        self
    }

    pub fn singular_right(mut self) -> Self {
        self.singular_right = true;
        self
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

struct Cell {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Cell {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64) -> Cell {
        let m = 0.5 * (a + b);
        let left = gauss15(f, a, m);
        let right = gauss15(f, m, b);
        let error = (left + right - whole).abs();
        Cell { a, b, left, right, error: if error.is_nan() { f64::INFINITY } else { error } }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Geometric mesh `a + L·2^(-j)` toward a singular endpoint, stopping once the
/// innermost cell is negligible or cannot be halved further.
fn graded_points<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, toward_left: bool, tol: f64) -> Vec<f64> {
    let len = b - a;
    let mut pts = Vec::new();
    for j in 1..1100 {
        let delta = len * 0.5f64.powi(j);
        let p = if toward_left { a + delta } else { b - delta };
        // Keep every Gauss node strictly inside the cell after rounding.
        let floor = 1e3 * f64::EPSILON * if toward_left { a.abs() } else { b.abs() };
        if delta <= floor || delta < f64::MIN_POSITIVE {
            break;
        }
        pts.push(p);
        let inner = if toward_left { gauss15(f, a, p) } else { gauss15(f, p, b) };
        if inner.abs() < 1e-3 * tol {
            break;
        }
    }
    pts
}

/// `∫_a^b f`, adaptively, to absolute tolerance `opts.tol`.
pub fn quad_numeric<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, NumError> {
    if !(a <= b) {
        return Err(NumError::InvalidInterval);
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, subdivisions: 0 });
    }
    let mut pts = vec![a, b];
    pts.extend(opts.breakpoints.iter().copied().filter(|&x| x > a && x < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if opts.singular_left {
        let end = pts[1];
        pts.extend(graded_points(&f, a, end, true, opts.tol));
    }
    if opts.singular_right {
        let start = pts[pts.len() - 2];
        pts.extend(graded_points(&f, start, b, false, opts.tol));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut heap: BinaryHeap<Cell> = pts
        .windows(2)
        .map(|w| Cell::new(&f, w[0], w[1], gauss15(&f, w[0], w[1])))
        .collect();
    let mut subdivisions = 0;
    loop {
        let total_err: f64 = heap.iter().map(|c| c.error).sum();
        if total_err <= opts.tol {
            let value = heap.iter().map(Cell::value).sum();
            return Ok(QuadResult { value, error: total_err, subdivisions });
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(NumError::NonConvergence { error: total_err, tol: opts.tol });
        }
        let worst = heap.pop().expect("at least one cell");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(NumError::NonConvergence { error: total_err, tol: opts.tol });
        }
        heap.push(Cell::new(&f, worst.a, m, worst.left));
        heap.push(Cell::new(&f, m, worst.b, worst.right));
        subdivisions += 1;
    }
}
