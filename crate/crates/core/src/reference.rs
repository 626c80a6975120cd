//! Finite-difference reference spectrum for `-d²/dx² + V(x)`.
//!
//! The three-point Laplacian on a uniform grid with Dirichlet ends gives a
//! symmetric tridiagonal matrix. Its eigenvalues are found one index at a
//! time by bisection on the negative-pivot count of `T - λI`, and two nested
//! grids are combined by Richardson extrapolation to cancel the `O(h²)` error.

use thiserror::Error;

use crate::qes::QesModel;

pub const DEFAULT_L: f64 = 5.0;
pub const DEFAULT_N: usize = 4000;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Indices whose eigenvectors get an inverse-iteration node check.
pub const NODE_CHECK_LEVELS: usize = 6;

const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReferenceError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("requested {requested} eigenvalues from a {size}-point grid")]
    TooManyEigenvalues { requested: usize, size: usize },
    #[error("bisection for eigenvalue {index} did not converge")]
    ConvergenceFailure { index: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

/// A potential on the whole line, or on `(0, ∞)` when it is singular at the origin.
pub trait Potential {
    fn value(&self, x: f64) -> f64;

    fn half_line(&self) -> bool {
        false
    }
}

impl Potential for QesModel {
    fn value(&self, x: f64) -> f64 {
        self.potential(x)
    }

    fn half_line(&self) -> bool {
        self.has_barrier()
    }
}

/// Adapter for a closure on the whole line.
pub struct FnPotential<F>(pub F);

impl<F: Fn(f64) -> f64> Potential for FnPotential<F> {
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Box half-width, or the box length on the half-line.
    pub length: f64,
    /// Interior points.
    pub points: usize,
    pub h: f64,
    pub half_line: bool,
}

impl Grid {
    pub fn new(length: f64, points: usize, half_line: bool) -> Result<Self, ReferenceError> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(ReferenceError::InvalidGrid("L must be positive and finite"));
        }
        if points < 3 {
            return Err(ReferenceError::InvalidGrid("N must be at least 3"));
        }
        let span = if half_line { length } else { 2.0 * length };
        Ok(Self {
            length,
            points,
            h: span / (points + 1) as f64,
            half_line,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        let start = if self.half_line { 0.0 } else { -self.length };
        start + (i + 1) as f64 * self.h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagSystem {
    pub diagonal: Vec<f64>,
    pub off_diagonal: f64,
    pub grid: Grid,
}

pub fn discretize<P: Potential + ?Sized>(potential: &P, length: f64, points: usize) -> Result<TridiagSystem, ReferenceError> {
    let grid = Grid::new(length, points, potential.half_line())?;
    let h2 = grid.h * grid.h;
    let diagonal = (0..points).map(|i| 2.0 / h2 + potential.value(grid.x(i))).collect();
    Ok(TridiagSystem {
        diagonal,
        off_diagonal: -1.0 / h2,
        grid,
    })
}

impl TridiagSystem {
    /// Number of eigenvalues strictly below `lambda` (negative pivots of `T - λI`).
    pub fn count_below(&self, lambda: f64) -> usize {
        let b2 = self.off_diagonal * self.off_diagonal;
        let tiny = f64::EPSILON * b2.sqrt().max(1.0);
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diagonal.iter().enumerate() {
            d = if i == 0 { a - lambda } else { a - lambda - b2 / d };
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off_diagonal.abs();
        let lo = self.diagonal.iter().fold(f64::INFINITY, |m, &a| m.min(a - r));
        let hi = self.diagonal.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a + r));
        (lo, hi)
    }

    /// Eigenvector for an eigenvalue estimate by shifted inverse iteration.
    pub fn inverse_iteration(&self, lambda: f64) -> Vec<f64> {
        let n = self.diagonal.len();
        let shift = lambda - 1e-9 * lambda.abs().max(1.0);
        let mut v = vec![1.0; n];
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    // Thomas algorithm for (T - shift I) y = rhs.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let b = self.off_diagonal;
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diagonal[0] - shift;
        c[0] = b / denom;
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diagonal[i] - shift - b * c[i - 1];
            if denom == 0.0 {
                denom = f64::EPSILON;
            }
            c[i] = b / denom;
            d[i] = (rhs[i] - b * d[i - 1]) / denom;
        }
        let mut y = vec![0.0; n];
        y[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = d[i] - c[i] * y[i + 1];
        }
        y
    }
}

/// Sign changes of a vector, ignoring entries below `1e-8` of its largest magnitude.
pub fn sign_changes(v: &[f64]) -> usize {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut changes = 0;
    for &x in v.iter().filter(|x| x.abs() > 1e-8 * peak) {
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = x;
    }
    changes
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSpectrum {
    /// Index `k` holds the level with `k` interior nodes.
    pub eigenvalues: Vec<f64>,
    pub grid: Grid,
    /// Grid of the coarse partner when this spectrum is extrapolated.
    pub coarse_grid: Option<Grid>,
    /// Eigenvector sign changes for the first few indices.
    pub node_checks: Vec<usize>,
}

impl ReferenceSpectrum {
    pub fn labels_verified(&self) -> bool {
        self.node_checks.iter().enumerate().all(|(k, &n)| n == k)
    }
}

pub fn eigenvalues_bisect(sys: &TridiagSystem, k_max: usize, tol: f64) -> Result<ReferenceSpectrum, ReferenceError> {
    let size = sys.diagonal.len();
    if k_max > size {
        return Err(ReferenceError::TooManyEigenvalues { requested: k_max, size });
    }
    if !(tol > 0.0) {
        return Err(ReferenceError::InvalidGrid("tolerance must be positive"));
    }
    let (glo, ghi) = sys.gershgorin();
    let mut eigenvalues = Vec::with_capacity(k_max);
    for k in 0..k_max {
        // smallest λ with more than k eigenvalues below it
        let (mut lo, mut hi) = (eigenvalues.last().map_or(glo, |&e: &f64| e - tol), ghi);
        let mut iterations = 0;
        while hi - lo > tol {
            iterations += 1;
            if iterations > MAX_BISECTIONS {
                return Err(ReferenceError::ConvergenceFailure { index: k });
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sys.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        eigenvalues.push(0.5 * (lo + hi));
    }
    let node_checks = eigenvalues
        .iter()
        .take(NODE_CHECK_LEVELS)
        .map(|&e| sign_changes(&sys.inverse_iteration(e)))
        .collect();
    Ok(ReferenceSpectrum {
        eigenvalues,
        grid: sys.grid,
        coarse_grid: None,
        node_checks,
    })
}

/// Per-level `(4 E_fine - E_coarse) / 3` on nested grids (`N_fine = 2 N_coarse + 1`).
pub fn richardson_refine(coarse: &ReferenceSpectrum, fine: &ReferenceSpectrum) -> Result<ReferenceSpectrum, ReferenceError> {
    if coarse == fine {
        return Ok(fine.clone());
    }
    let (c, f) = (&coarse.grid, &fine.grid);
    if c.length != f.length || c.half_line != f.half_line {
        return Err(ReferenceError::GridMismatch("boxes differ".into()));
    }
    if f.points != 2 * c.points + 1 {
        return Err(ReferenceError::GridMismatch(format!(
            "fine grid has {} points, nested refinement of {} needs {}",
            f.points,
            c.points,
            2 * c.points + 1
        )));
    }
    if coarse.eigenvalues.len() != fine.eigenvalues.len() {
        return Err(ReferenceError::GridMismatch("eigenvalue counts differ".into()));
    }
    let eigenvalues = coarse
        .eigenvalues
        .iter()
        .zip(&fine.eigenvalues)
        .map(|(ec, ef)| (4.0 * ef - ec) / 3.0)
        .collect();
    Ok(ReferenceSpectrum {
        eigenvalues,
        grid: fine.grid,
        coarse_grid: Some(coarse.grid),
        node_checks: fine.node_checks.clone(),
    })
}

/// Coarse solve at `(L, N)`, fine solve at `(L, 2N + 1)`, then extrapolate.
pub fn reference_spectrum<P: Potential + ?Sized>(
    potential: &P,
    length: f64,
    points: usize,
    count: usize,
    tol: f64,
) -> Result<ReferenceSpectrum, ReferenceError> {
    let coarse = eigenvalues_bisect(&discretize(potential, length, points)?, count, tol)?;
    let fine = eigenvalues_bisect(&discretize(potential, length, 2 * points + 1)?, count, tol)?;
    richardson_refine(&coarse, &fine)
}
