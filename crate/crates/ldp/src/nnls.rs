//! Active-set solver for nonnegative least squares:
//! minimize ‖E·u − f‖₂ subject to u ≥ 0.
//!
//! The algorithm maintains a positive set P and a zero set Z. Each outer
//! pass computes the dual gradient, brings the most attractive zero-set
//! column into P, and re-solves the unconstrained subproblem on P. When a
//! re-solve drives a positive variable nonpositive, an interpolation step
//! walks back along the segment from the current iterate until the first
//! variable hits its bound, clamps it to exactly zero, and retries on the
//! smaller set. Candidates whose trial coefficient comes out nonpositive
//! (or whose column is numerically dependent on P) are skipped for the
//! rest of the pass instead of aborting the solve.

use std::fmt;

use crate::dense::{ls_solve_subset, DenseError, Matrix, Vector};
use crate::verify::ToleranceConfig;

/// Input to [`nnls_solve`]: a p×q design matrix and a length-p target.
#[derive(Debug, Clone, PartialEq)]
pub struct NnlsProblem {
    pub e: Matrix,
    pub f: Vector,
}

impl NnlsProblem {
    pub fn new(e: Matrix, f: Vector) -> Result<Self, DenseError> {
        if f.len() != e.rows() {
            return Err(DenseError::ShapeMismatch {
                expected: e.rows(),
                got: f.len(),
            });
        }
        Ok(NnlsProblem { e, f })
    }
}

/// Solution of an NNLS instance together with its optimality evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct NnlsResult {
    /// Nonnegative solution; zero-set entries are exactly `0.0`.
    pub u: Vector,
    /// Residual `E·u − f`, recomputed from the final `u`.
    pub r: Vector,
    /// `‖r‖₂` of the recomputed residual.
    pub rnorm: f64,
    /// Indices with `u[j] > 0`, ascending.
    pub positive_set: Vec<usize>,
    /// Gradient `g = Eᵀ(E·u − f)`. At optimum `g[j] >= -τ_w·scale`
    /// everywhere and `|g[j]| <= τ_w·scale` on the positive set.
    pub dual: Vector,
    /// Number of least-squares subproblems solved.
    pub iterations: usize,
    /// Number of bound-restoring interpolation steps taken.
    pub inner_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NnlsError {
    /// The active-set loop hit its iteration cap. Carries the best iterate
    /// so callers can report diagnostics; it is not a verified optimum.
    IterationLimit { best: Box<NnlsResult> },
}

impl fmt::Display for NnlsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NnlsError::IterationLimit { best } => write!(
                f,
                "nnls iteration limit reached after {} subproblem solves (rnorm {:.6e})",
                best.iterations, best.rnorm
            ),
        }
    }
}

impl std::error::Error for NnlsError {}

/// Solve min ‖E·u − f‖₂ s.t. u ≥ 0.
///
/// Terminates when every zero-set gradient entry clears the scaled dual
/// tolerance `cfg.tau_w · (‖Eᵀf‖∞ + 1)`. The entering column is the one
/// with the steepest descent direction; ties go to the lowest index, so
/// results are deterministic. The subproblem-solve budget defaults to
/// three times the column count.
pub fn nnls_solve(prob: &NnlsProblem, cfg: &ToleranceConfig) -> Result<NnlsResult, NnlsError> {
    let q = prob.e.cols();
    let max_iterations = cfg.max_iterations.unwrap_or(3 * q);
    let scale = prob.e.transpose_mat_vec(&prob.f).norm_inf() + 1.0;
    let threshold = cfg.tau_w * scale;

    let mut u = vec![0.0f64; q];
    let mut in_positive = vec![false; q];
    let mut positive: Vec<usize> = Vec::new();
    let mut iterations = 0usize;
    let mut inner_iterations = 0usize;

    'outer: loop {
        // Dual gradient of ½‖Eu − f‖² is Eᵀ(Eu − f); w is its negation, so
        // w[j] > 0 means adding mass to u[j] reduces the residual.
        let w = negative_gradient(prob, &u);
        // Candidates rejected in this pass (dependent column or nonpositive
        // trial coefficient) stay out until u changes and w is recomputed.
        let mut rejected = vec![false; q];

        let mut z: Vec<f64>;
        loop {
            let mut entering: Option<usize> = None;
            for j in 0..q {
                if in_positive[j] || rejected[j] || w[j] <= threshold {
                    continue;
                }
                // Strict comparison keeps the lowest index on ties.
                if entering.is_none_or(|best| w[j] > w[best]) {
                    entering = Some(j);
                }
            }
            let t = match entering {
                Some(t) => t,
                None => break 'outer,
            };

            positive.push(t);
            match bounded_solve(prob, &positive, &mut iterations, max_iterations) {
                Ok(Some(trial)) if *trial.last().expect("positive set nonempty") > 0.0 => {
                    in_positive[t] = true;
                    z = trial;
                    break;
                }
                Ok(Some(_)) | Ok(None) => {
                    positive.pop();
                    rejected[t] = true;
                }
                Err(()) => {
                    positive.pop();
                    return Err(iteration_limit(prob, &u, iterations, inner_iterations));
                }
            }
        }

        // Walk back toward the previous iterate until every coefficient on
        // the positive set is strictly positive again.
        while z.iter().any(|&zj| zj <= 0.0) {
            inner_iterations += 1;
            let mut alpha = f64::INFINITY;
            for (k, &j) in positive.iter().enumerate() {
                if z[k] <= 0.0 {
                    let ratio = u[j] / (u[j] - z[k]);
                    let ratio = if ratio.is_nan() { 0.0 } else { ratio };
                    alpha = alpha.min(ratio);
                }
            }
            for (k, &j) in positive.iter().enumerate() {
                u[j] += alpha * (z[k] - u[j]);
            }
            let mut survivors = Vec::with_capacity(positive.len());
            for (k, &j) in positive.iter().enumerate() {
                // Variables at the end of the step land on their bound up
                // to rounding; clamp so zero-set entries are exactly zero.
                if u[j] <= 0.0 || (z[k] <= 0.0 && u[j] / (u[j] - z[k]) <= alpha) {
                    u[j] = 0.0;
                    in_positive[j] = false;
                } else {
                    survivors.push(j);
                }
            }
            positive = survivors;
            if positive.is_empty() {
                // Every variable returned to its bound; pick a fresh
                // candidate from the recomputed gradient.
                continue 'outer;
            }
            match bounded_solve(prob, &positive, &mut iterations, max_iterations) {
                Ok(Some(resolved)) => z = resolved,
                Ok(None) => {
                    unreachable!("nnls: subset of an accepted column set reported rank deficiency")
                }
                Err(()) => {
                    return Err(iteration_limit(prob, &u, iterations, inner_iterations));
                }
            }
        }
        for (k, &j) in positive.iter().enumerate() {
            u[j] = z[k];
        }
    }

    Ok(assemble(prob, &u, iterations, inner_iterations))
}

/// One least-squares subproblem, counted against the iteration budget.
/// `Err(())` means the budget is exhausted; `Ok(None)` means the column
/// subset is numerically rank-deficient.
fn bounded_solve(
    prob: &NnlsProblem,
    cols: &[usize],
    iterations: &mut usize,
    max_iterations: usize,
) -> Result<Option<Vec<f64>>, ()> {
    if *iterations >= max_iterations {
        return Err(());
    }
    *iterations += 1;
    match ls_solve_subset(&prob.e, &prob.f, cols) {
        Ok(z) => Ok(Some(z.into_vec())),
        Err(_) => Ok(None),
    }
}

fn negative_gradient(prob: &NnlsProblem, u: &[f64]) -> Vector {
    let uv = Vector::new(u.to_vec()).expect("iterate entries stay finite");
    let eu = prob.e.mat_vec(&uv);
    let diff = Vector::new((0..prob.f.len()).map(|i| prob.f[i] - eu[i]).collect())
        .expect("residual entries stay finite");
    prob.e.transpose_mat_vec(&diff)
}

fn iteration_limit(
    prob: &NnlsProblem,
    u: &[f64],
    iterations: usize,
    inner_iterations: usize,
) -> NnlsError {
    NnlsError::IterationLimit {
        best: Box::new(assemble(prob, u, iterations, inner_iterations)),
    }
}

fn assemble(
    prob: &NnlsProblem,
    u: &[f64],
    iterations: usize,
    inner_iterations: usize,
) -> NnlsResult {
    let uv = Vector::new(u.to_vec()).expect("solution entries stay finite");
    let eu = prob.e.mat_vec(&uv);
    let r = Vector::new((0..prob.f.len()).map(|i| eu[i] - prob.f[i]).collect())
        .expect("residual entries stay finite");
    let rnorm = r.norm2();
    let dual = prob.e.transpose_mat_vec(&r);
    let positive_set = (0..u.len()).filter(|&j| u[j] > 0.0).collect();
    NnlsResult {
        u: uv,
        r,
        rnorm,
        positive_set,
        dual,
        iterations,
        inner_iterations,
    }
}
