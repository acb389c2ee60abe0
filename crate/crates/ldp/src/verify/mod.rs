//! Answer verification: scaled feasibility checks, KKT certificates, and
//! the independent oracles (exact rational feasibility, brute-force
//! minimum-norm search) used to cross-examine the solver.

mod bruteforce;
mod rational;

pub use bruteforce::{bruteforce_min_norm, MinNormVerdict, BRUTEFORCE_MAX_M, BRUTEFORCE_MAX_N};
pub use rational::{
    feasible_exact, rational_feasible, rational_from_f64, OracleError, RationalVerdict,
    RATIONAL_MAX_M, RATIONAL_MAX_N,
};

use std::fmt;

use crate::dense::Vector;
use crate::solver::LdpProblem;

/// Tolerances for the solve/verify pipeline. All values are strictly
/// between 0 and 1; `validate` enforces that for caller-supplied configs.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceConfig {
    /// Scaled feasibility acceptance: row i passes when
    /// `h_i - (Gx)_i <= tau_feas * scale_i`.
    pub tau_feas: f64,
    /// Dual tolerance inside the nonnegative least-squares loop, applied
    /// against `‖Eᵀf‖∞ + 1`.
    pub tau_w: f64,
    /// Pivot magnitude below which the reconstruction divide is suspect.
    pub tau_div: f64,
    /// KKT certificate acceptance.
    pub tau_kkt: f64,
    /// Iteration cap for the active-set loop; `None` means three times the
    /// column count.
    pub max_iterations: Option<usize>,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            tau_feas: 1e-8,
            tau_w: 1e-11,
            tau_div: 1e-10,
            tau_kkt: 1e-7,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid tolerance config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("tau_feas", self.tau_feas),
            ("tau_w", self.tau_w),
            ("tau_div", self.tau_div),
            ("tau_kkt", self.tau_kkt),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(ConfigError(format!("{name} must be in (0, 1), got {v}")));
            }
        }
        if let Some(0) = self.max_iterations {
            return Err(ConfigError("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Row-by-row feasibility report for a candidate point.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// `h_i - (Gx)_i` per row; positive means the row is violated.
    pub violations: Vector,
    /// Largest violation (may be negative when every row holds with margin).
    pub max_violation: f64,
    /// Zero-based index of the row attaining `max_violation`.
    pub worst_row: usize,
    /// Per-row scales `max(1, |h_i|, ‖G_i‖₂·‖x‖₂)`.
    pub scales: Vector,
    /// True iff every row satisfies `violation_i <= tau_feas * scale_i`.
    pub passed: bool,
    /// The candidate the report judges.
    pub candidate_x: Vector,
}

/// Check `G x >= h` with per-row relative scaling. Never mutates anything
/// and depends only on its arguments.
pub fn verify_feasible(prob: &LdpProblem, x: &Vector, cfg: &ToleranceConfig) -> VerificationReport {
    assert_eq!(x.len(), prob.n(), "verify_feasible: x has wrong dimension");
    let gx = prob.g().mat_vec(x);
    let xnorm = x.norm2();
    let m = prob.m();
    let mut violations = Vec::with_capacity(m);
    let mut scales = Vec::with_capacity(m);
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst_row = 0;
    let mut passed = true;
    for i in 0..m {
        let v = prob.h()[i] - gx[i];
        let scale = 1.0f64
            .max(prob.h()[i].abs())
            .max(prob.g().row_norm2(i) * xnorm);
        if v > cfg.tau_feas * scale {
            passed = false;
        }
        if v > max_violation {
            max_violation = v;
            worst_row = i;
        }
        violations.push(v);
        scales.push(scale);
    }
    VerificationReport {
        violations: Vector::new(violations).expect("violations stay finite"),
        max_violation,
        worst_row,
        scales: Vector::new(scales).expect("scales stay finite"),
        passed,
        candidate_x: x.clone(),
    }
}

/// KKT certificate for a candidate solution: multipliers plus the measured
/// stationarity, complementarity, and sign residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct KktCertificate {
    pub lambda: Vector,
    /// `‖x - Gᵀλ‖∞`.
    pub stationarity_residual: f64,
    /// `max_i |λ_i ((Gx)_i - h_i)|`.
    pub complementarity_residual: f64,
    pub lambda_min: f64,
    /// True iff all three residual bounds hold at `tau_kkt`.
    pub valid: bool,
}

/// Evaluate the optimality certificate `x = Gᵀλ, λ >= 0, λ ⟂ (Gx - h)`.
pub fn kkt_check(
    prob: &LdpProblem,
    x: &Vector,
    lambda: &Vector,
    cfg: &ToleranceConfig,
) -> KktCertificate {
    assert_eq!(x.len(), prob.n(), "kkt_check: x has wrong dimension");
    assert_eq!(
        lambda.len(),
        prob.m(),
        "kkt_check: lambda has wrong dimension"
    );
    let gt_lambda = prob.g().transpose_mat_vec(lambda);
    let mut stationarity = 0.0f64;
    for j in 0..x.len() {
        stationarity = stationarity.max((x[j] - gt_lambda[j]).abs());
    }
    let gx = prob.g().mat_vec(x);
    let xnorm = x.norm2();
    let mut complementarity = 0.0f64;
    let mut lambda_min = f64::INFINITY;
    let mut max_scale = 1.0f64;
    for i in 0..prob.m() {
        complementarity = complementarity.max((lambda[i] * (gx[i] - prob.h()[i])).abs());
        lambda_min = lambda_min.min(lambda[i]);
        let scale = 1.0f64
            .max(prob.h()[i].abs())
            .max(prob.g().row_norm2(i) * xnorm);
        max_scale = max_scale.max(scale);
    }
    let xinf = x.norm_inf();
    let valid = lambda_min >= -cfg.tau_kkt
        && stationarity <= cfg.tau_kkt * (1.0 + xinf)
        && complementarity <= cfg.tau_kkt * (1.0 + xnorm * max_scale);
    KktCertificate {
        lambda: lambda.clone(),
        stationarity_residual: stationarity,
        complementarity_residual: complementarity,
        lambda_min,
        valid,
    }
}
