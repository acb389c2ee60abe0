//! Least distance programming with verified answers.
//!
//! The central operation is [`ldp_solve`]: find the minimum-norm point of
//! a linear inequality system `Gx ≥ h`, or report that no point exists.
//! The solver never takes its own word for it: every answer is re-checked
//! by an independent feasibility test and a multiplier certificate before
//! it is returned, and everything it computed along the way stays
//! available for inspection.
//!
//! Around that core:
//!
//! * [`dense`]: the small dense linear algebra kernel (generic over the
//!   scalar, so the same containers carry exact rationals);
//! * [`nnls`]: the nonnegative least-squares engine the reduction runs on;
//! * [`verify`]: feasibility reports, optimality certificates, and the
//!   exact rational and brute-force oracles used to audit the solver;
//! * [`casegen`]: the seeded random case factory for fuzzing campaigns.

pub mod casegen;
pub mod dense;
pub mod nnls;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use dense::{Matrix, Vector};
pub use nnls::{nnls_solve, NnlsError, NnlsProblem, NnlsResult};
pub use solver::{
    ldp_reduce, ldp_solve, LdpInternals, LdpOutcome, LdpProblem, LdpStatus, LdpVerdict,
};
pub use verify::{kkt_check, verify_feasible, KktCertificate, ToleranceConfig, VerificationReport};

/// Matrix of exact rationals, for oracle-side arithmetic.
pub type RationalMatrix = dense::Matrix<num_rational::BigRational>;
/// Vector of exact rationals.
pub type RationalVector = dense::Vector<num_rational::BigRational>;
