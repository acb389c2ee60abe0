//! Exact feasibility oracle over arbitrary-precision rationals.
//!
//! Every f64 is converted to the rational it denotes exactly (binary
//! doubles are dyadic rationals), so this module's verdicts are free of
//! rounding and can stand as ground truth against the floating-point
//! pipeline. Feasibility of `Gx ≥ h` is decided by a phase-1 simplex with
//! Bland's rule, which terminates on every input.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::solver::LdpProblem;

/// Guard rails: exact pivoting cost grows quickly, so refuse inputs larger
/// than the oracle is meant for.
pub const RATIONAL_MAX_M: usize = 64;
pub const RATIONAL_MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum RationalVerdict {
    /// The system admits a point; `witness` satisfies every row exactly.
    Feasible {
        witness: Vec<BigRational>,
    },
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// Input exceeds the size this oracle is built to handle honestly.
    DimensionTooLarge { m: usize, n: usize },
    /// The exact and floating-point pipelines disagree in a way that can
    /// only be a bug; the message says what was expected and what happened.
    Inconsistent(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::DimensionTooLarge { m, n } => write!(
                f,
                "oracle limit exceeded: {m}×{n} (max {RATIONAL_MAX_M}×{RATIONAL_MAX_N})"
            ),
            OracleError::Inconsistent(msg) => write!(f, "oracle inconsistency: {msg}"),
        }
    }
}

impl std::error::Error for OracleError {}

/// The exact rational value of a finite double. Panics on NaN or infinity;
/// validated containers never hold those.
pub fn rational_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite doubles convert exactly")
}

/// Decide feasibility of an LDP constraint system exactly.
pub fn rational_feasible(prob: &LdpProblem) -> Result<RationalVerdict, OracleError> {
    let (m, n) = (prob.m(), prob.n());
    if m > RATIONAL_MAX_M || n > RATIONAL_MAX_N {
        return Err(OracleError::DimensionTooLarge { m, n });
    }
    let g: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            prob.g()
                .row(i)
                .iter()
                .map(|&v| rational_from_f64(v))
                .collect()
        })
        .collect();
    let h: Vec<BigRational> = prob.h().iter().map(|&v| rational_from_f64(v)).collect();
    Ok(feasible_exact(&g, &h))
}

/// Exact feasibility of `Gx ≥ h` for rational data.
///
/// Phase-1 formulation: write x = x⁺ − x⁻ with x⁺, x⁻ ≥ 0, add a surplus
/// per row, and minimize the total artificial mass needed to meet the
/// right-hand side. Bland's smallest-index rule makes the walk finite.
// Elimination updates touch two rows of the same tableau; index loops stay.
#[allow(clippy::needless_range_loop)]
pub fn feasible_exact(g: &[Vec<BigRational>], h: &[BigRational]) -> RationalVerdict {
    let m = g.len();
    assert!(m >= 1, "feasibility needs at least one row");
    let n = g[0].len();
    assert!(
        g.iter().all(|row| row.len() == n),
        "ragged constraint matrix"
    );
    assert_eq!(h.len(), m, "one bound per row");

    // Column layout: x⁺ (n), x⁻ (n), surplus (m), then one artificial per
    // row whose bound is nonnegative. Rows with negative bounds are negated
    // so every right-hand side starts nonnegative; in a negated row the
    // surplus column carries +1 and serves as the initial basic variable.
    let num_structural = 2 * n + m;
    let mut artificial_col: Vec<Option<usize>> = vec![None; m];
    let mut num_cols = num_structural;
    for (i, hi) in h.iter().enumerate() {
        if !hi.is_negative() {
            artificial_col[i] = Some(num_cols);
            num_cols += 1;
        }
    }

    let zero = BigRational::zero();
    let one = BigRational::from_integer(1.into());
    let mut tableau: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for i in 0..m {
        let negate = h[i].is_negative();
        let sign = if negate { -one.clone() } else { one.clone() };
        let mut row = vec![zero.clone(); num_cols + 1];
        for j in 0..n {
            row[j] = &sign * &g[i][j];
            row[n + j] = -&row[j];
        }
        row[2 * n + i] = -&sign;
        row[num_cols] = &sign * &h[i];
        match artificial_col[i] {
            Some(c) => {
                row[c] = one.clone();
                basis.push(c);
            }
            None => basis.push(2 * n + i),
        }
        tableau.push(row);
    }

    let is_artificial = |col: usize| col >= num_structural;

    loop {
        // Reduced cost of structural column j under the phase-1 objective
        // (unit cost on artificials): the sum of its entries over rows
        // whose basic variable is artificial. Positive means entering j
        // can shed artificial mass.
        let mut entering = None;
        for j in 0..num_structural {
            if basis.contains(&j) {
                continue;
            }
            let mut sigma = zero.clone();
            for i in 0..m {
                if is_artificial(basis[i]) {
                    sigma += &tableau[i][j];
                }
            }
            if sigma.is_positive() {
                entering = Some(j);
                break; // smallest index, per Bland
            }
        }
        let Some(j) = entering else { break };

        let mut leaving: Option<usize> = None;
        for i in 0..m {
            if !tableau[i][j].is_positive() {
                continue;
            }
            let better = match leaving {
                None => true,
                Some(l) => {
                    let cur = &tableau[i][num_cols] / &tableau[i][j];
                    let best = &tableau[l][num_cols] / &tableau[l][j];
                    cur < best || (cur == best && basis[i] < basis[l])
                }
            };
            if better {
                leaving = Some(i);
            }
        }
        let Some(l) = leaving else {
            // The phase-1 objective is bounded below by zero, so an
            // unbounded ray here would mean the tableau lost an invariant.
            unreachable!("phase-1 simplex objective cannot be unbounded");
        };

        let pivot = tableau[l][j].clone();
        for v in tableau[l].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..m {
            if i == l || tableau[i][j].is_zero() {
                continue;
            }
            let factor = tableau[i][j].clone();
            for c in 0..=num_cols {
                let delta = &factor * &tableau[l][c];
                tableau[i][c] -= delta;
            }
        }
        basis[l] = j;
    }

    let mut objective = zero.clone();
    for i in 0..m {
        if is_artificial(basis[i]) {
            objective += &tableau[i][num_cols];
        }
    }
    if objective.is_positive() {
        return RationalVerdict::Infeasible;
    }

    let mut witness = vec![zero.clone(); n];
    for i in 0..m {
        let b = basis[i];
        if b < n {
            witness[b] += &tableau[i][num_cols];
        } else if b < 2 * n {
            witness[b - n] -= &tableau[i][num_cols];
        }
    }
    for (i, row) in g.iter().enumerate() {
        let lhs: BigRational = row
            .iter()
            .zip(&witness)
            .map(|(a, b)| a * b)
            .fold(zero.clone(), |acc, v| acc + v);
        assert!(
            lhs >= h[i],
            "exact witness violates row {i}: lhs {lhs} < rhs {}",
            h[i]
        );
    }
    RationalVerdict::Feasible { witness }
}

/// Solve a square rational system by exact Gaussian elimination. Returns
/// `None` when the matrix is singular.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve_exact(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = a.len();
    assert!(a.iter().all(|row| row.len() == k), "matrix must be square");
    assert_eq!(b.len(), k);
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    for col in 0..k {
        let pivot_row = (col..k).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot_row);
        let pivot = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v /= &pivot;
        }
        for r in 0..k {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=k {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    Some(m.into_iter().map(|row| row[k].clone()).collect())
}
