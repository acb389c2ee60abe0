//! Brute-force minimum-norm oracle for small constraint systems.
//!
//! The minimum-norm point of `{x : Gx ≥ h}` lies on some face: it is the
//! least-squares-minimal solution of `G_S x = h_S` for the set S of rows
//! active at the optimum. This oracle enumerates every candidate active
//! set, solves the corresponding normal equations in exact rational
//! arithmetic, and keeps the shortest candidate that verifies as feasible.
//! It shares no code path with the production solver, which is the point.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::rational::{
    rational_feasible, rational_from_f64, solve_exact, OracleError, RationalVerdict,
};
use crate::dense::Vector;
use crate::solver::LdpProblem;
use crate::verify::{verify_feasible, ToleranceConfig};

pub const BRUTEFORCE_MAX_M: usize = 8;
pub const BRUTEFORCE_MAX_N: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum MinNormVerdict {
    Solved { x: Vector, norm: f64 },
    Infeasible,
}

/// Exhaustively find the minimum-norm feasible point, or certify that no
/// candidate exists and the system is infeasible.
///
/// Candidates are screened with a feasibility tolerance of 1e−10, tighter
/// than the production default, so a candidate that merely scrapes by
/// cannot displace the true optimum. Infeasibility is only ever reported
/// after the exact rational oracle confirms it; if that oracle says
/// feasible while no candidate passed, something is broken and the error
/// says so loudly.
// x_c sums g[subset[a]][c] over the active set; the index form is the formula.
#[allow(clippy::needless_range_loop)]
pub fn bruteforce_min_norm(prob: &LdpProblem) -> Result<MinNormVerdict, OracleError> {
    let (m, n) = (prob.m(), prob.n());
    if m > BRUTEFORCE_MAX_M || n > BRUTEFORCE_MAX_N {
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

    let screen = ToleranceConfig {
        tau_feas: 1e-10,
        ..ToleranceConfig::default()
    };
    let mut best: Option<(Vector, f64)> = None;
    let consider = |x: Vector, best: &mut Option<(Vector, f64)>| {
        if verify_feasible(prob, &x, &screen).passed {
            let norm = x.norm2();
            if best.as_ref().is_none_or(|(_, b)| norm < *b) {
                *best = Some((x, norm));
            }
        }
    };

    // The unconstrained minimizer: optimal whenever it is feasible.
    consider(Vector::zeros(n), &mut best);

    for mask in 1u32..(1 << m) {
        if mask.count_ones() as usize > n {
            continue;
        }
        let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let k = subset.len();
        // Normal matrix of the face: K[a][b] = ⟨G_{S[a]}, G_{S[b]}⟩.
        let mut normal = vec![vec![BigRational::zero(); k]; k];
        for a in 0..k {
            for b in 0..k {
                let mut acc = BigRational::zero();
                for (ga, gb) in g[subset[a]].iter().zip(&g[subset[b]]) {
                    acc += ga * gb;
                }
                normal[a][b] = acc;
            }
        }
        let rhs: Vec<BigRational> = subset.iter().map(|&i| h[i].clone()).collect();
        let Some(y) = solve_exact(&normal, &rhs) else {
            continue; // dependent rows; an independent subset covers this face
        };
        let mut x = Vec::with_capacity(n);
        let mut finite = true;
        for c in 0..n {
            let mut acc = BigRational::zero();
            for (a, ya) in y.iter().enumerate() {
                acc += &g[subset[a]][c] * ya;
            }
            match acc.to_f64() {
                Some(v) if v.is_finite() => x.push(v),
                _ => {
                    finite = false;
                    break;
                }
            }
        }
        if finite {
            consider(Vector::new(x).expect("finiteness checked"), &mut best);
        }
    }

    match best {
        Some((x, norm)) => Ok(MinNormVerdict::Solved { x, norm }),
        None => match rational_feasible(prob)? {
            RationalVerdict::Infeasible => Ok(MinNormVerdict::Infeasible),
            RationalVerdict::Feasible { .. } => Err(OracleError::Inconsistent(format!(
                "system is exactly feasible but no face candidate passed \
                 verification (m={m}, n={n})"
            ))),
        },
    }
}
