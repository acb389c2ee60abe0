//! Seeded random test-case factory.
//!
//! Four constructions, all deterministic functions of a recipe:
//!
//! * consistent-by-witness: draw G and X₀, set h = G·X₀, so X₀ itself
//!   proves feasibility;
//! * transformed: additionally draw A (l×m) and an invertible B (n×n) and
//!   emit G′ = A·G·B, h′ = A·(G·X₀), with witness B⁻¹X₀;
//! * interior: subtract a positive margin vector from h, pushing the
//!   witness strictly inside the region;
//! * likely-infeasible: add a large positive shift to h; no witness, and
//!   no guarantee; small instances can be adjudicated exactly.
//!
//! Reproducibility contract: a case's content stream is ChaCha8 seeded by
//! a single 64-bit value, and campaign case seeds are derived from
//! (master seed, case index) through the 64-bit finalizer in [`mix64`].
//! Neither thread count nor generation order can change what case N is.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{is_invertible, ls_solve_subset, DenseError, Matrix, Vector, DEFAULT_PIVOT_TOL};
use crate::solver::LdpProblem;

/// SplitMix64 output function: a bijective 64-bit finalizer with good
/// avalanche behavior, used to derive per-case seeds.
pub fn mix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for case `index` of a campaign with the given master seed.
pub fn case_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index))
}

/// Which construction produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseKind {
    ConsistentWitness,
    ConsistentInterior,
    LikelyInfeasible,
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CaseKind::ConsistentWitness => "consistent-witness",
            CaseKind::ConsistentInterior => "consistent-interior",
            CaseKind::LikelyInfeasible => "likely-infeasible",
        };
        f.write_str(name)
    }
}

/// Full description of one random case; a pure function of these fields
/// produces the case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecipe {
    pub m: usize,
    pub n: usize,
    /// Row count of the emitted problem when `use_transform` is set.
    pub l: usize,
    /// Entry scale for G, A, and B draws.
    pub scale_g: f64,
    /// Entry scale for the witness draw.
    pub scale_x0: f64,
    /// How many columns of the drawn G are forced to exactly zero.
    pub zero_col_count: usize,
    /// Positive per-row margin subtracted from h (interior construction).
    pub margin: Option<Vector>,
    /// Positive per-row shift added to h (likely-infeasible construction).
    pub shift: Option<Vector>,
    pub use_transform: bool,
    pub seed: u64,
}

impl CaseRecipe {
    /// A plain consistent-witness recipe at the default scales.
    pub fn base(m: usize, n: usize, seed: u64) -> CaseRecipe {
        CaseRecipe {
            m,
            n,
            l: 0,
            scale_g: 100.0,
            scale_x0: 1000.0,
            zero_col_count: 0,
            margin: None,
            shift: None,
            use_transform: false,
            seed,
        }
    }

    /// Rows of the problem this recipe emits.
    pub fn emitted_rows(&self) -> usize {
        if self.use_transform {
            self.l
        } else {
            self.m
        }
    }

    pub fn validate(&self) -> Result<(), CaseGenError> {
        let fail = |msg: String| Err(CaseGenError::InvalidRecipe(msg));
        if self.m == 0 || self.n == 0 {
            return fail(format!(
                "m and n must be positive, got {}×{}",
                self.m, self.n
            ));
        }
        if !(self.scale_g.is_finite() && self.scale_g >= 0.0) {
            return fail(format!(
                "scale_g must be finite and nonnegative, got {}",
                self.scale_g
            ));
        }
        if !(self.scale_x0.is_finite() && self.scale_x0 >= 0.0) {
            return fail(format!(
                "scale_x0 must be finite and nonnegative, got {}",
                self.scale_x0
            ));
        }
        if self.zero_col_count >= self.n {
            return fail(format!(
                "zero_col_count {} must leave at least one nonzero column of {}",
                self.zero_col_count, self.n
            ));
        }
        if self.use_transform && self.l == 0 {
            return fail("transformed recipes need l >= 1".into());
        }
        if self.margin.is_some() && self.shift.is_some() {
            return fail("margin and shift are mutually exclusive".into());
        }
        let rows = self.emitted_rows();
        for (name, v) in [("margin", &self.margin), ("shift", &self.shift)] {
            if let Some(v) = v {
                if v.len() != rows {
                    return fail(format!(
                        "{name} has {} entries but the emitted problem has {rows} rows",
                        v.len()
                    ));
                }
                if let Some(bad) = v.iter().find(|&&e| e <= 0.0) {
                    return fail(format!("{name} entries must be positive, found {bad}"));
                }
            }
        }
        Ok(())
    }
}

/// The matrices drawn from the recipe's stream, before assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDraw {
    pub g: Matrix,
    pub x0: Vector,
    pub a: Option<Matrix>,
    pub b: Option<Matrix>,
}

/// One generated case, with everything needed to replay or audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecord {
    pub problem: LdpProblem,
    pub recipe: CaseRecipe,
    /// A point known feasible by construction, in emitted coordinates.
    pub witness: Option<Vector>,
    pub kind: CaseKind,
    pub raw: RawDraw,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaseGenError {
    InvalidRecipe(String),
    /// 100 consecutive B draws were singular; the generator setup is broken.
    RegenerationLimit,
    /// Assembled values failed container validation (overflow to non-finite).
    Construction(DenseError),
}

impl fmt::Display for CaseGenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseGenError::InvalidRecipe(msg) => write!(f, "invalid recipe: {msg}"),
            CaseGenError::RegenerationLimit => {
                write!(f, "gave up after 100 singular B draws")
            }
            CaseGenError::Construction(e) => write!(f, "case assembly failed: {e}"),
        }
    }
}

impl std::error::Error for CaseGenError {}

impl From<DenseError> for CaseGenError {
    fn from(e: DenseError) -> Self {
        CaseGenError::Construction(e)
    }
}

const B_REDRAW_LIMIT: usize = 100;

/// Draw the raw matrices for a recipe. The draw order (G row-major, then
/// zero-column choice, then X₀, then A, then B with redraws) is part of
/// the reproducibility contract; every draw happens even when a scale of
/// zero makes its result constant.
pub fn draw_raw(recipe: &CaseRecipe) -> Result<RawDraw, CaseGenError> {
    recipe.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let (m, n) = (recipe.m, recipe.n);

    let mut g_rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| recipe.scale_g * rng.gen_range(-1.0..1.0))
                .collect()
        })
        .collect();

    // Partial Fisher-Yates over column indices; draws come from the same
    // stream, one u64 per chosen column.
    let mut cols: Vec<usize> = (0..n).collect();
    for k in 0..recipe.zero_col_count {
        let span = (n - k) as u64;
        let j = k + (rng.next_u64() % span) as usize;
        cols.swap(k, j);
    }
    for &c in &cols[..recipe.zero_col_count] {
        for row in g_rows.iter_mut() {
            row[c] = 0.0;
        }
    }
    let g = Matrix::from_rows(&g_rows)?;

    let x0 = Vector::new(
        (0..n)
            .map(|_| recipe.scale_x0 * rng.gen_range(-1.0..1.0))
            .collect::<Vec<_>>(),
    )?;

    let (a, b) = if recipe.use_transform {
        let a_rows: Vec<Vec<f64>> = (0..recipe.l)
            .map(|_| {
                (0..m)
                    .map(|_| recipe.scale_g * rng.gen_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        let a = Matrix::from_rows(&a_rows)?;
        let mut b = None;
        for _ in 0..B_REDRAW_LIMIT {
            let b_rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| recipe.scale_g * rng.gen_range(-1.0..1.0))
                        .collect()
                })
                .collect();
            let candidate = Matrix::from_rows(&b_rows)?;
            if is_invertible(&candidate, DEFAULT_PIVOT_TOL) {
                b = Some(candidate);
                break;
            }
        }
        match b {
            Some(b) => (Some(a), Some(b)),
            None => return Err(CaseGenError::RegenerationLimit),
        }
    } else {
        (None, None)
    };

    Ok(RawDraw { g, x0, a, b })
}

/// Assemble the emitted problem from a raw draw. Split from [`draw_raw`]
/// so tests can substitute fixed matrices (e.g. identity transforms) and
/// compare pipelines.
pub fn assemble(recipe: &CaseRecipe, raw: &RawDraw) -> Result<CaseRecord, CaseGenError> {
    recipe.validate()?;
    let h_base = raw.g.mat_vec(&raw.x0);

    let (g_emit, h_emit, witness) = if recipe.use_transform {
        let a = raw.a.as_ref().ok_or_else(|| {
            CaseGenError::InvalidRecipe("transform recipe without drawn A".into())
        })?;
        let b = raw.b.as_ref().ok_or_else(|| {
            CaseGenError::InvalidRecipe("transform recipe without drawn B".into())
        })?;
        let g_prime = a.mat_mul(&raw.g).mat_mul(b);
        let h_prime = a.mat_vec(&h_base);
        let all_cols: Vec<usize> = (0..recipe.n).collect();
        let w = ls_solve_subset(b, &raw.x0, &all_cols).expect("B passed the invertibility check");
        (g_prime, h_prime, w)
    } else {
        (raw.g.clone(), h_base, raw.x0.clone())
    };

    let (h_final, witness, kind) = if let Some(c) = &recipe.margin {
        let shifted = Vector::new(
            (0..h_emit.len())
                .map(|i| h_emit[i] - c[i])
                .collect::<Vec<_>>(),
        )?;
        (shifted, Some(witness), CaseKind::ConsistentInterior)
    } else if let Some(d) = &recipe.shift {
        let shifted = Vector::new(
            (0..h_emit.len())
                .map(|i| h_emit[i] + d[i])
                .collect::<Vec<_>>(),
        )?;
        (shifted, None, CaseKind::LikelyInfeasible)
    } else {
        (h_emit, Some(witness), CaseKind::ConsistentWitness)
    };

    let problem = LdpProblem::new(g_emit, h_final)?;
    Ok(CaseRecord {
        problem,
        recipe: recipe.clone(),
        witness,
        kind,
        raw: raw.clone(),
    })
}

fn generate(recipe: &CaseRecipe) -> Result<CaseRecord, CaseGenError> {
    let raw = draw_raw(recipe)?;
    assemble(recipe, &raw)
}

/// Consistent-by-witness construction: `h = G·X₀` makes X₀ feasible.
pub fn gen_consistent(recipe: &CaseRecipe) -> Result<CaseRecord, CaseGenError> {
    require(
        !recipe.use_transform && recipe.margin.is_none() && recipe.shift.is_none(),
        "gen_consistent takes a recipe without transform, margin, or shift",
    )?;
    generate(recipe)
}

/// Transformed construction: emit `(A·G·B, A·G·X₀)` with witness `B⁻¹X₀`.
pub fn gen_transformed(recipe: &CaseRecipe) -> Result<CaseRecord, CaseGenError> {
    require(
        recipe.use_transform && recipe.margin.is_none() && recipe.shift.is_none(),
        "gen_transformed needs use_transform and no margin or shift",
    )?;
    generate(recipe)
}

/// Interior construction: subtract the positive margin from h.
pub fn gen_interior(recipe: &CaseRecipe) -> Result<CaseRecord, CaseGenError> {
    require(
        recipe.margin.is_some() && recipe.shift.is_none(),
        "gen_interior needs a margin vector and no shift",
    )?;
    generate(recipe)
}

/// Likely-infeasible construction: add the positive shift to h. The name
/// is honest: infeasibility is probable, not guaranteed.
pub fn gen_likely_infeasible(recipe: &CaseRecipe) -> Result<CaseRecord, CaseGenError> {
    require(
        recipe.shift.is_some() && recipe.margin.is_none(),
        "gen_likely_infeasible needs a shift vector and no margin",
    )?;
    generate(recipe)
}

fn require(cond: bool, msg: &str) -> Result<(), CaseGenError> {
    if cond {
        Ok(())
    } else {
        Err(CaseGenError::InvalidRecipe(msg.into()))
    }
}
