//! Deterministic construction of campaign cases.
//!
//! Every case is a pure function of (master seed, case index, knobs): the
//! per-case seed comes from `casegen::case_seed`, shape choices (kind,
//! dimensions, zero columns) are rolled from a ChaCha8 stream over that
//! seed, and the remaining stream feeds margin/shift draws. This is what
//! makes parallel campaigns reproduce serial ones case for case.

use ldp::casegen::{self, case_seed, CaseGenError, CaseRecipe, CaseRecord};
use ldp::dense::Vector;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// The four campaign constructions. `Consistent` and `Transformed` both
/// emit witness-backed records; they are tracked separately because the
/// transform changes the numerical character of the cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    Consistent,
    Transformed,
    Interior,
    Infeasible,
}

impl GenKind {
    pub const ALL: [GenKind; 4] = [
        GenKind::Consistent,
        GenKind::Transformed,
        GenKind::Interior,
        GenKind::Infeasible,
    ];

    pub fn label(self) -> &'static str {
        match self {
            GenKind::Consistent => "consistent",
            GenKind::Transformed => "transformed",
            GenKind::Interior => "interior",
            GenKind::Infeasible => "infeasible",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "consistent" => Ok(GenKind::Consistent),
            "transformed" => Ok(GenKind::Transformed),
            "interior" => Ok(GenKind::Interior),
            "infeasible" => Ok(GenKind::Infeasible),
            other => Err(format!(
                "unknown kind {other:?} (expected consistent|transformed|interior|infeasible)"
            )),
        }
    }
}

/// Percentage weights for rolling the kind of each fuzz case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixWeights {
    pub consistent: u32,
    pub transformed: u32,
    pub interior: u32,
    pub infeasible: u32,
}

impl Default for MixWeights {
    fn default() -> Self {
        MixWeights {
            consistent: 40,
            transformed: 20,
            interior: 20,
            infeasible: 20,
        }
    }
}

impl MixWeights {
    pub fn total(&self) -> u32 {
        self.consistent + self.transformed + self.interior + self.infeasible
    }
}

impl FromStr for MixWeights {
    type Err = String;

    /// Format: `consistent,transformed,interior,infeasible`, e.g. `40,20,20,20`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(format!("expected four comma-separated weights, got {s:?}"));
        }
        let mut w = [0u32; 4];
        for (slot, part) in w.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| format!("invalid weight {part:?}"))?;
        }
        let mix = MixWeights {
            consistent: w[0],
            transformed: w[1],
            interior: w[2],
            infeasible: w[3],
        };
        if mix.total() == 0 {
            return Err("mix weights must not all be zero".to_string());
        }
        Ok(mix)
    }
}

/// Inclusive dimension ranges for rolled cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimRanges {
    pub m_lo: usize,
    pub m_hi: usize,
    pub n_lo: usize,
    pub n_hi: usize,
}

impl Default for DimRanges {
    fn default() -> Self {
        DimRanges {
            m_lo: 1,
            m_hi: 12,
            n_lo: 1,
            n_hi: 6,
        }
    }
}

impl FromStr for DimRanges {
    type Err = String;

    /// Format: `M_LO-M_HI,N_LO-N_HI`, e.g. `1-12,1-6`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m_part, n_part) = s
            .split_once(',')
            .ok_or_else(|| format!("expected M_LO-M_HI,N_LO-N_HI, got {s:?}"))?;
        let parse_range = |part: &str| -> Result<(usize, usize), String> {
            let (lo, hi) = part
                .trim()
                .split_once('-')
                .ok_or_else(|| format!("expected LO-HI, got {part:?}"))?;
            let lo: usize = lo.parse().map_err(|_| format!("invalid bound {lo:?}"))?;
            let hi: usize = hi.parse().map_err(|_| format!("invalid bound {hi:?}"))?;
            if lo == 0 || hi < lo {
                return Err(format!("invalid range {part:?}"));
            }
            Ok((lo, hi))
        };
        let (m_lo, m_hi) = parse_range(m_part)?;
        let (n_lo, n_hi) = parse_range(n_part)?;
        Ok(DimRanges {
            m_lo,
            m_hi,
            n_lo,
            n_hi,
        })
    }
}

/// Scale and distribution knobs shared by `gen` and `fuzz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusParams {
    pub mix: MixWeights,
    pub dims: DimRanges,
    pub scale_g: f64,
    pub scale_x0: f64,
    pub margin_scale: f64,
    pub shift_scale: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            mix: MixWeights::default(),
            dims: DimRanges::default(),
            scale_g: 100.0,
            scale_x0: 1000.0,
            margin_scale: 1000.0,
            shift_scale: 10.0,
        }
    }
}

/// Shape fixed from the command line rather than rolled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedShape {
    pub kind: GenKind,
    pub m: usize,
    pub n: usize,
    pub l: Option<usize>,
    pub zero_cols: usize,
}

fn roll_kind(rng: &mut ChaCha8Rng, mix: &MixWeights) -> GenKind {
    let roll = rng.gen_range(0..mix.total());
    let mut upper = mix.consistent;
    if roll < upper {
        return GenKind::Consistent;
    }
    upper += mix.transformed;
    if roll < upper {
        return GenKind::Transformed;
    }
    upper += mix.interior;
    if roll < upper {
        return GenKind::Interior;
    }
    GenKind::Infeasible
}

/// Zero-column count, weighted toward at least one: a quarter of cases get
/// none, the rest draw uniformly from 1..n.
fn roll_zero_cols(rng: &mut ChaCha8Rng, n: usize) -> usize {
    if n == 1 || rng.gen_range(0u32..4) == 0 {
        0
    } else {
        rng.gen_range(1..n)
    }
}

/// Build the record for a fully specified shape. `aux` supplies the margin
/// or shift draws; callers must derive it deterministically from the case
/// seed.
fn materialize(
    params: &CorpusParams,
    shape: FixedShape,
    content_seed: u64,
    aux: &mut ChaCha8Rng,
) -> Result<CaseRecord, CaseGenError> {
    let mut recipe = CaseRecipe::base(shape.m, shape.n, content_seed);
    recipe.scale_g = params.scale_g;
    recipe.scale_x0 = params.scale_x0;
    recipe.zero_col_count = shape.zero_cols;
    match shape.kind {
        GenKind::Consistent => casegen::gen_consistent(&recipe),
        GenKind::Transformed => {
            recipe.use_transform = true;
            recipe.l = shape.l.unwrap_or(shape.m);
            casegen::gen_transformed(&recipe)
        }
        GenKind::Interior => {
            // (0, margin_scale] on every row; 1 - u keeps the draw positive.
            let rows = recipe.emitted_rows();
            let margin: Vec<f64> = (0..rows)
                .map(|_| (1.0 - aux.gen_range(0.0..1.0)) * params.margin_scale)
                .collect();
            recipe.margin = Some(Vector::new(margin).expect("rows >= 1"));
            casegen::gen_interior(&recipe)
        }
        GenKind::Infeasible => {
            // Dry-run the consistent construction to size the shift against
            // the actual h magnitude; the shifted redraw reuses the seed, so
            // G and X0 are identical.
            let dry = casegen::gen_consistent(&recipe)?;
            let h_inf = dry.problem.h().norm_inf();
            let shift: Vec<f64> = (0..shape.m)
                .map(|_| params.shift_scale * (h_inf + 1.0) * (1.0 + aux.gen_range(0.0..1.0)))
                .collect();
            recipe.shift = Some(Vector::new(shift).expect("m >= 1"));
            casegen::gen_likely_infeasible(&recipe)
        }
    }
}

/// The fuzz path: roll kind and shape from the case seed, then build.
pub fn build_case(
    params: &CorpusParams,
    master: u64,
    index: u64,
) -> Result<(GenKind, CaseRecord), CaseGenError> {
    let seed = case_seed(master, index);
    let mut stream = ChaCha8Rng::seed_from_u64(seed);
    let kind = roll_kind(&mut stream, &params.mix);
    let m = stream.gen_range(params.dims.m_lo..=params.dims.m_hi);
    let n = stream.gen_range(params.dims.n_lo..=params.dims.n_hi);
    let zero_cols = roll_zero_cols(&mut stream, n);
    let l = if kind == GenKind::Transformed {
        Some(stream.gen_range(1..=m + 2))
    } else {
        None
    };
    let content_seed = stream.next_u64();
    let shape = FixedShape {
        kind,
        m,
        n,
        l,
        zero_cols,
    };
    let record = materialize(params, shape, content_seed, &mut stream)?;
    Ok((kind, record))
}

/// The gen path: shape comes from flags, randomness only fills content.
pub fn build_fixed(
    params: &CorpusParams,
    shape: FixedShape,
    master: u64,
    index: u64,
) -> Result<CaseRecord, CaseGenError> {
    let seed = case_seed(master, index);
    let mut stream = ChaCha8Rng::seed_from_u64(seed);
    let content_seed = stream.next_u64();
    materialize(params, shape, content_seed, &mut stream)
}

/// Unique, stable file name for a case within a campaign or batch.
pub fn case_file_name(master: u64, index: u64) -> String {
    format!("case-{master:016x}-{index:06}.ldp")
}
