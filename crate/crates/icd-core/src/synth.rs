//! Pareto-optimal attack synthesis over the discrete parameter grid.
//!
//! The exact backend layers the search by distance: for each `s` it
//! enumerates the index box of radius `s` around the nominal assignment
//! (restricted to the configured free parameters) and records the best
//! effectiveness with its lexicographically smallest witness. Because the
//! boxes are nested and evaluations are memoized, the layered sweep costs
//! one pass over the full restricted grid and yields exactly the front a
//! whole-grid brute force would produce. The random backend samples the same
//! restricted grid uniformly under a fixed seed.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::objectives::{pareto_filter, EvalSet, FrontPoint, ParetoFront};
use crate::params::{ParamId, ParamVector, ParameterDomain, RoundingMode};
use crate::Rat;

/// Search backend selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Random,
    SmtEmit,
}

/// Desk-scale control surface for a synthesis run.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisConfig {
    pub backend: Backend,
    /// Parameters allowed to move; everything else stays nominal. `None`
    /// frees all seven.
    pub free_params: Option<Vec<ParamId>>,
    /// Optional cap on the explored distance layers.
    pub max_distance: Option<u32>,
    /// Sample count for the random backend.
    pub budget: u64,
    /// Master seed; all randomness flows from it.
    pub seed: u64,
    /// Refusal threshold for exact enumeration.
    pub enumeration_cap: u64,
    pub rounding: RoundingMode,
}

pub const DEFAULT_ENUMERATION_CAP: u64 = 50_000_000;

impl SynthesisConfig {
    pub fn exact(free_params: Option<Vec<ParamId>>) -> Self {
        SynthesisConfig {
            backend: Backend::Exact,
            free_params,
            max_distance: None,
            budget: 0,
            seed: 0,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            rounding: RoundingMode::default(),
        }
    }

    pub fn random(free_params: Option<Vec<ParamId>>, budget: u64, seed: u64) -> Self {
        SynthesisConfig {
            backend: Backend::Random,
            budget,
            seed,
            ..Self::exact(free_params)
        }
    }

    fn free_mask(&self) -> [bool; 7] {
        match &self.free_params {
            None => [true; 7],
            Some(ids) => {
                let mut mask = [false; 7];
                for id in ids {
                    mask[id.index()] = true;
                }
                mask
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthError {
    GridTooLarge { size: u128, cap: u64 },
    WrongBackend { expected: Backend, got: Backend },
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::GridTooLarge { size, cap } => {
                write!(
                    f,
                    "restricted grid has {size} points, above the enumeration cap {cap}"
                )
            }
            SynthError::WrongBackend { expected, got } => {
                write!(f, "config selects backend {got:?}, expected {expected:?}")
            }
        }
    }
}

/// Per-distance-layer search statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerStat {
    pub distance: u32,
    pub box_size: u64,
    pub best_effectiveness: Rat,
}

/// Outcome of a synthesis run.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub front: ParetoFront,
    pub layers: Vec<LayerStat>,
    /// Distinct parameter vectors simulated.
    pub evaluations: u64,
    /// Size of the restricted grid the run ranged over.
    pub grid_size: u128,
}

struct Memo<'a> {
    domain: &'a ParameterDomain,
    train: &'a EvalSet,
    rounding: RoundingMode,
    cache: BTreeMap<ParamVector, Rat>,
    evaluations: u64,
}

impl<'a> Memo<'a> {
    fn new(domain: &'a ParameterDomain, train: &'a EvalSet, rounding: RoundingMode) -> Self {
        Memo {
            domain,
            train,
            rounding,
            cache: BTreeMap::new(),
            evaluations: 0,
        }
    }

    fn effectiveness(&mut self, v: &ParamVector) -> Rat {
        if let Some(&e) = self.cache.get(v) {
            return e;
        }
        let e = self
            .train
            .effectiveness(&self.domain.to_params(v, self.rounding));
        self.cache.insert(*v, e);
        self.evaluations += 1;
        e
    }
}

/// Index ranges for one distance layer: free parameters get the clamped
/// box interval, pinned ones stay at nominal.
fn layer_ranges(domain: &ParameterDomain, mask: &[bool; 7], s: u32) -> [(u8, u8); 7] {
    let mut ranges = domain.index_box(s);
    let nominal = domain.nominal();
    for (i, r) in ranges.iter_mut().enumerate() {
        if !mask[i] {
            *r = (nominal.0[i], nominal.0[i]);
        }
    }
    ranges
}

fn range_count(ranges: &[(u8, u8); 7]) -> u128 {
    ranges
        .iter()
        .map(|&(lo, hi)| (hi - lo + 1) as u128)
        .product()
}

/// Lexicographic odometer over index ranges; visits assignments in
/// ascending [`ParamVector`] order, so the first best is the smallest
/// witness.
fn for_each_vector(ranges: &[(u8, u8); 7], mut f: impl FnMut(&ParamVector)) {
    let mut v = ParamVector([0; 7]);
    for (slot, range) in v.0.iter_mut().zip(ranges) {
        *slot = range.0;
    }
    loop {
        f(&v);
        // advance the least-significant position (last parameter)
        let mut pos = 7;
        while pos > 0 {
            let i = pos - 1;
            if v.0[i] < ranges[i].1 {
                v.0[i] += 1;
                for (slot, range) in v.0[i + 1..].iter_mut().zip(&ranges[i + 1..]) {
                    *slot = range.0;
                }
                break;
            }
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
    }
}

/// Exact distance-layered synthesis: the returned front equals a brute
/// force over the whole restricted grid, including witness tie-breaks.
pub fn synthesize_exact(
    train: &EvalSet,
    domain: &ParameterDomain,
    config: &SynthesisConfig,
) -> Result<SynthesisResult, SynthError> {
    if config.backend != Backend::Exact {
        return Err(SynthError::WrongBackend {
            expected: Backend::Exact,
            got: config.backend,
        });
    }
    let mask = config.free_mask();
    let s_max = config
        .max_distance
        .map_or(domain.dist_max(), |m| m.min(domain.dist_max()));
    let grid_size = range_count(&layer_ranges(domain, &mask, s_max));
    if grid_size > config.enumeration_cap as u128 {
        return Err(SynthError::GridTooLarge {
            size: grid_size,
            cap: config.enumeration_cap,
        });
    }

    let mut memo = Memo::new(domain, train, config.rounding);
    let mut layers = Vec::new();
    let mut candidates = Vec::new();
    for s in 0..=s_max {
        let ranges = layer_ranges(domain, &mask, s);
        let mut best: Option<(Rat, ParamVector)> = None;
        for_each_vector(&ranges, |v| {
            let e = memo.effectiveness(v);
            if best.as_ref().is_none_or(|(be, _)| e > *be) {
                best = Some((e, *v));
            }
        });
        let (best_e, best_w) = best.expect("layer box is never empty");
        layers.push(LayerStat {
            distance: s,
            box_size: range_count(&ranges) as u64,
            best_effectiveness: best_e,
        });
        candidates.push(FrontPoint {
            distance: s,
            effectiveness: best_e,
            witness: best_w,
        });
        if best_e == Rat::one() {
            break; // wider layers cannot improve on full effectiveness
        }
    }

    Ok(SynthesisResult {
        front: pareto_filter(candidates),
        layers,
        evaluations: memo.evaluations,
        grid_size,
    })
}

/// Seeded uniform random search over the restricted grid. The nominal
/// assignment is always part of the candidate pool, so the front contains
/// the trivial point even at budget zero.
pub fn synthesize_random(
    train: &EvalSet,
    domain: &ParameterDomain,
    config: &SynthesisConfig,
) -> Result<SynthesisResult, SynthError> {
    if config.backend != Backend::Random {
        return Err(SynthError::WrongBackend {
            expected: Backend::Random,
            got: config.backend,
        });
    }
    let mask = config.free_mask();
    let grid_size = range_count(&layer_ranges(domain, &mask, domain.dist_max()));

    let mut memo = Memo::new(domain, train, config.rounding);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let nominal = domain.nominal();
    let mut candidates = Vec::new();
    let mut push = |memo: &mut Memo, v: ParamVector| {
        let e = memo.effectiveness(&v);
        candidates.push(FrontPoint {
            distance: domain.distance(&v),
            effectiveness: e,
            witness: v,
        });
    };
    push(&mut memo, nominal);
    for _ in 0..config.budget {
        let mut v = nominal;
        for (i, &id) in ParamId::ALL.iter().enumerate() {
            if mask[i] {
                v.0[i] = rng.random_range(1..=domain.len(id));
            }
        }
        push(&mut memo, v);
    }

    Ok(SynthesisResult {
        front: pareto_filter(candidates),
        layers: Vec::new(),
        evaluations: memo.evaluations,
        grid_size,
    })
}
