//! Attack objectives: therapy reachability, effectiveness, Pareto
//! filtering, the train/test validation score and the front AUC.
//!
//! Effectiveness and AUC are exact rationals so Pareto comparisons never
//! suffer float ties.

use alloc::vec::Vec;
use num_traits::Zero;

use crate::discrim::{self, Params, TherapySignal};
use crate::params::{ParamVector, ParameterDomain, RoundingMode};
use crate::signal::{precompute, DerivedFeatures, FeatureSignal};
use crate::Rat;

/// Whether therapy is administered at any point of a therapy signal.
pub fn reachability(t: &TherapySignal) -> bool {
    t.any()
}

/// Fraction of signals whose reachability differs between baseline and
/// attack (both given as per-signal reachability values).
pub fn effectiveness_of_reach(baseline: &[bool], attacked: &[bool]) -> Rat {
    assert_eq!(baseline.len(), attacked.len());
    assert!(!baseline.is_empty());
    let flips = baseline
        .iter()
        .zip(attacked)
        .filter(|(b, a)| b != a)
        .count();
    Rat::new(flips as i64, baseline.len() as i64)
}

/// A signal set prepared for repeated effectiveness evaluation: derived
/// features and nominal-parameter reachability are computed once.
#[derive(Debug, Clone)]
pub struct EvalSet {
    pub signals: Vec<FeatureSignal>,
    pub derived: Vec<DerivedFeatures>,
    pub baseline_reach: Vec<bool>,
}

impl EvalSet {
    /// Prepares a set against the domain's nominal parametrization.
    ///
    /// Panics on an empty signal set (effectiveness would be undefined).
    pub fn new(signals: Vec<FeatureSignal>, domain: &ParameterDomain, mode: RoundingMode) -> Self {
        assert!(
            !signals.is_empty(),
            "effectiveness needs at least one signal"
        );
        let nominal = domain.to_params(&domain.nominal(), mode);
        let derived: Vec<DerivedFeatures> = signals.iter().map(precompute).collect();
        let baseline_reach = signals
            .iter()
            .zip(&derived)
            .map(|(s, d)| discrim::reaches_therapy(s, d, &nominal))
            .collect();
        EvalSet {
            signals,
            derived,
            baseline_reach,
        }
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    /// Fraction of signals whose therapy reachability flips under `p`.
    pub fn effectiveness(&self, p: &Params) -> Rat {
        let flips = self
            .signals
            .iter()
            .zip(&self.derived)
            .zip(&self.baseline_reach)
            .filter(|((s, d), &base)| discrim::reaches_therapy(s, d, p) != base)
            .count();
        Rat::new(flips as i64, self.signals.len() as i64)
    }
}

/// One Pareto point: distance, effectiveness and a witness assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontPoint {
    pub distance: u32,
    pub effectiveness: Rat,
    pub witness: ParamVector,
}

/// Non-dominated (distance, effectiveness) points, sorted by ascending
/// distance with strictly increasing effectiveness.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParetoFront {
    points: Vec<FrontPoint>,
}

impl ParetoFront {
    pub fn points(&self) -> &[FrontPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Best effectiveness among points with distance at most `s` (zero when
    /// none qualifies).
    pub fn effectiveness_at(&self, s: u32) -> Rat {
        self.points
            .iter()
            .filter(|p| p.distance <= s)
            .map(|p| p.effectiveness)
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Checks the front invariants (sorted, strictly increasing
    /// effectiveness, hence mutually non-dominated).
    pub fn check_invariants(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[0].distance < w[1].distance && w[0].effectiveness < w[1].effectiveness)
    }
}

/// Removes every dominated candidate. A point is dominated when another has
/// strictly better effectiveness at no greater distance, or at least the
/// same effectiveness strictly closer. Among candidates with equal
/// (distance, effectiveness) the lexicographically smallest witness index
/// vector is kept, making results independent of evaluation order.
pub fn pareto_filter(mut candidates: Vec<FrontPoint>) -> ParetoFront {
    candidates.sort_by(|a, b| {
        a.distance
            .cmp(&b.distance)
            .then(b.effectiveness.cmp(&a.effectiveness))
            .then(a.witness.cmp(&b.witness))
    });
    let mut points: Vec<FrontPoint> = Vec::new();
    for c in candidates {
        match points.last() {
            None => points.push(c),
            Some(last) => {
                if c.effectiveness > last.effectiveness {
                    points.push(c);
                }
            }
        }
    }
    ParetoFront { points }
}

/// Mean train-to-test effectiveness delta over the front's witnesses.
/// Positive values mean the attack works better on unseen data.
pub fn validation_score(
    front: &ParetoFront,
    domain: &ParameterDomain,
    mode: RoundingMode,
    train: &EvalSet,
    test: &EvalSet,
) -> Rat {
    if front.is_empty() {
        return Rat::zero();
    }
    let sum: Rat = front
        .points()
        .iter()
        .map(|pt| {
            let p = domain.to_params(&pt.witness, mode);
            test.effectiveness(&p) - train.effectiveness(&p)
        })
        .sum();
    sum / Rat::from_integer(front.len() as i64)
}

/// Area under the front's step curve over distances `0 ..= dist_max`:
/// the integral of `e(s) = ` best effectiveness at distance at most `s`.
pub fn auc(front: &ParetoFront, domain: &ParameterDomain) -> Rat {
    let dist_max = domain.dist_max();
    let mut total = Rat::zero();
    let pts = front.points();
    for (i, pt) in pts.iter().enumerate() {
        if pt.distance > dist_max {
            break;
        }
        let end = pts
            .get(i + 1)
            .map(|n| n.distance.min(dist_max))
            .unwrap_or(dist_max);
        total += pt.effectiveness * Rat::from_integer((end - pt.distance) as i64);
    }
    total
}
