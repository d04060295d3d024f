//! Seeded synthetic condition-specific signal generation at the
//! interval/feature level.
//!
//! Each condition is a small generative recipe: a ventricular interval range
//! with bounded jitter, an atrial behavior, and a Rhythm Match score mixture.
//! Signals are deterministic functions of `(spec, count, seed)`: per-signal
//! seeds are derived from the master seed with SplitMix64 and drive a
//! ChaCha8 stream, so sets are reproducible and train/test splits are
//! disjoint by construction when their master seeds differ.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discrim;
use crate::objectives::EvalSet;
use crate::params::{ParameterDomain, RoundingMode};
use crate::signal::{precompute, FeatureSignal, Label, SignalError};
use crate::Rat;

/// Name of the PRNG scheme, recorded in generated-set metadata.
pub const PRNG_NAME: &str = "splitmix64/chacha8";

/// Arrhythmia class of a generated condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalClass {
    /// VT/VF-like: nominal parameters must deliver therapy.
    Vt,
    /// SVT-like: nominal parameters must not deliver therapy.
    Svt,
}

impl SignalClass {
    pub fn label(self) -> Label {
        match self {
            SignalClass::Vt => Label::RequiresTherapy,
            SignalClass::Svt => Label::NoTherapy,
        }
    }
}

/// Atrial behavior relative to the ventricular cycle sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtrialMode {
    /// One atrial interval per heart cycle, at least as long as the
    /// ventricular one (atrial rate slower or equal): the per-cycle value is
    /// `max(vint, sample(aint_range))`.
    Tracking,
    /// Fast irregular atrial activity on its own timeline; the per-cycle
    /// alignment count follows from the two cumulative time axes.
    Afib,
    /// Fixed 2:1 flutter: two atrial intervals of half the cycle each.
    Flutter,
}

/// Generative recipe for a synthetic arrhythmia class.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSpec {
    pub name: String,
    pub class: SignalClass,
    /// Ventricular interval range [lo, hi] in ms; per-signal base rates are
    /// drawn uniformly from it and per-cycle values are clamped back into it.
    pub vint_range: (i64, i64),
    /// Half-width of the uniform per-cycle jitter around the base interval.
    pub vint_jitter: i64,
    pub a_to_v: AtrialMode,
    /// Atrial interval sampling range [lo, hi] in ms (clamp floor for
    /// `Tracking`, sampling range for `Afib`; informational for `Flutter`).
    pub aint_range: (i64, i64),
    /// Probability that a cycle's correlation score is drawn from the high
    /// (template-like) component of the two-point mixture.
    pub fcc_high_prob: f64,
    pub duration_s: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorError {
    BadSpec { name: String, reason: &'static str },
    Signal(SignalError),
}

impl core::fmt::Display for GeneratorError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GeneratorError::BadSpec { name, reason } => write!(f, "condition {name}: {reason}"),
            GeneratorError::Signal(e) => write!(f, "generated signal invalid: {e}"),
        }
    }
}

fn check_spec(spec: &ConditionSpec) -> Result<(), GeneratorError> {
    let bad = |reason| {
        Err(GeneratorError::BadSpec {
            name: spec.name.clone(),
            reason,
        })
    };
    if !(100 <= spec.vint_range.0 && spec.vint_range.0 <= spec.vint_range.1) {
        return bad("vint_range must satisfy 100 <= lo <= hi");
    }
    if !(100 <= spec.aint_range.0 && spec.aint_range.0 <= spec.aint_range.1) {
        return bad("aint_range must satisfy 100 <= lo <= hi");
    }
    if spec.vint_jitter < 0 {
        return bad("vint_jitter must be non-negative");
    }
    if !(0.0..=1.0).contains(&spec.fcc_high_prob) {
        return bad("fcc_high_prob must lie in [0, 1]");
    }
    if spec.duration_s == 0 {
        return bad("duration_s must be positive");
    }
    Ok(())
}

/// SplitMix64 step, used to derive independent per-signal seeds.
fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn signal_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master_seed ^ splitmix64(index)))
}

fn generate_one(spec: &ConditionSpec, id: String, rng: &mut ChaCha8Rng) -> FeatureSignal {
    let (lo, hi) = spec.vint_range;
    let duration_ms = spec.duration_s as i64 * 1000;
    let base = rng.random_range(lo..=hi);

    let mut vints = Vec::new();
    let mut total = 0i64;
    while total < duration_ms {
        let j = if spec.vint_jitter > 0 {
            rng.random_range(-spec.vint_jitter..=spec.vint_jitter)
        } else {
            0
        };
        let vint = (base + j).clamp(lo, hi);
        total += vint;
        vints.push(vint);
    }
    let n = vints.len();

    let (aints, atrial_count) = match spec.a_to_v {
        AtrialMode::Tracking => {
            let (alo, ahi) = spec.aint_range;
            let aints: Vec<i64> = vints
                .iter()
                .map(|&v| v.max(rng.random_range(alo..=ahi)))
                .collect();
            (aints, (1..=n).collect())
        }
        AtrialMode::Afib => {
            let (alo, ahi) = spec.aint_range;
            let mut aints = Vec::new();
            let mut a_total = 0i64;
            while a_total < total {
                let a = rng.random_range(alo..=ahi);
                a_total += a;
                aints.push(a);
            }
            // count atrial intervals completed by the end of each cycle
            let mut counts = Vec::with_capacity(n);
            let mut v_time = 0i64;
            let mut a_time = 0i64;
            let mut done = 0usize;
            for &v in &vints {
                v_time += v;
                while done < aints.len() && a_time + aints[done] <= v_time {
                    a_time += aints[done];
                    done += 1;
                }
                counts.push(done);
            }
            (aints, counts)
        }
        AtrialMode::Flutter => {
            let mut aints = Vec::with_capacity(2 * n);
            for &v in &vints {
                let half = v / 2;
                aints.push(half);
                aints.push(v - half);
            }
            (aints, (1..=n).map(|k| 2 * k).collect())
        }
    };

    let fcc: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_range(0.0..1.0) < spec.fcc_high_prob {
                rng.random_range(0.95..0.99)
            } else {
                rng.random_range(0.2..0.7)
            }
        })
        .collect();

    FeatureSignal {
        id,
        vints,
        aints,
        atrial_count,
        fcc,
        label: spec.class.label(),
    }
}

/// Generates `n` signals for a condition. Deterministic in
/// `(spec, n, seed)`; signal `i` depends only on the master seed and `i`.
pub fn generate(
    spec: &ConditionSpec,
    n: usize,
    seed: u64,
) -> Result<Vec<FeatureSignal>, GeneratorError> {
    check_spec(spec)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("{}-{:08x}-{:04}", spec.name, seed, i);
        let mut rng = signal_rng(seed, i as u64);
        let sig = generate_one(spec, id, &mut rng);
        sig.validate().map_err(GeneratorError::Signal)?;
        out.push(sig);
    }
    Ok(out)
}

/// Condition-agnostic set: each signal draws its condition uniformly from
/// `specs` (which must share one class — preventing and introducing therapy
/// in the same set would be contradictory) and is then generated from its
/// own stream. Deterministic in `(specs, n, seed)`.
pub fn generate_mixed(
    specs: &[ConditionSpec],
    n: usize,
    seed: u64,
) -> Result<Vec<FeatureSignal>, GeneratorError> {
    let first = specs.first().ok_or(GeneratorError::BadSpec {
        name: String::from("<mixed>"),
        reason: "at least one condition is required",
    })?;
    for spec in specs {
        check_spec(spec)?;
        if spec.class != first.class {
            return Err(GeneratorError::BadSpec {
                name: spec.name.clone(),
                reason: "mixed sets must not combine VT-class and SVT-class conditions",
            });
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = signal_rng(seed, i as u64);
        let spec = &specs[rng.random_range(0..specs.len())];
        let id = format!("{}-{:08x}-{:04}", spec.name, seed, i);
        let sig = generate_one(spec, id, &mut rng);
        sig.validate().map_err(GeneratorError::Signal)?;
        out.push(sig);
    }
    Ok(out)
}

/// Representative built-in arrhythmia archetypes.
///
/// The interval ranges are conventions chosen so that, under nominal
/// parameters, VT-class archetypes always reach therapy and SVT-class
/// archetypes never do; `misclassification_rate` verifies this calibration.
pub fn builtin_conditions() -> Vec<ConditionSpec> {
    let spec = |name: &str,
                class: SignalClass,
                vint_range: (i64, i64),
                vint_jitter: i64,
                a_to_v: AtrialMode,
                aint_range: (i64, i64),
                fcc_high_prob: f64| ConditionSpec {
        name: String::from(name),
        class,
        vint_range,
        vint_jitter,
        a_to_v,
        aint_range,
        fcc_high_prob,
        duration_s: 30,
    };
    alloc::vec![
        // polymorphic fast VF: very short cycles, dissociated slow atrium,
        // chaotic far-field morphology
        spec(
            "fast-vf",
            SignalClass::Vt,
            (120, 240),
            20,
            AtrialMode::Tracking,
            (600, 800),
            0.05
        ),
        // monomorphic VT: fast but regular, slow dissociated atrium, low
        // template correlation
        spec(
            "monomorphic-vt",
            SignalClass::Vt,
            (240, 330),
            12,
            AtrialMode::Tracking,
            (600, 800),
            0.05
        ),
        // 1:1-tracking SVT: atrium mirrors the ventricle, template-like
        // morphology
        spec(
            "svt-tracking",
            SignalClass::Svt,
            (340, 530),
            12,
            AtrialMode::Tracking,
            (100, 100),
            0.95
        ),
        // conducted atrial fibrillation: fast irregular atrium, moderate
        // irregular ventricular response
        spec(
            "afib-conducted",
            SignalClass::Svt,
            (380, 560),
            45,
            AtrialMode::Afib,
            (130, 280),
            0.85
        ),
        // 2:1 atrial flutter: fast regular atrium at twice the ventricular
        // rate, stable ventricle
        spec(
            "svt-flutter",
            SignalClass::Svt,
            (400, 520),
            6,
            AtrialMode::Flutter,
            (200, 260),
            0.5
        ),
    ]
}

/// Fraction of signals whose nominal-parameter reachability contradicts
/// their class label. Calibrated archetypes keep this at zero; anything
/// above 5% should be flagged and regenerated with a different seed rather
/// than silently accepted.
pub fn misclassification_rate(
    signals: &[FeatureSignal],
    domain: &ParameterDomain,
    mode: RoundingMode,
) -> Rat {
    assert!(!signals.is_empty());
    let nominal = domain.to_params(&domain.nominal(), mode);
    let wrong = signals
        .iter()
        .filter(|s| {
            let reached = discrim::reaches_therapy(s, &precompute(s), &nominal);
            let expected = s.label == Label::RequiresTherapy;
            reached != expected
        })
        .count();
    Rat::new(wrong as i64, signals.len() as i64)
}

/// Convenience: generate a set and wrap it for effectiveness evaluation.
pub fn generate_eval_set(
    spec: &ConditionSpec,
    n: usize,
    seed: u64,
    domain: &ParameterDomain,
    mode: RoundingMode,
) -> Result<EvalSet, GeneratorError> {
    Ok(EvalSet::new(generate(spec, n, seed)?, domain, mode))
}
