//! Feature-level cardiac signals and the parameter-independent
//! pre-computations (interval variance, ventricular-vs-atrial rate
//! comparison) performed before simulation or encoding.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::Rat;

/// Ground-truth class of the condition a signal was recorded/generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    /// Arrhythmogenic (VT/VF-like): the device must deliver therapy.
    RequiresTherapy,
    /// Supra-ventricular (SVT-like): therapy must not be delivered.
    NoTherapy,
}

/// One electrogram reduced to per-cycle features.
///
/// `vints[k]` is the duration of the k-th ventricular interval in integer
/// milliseconds; `atrial_count[k]` is the number of atrial intervals that
/// completed within the first `k + 1` heart cycles; `fcc[k]` is the Rhythm
/// Match feature correlation coefficient for cycle `k`, in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSignal {
    pub id: String,
    pub vints: Vec<i64>,
    pub aints: Vec<i64>,
    pub atrial_count: Vec<usize>,
    pub fcc: Vec<f64>,
    pub label: Label,
}

/// Invariant violation detected while constructing a [`FeatureSignal`].
#[derive(Debug, Clone, PartialEq)]
pub enum SignalError {
    Empty {
        id: String,
    },
    NonPositiveInterval {
        id: String,
        field: &'static str,
        index: usize,
        value: i64,
    },
    LengthMismatch {
        id: String,
        field: &'static str,
        expected: usize,
        actual: usize,
    },
    AtrialCountDecreasing {
        id: String,
        index: usize,
    },
    AtrialCountOverflow {
        id: String,
        index: usize,
        count: usize,
        available: usize,
    },
    FccOutOfRange {
        id: String,
        index: usize,
        value: f64,
    },
}

impl fmt::Display for SignalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalError::Empty { id } => write!(f, "signal {id}: no cycles"),
            SignalError::NonPositiveInterval {
                id,
                field,
                index,
                value,
            } => {
                write!(
                    f,
                    "signal {id}: {field}[{index}] = {value} must be positive"
                )
            }
            SignalError::LengthMismatch {
                id,
                field,
                expected,
                actual,
            } => {
                write!(
                    f,
                    "signal {id}: {field} has length {actual}, expected {expected}"
                )
            }
            SignalError::AtrialCountDecreasing { id, index } => {
                write!(f, "signal {id}: atrial_count decreases at cycle {index}")
            }
            SignalError::AtrialCountOverflow {
                id,
                index,
                count,
                available,
            } => {
                write!(
                    f,
                    "signal {id}: atrial_count[{index}] = {count} exceeds {available} atrial intervals"
                )
            }
            SignalError::FccOutOfRange { id, index, value } => {
                write!(f, "signal {id}: fcc[{index}] = {value} outside [-1, 1]")
            }
        }
    }
}

impl FeatureSignal {
    /// Builds a signal, checking every structural invariant.
    pub fn new(
        id: String,
        vints: Vec<i64>,
        aints: Vec<i64>,
        atrial_count: Vec<usize>,
        fcc: Vec<f64>,
        label: Label,
    ) -> Result<Self, SignalError> {
        let sig = FeatureSignal {
            id,
            vints,
            aints,
            atrial_count,
            fcc,
            label,
        };
        sig.validate()?;
        Ok(sig)
    }

    /// Number of heart cycles N.
    pub fn n(&self) -> usize {
        self.vints.len()
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        let id = &self.id;
        let n = self.vints.len();
        if n == 0 {
            return Err(SignalError::Empty { id: id.clone() });
        }
        for (field, len) in [
            ("atrial_count", self.atrial_count.len()),
            ("fcc", self.fcc.len()),
        ] {
            if len != n {
                return Err(SignalError::LengthMismatch {
                    id: id.clone(),
                    field,
                    expected: n,
                    actual: len,
                });
            }
        }
        for (field, seq) in [("vints", &self.vints), ("aints", &self.aints)] {
            if let Some((index, &value)) = seq.iter().enumerate().find(|(_, v)| **v <= 0) {
                return Err(SignalError::NonPositiveInterval {
                    id: id.clone(),
                    field,
                    index,
                    value,
                });
            }
        }
        let mut prev = 0usize;
        for (k, &c) in self.atrial_count.iter().enumerate() {
            if c < prev {
                return Err(SignalError::AtrialCountDecreasing {
                    id: id.clone(),
                    index: k,
                });
            }
            if c > self.aints.len() {
                return Err(SignalError::AtrialCountOverflow {
                    id: id.clone(),
                    index: k,
                    count: c,
                    available: self.aints.len(),
                });
            }
            prev = c;
        }
        for (k, &v) in self.fcc.iter().enumerate() {
            if !v.is_finite() || !(-1.0..=1.0).contains(&v) {
                return Err(SignalError::FccOutOfRange {
                    id: id.clone(),
                    index: k,
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// Per-cycle values that do not depend on any device parameter.
///
/// `vvar[k]` is the population variance (exact rational, ms^2) of the last
/// ten ventricular intervals ending at cycle `k`; `d5[k]` tells whether the
/// average ventricular rate exceeds the average atrial rate by at least
/// 10 BPM over the same horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFeatures {
    pub vvar: Vec<Rat>,
    pub d5: Vec<bool>,
}

impl DerivedFeatures {
    pub fn vvar_f64(&self, k: usize) -> f64 {
        ratio_to_f64(self.vvar[k])
    }
}

pub(crate) fn ratio_to_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact population variance of `vints[max(0, k-9) ..= k]`.
///
/// Windows shorter than ten are allowed during the warm-up prefix; detection
/// predicates separately force themselves false there.
///
/// Panics if `k` is out of range.
pub fn compute_vvar_exact(vints: &[i64], k: usize) -> Rat {
    let lo = k.saturating_sub(9);
    let window = &vints[lo..=k];
    let w = window.len() as i64;
    let sum: i64 = window.iter().sum();
    let sum_sq: i64 = window.iter().map(|&v| v * v).sum();
    // population variance = (w * sum(x^2) - sum(x)^2) / w^2
    Rat::new(w * sum_sq - sum * sum, w * w)
}

/// [`compute_vvar_exact`] rendered as a float (ms^2).
pub fn compute_vvar(vints: &[i64], k: usize) -> f64 {
    ratio_to_f64(compute_vvar_exact(vints, k))
}

/// Average ventricular rate at least 10 BPM faster than the average atrial
/// rate over the last ten cycles (shorter windows allowed near the start).
///
/// Compared exactly in BPM: with mean intervals `mV = sV/wV` and `mA = sA/wA`,
/// `60000/mV >= 60000/mA + 10` is evaluated by cross-multiplication. Returns
/// false when no atrial interval has completed yet.
pub fn compute_d5(vints: &[i64], aints: &[i64], atrial_count: &[usize], k: usize) -> bool {
    let kp = atrial_count[k];
    if kp == 0 {
        return false;
    }
    let vlo = k.saturating_sub(9);
    let vw = &vints[vlo..=k];
    let alo = kp.saturating_sub(10);
    let aw = &aints[alo..kp];
    let (wv, sv) = (
        vw.len() as i128,
        vw.iter().map(|&v| v as i128).sum::<i128>(),
    );
    let (wa, sa) = (
        aw.len() as i128,
        aw.iter().map(|&v| v as i128).sum::<i128>(),
    );
    60_000 * wv * sa >= 60_000 * wa * sv + 10 * sv * sa
}

/// Computes every parameter-independent per-cycle feature of a signal.
pub fn precompute(signal: &FeatureSignal) -> DerivedFeatures {
    let n = signal.n();
    let mut vvar = Vec::with_capacity(n);
    let mut d5 = Vec::with_capacity(n);
    for k in 0..n {
        vvar.push(compute_vvar_exact(&signal.vints, k));
        d5.push(compute_d5(
            &signal.vints,
            &signal.aints,
            &signal.atrial_count,
            k,
        ));
    }
    DerivedFeatures { vvar, d5 }
}
