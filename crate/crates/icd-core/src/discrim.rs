//! Deterministic executable semantics of the two-zone discrimination
//! algorithm: duration-mode state, detection predicates, the per-cycle
//! transition function and the therapy output.
//!
//! This module is the reference simulator; the SMT encoding in [`crate::smt`]
//! must agree with it bit-for-bit, which the ground checker enforces.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::signal::{DerivedFeatures, FeatureSignal};
use crate::Rat;

/// Concrete algorithm parameters, in the units the discriminators compare
/// against: rate thresholds and durations in integer milliseconds, the
/// Rhythm Match threshold in exact hundredths, stability in ms^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    pub vf_th_ms: i64,
    pub vt_th_ms: i64,
    pub afib_th_ms: i64,
    pub vfdur_ms: i64,
    pub vtdur_ms: i64,
    pub nsrcor_hundredths: i64,
    pub stb_ms2: i64,
}

impl Params {
    /// Rhythm Match threshold as a float in [0, 1].
    pub fn nsrcor_th(&self) -> f64 {
        self.nsrcor_hundredths as f64 / 100.0
    }
}

/// Duration-mode state: the VF/VT mode bits and their millisecond clocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AlgState {
    pub vfd: bool,
    pub vtd: bool,
    pub t_vf: i64,
    pub t_vt: i64,
}

impl AlgState {
    /// Neither duration mode active, both clocks zero.
    pub const INIT: AlgState = AlgState {
        vfd: false,
        vtd: false,
        t_vf: 0,
        t_vt: 0,
    };
}

/// Boolean therapy decision per heart cycle; always a signal's cycle count
/// long regardless of parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TherapySignal {
    pub bits: Vec<bool>,
}

impl TherapySignal {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }
}

/// Count of intervals strictly below `th` in `seq[lo ..= hi]`.
fn count_below(seq: &[i64], lo: usize, hi: usize, th: i64) -> u32 {
    seq[lo..=hi].iter().filter(|&&v| v < th).count() as u32
}

/// Onset detection: at least 8 of the last 10 ventricular intervals faster
/// than the VF threshold. False before a full window exists.
pub fn vf_start(signal: &FeatureSignal, k: usize, p: &Params) -> bool {
    k >= 9 && count_below(&signal.vints, k - 9, k, p.vf_th_ms) >= 8
}

/// VT analogue of [`vf_start`].
pub fn vt_start(signal: &FeatureSignal, k: usize, p: &Params) -> bool {
    k >= 9 && count_below(&signal.vints, k - 9, k, p.vt_th_ms) >= 8
}

/// Episode persistence inside VF duration: at least 5 of the 9 preceding
/// intervals fast, and the current interval fast.
pub fn vf_persist(signal: &FeatureSignal, k: usize, p: &Params) -> bool {
    k >= 9
        && count_below(&signal.vints, k - 9, k - 1, p.vf_th_ms) >= 5
        && signal.vints[k] < p.vf_th_ms
}

/// VT analogue of [`vf_persist`].
pub fn vt_persist(signal: &FeatureSignal, k: usize, p: &Params) -> bool {
    k >= 9
        && count_below(&signal.vints, k - 9, k - 1, p.vt_th_ms) >= 5
        && signal.vints[k] < p.vt_th_ms
}

/// The VF duration clock would reach the programmed duration by the end of
/// this cycle (non-strict).
pub fn vf_clk_over(state: &AlgState, signal: &FeatureSignal, k: usize, p: &Params) -> bool {
    state.t_vf + signal.vints[k] >= p.vfdur_ms
}

/// VT analogue of [`vf_clk_over`].
pub fn vt_clk_over(state: &AlgState, signal: &FeatureSignal, k: usize, p: &Params) -> bool {
    state.t_vt + signal.vints[k] >= p.vtdur_ms
}

/// VF duration ends: the clock ran out or the episode stopped persisting.
pub fn vf_end(state: &AlgState, signal: &FeatureSignal, k: usize, p: &Params) -> bool {
    vf_clk_over(state, signal, k, p) || !vf_persist(signal, k, p)
}

/// VT analogue of [`vf_end`].
pub fn vt_end(state: &AlgState, signal: &FeatureSignal, k: usize, p: &Params) -> bool {
    vt_clk_over(state, signal, k, p) || !vt_persist(signal, k, p)
}

/// Rhythm Match: at least 3 of the last 10 correlation scores at or above
/// the programmed threshold (similarity to the sinus template suggests SVT).
pub fn d6(signal: &FeatureSignal, k: usize, p: &Params) -> bool {
    if k < 9 {
        return false;
    }
    let th = p.nsrcor_th();
    signal.fcc[k - 9..=k].iter().filter(|&&v| v >= th).count() >= 3
}

/// Atrial-fibrillation check: at least 6 of the last 10 atrial intervals
/// faster than the AFib threshold while the ventricular rhythm is stable
/// (variance at most `stb`, non-strict). Needs ten completed atrial
/// intervals.
pub fn d7(signal: &FeatureSignal, derived: &DerivedFeatures, k: usize, p: &Params) -> bool {
    let kp = signal.atrial_count[k];
    if kp < 10 {
        return false;
    }
    count_below(&signal.aints, kp - 10, kp - 1, p.afib_th_ms) >= 6
        && derived.vvar[k] <= Rat::from_integer(p.stb_ms2)
}

/// Therapy decision at the current (pre-step) state:
/// `(VFd ∧ VFpersist ∧ VFclkOver) ∨ (VTd ∧ VTpersist ∧ VTclkOver ∧ (D5 ∨ ¬(D6 ∨ D7)))`.
pub fn therapy_predicate(
    state: &AlgState,
    signal: &FeatureSignal,
    derived: &DerivedFeatures,
    k: usize,
    p: &Params,
) -> bool {
    let vf_branch = state.vfd && vf_persist(signal, k, p) && vf_clk_over(state, signal, k, p);
    let vt_branch = state.vtd
        && vt_persist(signal, k, p)
        && vt_clk_over(state, signal, k, p)
        && (derived.d5[k] || !(d6(signal, k, p) || d7(signal, derived, k, p)));
    vf_branch || vt_branch
}

/// One cycle of the transition relation, as a total deterministic function,
/// together with the therapy bit for the current cycle.
///
/// Mode bit update: a mode is (re)entered when its start predicate holds and
/// the mode is either off or just ended; it is kept while it does not end.
/// Clocks accumulate the cycle's interval while the mode persists and reset
/// to zero whenever the mode is off or ends (so a same-cycle restart begins
/// from a zero clock).
pub fn step(
    state: &AlgState,
    signal: &FeatureSignal,
    derived: &DerivedFeatures,
    k: usize,
    p: &Params,
) -> (AlgState, bool) {
    let therapy = therapy_predicate(state, signal, derived, k, p);
    let vint = signal.vints[k];

    let vfs = vf_start(signal, k, p);
    let vfe = vf_end(state, signal, k, p);
    let vfd_next = (vfs && (!state.vfd || vfe)) || (state.vfd && !vfe);
    let t_vf_next = if state.vfd && !vfe {
        state.t_vf + vint
    } else {
        0
    };

    let vts = vt_start(signal, k, p);
    let vte = vt_end(state, signal, k, p);
    let vtd_next = (vts && (!state.vtd || vte)) || (state.vtd && !vte);
    let t_vt_next = if state.vtd && !vte {
        state.t_vt + vint
    } else {
        0
    };

    (
        AlgState {
            vfd: vfd_next,
            vtd: vtd_next,
            t_vf: t_vf_next,
            t_vt: t_vt_next,
        },
        therapy,
    )
}

/// Folds [`step`] from the initial state over every cycle.
pub fn run_with(signal: &FeatureSignal, derived: &DerivedFeatures, p: &Params) -> TherapySignal {
    let mut state = AlgState::INIT;
    let mut bits = Vec::with_capacity(signal.n());
    for k in 0..signal.n() {
        let (next, therapy) = step(&state, signal, derived, k, p);
        bits.push(therapy);
        state = next;
    }
    TherapySignal { bits }
}

/// Simulates a signal under the given parameters (precomputing the derived
/// features internally).
pub fn run(signal: &FeatureSignal, p: &Params) -> TherapySignal {
    run_with(signal, &crate::signal::precompute(signal), p)
}

/// Whether the signal reaches therapy at any cycle; stops at the first
/// therapy bit.
pub fn reaches_therapy(signal: &FeatureSignal, derived: &DerivedFeatures, p: &Params) -> bool {
    let mut state = AlgState::INIT;
    for k in 0..signal.n() {
        let (next, therapy) = step(&state, signal, derived, k, p);
        if therapy {
            return true;
        }
        state = next;
    }
    false
}

/// Debug trace: one tab-separated line per cycle,
/// `k vint VFd VTd tVF tVT Th`, with the state as of the start of the cycle.
pub fn render_trace(signal: &FeatureSignal, p: &Params) -> String {
    let derived = crate::signal::precompute(signal);
    let mut state = AlgState::INIT;
    let mut out = String::new();
    for k in 0..signal.n() {
        let (next, therapy) = step(&state, signal, &derived, k, p);
        let _ = writeln!(
            out,
            "{k}\t{}\t{}\t{}\t{}\t{}\t{}",
            signal.vints[k],
            state.vfd as u8,
            state.vtd as u8,
            state.t_vf,
            state.t_vt,
            therapy as u8,
        );
        state = next;
    }
    out
}
