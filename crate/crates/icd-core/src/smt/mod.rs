//! SMT-LIB2/MaxSMT encoding of the discrimination algorithm's bounded
//! unrolling, for external optimizing solvers.
//!
//! The document declares the seven parameters as constants constrained to
//! their programmable value sets, unrolls the deterministic transition
//! relation per training signal with every parameter-independent quantity
//! pre-substituted as a constant (intervals, correlation scores, variances,
//! the ventricular-vs-atrial rate discriminator), defines the per-cycle
//! therapy predicate, and adds one unit-weight soft constraint per signal
//! that holds when the signal's therapy reachability flips against the
//! nominal baseline. The stealthiness distance is an integer constant tied
//! to the parameters through an implication ladder that restricts each
//! parameter to its `s`-neighborhood whenever `dist <= s`.
//!
//! Logic: QF_LIRA. Soft constraints use the widely supported `assert-soft`
//! extension; Pareto mode adds `minimize`/`:opt.priority` directives.

pub mod decode;
pub mod eval;
pub mod sexp;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::objectives::EvalSet;
use crate::params::{ParamId, ParamVector, ParameterDomain, RoundingMode, Unit};
use crate::signal::{DerivedFeatures, FeatureSignal};
use crate::Rat;

/// What the emitted objectives ask an optimizing solver for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmtMode {
    /// Maximize flipped signals subject to `dist <= s`.
    MaxEffAtDist(u32),
    /// Multi-objective directives: maximize flips, minimize distance.
    Pareto,
}

/// Per-signal bookkeeping carried alongside the document text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtSignalInfo {
    pub id: String,
    pub n_cycles: usize,
    pub baseline_reach: bool,
}

/// Everything a decoder or checker needs to interpret the document.
#[derive(Debug, Clone, PartialEq)]
pub struct SmtMetadata {
    pub signals: Vec<SmtSignalInfo>,
    pub dist_var: String,
    pub soft_group: String,
    pub dist_max: u32,
    pub mode: SmtMode,
    pub rounding: RoundingMode,
    /// Byte offset of the `(check-sat)` footer; extra assertions (for
    /// example parameter pins) can be spliced in here.
    pub check_sat_offset: usize,
}

/// An emitted SMT-LIB2 document plus its interpretation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SmtDocument {
    pub text: String,
    pub metadata: SmtMetadata,
}

impl SmtDocument {
    /// Returns the document text with extra assertions inserted before the
    /// solve footer.
    pub fn with_extra_assertions(&self, extra: &str) -> String {
        let mut out = String::with_capacity(self.text.len() + extra.len() + 1);
        out.push_str(&self.text[..self.metadata.check_sat_offset]);
        out.push_str(extra);
        if !extra.ends_with('\n') {
            out.push('\n');
        }
        out.push_str(&self.text[self.metadata.check_sat_offset..]);
        out
    }
}

// --- symbol naming scheme ------------------------------------------------

/// Duration-mode state variable kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateVar {
    VfD,
    VtD,
    TVf,
    TVt,
}

impl StateVar {
    pub const ALL: [StateVar; 4] = [StateVar::VfD, StateVar::VtD, StateVar::TVf, StateVar::TVt];

    fn prefix(self) -> &'static str {
        match self {
            StateVar::VfD => "VFd",
            StateVar::VtD => "VTd",
            StateVar::TVf => "tVF",
            StateVar::TVt => "tVT",
        }
    }

    pub fn is_clock(self) -> bool {
        matches!(self, StateVar::TVf | StateVar::TVt)
    }
}

/// Name of a state variable for signal `j`, cycle `k`.
pub fn state_var(kind: StateVar, j: usize, k: usize) -> String {
    format!("{}_{j}_{k}", kind.prefix())
}

/// Parses a state-variable name back into its components.
pub fn parse_state_var(name: &str) -> Option<(StateVar, usize, usize)> {
    let mut parts = name.split('_');
    let prefix = parts.next()?;
    let kind = StateVar::ALL.into_iter().find(|v| v.prefix() == prefix)?;
    let j = parts.next()?.parse().ok()?;
    let k = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((kind, j, k))
}

pub fn pred_name(prefix: &str, j: usize, k: usize) -> String {
    format!("{prefix}_{j}_{k}")
}

pub fn th_name(j: usize, k: usize) -> String {
    pred_name("Th", j, k)
}

pub fn rth_name(j: usize) -> String {
    format!("Rth_{j}")
}

pub fn effective_name(j: usize) -> String {
    format!("effective_{j}")
}

// --- literal formatting ---------------------------------------------------

/// Formats a float as an SMT-LIB Real literal: plain shortest round-trip
/// decimal, negatives as `(- x)`.
pub fn smt_real(x: f64) -> String {
    debug_assert!(x.is_finite());
    let mag = if x < 0.0 { -x } else { x };
    let mut s = format!("{mag}");
    if !s.contains('.') {
        s.push_str(".0");
    }
    if x < 0.0 {
        format!("(- {s})")
    } else {
        s
    }
}

/// Formats an exact non-negative rational as a Real term.
pub fn smt_rat(r: Rat) -> String {
    let (n, d) = (*r.numer(), *r.denom());
    debug_assert!(n >= 0 && d > 0);
    if d == 1 {
        format!("{n}.0")
    } else {
        format!("(/ {n}.0 {d}.0)")
    }
}

/// Formats a score stored in hundredths as an exact decimal.
pub fn smt_score(hundredths: i64) -> String {
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

/// SMT sort of a parameter constant.
pub fn param_sort(id: ParamId) -> &'static str {
    match id {
        ParamId::NsrCorTh | ParamId::Stb => "Real",
        _ => "Int",
    }
}

/// Renders one programmable value of a parameter as a term of the
/// parameter's SMT sort (millisecond conversion applied to rate thresholds).
fn param_value_term(domain: &ParameterDomain, id: ParamId, idx1: u8, mode: RoundingMode) -> String {
    let scaled = domain.value_scaled(id, idx1);
    match domain.spec(id).unit {
        Unit::Bpm | Unit::Seconds => {
            format!("{}", domain.scaled_to_algorithm(id, scaled, mode))
        }
        Unit::Score => smt_score(scaled),
        Unit::MsSq => format!("{scaled}.0"),
    }
}

/// `(lo_term, hi_term)` bounding the values a parameter may take at indices
/// `lo ..= hi`. Rate thresholds invert: BPM ascends while ms descends.
fn param_bounds_terms(
    domain: &ParameterDomain,
    id: ParamId,
    lo: u8,
    hi: u8,
    mode: RoundingMode,
) -> (String, String) {
    match domain.spec(id).unit {
        Unit::Bpm => (
            param_value_term(domain, id, hi, mode),
            param_value_term(domain, id, lo, mode),
        ),
        _ => (
            param_value_term(domain, id, lo, mode),
            param_value_term(domain, id, hi, mode),
        ),
    }
}

// --- emission --------------------------------------------------------------

fn emit_window_count(terms: &mut String, items: impl Iterator<Item = String>) {
    terms.push_str("(+");
    for t in items {
        let _ = write!(terms, " {t}");
    }
    terms.push(')');
}

fn fast_count_term(vints: &[i64], lo: usize, hi: usize, th_name: &str) -> String {
    let mut s = String::new();
    emit_window_count(
        &mut s,
        vints[lo..=hi]
            .iter()
            .map(|v| format!("(ite (< {v} {th_name}) 1 0)")),
    );
    s
}

/// Emits every per-cycle definition and transition assertion for one signal.
fn emit_signal(
    out: &mut String,
    j: usize,
    signal: &FeatureSignal,
    derived: &DerivedFeatures,
    baseline_reach: bool,
) {
    let n = signal.n();
    let _ = writeln!(
        out,
        "; --- signal {j}: {} ({} cycles, baseline reach {}) ---",
        signal.id, n, baseline_reach
    );

    let decl_state = |out: &mut String, k: usize| {
        for kind in StateVar::ALL {
            let sort = if kind.is_clock() { "Int" } else { "Bool" };
            let _ = writeln!(out, "(declare-const {} {sort})", state_var(kind, j, k));
        }
    };

    decl_state(out, 0);
    let _ = writeln!(
        out,
        "(assert (and (not {vfd}) (not {vtd}) (= {tvf} 0) (= {tvt} 0)))",
        vfd = state_var(StateVar::VfD, j, 0),
        vtd = state_var(StateVar::VtD, j, 0),
        tvf = state_var(StateVar::TVf, j, 0),
        tvt = state_var(StateVar::TVt, j, 0),
    );

    for k in 0..n {
        let vint = signal.vints[k];
        let vfd = state_var(StateVar::VfD, j, k);
        let vtd = state_var(StateVar::VtD, j, k);
        let tvf = state_var(StateVar::TVf, j, k);
        let tvt = state_var(StateVar::TVt, j, k);

        // detection predicates; window predicates are false before ten
        // cycles exist
        for (name, th, clock, dur) in [
            ("VF", "VF_th", &tvf, "VFdur"),
            ("VT", "VT_th", &tvt, "VTdur"),
        ] {
            let start = pred_name(&format!("{name}start"), j, k);
            let persist = pred_name(&format!("{name}persist"), j, k);
            let clk_over = pred_name(&format!("{name}clkOver"), j, k);
            let end = pred_name(&format!("{name}end"), j, k);
            if k >= 9 {
                let _ = writeln!(
                    out,
                    "(define-fun {start} () Bool (>= {} 8))",
                    fast_count_term(&signal.vints, k - 9, k, th)
                );
                let _ = writeln!(
                    out,
                    "(define-fun {persist} () Bool (and (>= {} 5) (< {vint} {th})))",
                    fast_count_term(&signal.vints, k - 9, k - 1, th)
                );
            } else {
                let _ = writeln!(out, "(define-fun {start} () Bool false)");
                let _ = writeln!(out, "(define-fun {persist} () Bool false)");
            }
            let _ = writeln!(
                out,
                "(define-fun {clk_over} () Bool (>= (+ {clock} {vint}) {dur}))"
            );
            let _ = writeln!(
                out,
                "(define-fun {end} () Bool (or {clk_over} (not {persist})))"
            );
        }

        // pre-computed and parameter-dependent discriminators
        let d5 = pred_name("D5", j, k);
        let _ = writeln!(out, "(define-fun {d5} () Bool {})", derived.d5[k]);

        let d6 = pred_name("D6", j, k);
        if k >= 9 {
            let mut cnt = String::new();
            emit_window_count(
                &mut cnt,
                signal.fcc[k - 9..=k]
                    .iter()
                    .map(|&f| format!("(ite (<= NSRcor_th {}) 1 0)", smt_real(f))),
            );
            let _ = writeln!(out, "(define-fun {d6} () Bool (>= {cnt} 3))");
        } else {
            let _ = writeln!(out, "(define-fun {d6} () Bool false)");
        }

        let d7 = pred_name("D7", j, k);
        let kp = signal.atrial_count[k];
        if kp >= 10 {
            let mut cnt = String::new();
            emit_window_count(
                &mut cnt,
                signal.aints[kp - 10..kp]
                    .iter()
                    .map(|a| format!("(ite (< {a} AFib_th) 1 0)")),
            );
            let _ = writeln!(
                out,
                "(define-fun {d7} () Bool (and (>= {cnt} 6) (<= {} stb)))",
                smt_rat(derived.vvar[k])
            );
        } else {
            let _ = writeln!(out, "(define-fun {d7} () Bool false)");
        }

        // therapy decision for this cycle
        let vf_persist = pred_name("VFpersist", j, k);
        let vf_clk = pred_name("VFclkOver", j, k);
        let vt_persist = pred_name("VTpersist", j, k);
        let vt_clk = pred_name("VTclkOver", j, k);
        let _ = writeln!(
            out,
            "(define-fun {} () Bool (or (and {vfd} {vf_persist} {vf_clk}) \
             (and {vtd} {vt_persist} {vt_clk} (or {d5} (not (or {d6} {d7}))))))",
            th_name(j, k)
        );

        // next state and the ten transition implications
        decl_state(out, k + 1);
        let vfd1 = state_var(StateVar::VfD, j, k + 1);
        let vtd1 = state_var(StateVar::VtD, j, k + 1);
        let tvf1 = state_var(StateVar::TVf, j, k + 1);
        let tvt1 = state_var(StateVar::TVt, j, k + 1);
        let vf_start = pred_name("VFstart", j, k);
        let vt_start = pred_name("VTstart", j, k);
        let vf_end = pred_name("VFend", j, k);
        let vt_end = pred_name("VTend", j, k);
        let mut t = |line: String| {
            let _ = writeln!(out, "(assert {line})");
        };
        t(format!(
            "(=> (and {vf_start} (or (not {vfd}) {vf_end})) {vfd1})"
        ));
        t(format!(
            "(=> (and {vt_start} (or (not {vtd}) {vt_end})) {vtd1})"
        ));
        t(format!(
            "(=> (and (not {vfd}) (not {vf_start})) (not {vfd1}))"
        ));
        t(format!(
            "(=> (and (not {vtd}) (not {vt_start})) (not {vtd1}))"
        ));
        t(format!(
            "(=> (and {vfd} (not {vf_start}) {vf_end}) (not {vfd1}))"
        ));
        t(format!(
            "(=> (and {vtd} (not {vt_start}) {vt_end}) (not {vtd1}))"
        ));
        t(format!(
            "(=> (and {vfd} (not {vf_end})) (and {vfd1} (= {tvf1} (+ {tvf} {vint}))))"
        ));
        t(format!(
            "(=> (and {vtd} (not {vt_end})) (and {vtd1} (= {tvt1} (+ {tvt} {vint}))))"
        ));
        t(format!("(=> (or (not {vfd}) {vf_end}) (= {tvf1} 0))"));
        t(format!("(=> (or (not {vtd}) {vt_end}) (= {tvt1} 0))"));
    }

    // therapy reachability under the attack parameters, and the soft
    // effectiveness constraint against the precomputed baseline
    let mut reach = String::from("(or");
    for k in 0..n {
        let _ = write!(reach, " {}", th_name(j, k));
    }
    reach.push(')');
    let _ = writeln!(out, "(define-fun {} () Bool {reach})", rth_name(j));
    let _ = writeln!(
        out,
        "(define-fun {} () Bool (= {baseline_reach} (not {})))",
        effective_name(j),
        rth_name(j)
    );
    let _ = writeln!(
        out,
        "(assert-soft {} :weight 1 :id effectiveness)",
        effective_name(j)
    );
}

/// Emits the full optimization document for a training set.
pub fn emit_smt(
    train: &EvalSet,
    domain: &ParameterDomain,
    mode: SmtMode,
    rounding: RoundingMode,
) -> SmtDocument {
    let dist_max = domain.dist_max();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "; two-zone discrimination unrolling over {} signal(s); mode: {:?}",
        train.len(),
        mode
    );
    out.push_str("(set-option :produce-models true)\n");
    if mode == SmtMode::Pareto {
        out.push_str("(set-option :opt.priority pareto)\n");
    }
    out.push_str("(set-logic QF_LIRA)\n");

    out.push_str("; programmable parameters (rate thresholds and durations in ms)\n");
    for id in ParamId::ALL {
        let _ = writeln!(out, "(declare-const {} {})", id.label(), param_sort(id));
    }
    for id in ParamId::ALL {
        let mut range = String::from("(or");
        for idx in 1..=domain.len(id) {
            let _ = write!(
                range,
                " (= {} {})",
                id.label(),
                param_value_term(domain, id, idx, rounding)
            );
        }
        range.push(')');
        let _ = writeln!(out, "(assert {range})");
    }

    out.push_str("; stealthiness distance and its domain-restriction ladder\n");
    out.push_str("(declare-const dist Int)\n");
    let _ = writeln!(out, "(assert (and (<= 0 dist) (<= dist {dist_max})))");
    for s in 0..=dist_max {
        let boxes = domain.index_box(s);
        let mut body = String::from("(and");
        for id in ParamId::ALL {
            let (lo, hi) = boxes[id.index()];
            let (lo_t, hi_t) = param_bounds_terms(domain, id, lo, hi, rounding);
            let _ = write!(
                body,
                " (<= {lo_t} {}) (<= {} {hi_t})",
                id.label(),
                id.label()
            );
        }
        body.push(')');
        let _ = writeln!(out, "(assert (=> (<= dist {s}) {body}))");
    }

    let mut signals = Vec::with_capacity(train.len());
    for (j, ((signal, derived), &baseline)) in train
        .signals
        .iter()
        .zip(&train.derived)
        .zip(&train.baseline_reach)
        .enumerate()
    {
        emit_signal(&mut out, j, signal, derived, baseline);
        signals.push(SmtSignalInfo {
            id: signal.id.clone(),
            n_cycles: signal.n(),
            baseline_reach: baseline,
        });
    }

    match mode {
        SmtMode::MaxEffAtDist(s) => {
            let _ = writeln!(out, "(assert (<= dist {}))", s.min(dist_max));
        }
        SmtMode::Pareto => {
            out.push_str("(minimize dist)\n");
        }
    }

    let check_sat_offset = out.len();
    out.push_str("(check-sat)\n(get-objectives)\n(get-model)\n");

    SmtDocument {
        text: out,
        metadata: SmtMetadata {
            signals,
            dist_var: String::from("dist"),
            soft_group: String::from("effectiveness"),
            dist_max,
            mode,
            rounding,
            check_sat_offset,
        },
    }
}

/// Assertions pinning every parameter to the values a vector selects;
/// spliced before the footer to turn the document into a plain
/// satisfiability check.
pub fn pin_assertions(domain: &ParameterDomain, v: &ParamVector, rounding: RoundingMode) -> String {
    let mut out = String::new();
    for id in ParamId::ALL {
        let _ = writeln!(
            out,
            "(assert (= {} {}))",
            id.label(),
            param_value_term(domain, id, v.get(id), rounding)
        );
    }
    let _ = writeln!(out, "(assert (= dist {}))", domain.distance(v));
    out
}
