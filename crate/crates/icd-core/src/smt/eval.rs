//! Ground checker for emitted documents: with all parameters pinned, the
//! transition assertions must force a unique state trajectory per signal,
//! whose therapy bits can then be compared against the simulator.
//!
//! The checker works purely on the parsed document text plus the declared
//! naming metadata; it does not reuse the emitter's formula builders, so a
//! divergence between what was emitted and what the simulator computes is
//! detected rather than masked.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::params::{ParamId, ParamVector, ParameterDomain, Unit};
use crate::smt::sexp::{parse_all, Sexp};
use crate::smt::{effective_name, state_var, th_name, SmtDocument, StateVar};

/// Exact ground value: booleans or i128 rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Num(Ratio<i128>),
}

impl Value {
    fn as_bool(self) -> Result<bool, EvalError> {
        match self {
            Value::Bool(b) => Ok(b),
            Value::Num(_) => Err(EvalError::Type("expected Bool".to_string())),
        }
    }

    fn as_num(self) -> Result<Ratio<i128>, EvalError> {
        match self {
            Value::Num(n) => Ok(n),
            Value::Bool(_) => Err(EvalError::Type("expected numeric".to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    Parse(String),
    UnknownSymbol(String),
    Type(String),
    Arity(String),
    DivisionByZero,
    /// The assertions admit zero or several successor states: the encoding
    /// does not force the trajectory.
    NotForced {
        signal: usize,
        cycle: usize,
        survivors: usize,
    },
    GlobalAssertionViolated {
        index: usize,
    },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Parse(m) => write!(f, "parse error: {m}"),
            EvalError::UnknownSymbol(s) => write!(f, "unknown symbol {s}"),
            EvalError::Type(m) => write!(f, "type error: {m}"),
            EvalError::Arity(op) => write!(f, "wrong arity for {op}"),
            EvalError::DivisionByZero => write!(f, "division by zero"),
            EvalError::NotForced {
                signal,
                cycle,
                survivors,
            } => write!(
                f,
                "state of signal {signal} at cycle {cycle} not forced \
                 ({survivors} candidate states satisfy the step)"
            ),
            EvalError::GlobalAssertionViolated { index } => {
                write!(f, "pinned parameters violate global assertion #{index}")
            }
        }
    }
}

pub(crate) fn parse_numeral(s: &str) -> Option<Ratio<i128>> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    if body.is_empty() {
        return None;
    }
    let ratio = match body.split_once('.') {
        None => Ratio::from_integer(body.parse::<i128>().ok()?),
        Some((int, frac)) => {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let scale = 10i128.checked_pow(frac.len() as u32)?;
            let int: i128 = if int.is_empty() { 0 } else { int.parse().ok()? };
            Ratio::new(int * scale + frac.parse::<i128>().ok()?, scale)
        }
    };
    Some(if neg { -ratio } else { ratio })
}

/// Evaluation context: committed constant values plus zero-argument
/// definitions, memoized once their dependencies are committed.
struct Env<'a> {
    values: BTreeMap<String, Value>,
    defs: &'a BTreeMap<String, Sexp>,
}

impl Env<'_> {
    fn eval(&mut self, term: &Sexp) -> Result<Value, EvalError> {
        match term {
            Sexp::Atom(a) => {
                if let Some(v) = self.values.get(a.as_str()) {
                    return Ok(*v);
                }
                match a.as_str() {
                    "true" => return Ok(Value::Bool(true)),
                    "false" => return Ok(Value::Bool(false)),
                    _ => {}
                }
                let defs = self.defs;
                if let Some(def) = defs.get(a.as_str()) {
                    let v = self.eval(def)?;
                    self.values.insert(a.clone(), v);
                    return Ok(v);
                }
                parse_numeral(a)
                    .map(Value::Num)
                    .ok_or_else(|| EvalError::UnknownSymbol(a.clone()))
            }
            Sexp::List(items) => {
                let op = items
                    .first()
                    .and_then(Sexp::atom)
                    .ok_or_else(|| EvalError::Type("empty application".to_string()))?;
                self.apply(op, &items[1..])
            }
        }
    }

    fn apply(&mut self, op: &str, args: &[Sexp]) -> Result<Value, EvalError> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(EvalError::Arity(op.to_owned()))
            }
        };
        match op {
            "not" => {
                arity(1)?;
                Ok(Value::Bool(!self.eval(&args[0])?.as_bool()?))
            }
            "and" => {
                for a in args {
                    if !self.eval(a)?.as_bool()? {
                        return Ok(Value::Bool(false));
                    }
                }
                Ok(Value::Bool(true))
            }
            "or" => {
                for a in args {
                    if self.eval(a)?.as_bool()? {
                        return Ok(Value::Bool(true));
                    }
                }
                Ok(Value::Bool(false))
            }
            "=>" => {
                if args.is_empty() {
                    return Err(EvalError::Arity(op.to_owned()));
                }
                let mut result = self.eval(args.last().unwrap())?.as_bool()?;
                for a in args[..args.len() - 1].iter().rev() {
                    result = !self.eval(a)?.as_bool()? || result;
                }
                Ok(Value::Bool(result))
            }
            "xor" => {
                arity(2)?;
                let a = self.eval(&args[0])?.as_bool()?;
                let b = self.eval(&args[1])?.as_bool()?;
                Ok(Value::Bool(a ^ b))
            }
            "ite" => {
                arity(3)?;
                if self.eval(&args[0])?.as_bool()? {
                    self.eval(&args[1])
                } else {
                    self.eval(&args[2])
                }
            }
            "=" => {
                if args.len() < 2 {
                    return Err(EvalError::Arity(op.to_owned()));
                }
                let first = self.eval(&args[0])?;
                for a in &args[1..] {
                    let v = self.eval(a)?;
                    let eq = match (first, v) {
                        (Value::Bool(x), Value::Bool(y)) => x == y,
                        (Value::Num(x), Value::Num(y)) => x == y,
                        _ => return Err(EvalError::Type("= across sorts".to_string())),
                    };
                    if !eq {
                        return Ok(Value::Bool(false));
                    }
                }
                Ok(Value::Bool(true))
            }
            "distinct" => {
                arity(2)?;
                let x = self.eval(&args[0])?;
                let y = self.eval(&args[1])?;
                match (x, y) {
                    (Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(a != b)),
                    (Value::Num(a), Value::Num(b)) => Ok(Value::Bool(a != b)),
                    _ => Err(EvalError::Type("distinct across sorts".to_string())),
                }
            }
            "<" | "<=" | ">" | ">=" => {
                if args.len() < 2 {
                    return Err(EvalError::Arity(op.to_owned()));
                }
                let mut prev = self.eval(&args[0])?.as_num()?;
                for a in &args[1..] {
                    let next = self.eval(a)?.as_num()?;
                    let ok = match op {
                        "<" => prev < next,
                        "<=" => prev <= next,
                        ">" => prev > next,
                        _ => prev >= next,
                    };
                    if !ok {
                        return Ok(Value::Bool(false));
                    }
                    prev = next;
                }
                Ok(Value::Bool(true))
            }
            "+" => {
                let mut acc = Ratio::zero();
                for a in args {
                    acc += self.eval(a)?.as_num()?;
                }
                Ok(Value::Num(acc))
            }
            "*" => {
                let mut acc = Ratio::one();
                for a in args {
                    acc *= self.eval(a)?.as_num()?;
                }
                Ok(Value::Num(acc))
            }
            "-" => match args.len() {
                1 => Ok(Value::Num(-self.eval(&args[0])?.as_num()?)),
                2 => Ok(Value::Num(
                    self.eval(&args[0])?.as_num()? - self.eval(&args[1])?.as_num()?,
                )),
                _ => Err(EvalError::Arity(op.to_owned())),
            },
            "/" => {
                arity(2)?;
                let num = self.eval(&args[0])?.as_num()?;
                let den = self.eval(&args[1])?.as_num()?;
                if den.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(Value::Num(num / den))
            }
            "abs" => {
                arity(1)?;
                Ok(Value::Num(self.eval(&args[0])?.as_num()?.abs()))
            }
            "to_real" => {
                arity(1)?;
                self.eval(&args[0])
            }
            _ => Err(EvalError::UnknownSymbol(op.to_owned())),
        }
    }
}

/// Outcome of checking a pinned document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinnedOutcome {
    /// Forced therapy bits, one sequence per signal.
    pub therapy: Vec<Vec<bool>>,
    /// Per-signal soft-constraint truth (reachability flipped vs baseline).
    pub effective: Vec<bool>,
    /// How many soft constraints the pinned assignment satisfies.
    pub satisfied_soft: usize,
}

/// Parsed document ready for repeated pinned checks.
pub struct GroundChecker {
    defs: BTreeMap<String, Sexp>,
    /// Hard assertions grouped by the latest (signal, cycle) state they
    /// mention; `None` holds the parameter/distance/ladder constraints.
    buckets: BTreeMap<Option<(usize, usize)>, Vec<Sexp>>,
    soft_terms: Vec<Sexp>,
    n_cycles: Vec<usize>,
}

fn max_state_ref(term: &Sexp, best: &mut Option<(usize, usize)>) {
    match term {
        Sexp::Atom(a) => {
            if let Some((_, j, k)) = crate::smt::parse_state_var(a) {
                let cand = (j, k);
                if best.is_none_or(|b| cand > b) {
                    *best = Some(cand);
                }
            }
        }
        Sexp::List(items) => {
            for t in items {
                max_state_ref(t, best);
            }
        }
    }
}

/// Collects candidate values for `var` from equality atoms inside a term.
fn equality_candidates(term: &Sexp, var: &str, env: &mut Env, out: &mut Vec<Ratio<i128>>) {
    if let Sexp::List(items) = term {
        if items.len() == 3 && items[0].atom() == Some("=") {
            for (a, b) in [(&items[1], &items[2]), (&items[2], &items[1])] {
                if a.atom() == Some(var) {
                    if let Ok(Value::Num(v)) = env.eval(b) {
                        if !out.contains(&v) {
                            out.push(v);
                        }
                    }
                }
            }
        }
        for t in items {
            equality_candidates(t, var, env, out);
        }
    }
}

impl GroundChecker {
    pub fn parse(doc: &SmtDocument) -> Result<Self, EvalError> {
        let forms = parse_all(&doc.text).map_err(|e| EvalError::Parse(e.to_string()))?;
        let mut defs = BTreeMap::new();
        let mut buckets: BTreeMap<Option<(usize, usize)>, Vec<Sexp>> = BTreeMap::new();
        let mut soft_terms = Vec::new();
        for form in forms {
            match form.head() {
                Some("define-fun") => {
                    let items = form.list().unwrap();
                    if items.len() != 5 {
                        return Err(EvalError::Parse("malformed define-fun".to_string()));
                    }
                    let name = items[1]
                        .atom()
                        .ok_or_else(|| EvalError::Parse("define-fun name".to_string()))?;
                    if !items[2].list().is_some_and(|l| l.is_empty()) {
                        return Err(EvalError::Parse(format!(
                            "define-fun {name} takes arguments; only constants are supported"
                        )));
                    }
                    defs.insert(name.to_string(), items[4].clone());
                }
                Some("assert") => {
                    let items = form.list().unwrap();
                    if items.len() != 2 {
                        return Err(EvalError::Parse("malformed assert".to_string()));
                    }
                    let mut key = None;
                    max_state_ref(&items[1], &mut key);
                    buckets.entry(key).or_default().push(items[1].clone());
                }
                Some("assert-soft") => {
                    let items = form.list().unwrap();
                    if items.len() < 2 {
                        return Err(EvalError::Parse("malformed assert-soft".to_string()));
                    }
                    soft_terms.push(items[1].clone());
                }
                _ => {} // options, declarations, objectives, footer
            }
        }
        let n_cycles = doc.metadata.signals.iter().map(|s| s.n_cycles).collect();
        Ok(GroundChecker {
            defs,
            buckets,
            soft_terms,
            n_cycles,
        })
    }

    /// Pins every parameter to the values `v` selects and forward-constructs
    /// the forced state trajectory of each signal, cycle by cycle: all
    /// candidate successor states are filtered through the step's
    /// assertions and exactly one must survive.
    pub fn check_pinned(
        &self,
        domain: &ParameterDomain,
        v: &ParamVector,
        doc: &SmtDocument,
    ) -> Result<PinnedOutcome, EvalError> {
        let rounding = doc.metadata.rounding;
        let mut values: BTreeMap<String, Value> = BTreeMap::new();
        for id in ParamId::ALL {
            let scaled = domain.value_scaled(id, v.get(id));
            let val = match domain.spec(id).unit {
                Unit::Bpm | Unit::Seconds => {
                    Ratio::from_integer(domain.scaled_to_algorithm(id, scaled, rounding) as i128)
                }
                Unit::Score => Ratio::new(scaled as i128, 100),
                Unit::MsSq => Ratio::from_integer(scaled as i128),
            };
            values.insert(id.label().to_string(), Value::Num(val));
        }
        values.insert(
            doc.metadata.dist_var.clone(),
            Value::Num(Ratio::from_integer(domain.distance(v) as i128)),
        );

        let mut env = Env {
            values,
            defs: &self.defs,
        };

        // global constraints must hold for an on-grid assignment
        if let Some(globals) = self.buckets.get(&None) {
            for (index, term) in globals.iter().enumerate() {
                if !env.eval(term)?.as_bool()? {
                    return Err(EvalError::GlobalAssertionViolated { index });
                }
            }
        }

        let mut therapy = Vec::with_capacity(self.n_cycles.len());
        for (j, &n) in self.n_cycles.iter().enumerate() {
            for k in 0..=n {
                self.force_state(&mut env, j, k)?;
            }
            let mut bits = Vec::with_capacity(n);
            for k in 0..n {
                bits.push(env.eval(&Sexp::Atom(th_name(j, k)))?.as_bool()?);
            }
            therapy.push(bits);
        }

        let mut effective = Vec::with_capacity(self.n_cycles.len());
        for j in 0..self.n_cycles.len() {
            effective.push(env.eval(&Sexp::Atom(effective_name(j)))?.as_bool()?);
        }
        // cross-check against the raw soft-constraint terms
        let mut satisfied_soft = 0usize;
        for t in &self.soft_terms {
            if env.eval(t)?.as_bool()? {
                satisfied_soft += 1;
            }
        }
        Ok(PinnedOutcome {
            therapy,
            effective,
            satisfied_soft,
        })
    }

    /// Determines the unique state of signal `j` at cycle `k` admitted by
    /// the assertions constraining it, extending the environment.
    fn force_state(&self, env: &mut Env, j: usize, k: usize) -> Result<(), EvalError> {
        let asserts = self
            .buckets
            .get(&Some((j, k)))
            .ok_or(EvalError::NotForced {
                signal: j,
                cycle: k,
                survivors: 0,
            })?;

        let names: [String; 4] = [
            state_var(StateVar::VfD, j, k),
            state_var(StateVar::VtD, j, k),
            state_var(StateVar::TVf, j, k),
            state_var(StateVar::TVt, j, k),
        ];

        // candidate clock values come from the equality atoms; 0 and 1 are
        // added so an unconstrained clock shows up as multiple survivors
        let mut clock_cands: [Vec<Ratio<i128>>; 2] = [Vec::new(), Vec::new()];
        for (slot, name) in names[2..].iter().enumerate() {
            let cands = &mut clock_cands[slot];
            for a in asserts {
                equality_candidates(a, name, env, cands);
            }
            for extra in [Ratio::zero(), Ratio::one()] {
                if !cands.contains(&extra) {
                    cands.push(extra);
                }
            }
        }

        let mut survivor: Option<[Value; 4]> = None;
        let mut survivors = 0usize;
        for vfd in [false, true] {
            for vtd in [false, true] {
                for tvf in &clock_cands[0] {
                    for tvt in &clock_cands[1] {
                        let cand = [
                            Value::Bool(vfd),
                            Value::Bool(vtd),
                            Value::Num(*tvf),
                            Value::Num(*tvt),
                        ];
                        for (name, val) in names.iter().zip(cand.iter()) {
                            env.values.insert(name.clone(), *val);
                        }
                        let mut ok = true;
                        for a in asserts {
                            if !env.eval(a)?.as_bool()? {
                                ok = false;
                                break;
                            }
                        }
                        if ok {
                            survivors += 1;
                            survivor = Some(cand);
                        }
                    }
                }
            }
        }
        match (survivor, survivors) {
            (Some(cand), 1) => {
                for (name, val) in names.iter().zip(cand.iter()) {
                    env.values.insert(name.clone(), *val);
                }
                Ok(())
            }
            (_, survivors) => {
                for name in &names {
                    env.values.remove(name);
                }
                Err(EvalError::NotForced {
                    signal: j,
                    cycle: k,
                    survivors,
                })
            }
        }
    }
}
