//! The finite programmable parameter space of the device (Table-1 style
//! value lists), index arithmetic, the stealthiness distance and
//! distance-bounded index boxes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::discrim::Params;

/// The seven programmable parameters, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamId {
    VfTh,
    VtTh,
    AfibTh,
    VfDur,
    VtDur,
    NsrCorTh,
    Stb,
}

impl ParamId {
    pub const ALL: [ParamId; 7] = [
        ParamId::VfTh,
        ParamId::VtTh,
        ParamId::AfibTh,
        ParamId::VfDur,
        ParamId::VtDur,
        ParamId::NsrCorTh,
        ParamId::Stb,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&p| p == self).unwrap()
    }

    /// Canonical name, as used in reports and the SMT encoding.
    pub fn label(self) -> &'static str {
        match self {
            ParamId::VfTh => "VF_th",
            ParamId::VtTh => "VT_th",
            ParamId::AfibTh => "AFib_th",
            ParamId::VfDur => "VFdur",
            ParamId::VtDur => "VTdur",
            ParamId::NsrCorTh => "NSRcor_th",
            ParamId::Stb => "stb",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|p| p.label() == s)
    }
}

/// Programmed unit of a parameter; determines how scaled values are stored.
///
/// Scaled representation: `Bpm` keeps beats-per-minute as-is, `Seconds`
/// stores milliseconds, `Score` stores hundredths, `MsSq` is unscaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Bpm,
    Seconds,
    Score,
    MsSq,
}

/// How a BPM threshold is converted into the interval duration the algorithm
/// actually compares against.
///
/// Device clocks are integer milliseconds; published tables are consistent
/// with `Ceil`, while `HalfUp` rounds the exact rational `60000 / BPM` to the
/// nearest millisecond. The choice only affects boundary intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundingMode {
    #[default]
    HalfUp,
    Ceil,
}

/// Converts a BPM rate threshold to integer milliseconds.
pub fn bpm_to_ms(bpm: i64, mode: RoundingMode) -> i64 {
    debug_assert!(bpm > 0);
    match mode {
        RoundingMode::HalfUp => (120_000 + bpm) / (2 * bpm),
        RoundingMode::Ceil => (60_000 + bpm - 1) / bpm,
    }
}

/// One parameter's ordered programmable value list (scaled integers,
/// strictly ascending in the programmed unit) plus its nominal index
/// (1-based, mirroring the index arithmetic of the distance metric).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub unit: Unit,
    pub values: Vec<i64>,
    pub nominal_idx: u8,
}

/// Errors from building a parameter domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainError {
    Empty {
        param: &'static str,
    },
    TooManyValues {
        param: &'static str,
        len: usize,
    },
    NotAscending {
        param: &'static str,
        index: usize,
    },
    NominalOutOfRange {
        param: &'static str,
        nominal_idx: u8,
        len: usize,
    },
    MsCollision {
        param: &'static str,
        a: i64,
        b: i64,
    },
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainError::Empty { param } => write!(f, "{param}: empty value list"),
            DomainError::TooManyValues { param, len } => {
                write!(f, "{param}: {len} values exceed the supported 255")
            }
            DomainError::NotAscending { param, index } => {
                write!(
                    f,
                    "{param}: values not strictly ascending at position {index}"
                )
            }
            DomainError::NominalOutOfRange {
                param,
                nominal_idx,
                len,
            } => {
                write!(f, "{param}: nominal index {nominal_idx} outside 1..={len}")
            }
            DomainError::MsCollision { param, a, b } => {
                write!(
                    f,
                    "{param}: programmed values {a} and {b} map to the same millisecond threshold"
                )
            }
        }
    }
}

/// An index-valued parameter assignment: 1-based indices into the seven
/// domain lists, ordered as [`ParamId::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamVector(pub [u8; 7]);

impl ParamVector {
    pub fn get(&self, id: ParamId) -> u8 {
        self.0[id.index()]
    }

    pub fn set(&mut self, id: ParamId, idx: u8) {
        self.0[id.index()] = idx;
    }
}

/// The full programmable space: one [`ParamSpec`] per parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterDomain {
    specs: [ParamSpec; 7],
}

impl ParameterDomain {
    /// Validates list ordering, nominal membership and (for BPM-programmed
    /// parameters) injectivity of the millisecond conversion under both
    /// rounding modes, which the distance-box encoding relies on.
    pub fn new(specs: [ParamSpec; 7]) -> Result<Self, DomainError> {
        for (id, spec) in ParamId::ALL.iter().zip(specs.iter()) {
            let param = id.label();
            let len = spec.values.len();
            if len == 0 {
                return Err(DomainError::Empty { param });
            }
            if len > u8::MAX as usize {
                return Err(DomainError::TooManyValues { param, len });
            }
            for i in 1..len {
                if spec.values[i] <= spec.values[i - 1] {
                    return Err(DomainError::NotAscending { param, index: i });
                }
            }
            if spec.nominal_idx == 0 || spec.nominal_idx as usize > len {
                return Err(DomainError::NominalOutOfRange {
                    param,
                    nominal_idx: spec.nominal_idx,
                    len,
                });
            }
            if spec.unit == Unit::Bpm {
                for mode in [RoundingMode::HalfUp, RoundingMode::Ceil] {
                    for i in 1..len {
                        if bpm_to_ms(spec.values[i], mode) == bpm_to_ms(spec.values[i - 1], mode) {
                            return Err(DomainError::MsCollision {
                                param,
                                a: spec.values[i - 1],
                                b: spec.values[i],
                            });
                        }
                    }
                }
            }
        }
        Ok(ParameterDomain { specs })
    }

    pub fn spec(&self, id: ParamId) -> &ParamSpec {
        &self.specs[id.index()]
    }

    /// Number of programmable values for a parameter.
    pub fn len(&self, id: ParamId) -> u8 {
        self.spec(id).values.len() as u8
    }

    /// Scaled programmed value at a 1-based index.
    pub fn value_scaled(&self, id: ParamId, idx1: u8) -> i64 {
        self.spec(id).values[idx1 as usize - 1]
    }

    /// The nominal (default) assignment.
    pub fn nominal(&self) -> ParamVector {
        let mut v = [0u8; 7];
        for (i, spec) in self.specs.iter().enumerate() {
            v[i] = spec.nominal_idx;
        }
        ParamVector(v)
    }

    /// The value a vector selects, converted to the millisecond/scaled form
    /// the algorithm compares against.
    pub fn scaled_to_algorithm(&self, id: ParamId, scaled: i64, mode: RoundingMode) -> i64 {
        match self.spec(id).unit {
            Unit::Bpm => bpm_to_ms(scaled, mode),
            Unit::Seconds | Unit::Score | Unit::MsSq => scaled,
        }
    }

    /// Materializes a vector into concrete algorithm parameters.
    pub fn to_params(&self, v: &ParamVector, mode: RoundingMode) -> Params {
        let alg =
            |id: ParamId| self.scaled_to_algorithm(id, self.value_scaled(id, v.get(id)), mode);
        Params {
            vf_th_ms: alg(ParamId::VfTh),
            vt_th_ms: alg(ParamId::VtTh),
            afib_th_ms: alg(ParamId::AfibTh),
            vfdur_ms: alg(ParamId::VfDur),
            vtdur_ms: alg(ParamId::VtDur),
            nsrcor_hundredths: alg(ParamId::NsrCorTh),
            stb_ms2: alg(ParamId::Stb),
        }
    }

    /// Stealthiness distance: max over parameters of |I_i - I*_i|.
    pub fn distance(&self, v: &ParamVector) -> u32 {
        ParamId::ALL
            .iter()
            .map(|&id| {
                let d = v.get(id) as i32 - self.spec(id).nominal_idx as i32;
                d.unsigned_abs()
            })
            .max()
            .unwrap()
    }

    /// Largest achievable distance given nominal indices and list lengths.
    pub fn dist_max(&self) -> u32 {
        self.specs
            .iter()
            .map(|s| {
                let n = s.values.len() as u32;
                let i = s.nominal_idx as u32;
                (n - i).max(i - 1)
            })
            .max()
            .unwrap()
    }

    /// Per-parameter clamped 1-based index intervals containing every
    /// assignment at distance at most `s`.
    pub fn index_box(&self, s: u32) -> [(u8, u8); 7] {
        let mut out = [(1u8, 1u8); 7];
        for (i, spec) in self.specs.iter().enumerate() {
            let n = spec.values.len() as i64;
            let nom = spec.nominal_idx as i64;
            let lo = (nom - s as i64).max(1);
            let hi = (nom + s as i64).min(n);
            out[i] = (lo as u8, hi as u8);
        }
        out
    }

    /// Total number of grid points.
    pub fn grid_size(&self) -> u128 {
        self.specs.iter().map(|s| s.values.len() as u128).product()
    }

    /// Looks up the 1-based index of a scaled programmed value.
    pub fn index_of_scaled(&self, id: ParamId, scaled: i64) -> Option<u8> {
        self.spec(id)
            .values
            .iter()
            .position(|&v| v == scaled)
            .map(|i| (i + 1) as u8)
    }

    /// Looks up the index whose algorithm-side (ms/scaled) value matches.
    pub fn index_of_algorithm_value(
        &self,
        id: ParamId,
        value: i64,
        mode: RoundingMode,
    ) -> Option<u8> {
        (1..=self.len(id))
            .find(|&i| self.scaled_to_algorithm(id, self.value_scaled(id, i), mode) == value)
    }

    /// Renders a programmed value for reports (BPM and ms^2 as integers,
    /// durations in seconds, scores with two decimals).
    pub fn render_value(&self, id: ParamId, idx1: u8) -> String {
        let v = self.value_scaled(id, idx1);
        match self.spec(id).unit {
            Unit::Bpm | Unit::MsSq => format!("{v}"),
            Unit::Seconds => {
                if v % 1000 == 0 {
                    format!("{}", v / 1000)
                } else {
                    format!("{}.{}", v / 1000, (v % 1000) / 100)
                }
            }
            Unit::Score => format!("{}.{:02}", v / 100, v % 100),
        }
    }
}

fn seq(lo: i64, step: i64, hi: i64) -> impl Iterator<Item = i64> {
    (0..)
        .map(move |i| lo + i * step)
        .take_while(move |&v| v <= hi)
}

/// Materializes the device's full programmable table.
///
/// Rate thresholds are programmed in BPM, durations in seconds (stored as
/// milliseconds), the Rhythm Match score in hundredths, stability in ms^2.
pub fn expand_domains() -> ParameterDomain {
    let vf_th: Vec<i64> = seq(110, 5, 210).chain(seq(220, 10, 250)).collect();
    let vt_th: Vec<i64> = seq(90, 5, 210).chain(core::iter::once(220)).collect();
    let afib_th: Vec<i64> = seq(100, 10, 300).collect();
    let vfdur: Vec<i64> = seq(1000, 500, 5000)
        .chain(seq(6000, 1000, 15_000))
        .collect();
    let vtdur: Vec<i64> = seq(1000, 500, 5000)
        .chain(seq(6000, 1000, 15_000))
        .chain(seq(20_000, 5000, 30_000))
        .collect();
    let nsrcor: Vec<i64> = seq(70, 1, 96).collect();
    let stb: Vec<i64> = seq(6, 2, 32)
        .chain(seq(35, 5, 60))
        .chain(seq(70, 10, 120))
        .collect();

    let nominal_of = |values: &[i64], nominal: i64| -> u8 {
        (values.iter().position(|&v| v == nominal).unwrap() + 1) as u8
    };

    let spec = |unit: Unit, values: Vec<i64>, nominal: i64| {
        let nominal_idx = nominal_of(&values, nominal);
        ParamSpec {
            unit,
            values,
            nominal_idx,
        }
    };

    ParameterDomain::new([
        spec(Unit::Bpm, vf_th, 200),
        spec(Unit::Bpm, vt_th, 160),
        spec(Unit::Bpm, afib_th, 170),
        spec(Unit::Seconds, vfdur, 1000),
        spec(Unit::Seconds, vtdur, 2500),
        spec(Unit::Score, nsrcor, 94),
        spec(Unit::MsSq, stb, 20),
    ])
    .expect("built-in table is well-formed")
}
