use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("trace has no fingers")]
    NoFingers,
    #[error("finger {finger} has {found} distinct samples, need at least {required}")]
    TooFewSamples {
        finger: usize,
        found: usize,
        required: usize,
    },
    #[error("finger {finger}: timestamp {t_ms} ms does not follow {prev_ms} ms")]
    NonMonotonicTime { finger: usize, t_ms: f64, prev_ms: f64 },
    #[error("finger {finger}: point ({x}, {y}) lies outside the {width}x{height} screen")]
    OutOfBounds {
        finger: usize,
        x: f64,
        y: f64,
        width: u32,
        height: u32,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid {field}: {reason}")]
    InvalidField { field: &'static str, reason: String },
    #[error("resampling grid has {frames} frames, need at least 2")]
    DegenerateGrid { frames: usize },
    #[error("finger count mismatch: expected {expected}, found {found}")]
    FingerCountMismatch { expected: usize, found: usize },
    #[error("fingers have unequal frame counts")]
    RaggedFingers,
    #[error("sequence has {len} frames, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("total variance is zero")]
    ZeroVariance,
    #[error("only {found} effective aligned pairs, need at least {min}")]
    TooFewPairs { found: usize, min: usize },
    #[error("stroke has zero path length")]
    ZeroLengthStroke,
    #[error("template set is empty")]
    EmptyTemplateSet,
    #[error("template set holds {0} templates, allowed range is 1..=10")]
    TemplateCount(usize),
    #[error("every pair in the group is incomparable")]
    AllIncomparable,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("missing {0} group")]
    MissingGroup(&'static str),
    #[error("corpus needs at least one genuine and one impostor trial")]
    DegenerateCorpus,
}
