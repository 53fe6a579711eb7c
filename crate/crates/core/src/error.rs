use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("invalid dependency parse for sentence `{sentence_id}`: {reason}")]
    InvalidParse { sentence_id: String, reason: String },

    #[error("missing dependency parse for sentence `{0}`")]
    MissingParse(String),

    #[error("invalid embeddings for `{id}`: {reason}")]
    InvalidEmbeddings { id: String, reason: String },

    #[error("id sets differ; missing ids: {}", .0.join(", "))]
    IdMismatch(Vec<String>),

    #[error(
        "not enough multi-reference pairs: need {needed} for validation+test, have {available} (short by {})",
        needed - available
    )]
    MultiRefShortfall { needed: usize, available: usize },

    #[error("no sentence pairs left after removing pairs without references")]
    NoData,

    #[error("value {0} is not a quantized control-token value")]
    Unquantized(f64),

    #[error("generator failed: {0}")]
    Generator(String),

    #[error("generator returned {got} outputs for {expected} inputs")]
    GeneratorOutputCount { expected: usize, got: usize },

    #[error("singular normal equations; use a positive ridge penalty")]
    SingularSystem,

    #[error("missing output for item `{id}` from system `{system}`")]
    MissingOutput { id: String, system: String },

    #[error("unknown annotator `{0}`")]
    UnknownAnnotator(String),

    #[error("missing rating: item `{item_id}`, annotator `{annotator_id}`, slot {slot}")]
    MissingRating {
        item_id: String,
        annotator_id: String,
        slot: char,
    },

    #[error("duplicate rating: item `{item_id}`, annotator `{annotator_id}`, slot {slot}")]
    DuplicateRating {
        item_id: String,
        annotator_id: String,
        slot: char,
    },

    #[error("score {0} outside the 1..=5 Likert range")]
    LikertOutOfRange(u8),

    #[error("not enough pairable ratings to compute agreement")]
    NoPairableRatings,

    #[error("duplicate curve point for system `{system}` at epoch {epoch}")]
    DuplicateCurvePoint { system: String, epoch: u32 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
