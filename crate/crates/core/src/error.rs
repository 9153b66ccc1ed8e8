use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{col}: syntax error: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("{line}:{col}: rule head `{head}` is not a normal formula")]
    NonNormalHead { line: usize, col: usize, head: String },

    #[error("{line}:{col}: time point must be at least 1")]
    TimeZero { line: usize, col: usize },

    #[error("time point must be at least 1")]
    InvalidTimePoint,

    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),

    #[error("program must be nonempty")]
    EmptyProgram,

    #[error("formula `{0}` is not normal")]
    NotNormal(String),

    #[error("{what}: {count} cells exceed the enumeration bound of {bound}")]
    BoundExceeded {
        what: &'static str,
        count: usize,
        bound: usize,
    },

    #[error("lower stream is not a substream of the upper stream")]
    InvalidThreeValued,

    #[error("stream is not an interpretation stream: data stream is not contained in it")]
    NotInterpretation,

    #[error("stream is not a {0}-model of the program")]
    NotTModel(u32),

    #[error("time point {t} lies outside the interval {interval}")]
    TimeOutsideInterval { t: u32, interval: String },

    #[error("interval {0} must be finite and nonempty")]
    BadInterval(String),

    #[error("marker atom `{0}` already occurs in the program or data")]
    MarkerCollision(String),

    #[error("program is not ordinary: {0}")]
    NotOrdinary(String),

    #[error("invalid partitioning: {0}")]
    InvalidPartitioning(String),

    #[error("line {line}: {msg}")]
    StreamFormat { line: usize, msg: String },

    #[error("exhaustive enumeration supports at most 64 rules, program has {0}")]
    TooManyRules(usize),
}
