use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown divisor kind `{0}`")]
    UnknownKind(String),

    #[error("malformed parameters for `{kind}`: {reason}")]
    MalformedParams { kind: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("t = {t} exceeds the valid range {valid} of the profile")]
    OutOfRange { t: f64, valid: f64 },

    #[error("truncation radius {given} is too small, need at least {required}")]
    InsufficientRadius { given: f64, required: f64 },

    #[error("the divisor has an atom at the origin")]
    ZeroInSupport,

    #[error("grid point ({re}, {im}) lies within {min_dist} of an atom")]
    NearAtom { re: f64, im: f64, min_dist: f64 },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("atom ({re}, {im}) lies outside the strip |Im z| <= {height}")]
    NotStripConfined { re: f64, im: f64, height: f64 },

    #[error("only {found} atoms available, need {needed}")]
    TooFewAtoms { found: usize, needed: usize },

    #[error("index window exceeded: need |k| <= {needed}, fit covers |k| <= {available}")]
    WindowExceeded { needed: i64, available: i64 },

    #[error("sample window too short: {0}")]
    WindowTooShort(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
