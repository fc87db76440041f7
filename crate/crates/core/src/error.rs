use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corner exceeds support: corner side {corner} on a {width}x{height} patch")]
    CornerExceedsSupport { corner: usize, width: usize, height: usize },

    #[error("2Z-property violated at ({x}, {y})")]
    TwoZViolated { x: i64, y: i64 },

    #[error("map is not injective: ({x1}, {y1}) and ({x2}, {y2}) share an image")]
    NotInjective { x1: i64, y1: i64, x2: i64, y2: i64 },

    #[error("point ({x}, {y}) is outside the map domain")]
    OutsideDomain { x: i64, y: i64 },

    #[error("empty pair list")]
    EmptyPairs,

    #[error("degenerate pair: both points are ({x}, {y})")]
    DegeneratePair { x: i64, y: i64 },

    #[error("memory cap exceeded: {required} cells required, cap is {cap}")]
    CapExceeded { required: u128, cap: u128 },

    #[error("needle of size {needle_w}x{needle_h} is larger than target {target_w}x{target_h}")]
    NeedleTooLarge { needle_w: usize, needle_h: usize, target_w: usize, target_h: usize },

    #[error("needle side {0} does not match the side of any hierarchy level")]
    NeedleNotALevel(usize),

    #[error("level {level} is outside the hierarchy (depth {depth})")]
    NoSuchLevel { level: usize, depth: usize },

    #[error("patch id {id} does not exist at level {level}")]
    NoSuchPatch { level: usize, id: usize },

    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("degenerate baseline vector: f(2MN,0) = f(0,0)")]
    DegenerateBaseline,

    #[error("no separation found at this depth")]
    NoSeparation,

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("target box too small: {points} points, {targets} targets")]
    BoxTooSmall { points: usize, targets: usize },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
