use thiserror::Error;

/// Axis of a grid or cube, used to name the offending dimension in errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Vertical,
    Horizontal,
    Depth,
    Signal,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::Vertical => "vertical",
            Axis::Horizontal => "horizontal",
            Axis::Depth => "depth",
            Axis::Signal => "signal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StpError {
    #[error("a vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite value {value} at position {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("expansion multiplicity must be positive")]
    ZeroMultiplicity,

    #[error("lcm({m}, {n}) overflows usize")]
    LcmOverflow { m: usize, n: usize },

    #[error("{what} must be positive")]
    ZeroSize { what: &'static str },

    #[error("{what}: expected {expected} cells, got {got}")]
    CellCount {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("ragged {what}: row {row} has {got} entries, expected {expected}")]
    Ragged {
        what: &'static str,
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("{axis} extent {extent} cannot be tiled by windows of {window} with stride {stride}")]
    StrideMismatch {
        axis: Axis,
        extent: usize,
        window: usize,
        stride: usize,
    },

    #[error("{what}: {left_rows}x{left_cols} does not match {right_rows}x{right_cols}")]
    ShapeMismatch {
        what: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("window step {d} exceeds window length {eta}")]
    StepExceedsWindow { d: usize, eta: usize },

    #[error("window ({i}, {j}) outside the {rows}x{cols} window grid")]
    WindowOutOfRange {
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
    },

    #[error("kernel has an undefined cell at ({row}, {col})")]
    UndefinedKernelCell { row: usize, col: usize },

    #[error("classical mode requires fully defined input; cell ({row}, {col}) is undefined")]
    UndefinedInputCell { row: usize, col: usize },

    #[error(
        "receptive field {rf_rows}x{rf_cols} must equal kernel {k_rows}x{k_cols} in classical mode"
    )]
    ReceptiveFieldMismatch {
        rf_rows: usize,
        rf_cols: usize,
        k_rows: usize,
        k_cols: usize,
    },

    #[error("operation requires {expected} mode")]
    WrongMode { expected: &'static str },

    #[error("selector row {row} has {ones} ones; selection needs exactly one")]
    NotSelective { row: usize, ones: usize },

    #[error("depth padding {0} is odd; it must split evenly between both sides")]
    OddDepthPadding(usize),

    #[error("filter list is empty")]
    EmptyFilters,

    #[error("input channels have different shapes")]
    ChannelShape,
}

pub type Result<T> = std::result::Result<T, StpError>;
