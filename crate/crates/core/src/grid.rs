//! Masked 2D and 3D containers, padding, window extraction and the
//! available-entry vectorization.
//!
//! Cells are `Option<f64>`: `None` is an undefined cell (damaged pixel,
//! outside an irregular image, or STP-mode padding). Undefined cells never
//! take part in arithmetic.
//!
//! Vectorization order is column-major: columns left to right, rows top to
//! bottom within a column, skipping undefined cells. For a stack of depth
//! slices the slice index sits between the column and the row.

use crate::error::{Axis, Result, StpError};
use crate::xvec::XVector;

pub type Cell = Option<f64>;

/// Row-major 2D grid of real-or-undefined cells.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedGrid {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
}

impl MaskedGrid {
    pub fn new(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<Self> {
        if rows == 0 {
            return Err(StpError::ZeroSize { what: "grid rows" });
        }
        if cols == 0 {
            return Err(StpError::ZeroSize {
                what: "grid columns",
            });
        }
        if cells.len() != rows * cols {
            return Err(StpError::CellCount {
                what: "grid",
                expected: rows * cols,
                got: cells.len(),
            });
        }
        if let Some((index, value)) = cells
            .iter()
            .enumerate()
            .find_map(|(i, c)| c.filter(|v| !v.is_finite()).map(|v| (i, v)))
        {
            return Err(StpError::NonFinite { index, value });
        }
        Ok(MaskedGrid { rows, cols, cells })
    }

    pub fn from_rows(rows: Vec<Vec<Cell>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(StpError::Ragged {
                    what: "grid",
                    row,
                    expected: n_cols,
                    got: r.len(),
                });
            }
        }
        Self::new(n_rows, n_cols, rows.into_iter().flatten().collect())
    }

    /// Fully defined grid from dense rows.
    pub fn dense(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Some).collect())
                .collect(),
        )
    }

    pub fn undefined(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, None)
    }

    pub fn filled(rows: usize, cols: usize, cell: Cell) -> Self {
        assert!(rows > 0 && cols > 0, "grid dimensions must be positive");
        MaskedGrid {
            rows,
            cols,
            cells: vec![cell; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> Cell {
        assert!(row < self.rows && col < self.cols, "cell out of range");
        self.cells[row * self.cols + col]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn to_rows(&self) -> Vec<Vec<Cell>> {
        self.cells.chunks(self.cols).map(<[Cell]>::to_vec).collect()
    }

    pub fn defined_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_fully_defined(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn first_undefined(&self) -> Option<(usize, usize)> {
        self.cells
            .iter()
            .position(Option::is_none)
            .map(|i| (i / self.cols, i % self.cols))
    }

    /// The `height × width` block whose top-left cell is `(row, col)`.
    pub fn subgrid(&self, row: usize, col: usize, height: usize, width: usize) -> MaskedGrid {
        assert!(
            row + height <= self.rows && col + width <= self.cols,
            "subgrid out of range"
        );
        let cells = (row..row + height)
            .flat_map(|r| (col..col + width).map(move |c| (r, c)))
            .map(|(r, c)| self.cells[r * self.cols + c])
            .collect();
        MaskedGrid {
            rows: height,
            cols: width,
            cells,
        }
    }

    /// Marks cells undefined wherever `keep` is `false`.
    pub fn masked(&self, keep: &[bool]) -> Result<MaskedGrid> {
        if keep.len() != self.cells.len() {
            return Err(StpError::CellCount {
                what: "mask",
                expected: self.cells.len(),
                got: keep.len(),
            });
        }
        let cells = self
            .cells
            .iter()
            .zip(keep)
            .map(|(c, &k)| if k { *c } else { None })
            .collect();
        Ok(MaskedGrid { cells, ..*self })
    }

    pub fn map_defined(&self, f: impl Fn(f64) -> f64) -> Result<MaskedGrid> {
        MaskedGrid::new(
            self.rows,
            self.cols,
            self.cells.iter().map(|c| c.map(&f)).collect(),
        )
    }

    /// Vertical concatenation; all parts must share a column count.
    pub fn vstack(parts: &[MaskedGrid]) -> Result<MaskedGrid> {
        let first = parts.first().ok_or(StpError::ZeroSize { what: "stack" })?;
        let mut cells = Vec::new();
        for p in parts {
            if p.cols != first.cols {
                return Err(StpError::ShapeMismatch {
                    what: "vertical stack",
                    left_rows: first.rows,
                    left_cols: first.cols,
                    right_rows: p.rows,
                    right_cols: p.cols,
                });
            }
            cells.extend_from_slice(&p.cells);
        }
        MaskedGrid::new(cells.len() / first.cols, first.cols, cells)
    }

    /// Largest absolute difference over defined cells, or `None` when the
    /// two grids differ in shape or undefined-cell pattern.
    pub fn max_abs_diff(&self, other: &MaskedGrid) -> Option<f64> {
        if self.shape() != other.shape() {
            return None;
        }
        let mut worst = 0.0f64;
        for (a, b) in self.cells.iter().zip(&other.cells) {
            match (a, b) {
                (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
                (None, None) => {}
                _ => return None,
            }
        }
        Some(worst)
    }

    pub fn approx_eq(&self, other: &MaskedGrid, tol: f64) -> bool {
        self.max_abs_diff(other).is_some_and(|d| d <= tol)
    }
}

/// Order-3 array stored as an ordered stack of equally sized depth slices.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedCube {
    slices: Vec<MaskedGrid>,
}

impl MaskedCube {
    pub fn new(slices: Vec<MaskedGrid>) -> Result<Self> {
        let first = slices
            .first()
            .ok_or(StpError::ZeroSize { what: "cube depth" })?;
        if let Some(bad) = slices.iter().find(|s| s.shape() != first.shape()) {
            return Err(StpError::ShapeMismatch {
                what: "cube slice",
                left_rows: first.rows,
                left_cols: first.cols,
                right_rows: bad.rows,
                right_cols: bad.cols,
            });
        }
        Ok(MaskedCube { slices })
    }

    pub fn rows(&self) -> usize {
        self.slices[0].rows
    }

    pub fn cols(&self) -> usize {
        self.slices[0].cols
    }

    pub fn depth(&self) -> usize {
        self.slices.len()
    }

    pub fn slices(&self) -> &[MaskedGrid] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<MaskedGrid> {
        self.slices
    }

    pub fn defined_count(&self) -> usize {
        self.slices.iter().map(MaskedGrid::defined_count).sum()
    }

    pub fn get(&self, row: usize, col: usize, slice: usize) -> Cell {
        self.slices[slice].get(row, col)
    }
}

/// Border fill used by [`enlarge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fill {
    Zero,
    Undefined,
}

impl Fill {
    fn cell(self) -> Cell {
        match self {
            Fill::Zero => Some(0.0),
            Fill::Undefined => None,
        }
    }
}

/// Surrounds `a` with `pad_v` rows above and below and `pad_h` columns left
/// and right.
pub fn enlarge(a: &MaskedGrid, pad_v: usize, pad_h: usize, fill: Fill) -> MaskedGrid {
    let rows = a.rows + 2 * pad_v;
    let cols = a.cols + 2 * pad_h;
    let mut cells = vec![fill.cell(); rows * cols];
    for r in 0..a.rows {
        let dst = (r + pad_v) * cols + pad_h;
        cells[dst..dst + a.cols].copy_from_slice(&a.cells[r * a.cols..(r + 1) * a.cols]);
    }
    MaskedGrid { rows, cols, cells }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Classical,
    Stp,
}

impl Mode {
    pub fn fill(self) -> Fill {
        match self {
            Mode::Classical => Fill::Zero,
            Mode::Stp => Fill::Undefined,
        }
    }
}

/// Padding, stride and receptive-field size for 2D convolution.
///
/// Padding is per side. In classical mode the receptive field must match the
/// kernel; in STP mode it may be any size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvConfig {
    pub pad_v: usize,
    pub pad_h: usize,
    pub stride_v: usize,
    pub stride_h: usize,
    pub rf_rows: usize,
    pub rf_cols: usize,
    pub mode: Mode,
}

impl ConvConfig {
    pub fn new(mode: Mode, rf_rows: usize, rf_cols: usize) -> Self {
        ConvConfig {
            pad_v: 0,
            pad_h: 0,
            stride_v: 1,
            stride_h: 1,
            rf_rows,
            rf_cols,
            mode,
        }
    }

    pub fn classical(rf_rows: usize, rf_cols: usize) -> Self {
        Self::new(Mode::Classical, rf_rows, rf_cols)
    }

    pub fn stp(rf_rows: usize, rf_cols: usize) -> Self {
        Self::new(Mode::Stp, rf_rows, rf_cols)
    }

    pub fn with_pad(mut self, pad_v: usize, pad_h: usize) -> Self {
        self.pad_v = pad_v;
        self.pad_h = pad_h;
        self
    }

    pub fn with_stride(mut self, stride_v: usize, stride_h: usize) -> Self {
        self.stride_v = stride_v;
        self.stride_h = stride_h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (v, what) in [
            (self.stride_v, "vertical stride"),
            (self.stride_h, "horizontal stride"),
            (self.rf_rows, "receptive field rows"),
            (self.rf_cols, "receptive field columns"),
        ] {
            if v == 0 {
                return Err(StpError::ZeroSize { what });
            }
        }
        Ok(())
    }

    /// `(s_v, s_h)` for a padded grid of `rows × cols`.
    pub fn window_counts(&self, rows: usize, cols: usize) -> Result<(usize, usize)> {
        self.validate()?;
        Ok((
            window_count(Axis::Vertical, rows, self.rf_rows, self.stride_v)?,
            window_count(Axis::Horizontal, cols, self.rf_cols, self.stride_h)?,
        ))
    }

    /// Pads `a` with the mode's fill.
    pub fn enlarge(&self, a: &MaskedGrid) -> MaskedGrid {
        enlarge(a, self.pad_v, self.pad_h, self.mode.fill())
    }
}

/// Solves `(count − 1)·stride + window = extent` for an integer count.
pub fn window_count(axis: Axis, extent: usize, window: usize, stride: usize) -> Result<usize> {
    let mismatch = StpError::StrideMismatch {
        axis,
        extent,
        window,
        stride,
    };
    if window == 0 || stride == 0 || window > extent {
        return Err(mismatch);
    }
    let span = extent - window;
    if !span.is_multiple_of(stride) {
        return Err(mismatch);
    }
    Ok(span / stride + 1)
}

/// Receptive field `(i, j)` of a padded grid, zero-based.
pub fn window(abar: &MaskedGrid, i: usize, j: usize, cfg: &ConvConfig) -> Result<MaskedGrid> {
    let (sv, sh) = cfg.window_counts(abar.rows, abar.cols)?;
    if i >= sv || j >= sh {
        return Err(StpError::WindowOutOfRange {
            i,
            j,
            rows: sv,
            cols: sh,
        });
    }
    Ok(abar.subgrid(i * cfg.stride_v, j * cfg.stride_h, cfg.rf_rows, cfg.rf_cols))
}

/// Defined cells of `w` with their coordinates, in column-major order.
pub fn available_entries(w: &MaskedGrid) -> Vec<(usize, usize, f64)> {
    (0..w.cols)
        .flat_map(|c| (0..w.rows).map(move |r| (r, c)))
        .filter_map(|(r, c)| w.get(r, c).map(|v| (r, c, v)))
        .collect()
}

/// Column-major vector of the defined cells; `None` when nothing is defined.
pub fn available_vector(w: &MaskedGrid) -> Option<XVector> {
    let values: Vec<f64> = available_entries(w)
        .into_iter()
        .map(|(_, _, v)| v)
        .collect();
    XVector::new(values).ok()
}

/// Column-major vectorization of a stack of windows: columns, then slices,
/// then rows.
pub fn available_vector_3d(ws: &[MaskedGrid]) -> Result<Option<XVector>> {
    let first = ws.first().ok_or(StpError::ZeroSize {
        what: "window depth",
    })?;
    if let Some(bad) = ws.iter().find(|w| w.shape() != first.shape()) {
        return Err(StpError::ShapeMismatch {
            what: "depth window",
            left_rows: first.rows,
            left_cols: first.cols,
            right_rows: bad.rows,
            right_cols: bad.cols,
        });
    }
    let mut values = Vec::new();
    for c in 0..first.cols {
        for w in ws {
            values.extend((0..w.rows).filter_map(|r| w.get(r, c)));
        }
    }
    Ok(XVector::new(values).ok())
}
