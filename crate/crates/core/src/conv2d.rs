//! Classical and STP convolution of 2D masked images.
//!
//! Classical mode zero-pads the image and takes the plain dot product of the
//! column-major kernel and window vectors. STP mode pads with undefined cells
//! and takes [`stp_inner`] of the window's available entries with the kernel,
//! so windows with fewer defined cells than the kernel (corners, irregular
//! boundaries, damaged regions) never see invented values. An output cell is
//! undefined when its window has no defined cell at all.

use crate::error::{Result, StpError};
use crate::grid::{available_vector, ConvConfig, MaskedGrid, Mode};
use crate::xvec::{stp_inner, XVector};

/// Fully defined `s × t` kernel with its cached column-major vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2D {
    grid: MaskedGrid,
    vec: XVector,
}

impl Kernel2D {
    pub fn new(grid: MaskedGrid) -> Result<Self> {
        if let Some((row, col)) = grid.first_undefined() {
            return Err(StpError::UndefinedKernelCell { row, col });
        }
        let vec = available_vector(&grid).expect("fully defined grid is non-empty");
        Ok(Kernel2D { grid, vec })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(MaskedGrid::dense(rows)?)
    }

    pub fn rows(&self) -> usize {
        self.grid.rows()
    }

    pub fn cols(&self) -> usize {
        self.grid.cols()
    }

    pub fn grid(&self) -> &MaskedGrid {
        &self.grid
    }

    pub fn vec(&self) -> &XVector {
        &self.vec
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn require_mode(cfg: &ConvConfig, mode: Mode) -> Result<()> {
    if cfg.mode != mode {
        return Err(StpError::WrongMode {
            expected: match mode {
                Mode::Classical => "classical",
                Mode::Stp => "stp",
            },
        });
    }
    Ok(())
}

/// Runs `cell` over every window of the padded image, row-major.
fn convolve_windows(
    a: &MaskedGrid,
    cfg: &ConvConfig,
    mut cell: impl FnMut(&MaskedGrid) -> Option<f64>,
) -> Result<MaskedGrid> {
    let abar = cfg.enlarge(a);
    let (sv, sh) = cfg.window_counts(abar.rows(), abar.cols())?;
    let mut cells = Vec::with_capacity(sv * sh);
    for i in 0..sv {
        for j in 0..sh {
            let w = abar.subgrid(i * cfg.stride_v, j * cfg.stride_h, cfg.rf_rows, cfg.rf_cols);
            cells.push(cell(&w));
        }
    }
    MaskedGrid::new(sv, sh, cells)
}

/// Zero-padded convolution: `s_ij = ⟨V_c(K), V_c(Ā_ij)⟩`.
pub fn classical_conv2d(a: &MaskedGrid, k: &Kernel2D, cfg: &ConvConfig) -> Result<MaskedGrid> {
    require_mode(cfg, Mode::Classical)?;
    if (cfg.rf_rows, cfg.rf_cols) != (k.rows(), k.cols()) {
        return Err(StpError::ReceptiveFieldMismatch {
            rf_rows: cfg.rf_rows,
            rf_cols: cfg.rf_cols,
            k_rows: k.rows(),
            k_cols: k.cols(),
        });
    }
    if let Some((row, col)) = a.first_undefined() {
        return Err(StpError::UndefinedInputCell { row, col });
    }
    convolve_windows(a, cfg, |w| {
        let v = available_vector(w).expect("zero-padded window is fully defined");
        Some(dot(v.entries(), k.vec().entries()))
    })
}

/// Padding-free convolution: `s_ij = ⟨available(Ā_ij), V_c(K)⟩_V`.
///
/// The receptive field may differ from the kernel in size.
pub fn stp_conv2d(a: &MaskedGrid, k: &Kernel2D, cfg: &ConvConfig) -> Result<MaskedGrid> {
    require_mode(cfg, Mode::Stp)?;
    convolve_windows(a, cfg, |w| {
        available_vector(w).map(|v| stp_inner(&v, k.vec()))
    })
}

/// Dispatches on `cfg.mode`.
pub fn conv2d(a: &MaskedGrid, k: &Kernel2D, cfg: &ConvConfig) -> Result<MaskedGrid> {
    match cfg.mode {
        Mode::Classical => classical_conv2d(a, k, cfg),
        Mode::Stp => stp_conv2d(a, k, cfg),
    }
}

/// `J_{rows×cols} ⊗ K`.
pub fn tile_kernel(k: &Kernel2D, rows: usize, cols: usize) -> MaskedGrid {
    let (s, t) = (k.rows(), k.cols());
    let cells = (0..rows * s)
        .flat_map(|r| (0..cols * t).map(move |c| (r, c)))
        .map(|(r, c)| k.grid().get(r % s, c % t))
        .collect();
    MaskedGrid::new(rows * s, cols * t, cells).expect("tiled kernel shape")
}

/// Block Hadamard product: one scalar per `block_rows × block_cols` block.
///
/// Classical mode takes the plain dot product of the column-major block
/// vectors and rejects undefined cells. STP mode takes [`stp_inner`] of each
/// block's own available entries; the result is undefined where either block
/// has none.
pub fn block_hadamard(
    a: &MaskedGrid,
    b: &MaskedGrid,
    block_rows: usize,
    block_cols: usize,
    mode: Mode,
) -> Result<MaskedGrid> {
    if a.shape() != b.shape() {
        return Err(StpError::ShapeMismatch {
            what: "block Hadamard operands",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    if block_rows == 0
        || block_cols == 0
        || !a.rows().is_multiple_of(block_rows)
        || !a.cols().is_multiple_of(block_cols)
    {
        return Err(StpError::ShapeMismatch {
            what: "block partition",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: block_rows,
            right_cols: block_cols,
        });
    }
    let (p, q) = (a.rows() / block_rows, a.cols() / block_cols);
    let mut cells = Vec::with_capacity(p * q);
    for i in 0..p {
        for j in 0..q {
            let ab = a.subgrid(i * block_rows, j * block_cols, block_rows, block_cols);
            let bb = b.subgrid(i * block_rows, j * block_cols, block_rows, block_cols);
            let cell = match mode {
                Mode::Classical => {
                    for blk in [&ab, &bb] {
                        if let Some((r, c)) = blk.first_undefined() {
                            return Err(StpError::UndefinedInputCell {
                                row: i * block_rows + r,
                                col: j * block_cols + c,
                            });
                        }
                    }
                    let (x, y) = (
                        available_vector(&ab).unwrap(),
                        available_vector(&bb).unwrap(),
                    );
                    Some(dot(x.entries(), y.entries()))
                }
                Mode::Stp => match (available_vector(&ab), available_vector(&bb)) {
                    (Some(x), Some(y)) => Some(stp_inner(&x, &y)),
                    _ => None,
                },
            };
            cells.push(cell);
        }
    }
    MaskedGrid::new(p, q, cells)
}

/// One output per (filter, channel) pair, filter-major.
pub fn multi_filter_conv(
    channels: &[MaskedGrid],
    filters: &[Kernel2D],
    cfg: &ConvConfig,
) -> Result<Vec<MaskedGrid>> {
    if filters.is_empty() {
        return Err(StpError::EmptyFilters);
    }
    let first = channels.first().ok_or(StpError::ZeroSize {
        what: "channel count",
    })?;
    if channels.iter().any(|c| c.shape() != first.shape()) {
        return Err(StpError::ChannelShape);
    }
    filters
        .iter()
        .flat_map(|k| channels.iter().map(move |a| conv2d(a, k, cfg)))
        .collect()
}
