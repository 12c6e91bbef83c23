//! Structured 0/1 matrices and receptive-field matrices.
//!
//! `Ξ^d_{n×η}` stacks `n` identity blocks `I_η` along its columns, each
//! shifted down by `d` rows. Its transpose duplicates overlapping row ranges
//! of a grid; multiplying on the right duplicates column ranges. Applying both
//! lays every receptive field of the grid out as one block of a larger matrix.
//!
//! Matrices act on masked grids by selection only: each output cell is a copy
//! of exactly one input cell, so undefined cells pass through untouched.

use crate::error::{Result, StpError};
use crate::grid::{ConvConfig, MaskedGrid, Mode};

/// Dense 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorMatrix {
    rows: usize,
    cols: usize,
    ones: Vec<bool>,
}

impl SelectorMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SelectorMatrix {
            rows,
            cols,
            ones: vec![false; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    /// Builds from rows of 0/1 integers; any nonzero is a one.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "ragged selector literal"
        );
        SelectorMatrix {
            rows: rows.len(),
            cols,
            ones: rows.iter().flatten().map(|&v| v != 0).collect(),
        }
    }

    fn set(&mut self, r: usize, c: usize) {
        self.ones[r * self.cols + c] = true;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.ones[r * self.cols + c]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.ones
            .chunks(self.cols.max(1))
            .map(|r| r.iter().map(|&b| b as u8).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r);
                }
            }
        }
        t
    }

    pub fn kron(&self, other: &SelectorMatrix) -> Self {
        let mut k = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if !self.get(r, c) {
                    continue;
                }
                for rr in 0..other.rows {
                    for cc in 0..other.cols {
                        if other.get(rr, cc) {
                            k.set(r * other.rows + rr, c * other.cols + cc);
                        }
                    }
                }
            }
        }
        k
    }

    /// Integer matrix product, for checking algebraic identities.
    pub fn product(&self, other: &SelectorMatrix) -> Vec<Vec<u32>> {
        assert_eq!(self.cols, other.rows, "selector product shape");
        (0..self.rows)
            .map(|r| {
                (0..other.cols)
                    .map(|c| {
                        (0..self.cols)
                            .filter(|&k| self.get(r, k) && other.get(k, c))
                            .count() as u32
                    })
                    .collect()
            })
            .collect()
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "selector/vector shape");
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .filter(|&c| self.get(r, c))
                    .map(|c| x[c])
                    .sum()
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.ones
            .chunks(self.cols.max(1))
            .map(|r| r.iter().filter(|&&b| b).count())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.cols)
            .map(|c| (0..self.rows).filter(|&r| self.get(r, c)).count())
            .collect()
    }

    pub fn is_permutation(&self) -> bool {
        self.rows == self.cols
            && self.row_sums().iter().all(|&s| s == 1)
            && self.col_sums().iter().all(|&s| s == 1)
    }

    /// Source column chosen by each row; fails unless every row has one 1.
    fn row_sources(&self) -> Result<Vec<usize>> {
        (0..self.rows)
            .map(|r| {
                let hits: Vec<usize> = (0..self.cols).filter(|&c| self.get(r, c)).collect();
                match hits.as_slice() {
                    [c] => Ok(*c),
                    _ => Err(StpError::NotSelective {
                        row: r,
                        ones: hits.len(),
                    }),
                }
            })
            .collect()
    }

    /// `self · grid` under selection semantics.
    pub fn select_rows(&self, grid: &MaskedGrid) -> Result<MaskedGrid> {
        if self.cols != grid.rows() {
            return Err(StpError::ShapeMismatch {
                what: "left selector",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: grid.rows(),
                right_cols: grid.cols(),
            });
        }
        let sources = self.row_sources()?;
        let cells = sources
            .iter()
            .flat_map(|&src| (0..grid.cols()).map(move |c| grid.get(src, c)))
            .collect();
        MaskedGrid::new(self.rows, grid.cols(), cells)
    }

    /// `grid · self` under selection semantics.
    pub fn select_cols(&self, grid: &MaskedGrid) -> Result<MaskedGrid> {
        if grid.cols() != self.rows {
            return Err(StpError::ShapeMismatch {
                what: "right selector",
                left_rows: grid.rows(),
                left_cols: grid.cols(),
                right_rows: self.rows,
                right_cols: self.cols,
            });
        }
        let sources = self.transpose().row_sources()?;
        let cells = (0..grid.rows())
            .flat_map(|r| sources.iter().map(move |&src| grid.get(r, src)))
            .collect();
        MaskedGrid::new(grid.rows(), self.cols, cells)
    }
}

/// `Ξ^d_{n×η}`: `(n−1)·d + η` rows, `n·η` columns, block `i` is an `I_η`
/// placed at rows `i·d ..` and columns `i·η ..`.
///
/// `d = η` is accepted and gives non-overlapping windows.
pub fn xi(n: usize, eta: usize, d: usize) -> Result<SelectorMatrix> {
    if n == 0 {
        return Err(StpError::ZeroSize {
            what: "window count",
        });
    }
    if eta == 0 {
        return Err(StpError::ZeroSize {
            what: "window length",
        });
    }
    if d == 0 {
        return Err(StpError::ZeroSize {
            what: "window step",
        });
    }
    if d > eta {
        return Err(StpError::StepExceedsWindow { d, eta });
    }
    let mut m = SelectorMatrix::zeros((n - 1) * d + eta, n * eta);
    for i in 0..n {
        for k in 0..eta {
            m.set(i * d + k, i * eta + k);
        }
    }
    Ok(m)
}

/// Swap matrix `W_{[m,n]}`, the permutation with `W·(x ⊗ y) = y ⊗ x` for
/// `x ∈ R^m`, `y ∈ R^n`.
pub fn swap_matrix(m: usize, n: usize) -> SelectorMatrix {
    let mut w = SelectorMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            w.set(j * m + i, i * n + j);
        }
    }
    w
}

/// Receptive-field matrix `P·Ā·Q` with `Pᵀ = Ξ^{dv}_{s_v×s}` and
/// `Q = Ξ^{dh}_{s_h×t}`. Block `(i, j)` of size `s × t` is window `(i, j)`.
pub fn rfm_2d(abar: &MaskedGrid, s: usize, t: usize, dv: usize, dh: usize) -> Result<MaskedGrid> {
    let cfg = ConvConfig::new(Mode::Stp, s, t).with_stride(dv, dh);
    let (sv, sh) = cfg.window_counts(abar.rows(), abar.cols())?;
    let p = xi(sv, s, dv)?.transpose();
    let q = xi(sh, t, dh)?;
    q.select_cols(&p.select_rows(abar)?)
}
