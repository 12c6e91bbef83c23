//! Analytic gradients of [`stp_conv2d`](crate::conv2d::stp_conv2d).
//!
//! Every output cell is bilinear in the window's available entries and the
//! kernel vector: `s = (1/t) Σ_{p,q} x_p · k_q · |overlap(p, q)|`. Both
//! gradients reuse the overlap merge, so nothing is expanded to length `t`.

use crate::conv2d::Kernel2D;
use crate::error::{Result, StpError};
use crate::grid::{available_entries, ConvConfig, MaskedGrid, Mode};
use crate::xvec::Overlaps;

/// Per-output-cell kernel gradients; `None` where the output is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGradients {
    rows: usize,
    cols: usize,
    cells: Vec<Option<MaskedGrid>>,
}

impl KernelGradients {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `∂s_ij / ∂K`, shaped like the kernel.
    pub fn get(&self, i: usize, j: usize) -> Option<&MaskedGrid> {
        self.cells[i * self.cols + j].as_ref()
    }
}

struct WindowEntries {
    /// `(row, col, value)` in padded coordinates, column-major.
    entries: Vec<(usize, usize, f64)>,
}

fn windows(a: &MaskedGrid, cfg: &ConvConfig) -> Result<(usize, usize, Vec<WindowEntries>)> {
    if cfg.mode != Mode::Stp {
        return Err(StpError::WrongMode { expected: "stp" });
    }
    let abar = cfg.enlarge(a);
    let (sv, sh) = cfg.window_counts(abar.rows(), abar.cols())?;
    let mut out = Vec::with_capacity(sv * sh);
    for i in 0..sv {
        for j in 0..sh {
            let (r0, c0) = (i * cfg.stride_v, j * cfg.stride_h);
            let w = abar.subgrid(r0, c0, cfg.rf_rows, cfg.rf_cols);
            let entries = available_entries(&w)
                .into_iter()
                .map(|(r, c, v)| (r + r0, c + c0, v))
                .collect();
            out.push(WindowEntries { entries });
        }
    }
    Ok((sv, sh, out))
}

/// Gradient of every output cell with respect to every kernel entry.
/// Independent of the kernel's values.
pub fn grad_kernel(a: &MaskedGrid, k: &Kernel2D, cfg: &ConvConfig) -> Result<KernelGradients> {
    let (sv, sh, wins) = windows(a, cfg)?;
    let (s, kq) = (k.rows(), k.vec().dim());
    let cells = wins
        .into_iter()
        .map(|w| {
            if w.entries.is_empty() {
                return None;
            }
            let overlaps = Overlaps::new(w.entries.len(), kq);
            let total = overlaps.total() as f64;
            let mut g = vec![0.0; kq];
            for o in overlaps {
                g[o.right] += w.entries[o.left].2 * o.len as f64;
            }
            // Kernel vector is column-major; the grid is row-major.
            let cells = (0..kq)
                .map(|idx| {
                    let (r, c) = (idx / k.cols(), idx % k.cols());
                    Some(g[c * s + r] / total)
                })
                .collect();
            Some(MaskedGrid::new(s, k.cols(), cells).expect("kernel-shaped gradient"))
        })
        .collect();
    Ok(KernelGradients {
        rows: sv,
        cols: sh,
        cells,
    })
}

/// Vector-Jacobian product: gradient of `Σ_ij upstream_ij · s_ij` with
/// respect to each defined input cell. Undefined input cells, and upstream
/// cells that are undefined, contribute nothing.
pub fn grad_input(
    a: &MaskedGrid,
    k: &Kernel2D,
    cfg: &ConvConfig,
    upstream: &MaskedGrid,
) -> Result<MaskedGrid> {
    let (sv, sh, wins) = windows(a, cfg)?;
    if upstream.shape() != (sv, sh) {
        return Err(StpError::ShapeMismatch {
            what: "upstream gradient",
            left_rows: upstream.rows(),
            left_cols: upstream.cols(),
            right_rows: sv,
            right_cols: sh,
        });
    }
    let kv = k.vec().entries();
    let mut grad = vec![0.0; a.rows() * a.cols()];
    for (idx, w) in wins.iter().enumerate() {
        let Some(up) = upstream.cells()[idx] else {
            continue;
        };
        if w.entries.is_empty() {
            continue;
        }
        let overlaps = Overlaps::new(w.entries.len(), kv.len());
        let total = overlaps.total() as f64;
        for o in overlaps {
            let (r, c, _) = w.entries[o.left];
            let (r, c) = (r - cfg.pad_v, c - cfg.pad_h);
            grad[r * a.cols() + c] += up * kv[o.right] * o.len as f64 / total;
        }
    }
    let cells = a
        .cells()
        .iter()
        .zip(grad)
        .map(|(cell, g)| cell.map(|_| g))
        .collect();
    MaskedGrid::new(a.rows(), a.cols(), cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conv2d::stp_conv2d;

    fn image() -> MaskedGrid {
        MaskedGrid::dense(vec![
            vec![1., 2., -1., -2.],
            vec![-3., -2., 1., 3.],
            vec![2., -2., 1., -1.],
        ])
        .unwrap()
        .masked(&[
            true, true, false, true, true, true, true, true, true, false, true, true,
        ])
        .unwrap()
    }

    fn kernel() -> Kernel2D {
        Kernel2D::from_rows(vec![vec![1., 0.4], vec![0.6, 1.5]]).unwrap()
    }

    #[test]
    fn full_window_gradient_is_scaled_window() {
        let a = MaskedGrid::dense(vec![vec![1., 2.], vec![3., 4.]]).unwrap();
        let g = grad_kernel(&a, &kernel(), &ConvConfig::stp(2, 2)).unwrap();
        let expected = a.map_defined(|v| v / 4.0).unwrap();
        assert!(g.get(0, 0).unwrap().approx_eq(&expected, 1e-15));
    }

    #[test]
    fn kernel_gradient_ignores_kernel_values() {
        let cfg = ConvConfig::stp(2, 2).with_pad(1, 1);
        let other = Kernel2D::from_rows(vec![vec![-7., 3.], vec![0.1, 2.]]).unwrap();
        assert_eq!(
            grad_kernel(&image(), &kernel(), &cfg).unwrap(),
            grad_kernel(&image(), &other, &cfg).unwrap()
        );
    }

    #[test]
    fn output_reconstructed_from_gradient() {
        let cfg = ConvConfig::stp(3, 3).with_pad(1, 1);
        let s = stp_conv2d(&image(), &kernel(), &cfg).unwrap();
        let g = grad_kernel(&image(), &kernel(), &cfg).unwrap();
        for i in 0..s.rows() {
            for j in 0..s.cols() {
                let Some(v) = s.get(i, j) else {
                    assert!(g.get(i, j).is_none());
                    continue;
                };
                let gk = g.get(i, j).unwrap();
                let recon: f64 = gk
                    .cells()
                    .iter()
                    .zip(kernel().grid().cells())
                    .map(|(a, b)| a.unwrap() * b.unwrap())
                    .sum();
                assert!((recon - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_window_input_gradient() {
        let a = MaskedGrid::from_rows(vec![vec![Some(2.0), None], vec![Some(-1.0), Some(3.0)]])
            .unwrap();
        let up = MaskedGrid::dense(vec![vec![1.0]]).unwrap();
        let g = grad_input(&a, &kernel(), &ConvConfig::stp(2, 2), &up).unwrap();
        // Three entries against four kernel entries, t = 12.
        // p0 covers k0 fully (len 3) and k1 (len 1); p1 covers k1 (2), k2 (2);
        // p2 covers k2 (1), k3 (3).
        let k = [1., 0.6, 0.4, 1.5];
        let p0 = (3. * k[0] + k[1]) / 12.;
        let p1 = (2. * k[1] + 2. * k[2]) / 12.;
        let p2 = (k[2] + 3. * k[3]) / 12.;
        let expected =
            MaskedGrid::from_rows(vec![vec![Some(p0), None], vec![Some(p1), Some(p2)]]).unwrap();
        assert!(g.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn all_masked_input_has_no_gradient() {
        let a = MaskedGrid::undefined(3, 3);
        let up = MaskedGrid::filled(2, 2, Some(1.0));
        let g = grad_input(&a, &kernel(), &ConvConfig::stp(2, 2), &up).unwrap();
        assert_eq!(g.defined_count(), 0);
        assert!(grad_input(
            &a,
            &kernel(),
            &ConvConfig::stp(2, 2),
            &MaskedGrid::undefined(1, 1)
        )
        .is_err());
        assert!(grad_kernel(&a, &kernel(), &ConvConfig::classical(2, 2)).is_err());
    }
}
