//! STP convolution of order-3 (cubic) signals.
//!
//! A cube `m × n × η` is held as `η` depth slices and matricized as the
//! `(η·m) × n` vertical stack of those slices. Each receptive field spans
//! `s × t` cells in `ξ` consecutive slices. The block matrix Ψ lays every
//! receptive field out as an `(s·ξ) × t` block: block row `v·n_z + z`
//! (vertical window `v`, depth window `z`), block column `h`, and inside a
//! block the depth slices are stacked top to bottom.
//!
//! [`build_psi`] gathers Ψ directly. [`build_psi_by_selectors`] reaches the
//! same matrix through selector products and exists as an independent
//! construction to check against.

use crate::error::{Axis, Result, StpError};
use crate::grid::{available_vector_3d, enlarge, window_count, Fill, MaskedCube, MaskedGrid};
use crate::selectors::{swap_matrix, xi, SelectorMatrix};
use crate::xvec::{stp_inner, XVector};

/// Padding, strides and receptive-field size for cubic convolution.
///
/// `pad_v` and `pad_h` are per side, as in 2D. `pad_depth` is the total
/// number of undefined slices added and is split evenly between front and
/// back, so it must be even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubicConfig {
    pub pad_v: usize,
    pub pad_h: usize,
    pub pad_depth: usize,
    pub stride_v: usize,
    pub stride_h: usize,
    pub stride_depth: usize,
    pub rf_rows: usize,
    pub rf_cols: usize,
    pub rf_depth: usize,
}

impl CubicConfig {
    pub fn new(rf_rows: usize, rf_cols: usize, rf_depth: usize) -> Self {
        CubicConfig {
            pad_v: 0,
            pad_h: 0,
            pad_depth: 0,
            stride_v: 1,
            stride_h: 1,
            stride_depth: 1,
            rf_rows,
            rf_cols,
            rf_depth,
        }
    }

    pub fn with_pad(mut self, pad_v: usize, pad_h: usize, pad_depth: usize) -> Self {
        self.pad_v = pad_v;
        self.pad_h = pad_h;
        self.pad_depth = pad_depth;
        self
    }

    pub fn with_stride(mut self, stride_v: usize, stride_h: usize, stride_depth: usize) -> Self {
        self.stride_v = stride_v;
        self.stride_h = stride_h;
        self.stride_depth = stride_depth;
        self
    }

    /// `(n_v, n_h, n_z)` for an enlarged cube.
    pub fn window_counts(&self, enlarged: &MaskedCube) -> Result<(usize, usize, usize)> {
        Ok((
            window_count(Axis::Vertical, enlarged.rows(), self.rf_rows, self.stride_v)?,
            window_count(
                Axis::Horizontal,
                enlarged.cols(),
                self.rf_cols,
                self.stride_h,
            )?,
            window_count(
                Axis::Depth,
                enlarged.depth(),
                self.rf_depth,
                self.stride_depth,
            )?,
        ))
    }
}

/// `(η·m) × n` stack of the depth slices.
pub fn matricize(a: &MaskedCube) -> MaskedGrid {
    MaskedGrid::vstack(a.slices()).expect("cube slices share a width")
}

/// Splits an `(η·m) × n` stack back into `depth` slices.
pub fn dematricize(g: &MaskedGrid, depth: usize) -> Result<MaskedCube> {
    if depth == 0 || !g.rows().is_multiple_of(depth) {
        return Err(StpError::ShapeMismatch {
            what: "matricized cube rows vs depth",
            left_rows: g.rows(),
            left_cols: g.cols(),
            right_rows: depth,
            right_cols: g.cols(),
        });
    }
    let m = g.rows() / depth;
    MaskedCube::new(
        (0..depth)
            .map(|k| g.subgrid(k * m, 0, m, g.cols()))
            .collect(),
    )
}

/// Undefined-fill enlargement along all three axes.
pub fn enlarge_cube(a: &MaskedCube, cfg: &CubicConfig) -> Result<MaskedCube> {
    if !cfg.pad_depth.is_multiple_of(2) {
        return Err(StpError::OddDepthPadding(cfg.pad_depth));
    }
    let side = cfg.pad_depth / 2;
    let spatial: Vec<MaskedGrid> = a
        .slices()
        .iter()
        .map(|s| enlarge(s, cfg.pad_v, cfg.pad_h, Fill::Undefined))
        .collect();
    let (p, q) = spatial[0].shape();
    let slab = MaskedGrid::undefined(p, q);
    let slices = std::iter::repeat_n(slab.clone(), side)
        .chain(spatial)
        .chain(std::iter::repeat_n(slab, side))
        .collect();
    MaskedCube::new(slices)
}

/// Receptive-field blocks of a cube, `(n_v·n_z) × n_h` blocks of
/// `(s·ξ) × t` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiMatrix {
    n_v: usize,
    n_z: usize,
    n_h: usize,
    block_rows: usize,
    block_cols: usize,
    blocks: Vec<MaskedGrid>,
}

impl PsiMatrix {
    /// Block rows, `n_v·n_z`.
    pub fn rows(&self) -> usize {
        self.n_v * self.n_z
    }

    /// Block columns, `n_h`.
    pub fn cols(&self) -> usize {
        self.n_h
    }

    pub fn block_shape(&self) -> (usize, usize) {
        (self.block_rows, self.block_cols)
    }

    /// Block for vertical window `v`, depth window `z`, horizontal window `h`.
    pub fn block(&self, v: usize, z: usize, h: usize) -> &MaskedGrid {
        &self.blocks[(v * self.n_z + z) * self.n_h + h]
    }

    /// Block by block-row index `i = v·n_z + z`.
    pub fn block_at(&self, i: usize, h: usize) -> &MaskedGrid {
        &self.blocks[i * self.n_h + h]
    }

    pub fn to_grid(&self) -> MaskedGrid {
        let rows: Vec<MaskedGrid> = (0..self.rows())
            .map(|i| {
                let cells = (0..self.block_rows)
                    .flat_map(|r| {
                        (0..self.n_h)
                            .flat_map(move |h| (0..self.block_cols).map(move |c| (r, h, c)))
                    })
                    .map(|(r, h, c)| self.block_at(i, h).get(r, c))
                    .collect();
                MaskedGrid::new(self.block_rows, self.n_h * self.block_cols, cells).unwrap()
            })
            .collect();
        MaskedGrid::vstack(&rows).unwrap()
    }

    fn from_grid(
        g: &MaskedGrid,
        n_v: usize,
        n_z: usize,
        n_h: usize,
        block_rows: usize,
        block_cols: usize,
    ) -> Self {
        let blocks = (0..n_v * n_z)
            .flat_map(|i| (0..n_h).map(move |h| (i, h)))
            .map(|(i, h)| g.subgrid(i * block_rows, h * block_cols, block_rows, block_cols))
            .collect();
        PsiMatrix {
            n_v,
            n_z,
            n_h,
            block_rows,
            block_cols,
            blocks,
        }
    }
}

/// Slices `z·d_z .. z·d_z + ξ` of spatial window `(v, h)`.
fn window_slices(
    e: &MaskedCube,
    cfg: &CubicConfig,
    v: usize,
    z: usize,
    h: usize,
) -> Vec<MaskedGrid> {
    (0..cfg.rf_depth)
        .map(|k| {
            e.slices()[z * cfg.stride_depth + k].subgrid(
                v * cfg.stride_v,
                h * cfg.stride_h,
                cfg.rf_rows,
                cfg.rf_cols,
            )
        })
        .collect()
}

/// Ψ by direct gathering; this is the normative construction.
pub fn build_psi(a: &MaskedCube, cfg: &CubicConfig) -> Result<PsiMatrix> {
    let e = enlarge_cube(a, cfg)?;
    let (n_v, n_h, n_z) = cfg.window_counts(&e)?;
    let mut blocks = Vec::with_capacity(n_v * n_z * n_h);
    for v in 0..n_v {
        for z in 0..n_z {
            for h in 0..n_h {
                blocks.push(MaskedGrid::vstack(&window_slices(&e, cfg, v, z, h))?);
            }
        }
    }
    Ok(PsiMatrix {
        n_v,
        n_z,
        n_h,
        block_rows: cfg.rf_rows * cfg.rf_depth,
        block_cols: cfg.rf_cols,
        blocks,
    })
}

/// Ψ through selector products.
///
/// 1. Each enlarged slice becomes its 2D receptive-field matrix `P·Ā_k·Q`;
///    stacking them gives `R̄` with rows indexed by (slice, window, row).
/// 2. `W_{[δ,n_v]} ⊗ I_s` reorders rows to (window, slice, row).
/// 3. `I_{n_v} ⊗ Ξ^{d_z}_{n_z×ξ}ᵀ ⊗ I_s` picks the slices of every depth
///    window, giving rows (window, depth window, slice in window, row).
pub fn build_psi_by_selectors(a: &MaskedCube, cfg: &CubicConfig) -> Result<PsiMatrix> {
    let e = enlarge_cube(a, cfg)?;
    let (n_v, n_h, n_z) = cfg.window_counts(&e)?;
    let (s, t, depth) = (cfg.rf_rows, cfg.rf_cols, e.depth());
    let p = xi(n_v, s, cfg.stride_v)?.transpose();
    let q = xi(n_h, t, cfg.stride_h)?;
    let per_slice: Vec<MaskedGrid> = e
        .slices()
        .iter()
        .map(|sl| q.select_cols(&p.select_rows(sl)?))
        .collect::<Result<_>>()?;
    let r_bar = MaskedGrid::vstack(&per_slice)?;
    let id_s = SelectorMatrix::identity(s);
    let rearrange = swap_matrix(depth, n_v).kron(&id_s);
    let depth_select = SelectorMatrix::identity(n_v)
        .kron(&xi(n_z, cfg.rf_depth, cfg.stride_depth)?.transpose())
        .kron(&id_s);
    let psi = depth_select.select_rows(&rearrange.select_rows(&r_bar)?)?;
    Ok(PsiMatrix::from_grid(
        &psi,
        n_v,
        n_z,
        n_h,
        s * cfg.rf_depth,
        t,
    ))
}

/// Fully defined `s × t × ξ` kernel; its vector runs over columns, then
/// slices, then rows, the same order as [`available_vector_3d`].
#[derive(Debug, Clone, PartialEq)]
pub struct CubeKernel {
    cube: MaskedCube,
    vec: XVector,
}

impl CubeKernel {
    pub fn new(cube: MaskedCube) -> Result<Self> {
        for sl in cube.slices() {
            if let Some((row, col)) = sl.first_undefined() {
                return Err(StpError::UndefinedKernelCell { row, col });
            }
        }
        let vec = available_vector_3d(cube.slices())?.expect("defined kernel is non-empty");
        Ok(CubeKernel { cube, vec })
    }

    /// From the `(ξ·s) × t` matricized form.
    pub fn from_matricized(g: &MaskedGrid, depth: usize) -> Result<Self> {
        Self::new(dematricize(g, depth)?)
    }

    pub fn cube(&self) -> &MaskedCube {
        &self.cube
    }

    pub fn vec(&self) -> &XVector {
        &self.vec
    }
}

/// STP convolution of a cube: an `(n_v·n_z) × n_h` grid, row `v·n_z + z`.
pub fn stp_conv3d(a: &MaskedCube, k: &CubeKernel, cfg: &CubicConfig) -> Result<MaskedGrid> {
    let e = enlarge_cube(a, cfg)?;
    let (n_v, n_h, n_z) = cfg.window_counts(&e)?;
    let mut cells = Vec::with_capacity(n_v * n_z * n_h);
    for v in 0..n_v {
        for z in 0..n_z {
            for h in 0..n_h {
                let avail = available_vector_3d(&window_slices(&e, cfg, v, z, h))?;
                cells.push(avail.map(|x| stp_inner(&x, k.vec())));
            }
        }
    }
    MaskedGrid::new(n_v * n_z, n_h, cells)
}

/// Same values as [`stp_conv3d`], read off an already built Ψ.
pub fn stp_conv3d_from_psi(psi: &PsiMatrix, k: &CubeKernel) -> MaskedGrid {
    let cells = (0..psi.rows())
        .flat_map(|i| (0..psi.cols()).map(move |h| (i, h)))
        .map(|(i, h)| {
            crate::grid::available_vector(psi.block_at(i, h)).map(|x| stp_inner(&x, k.vec()))
        })
        .collect();
    MaskedGrid::new(psi.rows(), psi.cols(), cells).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conv2d::{stp_conv2d, Kernel2D};
    use crate::grid::ConvConfig;

    fn cube() -> MaskedCube {
        MaskedCube::new(vec![
            MaskedGrid::dense(vec![
                vec![2., 1., 3., 2.],
                vec![1., 3., 2., 2.],
                vec![3., 2., 0., 1.],
            ])
            .unwrap(),
            MaskedGrid::dense(vec![
                vec![1., 1., 2., 3.],
                vec![4., 2., 3., 4.],
                vec![4., 0., 3., 3.],
            ])
            .unwrap(),
        ])
        .unwrap()
    }

    fn kernel() -> CubeKernel {
        let g = MaskedGrid::dense(vec![
            vec![1., 1.],
            vec![0., 1.],
            vec![1., -1.],
            vec![2., 3.],
            vec![2., 1.],
            vec![3., 3.],
        ])
        .unwrap();
        CubeKernel::from_matricized(&g, 3).unwrap()
    }

    fn cfg() -> CubicConfig {
        CubicConfig::new(2, 2, 3).with_pad(1, 1, 2)
    }

    #[test]
    fn matricize_roundtrip() {
        let g = matricize(&cube());
        assert_eq!(g.shape(), (6, 4));
        assert_eq!(g.get(3, 3), Some(3.0));
        assert_eq!(dematricize(&g, 2).unwrap(), cube());
        let single = MaskedCube::new(vec![cube().slices()[0].clone()]).unwrap();
        assert_eq!(matricize(&single), cube().slices()[0]);
        assert!(dematricize(&g, 4).is_err());
    }

    #[test]
    fn enlarge_cube_shape() {
        let e = enlarge_cube(&cube(), &cfg()).unwrap();
        assert_eq!((e.rows(), e.cols(), e.depth()), (5, 6, 4));
        assert_eq!(e.slices()[0], MaskedGrid::undefined(5, 6));
        assert_eq!(e.slices()[3], MaskedGrid::undefined(5, 6));
        assert_eq!(e.defined_count(), cube().defined_count());
        assert_eq!(
            enlarge_cube(&cube(), &CubicConfig::new(1, 1, 1)).unwrap(),
            cube()
        );
        assert_eq!(
            enlarge_cube(&cube(), &CubicConfig::new(1, 1, 1).with_pad(0, 0, 1)),
            Err(StpError::OddDepthPadding(1))
        );
    }

    #[test]
    fn first_block_vectors() {
        let psi = build_psi(&cube(), &cfg()).unwrap();
        assert_eq!((psi.rows(), psi.cols()), (8, 5));
        assert_eq!(psi.to_grid().shape(), (48, 10));
        let b = psi.block(0, 0, 0);
        assert_eq!(
            crate::grid::available_vector(b).unwrap(),
            XVector::from_slice(&[2., 1.])
        );
        let b = psi.block(1, 0, 0);
        assert_eq!(
            crate::grid::available_vector(b).unwrap(),
            XVector::from_slice(&[2., 1., 1., 4.])
        );
    }

    #[test]
    fn kernel_vector_order() {
        assert_eq!(
            kernel().vec().entries(),
            &[1., 0., 1., 2., 2., 3., 1., 1., -1., 3., 1., 3.]
        );
    }

    #[test]
    fn chain_equals_gather() {
        assert_eq!(
            build_psi_by_selectors(&cube(), &cfg()).unwrap(),
            build_psi(&cube(), &cfg()).unwrap()
        );
        let strided = CubicConfig::new(2, 2, 2)
            .with_pad(1, 1, 2)
            .with_stride(1, 2, 2);
        assert_eq!(
            build_psi_by_selectors(&cube(), &strided).unwrap(),
            build_psi(&cube(), &strided).unwrap()
        );
    }

    #[test]
    fn conv_from_psi_agrees() {
        let psi = build_psi(&cube(), &cfg()).unwrap();
        assert_eq!(
            stp_conv3d_from_psi(&psi, &kernel()),
            stp_conv3d(&cube(), &kernel(), &cfg()).unwrap()
        );
    }

    #[test]
    fn single_depth_window_reduces_to_2d_rfm() {
        let c = CubicConfig::new(2, 2, 2).with_pad(1, 1, 0);
        let psi = build_psi(&cube(), &c).unwrap();
        assert_eq!(psi.rows(), 4);
        let top = psi.block(0, 0, 1);
        assert_eq!(top.rows(), 4);
        assert_eq!(top.get(1, 0), Some(2.0));
        assert_eq!(top.get(3, 0), Some(1.0));
    }

    #[test]
    fn reduces_to_2d_conv() {
        let slice = cube().slices()[0].clone();
        let k2 = Kernel2D::from_rows(vec![vec![1., 0.4], vec![0.6, 1.5]]).unwrap();
        let k3 = CubeKernel::new(MaskedCube::new(vec![k2.grid().clone()]).unwrap()).unwrap();
        let s3 = stp_conv3d(
            &MaskedCube::new(vec![slice.clone()]).unwrap(),
            &k3,
            &CubicConfig::new(2, 2, 1).with_pad(1, 1, 0),
        )
        .unwrap();
        let s2 = stp_conv2d(&slice, &k2, &ConvConfig::stp(2, 2).with_pad(1, 1)).unwrap();
        assert_eq!(s3, s2);
    }

    #[test]
    fn single_voxel() {
        let mut cells = vec![None; 9];
        cells[4] = Some(2.5);
        let a = MaskedCube::new(vec![
            MaskedGrid::new(3, 3, cells).unwrap(),
            MaskedGrid::undefined(3, 3),
        ])
        .unwrap();
        let k = kernel();
        let sigma: f64 = k.vec().entries().iter().sum();
        let s = stp_conv3d(&a, &k, &CubicConfig::new(3, 3, 2)).unwrap();
        assert_eq!(s.shape(), (1, 1));
        assert!((s.get(0, 0).unwrap() - 2.5 * sigma / 12.0).abs() < 1e-12);
    }

    #[test]
    fn stride_mismatch_names_depth() {
        let c = CubicConfig::new(2, 2, 3)
            .with_pad(1, 1, 2)
            .with_stride(1, 1, 2);
        assert!(matches!(
            stp_conv3d(&cube(), &kernel(), &c),
            Err(StpError::StrideMismatch {
                axis: Axis::Depth,
                ..
            })
        ));
    }
}
