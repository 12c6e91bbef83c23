//! Dimension-free convolution built on the semi-tensor-product (STP) inner
//! product.
//!
//! The STP inner product compares vectors of different lengths by stretching
//! both to their least common multiple. Convolution with it needs no
//! padding: a receptive field that only partly covers the image is
//! vectorized from its defined cells and compared with the full kernel as is.
//!
//! * [`xvec`]: cross-dimensional vector algebra.
//! * [`grid`]: masked grids and cubes, padding, windows and vectorization.
//! * [`selectors`]: `Ξ` and swap matrices, receptive-field matrices.
//! * [`conv2d`], [`signal`], [`grad`]: 2D and 1D convolution and gradients.
//! * [`cubic`]: order-3 convolution.
//! * [`fixtures`]: worked examples with reference outputs.

pub mod conv2d;
pub mod cubic;
pub mod error;
pub mod fixtures;
pub mod grad;
pub mod grid;
pub mod selectors;
pub mod signal;
pub mod xvec;

pub use conv2d::{
    block_hadamard, classical_conv2d, conv2d, multi_filter_conv, stp_conv2d, tile_kernel, Kernel2D,
};
pub use cubic::{
    build_psi, build_psi_by_selectors, dematricize, enlarge_cube, matricize, stp_conv3d,
    CubeKernel, CubicConfig, PsiMatrix,
};
pub use error::{Axis, Result, StpError};
pub use grad::{grad_input, grad_kernel, KernelGradients};
pub use grid::{
    available_vector, available_vector_3d, enlarge, window, Cell, ConvConfig, Fill, MaskedCube,
    MaskedGrid, Mode,
};
pub use selectors::{rfm_2d, swap_matrix, xi, SelectorMatrix};
pub use signal::{
    discrete_conv1d, domain_conv1d, domain_conv1d_reflected, stp_conv1d, Conv1dConfig, ConvVariant,
    FiniteSignal,
};
pub use xvec::{
    canonicalize, equivalent, equivalent_with_tol, lcm, stp_inner, stretch, vadd, vsub, xdist,
    xnorm, EquivClass, XVector,
};
