//! Worked examples with their reference outputs.
//!
//! Each case pairs an input, a kernel and a configuration with the expected
//! CP matrix as originally tabulated. Reference matrices are stored
//! unscaled, exactly as tabulated, together with the common factor they were
//! printed with.

use crate::conv2d::{classical_conv2d, stp_conv2d, Kernel2D};
use crate::cubic::{build_psi, stp_conv3d, CubeKernel, CubicConfig};
use crate::error::Result;
use crate::grid::{ConvConfig, MaskedCube, MaskedGrid};

/// Tolerance for reference comparisons.
pub const GOLDEN_TOLERANCE: f64 = 1e-9;

/// Parses a whitespace/comma table where `x` marks an undefined cell.
pub fn parse_table(text: &str) -> MaskedGrid {
    let rows: Vec<Vec<Option<f64>>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| match t {
                    "x" => None,
                    v => Some(v.parse::<f64>().expect("numeric table cell")),
                })
                .collect()
        })
        .collect();
    MaskedGrid::from_rows(rows).expect("rectangular table")
}

fn scaled(text: &str, factor: f64) -> MaskedGrid {
    parse_table(text).map_defined(|v| v * factor).unwrap()
}

pub fn base_image() -> MaskedGrid {
    parse_table(
        "1 2 -1 -2
         -3 -2 1 3
         2 -2 1 -1",
    )
}

pub fn base_kernel() -> Kernel2D {
    Kernel2D::from_rows(vec![vec![1.0, 0.4], vec![0.6, 1.5]]).unwrap()
}

pub fn irregular_image() -> MaskedGrid {
    parse_table(
        "x 1 -1 x
         -2 1 2 1
         -3 2 3 x
         2 -2 x x",
    )
}

pub fn damaged_image() -> MaskedGrid {
    parse_table(
        "1 -1 1 2
         2 -1 x 3
         -1 3 2 1",
    )
}

pub fn proportional_image() -> MaskedGrid {
    parse_table(
        "1 -1 3 2 1
         2 1 -2 -1 2
         1 3 2 1 1
         -1 -2 1 2 -1
         2 3 -3 -2 -1",
    )
}

pub fn cube_image() -> MaskedCube {
    MaskedCube::new(vec![
        parse_table("2 1 3 2\n1 3 2 2\n3 2 0 1"),
        parse_table("1 1 2 3\n4 2 3 4\n4 0 3 3"),
    ])
    .unwrap()
}

pub fn cube_kernel() -> CubeKernel {
    CubeKernel::from_matricized(&parse_table("1 1\n0 1\n1 -1\n2 3\n2 1\n3 3"), 3).unwrap()
}

pub fn cube_config() -> CubicConfig {
    CubicConfig::new(2, 2, 3).with_pad(1, 1, 2)
}

pub fn classical_config() -> ConvConfig {
    ConvConfig::classical(2, 2).with_pad(1, 1)
}

pub fn stp_config() -> ConvConfig {
    ConvConfig::stp(2, 2).with_pad(1, 1)
}

pub fn proportional_config() -> ConvConfig {
    ConvConfig::stp(3, 3).with_pad(1, 1).with_stride(2, 2)
}

pub fn expected_classical() -> MaskedGrid {
    parse_table(
        "1.5 3.6 -0.3 -3.6 -1.2
         -4.1 -3.5 0.9 3.8 0.8
         1.8 -4.1 -0.3 0.8 0.9
         0.8 0.2 -0.6 0.1 -0.5",
    )
}

pub fn expected_stp() -> MaskedGrid {
    scaled(
        "3.5 5.6 0.7 -5.6 -7
         -4.9 -3.5 0.9 3.8 3.5
         0 -4.1 -0.3 0.8 2.1
         7 -0.4 -0.7 -0.7 -3.8",
        1.0 / 4.0,
    )
}

pub fn expected_irregular() -> MaskedGrid {
    scaled(
        "x 10.5 -0.9 -10.5 x
         -21 -0.3 12.6 5.3 10.5
         -26.7 -1.2 22.5 18.1 10.5
         -3 -12 17.9 31.5 x
         21 -1.8 -21 x x",
        1.0 / 12.0,
    )
}

pub fn expected_damaged() -> MaskedGrid {
    scaled(
        "10.5 -0.9 0.9 16.2 21
         16.2 0.9 -0.7 22.3 26.7
         3.9 16.5 12.2 18.1 20.1
         -10.5 12.3 25.8 15.3 10.5",
        1.0 / 12.0,
    )
}

pub fn expected_proportional() -> MaskedGrid {
    scaled(
        "29.7 7.2 43.2
         14.7 26.5 -9.9
         35.1 -7.8 -7.8",
        1.0 / 36.0,
    )
}

pub fn expected_cubic() -> MaskedGrid {
    scaled(
        "13 9.5 13 21.5 21
         13 9.5 13 21.5 21
         20 16.25 18 24.75 24.5
         20 16.25 18 24.75 24.5
         27.5 21.25 17.5 25 18
         27.5 21.25 17.5 25 18
         29.5 18 12.5 21.5 16.5
         29.5 18 12.5 21.5 16.5",
        1.0 / 6.0,
    )
}

/// The 48 × 10 receptive-field block matrix of the cubic example.
pub fn expected_psi() -> MaskedGrid {
    parse_table(PSI_TABLE)
}

const PSI_TABLE: &str = "
x x x x x x x x x x
x x x x x x x x x x
x x x x x x x x x x
x 2 2 1 1 3 3 2 2 x
x x x x x x x x x x
x 1 1 1 1 2 2 3 3 x
x x x x x x x x x x
x 2 2 1 1 3 3 2 2 x
x x x x x x x x x x
x 1 1 1 1 2 2 3 3 x
x x x x x x x x x x
x x x x x x x x x x
x x x x x x x x x x
x x x x x x x x x x
x 2 2 1 1 3 3 2 2 x
x 1 1 3 3 2 2 2 2 x
x 1 1 1 1 2 2 3 3 x
x 4 4 2 2 3 3 4 4 x
x 2 2 1 1 3 3 2 2 x
x 1 1 3 3 2 2 2 2 x
x 1 1 1 1 2 2 3 3 x
x 4 4 2 2 3 3 4 4 x
x x x x x x x x x x
x x x x x x x x x x
x x x x x x x x x x
x x x x x x x x x x
x 1 1 3 3 2 2 2 2 x
x 3 3 2 2 0 0 1 1 x
x 4 4 2 2 3 3 4 4 x
x 4 4 0 0 3 3 3 3 x
x 1 1 3 3 2 2 2 2 x
x 3 3 2 2 0 0 1 1 x
x 4 4 2 2 3 3 4 4 x
x 4 4 0 0 3 3 3 3 x
x x x x x x x x x x
x x x x x x x x x x
x x x x x x x x x x
x x x x x x x x x x
x 3 3 2 2 0 0 1 1 x
x x x x x x x x x x
x 4 4 0 0 3 3 3 3 x
x x x x x x x x x x
x 3 3 2 2 0 0 1 1 x
x x x x x x x x x x
x 4 4 0 0 3 3 3 3 x
x x x x x x x x x x
x x x x x x x x x x
x x x x x x x x x x
";

/// Outcome of one reference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenReport {
    pub name: &'static str,
    pub computed: MaskedGrid,
    pub expected: MaskedGrid,
    /// `None` when shapes or undefined-cell patterns differ.
    pub max_abs_dev: Option<f64>,
}

impl GoldenReport {
    fn new(name: &'static str, computed: MaskedGrid, expected: MaskedGrid) -> Self {
        let max_abs_dev = computed.max_abs_diff(&expected);
        GoldenReport {
            name,
            computed,
            expected,
            max_abs_dev,
        }
    }

    pub fn passed(&self) -> bool {
        self.max_abs_dev.is_some_and(|d| d <= GOLDEN_TOLERANCE)
    }

    /// Zero-based coordinates of cells outside tolerance or with a
    /// mismatched defined/undefined state.
    pub fn failing_cells(&self) -> Vec<(usize, usize)> {
        if self.computed.shape() != self.expected.shape() {
            return Vec::new();
        }
        let cols = self.computed.cols();
        self.computed
            .cells()
            .iter()
            .zip(self.expected.cells())
            .enumerate()
            .filter(|(_, (a, b))| match (a, b) {
                (Some(a), Some(b)) => (a - b).abs() > GOLDEN_TOLERANCE,
                (None, None) => false,
                _ => true,
            })
            .map(|(i, _)| (i / cols, i % cols))
            .collect()
    }
}

pub const CASE_NAMES: [&str; 6] = [
    "classical",
    "stp",
    "irregular",
    "damaged",
    "proportional",
    "cubic",
];

/// Computes one named case.
pub fn run_case(name: &str) -> Option<Result<GoldenReport>> {
    let k = base_kernel();
    let run = |name: &'static str, computed: Result<MaskedGrid>, expected: MaskedGrid| {
        computed.map(|c| GoldenReport::new(name, c, expected))
    };
    Some(match name {
        "classical" => run(
            "classical",
            classical_conv2d(&base_image(), &k, &classical_config()),
            expected_classical(),
        ),
        "stp" => run(
            "stp",
            stp_conv2d(&base_image(), &k, &stp_config()),
            expected_stp(),
        ),
        "irregular" => run(
            "irregular",
            stp_conv2d(&irregular_image(), &k, &stp_config()),
            expected_irregular(),
        ),
        "damaged" => run(
            "damaged",
            stp_conv2d(&damaged_image(), &k, &stp_config()),
            expected_damaged(),
        ),
        "proportional" => run(
            "proportional",
            stp_conv2d(&proportional_image(), &k, &proportional_config()),
            expected_proportional(),
        ),
        "cubic" => run(
            "cubic",
            stp_conv3d(&cube_image(), &cube_kernel(), &cube_config()),
            expected_cubic(),
        ),
        _ => return None,
    })
}

/// All six cases, in a fixed order.
pub fn run_all() -> Result<Vec<GoldenReport>> {
    CASE_NAMES
        .iter()
        .map(|n| run_case(n).expect("known case"))
        .collect()
}

/// The Ψ comparison for the cubic case.
pub fn psi_report() -> Result<GoldenReport> {
    let psi = build_psi(&cube_image(), &cube_config())?;
    Ok(GoldenReport::new("psi", psi.to_grid(), expected_psi()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_cases() {
        let reports = run_all().unwrap();
        assert_eq!(reports.len(), 6);
        assert_eq!(
            reports.iter().map(|r| r.name).collect::<Vec<_>>(),
            CASE_NAMES.to_vec()
        );
        assert!(run_case("nope").is_none());
    }

    #[test]
    fn table_parsing() {
        let g = parse_table("x 1\n-2.5 x");
        assert_eq!(
            g.to_rows(),
            vec![vec![None, Some(1.0)], vec![Some(-2.5), None]]
        );
    }

    #[test]
    fn perturbed_case_fails_by_name() {
        let mut r = run_case("damaged").unwrap().unwrap();
        assert!(r.passed());
        r = GoldenReport::new(
            r.name,
            r.computed.map_defined(|v| v + 1e-6).unwrap(),
            r.expected,
        );
        assert!(!r.passed());
        assert_eq!(r.name, "damaged");
        assert_eq!(r.failing_cells().len(), 20);
    }
}
