use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use stpconv::fixtures::{self, GoldenReport};
use stpconv::{
    classical_conv2d, domain_conv1d, stp_conv1d, stp_conv2d, stp_conv3d, Conv1dConfig, ConvConfig,
    CubeKernel, CubicConfig, FiniteSignal, Kernel2D, MaskedCube, MaskedGrid, StpError, XVector,
};

use crate::error::CliError;
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JobMode {
    Classical2d,
    Stp1d,
    Stp2d,
    Stp3d,
    Domain1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// One convolution job. Receptive-field sizes default to the kernel's.
#[derive(Debug, Clone, Args)]
pub struct JobSpec {
    #[arg(long, value_enum)]
    pub mode: JobMode,
    /// Input grid (`.json` for JSON, anything else is read as CSV).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub kernel: PathBuf,
    /// Same shape as the input; `0` or `x` marks a cell undefined.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub pad_v: usize,
    #[arg(long, default_value_t = 0)]
    pub pad_h: usize,
    /// Total number of undefined slices, split evenly front and back.
    #[arg(long, default_value_t = 0)]
    pub pad_depth: usize,
    #[arg(long, default_value_t = 1)]
    pub stride_v: usize,
    #[arg(long, default_value_t = 1)]
    pub stride_h: usize,
    #[arg(long, default_value_t = 1)]
    pub stride_depth: usize,
    #[arg(long)]
    pub rf_rows: Option<usize>,
    #[arg(long)]
    pub rf_cols: Option<usize>,
    #[arg(long)]
    pub rf_depth: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Written to stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn parse_err(path: &Path) -> impl FnOnce(String) -> CliError + '_ {
    move |msg| CliError::Parse {
        path: path.to_path_buf(),
        msg,
    }
}

fn load_grid(path: &Path) -> Result<MaskedGrid, CliError> {
    let text = read_text(path)?;
    if is_json(path) {
        io::read_json_grid(&text)
    } else {
        io::read_csv_grid(&text)
    }
    .map_err(parse_err(path))
}

fn load_slices(path: &Path) -> Result<Vec<MaskedGrid>, CliError> {
    let text = read_text(path)?;
    if is_json(path) {
        io::read_json_cube(&text)
    } else {
        io::read_csv_blocks(&text)
    }
    .map_err(parse_err(path))
}

fn load_kernel_grid(path: &Path) -> Result<MaskedGrid, CliError> {
    let g = load_grid(path)?;
    if let Some((r, c)) = g.first_undefined() {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            msg: format!("kernel cell ({}, {}) is undefined", r + 1, c + 1),
        });
    }
    Ok(g)
}

fn keep_flags(mask: &MaskedGrid) -> Vec<bool> {
    mask.cells()
        .iter()
        .map(|c| c.is_some_and(|v| v != 0.0))
        .collect()
}

fn apply_mask(a: &MaskedGrid, mask: &MaskedGrid, what: &str) -> Result<MaskedGrid, CliError> {
    if mask.shape() != a.shape() {
        return Err(CliError::Shape(format!(
            "mask{what} is {}x{} but the input is {}x{}",
            mask.rows(),
            mask.cols(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.masked(&keep_flags(mask))?)
}

/// A single row or column, as a sequence of cells.
fn as_sequence(g: &MaskedGrid, what: &str) -> Result<Vec<Option<f64>>, CliError> {
    if g.rows() != 1 && g.cols() != 1 {
        return Err(CliError::Shape(format!(
            "{what} must be a single row or column, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    Ok(g.cells().to_vec())
}

fn row_grid(cells: Vec<Option<f64>>) -> Result<MaskedGrid, CliError> {
    Ok(MaskedGrid::new(1, cells.len(), cells)?)
}

fn run_2d(job: &JobSpec, input: MaskedGrid) -> Result<MaskedGrid, CliError> {
    let k = Kernel2D::new(load_kernel_grid(&job.kernel)?)?;
    let rf = (
        job.rf_rows.unwrap_or(k.rows()),
        job.rf_cols.unwrap_or(k.cols()),
    );
    let base = match job.mode {
        JobMode::Classical2d => ConvConfig::classical(rf.0, rf.1),
        _ => ConvConfig::stp(rf.0, rf.1),
    };
    let cfg = base
        .with_pad(job.pad_v, job.pad_h)
        .with_stride(job.stride_v, job.stride_h);
    Ok(match job.mode {
        JobMode::Classical2d => classical_conv2d(&input, &k, &cfg)?,
        _ => stp_conv2d(&input, &k, &cfg)?,
    })
}

fn run_1d(job: &JobSpec, input: &MaskedGrid) -> Result<MaskedGrid, CliError> {
    let f = as_sequence(input, "stp1d input")?;
    let kg = load_kernel_grid(&job.kernel)?;
    let k = XVector::new(
        as_sequence(&kg, "stp1d kernel")?
            .into_iter()
            .flatten()
            .collect(),
    )?;
    let cfg = Conv1dConfig::new(job.rf_cols.unwrap_or(k.dim()))
        .with_stride(job.stride_h)
        .with_pad(job.pad_h);
    row_grid(stp_conv1d(&f, &k, &cfg)?)
}

fn signal_of(cells: &[Option<f64>]) -> Option<FiniteSignal> {
    let pairs: Vec<(i64, f64)> = cells
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|v| (i as i64, v)))
        .collect();
    FiniteSignal::from_pairs(pairs).ok()
}

/// Output column `n` is `s(n)`; indices outside the output support are `x`.
fn run_domain(job: &JobSpec, input: &MaskedGrid) -> Result<MaskedGrid, CliError> {
    let f = as_sequence(input, "domain1d input")?;
    let w = as_sequence(&load_grid(&job.kernel)?, "domain1d kernel")?;
    let len = f.len() + w.len() - 1;
    let mut out = vec![None; len];
    if let (Some(fs), Some(ws)) = (signal_of(&f), signal_of(&w)) {
        for (n, v) in domain_conv1d(&fs, &ws).iter() {
            out[n as usize] = Some(v);
        }
    }
    row_grid(out)
}

fn run_3d(job: &JobSpec) -> Result<MaskedGrid, CliError> {
    let mut slices = load_slices(&job.input)?;
    if let Some(mask_path) = &job.mask {
        let masks = load_slices(mask_path)?;
        if masks.len() != slices.len() {
            return Err(CliError::Shape(format!(
                "mask has {} slices but the input has {}",
                masks.len(),
                slices.len()
            )));
        }
        slices = slices
            .iter()
            .zip(&masks)
            .enumerate()
            .map(|(z, (s, m))| apply_mask(s, m, &format!(" slice {}", z + 1)))
            .collect::<Result<_, _>>()?;
    }
    let cube = MaskedCube::new(slices)?;
    let kslices = load_slices(&job.kernel)?;
    if let Some((z, (r, c))) = kslices
        .iter()
        .enumerate()
        .find_map(|(z, s)| s.first_undefined().map(|p| (z, p)))
    {
        return Err(CliError::Parse {
            path: job.kernel.clone(),
            msg: format!(
                "kernel slice {} cell ({}, {}) is undefined",
                z + 1,
                r + 1,
                c + 1
            ),
        });
    }
    let k = CubeKernel::new(MaskedCube::new(kslices)?)?;
    let kc = k.cube();
    let cfg = CubicConfig::new(
        job.rf_rows.unwrap_or(kc.rows()),
        job.rf_cols.unwrap_or(kc.cols()),
        job.rf_depth.unwrap_or(kc.depth()),
    )
    .with_pad(job.pad_v, job.pad_h, job.pad_depth)
    .with_stride(job.stride_v, job.stride_h, job.stride_depth);
    Ok(stp_conv3d(&cube, &k, &cfg)?)
}

/// Computes the job's output grid.
pub fn compute(job: &JobSpec) -> Result<MaskedGrid, CliError> {
    if job.mode == JobMode::Stp3d {
        return run_3d(job);
    }
    let mut input = load_grid(&job.input)?;
    if let Some(mask_path) = &job.mask {
        input = apply_mask(&input, &load_grid(mask_path)?, "")?;
    }
    match job.mode {
        JobMode::Classical2d | JobMode::Stp2d => run_2d(job, input),
        JobMode::Stp1d => run_1d(job, &input),
        JobMode::Domain1d => run_domain(job, &input),
        JobMode::Stp3d => unreachable!("handled above"),
    }
}

pub fn serialize(g: &MaskedGrid, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => io::write_csv_grid(g),
        OutputFormat::Json => io::write_json_grid(g),
    }
}

/// Runs the job and writes the result to `--output` or returns it for stdout.
pub fn run(job: &JobSpec) -> Result<Option<String>, CliError> {
    let text = serialize(&compute(job)?, job.format);
    match &job.output {
        Some(path) => {
            fs::write(path, text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

/// One line per reference case plus the failure count.
pub fn reference_report(reports: &[GoldenReport]) -> (String, usize) {
    let mut out = String::new();
    let mut failed = 0;
    for r in reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        if !r.passed() {
            failed += 1;
        }
        let dev = r.max_abs_dev.map_or_else(
            || "undefined-cell pattern differs".to_string(),
            |d| format!("max abs dev {d:.3e}"),
        );
        out.push_str(&format!("{:<13} {status} {dev}\n", r.name));
    }
    (out, failed)
}

/// All built-in reference cases.
pub fn reference_cases() -> Result<Vec<GoldenReport>, StpError> {
    fixtures::run_all()
}
