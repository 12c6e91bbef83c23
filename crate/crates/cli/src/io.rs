//! Grid text formats.
//!
//! CSV: one grid row per line, comma separated, `x` for an undefined cell,
//! no header. A 3D input is a sequence of such blocks separated by blank
//! lines, front slice first.
//!
//! JSON: a 2D grid is a nested array of rows (or `{"cells": [...]}`), with
//! `null` or `"x"` for undefined cells; a cube is `{"slices": [...]}`.

use serde::{Deserialize, Serialize};
use stpconv::{Cell, MaskedGrid};

pub const UNDEFINED_TOKEN: &str = "x";

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back to the rounded value.
pub fn format_number(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

fn round12(v: f64) -> f64 {
    format_number(v).parse().expect("formatted float parses")
}

fn parse_token(tok: &str, line: usize, col: usize) -> Result<Cell, String> {
    let tok = tok.trim();
    if tok == UNDEFINED_TOKEN {
        return Ok(None);
    }
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(format!("line {line}, column {col}: bad cell {tok:?}")),
    }
}

fn grid_from_rows(rows: Vec<Vec<Cell>>, first_line: usize) -> Result<MaskedGrid, String> {
    if let Some(width) = rows.first().map(Vec::len) {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
            return Err(format!(
                "line {}: {} cells, expected {width}",
                first_line + i,
                r.len()
            ));
        }
    }
    MaskedGrid::from_rows(rows).map_err(|e| e.to_string())
}

/// Blank-line separated CSV blocks.
pub fn read_csv_blocks(text: &str) -> Result<Vec<MaskedGrid>, String> {
    let mut blocks = Vec::new();
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut start = 1;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            if !rows.is_empty() {
                blocks.push(grid_from_rows(std::mem::take(&mut rows), start)?);
            }
            continue;
        }
        if rows.is_empty() {
            start = line_no;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(c, tok)| parse_token(tok, line_no, c + 1))
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    if !rows.is_empty() {
        blocks.push(grid_from_rows(rows, start)?);
    }
    if blocks.is_empty() {
        return Err("no grid rows".to_string());
    }
    Ok(blocks)
}

pub fn read_csv_grid(text: &str) -> Result<MaskedGrid, String> {
    let mut blocks = read_csv_blocks(text)?;
    if blocks.len() != 1 {
        return Err(format!(
            "expected one grid, found {} blank-line separated blocks",
            blocks.len()
        ));
    }
    Ok(blocks.remove(0))
}

pub fn write_csv_grid(g: &MaskedGrid) -> String {
    let mut out = String::new();
    for row in g.to_rows() {
        let line: Vec<String> = row
            .iter()
            .map(|c| c.map_or_else(|| UNDEFINED_TOKEN.to_string(), format_number))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonCell {
    Number(f64),
    Token(String),
    Null(()),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonGrid {
    Bare(Vec<Vec<JsonCell>>),
    Wrapped { cells: Vec<Vec<JsonCell>> },
}

#[derive(Deserialize)]
struct JsonCube {
    slices: Vec<Vec<Vec<JsonCell>>>,
}

fn json_rows(rows: Vec<Vec<JsonCell>>) -> Result<MaskedGrid, String> {
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(r, row)| {
            row.into_iter()
                .enumerate()
                .map(|(c, cell)| match cell {
                    JsonCell::Number(v) => Ok(Some(v)),
                    JsonCell::Null(()) => Ok(None),
                    JsonCell::Token(t) if t == UNDEFINED_TOKEN => Ok(None),
                    JsonCell::Token(t) => {
                        Err(format!("row {}, column {}: bad cell {t:?}", r + 1, c + 1))
                    }
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    grid_from_rows(rows, 1)
}

pub fn read_json_grid(text: &str) -> Result<MaskedGrid, String> {
    match serde_json::from_str::<JsonGrid>(text).map_err(|e| e.to_string())? {
        JsonGrid::Bare(rows) | JsonGrid::Wrapped { cells: rows } => json_rows(rows),
    }
}

pub fn read_json_cube(text: &str) -> Result<Vec<MaskedGrid>, String> {
    let cube: JsonCube = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if cube.slices.is_empty() {
        return Err("no slices".to_string());
    }
    cube.slices.into_iter().map(json_rows).collect()
}

#[derive(Serialize)]
struct GridOut {
    cells: Vec<Vec<Option<f64>>>,
}

pub fn write_json_grid(g: &MaskedGrid) -> String {
    let cells = g
        .to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.map(round12)).collect())
        .collect();
    let mut s = serde_json::to_string(&GridOut { cells }).expect("grid serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.875), "0.875");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-2.0 / 3.0 * 1e-7), "-0.0000000666666666667");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(123456789012345.0), "123456789012000");
    }

    #[test]
    fn csv_blocks() {
        let b = read_csv_blocks("1,2\n3,x\n\n\n5,6\n7,8\n").unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].get(1, 1), None);
        assert_eq!(b[1].get(1, 0), Some(7.0));
        assert!(read_csv_grid("1,2\n\n3,4").is_err());
    }

    #[test]
    fn csv_errors_name_the_place() {
        let e = read_csv_grid("1,2\n3,y").unwrap_err();
        assert!(e.contains("line 2, column 2"), "{e}");
        let e = read_csv_grid("1,2\n3").unwrap_err();
        assert!(e.contains("line 2"), "{e}");
        assert!(read_csv_grid("1,inf").is_err());
        assert!(read_csv_grid("\n\n").is_err());
    }

    #[test]
    fn json_cell_forms() {
        let a = read_json_grid(r#"[[1, null], ["x", 2.5]]"#).unwrap();
        let b = read_json_grid(r#"{"cells": [[1, null], [null, 2.5]]}"#).unwrap();
        assert_eq!(a, b);
        assert!(read_json_grid(r#"[[1, "y"]]"#).is_err());
        let c = read_json_cube(r#"{"slices": [[[1]], [[null]]]}"#).unwrap();
        assert_eq!(c.len(), 2);
    }
}
