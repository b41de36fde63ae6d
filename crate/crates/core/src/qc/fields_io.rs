//! CSV files for per-face fields.
//!
//! Dilation files have the header `face_index,K`, Beltrami files
//! `face_index,re,im`. Every face must appear exactly once, in any order.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::{BeltramiField, DilationField};
use crate::error::{FsqcError, Result};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| FsqcError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| FsqcError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_rows(text: &str, header: &[&str], face_count: usize) -> Result<Vec<Vec<f64>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, first) = lines.next().ok_or(FsqcError::Parse {
        line: 1,
        message: "missing header row".into(),
    })?;
    let got: Vec<&str> = first.split(',').map(str::trim).collect();
    if got.len() != header.len()
        || got.iter().zip(header).any(|(a, b)| !a.eq_ignore_ascii_case(b))
    {
        return Err(FsqcError::Parse {
            line,
            message: format!("expected header `{}`", header.join(",")),
        });
    }
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; face_count];
    for (line, text) in lines {
        let cells: Vec<&str> = text.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(FsqcError::Parse {
                line,
                message: format!("expected {} columns, found {}", header.len(), cells.len()),
            });
        }
        let face: usize = cells[0].parse().map_err(|_| FsqcError::Parse {
            line,
            message: format!("bad face index `{}`", cells[0]),
        })?;
        if face >= face_count {
            return Err(FsqcError::Parse {
                line,
                message: format!("face index {face} out of range for {face_count} faces"),
            });
        }
        let values = cells[1..]
            .iter()
            .map(|c| {
                c.parse::<f64>().map_err(|_| FsqcError::Parse {
                    line,
                    message: format!("bad number `{c}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if rows[face].replace(values).is_some() {
            return Err(FsqcError::Parse {
                line,
                message: format!("face {face} listed twice"),
            });
        }
    }
    rows.into_iter()
        .enumerate()
        .map(|(f, r)| {
            r.ok_or_else(|| FsqcError::InvalidInput(format!("no value for face {f}")))
        })
        .collect()
}

pub fn parse_dilation_csv(text: &str, face_count: usize) -> Result<DilationField> {
    let rows = parse_rows(text, &["face_index", "K"], face_count)?;
    DilationField::new(rows.into_iter().map(|r| r[0]).collect())
}

pub fn parse_beltrami_csv(text: &str, face_count: usize) -> Result<BeltramiField> {
    let rows = parse_rows(text, &["face_index", "re", "im"], face_count)?;
    BeltramiField::new(rows.into_iter().map(|r| Complex64::new(r[0], r[1])).collect())
}

pub fn format_dilation_csv(field: &DilationField) -> String {
    let mut out = String::from("face_index,K\n");
    for (f, k) in field.values().iter().enumerate() {
        let _ = writeln!(out, "{f},{k}");
    }
    out
}

pub fn format_beltrami_csv(field: &BeltramiField) -> String {
    let mut out = String::from("face_index,re,im\n");
    for (f, mu) in field.values().iter().enumerate() {
        let _ = writeln!(out, "{f},{},{}", mu.re, mu.im);
    }
    out
}

pub fn load_dilation_csv(path: &Path, face_count: usize) -> Result<DilationField> {
    parse_dilation_csv(&read(path)?, face_count)
}

pub fn load_beltrami_csv(path: &Path, face_count: usize) -> Result<BeltramiField> {
    parse_beltrami_csv(&read(path)?, face_count)
}

pub fn save_dilation_csv(field: &DilationField, path: &Path) -> Result<()> {
    write(path, &format_dilation_csv(field))
}

pub fn save_beltrami_csv(field: &BeltramiField, path: &Path) -> Result<()> {
    write(path, &format_beltrami_csv(field))
}
