//! Matrix Market coordinate-format reader and writer.
//!
//! Writing always produces `complex general` with 1-based indices. Reading
//! accepts `complex`, `real`, `integer` and `pattern` fields and the
//! `general`, `symmetric`, `skew-symmetric` and `hermitian` symmetries.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use super::SparseComplexMatrix;
use crate::error::{Error, Result};

pub const HEADER: &str = "%%MatrixMarket matrix coordinate complex general";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Complex,
    Real,
    Pattern,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

pub fn write<W: Write>(m: &SparseComplexMatrix, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "{HEADER}")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(w, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_path(m: &SparseComplexMatrix, path: impl AsRef<Path>) -> Result<()> {
    write(m, File::create(path)?)
}

pub fn read_path(path: impl AsRef<Path>) -> Result<SparseComplexMatrix> {
    read(BufReader::new(File::open(path)?))
}

pub fn read<R: BufRead>(r: R) -> Result<SparseComplexMatrix> {
    let mut lines = r.lines().enumerate();
    let perr = |line: usize, msg: &str| Error::Parse { line, message: msg.to_string() };

    let (lineno, header) = match lines.next() {
        Some((n, l)) => (n + 1, l?),
        None => return Err(perr(1, "empty input")),
    };
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(perr(lineno, "expected '%%MatrixMarket matrix ...' header"));
    }
    if tokens[2] != "coordinate" {
        return Err(perr(lineno, "only the coordinate format is supported"));
    }
    let field = match tokens[3].as_str() {
        "complex" => Field::Complex,
        "real" | "integer" | "double" => Field::Real,
        "pattern" => Field::Pattern,
        _ => return Err(perr(lineno, "unknown field type")),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        _ => return Err(perr(lineno, "unknown symmetry type")),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, Complex64)> = Vec::new();
    for (n, line) in lines {
        let lineno = n + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        let Some((nrows, ncols, nnz)) = size else {
            if parts.len() != 3 {
                return Err(perr(lineno, "expected 'nrows ncols nnz'"));
            }
            let p = |s: &str| s.parse::<usize>().map_err(|e| perr(lineno, &e.to_string()));
            let s = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
            triplets.reserve(s.2);
            size = Some(s);
            continue;
        };
        let need = match field {
            Field::Complex => 4,
            Field::Real => 3,
            Field::Pattern => 2,
        };
        if parts.len() < need {
            return Err(perr(lineno, "too few values on entry line"));
        }
        if triplets.len() >= nnz * if symmetry == Symmetry::General { 1 } else { 2 } {
            return Err(perr(lineno, "more entries than declared"));
        }
        let idx = |s: &str| -> Result<usize> {
            let v = s.parse::<usize>().map_err(|e| perr(lineno, &e.to_string()))?;
            if v == 0 {
                return Err(perr(lineno, "indices are 1-based"));
            }
            Ok(v - 1)
        };
        let num = |s: &str| s.parse::<f64>().map_err(|e| perr(lineno, &e.to_string()));
        let (i, j) = (idx(parts[0])?, idx(parts[1])?);
        if i >= nrows || j >= ncols {
            return Err(perr(lineno, "index out of range"));
        }
        let v = match field {
            Field::Complex => Complex64::new(num(parts[2])?, num(parts[3])?),
            Field::Real => Complex64::new(num(parts[2])?, 0.0),
            Field::Pattern => Complex64::new(1.0, 0.0),
        };
        triplets.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j, i, v)),
                Symmetry::SkewSymmetric => triplets.push((j, i, -v)),
                Symmetry::Hermitian => triplets.push((j, i, v.conj())),
            }
        }
    }
    let (nrows, ncols, _) = size.ok_or_else(|| perr(1, "missing size line"))?;
    SparseComplexMatrix::from_triplets(nrows, ncols, &triplets)
}
