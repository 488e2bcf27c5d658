//! Matrix and vector files.
//!
//! Two formats, both row-major:
//!
//! - CSV: a header line `# <rows> <cols>` followed by one comma-separated
//!   line per row. Values are written in shortest round-trip form.
//! - Binary: 16-byte header (`b"NLSM"`, `u32` rows, `u32` cols, `u32`
//!   dtype where `0 = f64`), all little-endian, then `rows·cols` f64 values.
//!
//! Vectors are stored as single-column matrices.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NLSM";
pub const DTYPE_F64: u32 = 0;
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Csv,
    #[default]
    Binary,
}

impl MatrixFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Binary => "nlsm",
        }
    }
}

pub fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, mut w: W) -> Result<()> {
    writeln!(w, "# {} {}", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{:?}", m[(i, j)])?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv<R: BufRead>(r: R) -> Result<DMatrix<f64>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty CSV file".into()))??;
    let dims: Vec<&str> = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Format(format!("expected '# rows cols' header, got {header:?}")))?
        .split_whitespace()
        .collect();
    let [rows, cols] = dims[..] else {
        return Err(Error::Format(format!(
            "expected '# rows cols' header, got {header:?}"
        )));
    };
    let parse_dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Format(format!("bad dimension {s:?} in CSV header")))
    };
    let (rows, cols) = (parse_dim(rows)?, parse_dim(cols)?);

    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        seen += 1;
        if seen > rows {
            return Err(Error::Format(format!("more than {rows} data rows")));
        }
        let before = data.len();
        for field in line.split(',') {
            let v = field
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("bad number {field:?} on data row {seen}")))?;
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(Error::Format(format!(
                "data row {seen} has {} values, expected {cols}",
                data.len() - before
            )));
        }
    }
    if seen != rows {
        return Err(Error::Format(format!(
            "expected {rows} data rows, found {seen}"
        )));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn write_matrix_bin<W: Write>(m: &DMatrix<f64>, mut w: W) -> Result<()> {
    let dim = |d: usize| {
        u32::try_from(d).map_err(|_| Error::Format(format!("dimension {d} exceeds u32")))
    };
    w.write_all(MAGIC)?;
    w.write_all(&dim(m.nrows())?.to_le_bytes())?;
    w.write_all(&dim(m.ncols())?.to_le_bytes())?;
    w.write_all(&DTYPE_F64.to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_bin<R: Read>(mut r: R) -> Result<DMatrix<f64>> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("binary file shorter than its 16-byte header".into()))?;
    if &header[..4] != MAGIC {
        return Err(Error::Format("missing NLSM magic".into()));
    }
    let word = |k: usize| u32::from_le_bytes(header[k..k + 4].try_into().unwrap());
    let (rows, cols, dtype) = (word(4) as usize, word(8) as usize, word(12));
    if dtype != DTYPE_F64 {
        return Err(Error::Format(format!("unsupported dtype {dtype}")));
    }
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != rows * cols * 8 {
        return Err(Error::Format(format!(
            "payload is {} bytes, expected {} for a {rows}x{cols} f64 matrix",
            bytes.len(),
            rows * cols * 8
        )));
    }
    let data: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn save_matrix(path: impl AsRef<Path>, m: &DMatrix<f64>, format: MatrixFormat) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    match format {
        MatrixFormat::Csv => write_matrix_csv(m, w),
        MatrixFormat::Binary => write_matrix_bin(m, w),
    }
}

/// Load either format; binary files are recognized by their magic bytes.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let mut r = BufReader::new(File::open(path)?);
    let is_bin = r.fill_buf()?.starts_with(MAGIC);
    if is_bin {
        read_matrix_bin(r)
    } else {
        read_matrix_csv(r)
    }
}

pub fn save_vector(path: impl AsRef<Path>, v: &DVector<f64>, format: MatrixFormat) -> Result<()> {
    let m = DMatrix::from_column_slice(v.len(), 1, v.as_slice());
    save_matrix(path, &m, format)
}

/// Load a vector stored as a single column (or a single row).
pub fn load_vector(path: impl AsRef<Path>) -> Result<DVector<f64>> {
    let m = load_matrix(path)?;
    match m.shape() {
        (_, 1) | (1, _) => Ok(DVector::from_iterator(m.len(), m.iter().copied())),
        (r, c) => Err(Error::Format(format!(
            "expected a vector, found a {r}x{c} matrix"
        ))),
    }
}
