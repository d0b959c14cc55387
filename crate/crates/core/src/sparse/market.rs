//! Matrix Market coordinate I/O plus the plain-text vector and permutation
//! file formats used by the benchmark harness.
//!
//! Supported header: `%%MatrixMarket matrix coordinate real {general|symmetric}`
//! (`integer` is accepted and read as real). Pattern and complex fields are
//! rejected. Symmetric files are expanded to full general storage and
//! duplicate entries are summed.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::csr::CsrMatrix;
use super::permutation::Permutation;
use crate::error::{Error, Result};

fn parse_err(source_name: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        line,
        msg: msg.into(),
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_matrix_market_from(BufReader::new(file), &path.display().to_string())
}

/// Parses Matrix Market text from a string (used by callers without a
/// filesystem, e.g. the browser demo).
pub fn read_matrix_market_str(text: &str) -> Result<CsrMatrix> {
    read_matrix_market_from(text.as_bytes(), "<input>")
}

pub fn read_matrix_market_from<R: Read>(reader: R, source_name: &str) -> Result<CsrMatrix> {
    let mut lines = BufReader::new(reader).lines().enumerate();

    let (lineno, header) = match lines.next() {
        Some((i, l)) => (i + 1, l?),
        None => return Err(parse_err(source_name, 1, "empty file")),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5 || !fields[0].eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(parse_err(
            source_name,
            lineno,
            "header must be '%%MatrixMarket matrix coordinate real {general|symmetric}'",
        ));
    }
    if !fields[1].eq_ignore_ascii_case("matrix") || !fields[2].eq_ignore_ascii_case("coordinate") {
        return Err(parse_err(
            source_name,
            lineno,
            format!("unsupported object/format '{} {}'", fields[1], fields[2]),
        ));
    }
    match fields[3].to_ascii_lowercase().as_str() {
        "real" | "integer" => {}
        other => {
            return Err(parse_err(
                source_name,
                lineno,
                format!("unsupported field '{other}': only real matrices are handled"),
            ))
        }
    }
    let symmetric = match fields[4].to_ascii_lowercase().as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_err(
                source_name,
                lineno,
                format!("unsupported symmetry '{other}'"),
            ))
        }
    };

    // Size line: first non-comment, non-blank line.
    let (mut n, mut declared_nnz, mut have_size) = (0usize, 0usize, false);
    let mut size_line = 0usize;
    for (i, line) in &mut lines {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(
                source_name,
                lineno,
                "size line must be 'rows cols nnz'",
            ));
        }
        let rows: usize = parts[0]
            .parse()
            .map_err(|_| parse_err(source_name, lineno, "cannot parse row count"))?;
        let cols: usize = parts[1]
            .parse()
            .map_err(|_| parse_err(source_name, lineno, "cannot parse column count"))?;
        declared_nnz = parts[2]
            .parse()
            .map_err(|_| parse_err(source_name, lineno, "cannot parse entry count"))?;
        if rows != cols {
            return Err(parse_err(
                source_name,
                lineno,
                format!("matrix must be square, got {rows}x{cols}"),
            ));
        }
        if rows == 0 {
            return Err(parse_err(source_name, lineno, "matrix dimension is zero"));
        }
        n = rows;
        have_size = true;
        size_line = lineno;
        break;
    }
    if !have_size {
        return Err(parse_err(source_name, 0, "missing size line"));
    }

    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(declared_nnz);
    let mut seen = 0usize;
    for (i, line) in &mut lines {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut parts = t.split_whitespace();
        let row: usize = parts
            .next()
            .ok_or_else(|| parse_err(source_name, lineno, "missing row index"))?
            .parse()
            .map_err(|_| parse_err(source_name, lineno, "cannot parse row index"))?;
        let col: usize = parts
            .next()
            .ok_or_else(|| parse_err(source_name, lineno, "missing column index"))?
            .parse()
            .map_err(|_| parse_err(source_name, lineno, "cannot parse column index"))?;
        let val: f64 = match parts.next() {
            Some(s) => s
                .parse()
                .map_err(|_| parse_err(source_name, lineno, format!("cannot parse value '{s}'")))?,
            None => {
                return Err(parse_err(
                    source_name,
                    lineno,
                    "missing value (pattern files are not supported)",
                ))
            }
        };
        if parts.next().is_some() {
            return Err(parse_err(
                source_name,
                lineno,
                "extra token on entry line (complex fields are not supported)",
            ));
        }
        if row < 1 || row > n || col < 1 || col > n {
            return Err(parse_err(
                source_name,
                lineno,
                format!("entry ({row}, {col}) out of range for dimension {n}"),
            ));
        }
        seen += 1;
        if seen > declared_nnz {
            return Err(parse_err(
                source_name,
                lineno,
                format!("more than the declared {declared_nnz} entries"),
            ));
        }
        triplets.push((row - 1, col - 1, val));
        if symmetric && row != col {
            triplets.push((col - 1, row - 1, val));
        }
    }
    if seen < declared_nnz {
        return Err(parse_err(
            source_name,
            size_line,
            format!("declared {declared_nnz} entries but found {seen}"),
        ));
    }
    CsrMatrix::from_triplets(n, &triplets)
}

/// Writes general coordinate format with 17 significant digits, enough for
/// an exact f64 round trip.
pub fn write_matrix_market(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market_to(a, &mut w)
}

pub fn write_matrix_market_to<W: Write>(a: &CsrMatrix, w: &mut W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.n(), a.n(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

pub fn matrix_market_string(a: &CsrMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix_market_to(a, &mut buf).expect("write to Vec cannot fail");
    String::from_utf8(buf).expect("matrix market output is ASCII")
}

/// Reads a dense vector: one real per line, exactly `n` lines.
pub fn read_vector(path: impl AsRef<Path>, n: usize) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let file = File::open(path)?;
    let mut out = Vec::with_capacity(n);
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| parse_err(&name, lineno, format!("cannot parse value '{t}'")))?;
        out.push(v);
    }
    if out.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: out.len(),
        });
    }
    Ok(out)
}

/// Writes a diagonal (or any dense vector), one value per line.
pub fn write_vector(values: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in values {
        writeln!(w, "{v:.16e}")?;
    }
    Ok(())
}

/// Reads a permutation file: line k holds the 1-based new position of old
/// index k. Must describe a bijection on {0, ..., n-1}.
pub fn read_permutation(path: impl AsRef<Path>, n: usize) -> Result<Permutation> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let file = File::open(path)?;
    let mut targets = Vec::with_capacity(n);
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: usize = t
            .parse()
            .map_err(|_| parse_err(&name, lineno, format!("cannot parse index '{t}'")))?;
        if v < 1 || v > n {
            return Err(parse_err(
                &name,
                lineno,
                format!("index {v} out of range 1..={n}"),
            ));
        }
        targets.push(v - 1);
    }
    if targets.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: targets.len(),
        });
    }
    Permutation::from_vec(targets)
}
