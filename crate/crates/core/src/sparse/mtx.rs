//! Matrix Market coordinate files.
//!
//! Supported: `coordinate` × {`real`, `integer`, `pattern`} × {`general`,
//! `symmetric`}. Symmetric files are expanded to both triangles, pattern
//! entries get the value one, and duplicate entries are summed (pattern
//! duplicates collapse).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Values that can be read from and written to a Matrix Market file.
pub trait MtxValue: Copy + std::ops::Add<Output = Self> {
    /// Field keyword written in the header.
    const FIELD: &'static str;

    fn parse_token(tok: &str) -> Option<Self>;
    fn one() -> Self;
    fn format(&self) -> String;
}

impl MtxValue for f64 {
    const FIELD: &'static str = "real";

    fn parse_token(tok: &str) -> Option<Self> {
        tok.parse().ok()
    }

    fn one() -> Self {
        1.0
    }

    fn format(&self) -> String {
        format!("{self:e}")
    }
}

impl MtxValue for i64 {
    const FIELD: &'static str = "integer";

    fn parse_token(tok: &str) -> Option<Self> {
        tok.parse().ok().or_else(|| {
            let f: f64 = tok.parse().ok()?;
            (f.fract() == 0.0 && f.abs() < 9.0e15).then_some(f as i64)
        })
    }

    fn one() -> Self {
        1
    }

    fn format(&self) -> String {
        self.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

pub fn read_matrix_market<T: MtxValue>(path: impl AsRef<Path>) -> Result<CsrMatrix<T>> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_matrix_market_from(BufReader::new(file), path)
}

/// Parses from any reader; `origin` is only used in error messages.
pub fn read_matrix_market_from<T: MtxValue, R: BufRead>(
    reader: R,
    origin: impl AsRef<Path>,
) -> Result<CsrMatrix<T>> {
    let origin: PathBuf = origin.as_ref().to_path_buf();
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.clone(),
        line,
        msg,
    };

    let mut lines = reader.lines().enumerate().map(|(n, l)| (n + 1, l));

    let (lno, header) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(err(1, "empty file".into())),
    };
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(err(lno, format!("malformed header {header:?}")));
    }
    if words[2] != "coordinate" {
        return Err(err(lno, format!("unsupported format {:?}", words[2])));
    }
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(err(lno, format!("unsupported field {other:?}"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(err(lno, format!("unsupported symmetry {other:?}"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triples: Vec<(usize, usize, T)> = Vec::new();
    let mut seen = 0usize;
    for (lno, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some((nrows, ncols, nnz)) = size else {
            if toks.len() != 3 {
                return Err(err(lno, format!("expected size line, got {line:?}")));
            }
            let parse = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| err(lno, format!("invalid size value {t:?}")))
            };
            let dims = (parse(toks[0])?, parse(toks[1])?, parse(toks[2])?);
            if symmetry == Symmetry::Symmetric && dims.0 != dims.1 {
                return Err(err(lno, "symmetric matrix must be square".into()));
            }
            triples.reserve(dims.2 * if symmetry == Symmetry::Symmetric { 2 } else { 1 });
            size = Some(dims);
            continue;
        };
        let want = if field == Field::Pattern { 2 } else { 3 };
        if toks.len() < want {
            return Err(err(lno, format!("expected {want} fields, got {line:?}")));
        }
        if seen == nnz {
            return Err(err(lno, format!("more than the declared {nnz} entries")));
        }
        let index = |t: &str, bound: usize| -> Result<usize> {
            let v: usize = t
                .parse()
                .map_err(|_| err(lno, format!("invalid index {t:?}")))?;
            if v == 0 || v > bound {
                return Err(err(lno, format!("index {v} outside 1..={bound}")));
            }
            Ok(v - 1)
        };
        let i = index(toks[0], nrows)?;
        let j = index(toks[1], ncols)?;
        let v = match field {
            Field::Pattern => T::one(),
            _ => T::parse_token(toks[2])
                .ok_or_else(|| err(lno, format!("invalid value {:?}", toks[2])))?,
        };
        triples.push((i, j, v));
        if symmetry == Symmetry::Symmetric && i != j {
            triples.push((j, i, v));
        }
        seen += 1;
    }
    let Some((nrows, ncols, nnz)) = size else {
        return Err(err(lno + 1, "missing size line".into()));
    };
    if seen != nnz {
        return Err(err(0, format!("declared {nnz} entries but found {seen}")));
    }
    if field == Field::Pattern {
        CsrMatrix::from_triples(nrows, ncols, triples, |x, _| x)
    } else {
        CsrMatrix::from_triples(nrows, ncols, triples, |x, y| x + y)
    }
}

/// Writes a `general` coordinate file with 1-based indices.
pub fn write_matrix_market<T: MtxValue, W: Write>(mut w: W, a: &CsrMatrix<T>) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate {} general", T::FIELD)?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.triples() {
        writeln!(w, "{} {} {}", i + 1, j + 1, v.format())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes only the pattern.
pub fn write_matrix_market_pattern<T, W: Write>(mut w: W, a: &CsrMatrix<T>) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate pattern general")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for i in 0..a.nrows() {
        for &j in a.row(i).0 {
            writeln!(w, "{} {}", i + 1, j + 1)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_market_file<T: MtxValue>(path: impl AsRef<Path>, a: &CsrMatrix<T>) -> Result<()> {
    write_matrix_market(BufWriter::new(File::create(path)?), a)
}
