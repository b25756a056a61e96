use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::SimplexConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopyKind {
    Sphere,
    Simplex,
}

impl fmt::Display for CopyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CopyKind::Sphere => "sphere",
            CopyKind::Simplex => "simplex",
        })
    }
}

/// An exact, canonically ordered set of lattice points: sphere points, or
/// concatenated simplex copies `(m_1, ..., m_k)`.
///
/// Points are stored flat, `dim = n * k` coordinates per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopySet {
    kind: CopyKind,
    n: usize,
    k: usize,
    lambda_sq: u64,
    dist_sq: Vec<Vec<i64>>,
    coords: Vec<i64>,
}

#[derive(Debug, Error)]
pub enum CopySetFormatError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("checksum mismatch: header {expected}, content {found}")]
    Checksum { expected: String, found: String },
}

/// The header record written before the rows.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CopySetHeader {
    pub kind: CopyKind,
    pub n: usize,
    pub k: usize,
    pub lambda_sq: u64,
    pub dist_sq: Vec<Vec<i64>>,
    pub count: usize,
    pub checksum: String,
}

impl CopySet {
    pub(crate) fn from_parts(
        kind: CopyKind,
        n: usize,
        k: usize,
        lambda_sq: u64,
        dist_sq: Vec<Vec<i64>>,
        coords: Vec<i64>,
    ) -> Self {
        debug_assert_eq!(coords.len() % (n * k), 0);
        Self {
            kind,
            n,
            k,
            lambda_sq,
            dist_sq,
            coords,
        }
    }

    pub fn kind(&self) -> CopyKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.n * self.k
    }

    pub fn lambda_sq(&self) -> u64 {
        self.lambda_sq
    }

    pub fn dist_sq(&self) -> &[Vec<i64>] {
        &self.dist_sq
    }

    pub fn count(&self) -> usize {
        self.coords.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[i64]> + '_ {
        self.coords.chunks_exact(self.dim())
    }

    /// Whether this set was produced for `simplex` at `lambda_sq`.
    pub fn matches(&self, simplex: &SimplexConfig, lambda_sq: u64) -> bool {
        self.n == simplex.n()
            && self.k == simplex.k()
            && self.lambda_sq == lambda_sq
            && self.dist_sq == simplex.dist_sq()
    }

    fn rows_text(&self) -> String {
        let mut text = String::with_capacity(self.coords.len() * 3);
        for p in self.points() {
            for (i, x) in p.iter().enumerate() {
                if i > 0 {
                    text.push(' ');
                }
                text.push_str(&x.to_string());
            }
            text.push('\n');
        }
        text
    }

    pub fn header(&self) -> CopySetHeader {
        CopySetHeader {
            kind: self.kind,
            n: self.n,
            k: self.k,
            lambda_sq: self.lambda_sq,
            dist_sq: self.dist_sq.clone(),
            count: self.count(),
            checksum: checksum(&self.rows_text()),
        }
    }

    /// Header as one JSON line, then `count` rows of `nk` decimal integers.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let rows = self.rows_text();
        let mut header = self.header();
        header.checksum = checksum(&rows);
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        w.write_all(rows.as_bytes())?;
        w.flush()
    }

    /// Parse the format written by [`CopySet::write_to`]; the content checksum
    /// must match the header.
    pub fn read_from<R: BufRead>(reader: R) -> Result<Self, CopySetFormatError> {
        let mut lines = reader.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| CopySetFormatError::Header("empty input".into()))??;
        let header: CopySetHeader = serde_json::from_str(&header_line)
            .map_err(|e| CopySetFormatError::Header(e.to_string()))?;
        let dim = header.n * header.k;
        if dim == 0 {
            return Err(CopySetFormatError::Header("zero dimension".into()));
        }
        let mut coords = Vec::with_capacity(header.count * dim);
        let mut rows = String::new();
        let mut found = 0;
        for (row, line) in lines.enumerate() {
            let line = line?;
            let before = coords.len();
            for tok in line.split_ascii_whitespace() {
                let v = tok.parse::<i64>().map_err(|e| CopySetFormatError::Row {
                    row,
                    reason: format!("{tok:?}: {e}"),
                })?;
                coords.push(v);
            }
            if coords.len() - before != dim {
                return Err(CopySetFormatError::Row {
                    row,
                    reason: format!("expected {dim} integers, found {}", coords.len() - before),
                });
            }
            rows.push_str(&line);
            rows.push('\n');
            found += 1;
        }
        if found != header.count {
            return Err(CopySetFormatError::RowCount {
                expected: header.count,
                found,
            });
        }
        let actual = checksum(&rows);
        if actual != header.checksum {
            return Err(CopySetFormatError::Checksum {
                expected: header.checksum,
                found: actual,
            });
        }
        Ok(Self::from_parts(
            header.kind,
            header.n,
            header.k,
            header.lambda_sq,
            header.dist_sq,
            coords,
        ))
    }
}

fn checksum(rows: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(rows.as_bytes())))
}
