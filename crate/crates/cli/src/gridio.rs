//! Grid files: a header line `R C`, then `R` rows of `C` whitespace-separated
//! tokens. `?` is the wildcard; every other token is interned to a symbol, so
//! the pattern and the text must be read through the same [`Interner`].

use std::collections::HashMap;
use std::fmt::Write as _;

use kmatch2d_core::{Grid2D, Sym, WILDCARD};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

fn malformed(line: usize, msg: impl Into<String>) -> GridError {
    GridError::Malformed { line, msg: msg.into() }
}

/// Token ↔ symbol table.
#[derive(Clone, Debug, Default)]
pub struct Interner {
    ids: HashMap<String, Sym>,
    names: Vec<String>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, tok: &str) -> Sym {
        if tok == "?" {
            return WILDCARD;
        }
        if let Some(&s) = self.ids.get(tok) {
            return s;
        }
        let s = self.names.len() as Sym;
        self.ids.insert(tok.to_owned(), s);
        self.names.push(tok.to_owned());
        s
    }

    /// Name of `s`; symbols never interned print as their number.
    pub fn name(&self, s: Sym) -> String {
        if s == WILDCARD {
            return "?".into();
        }
        self.names.get(s as usize).cloned().unwrap_or_else(|| s.to_string())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Parses a grid file. Blank lines after the last row are ignored.
pub fn read_grid(src: &str, names: &mut Interner) -> Result<Grid2D, GridError> {
    let mut lines = src.lines().enumerate();
    let (_, header) = lines.find(|(_, l)| !l.trim().is_empty()).ok_or_else(|| malformed(1, "empty file"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let [r, c] = dims[..] else {
        return Err(malformed(1, "header must be \"R C\""));
    };
    let rows: usize = r.parse().map_err(|_| malformed(1, format!("bad row count {r:?}")))?;
    let cols: usize = c.parse().map_err(|_| malformed(1, format!("bad column count {c:?}")))?;
    if rows == 0 || cols == 0 {
        return Err(malformed(1, "grid must be non-empty"));
    }
    let mut cells = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if seen == rows {
            return Err(malformed(i + 1, "more rows than declared"));
        }
        let before = cells.len();
        cells.extend(line.split_whitespace().map(|t| names.intern(t)));
        if cells.len() - before != cols {
            return Err(malformed(i + 1, format!("expected {cols} tokens, found {}", cells.len() - before)));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(malformed(src.lines().count(), format!("expected {rows} rows, found {seen}")));
    }
    Ok(Grid2D::from_rows(cols, rows, cells).expect("dimensions checked"))
}

pub fn write_grid(g: &Grid2D, names: &Interner) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.height, g.width).unwrap();
    for row in g.data.chunks(g.width) {
        let toks: Vec<String> = row.iter().map(|&s| names.name(s)).collect();
        writeln!(out, "{}", toks.join(" ")).unwrap();
    }
    out
}
