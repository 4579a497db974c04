//! Design CSV files: one run per line as comma-separated 1-based labels, with
//! an optional leading comment such as `# kind=coa d=5 seed=42 lambda=1`.

use std::io::{BufRead, Write};

use super::{DesignKind, OofADesign, Permutation};
use crate::error::{Error, Result};

pub fn write_design_csv<W: Write>(design: &OofADesign, mut out: W) -> Result<()> {
    let mut header = format!("# kind={} d={}", design.kind().as_str(), design.d());
    if let Some(seed) = design.provenance().seed {
        header.push_str(&format!(" seed={seed}"));
    }
    if let Some(lambda) = design.lambda() {
        header.push_str(&format!(" lambda={lambda}"));
    }
    writeln!(out, "{header}")?;
    for row in design.rows() {
        let line: Vec<String> = row.labels().iter().map(|l| l.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Reads a design; a `kind=` header entry is verified against the rows.
pub fn read_design_csv<R: BufRead>(input: R) -> Result<OofADesign> {
    let mut kind = DesignKind::Raw;
    let mut declared_d = None;
    let mut seed = None;
    let mut rows = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            for token in comment.split_whitespace() {
                let Some((key, value)) = token.split_once('=') else { continue };
                match key {
                    "kind" => {
                        kind = match value {
                            "coa" => DesignKind::Coa,
                            "ls" => DesignKind::Ls,
                            "raw" => DesignKind::Raw,
                            other => return Err(Error::parse(lineno, format!("unknown design kind `{other}`"))),
                        }
                    }
                    "d" => declared_d = Some(parse_usize(value, lineno)?),
                    "seed" => {
                        seed = Some(value.parse::<u64>().map_err(|e| Error::parse(lineno, format!("seed: {e}")))?)
                    }
                    _ => {}
                }
            }
            continue;
        }
        let labels = text
            .split(',')
            .map(|t| parse_usize(t.trim(), lineno))
            .collect::<Result<Vec<_>>>()?;
        let row = Permutation::from_labels(&labels).map_err(|e| Error::parse(lineno, e.to_string()))?;
        if let Some(first) = rows.first().map(Permutation::len) {
            if row.len() != first {
                return Err(Error::parse(lineno, format!("expected {first} labels, found {}", row.len())));
            }
        }
        rows.push(row);
    }
    let d = match (declared_d, rows.first()) {
        (Some(d), Some(row)) if row.len() != d => {
            return Err(Error::InvalidDesign(format!("header declares d={d} but rows have {} labels", row.len())))
        }
        (Some(d), _) => d,
        (None, Some(row)) => row.len(),
        (None, None) => return Err(Error::InvalidDesign("design file has no rows".into())),
    };
    let mut design = OofADesign::raw(d, rows)?.with_kind(kind)?;
    design.provenance.base = "file".into();
    design.provenance.seed = seed;
    Ok(design)
}

fn parse_usize(text: &str, line: usize) -> Result<usize> {
    text.parse::<usize>().map_err(|e| Error::parse(line, format!("`{text}`: {e}")))
}
