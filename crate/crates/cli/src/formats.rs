//! LIBSVM text and PGM image readers and writers.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use apda_core::problems::Image;
use apda_core::sparse::CsrMatrix;
use log::warn;

use crate::error::{CliError, Result};

/// Parses `<label> <idx>:<val> ...` lines with 1-based, strictly increasing
/// indices. `#` starts a comment. The column count is the largest index seen.
/// Labels must be `{-1, +1}` or any other two-value set, which is remapped
/// with the smaller value to `-1` (e.g. `{0, 1}` or `{1, 2}`).
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<(CsrMatrix, Vec<f64>)> {
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut cols = 0;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| CliError::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line");
        let label: f64 = label_tok.parse().map_err(|_| CliError::Parse {
            line: lineno,
            msg: format!("bad label {label_tok:?}"),
        })?;
        let mut row = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| CliError::Parse {
                line: lineno,
                msg: format!("expected idx:val, got {tok:?}"),
            })?;
            let idx: usize = idx.parse().map_err(|_| CliError::Parse {
                line: lineno,
                msg: format!("bad index {idx:?}"),
            })?;
            let val: f64 = val.parse().map_err(|_| CliError::Parse {
                line: lineno,
                msg: format!("bad value {val:?}"),
            })?;
            if idx == 0 {
                return Err(CliError::Parse {
                    line: lineno,
                    msg: "indices are 1-based".into(),
                });
            }
            if idx <= last {
                return Err(CliError::Format(format!("indices not increasing at line {lineno}")));
            }
            last = idx;
            row.push((idx - 1, val));
        }
        cols = cols.max(last);
        rows.push(row);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(CliError::Format("empty LIBSVM file".into()));
    }
    normalize_labels(&mut labels)?;
    Ok((CsrMatrix::from_rows(cols, &rows)?, labels))
}

fn normalize_labels(labels: &mut [f64]) -> Result<()> {
    if labels.iter().all(|&l| l == 1.0 || l == -1.0) {
        return Ok(());
    }
    let mut classes: Vec<f64> = labels.to_vec();
    classes.sort_by(f64::total_cmp);
    classes.dedup();
    if classes.len() != 2 {
        return Err(CliError::Format(format!(
            "labels must take exactly two values (or be +-1), found {classes:?}"
        )));
    }
    let (lo, hi) = (classes[0], classes[1]);
    warn!("labels {{{lo}, {hi}}} remapped to {{-1, +1}}");
    labels.iter_mut().for_each(|l| *l = if *l == hi { 1.0 } else { -1.0 });
    Ok(())
}

pub fn load_libsvm(path: &Path) -> Result<(CsrMatrix, Vec<f64>)> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_libsvm(std::io::BufReader::new(file))
}

/// Writes one line per row; values use the shortest representation that
/// reparses to the same `f64`.
pub fn write_libsvm<W: Write>(mut w: W, q: &CsrMatrix, labels: &[f64]) -> std::io::Result<()> {
    for (r, label) in labels.iter().enumerate().take(q.rows()) {
        write!(w, "{label}")?;
        for (c, v) in q.row(r) {
            write!(w, " {}:{v}", c + 1)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Reads a P2 or P5 image (maxval up to 65535) scaled to `[0, 1]`.
pub fn parse_pgm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0;
    let magic = header_token(bytes, &mut pos)?;
    let binary = match magic.as_str() {
        "P2" => false,
        "P5" => true,
        other => return Err(CliError::Format(format!("bad PGM magic {other:?}"))),
    };
    let width = header_number(bytes, &mut pos, "width")?;
    let height = header_number(bytes, &mut pos, "height")?;
    let maxval = header_number(bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(CliError::Format(format!(
            "PGM maxval must be in 1..=65535, got {maxval}"
        )));
    }
    let n = width * height;
    let scale = maxval as f64;
    let pixels: Vec<f64> = if binary {
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let wide = maxval > 255;
        let need = n * if wide { 2 } else { 1 };
        let raster = bytes.get(pos..pos + need).ok_or_else(|| {
            CliError::Format(format!(
                "truncated PGM payload: expected {need} bytes, found {}",
                bytes.len().saturating_sub(pos)
            ))
        })?;
        if wide {
            raster
                .chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]) as f64 / scale)
                .collect()
        } else {
            raster.iter().map(|&b| b as f64 / scale).collect()
        }
    } else {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let v = header_number(bytes, &mut pos, "pixel").map_err(|_| {
                CliError::Format(format!(
                    "truncated PGM payload: expected {n} values, found {}",
                    out.len()
                ))
            })?;
            if v > maxval {
                return Err(CliError::Format(format!("pixel value {v} exceeds maxval {maxval}")));
            }
            out.push(v as f64 / scale);
        }
        out
    };
    Ok(Image::new(height, width, pixels)?)
}

fn header_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(CliError::Format("unexpected end of PGM data".into()));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = header_token(bytes, pos)?;
    tok.parse()
        .map_err(|_| CliError::Format(format!("bad PGM {what} {tok:?}")))
}

pub fn load_pgm(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_pgm(&bytes)
}

/// P5 with maxval 255; values are clamped to `[0, 1]` and rounded half away
/// from zero.
pub fn encode_pgm(image: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(image.pixels.iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

pub fn write_pgm(path: &Path, image: &Image) -> Result<()> {
    fs::write(path, encode_pgm(image)).map_err(|e| CliError::io(path, e))
}
