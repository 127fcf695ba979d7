//! Text and audio file formats.
//!
//! Matrix files: a `d N` header line followed by `d` rows of `N` entries,
//! each entry `re,im` in 17 significant digits, entries separated by one
//! space. Symbol files hold one `re,im` entry per line. Mask files are
//! `M` lines of `L/a` space-separated nonnegative reals. Audio is mono
//! 16-bit PCM WAV.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::gabor::GaborLattice;
use crate::inversion::InversionReport;
use crate::symbol::Symbol;

fn format_entry(z: c64) -> String {
    format!("{:.16e},{:.16e}", z.re, z.im)
}

fn parse_entry(tok: &str, line: usize) -> Result<c64> {
    let (re, im) = tok.split_once(',').ok_or_else(|| Error::Parse {
        line,
        msg: format!("entry `{tok}` is not of the form re,im"),
    })?;
    let num = |s: &str| {
        s.parse::<f64>().map_err(|_| Error::Parse {
            line,
            msg: format!("`{s}` is not a number"),
        })
    };
    Ok(c64::new(num(re)?, num(im)?))
}

pub fn write_matrix<W: Write>(mut w: W, m: MatRef<'_, c64>) -> Result<()> {
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    let mut line = String::new();
    for i in 0..m.nrows() {
        line.clear();
        for j in 0..m.ncols() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&format_entry(m[(i, j)]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_matrix<R: BufRead>(r: R) -> Result<Mat<c64>> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        msg: "empty file, expected `d N` header".into(),
    })??;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("bad dimension `{s}` in header"),
        })
    };
    let (d, n) = match dims.as_slice() {
        [d, n] => (parse_dim(d)?, parse_dim(n)?),
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header `{header}` is not `d N`"),
            })
        }
    };
    let mut m = Mat::zeros(d, n);
    for i in 0..d {
        let lineno = i + 2;
        let line = lines.next().ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("expected {d} rows, file ends after {i}"),
        })??;
        let toks: Vec<&str> = line.split(' ').collect();
        if toks.len() != n {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {n} entries, found {}", toks.len()),
            });
        }
        for (j, tok) in toks.iter().enumerate() {
            m[(i, j)] = parse_entry(tok, lineno)?;
        }
    }
    for (k, rest) in lines.enumerate() {
        if !rest?.trim().is_empty() {
            return Err(Error::Parse {
                line: d + 2 + k,
                msg: "trailing content after the last row".into(),
            });
        }
    }
    Ok(m)
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: MatRef<'_, c64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<Mat<c64>> {
    read_matrix(BufReader::new(File::open(path)?))
}

pub fn write_symbol<W: Write>(mut w: W, m: &Symbol) -> Result<()> {
    for &z in m.values() {
        writeln!(w, "{}", format_entry(z))?;
    }
    Ok(())
}

/// Blank lines are skipped.
pub fn read_symbol<R: BufRead>(r: R) -> Result<Symbol> {
    let mut values = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(parse_entry(t, k + 1)?);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "symbol file has no entries".into(),
        });
    }
    Symbol::new(values)
}

pub fn write_symbol_file(path: impl AsRef<Path>, m: &Symbol) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_symbol(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn read_symbol_file(path: impl AsRef<Path>) -> Result<Symbol> {
    read_symbol(BufReader::new(File::open(path)?))
}

/// `k,predicted_bound,measured_residual` lines after the report header;
/// the residual column is blank without an oracle.
pub fn write_report<W: Write>(mut w: W, report: &InversionReport) -> Result<()> {
    writeln!(w, "{}", report.header())?;
    for (k, b) in report.bounds.iter().enumerate() {
        match report.residuals.get(k) {
            Some(r) => writeln!(w, "{k},{b:.16e},{r:.16e}")?,
            None => writeln!(w, "{k},{b:.16e},")?,
        }
    }
    Ok(())
}

/// Convergence table `iteration,measured_error,predicted_bound`.
pub fn write_convergence_csv<W: Write>(mut w: W, report: &InversionReport) -> Result<()> {
    writeln!(w, "iteration,measured_error,predicted_bound")?;
    for (k, b) in report.bounds.iter().enumerate() {
        match report.residuals.get(k) {
            Some(r) => writeln!(w, "{k},{r:.16e},{b:.16e}")?,
            None => writeln!(w, "{k},,{b:.16e}")?,
        }
    }
    Ok(())
}

/// Time-frequency mask: `rows = M` channels by `cols = L/a` frames.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskGrid {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl MaskGrid {
    /// `values` in row-major order (channel by channel).
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::shape(
                "mask grid",
                format!("{rows}x{cols}"),
                values.len(),
            ));
        }
        if let Some(i) = values.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "mask entry ({}, {}) = {} is not a nonnegative real",
                i / cols,
                i % cols,
                values[i]
            )));
        }
        Ok(MaskGrid { rows, cols, values })
    }

    pub fn constant(lattice: &GaborLattice, v: f64) -> Result<Self> {
        let (r, c) = (lattice.channels(), lattice.time_positions());
        MaskGrid::new(r, c, vec![v; r * c])
    }

    pub fn from_fn(lattice: &GaborLattice, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let (r, c) = (lattice.channels(), lattice.time_positions());
        let values = (0..r * c).map(|i| f(i / c, i % c)).collect();
        MaskGrid::new(r, c, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Value at channel `k`, frame `n`.
    pub fn get(&self, k: usize, n: usize) -> f64 {
        self.values[k * self.cols + n]
    }

    /// Symbol in Gabor atom order `i = k + M·n`.
    pub fn to_symbol(&self, lattice: &GaborLattice) -> Result<Symbol> {
        if self.rows != lattice.channels() || self.cols != lattice.time_positions() {
            return Err(Error::shape(
                "mask against lattice",
                format!("{}x{}", lattice.channels(), lattice.time_positions()),
                format!("{}x{}", self.rows, self.cols),
            ));
        }
        let vals = (0..lattice.atom_count())
            .map(|i| {
                let (k, n) = lattice.coords(i);
                c64::new(self.get(k, n), 0.0)
            })
            .collect();
        Symbol::new(vals)
    }
}

pub fn write_mask<W: Write>(mut w: W, mask: &MaskGrid) -> Result<()> {
    for k in 0..mask.rows {
        let row: Vec<String> = (0..mask.cols)
            .map(|n| format!("{}", mask.get(k, n)))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Rows of whitespace-separated reals; blank lines are skipped and all
/// rows must have equal length.
pub fn read_mask<R: BufRead>(r: R) -> Result<MaskGrid> {
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    line: k + 1,
                    msg: format!("`{t}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::Parse {
                    line: k + 1,
                    msg: format!("expected {c} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse {
        line: 1,
        msg: "mask file has no rows".into(),
    })?;
    MaskGrid::new(rows, cols, values)
}

pub fn read_mask_file(path: impl AsRef<Path>) -> Result<MaskGrid> {
    read_mask(BufReader::new(File::open(path)?))
}

pub fn write_mask_file(path: impl AsRef<Path>, mask: &MaskGrid) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mask(&mut w, mask)?;
    w.flush()?;
    Ok(())
}

/// Mono audio with samples in `[−1, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("signal has no samples".into()));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidArgument(
                "sample rate must be positive".into(),
            ));
        }
        Ok(Signal {
            samples,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn wav_err(offset: usize, msg: impl Into<String>) -> Error {
    Error::Wav {
        offset: offset as u64,
        msg: msg.into(),
    }
}

fn u16_at(b: &[u8], at: usize) -> Result<u16> {
    b.get(at..at + 2)
        .map(|s| u16::from_le_bytes([s[0], s[1]]))
        .ok_or_else(|| wav_err(b.len(), "unexpected end of file"))
}

fn u32_at(b: &[u8], at: usize) -> Result<u32> {
    b.get(at..at + 4)
        .map(|s| u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
        .ok_or_else(|| wav_err(b.len(), "unexpected end of file"))
}

/// Parses a RIFF/WAVE byte stream holding mono 16-bit PCM.
pub fn decode_wav(bytes: &[u8]) -> Result<Signal> {
    if bytes.len() < 12 {
        return Err(wav_err(bytes.len(), "truncated RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(wav_err(0, "missing RIFF tag"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(wav_err(8, "missing WAVE tag"));
    }
    let mut pos = 12;
    let mut format: Option<(u16, u32)> = None;
    while pos < bytes.len() {
        if pos + 8 > bytes.len() {
            return Err(wav_err(pos, "truncated chunk header"));
        }
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4)? as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 || body + 16 > bytes.len() {
                    return Err(wav_err(body, "truncated fmt chunk"));
                }
                let tag = u16_at(bytes, body)?;
                let channels = u16_at(bytes, body + 2)?;
                let rate = u32_at(bytes, body + 4)?;
                let bits = u16_at(bytes, body + 14)?;
                if tag != 1 {
                    return Err(wav_err(
                        body,
                        format!("unsupported encoding tag {tag}, only PCM (1)"),
                    ));
                }
                if channels != 1 {
                    return Err(wav_err(
                        body + 2,
                        format!("unsupported channel count {channels}, only mono"),
                    ));
                }
                if bits != 16 {
                    return Err(wav_err(
                        body + 14,
                        format!("unsupported sample width {bits} bits, only 16"),
                    ));
                }
                format = Some((channels, rate));
            }
            b"data" => {
                let (_, rate) =
                    format.ok_or_else(|| wav_err(pos, "data chunk before fmt chunk"))?;
                if body + size > bytes.len() {
                    return Err(wav_err(
                        bytes.len(),
                        format!("data chunk declares {size} bytes, file ends early"),
                    ));
                }
                if !size.is_multiple_of(2) {
                    return Err(wav_err(pos + 4, "odd data size for 16-bit samples"));
                }
                let samples = bytes[body..body + size]
                    .chunks_exact(2)
                    .map(|s| i16::from_le_bytes([s[0], s[1]]) as f64 / 32768.0)
                    .collect();
                return Signal::new(samples, rate).map_err(|e| wav_err(body, e.to_string()));
            }
            _ => {}
        }
        pos = body + size + (size & 1);
    }
    Err(wav_err(bytes.len(), "no data chunk"))
}

fn quantize(x: f64) -> i16 {
    (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

pub fn encode_wav(signal: &Signal) -> Vec<u8> {
    let data_len = (signal.samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&signal.sample_rate.to_le_bytes());
    out.extend_from_slice(&(signal.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &x in &signal.samples {
        out.extend_from_slice(&quantize(x).to_le_bytes());
    }
    out
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<Signal> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    decode_wav(&bytes)
}

/// Samples outside `[−1, 1)` are clipped.
pub fn write_wav(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    let mut f = File::create(path)?;
    f.write_all(&encode_wav(signal))?;
    Ok(())
}
