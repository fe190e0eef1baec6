//! Piece files, MIDI note conversion and octave register normalisation.
//!
//! Two formats are read and written:
//!
//! * structured - a JSON object `{"label": ..., "frequencies": [...]}` or
//!   `{"label": ..., "midi_notes": [...]}`, or an array of such objects;
//! * delimited - one piece per line, `label,n1,n2,...`. Blank lines and
//!   lines starting with `#` are skipped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piece::Piece;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceFormat {
    Structured,
    Delimited,
}

impl PieceFormat {
    /// `.json` is structured, anything else delimited.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => PieceFormat::Structured,
            _ => PieceFormat::Delimited,
        }
    }
}

/// A piece as written in a file, before conversion to frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceFile {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub midi_notes: Option<Vec<i64>>,
}

impl PieceFile {
    pub fn from_piece(piece: &Piece) -> Self {
        Self { label: piece.label().to_owned(), frequencies: Some(piece.frequencies().to_vec()), midi_notes: None }
    }

    pub fn to_piece(&self) -> Result<Piece> {
        let frequencies = match (&self.frequencies, &self.midi_notes) {
            (Some(f), None) => f.clone(),
            (None, Some(notes)) => notes.iter().map(|&n| midi_to_frequency(n)).collect::<Result<_>>()?,
            (Some(_), Some(_)) => return Err(field_error(1, 1, "both `frequencies` and `midi_notes` are present")),
            (None, None) => return Err(field_error(1, 1, "one of `frequencies` or `midi_notes` is required")),
        };
        Piece::new(self.label.clone(), frequencies)
    }
}

fn field_error(line: usize, field: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, field, message: message.into() }
}

/// Reads every record in the document. `midi` makes delimited numbers MIDI
/// notes instead of frequencies.
pub fn parse_piece_files(document: &[u8], format: PieceFormat, midi: bool) -> Result<Vec<PieceFile>> {
    let text = std::str::from_utf8(document).map_err(|e| field_error(1, 1, format!("not UTF-8: {e}")))?;
    let files = match format {
        PieceFormat::Structured => {
            let parsed = if text.trim_start().starts_with('[') {
                serde_json::from_str::<Vec<PieceFile>>(text)
            } else {
                serde_json::from_str::<PieceFile>(text).map(|f| vec![f])
            };
            parsed.map_err(|e| field_error(e.line(), e.column(), e.to_string()))?
        }
        PieceFormat::Delimited => parse_delimited(text, midi)?,
    };
    if files.is_empty() {
        return Err(field_error(1, 1, "no pieces in document"));
    }
    Ok(files)
}

fn parse_delimited(text: &str, midi: bool) -> Result<Vec<PieceFile>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split(',').map(str::trim);
        let label = fields.next().unwrap_or_default();
        if label.is_empty() {
            return Err(field_error(line, 1, "empty label"));
        }
        let numbers: Vec<&str> = fields.collect();
        if numbers.is_empty() {
            return Err(field_error(line, 2, "empty note list"));
        }
        let mut file = PieceFile { label: label.to_owned(), frequencies: None, midi_notes: None };
        if midi {
            let notes = numbers
                .iter()
                .enumerate()
                .map(|(j, s)| s.parse::<i64>().map_err(|e| field_error(line, j + 2, format!("`{s}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            file.midi_notes = Some(notes);
        } else {
            let freqs = numbers
                .iter()
                .enumerate()
                .map(|(j, s)| match s.parse::<f64>() {
                    Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
                    Ok(v) => Err(field_error(line, j + 2, format!("frequency {v} must be positive"))),
                    Err(e) => Err(field_error(line, j + 2, format!("`{s}`: {e}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            file.frequencies = Some(freqs);
        }
        out.push(file);
    }
    Ok(out)
}

/// Parses a document holding one or more pieces and validates each.
pub fn parse_pieces(document: &[u8], format: PieceFormat, midi: bool) -> Result<Vec<Piece>> {
    parse_piece_files(document, format, midi)?.iter().map(PieceFile::to_piece).collect()
}

/// Parses a document holding exactly one piece.
pub fn parse_piece(document: &[u8], format: PieceFormat) -> Result<Piece> {
    let mut pieces = parse_pieces(document, format, false)?;
    if pieces.len() != 1 {
        return Err(field_error(1, 1, format!("expected one piece, found {}", pieces.len())));
    }
    Ok(pieces.remove(0))
}

pub fn serialize_piece_files(files: &[PieceFile], format: PieceFormat) -> Result<String> {
    match format {
        PieceFormat::Structured => {
            let mut s = match files {
                [one] => serde_json::to_string_pretty(one),
                many => serde_json::to_string_pretty(many),
            }
            .expect("piece files always serialize");
            s.push('\n');
            Ok(s)
        }
        PieceFormat::Delimited => {
            let mut s = String::new();
            for (i, f) in files.iter().enumerate() {
                if f.label.contains([',', '\n', '\r']) || f.label.trim() != f.label || f.label.starts_with('#') {
                    return Err(field_error(i + 1, 1, format!("label `{}` cannot be written as a delimited field", f.label)));
                }
                s.push_str(&f.label);
                match (&f.frequencies, &f.midi_notes) {
                    (Some(freqs), None) => freqs.iter().for_each(|v| s.push_str(&format!(",{v}"))),
                    (None, Some(notes)) => notes.iter().for_each(|n| s.push_str(&format!(",{n}"))),
                    _ => return Err(field_error(i + 1, 2, "exactly one of frequencies or midi_notes is required")),
                }
                s.push('\n');
            }
            Ok(s)
        }
    }
}

pub fn serialize_piece(piece: &Piece, format: PieceFormat) -> Result<String> {
    serialize_piece_files(&[PieceFile::from_piece(piece)], format)
}

/// Equal-tempered frequency with A4 (note 69) at 440 Hz.
pub fn midi_to_frequency(note: i64) -> Result<f64> {
    if !(0..=127).contains(&note) {
        return Err(Error::MidiOutOfRange(note));
    }
    Ok(440.0 * 2f64.powf((note - 69) as f64 / 12.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegisterPolicy {
    pub low: f64,
    pub high: f64,
    pub enabled: bool,
}

impl Default for RegisterPolicy {
    fn default() -> Self {
        Self { low: 100.0, high: 300.0, enabled: true }
    }
}

/// Shifts the piece by whole octaves so that its geometric mean falls in the
/// policy band. A piece already inside is left alone; otherwise the shift
/// landing closest to the band's geometric centre is used. Returns the
/// piece and the octave shift `k` (frequencies multiplied by `2^k`).
pub fn normalize_register(piece: &Piece, policy: &RegisterPolicy) -> Result<(Piece, i32)> {
    if !policy.enabled {
        return Ok((piece.clone(), 0));
    }
    if !(policy.low > 0.0 && policy.low < policy.high) {
        return Err(Error::InvalidConfig(format!("register band [{}, {}] is invalid", policy.low, policy.high)));
    }
    let f = piece.frequencies();
    let log2_mean = f.iter().map(|x| x.log2()).sum::<f64>() / f.len() as f64;
    let mean = log2_mean.exp2();
    let inside = |k: i32| {
        let m = (log2_mean + k as f64).exp2();
        m >= policy.low && m <= policy.high
    };
    if inside(0) {
        return Ok((piece.clone(), 0));
    }
    let centre = (policy.low.log2() + policy.high.log2()) / 2.0;
    let lo_k = (policy.low.log2() - log2_mean).floor() as i32;
    let hi_k = (policy.high.log2() - log2_mean).ceil() as i32;
    let k = (lo_k..=hi_k)
        .filter(|&k| inside(k))
        .min_by(|&a, &b| {
            let da = (log2_mean + a as f64 - centre).abs();
            let db = (log2_mean + b as f64 - centre).abs();
            da.total_cmp(&db).then(a.abs().cmp(&b.abs()))
        })
        .ok_or_else(|| Error::RegisterUnreachable {
            label: piece.label().to_owned(),
            mean,
            low: policy.low,
            high: policy.high,
        })?;
    let factor = 2f64.powi(k);
    let scaled = Piece::new(piece.label(), f.iter().map(|x| x * factor).collect())?;
    Ok((scaled, k))
}
