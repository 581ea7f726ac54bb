//! The line-oriented stream file format.
//!
//! ```text
//! line     := comment | blank | header | fraction
//! comment  := '#' ...
//! header   := "!threshold" ws fraction
//! fraction := digits "/" digits
//! ```
//!
//! Fractions are exact; decimal notation is a syntax error by design.

use num_bigint::BigUint;
use probstream::RationalProbability;

/// Parsed stream file: elements in order plus an optional header threshold.
#[derive(Debug, Clone, Default)]
pub struct StreamFile {
    pub threshold: Option<RationalProbability>,
    pub elements: Vec<RationalProbability>,
}

pub fn parse_fraction(text: &str) -> Result<RationalProbability, String> {
    let (numer, denom) = text
        .split_once('/')
        .ok_or_else(|| format!("expected a fraction r/s, got {text:?}"))?;
    let parse_side = |side: &str, name: &str| -> Result<BigUint, String> {
        if side.is_empty() || !side.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("{name} of {text:?} is not a decimal integer"));
        }
        side.parse::<BigUint>()
            .map_err(|e| format!("{name} of {text:?}: {e}"))
    };
    let n = parse_side(numer, "numerator")?;
    let d = parse_side(denom, "denominator")?;
    RationalProbability::new(n, d).map_err(|e| e.to_string())
}

pub fn parse_stream(input: &str) -> Result<StreamFile, String> {
    let mut file = StreamFile::default();
    for (idx, raw) in input.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("!threshold") {
            if file.threshold.is_some() {
                return Err(format!("line {lineno}: duplicate !threshold header"));
            }
            if !file.elements.is_empty() {
                return Err(format!(
                    "line {lineno}: !threshold must precede all data lines"
                ));
            }
            let value = parse_fraction(rest.trim()).map_err(|e| format!("line {lineno}: {e}"))?;
            file.threshold = Some(value);
            continue;
        }
        if line.starts_with('!') {
            return Err(format!("line {lineno}: unknown directive {line:?}"));
        }
        let q = parse_fraction(line).map_err(|e| format!("line {lineno}: {e}"))?;
        file.elements.push(q);
    }
    Ok(file)
}

/// Render elements back into the file format (data lines only).
pub fn render_stream(threshold: Option<&RationalProbability>, elements: &[RationalProbability]) -> String {
    let mut out = String::new();
    if let Some(t) = threshold {
        out.push_str(&format!("!threshold {t}\n"));
    }
    for q in elements {
        out.push_str(&format!("{q}\n"));
    }
    out
}
