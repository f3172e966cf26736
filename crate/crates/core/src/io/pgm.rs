//! 16-bit binary PGM carpets.
//!
//! Layout: `P5`, a `# max <value>` comment, `<width> <height>`, `65535`, then
//! big-endian samples row by row with row 0 the earliest time. A sample is
//! `round(v / max * 65535)`.

use std::path::Path;

use super::csv::{fmt_value, write_file};
use crate::error::{Error, Result};
use crate::propagator::DensityField;

pub fn encode_pgm(field: &DensityField) -> Result<Vec<u8>> {
    let (w, h) = (field.cols(), field.rows());
    if w == 0 || h == 0 {
        return Err(Error::validation("field", "empty field"));
    }
    let max = field.max();
    if !(max > 0.0) {
        return Err(Error::validation("field", "field is identically zero; nothing to normalise"));
    }
    let header = format!("P5\n# max {}\n{w} {h}\n65535\n", fmt_value(max));
    let mut out = Vec::with_capacity(header.len() + 2 * w * h);
    out.extend_from_slice(header.as_bytes());
    for &v in field.values() {
        let s = (v / max * 65535.0).round().clamp(0.0, 65535.0) as u16;
        out.extend_from_slice(&s.to_be_bytes());
    }
    Ok(out)
}

pub fn write_pgm_carpet(path: &Path, field: &DensityField) -> Result<()> {
    write_file(path, &encode_pgm(field)?)
}

/// Decoded image: width, height, recorded maximum and samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub max: Option<f64>,
    pub samples: Vec<u16>,
}

impl Pgm {
    pub fn row(&self, r: usize) -> &[u16] {
        &self.samples[r * self.width..(r + 1) * self.width]
    }
}

/// Reads files produced by [`encode_pgm`].
pub fn decode_pgm(bytes: &[u8]) -> Result<Pgm> {
    let bad = |m: &str| Error::validation("pgm", m.to_string());
    let mut pos = 0;
    let mut next_line = || -> Result<&[u8]> {
        let rest = &bytes[pos.min(bytes.len())..];
        let end = rest.iter().position(|&b| b == b'\n').ok_or_else(|| bad("truncated header"))?;
        pos += end + 1;
        Ok(&rest[..end])
    };
    if next_line()? != b"P5" {
        return Err(bad("not a binary PGM"));
    }
    let mut max = None;
    let mut line = next_line()?;
    while line.starts_with(b"#") {
        let text = std::str::from_utf8(line).map_err(|_| bad("bad comment"))?;
        if let Some(v) = text.strip_prefix("# max ") {
            max = v.trim().parse().ok();
        }
        line = next_line()?;
    }
    let dims = std::str::from_utf8(line).map_err(|_| bad("bad size line"))?;
    let mut it = dims.split_whitespace().map(|s| s.parse::<usize>());
    let (width, height) = match (it.next(), it.next()) {
        (Some(Ok(w)), Some(Ok(h))) => (w, h),
        _ => return Err(bad("bad size line")),
    };
    if next_line()? != b"65535" {
        return Err(bad("expected 16-bit maxval"));
    }
    let body = &bytes[pos..];
    if body.len() != 2 * width * height {
        return Err(bad("payload length does not match the size"));
    }
    let samples = body.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
    Ok(Pgm {
        width,
        height,
        max,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::SpaceTimeGrid;
    use crate::spectral::WellConfig;

    fn field(values: Vec<f64>, w: usize, h: usize) -> DensityField {
        let well = WellConfig::natural(1.0).unwrap();
        let y = (0..w).map(|k| -0.5 + k as f64 / w as f64).collect();
        let t = (0..h).map(|k| k as f64).collect();
        DensityField::from_rows(SpaceTimeGrid::new(&well, y, t).unwrap(), values).unwrap()
    }

    #[test]
    fn two_by_two_payload() {
        let f = field(vec![0.0, 4.0, 2.0, 4.0], 2, 2);
        let bytes = encode_pgm(&f).unwrap();
        let header = b"P5\n# max 4.00000000000000e0\n2 2\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0x00, 0x00, 0xFF, 0xFF, 0x80, 0x00, 0xFF, 0xFF]);
        let back = decode_pgm(&bytes).unwrap();
        assert_eq!((back.width, back.height, back.max), (2, 2, Some(4.0)));
        assert_eq!(back.samples, vec![0, 65535, 32768, 65535]);
    }

    #[test]
    fn zero_field_is_rejected() {
        let f = field(vec![0.0; 6], 3, 2);
        assert!(encode_pgm(&f).is_err());
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(decode_pgm(b"P6\n1 1\n255\n\0").is_err());
        assert!(decode_pgm(b"P5\n2 2\n65535\n\0\0").is_err());
    }
}
