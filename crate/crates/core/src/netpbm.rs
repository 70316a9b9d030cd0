//! Binary netpbm (P5 grayscale, P6 RGB) with maxval 255.
//!
//! Writers emit `<magic>\n<width> <height>\n255\n` followed by raw samples.
//! Readers accept any whitespace run and `#` comments between header tokens,
//! and exactly one whitespace byte between the maxval and the raster.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Gray,
    Rgb,
}

impl Kind {
    fn magic(self) -> &'static str {
        match self {
            Kind::Gray => "P5",
            Kind::Rgb => "P6",
        }
    }

    fn channels(self) -> usize {
        match self {
            Kind::Gray => 1,
            Kind::Rgb => 3,
        }
    }
}

/// A decoded raster: `data.len() == width * height * channels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: &'static str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::format(field, "expected an unsigned decimal integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(field, "value out of range"))
    }
}

/// Decodes a binary netpbm image of the requested kind.
pub fn decode(bytes: &[u8], kind: Kind) -> Result<Raster> {
    let magic = bytes.get(..2).ok_or_else(|| Error::format("magic", "input too short"))?;
    if magic != kind.magic().as_bytes() {
        let found = String::from_utf8_lossy(magic);
        return Err(Error::format(
            "magic",
            format!("expected {}, found {:?}", kind.magic(), found),
        ));
    }
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(Error::format("magic", "missing whitespace after magic number"));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 {
        return Err(Error::format("width", "must be positive"));
    }
    if height == 0 {
        return Err(Error::format("height", "must be positive"));
    }
    if maxval != 255 {
        return Err(Error::format("maxval", format!("expected 255, found {maxval}")));
    }
    match cur.bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::format("maxval", "missing whitespace after maxval")),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(kind.channels()))
        .ok_or_else(|| Error::format("width", "image too large"))?;
    let data = &bytes[cur.pos..];
    if data.len() < expected {
        return Err(Error::format(
            "pixel data",
            format!("truncated: expected {expected} bytes, found {}", data.len()),
        ));
    }
    Ok(Raster {
        width,
        height,
        data: data[..expected].to_vec(),
    })
}

/// Encodes a raster. Panics if `data` does not match the dimensions.
pub fn encode(width: usize, height: usize, data: &[u8], kind: Kind) -> Vec<u8> {
    assert_eq!(data.len(), width * height * kind.channels(), "raster size mismatch");
    let header = format!("{}\n{} {}\n255\n", kind.magic(), width, height);
    let mut out = Vec::with_capacity(header.len() + data.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(data);
    out
}
