//! Netpbm graymap I/O: reads P5 (binary) and P2 (ASCII), writes P5.
//!
//! Samples are kept as read; a maxval below 255 is accepted but not rescaled.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::image_pipeline::GrayImage;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed PGM header: {0}")]
    Header(String),

    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("unsupported maxval {0} (only 1..=255)")]
    Maxval(u32),

    #[error("sample {value} exceeds maxval {maxval}")]
    SampleRange { value: u32, maxval: u32 },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Binary,
    Ascii,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::Header(format!("expected {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PgmError::Header(format!("{what} out of range")))
    }
}

/// Decodes a P5 or P2 graymap from memory.
pub fn decode_pgm(data: &[u8]) -> Result<GrayImage, PgmError> {
    let format = match data.get(..2) {
        Some(b"P5") => Format::Binary,
        Some(b"P2") => Format::Ascii,
        _ => return Err(PgmError::Header("missing P5/P2 magic".into())),
    };
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::Maxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(PgmError::Header("zero image dimension".into()));
    }
    let expected = width * height;

    let samples: Vec<u32> = match format {
        Format::Binary => {
            // exactly one whitespace byte separates maxval from the raster
            if !data.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
                return Err(PgmError::Header("missing whitespace after maxval".into()));
            }
            let raster = &data[cur.pos + 1..];
            if raster.len() < expected {
                return Err(PgmError::Truncated {
                    expected,
                    found: raster.len(),
                });
            }
            raster[..expected].iter().map(|&b| u32::from(b)).collect()
        }
        Format::Ascii => {
            let mut out = Vec::with_capacity(expected);
            for _ in 0..expected {
                cur.skip_space_and_comments();
                if cur.pos >= data.len() {
                    return Err(PgmError::Truncated {
                        expected,
                        found: out.len(),
                    });
                }
                out.push(cur.number("sample")?);
            }
            out
        }
    };
    if let Some(&value) = samples.iter().find(|&&v| v > maxval) {
        return Err(PgmError::SampleRange { value, maxval });
    }
    let pixels = samples.into_iter().map(f64::from).collect();
    Ok(GrayImage::from_pixels(width, height, pixels).expect("sample count checked above"))
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, PgmError> {
    decode_pgm(&fs::read(path)?)
}

/// Encodes as binary P5 with maxval 255. Pixels are rounded and clamped
/// to `0..=255`.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.pixels().len());
    out.extend_from_slice(header.as_bytes());
    out.extend(
        img.pixels()
            .iter()
            .map(|&v| v.round().clamp(0.0, 255.0) as u8),
    );
    out
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<(), PgmError> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_basic() {
        let mut data = b"P5\n4 2\n255\n".to_vec();
        data.extend(0u8..8);
        let img = decode_pgm(&data).unwrap();
        assert_eq!((img.width(), img.height()), (4, 2));
        assert_eq!(img.get(3, 1), 7.0);
        assert_eq!(encode_pgm(&img), data);
    }

    #[test]
    fn p2_matches_p5() {
        let ascii = b"P2\n# a comment\n3 2\n255\n0 128 255\n 17 4\n200\n";
        let mut binary = b"P5 3 2 255\n".to_vec();
        binary.extend([0u8, 128, 255, 17, 4, 200]);
        assert_eq!(decode_pgm(ascii).unwrap(), decode_pgm(&binary).unwrap());
    }

    #[test]
    fn truncated_payload() {
        let mut data = b"P5\n4 2\n255\n".to_vec();
        data.extend([1u8, 2, 3]);
        assert!(matches!(
            decode_pgm(&data),
            Err(PgmError::Truncated {
                expected: 8,
                found: 3
            })
        ));
        assert!(matches!(
            decode_pgm(b"P2 2 2 255 1 2 3"),
            Err(PgmError::Truncated {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            decode_pgm(b"P6\n1 1\n255\n\0"),
            Err(PgmError::Header(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\nx 1\n255\n\0"),
            Err(PgmError::Header(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n1 1\n65535\n\0\0"),
            Err(PgmError::Maxval(65535))
        ));
        assert!(matches!(
            decode_pgm(b"P2 1 1 15 16"),
            Err(PgmError::SampleRange {
                value: 16,
                maxval: 15
            })
        ));
    }

    #[test]
    fn comments_inside_header() {
        let mut data = b"P5\n# made by hand\n2 # width\n1\n255\n".to_vec();
        data.extend([9u8, 10]);
        let img = decode_pgm(&data).unwrap();
        assert_eq!(img.pixels(), &[9.0, 10.0]);
    }
}
