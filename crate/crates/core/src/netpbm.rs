//! Netpbm image files: PGM and PPM, ASCII or binary in, binary out.

use std::fs;
use std::path::Path;

use crate::image::RgbImage;
use crate::localizer::GrayMap;
use crate::{Error, Result};

struct Header {
    magic: u8,
    width: usize,
    height: usize,
    maxval: u32,
    /// Offset of the first raster byte.
    data_start: usize,
}

fn parse_header(bytes: &[u8]) -> std::result::Result<Header, String> {
    if bytes.len() < 2 || bytes[0] != b'P' || !matches!(bytes[1], b'2' | b'3' | b'5' | b'6') {
        return Err("not a P2, P3, P5 or P6 file".into());
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or("header value out of range")?;
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err("missing whitespace after header".into());
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err("zero-sized image".into());
    }
    if !(1..=65535).contains(&maxval) {
        return Err(format!("maxval {maxval} outside 1..=65535"));
    }
    Ok(Header {
        magic: bytes[1],
        width,
        height,
        maxval: maxval as u32,
        data_start: pos + 1,
    })
}

fn decode(bytes: &[u8]) -> std::result::Result<RgbImage, String> {
    let h = parse_header(bytes)?;
    let channels = if matches!(h.magic, b'3' | b'6') { 3 } else { 1 };
    let n = h
        .width
        .checked_mul(h.height)
        .and_then(|v| v.checked_mul(channels))
        .ok_or("image too large")?;
    let raw = &bytes[h.data_start..];
    let samples: Vec<u32> = match h.magic {
        b'2' | b'3' => {
            let text = std::str::from_utf8(raw).map_err(|_| "non-ASCII raster")?;
            let mut out = Vec::with_capacity(n);
            for tok in text.split_ascii_whitespace().take(n) {
                out.push(tok.parse().map_err(|_| format!("bad sample {tok:?}"))?);
            }
            out
        }
        _ if h.maxval < 256 => raw.iter().take(n).map(|&b| u32::from(b)).collect(),
        _ => raw
            .chunks_exact(2)
            .take(n)
            .map(|c| u32::from(u16::from_be_bytes([c[0], c[1]])))
            .collect(),
    };
    if samples.len() < n {
        return Err(format!("expected {n} samples, found {}", samples.len()));
    }
    if let Some(v) = samples.iter().find(|&&v| v > h.maxval) {
        return Err(format!("sample {v} exceeds maxval {}", h.maxval));
    }
    let scale = f64::from(h.maxval);
    RgbImage::from_fn(h.width, h.height, |x, y| {
        let i = (y * h.width + x) * channels;
        if channels == 3 {
            [samples[i], samples[i + 1], samples[i + 2]].map(|v| f64::from(v) / scale)
        } else {
            [f64::from(samples[i]) / scale; 3]
        }
    })
    .map_err(|e| e.to_string())
}

/// Decodes an in-memory PGM or PPM. Gray images come back with three equal
/// planes.
pub fn decode_image(bytes: &[u8]) -> Result<RgbImage> {
    decode(bytes).map_err(|reason| Error::Format {
        path: "<memory>".into(),
        reason,
    })
}

pub fn read_image(path: &Path) -> Result<RgbImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|reason| Error::Format {
        path: path.to_path_buf(),
        reason,
    })
}

pub fn encode_pgm(gray: &GrayMap) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", gray.width(), gray.height()).into_bytes();
    out.extend_from_slice(gray.data());
    out
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_rgb8());
    out
}

pub fn write_pgm(path: &Path, gray: &GrayMap) -> Result<()> {
    fs::write(path, encode_pgm(gray)).map_err(|e| Error::io(path, e))
}

pub fn write_ppm(path: &Path, img: &RgbImage) -> Result<()> {
    fs::write(path, encode_ppm(img)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let img = RgbImage::from_fn(7, 3, |x, y| {
            [x as f64 / 6.0, y as f64 / 2.0, ((x + y) % 2) as f64]
        })
        .unwrap();
        let back = decode_image(&encode_ppm(&img)).unwrap();
        assert_eq!(back.to_rgb8(), img.to_rgb8());
    }

    #[test]
    fn pgm_round_trip() {
        let g = GrayMap::from_vec(3, 2, vec![0, 10, 20, 30, 40, 255]).unwrap();
        let img = decode_image(&encode_pgm(&g)).unwrap();
        assert_eq!(img.pixel(2, 1), [1.0; 3]);
        assert_eq!(img.pixel(1, 0), [10.0 / 255.0; 3]);
    }

    #[test]
    fn ascii_with_comments() {
        let text = b"P2\n# a comment\n3 1\n# another\n4\n0 2 4\n";
        let img = decode_image(text).unwrap();
        assert_eq!(img.pixel(1, 0), [0.5; 3]);
        let ppm = b"P3 1 1 255 255 0 128\n";
        assert_eq!(
            decode_image(ppm).unwrap().pixel(0, 0),
            [1.0, 0.0, 128.0 / 255.0]
        );
    }

    #[test]
    fn sixteen_bit_binary() {
        let mut bytes = b"P5 2 1 65535\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xff, 0x00, 0x00]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.pixel(0, 0), [1.0; 3]);
        assert_eq!(img.pixel(1, 0), [0.0; 3]);
    }

    #[test]
    fn malformed_inputs_rejected() {
        for bad in [
            &b"P7 1 1 255\n\0"[..],
            b"P5 2 2 255\n\0\0",
            b"P5 0 2 255\n",
            b"P2 1 1 4\n9\n",
            b"P5 1 1",
            b"",
        ] {
            assert!(
                matches!(decode_image(bad), Err(Error::Format { .. })),
                "{bad:?}"
            );
        }
    }
}
