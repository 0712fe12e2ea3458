//! Portable bitmap (`P1` plain, `P4` packed) and 8-bit grayscale PNG.
//!
//! In bitmaps a `1` (black) pixel is foreground. In PNG, gray values of 128
//! and above are foreground and are written as 255.

use std::fs;
use std::io::{BufReader, Cursor};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbmVariant {
    Plain,
    Packed,
}

fn skip_ws_and_comments(data: &[u8], mut i: usize) -> usize {
    loop {
        while i < data.len() && data[i].is_ascii_whitespace() {
            i += 1;
        }
        if i < data.len() && data[i] == b'#' {
            while i < data.len() && data[i] != b'\n' {
                i += 1;
            }
        } else {
            return i;
        }
    }
}

fn read_uint(data: &[u8], i: usize) -> Option<(usize, usize)> {
    let i = skip_ws_and_comments(data, i);
    let end = data[i..]
        .iter()
        .position(|b| !b.is_ascii_digit())
        .map_or(data.len(), |n| i + n);
    if end == i {
        return None;
    }
    let value = std::str::from_utf8(&data[i..end]).ok()?.parse().ok()?;
    Some((value, end))
}

/// Decodes a `P1` or `P4` bitmap. Errors carry `path` for context.
pub fn decode_pbm(data: &[u8], path: &Path) -> Result<BinaryImage> {
    let bad = |msg: &str| Error::format(path, msg);
    let variant = match data.get(..2) {
        Some(b"P1") => PbmVariant::Plain,
        Some(b"P4") => PbmVariant::Packed,
        _ => return Err(bad("not a portable bitmap (expected P1 or P4)")),
    };
    let (width, i) = read_uint(data, 2).ok_or_else(|| bad("missing width"))?;
    let (height, i) = read_uint(data, i).ok_or_else(|| bad("missing height"))?;
    if width == 0 || height == 0 {
        return Err(bad("zero-sized bitmap"));
    }
    let mut bits = Vec::with_capacity(width * height);
    match variant {
        PbmVariant::Plain => {
            let mut i = i;
            while bits.len() < width * height {
                i = skip_ws_and_comments(data, i);
                match data.get(i) {
                    Some(b'0') => bits.push(false),
                    Some(b'1') => bits.push(true),
                    Some(_) => return Err(bad("unexpected character in pixel data")),
                    None => return Err(bad("truncated pixel data")),
                }
                i += 1;
            }
        }
        PbmVariant::Packed => {
            // exactly one whitespace byte separates the header from the raster
            let start = i + 1;
            let row_bytes = width.div_ceil(8);
            let raster = data
                .get(start..start + row_bytes * height)
                .ok_or_else(|| bad("truncated pixel data"))?;
            for row in raster.chunks(row_bytes) {
                for c in 0..width {
                    bits.push(row[c / 8] >> (7 - c % 8) & 1 == 1);
                }
            }
        }
    }
    BinaryImage::from_vec(height, width, bits).map_err(|e| bad(&e.to_string()))
}

pub fn encode_pbm(image: &BinaryImage, variant: PbmVariant) -> Vec<u8> {
    let (h, w) = image.dims();
    match variant {
        PbmVariant::Plain => {
            let mut out = format!("P1\n{w} {h}\n");
            for row in image.to_rows() {
                let line: Vec<String> = row.chars().map(String::from).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
        PbmVariant::Packed => {
            let mut out = format!("P4\n{w} {h}\n").into_bytes();
            let row_bytes = w.div_ceil(8);
            for r in 0..h {
                let mut row = vec![0u8; row_bytes];
                for c in 0..w {
                    if image.get(r, c) {
                        row[c / 8] |= 0x80 >> (c % 8);
                    }
                }
                out.extend_from_slice(&row);
            }
            out
        }
    }
}

pub fn decode_png(data: &[u8], path: &Path) -> Result<BinaryImage> {
    let bad = |msg: String| Error::format(path, msg);
    let mut decoder = png::Decoder::new(BufReader::new(Cursor::new(data)));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| bad(e.to_string()))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(bad(format!(
            "unsupported PNG layout {:?}/{:?}; expected 8-bit grayscale",
            info.color_type, info.bit_depth
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| bad("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| bad(e.to_string()))?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let bits = (0..h)
        .flat_map(|r| {
            let line = &buf[r * frame.line_size..r * frame.line_size + w];
            line.iter().map(|&v| v >= 128)
        })
        .collect();
    BinaryImage::from_vec(h, w, bits).map_err(|e| bad(e.to_string()))
}

pub fn encode_png(image: &BinaryImage, path: &Path) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width() as u32, image.height() as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::format(path, e.to_string()))?;
        let data: Vec<u8> = image
            .bits()
            .iter()
            .map(|&b| if b { 255 } else { 0 })
            .collect();
        writer
            .write_image_data(&data)
            .map_err(|e| Error::format(path, e.to_string()))?;
    }
    Ok(out)
}

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Loads a bitmap or PNG, detected from the file contents.
pub fn load_image(path: impl AsRef<Path>) -> Result<BinaryImage> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    if data.starts_with(PNG_SIGNATURE) {
        decode_png(&data, path)
    } else {
        decode_pbm(&data, path)
    }
}

/// Saves by extension: `.png` as PNG, anything else as a packed bitmap.
pub fn save_image(image: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_png = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let bytes = if is_png {
        encode_png(image, path)?
    } else {
        encode_pbm(image, PbmVariant::Packed)
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
