//! FF1 feature stacks, binary PGM images and PPM overlays.
//!
//! FF1 layout: an ASCII header line `FF1 <width> <height> <channels>\n`
//! followed by `channels * height * width` little-endian `f32`, row-major
//! within each channel.

use std::fs;
use std::path::Path;

use crate::error::{check_dims, Error, Result};
use crate::field::Field;
use crate::sublevel::{LabelMap, SublevelStack};

const FF1_MAGIC: &str = "FF1";
const MAX_HEADER_LEN: usize = 128;

pub fn encode_feature_file(fields: &[Field]) -> Result<Vec<u8>> {
    let first = fields
        .first()
        .ok_or_else(|| Error::InvalidParameter("cannot write an empty feature stack".into()))?;
    for f in fields {
        check_dims(first.dims(), f.dims())?;
    }
    let header = format!(
        "{FF1_MAGIC} {} {} {}\n",
        first.width(),
        first.height(),
        fields.len()
    );
    let mut out = Vec::with_capacity(header.len() + 4 * first.len() * fields.len());
    out.extend_from_slice(header.as_bytes());
    for f in fields {
        for (i, &v) in f.values().iter().enumerate() {
            let single = v as f32;
            if !single.is_finite() {
                return Err(Error::NonFinite(format!(
                    "value {v} at index {i} overflows f32"
                )));
            }
            out.extend_from_slice(&single.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_feature_file(bytes: &[u8]) -> Result<Vec<Field>> {
    let newline = bytes
        .iter()
        .take(MAX_HEADER_LEN)
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::MalformedHeader("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..newline])
        .map_err(|_| Error::MalformedHeader("header is not ASCII".into()))?;
    let tokens: Vec<&str> = header.split_ascii_whitespace().collect();
    if tokens.len() != 4 || tokens[0] != FF1_MAGIC {
        return Err(Error::MalformedHeader(format!(
            "expected \"FF1 W H C\", got {header:?}"
        )));
    }
    let dim = |t: &str| -> Result<usize> {
        match t.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::MalformedHeader(format!("bad dimension {t:?}"))),
        }
    };
    let (w, h, c) = (dim(tokens[1])?, dim(tokens[2])?, dim(tokens[3])?);
    let expected = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(c))
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;
    let payload = &bytes[newline + 1..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::TrailingData(payload.len() - expected));
    }
    let mut fields = Vec::with_capacity(c);
    for (ch, chunk) in payload.chunks_exact(4 * w * h).enumerate() {
        let mut values = Vec::with_capacity(w * h);
        for (i, b) in chunk.chunks_exact(4).enumerate() {
            let v = f32::from_le_bytes([b[0], b[1], b[2], b[3]]);
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(ch * w * h + i));
            }
            values.push(v as f64);
        }
        fields.push(Field::new(w, h, values)?);
    }
    Ok(fields)
}

pub fn read_feature_file(path: impl AsRef<Path>) -> Result<Vec<Field>> {
    decode_feature_file(&fs::read(path)?)
}

pub fn write_feature_file(path: impl AsRef<Path>, fields: &[Field]) -> Result<()> {
    fs::write(path, encode_feature_file(fields)?)?;
    Ok(())
}

/// A decoded 8-bit greyscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Pgm {
    /// Pixels scaled to `[0, 1]`.
    pub fn to_field(&self) -> Field {
        Field::from_raw(
            self.width,
            self.height,
            self.pixels.iter().map(|&p| p as f64 / 255.0).collect(),
        )
    }
}

/// Parses an 8-bit binary (`P5`, maxval 255) PGM.
pub fn decode_pgm(bytes: &[u8]) -> Result<Pgm> {
    let mut pos = 0usize;
    let next_token = |pos: &mut usize| -> Result<String> {
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
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::MalformedHeader(
                "unexpected end of PGM header".into(),
            ));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };

    let magic = next_token(&mut pos)?;
    if magic != "P5" {
        return Err(Error::UnsupportedMagic(magic));
    }
    let number = |pos: &mut usize, what: &str| -> Result<u32> {
        let t = next_token(pos)?;
        t.parse::<u32>()
            .map_err(|_| Error::MalformedHeader(format!("bad {what} {t:?}")))
    };
    let width = number(&mut pos, "width")? as usize;
    let height = number(&mut pos, "height")? as usize;
    let maxval = number(&mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader("zero image dimension".into()));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::MalformedHeader("missing raster separator".into()));
    }
    pos += 1;
    let raster = &bytes[pos..];
    let expected = width * height;
    if raster.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: raster.len(),
        });
    }
    if raster.len() > expected {
        return Err(Error::TrailingData(raster.len() - expected));
    }
    Ok(Pgm {
        width,
        height,
        pixels: raster.to_vec(),
    })
}

pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    debug_assert_eq!(pixels.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Pgm> {
    decode_pgm(&fs::read(path)?)
}

/// Image intensities scaled to `[0, 1]`.
pub fn read_image_pgm(path: impl AsRef<Path>) -> Result<Field> {
    Ok(read_pgm(path)?.to_field())
}

/// Raw label values; the class count is the largest label (at least 2).
pub fn read_label_pgm(path: impl AsRef<Path>) -> Result<LabelMap> {
    let pgm = read_pgm(path)?;
    let classes = pgm.pixels.iter().copied().max().unwrap_or(0).max(2);
    LabelMap::new(pgm.width, pgm.height, classes, pgm.pixels)
}

pub fn write_label_pgm(path: impl AsRef<Path>, labels: &LabelMap) -> Result<()> {
    fs::write(
        path,
        encode_pgm(labels.width(), labels.height(), labels.labels()),
    )?;
    Ok(())
}

/// Writes a binary mask as raw bytes `0` / `foreground`.
pub fn write_mask_pgm(path: impl AsRef<Path>, mask: &Field, foreground: u8) -> Result<()> {
    let pixels: Vec<u8> = mask
        .values()
        .iter()
        .map(|&v| if v >= 0.5 { foreground } else { 0 })
        .collect();
    fs::write(path, encode_pgm(mask.width(), mask.height(), &pixels))?;
    Ok(())
}

/// Boundary colours, one per channel (cycled).
const OVERLAY_COLOURS: [[u8; 3]; 3] = [[0, 200, 0], [0, 80, 255], [255, 60, 0]];

/// `P6` image: the greyscale input with the boundary pixels of each
/// thresholded channel painted in its own colour.
pub fn encode_overlay(image: &Field, stack: &SublevelStack) -> Result<Vec<u8>> {
    check_dims(image.dims(), stack.dims())?;
    let (w, h) = image.dims();
    let mut rgb: Vec<[u8; 3]> = image
        .values()
        .iter()
        .map(|&v| {
            let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            [g, g, g]
        })
        .collect();
    for (c, channel) in stack.channels().iter().enumerate() {
        let on = |x: usize, y: usize| channel.get(x, y) >= 0.5;
        for y in 0..h {
            for x in 0..w {
                if !on(x, y) {
                    continue;
                }
                let edge = (x > 0 && !on(x - 1, y))
                    || (x + 1 < w && !on(x + 1, y))
                    || (y > 0 && !on(x, y - 1))
                    || (y + 1 < h && !on(x, y + 1));
                if edge {
                    rgb[y * w + x] = OVERLAY_COLOURS[c % OVERLAY_COLOURS.len()];
                }
            }
        }
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    for px in rgb {
        out.extend_from_slice(&px);
    }
    Ok(out)
}

pub fn write_overlay(path: impl AsRef<Path>, image: &Field, stack: &SublevelStack) -> Result<()> {
    fs::write(path, encode_overlay(image, stack)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SoftMask;

    #[test]
    fn ff1_size_arithmetic() {
        let mut ok = b"FF1 2 2 1\n".to_vec();
        ok.extend_from_slice(&[0u8; 16]);
        let fields = decode_feature_file(&ok).unwrap();
        assert_eq!(fields.len(), 1);
        assert_eq!(fields[0].dims(), (2, 2));

        let mut short = b"FF1 2 2 1\n".to_vec();
        short.extend_from_slice(&[0u8; 12]);
        assert!(matches!(
            decode_feature_file(&short),
            Err(Error::TruncatedPayload {
                expected: 16,
                found: 12
            })
        ));

        let mut long = ok.clone();
        long.push(0);
        assert!(matches!(
            decode_feature_file(&long),
            Err(Error::TrailingData(1))
        ));
    }

    #[test]
    fn ff1_header_errors() {
        for bad in [
            &b"FF2 2 2 1\n"[..],
            b"FF1 2 2\n",
            b"FF1 0 2 1\n",
            b"FF1 a 2 1\n",
            b"FF1 2 2 1",
        ] {
            assert!(
                matches!(decode_feature_file(bad), Err(Error::MalformedHeader(_))),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn ff1_rejects_non_finite() {
        let mut bytes = b"FF1 1 1 1\n".to_vec();
        bytes.extend_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(
            decode_feature_file(&bytes),
            Err(Error::NonFiniteValue(0))
        ));
        assert!(encode_feature_file(&[Field::filled(1, 1, 1e300)]).is_err());
    }

    #[test]
    fn ff1_layout_is_little_endian_row_major() {
        let f = Field::new(2, 1, vec![1.0, -2.5]).unwrap();
        let g = Field::new(2, 1, vec![0.25, 3.0]).unwrap();
        let bytes = encode_feature_file(&[f, g]).unwrap();
        let mut expected = b"FF1 2 1 2\n".to_vec();
        for v in [1.0f32, -2.5, 0.25, 3.0] {
            expected.extend_from_slice(&v.to_le_bytes());
        }
        assert_eq!(bytes, expected);
    }

    #[test]
    fn pgm_parse() {
        let bytes = b"P5\n# comment\n3 2\n255\n\x00\x01\x02\x03\x04\xff".to_vec();
        let p = decode_pgm(&bytes).unwrap();
        assert_eq!((p.width, p.height), (3, 2));
        assert_eq!(p.pixels, vec![0, 1, 2, 3, 4, 255]);
        assert_eq!(p.to_field().get(2, 1), 1.0);
        assert_eq!(decode_pgm(&encode_pgm(3, 2, &p.pixels)).unwrap(), p);

        assert!(matches!(
            decode_pgm(b"P2\n1 1\n255\n0"),
            Err(Error::UnsupportedMagic(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n1 1\n65535\n00"),
            Err(Error::UnsupportedMaxval(65535))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n2 2\n255\n\x00"),
            Err(Error::TruncatedPayload { .. })
        ));
    }

    #[test]
    fn overlay_without_objects_is_plain_grey() {
        let img = Field::filled(4, 3, 0.5);
        let stack = SublevelStack::new(vec![SoftMask::zeros(4, 3), SoftMask::zeros(4, 3)]).unwrap();
        let bytes = encode_overlay(&img, &stack).unwrap();
        let header = b"P6\n4 3\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert!(bytes[header.len()..].iter().all(|&b| b == 128));
    }

    #[test]
    fn overlay_marks_boundaries() {
        let img = Field::zeros(5, 5);
        let inner = SoftMask::new(Field::from_fn(5, 5, |x, y| {
            if x == 2 && y == 2 {
                1.0
            } else {
                0.0
            }
        }))
        .unwrap();
        let outer = SoftMask::new(Field::from_fn(5, 5, |x, y| {
            if (1..4).contains(&x) && (1..4).contains(&y) {
                1.0
            } else {
                0.0
            }
        }))
        .unwrap();
        let bytes = encode_overlay(&img, &SublevelStack::new(vec![inner, outer]).unwrap()).unwrap();
        let px = |x: usize, y: usize| {
            let off = b"P6\n5 5\n255\n".len() + 3 * (y * 5 + x);
            [bytes[off], bytes[off + 1], bytes[off + 2]]
        };
        assert_eq!(px(1, 1), OVERLAY_COLOURS[1]);
        assert_eq!(px(0, 0), [0, 0, 0]);
        // the single cup pixel borders disc pixels that are off in channel 1
        assert_eq!(px(2, 2), OVERLAY_COLOURS[0]);
    }
}
