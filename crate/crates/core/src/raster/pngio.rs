//! PNG input and output.
//!
//! Decoding goes through the `image` crate and accepts any PNG it can
//! read: alpha is dropped, grayscale is replicated across channels.
//! Encoding is done here directly — 8-bit RGB, unfiltered scanlines,
//! stored (uncompressed) deflate blocks — so written files are
//! byte-deterministic and round-trips cross two unrelated codecs.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{ImageRgb, MIN_SIDE};
use crate::error::{Error, Result};

/// Reads an 8-bit RGB raster from a PNG file.
pub fn load_png(path: impl AsRef<Path>) -> Result<ImageRgb> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let decoded = image::load_from_memory_with_format(&bytes, image::ImageFormat::Png)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    let rgb = decoded.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(Error::dimensions(format!(
            "{}: image is {w}x{h}, need at least {MIN_SIDE}x{MIN_SIDE}",
            path.display()
        )));
    }
    let pixels = rgb.pixels().map(|p| [p[0], p[1], p[2]]).collect();
    ImageRgb::new(w, h, pixels)
}

/// Writes a lossless 8-bit RGB PNG.
pub fn save_png(image: &ImageRgb, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_png(image);
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Serializes the image to PNG bytes.
pub(crate) fn encode_png(image: &ImageRgb) -> Vec<u8> {
    let (w, h) = (image.width() as u32, image.height() as u32);

    // Raw scanlines: filter byte 0 (None) followed by RGB triples.
    let mut raw = Vec::with_capacity(image.height() * (1 + 3 * image.width()));
    for y in 0..image.height() {
        raw.push(0u8);
        for x in 0..image.width() {
            raw.extend_from_slice(&image.pixel(x, y));
        }
    }

    let mut out = Vec::new();
    out.extend_from_slice(b"\x89PNG\r\n\x1a\n");

    let mut ihdr = Vec::with_capacity(13);
    ihdr.extend_from_slice(&w.to_be_bytes());
    ihdr.extend_from_slice(&h.to_be_bytes());
    // bit depth 8, color type 2 (truecolor), deflate, no filter, no interlace
    ihdr.extend_from_slice(&[8, 2, 0, 0, 0]);
    write_chunk(&mut out, b"IHDR", &ihdr);
    write_chunk(&mut out, b"IDAT", &zlib_stored(&raw));
    write_chunk(&mut out, b"IEND", &[]);
    out
}

fn write_chunk(out: &mut Vec<u8>, kind: &[u8; 4], data: &[u8]) {
    out.extend_from_slice(&(data.len() as u32).to_be_bytes());
    out.extend_from_slice(kind);
    out.extend_from_slice(data);
    let mut hasher = crc32fast::Hasher::new();
    hasher.update(kind);
    hasher.update(data);
    out.extend_from_slice(&hasher.finalize().to_be_bytes());
}

/// Zlib stream holding `data` in stored (BTYPE=00) deflate blocks.
fn zlib_stored(data: &[u8]) -> Vec<u8> {
    const MAX_BLOCK: usize = 65_535;
    let mut out = Vec::with_capacity(data.len() + data.len() / MAX_BLOCK * 5 + 16);
    // CMF/FLG: 32K window deflate, check bits, no preset dictionary.
    out.extend_from_slice(&[0x78, 0x01]);
    let mut chunks = data.chunks(MAX_BLOCK).peekable();
    loop {
        match chunks.next() {
            Some(chunk) => {
                let last = chunks.peek().is_none();
                out.push(u8::from(last));
                let len = chunk.len() as u16;
                out.extend_from_slice(&len.to_le_bytes());
                out.extend_from_slice(&(!len).to_le_bytes());
                out.extend_from_slice(chunk);
                if last {
                    break;
                }
            }
            None => {
                // Empty input still needs one final empty block.
                out.extend_from_slice(&[1, 0, 0, 0xff, 0xff]);
                break;
            }
        }
    }
    out.extend_from_slice(&adler32(data).to_be_bytes());
    out
}

fn adler32(data: &[u8]) -> u32 {
    const MOD: u32 = 65_521;
    let (mut a, mut b) = (1u32, 0u32);
    for chunk in data.chunks(5552) {
        for &byte in chunk {
            a += byte as u32;
            b += a;
        }
        a %= MOD;
        b %= MOD;
    }
    (b << 16) | a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::split_channels;
    use proptest::prelude::*;
    use tempfile::tempdir;

    #[test]
    fn black_3x3_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("black.png");
        let img = ImageRgb::filled(3, 3, [0, 0, 0]).unwrap();
        save_png(&img, &path).unwrap();
        let back = load_png(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn white_10x10_decodes_to_255s() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("white.png");
        save_png(&ImageRgb::filled(10, 10, [255, 255, 255]).unwrap(), &path).unwrap();
        let back = load_png(&path).unwrap();
        assert_eq!(back.pixels().len(), 100);
        assert!(back.pixels().iter().all(|p| *p == [255, 255, 255]));
    }

    // Write-then-read oracle at the cell-crop size the pipeline sees in
    // practice; the decoder is an unrelated implementation.
    #[test]
    fn cell_sized_image_roundtrips_bit_identically() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("cell.png");
        let (w, h) = (142usize, 148usize);
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                pixels.push([
                    ((x * 7 + y * 13) % 256) as u8,
                    ((x * 3 + y * 31) % 256) as u8,
                    ((x * 11 + y * 5) % 256) as u8,
                ]);
            }
        }
        let img = ImageRgb::new(w, h, pixels).unwrap();
        save_png(&img, &path).unwrap();
        assert_eq!(load_png(&path).unwrap(), img);
    }

    #[test]
    fn undersized_png_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("tiny.png");
        // Encode a 1x1 PNG through the third-party encoder.
        let buf = image::RgbImage::from_pixel(1, 1, image::Rgb([7, 8, 9]));
        buf.save(&path).unwrap();
        let err = load_png(&path).unwrap_err();
        assert!(matches!(err, Error::Dimensions(_)), "got {err:?}");
    }

    #[test]
    fn missing_file_is_io_error_with_path() {
        let err = load_png("/no/such/file.png").unwrap_err();
        match err {
            Error::Io { path, .. } => assert_eq!(path, std::path::Path::new("/no/such/file.png")),
            other => panic!("expected io error, got {other:?}"),
        }
    }

    #[test]
    fn non_png_payload_is_format_error() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("not.png");
        std::fs::write(&path, b"definitely not a png").unwrap();
        assert!(matches!(load_png(&path).unwrap_err(), Error::Format(_)));
    }

    #[test]
    fn grayscale_png_replicates_channels() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("gray.png");
        let buf = image::GrayImage::from_fn(5, 4, |x, y| image::Luma([(x * 40 + y) as u8]));
        buf.save(&path).unwrap();
        let img = load_png(&path).unwrap();
        let (r, g, b) = split_channels(&img);
        assert_eq!(r, g);
        assert_eq!(g, b);
        assert_eq!(r.get(2, 1), 81.0);
    }

    #[test]
    fn encoder_output_is_deterministic() {
        let img = ImageRgb::filled(16, 16, [1, 2, 3]).unwrap();
        assert_eq!(encode_png(&img), encode_png(&img));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        // save . load is the identity on pixel data.
        #[test]
        fn save_load_roundtrip(
            w in 3usize..24,
            h in 3usize..24,
            seed in any::<u64>(),
        ) {
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 32) as u8
            };
            let pixels = (0..w * h).map(|_| [next(), next(), next()]).collect();
            let img = ImageRgb::new(w, h, pixels).unwrap();
            let dir = tempdir().unwrap();
            let path = dir.path().join("rt.png");
            save_png(&img, &path).unwrap();
            prop_assert_eq!(load_png(&path).unwrap(), img);
        }
    }
}
