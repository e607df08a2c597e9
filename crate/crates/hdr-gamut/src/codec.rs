//! Image file codecs: Radiance RGBE (.hdr) and PFM in, 8-bit PNG out, plus
//! PNG/text diagnostics writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::colorspace::{
    mat3_invert, mat3_mul_vec, rgb_to_xyz_matrix, srgb_decode, srgb_encode, Chromaticities,
};
use crate::error::{Error, Result};
use crate::imaging::{ImagePlanar, Mask, Plane};

// ---------------------------------------------------------------------------
// Radiance RGBE
// ---------------------------------------------------------------------------

/// Decode one RGBE quad into linear RGB: `mantissa/256 * 2^(exponent-128)`,
/// with exponent 0 meaning black.
#[inline]
pub fn rgbe_to_rgb(q: [u8; 4]) -> [f64; 3] {
    let e = q[3];
    if e == 0 {
        return [0.0, 0.0, 0.0];
    }
    let scale = (2.0f64).powi(e as i32 - 136);
    [q[0] as f64 * scale, q[1] as f64 * scale, q[2] as f64 * scale]
}

/// Encode linear RGB into an RGBE quad (shared exponent from the largest
/// component).
#[inline]
pub fn rgb_to_rgbe(rgb: [f64; 3]) -> [u8; 4] {
    let max = rgb[0].max(rgb[1]).max(rgb[2]);
    if max < 1e-38 {
        return [0, 0, 0, 0];
    }
    let e = max.log2().floor() as i32 + 1;
    if e + 128 < 1 {
        return [0, 0, 0, 0];
    }
    let e = e.min(127);
    let scale = (2.0f64).powi(8 - e);
    let quant = |v: f64| ((v * scale).round() as i64).clamp(0, 255) as u8;
    [quant(rgb[0]), quant(rgb[1]), quant(rgb[2]), (e + 128) as u8]
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        ByteReader { bytes, pos: 0 }
    }

    fn byte(&mut self) -> Result<u8> {
        let b = self
            .bytes
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::CorruptImage("unexpected end of file".into()))?;
        self.pos += 1;
        Ok(b)
    }

    fn quad(&mut self) -> Result<[u8; 4]> {
        Ok([self.byte()?, self.byte()?, self.byte()?, self.byte()?])
    }

    fn line(&mut self) -> Result<String> {
        let start = self.pos;
        while self.byte()? != b'\n' {}
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos - 1]).into_owned())
    }
}

fn decode_rgbe_file(bytes: &[u8]) -> Result<(usize, usize, Vec<[f64; 3]>)> {
    let mut r = ByteReader::new(bytes);
    let magic = r.line()?;
    if !magic.starts_with("#?") {
        return Err(Error::UnsupportedFormat);
    }
    // header lines until the blank separator
    loop {
        let line = r.line()?;
        if line.is_empty() {
            break;
        }
        if let Some(fmt) = line.strip_prefix("FORMAT=") {
            if fmt.trim() != "32-bit_rle_rgbe" {
                return Err(Error::UnsupportedFormat);
            }
        }
    }
    let res = r.line()?;
    let parts: Vec<&str> = res.split_whitespace().collect();
    let (w, h) = match parts.as_slice() {
        ["-Y", h, "+X", w] => (
            w.parse::<usize>().map_err(|_| Error::CorruptImage("bad resolution".into()))?,
            h.parse::<usize>().map_err(|_| Error::CorruptImage("bad resolution".into()))?,
        ),
        _ => return Err(Error::CorruptImage(format!("unsupported resolution line: {res}"))),
    };
    if w == 0 || h == 0 {
        return Err(Error::CorruptImage("zero-sized image".into()));
    }

    let mut pixels = Vec::with_capacity(w * h);
    let mut row = vec![[0u8; 4]; w];
    for _ in 0..h {
        let first = r.quad()?;
        let is_new_rle = first[0] == 2
            && first[1] == 2
            && ((first[2] as usize) << 8 | first[3] as usize) == w
            && (8..=0x7fff).contains(&w);
        if is_new_rle {
            for comp in 0..4 {
                let mut filled = 0usize;
                while filled < w {
                    let count = r.byte()? as usize;
                    if count > 128 {
                        let run = count - 128;
                        if filled + run > w {
                            return Err(Error::CorruptImage("rle run overflows scanline".into()));
                        }
                        let v = r.byte()?;
                        for px in &mut row[filled..filled + run] {
                            px[comp] = v;
                        }
                        filled += run;
                    } else {
                        if count == 0 || filled + count > w {
                            return Err(Error::CorruptImage("bad rle literal count".into()));
                        }
                        for i in 0..count {
                            row[filled + i][comp] = r.byte()?;
                        }
                        filled += count;
                    }
                }
            }
        } else {
            // flat or old-style run-length scanline
            row[0] = first;
            let mut filled = 1usize;
            let mut repeat_shift = 0u32;
            while filled < w {
                let q = r.quad()?;
                if q[0] == 1 && q[1] == 1 && q[2] == 1 {
                    let run = (q[3] as usize) << repeat_shift;
                    if filled == 0 || filled + run > w {
                        return Err(Error::CorruptImage("bad old-style run".into()));
                    }
                    let prev = row[filled - 1];
                    for px in &mut row[filled..filled + run] {
                        *px = prev;
                    }
                    filled += run;
                    repeat_shift += 8;
                } else {
                    row[filled] = q;
                    filled += 1;
                    repeat_shift = 0;
                }
            }
        }
        pixels.extend(row.iter().map(|&q| rgbe_to_rgb(q)));
    }
    Ok((w, h, pixels))
}

/// Write an XYZ image as a Radiance RGBE file (new-style scanlines with
/// literal runs). `prims` converts XYZ back to the file's linear RGB.
pub fn save_hdr(path: &Path, img: &ImagePlanar, prims: &Chromaticities) -> Result<()> {
    let m = rgb_to_xyz_matrix(prims)?;
    let m_inv = mat3_invert(&m).expect("matrix from valid primaries is invertible");
    let (w, h) = (img.width(), img.height());
    let x = img.channel("X");
    let y = img.channel("Y");
    let z = img.channel("Z");

    let mut out = Vec::with_capacity(w * h * 4 + 128);
    out.extend_from_slice(b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n");
    out.extend_from_slice(format!("-Y {h} +X {w}\n").as_bytes());

    let use_rle = (8..=0x7fff).contains(&w);
    let mut quads = vec![[0u8; 4]; w];
    for row in 0..h {
        for col in 0..w {
            let i = row * w + col;
            let rgb = mat3_mul_vec(&m_inv, [x.data[i], y.data[i], z.data[i]]);
            quads[col] = rgb_to_rgbe([rgb[0].max(0.0), rgb[1].max(0.0), rgb[2].max(0.0)]);
        }
        if use_rle {
            out.extend_from_slice(&[2, 2, (w >> 8) as u8, (w & 0xff) as u8]);
            for comp in 0..4 {
                let mut i = 0;
                while i < w {
                    let chunk = (w - i).min(128);
                    out.push(chunk as u8);
                    for q in &quads[i..i + chunk] {
                        out.push(q[comp]);
                    }
                    i += chunk;
                }
            }
        } else {
            for q in &quads {
                out.extend_from_slice(q);
            }
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// PFM
// ---------------------------------------------------------------------------

fn decode_pfm_file(bytes: &[u8]) -> Result<(usize, usize, usize, Vec<f64>)> {
    let mut r = ByteReader::new(bytes);
    // header tokens are whitespace separated; the scale line ends in a
    // single whitespace byte before the raster
    let token = |r: &mut ByteReader| -> Result<String> {
        let mut s = String::new();
        loop {
            let b = r.byte()?;
            if b.is_ascii_whitespace() {
                if s.is_empty() {
                    continue;
                }
                return Ok(s);
            }
            s.push(b as char);
        }
    };
    let magic = token(&mut r)?;
    let channels = match magic.as_str() {
        "PF" => 3,
        "Pf" => 1,
        _ => return Err(Error::UnsupportedFormat),
    };
    let parse = |s: String| -> Result<f64> {
        s.parse::<f64>().map_err(|_| Error::CorruptImage(format!("bad pfm header token: {s}")))
    };
    let w = parse(token(&mut r)?)? as usize;
    let h = parse(token(&mut r)?)? as usize;
    let scale = parse(token(&mut r)?)?;
    if w == 0 || h == 0 {
        return Err(Error::CorruptImage("zero-sized image".into()));
    }
    let little_endian = scale < 0.0;
    let gain = scale.abs();

    let need = w * h * channels * 4;
    let raster = bytes
        .get(r.pos..r.pos + need)
        .ok_or_else(|| Error::CorruptImage("truncated pfm raster".into()))?;

    let mut data = vec![0.0f64; w * h * channels];
    // rows are stored bottom-to-top
    for row in 0..h {
        let src_row = h - 1 - row;
        for col in 0..w * channels {
            let off = (src_row * w * channels + col) * 4;
            let b: [u8; 4] = raster[off..off + 4].try_into().unwrap();
            let v = if little_endian { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) };
            data[row * w * channels + col] = v as f64 * gain;
        }
    }
    Ok((w, h, channels, data))
}

/// Write an XYZ image as a color PFM (little-endian, scale -1.0); values are
/// the file's linear RGB under `prims`.
pub fn save_pfm(path: &Path, img: &ImagePlanar, prims: &Chromaticities) -> Result<()> {
    let m = rgb_to_xyz_matrix(prims)?;
    let m_inv = mat3_invert(&m).expect("matrix from valid primaries is invertible");
    let (w, h) = (img.width(), img.height());
    let x = img.channel("X");
    let y = img.channel("Y");
    let z = img.channel("Z");

    let mut out = Vec::with_capacity(w * h * 12 + 32);
    out.extend_from_slice(format!("PF\n{w} {h}\n-1.0\n").as_bytes());
    for row in (0..h).rev() {
        for col in 0..w {
            let i = row * w + col;
            let rgb = mat3_mul_vec(&m_inv, [x.data[i], y.data[i], z.data[i]]);
            for c in rgb {
                out.extend_from_slice(&(c as f32).to_le_bytes());
            }
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

/// Load an HDR image (Radiance RGBE or PFM, detected by magic bytes) into
/// linear XYZ under the given primaries. Grayscale PFM is treated as equal
/// linear RGB.
pub fn load_hdr(path: &Path, prims: &Chromaticities) -> Result<ImagePlanar> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let m = rgb_to_xyz_matrix(prims)?;

    let (w, h, rgb) = if bytes.starts_with(b"#?") {
        decode_rgbe_file(&bytes)?
    } else if bytes.starts_with(b"PF") || bytes.starts_with(b"Pf") {
        let (w, h, channels, data) = decode_pfm_file(&bytes)?;
        let rgb: Vec<[f64; 3]> = if channels == 3 {
            data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
        } else {
            data.iter().map(|&v| [v, v, v]).collect()
        };
        (w, h, rgb)
    } else {
        return Err(Error::UnsupportedFormat);
    };

    let n = w * h;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for p in rgb {
        let v = mat3_mul_vec(&m, p);
        x.push(v[0]);
        y.push(v[1]);
        z.push(v[2]);
    }
    Ok(ImagePlanar::xyz(
        Plane::from_vec(w, h, x),
        Plane::from_vec(w, h, y),
        Plane::from_vec(w, h, z),
    ))
}

/// Load an 8-bit sRGB-encoded PNG into display-referred XYZ (white Y = 100).
pub fn load_png_xyz(path: &Path, prims: &Chromaticities) -> Result<ImagePlanar> {
    let m = rgb_to_xyz_matrix(prims)?;
    let img = image::open(path).map_err(|e| Error::Png(e.to_string()))?.to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let n = w * h;
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for p in img.pixels() {
        let rgb = [
            srgb_decode(p.0[0] as f64 / 255.0),
            srgb_decode(p.0[1] as f64 / 255.0),
            srgb_decode(p.0[2] as f64 / 255.0),
        ];
        let v = mat3_mul_vec(&m, rgb);
        x.push(v[0] * 100.0);
        y.push(v[1] * 100.0);
        z.push(v[2] * 100.0);
    }
    Ok(ImagePlanar::xyz(
        Plane::from_vec(w, h, x),
        Plane::from_vec(w, h, y),
        Plane::from_vec(w, h, z),
    ))
}

/// Load any supported format: RGBE/PFM (raw linear) or PNG (display
/// referred).
pub fn load_image_xyz(path: &Path, prims: &Chromaticities) -> Result<ImagePlanar> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"#?") || bytes.starts_with(b"PF") || bytes.starts_with(b"Pf") {
        load_hdr(path, prims)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        load_png_xyz(path, prims)
    } else {
        Err(Error::UnsupportedFormat)
    }
}

// ---------------------------------------------------------------------------
// PNG output
// ---------------------------------------------------------------------------

/// Save display-referred XYZ (Y <= 100) as an 8-bit sRGB PNG.
///
/// Linear RGB out of the matrix is clipped to [0, 1] (post-clip residuals
/// only), transfer-encoded, and quantized round-half-up.
pub fn save_png_srgb(path: &Path, img: &ImagePlanar, prims: &Chromaticities) -> Result<()> {
    let m = rgb_to_xyz_matrix(prims)?;
    let m_inv = mat3_invert(&m).expect("matrix from valid primaries is invertible");
    let (w, h) = (img.width(), img.height());
    let x = img.channel("X");
    let y = img.channel("Y");
    let z = img.channel("Z");

    let mut buf = Vec::with_capacity(w * h * 3);
    for i in 0..w * h {
        let rgb = mat3_mul_vec(&m_inv, [x.data[i] / 100.0, y.data[i] / 100.0, z.data[i] / 100.0]);
        for c in rgb {
            let v = srgb_encode(c.clamp(0.0, 1.0));
            buf.push((v * 255.0).round() as u8);
        }
    }
    let png = image::RgbImage::from_raw(w as u32, h as u32, buf)
        .expect("buffer sized from dimensions");
    png.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Png(e.to_string()))
}

/// Save a boolean mask as a black/white PNG.
pub fn save_mask_png(path: &Path, mask: &Mask) -> Result<()> {
    let buf: Vec<u8> = mask.data.iter().map(|&b| if b { 255 } else { 0 }).collect();
    let png = image::GrayImage::from_raw(mask.width() as u32, mask.height() as u32, buf)
        .expect("buffer sized from dimensions");
    png.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Png(e.to_string()))
}

/// Save a plane as a false-color PNG, mapping [0, max_value] through a
/// blue-cyan-green-yellow-red ramp.
pub fn save_false_color_png(path: &Path, plane: &Plane, max_value: f64) -> Result<()> {
    let ramp = |t: f64| -> [u8; 3] {
        let t = t.clamp(0.0, 1.0);
        let seg = (t * 4.0).min(3.999);
        let f = seg.fract();
        let to = |v: f64| (v * 255.0).round() as u8;
        match seg as usize {
            0 => [0, to(f), 255],
            1 => [0, 255, to(1.0 - f)],
            2 => [to(f), 255, 0],
            _ => [255, to(1.0 - f), 0],
        }
    };
    let denom = if max_value > 0.0 { max_value } else { 1.0 };
    let mut buf = Vec::with_capacity(plane.len() * 3);
    for &v in &plane.data {
        buf.extend_from_slice(&ramp(v / denom));
    }
    let png = image::RgbImage::from_raw(plane.width() as u32, plane.height() as u32, buf)
        .expect("buffer sized from dimensions");
    png.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Png(e.to_string()))
}

/// Write a text table with a small header; used by the diagnostics dumps.
pub fn write_text_file(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| Error::io(path, e))?;
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorspace::SRGB;
    use tempfile::tempdir;

    #[test]
    fn rgbe_white_quad_decodes_to_one() {
        // hand evaluation of the shared-exponent formula:
        // (128/256) * 2^(129-128) = 1.0
        assert_eq!(rgbe_to_rgb([128, 128, 128, 129]), [1.0, 1.0, 1.0]);
        assert_eq!(rgbe_to_rgb([0, 0, 0, 0]), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn rgbe_round_trip_precision() {
        let mut state = 0x1357924680u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10_000 {
            let rgb = [
                next() * 1000.0,
                next() * 1000.0,
                next() * 1000.0,
            ];
            let back = rgbe_to_rgb(rgb_to_rgbe(rgb));
            let max = rgb[0].max(rgb[1]).max(rgb[2]);
            for i in 0..3 {
                // one shared-exponent mantissa step is at most max/128
                assert!(
                    (back[i] - rgb[i]).abs() <= max / 128.0 + 1e-12,
                    "{rgb:?} -> {back:?}"
                );
            }
        }
    }

    #[test]
    fn hdr_file_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("test.hdr");
        // image built from in-gamut RGB so the file's RGB encoding is exact
        let m = rgb_to_xyz_matrix(&SRGB).unwrap();
        let mut planes = [Vec::new(), Vec::new(), Vec::new()];
        for y in 0..17 {
            for x in 0..33 {
                let rgb = [
                    (x + y) as f64 * 0.3 + 0.2,
                    (x * y) as f64 * 0.1 + 0.5,
                    x as f64 * 0.05 + 0.1,
                ];
                let xyz = mat3_mul_vec(&m, rgb);
                for (p, v) in planes.iter_mut().zip(xyz) {
                    p.push(v);
                }
            }
        }
        let img = ImagePlanar::xyz(
            Plane::from_vec(33, 17, planes[0].clone()),
            Plane::from_vec(33, 17, planes[1].clone()),
            Plane::from_vec(33, 17, planes[2].clone()),
        );
        save_hdr(&path, &img, &SRGB).unwrap();
        let back = load_hdr(&path, &SRGB).unwrap();
        assert_eq!(back.width(), 33);
        assert_eq!(back.height(), 17);
        // quantization error is relative to the brightest channel per pixel
        let n = img.width() * img.height();
        for i in 0..n {
            let mag = ["X", "Y", "Z"]
                .iter()
                .map(|ch| img.channel(ch).data[i].abs())
                .fold(0.0, f64::max);
            for ch in ["X", "Y", "Z"] {
                let (a, b) = (back.channel(ch).data[i], img.channel(ch).data[i]);
                assert!((a - b).abs() <= mag * 0.03 + 1e-3, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rgbe_old_style_rle_decodes() {
        // hand-built file: 10x1, first pixel followed by an old-style run
        // of 9 repeats
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"#?RADIANCE\n\n-Y 1 +X 10\n");
        bytes.extend_from_slice(&[128, 64, 32, 129]); // pixel
        bytes.extend_from_slice(&[1, 1, 1, 9]); // repeat 9 times
        let (w, h, px) = decode_rgbe_file(&bytes).unwrap();
        assert_eq!((w, h), (10, 1));
        assert_eq!(px.len(), 10);
        for p in &px {
            assert_eq!(*p, rgbe_to_rgb([128, 64, 32, 129]));
        }
    }

    #[test]
    fn rgbe_new_style_rle_runs_decode() {
        // hand-built new-style scanline: width 8, each component a run
        let w = 8usize;
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y 1 +X 8\n");
        bytes.extend_from_slice(&[2, 2, 0, 8]);
        for v in [100u8, 50, 25, 129] {
            bytes.push(128 + w as u8); // run of 8
            bytes.push(v);
        }
        let (_, _, px) = decode_rgbe_file(&bytes).unwrap();
        for p in &px {
            assert_eq!(*p, rgbe_to_rgb([100, 50, 25, 129]));
        }
    }

    #[test]
    fn zero_length_file_is_corrupt() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.hdr");
        fs::write(&path, b"").unwrap();
        match load_hdr(&path, &SRGB) {
            Err(Error::UnsupportedFormat) | Err(Error::CorruptImage(_)) => {}
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_rgbe_is_corrupt() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("trunc.hdr");
        fs::write(&path, b"#?RADIANCE\n\n-Y 4 +X 4\n\x80\x80").unwrap();
        assert!(matches!(load_hdr(&path, &SRGB), Err(Error::CorruptImage(_))));
    }

    #[test]
    fn unknown_magic_is_unsupported() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("who.hdr");
        fs::write(&path, b"GIF89a such image").unwrap();
        assert!(matches!(load_hdr(&path, &SRGB), Err(Error::UnsupportedFormat)));
    }

    #[test]
    fn pfm_round_trip_bit_identical() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("test.pfm");
        let img = ImagePlanar::xyz(
            Plane::from_fn(9, 7, |x, y| (x as f64 * 1.5 + y as f64).into()),
            Plane::from_fn(9, 7, |x, y| (x * y) as f64 + 0.25),
            Plane::from_fn(9, 7, |_, y| y as f64 * 3.0),
        );
        save_pfm(&path, &img, &SRGB).unwrap();
        let back = load_hdr(&path, &SRGB).unwrap();
        save_pfm(&path, &back, &SRGB).unwrap();
        let again = load_hdr(&path, &SRGB).unwrap();
        // after one f32 quantization the planes are stable bit-for-bit
        for ch in ["X", "Y", "Z"] {
            assert_eq!(back.channel(ch).data, again.channel(ch).data);
        }
    }

    #[test]
    fn pfm_grayscale_loads_as_equal_rgb() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("gray.pfm");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"Pf\n2 2\n-1.0\n");
        for v in [0.25f32, 0.5, 0.75, 1.0] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(&path, &bytes).unwrap();
        let img = load_hdr(&path, &SRGB).unwrap();
        // equal RGB maps to the white point's chromaticity: X/Y and Z/Y
        // constant across pixels
        let x = img.channel("X");
        let y = img.channel("Y");
        let r0 = x.data[0] / y.data[0];
        for i in 1..4 {
            assert!((x.data[i] / y.data[i] - r0).abs() < 1e-12);
        }
    }

    #[test]
    fn png_white_and_black_codes() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("wb.png");
        let white = crate::colorspace::white_xyz(&SRGB, 100.0);
        let img = ImagePlanar::xyz(
            Plane::from_vec(2, 1, vec![white[0], 0.0]),
            Plane::from_vec(2, 1, vec![white[1], 0.0]),
            Plane::from_vec(2, 1, vec![white[2], 0.0]),
        );
        save_png_srgb(&path, &img, &SRGB).unwrap();
        let png = image::open(&path).unwrap().to_rgb8();
        assert_eq!(png.get_pixel(0, 0).0, [255, 255, 255]);
        assert_eq!(png.get_pixel(1, 0).0, [0, 0, 0]);
    }

    #[test]
    fn png_18_percent_gray_code() {
        // independent oracle (reference sRGB encode of 0.18):
        // 1.055*0.18^(1/2.4)-0.055 = 0.461356 -> 117.65 -> 118
        let dir = tempdir().unwrap();
        let path = dir.path().join("gray18.png");
        let white = crate::colorspace::white_xyz(&SRGB, 100.0);
        let img = ImagePlanar::xyz(
            Plane::filled(1, 1, white[0] * 0.18),
            Plane::filled(1, 1, 18.0),
            Plane::filled(1, 1, white[2] * 0.18),
        );
        save_png_srgb(&path, &img, &SRGB).unwrap();
        let png = image::open(&path).unwrap().to_rgb8();
        let p = png.get_pixel(0, 0).0;
        for c in p {
            assert!((c as i32 - 118).abs() <= 1, "expected 118 +/- 1, got {p:?}");
        }
    }

    #[test]
    fn png_round_trip_through_loader() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rt.png");
        let white = crate::colorspace::white_xyz(&SRGB, 100.0);
        let img = ImagePlanar::xyz(
            Plane::filled(3, 3, white[0] * 0.42),
            Plane::filled(3, 3, 42.0),
            Plane::filled(3, 3, white[2] * 0.42),
        );
        save_png_srgb(&path, &img, &SRGB).unwrap();
        let back = load_png_xyz(&path, &SRGB).unwrap();
        for (a, b) in back.channel("Y").data.iter().zip(&img.channel("Y").data) {
            assert!((a - b).abs() < 0.5, "{a} vs {b}");
        }
    }
}
