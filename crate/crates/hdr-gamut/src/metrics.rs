//! Hue-difference metric and out-of-gamut statistics.
//!
//! Hue differences are measured in cylindrical IPT, which stays closer to
//! hue-linear than LAB; the difference is the raw circular angle (not scaled
//! by colorfulness) since only hue constancy is being judged.

use std::io::Write;

use crate::colorspace::{IptConverter, LchColor};
use crate::error::{Error, Result};
use crate::gamut::GamutBoundary;
use crate::imaging::{ImagePlanar, Plane};

/// IPT chroma below which a pixel's hue is treated as undefined and the
/// pixel excluded from hue statistics.
pub const CHROMA_DEFINED_THRESHOLD: f64 = 1e-4;

/// Circular hue difference in degrees, in [0, 180].
#[inline]
pub fn delta_h(h_t: f64, h_c: f64) -> f64 {
    let lo = h_t.min(h_c);
    let hi = h_t.max(h_c);
    (hi - lo).min(lo + 360.0 - hi)
}

/// Per-pixel hue difference map and its statistics.
#[derive(Debug, Clone)]
pub struct HueDiffReport {
    /// Mean hue difference over chroma-defined pixels, degrees.
    pub mean: f64,
    /// Standard error of the mean, degrees.
    pub stderr: f64,
    /// Per-pixel difference map (0 where hue is undefined).
    pub map: Plane,
    /// Number of pixels that entered the statistics.
    pub valid: usize,
    /// Set when no pixel had defined hue in both images.
    pub no_chromatic_pixels: bool,
    /// Out-of-gamut fractions before/after processing, filled by the
    /// pipeline when available.
    pub oog_fraction_before: f64,
    pub oog_fraction_after: f64,
}

impl HueDiffReport {
    pub fn write_text(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "mean_delta_h_deg {:.6}", self.mean)?;
        writeln!(out, "stderr_delta_h_deg {:.6}", self.stderr)?;
        writeln!(out, "valid_pixels {}", self.valid)?;
        if self.no_chromatic_pixels {
            writeln!(out, "note no chromatic pixels")?;
        }
        writeln!(out, "oog_fraction_before {:.6}", self.oog_fraction_before)?;
        writeln!(out, "oog_fraction_after {:.6}", self.oog_fraction_after)
    }
}

/// Per-pixel IPT hue difference between two XYZ images of equal size.
///
/// `white` is the reference white XYZ both images are referred to. Pixels
/// whose IPT chroma falls below [`CHROMA_DEFINED_THRESHOLD`] in either image
/// are excluded from the mean (their map entry is 0).
pub fn hue_diff_image(
    reference: &ImagePlanar,
    test: &ImagePlanar,
    white: [f64; 3],
) -> Result<HueDiffReport> {
    if reference.width() != test.width() || reference.height() != test.height() {
        return Err(Error::DimensionMismatch(
            reference.width(),
            reference.height(),
            test.width(),
            test.height(),
        ));
    }
    let conv = IptConverter::new(white);
    let (rx, ry, rz) = (reference.channel("X"), reference.channel("Y"), reference.channel("Z"));
    let (tx, ty, tz) = (test.channel("X"), test.channel("Y"), test.channel("Z"));

    let n = rx.len();
    let mut map = vec![0.0; n];
    let mut diffs = Vec::new();
    for i in 0..n {
        let a = conv.forward([rx.data[i], ry.data[i], rz.data[i]]);
        let b = conv.forward([tx.data[i], ty.data[i], tz.data[i]]);
        if a[1] < CHROMA_DEFINED_THRESHOLD || b[1] < CHROMA_DEFINED_THRESHOLD {
            continue;
        }
        let d = delta_h(a[2], b[2]);
        map[i] = d;
        diffs.push(d);
    }

    let valid = diffs.len();
    let (mean, stderr) = if valid == 0 {
        (0.0, 0.0)
    } else {
        let mean = diffs.iter().sum::<f64>() / valid as f64;
        let stderr = if valid > 1 {
            let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>()
                / (valid - 1) as f64;
            (var / valid as f64).sqrt()
        } else {
            0.0
        };
        (mean, stderr)
    };

    Ok(HueDiffReport {
        mean,
        stderr,
        map: Plane::from_vec(reference.width(), reference.height(), map),
        valid,
        no_chromatic_pixels: valid == 0,
        oog_fraction_before: 0.0,
        oog_fraction_after: 0.0,
    })
}

/// Fraction of pixels of an LCh image outside the boundary.
pub fn oog_fraction(img: &ImagePlanar, dst: &GamutBoundary) -> f64 {
    let l = img.channel("L");
    let c = img.channel("C");
    let h = img.channel("h");
    let n = l.len();
    let outside = (0..n)
        .filter(|&i| !dst.contains(&LchColor { l: l.data[i], c: c.data[i], h: h.data[i] }))
        .count();
    outside as f64 / n as f64
}
