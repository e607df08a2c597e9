//! Gamut boundary descriptors.
//!
//! A display gamut is described per 1-degree hue slice by its cusp (the
//! maximum-chroma point of the slice). Each slice boundary is the triangle
//! (C=0, L=0) - (cusp chroma, cusp lightness) - (C=0, L=100) in the
//! chroma-lightness plane, which is also the shape the compression and
//! clipping stages reason about.

use std::io::Write;

use rayon::prelude::*;

use crate::colorspace::{mat3_mul_vec, rgb_to_xyz_matrix, xyz_to_lch, Chromaticities, LchColor};
use crate::error::{Error, Result};
use crate::imaging::{percentile, ImagePlanar};

/// Number of 1-degree hue bins.
pub const HUE_BINS: usize = 360;

/// Containment slack in chroma units.
pub const CONTAINS_EPSILON: f64 = 1e-9;

/// Map a hue in degrees to its 1-degree bin index (pixels are assigned to
/// `floor(h)`).
#[inline]
pub fn hue_bin(h: f64) -> usize {
    (h.floor() as i64).rem_euclid(HUE_BINS as i64) as usize
}

/// One hue slice of a display gamut boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GamutSlice {
    /// Lower edge of the slice's hue bin, in degrees.
    pub hue: f64,
    /// Chroma of the cusp (maximum-chroma point of the slice).
    pub cusp_chroma: f64,
    /// Lightness of the cusp.
    pub cusp_lightness: f64,
}

impl GamutSlice {
    /// Slice lightness floor (black point).
    pub fn lightness_floor(&self) -> f64 {
        0.0
    }

    /// Slice lightness ceiling reference; the slice's lightness range
    /// collapses to the cusp lightness at the cusp chroma.
    pub fn lightness_ceiling(&self) -> f64 {
        self.cusp_lightness
    }

    /// Chroma of the triangle boundary at lightness `l` in [0, 100]:
    /// linear from (0,0) to the cusp below the cusp lightness, then linear
    /// from the cusp to (0,100).
    #[inline]
    pub fn max_chroma(&self, l: f64) -> f64 {
        debug_assert!((0.0..=100.0).contains(&l));
        if l <= self.cusp_lightness {
            self.cusp_chroma * l / self.cusp_lightness
        } else {
            self.cusp_chroma * (100.0 - l) / (100.0 - self.cusp_lightness)
        }
    }

    /// Containment against this slice's triangle with both coordinates of
    /// its vertices multiplied by `scale`.
    #[inline]
    pub fn contains_scaled(&self, c: f64, l: f64, scale: f64) -> bool {
        if l < 0.0 || l > 100.0 * scale {
            return false;
        }
        let bound = if l <= scale * self.cusp_lightness {
            self.cusp_chroma * l / self.cusp_lightness
        } else {
            self.cusp_chroma * (100.0 * scale - l) / (100.0 - self.cusp_lightness)
        };
        c <= bound + CONTAINS_EPSILON
    }

    /// True when some finite uniform scale of the triangle encloses the
    /// point. Points below the lower-edge line through the origin are never
    /// enclosed because that edge is invariant under uniform scaling.
    #[inline]
    pub fn enclosable(&self, c: f64, l: f64) -> bool {
        l >= 0.0 && c <= self.cusp_chroma * l / self.cusp_lightness + CONTAINS_EPSILON
    }
}

/// Per-hue-slice boundary of a display gamut.
#[derive(Debug, Clone)]
pub struct GamutBoundary {
    slices: Vec<GamutSlice>,
    /// Reference white luminance used during construction.
    pub white_y: f64,
}

impl GamutBoundary {
    pub fn slices(&self) -> &[GamutSlice] {
        &self.slices
    }

    #[inline]
    pub fn slice(&self, hue: f64) -> &GamutSlice {
        &self.slices[hue_bin(hue)]
    }

    /// Chroma of the slice boundary at lightness `l`.
    pub fn max_chroma_at(&self, hue: f64, l: f64) -> Result<f64> {
        if !(0.0..=100.0).contains(&l) {
            return Err(Error::LightnessOutOfRange(l));
        }
        Ok(self.slice(hue).max_chroma(l))
    }

    /// True when the color lies inside the boundary (lightness within
    /// [0, 100] and chroma within the slice triangle).
    #[inline]
    pub fn contains(&self, p: &LchColor) -> bool {
        if p.l < 0.0 || p.l > 100.0 {
            return false;
        }
        p.c <= self.slice(p.h).max_chroma(p.l) + CONTAINS_EPSILON
    }

    /// Containment against the slice triangle scaled uniformly by `scale`
    /// (both chroma and lightness coordinates of its vertices).
    #[inline]
    pub fn contains_scaled(&self, p: &LchColor, scale: f64) -> bool {
        debug_assert!(scale >= 1.0);
        self.slice(p.h).contains_scaled(p.c, p.l, scale)
    }

    /// Write the cusp table as text, one `hue cusp_chroma cusp_lightness`
    /// record per line.
    pub fn write_cusp_table(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "# hue cusp_chroma cusp_lightness")?;
        for s in &self.slices {
            writeln!(out, "{} {:.6} {:.6}", s.hue, s.cusp_chroma, s.cusp_lightness)?;
        }
        Ok(())
    }
}

/// Build the boundary of an RGB display gamut by sampling the six faces of
/// the RGB cube (`samples_per_edge`^2 points each), converting to LCh, and
/// keeping the maximum-chroma point per hue bin. Empty bins are filled by
/// circular interpolation between neighboring cusps.
pub fn build_target_boundary(
    prims: &Chromaticities,
    samples_per_edge: usize,
) -> Result<GamutBoundary> {
    assert!(samples_per_edge >= 64, "need at least 64 samples per edge");
    let m = rgb_to_xyz_matrix(prims)?;
    let white = mat3_mul_vec(&m, [1.0, 1.0, 1.0]);

    let n = samples_per_edge;
    let step = 1.0 / (n - 1) as f64;
    // (face, row) work items; each face fixes one channel at 0 or 1
    let faces: Vec<(usize, f64)> = (0..3)
        .flat_map(|axis| [(axis, 0.0), (axis, 1.0)])
        .collect();

    let per_face: Vec<Vec<(f64, f64)>> = faces
        .par_iter()
        .map(|&(axis, fixed)| {
            let mut cusps = vec![(0.0f64, 0.0f64); HUE_BINS];
            for i in 0..n {
                let u = i as f64 * step;
                for j in 0..n {
                    let v = j as f64 * step;
                    let rgb = match axis {
                        0 => [fixed, u, v],
                        1 => [u, fixed, v],
                        _ => [u, v, fixed],
                    };
                    let lch = xyz_to_lch(mat3_mul_vec(&m, rgb), white);
                    let bin = hue_bin(lch.h);
                    if lch.c > cusps[bin].0 {
                        cusps[bin] = (lch.c, lch.l);
                    }
                }
            }
            cusps
        })
        .collect();

    let mut cusps = vec![(0.0f64, 0.0f64); HUE_BINS];
    for face in per_face {
        for (bin, &(c, l)) in face.iter().enumerate() {
            if c > cusps[bin].0 {
                cusps[bin] = (c, l);
            }
        }
    }

    fill_empty_bins(&mut cusps);

    let slices = cusps
        .iter()
        .enumerate()
        .map(|(i, &(c, l))| GamutSlice { hue: i as f64, cusp_chroma: c, cusp_lightness: l })
        .collect();
    Ok(GamutBoundary { slices, white_y: 100.0 })
}

/// Circular linear interpolation of (chroma, lightness) across empty bins.
fn fill_empty_bins(cusps: &mut [(f64, f64)]) {
    let n = cusps.len();
    let nonempty: Vec<usize> = (0..n).filter(|&i| cusps[i].0 > 0.0).collect();
    assert!(!nonempty.is_empty(), "gamut boundary sampling produced no chromatic bins");
    if nonempty.len() == n {
        return;
    }
    for i in 0..n {
        if cusps[i].0 > 0.0 {
            continue;
        }
        // nearest nonempty neighbors in both circular directions
        let prev = *nonempty
            .iter()
            .rev()
            .find(|&&j| j < i)
            .unwrap_or(nonempty.last().unwrap());
        let next = *nonempty.iter().find(|&&j| j > i).unwrap_or(&nonempty[0]);
        let span = (next as i64 - prev as i64).rem_euclid(n as i64) as f64;
        let offset = (i as i64 - prev as i64).rem_euclid(n as i64) as f64;
        let t = if span > 0.0 { offset / span } else { 0.0 };
        let (c0, l0) = cusps[prev];
        let (c1, l1) = cusps[next];
        cusps[i] = (c0 + (c1 - c0) * t, l0 + (l1 - l0) * t);
    }
}

/// Per-hue statistics of a source image (the set of colors of the input).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSlice {
    /// Chroma at the configured percentile within the slice.
    pub cusp_chroma: f64,
    /// Top lightness at the configured percentile within the slice.
    pub l_max: f64,
    /// Minimum lightness within the slice.
    pub l_min: f64,
    /// Number of pixels in the slice.
    pub pixels: usize,
}

/// Source gamut descriptor: per-hue percentile chroma and lightness extremes.
/// Empty slices are `None`.
#[derive(Debug, Clone)]
pub struct SourceGamut {
    slices: Vec<Option<SourceSlice>>,
    pub percentile: f64,
}

impl SourceGamut {
    pub fn slices(&self) -> &[Option<SourceSlice>] {
        &self.slices
    }

    pub fn slice(&self, hue: f64) -> Option<&SourceSlice> {
        self.slices[hue_bin(hue)].as_ref()
    }
}

/// Build a [`SourceGamut`] from an LCh image (normally the base layer) at
/// the given percentile fraction.
pub fn build_source_gamut(img: &ImagePlanar, pct: f64) -> SourceGamut {
    assert!(pct > 0.0 && pct <= 1.0, "percentile must be in (0, 1]");
    let h_plane = img.channel("h");
    let c_plane = img.channel("C");
    let l_plane = img.channel("L");

    let mut chroma_bins: Vec<Vec<f64>> = vec![Vec::new(); HUE_BINS];
    let mut light_bins: Vec<Vec<f64>> = vec![Vec::new(); HUE_BINS];
    for i in 0..h_plane.len() {
        let bin = hue_bin(h_plane.data[i]);
        chroma_bins[bin].push(c_plane.data[i]);
        light_bins[bin].push(l_plane.data[i]);
    }

    let slices = chroma_bins
        .into_iter()
        .zip(light_bins)
        .map(|(cs, ls)| {
            if cs.is_empty() {
                return None;
            }
            let cusp_chroma = percentile(&cs, pct).expect("nonempty");
            let l_max = percentile(&ls, pct).expect("nonempty");
            let l_min = ls.iter().copied().fold(f64::INFINITY, f64::min);
            Some(SourceSlice { cusp_chroma, l_max, l_min, pixels: cs.len() })
        })
        .collect();
    SourceGamut { slices, percentile: pct }
}
