//! Content-adaptive chroma compression.
//!
//! Two methods share the same base/detail machinery: the hue-specific method
//! grows each hue slice's gamut triangle on a fixed increment grid until it
//! encloses the retained slice pixels, then divides base chroma by the
//! (smoothed) per-hue scale; the global method applies one image-wide scale
//! from the minimum destination/source cusp ratio.

use std::io::Write;

use crate::gamut::{hue_bin, GamutBoundary, SourceGamut, HUE_BINS};
use crate::imaging::{connected_regions, decompose_divide, percentile, ImagePlanar, Mask, Plane};

/// Default scale-grid increment.
pub const DEFAULT_INCREMENT: f64 = 0.1;

/// Smoothing window over hue bins (centered, circular).
pub const SMOOTHING_WINDOW: usize = 15;

/// Percentile selection by out-of-gamut pixel spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PercentilePolicy {
    /// Percentile when out-of-gamut pixels are spread over the image.
    pub spread: f64,
    /// Percentile when they sit in a few connected regions.
    pub concentrated: f64,
    /// Regions-to-pixels ratio below which the out-of-gamut set counts as
    /// concentrated.
    pub region_ratio_threshold: f64,
}

impl Default for PercentilePolicy {
    fn default() -> Self {
        PercentilePolicy { spread: 0.99, concentrated: 1.0, region_ratio_threshold: 0.01 }
    }
}

/// Pick the chroma percentile from the spread of out-of-gamut pixels.
///
/// Counts 8-connected regions of the out-of-gamut mask; a region/pixel ratio
/// below the threshold means a few compact regions (be gentle), otherwise
/// the pixels are scattered (compress more aggressively). An image with no
/// out-of-gamut pixels returns 1.0.
pub fn select_percentile(img: &ImagePlanar, dst: &GamutBoundary, policy: &PercentilePolicy) -> f64 {
    let mask = out_of_gamut_mask(img, dst);
    let (regions, pixels) = connected_regions(&mask);
    if pixels == 0 {
        return 1.0;
    }
    let ratio = regions as f64 / pixels as f64;
    if ratio < policy.region_ratio_threshold {
        policy.concentrated
    } else {
        policy.spread
    }
}

/// Boolean mask of pixels outside the destination boundary.
pub fn out_of_gamut_mask(img: &ImagePlanar, dst: &GamutBoundary) -> Mask {
    let l = img.channel("L");
    let c = img.channel("C");
    let h = img.channel("h");
    let data = (0..l.len())
        .map(|i| {
            !dst.contains(&crate::colorspace::LchColor {
                l: l.data[i],
                c: c.data[i],
                h: h.data[i],
            })
        })
        .collect();
    Mask::from_vec(img.width(), img.height(), data)
}

// Retained points of one hue slice: base chroma at or below the slice's
// percentile chroma, and enclosable by some finite scale of the triangle.
fn retained_points(
    l: &[f64],
    c: &[f64],
    h: &[f64],
    dst: &GamutBoundary,
    pct: f64,
) -> Vec<Vec<(f64, f64)>> {
    let mut bins: Vec<Vec<(f64, f64)>> = vec![Vec::new(); HUE_BINS];
    for i in 0..l.len() {
        bins[hue_bin(h[i])].push((c[i], l[i]));
    }
    bins.iter()
        .enumerate()
        .map(|(bin, pts)| {
            if pts.is_empty() {
                return Vec::new();
            }
            let chromas: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let cap = percentile(&chromas, pct).expect("nonempty");
            let slice = &dst.slices()[bin];
            pts.iter()
                .filter(|&&(c, l)| c <= cap && slice.enclosable(c, l))
                .copied()
                .collect()
        })
        .collect()
}

/// Per-hue scale factors grown iteratively on the `1 + k*increment` grid
/// until the scaled slice triangle encloses every retained pixel.
///
/// `img_base` is an LCh image whose chroma channel is the base layer.
/// Slices with no pixels (or none retained) get scale 1. Pixels that no
/// finite scale can enclose (below the origin-anchored lower edge, which is
/// invariant under uniform scaling) are left to the clipping stage.
pub fn compute_scale_vector(
    img_base: &ImagePlanar,
    dst: &GamutBoundary,
    pct: f64,
    increment: f64,
) -> Vec<f64> {
    assert!(increment > 0.0);
    let bins = retained_points(
        &img_base.channel("L").data,
        &img_base.channel("C").data,
        &img_base.channel("h").data,
        dst,
        pct,
    );
    bins.iter()
        .enumerate()
        .map(|(bin, pts)| {
            let slice = &dst.slices()[bin];
            let mut k = 0u64;
            loop {
                let scale = 1.0 + k as f64 * increment;
                if pts.iter().all(|&(c, l)| slice.contains_scaled(c, l, scale)) {
                    return scale;
                }
                k += 1;
            }
        })
        .collect()
}

/// Closed-form equivalent of [`compute_scale_vector`]: lands on the same
/// `1 + k*increment` grid point for every slice.
pub fn compute_scale_vector_closed_form(
    img_base: &ImagePlanar,
    dst: &GamutBoundary,
    pct: f64,
    increment: f64,
) -> Vec<f64> {
    assert!(increment > 0.0);
    let bins = retained_points(
        &img_base.channel("L").data,
        &img_base.channel("C").data,
        &img_base.channel("h").data,
        dst,
        pct,
    );
    bins.iter()
        .enumerate()
        .map(|(bin, pts)| {
            let slice = &dst.slices()[bin];
            let mut k_max = 0u64;
            for &(c, l) in pts {
                if slice.contains_scaled(c, l, 1.0) {
                    continue;
                }
                // the upper-edge requirement bounds the needed scale from
                // above; walk to the exact grid point under the same
                // containment predicate the iterative loop uses
                let needed =
                    (l + c * (100.0 - slice.cusp_lightness) / slice.cusp_chroma) / 100.0;
                let mut k = ((needed - 1.0) / increment).ceil().max(1.0) as u64;
                while !slice.contains_scaled(c, l, 1.0 + k as f64 * increment) {
                    k += 1;
                }
                while k > 0 && slice.contains_scaled(c, l, 1.0 + (k - 1) as f64 * increment) {
                    k -= 1;
                }
                k_max = k_max.max(k);
            }
            1.0 + k_max as f64 * increment
        })
        .collect()
}

/// Circular box moving average over hue bins, window
/// [`SMOOTHING_WINDOW`] wide; bins 359 and 0 are neighbors.
pub fn smooth_scale_vector(raw: &[f64]) -> Vec<f64> {
    assert_eq!(raw.len(), HUE_BINS);
    let half = (SMOOTHING_WINDOW / 2) as i64;
    (0..HUE_BINS as i64)
        .map(|i| {
            let sum: f64 = (-half..=half)
                .map(|d| raw[(i + d).rem_euclid(HUE_BINS as i64) as usize])
                .sum();
            sum / SMOOTHING_WINDOW as f64
        })
        .collect()
}

/// Raw and smoothed per-hue scale factors.
#[derive(Debug, Clone)]
pub struct ScaleVector {
    pub raw: Vec<f64>,
    pub smoothed: Vec<f64>,
    pub increment: f64,
}

impl ScaleVector {
    pub fn from_raw(raw: Vec<f64>, increment: f64) -> Self {
        let smoothed = smooth_scale_vector(&raw);
        ScaleVector { raw, smoothed, increment }
    }

    /// Text dump, one `hue raw smoothed` record per line.
    pub fn write_table(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "# hue raw smoothed (increment {})", self.increment)?;
        for (i, (r, s)) in self.raw.iter().zip(&self.smoothed).enumerate() {
            writeln!(out, "{i} {r:.6} {s:.6}")?;
        }
        Ok(())
    }
}

/// Hue-specific chroma compression: divide the base chroma of each pixel by
/// the smoothed scale of its hue slice, then re-inject detail. Lightness and
/// hue planes are returned untouched.
pub fn apply_hue_specific(img: &ImagePlanar, smoothed: &[f64]) -> ImagePlanar {
    assert_eq!(smoothed.len(), HUE_BINS);
    let decomposed = decompose_divide(img.channel("C"));
    let h_plane = img.channel("h");
    let n = h_plane.len();
    let mut out_c = vec![0.0; n];
    for i in 0..n {
        let scale = smoothed[hue_bin(h_plane.data[i])];
        out_c[i] = decomposed.base.data[i] / scale * decomposed.detail.data[i];
    }
    let mut out = img.clone();
    out.replace_channel("C", Plane::from_vec(img.width(), img.height(), out_c));
    out
}

/// The single global compression scale: the minimum destination/source cusp
/// chroma ratio across hues, clamped to at most 1 (the method only ever
/// compresses).
pub fn global_scale(src: &SourceGamut, dst: &GamutBoundary) -> f64 {
    let mut min_ratio = f64::INFINITY;
    for (bin, slice) in src.slices().iter().enumerate() {
        if let Some(s) = slice {
            if s.cusp_chroma > 0.0 {
                min_ratio = min_ratio.min(dst.slices()[bin].cusp_chroma / s.cusp_chroma);
            }
        }
    }
    min_ratio.min(1.0)
}

/// Global chroma compression: multiply the base chroma of every pixel by the
/// minimum cusp ratio (when below 1), then re-inject detail.
pub fn apply_global(img: &ImagePlanar, src: &SourceGamut, dst: &GamutBoundary) -> ImagePlanar {
    let scale = global_scale(src, dst);
    if scale >= 1.0 {
        return img.clone();
    }
    let decomposed = decompose_divide(img.channel("C"));
    let n = decomposed.base.len();
    let mut out_c = vec![0.0; n];
    for i in 0..n {
        out_c[i] = decomposed.base.data[i] * scale * decomposed.detail.data[i];
    }
    let mut out = img.clone();
    out.replace_channel("C", Plane::from_vec(img.width(), img.height(), out_c));
    out
}
