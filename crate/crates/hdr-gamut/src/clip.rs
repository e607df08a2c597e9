//! Gamut clipping: map residual out-of-gamut pixels onto the target
//! boundary, trading off chroma against lightness displacement.

use std::io::Write;

use crate::colorspace::{mat3_invert, mat3_mul_vec, rgb_to_xyz_matrix, Chromaticities, LchColor};
use crate::error::Result;
use crate::gamut::GamutBoundary;
use crate::imaging::{ImagePlanar, Mask, Plane};

/// Direction in which out-of-gamut pixels move onto the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClipMode {
    /// Constant lightness, reduce chroma to the boundary.
    ChromaOnly,
    /// Constant chroma, move lightness to the boundary.
    LightnessOnly,
    /// Convex combination of the two targets.
    #[default]
    Interpolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipPolicy {
    pub mode: ClipMode,
    /// Interpolation weight toward the lightness-clip target (interpolated
    /// mode only), in [0, 1].
    pub weight: f64,
}

impl Default for ClipPolicy {
    fn default() -> Self {
        ClipPolicy { mode: ClipMode::Interpolated, weight: 0.5 }
    }
}

/// Clip one color onto the boundary of its hue slice. In-gamut colors are
/// returned unchanged; hue never changes.
///
/// The chroma-clip target keeps (clamped) lightness and takes the boundary
/// chroma there. The lightness-clip target keeps chroma and moves lightness
/// to the nearest boundary; when the pixel chroma exceeds the cusp chroma no
/// such point exists and the cusp itself is used. The interpolated result is
/// a convex combination of the two, inside the closed triangle.
pub fn clip_pixel(p: &LchColor, dst: &GamutBoundary, policy: &ClipPolicy) -> LchColor {
    if dst.contains(p) {
        return *p;
    }
    let slice = dst.slice(p.h);
    let l = p.l.clamp(0.0, 100.0);

    let chroma_target = (slice.max_chroma(l), l);

    let lightness_target = if p.c <= slice.cusp_chroma {
        let span = p.c / slice.cusp_chroma;
        let l_lo = slice.cusp_lightness * span;
        // the admissible range collapses to the cusp at full span; keep the
        // bounds ordered under rounding
        let l_hi = (100.0 - (100.0 - slice.cusp_lightness) * span).max(l_lo);
        (p.c, l.clamp(l_lo, l_hi))
    } else {
        (slice.cusp_chroma, slice.cusp_lightness)
    };

    let (c_out, l_out) = match policy.mode {
        ClipMode::ChromaOnly => chroma_target,
        ClipMode::LightnessOnly => lightness_target,
        ClipMode::Interpolated => {
            let t = policy.weight.clamp(0.0, 1.0);
            (
                (1.0 - t) * chroma_target.0 + t * lightness_target.0,
                (1.0 - t) * chroma_target.1 + t * lightness_target.1,
            )
        }
    };
    LchColor { l: l_out, c: c_out, h: p.h }
}

/// Displacement statistics of a clipping pass, plus the mask of moved pixels.
#[derive(Debug, Clone)]
pub struct ClipReport {
    pub pixels_moved: usize,
    pub pixel_count: usize,
    pub mean_chroma_shift: f64,
    pub max_chroma_shift: f64,
    pub mean_lightness_shift: f64,
    pub max_lightness_shift: f64,
    pub moved: Mask,
}

impl ClipReport {
    pub fn write_text(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "pixels_moved {} / {}", self.pixels_moved, self.pixel_count)?;
        writeln!(out, "chroma_shift mean {:.6} max {:.6}", self.mean_chroma_shift, self.max_chroma_shift)?;
        writeln!(
            out,
            "lightness_shift mean {:.6} max {:.6}",
            self.mean_lightness_shift, self.max_lightness_shift
        )
    }
}

/// Clip every pixel of an LCh image onto the boundary.
pub fn clip_image(img: &ImagePlanar, dst: &GamutBoundary, policy: &ClipPolicy) -> (ImagePlanar, ClipReport) {
    let l_plane = img.channel("L");
    let c_plane = img.channel("C");
    let h_plane = img.channel("h");
    let n = l_plane.len();

    let mut out_l = l_plane.data.clone();
    let mut out_c = c_plane.data.clone();
    let mut moved = vec![false; n];
    let mut moved_count = 0usize;
    let mut sum_dc = 0.0;
    let mut max_dc = 0.0f64;
    let mut sum_dl = 0.0;
    let mut max_dl = 0.0f64;

    for i in 0..n {
        let p = LchColor { l: l_plane.data[i], c: c_plane.data[i], h: h_plane.data[i] };
        if dst.contains(&p) {
            continue;
        }
        let q = clip_pixel(&p, dst, policy);
        out_l[i] = q.l;
        out_c[i] = q.c;
        moved[i] = true;
        moved_count += 1;
        let dc = (q.c - p.c).abs();
        let dl = (q.l - p.l).abs();
        sum_dc += dc;
        max_dc = max_dc.max(dc);
        sum_dl += dl;
        max_dl = max_dl.max(dl);
    }

    let (w, h) = (img.width(), img.height());
    let out = ImagePlanar::lch(
        Plane::from_vec(w, h, out_l),
        Plane::from_vec(w, h, out_c),
        h_plane.clone(),
    );
    let denom = moved_count.max(1) as f64;
    let report = ClipReport {
        pixels_moved: moved_count,
        pixel_count: n,
        mean_chroma_shift: sum_dc / denom,
        max_chroma_shift: max_dc,
        mean_lightness_shift: sum_dl / denom,
        max_lightness_shift: max_dl,
        moved: Mask::from_vec(w, h, moved),
    };
    (out, report)
}

/// Baseline: clamp each linear RGB channel to [0, 1] independently.
///
/// Takes and returns display-referred XYZ (white Y = 100).
pub fn naive_rgb_clip(img: &ImagePlanar, prims: &Chromaticities) -> Result<ImagePlanar> {
    let m = rgb_to_xyz_matrix(prims)?;
    let m_inv = mat3_invert(&m).expect("matrix from valid primaries is invertible");
    let x = img.channel("X");
    let y = img.channel("Y");
    let z = img.channel("Z");
    let n = x.len();
    let mut ox = vec![0.0; n];
    let mut oy = vec![0.0; n];
    let mut oz = vec![0.0; n];
    for i in 0..n {
        let rgb = mat3_mul_vec(&m_inv, [x.data[i] / 100.0, y.data[i] / 100.0, z.data[i] / 100.0]);
        let clipped = [
            rgb[0].clamp(0.0, 1.0),
            rgb[1].clamp(0.0, 1.0),
            rgb[2].clamp(0.0, 1.0),
        ];
        let xyz = mat3_mul_vec(&m, clipped);
        ox[i] = xyz[0] * 100.0;
        oy[i] = xyz[1] * 100.0;
        oz[i] = xyz[2] * 100.0;
    }
    let (w, h) = (img.width(), img.height());
    Ok(ImagePlanar::xyz(
        Plane::from_vec(w, h, ox),
        Plane::from_vec(w, h, oy),
        Plane::from_vec(w, h, oz),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorspace::SRGB;
    use crate::gamut::build_target_boundary;

    fn boundary() -> GamutBoundary {
        build_target_boundary(&SRGB, 128).unwrap()
    }

    fn xorshift(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn in_gamut_pixel_untouched() {
        let dst = boundary();
        let p = LchColor::new(50.0, 20.0, 39.5);
        let q = clip_pixel(&p, &dst, &ClipPolicy::default());
        assert_eq!(p, q);
    }

    #[test]
    fn chroma_only_desaturates_near_top() {
        // pixel above the cusp apex with excess chroma: clipping at constant
        // lightness collapses chroma toward zero as L approaches 100
        let dst = boundary();
        let s = dst.slice(39.0);
        let p = LchColor::new(99.0, s.cusp_chroma * 1.2, 39.0);
        let q = clip_pixel(&p, &dst, &ClipPolicy { mode: ClipMode::ChromaOnly, weight: 0.5 });
        assert_eq!(q.l, 99.0);
        assert!(q.c < 0.05 * s.cusp_chroma, "chroma {} not collapsed", q.c);
    }

    #[test]
    fn lightness_only_keeps_chroma_below_cusp() {
        let dst = boundary();
        let s = dst.slice(39.0);
        let p = LchColor::new(99.0, s.cusp_chroma * 0.8, 39.0);
        let q = clip_pixel(&p, &dst, &ClipPolicy { mode: ClipMode::LightnessOnly, weight: 0.5 });
        assert_eq!(q.c, p.c);
        assert!(q.l < p.l);
        assert!(dst.contains(&q));
    }

    #[test]
    fn beyond_cusp_lightness_clip_lands_on_cusp() {
        let dst = boundary();
        let s = dst.slice(200.0);
        let p = LchColor::new(90.0, s.cusp_chroma * 1.5, 200.0);
        let q = clip_pixel(&p, &dst, &ClipPolicy { mode: ClipMode::LightnessOnly, weight: 0.5 });
        assert_eq!(q.c, s.cusp_chroma);
        assert_eq!(q.l, s.cusp_lightness);
    }

    #[test]
    fn interpolated_midpoint_above_white() {
        // L just above 100 at cusp chroma: targets are the top vertex (0,100)
        // and the cusp; the midpoint must be in gamut
        let dst = boundary();
        for hue in [0.0, 39.0, 103.0, 306.0] {
            let s = dst.slice(hue);
            let p = LchColor::new(100.0 + 1e-6, s.cusp_chroma, hue);
            let q = clip_pixel(&p, &dst, &ClipPolicy { mode: ClipMode::Interpolated, weight: 0.5 });
            assert!((q.c - s.cusp_chroma / 2.0).abs() < 1e-9);
            assert!((q.l - (100.0 + s.cusp_lightness) / 2.0).abs() < 1e-9);
            assert!(dst.contains(&q), "hue {hue}: {q:?}");
        }
    }

    #[test]
    fn interpolated_always_lands_in_gamut() {
        let dst = boundary();
        let mut state = 0xfeedfacedeadbeefu64;
        for _ in 0..20_000 {
            let p = LchColor::new(
                xorshift(&mut state) * 140.0 - 20.0,
                xorshift(&mut state) * 250.0,
                xorshift(&mut state) * 360.0,
            );
            for t in [0.0, 0.3, 0.5, 0.9, 1.0] {
                let q = clip_pixel(&p, &dst, &ClipPolicy { mode: ClipMode::Interpolated, weight: t });
                assert!(dst.contains(&q), "p {p:?} t {t} -> {q:?}");
            }
        }
    }

    #[test]
    fn interpolated_displacement_between_extremes() {
        let dst = boundary();
        let mut state = 0xabcdef0123456789u64;
        for _ in 0..5000 {
            let p = LchColor::new(
                xorshift(&mut state) * 120.0,
                xorshift(&mut state) * 200.0,
                xorshift(&mut state) * 360.0,
            );
            if dst.contains(&p) {
                continue;
            }
            let qc = clip_pixel(&p, &dst, &ClipPolicy { mode: ClipMode::ChromaOnly, weight: 0.5 });
            let ql = clip_pixel(&p, &dst, &ClipPolicy { mode: ClipMode::LightnessOnly, weight: 0.5 });
            let qi = clip_pixel(&p, &dst, &ClipPolicy { mode: ClipMode::Interpolated, weight: 0.5 });
            let (lo_c, hi_c) = (qc.c.min(ql.c), qc.c.max(ql.c));
            let (lo_l, hi_l) = (qc.l.min(ql.l), qc.l.max(ql.l));
            assert!(qi.c >= lo_c - 1e-12 && qi.c <= hi_c + 1e-12);
            assert!(qi.l >= lo_l - 1e-12 && qi.l <= hi_l + 1e-12);
        }
    }

    fn oversaturated_image(w: usize, h: usize) -> ImagePlanar {
        ImagePlanar::lch(
            Plane::from_fn(w, h, |x, y| 5.0 + ((x + y * w) % 97) as f64 * 1.1),
            Plane::from_fn(w, h, |x, y| ((x * y) % 180) as f64 * 1.4),
            Plane::from_fn(w, h, |x, y| ((x * 31 + y * 17) % 360) as f64),
        )
    }

    #[test]
    fn clip_image_fully_in_gamut_is_bit_identical() {
        let dst = boundary();
        let img = ImagePlanar::lch(
            Plane::filled(16, 16, 50.0),
            Plane::filled(16, 16, 10.0),
            Plane::from_fn(16, 16, |x, y| ((x + y * 23) % 360) as f64),
        );
        let (out, report) = clip_image(&img, &dst, &ClipPolicy::default());
        assert_eq!(report.pixels_moved, 0);
        assert_eq!(out, img);
    }

    #[test]
    fn clip_image_result_all_contained() {
        let dst = boundary();
        let img = oversaturated_image(64, 48);
        let (out, report) = clip_image(&img, &dst, &ClipPolicy::default());
        assert!(report.pixels_moved > 0);
        let l = out.channel("L");
        let c = out.channel("C");
        let h = out.channel("h");
        for i in 0..l.len() {
            let p = LchColor { l: l.data[i], c: c.data[i], h: h.data[i] };
            assert!(dst.contains(&p), "{p:?}");
        }
    }

    #[test]
    fn clip_image_hue_plane_bit_identical() {
        let dst = boundary();
        let img = oversaturated_image(32, 32);
        let (out, _) = clip_image(&img, &dst, &ClipPolicy::default());
        assert_eq!(out.channel("h").data, img.channel("h").data);
    }

    #[test]
    fn clip_image_idempotent() {
        let dst = boundary();
        let img = oversaturated_image(48, 32);
        for mode in [ClipMode::ChromaOnly, ClipMode::LightnessOnly, ClipMode::Interpolated] {
            let policy = ClipPolicy { mode, weight: 0.5 };
            let (once, _) = clip_image(&img, &dst, &policy);
            let (twice, report) = clip_image(&once, &dst, &policy);
            assert_eq!(report.pixels_moved, 0, "{mode:?} moved pixels on second pass");
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn lightness_only_never_changes_chroma_within_cusp() {
        let dst = boundary();
        let img = ImagePlanar::lch(
            Plane::from_fn(24, 24, |x, _| 90.0 + x as f64 * 0.4),
            Plane::from_fn(24, 24, |_, y| y as f64 * 1.5),
            Plane::filled(24, 24, 39.0),
        );
        // chroma kept below the slice cusp so the constant-chroma boundary
        // point always exists
        let policy = ClipPolicy { mode: ClipMode::LightnessOnly, weight: 0.5 };
        let (out, _) = clip_image(&img, &dst, &policy);
        assert_eq!(out.channel("C").data, img.channel("C").data);
    }

    #[test]
    fn naive_clip_is_identity_inside_cube() {
        let img = ImagePlanar::xyz(
            Plane::filled(4, 4, 30.0),
            Plane::filled(4, 4, 35.0),
            Plane::filled(4, 4, 25.0),
        );
        let out = naive_rgb_clip(&img, &SRGB).unwrap();
        for ch in ["X", "Y", "Z"] {
            for (a, b) in out.channel(ch).data.iter().zip(&img.channel(ch).data) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
