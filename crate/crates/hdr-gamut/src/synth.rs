//! Deterministic procedural test scenes in linear XYZ.
//!
//! Used by the examples and the acceptance suite; no image assets ship with
//! the crate. Scenes cover the regimes the pipeline has to handle: multi
//! decade dynamic range, saturated emitters, concentrated vs. scattered
//! out-of-gamut content, and degenerate flat inputs.

use crate::colorspace::{lch_to_xyz, mat3_mul_vec, rgb_to_xyz_matrix, white_xyz, LchColor, SRGB};
use crate::imaging::{ImagePlanar, Plane};

fn from_rgb_fn(w: usize, h: usize, f: impl Fn(f64, f64) -> [f64; 3]) -> ImagePlanar {
    let m = rgb_to_xyz_matrix(&SRGB).expect("sRGB primaries are valid");
    let mut x = Vec::with_capacity(w * h);
    let mut y = Vec::with_capacity(w * h);
    let mut z = Vec::with_capacity(w * h);
    for py in 0..h {
        for px in 0..w {
            let u = px as f64 / (w - 1).max(1) as f64;
            let v = py as f64 / (h - 1).max(1) as f64;
            let rgb = f(u, v);
            let xyz = mat3_mul_vec(&m, rgb);
            x.push(xyz[0]);
            y.push(xyz[1]);
            z.push(xyz[2]);
        }
    }
    ImagePlanar::xyz(
        Plane::from_vec(w, h, x),
        Plane::from_vec(w, h, y),
        Plane::from_vec(w, h, z),
    )
}

// hash-based value noise, deterministic across platforms
fn noise(px: f64, py: f64, seed: u64) -> f64 {
    let xi = (px * 4096.0) as i64 as u64;
    let yi = (py * 4096.0) as i64 as u64;
    let mut s = seed ^ xi.wrapping_mul(0x9e3779b97f4a7c15) ^ yi.wrapping_mul(0xc2b2ae3d27d4eb4f);
    s ^= s >> 33;
    s = s.wrapping_mul(0xff51afd7ed558ccd);
    s ^= s >> 33;
    (s >> 11) as f64 / (1u64 << 53) as f64
}

/// Low sun over a saturated sky gradient: smooth 4-decade range with a
/// compact extreme highlight.
pub fn sunset(w: usize, h: usize) -> ImagePlanar {
    from_rgb_fn(w, h, |u, v| {
        let horizon = 0.62;
        if v < horizon {
            // sky: warm near the horizon, deep blue above
            let t = v / horizon;
            let sky = [
                0.9 * t * t + 0.03,
                0.35 * t * t + 0.04,
                0.15 * t + 0.25 * (1.0 - t),
            ];
            let d2 = (u - 0.7) * (u - 0.7) + (v - 0.5) * (v - 0.5) * 4.0;
            let sun = 400.0 * (-d2 * 600.0).exp();
            let glow = 6.0 * (-d2 * 40.0).exp();
            [
                sky[0] * 2.0 + sun + glow,
                sky[1] * 2.0 + sun * 0.82 + glow * 0.7,
                sky[2] * 2.0 + sun * 0.45 + glow * 0.3,
            ]
        } else {
            // foreground in shadow
            let g = 0.02 + 0.015 * noise(u, v, 11);
            [g * 1.1, g, g * 0.7]
        }
    })
}

/// Dark street with a few saturated emissive signs: out-of-gamut pixels sit
/// in a handful of compact regions.
pub fn neon_night(w: usize, h: usize) -> ImagePlanar {
    let signs: [(f64, f64, [f64; 3]); 4] = [
        (0.2, 0.3, [30.0, 0.4, 0.6]),
        (0.65, 0.25, [0.5, 28.0, 2.0]),
        (0.45, 0.7, [24.0, 0.2, 26.0]),
        (0.85, 0.6, [0.3, 3.0, 32.0]),
    ];
    from_rgb_fn(w, h, |u, v| {
        let base = 0.01 + 0.008 * noise(u, v, 42);
        let mut rgb = [base, base, base * 1.2];
        for (cx, cy, color) in signs {
            let d2 = (u - cx) * (u - cx) + (v - cy) * (v - cy);
            if d2 < 0.004 {
                rgb = color;
            } else {
                let glow = (-d2 * 250.0).exp();
                rgb[0] += color[0] * glow * 0.1;
                rgb[1] += color[1] * glow * 0.1;
                rgb[2] += color[2] * glow * 0.1;
            }
        }
        rgb
    })
}

/// Dim interior with a bright window: the classic tone-mapping stress case.
pub fn window_room(w: usize, h: usize) -> ImagePlanar {
    from_rgb_fn(w, h, |u, v| {
        let in_window = (0.55..0.9).contains(&u) && (0.15..0.6).contains(&v);
        if in_window {
            let sky = 80.0 + 40.0 * (1.0 - v);
            [sky * 0.75, sky * 0.85, sky]
        } else {
            let wall = 0.15 + 0.1 * noise(u, v, 7);
            let lamp = 2.0 * (-((u - 0.15) * (u - 0.15) + (v - 0.35) * (v - 0.35)) * 60.0).exp();
            [
                wall * 0.9 + lamp,
                wall * 0.75 + lamp * 0.8,
                wall * 0.55 + lamp * 0.5,
            ]
        }
    })
}

/// Backlit saturated tiles: out-of-gamut pixels scattered over the whole
/// frame.
pub fn stained_glass(w: usize, h: usize) -> ImagePlanar {
    let palette: [[f64; 3]; 6] = [
        [1.0, 0.02, 0.02],
        [0.02, 0.9, 0.05],
        [0.05, 0.08, 1.0],
        [1.0, 0.75, 0.02],
        [0.85, 0.02, 0.9],
        [0.02, 0.85, 0.9],
    ];
    from_rgb_fn(w, h, |u, v| {
        let tx = (u * 8.0) as usize;
        let ty = (v * 6.0) as usize;
        let lead = (u * 8.0).fract() < 0.06 || (v * 6.0).fract() < 0.08;
        if lead {
            return [0.02, 0.02, 0.02];
        }
        let c = palette[(tx * 3 + ty * 5) % palette.len()];
        let backlight = 1.5 + 30.0 * noise(tx as f64 * 0.1, ty as f64 * 0.1, 99);
        [c[0] * backlight, c[1] * backlight, c[2] * backlight]
    })
}

/// Saturated patch chart under an exposure sweep.
pub fn color_checker_hdr(w: usize, h: usize) -> ImagePlanar {
    let patches: [[f64; 3]; 8] = [
        [0.9, 0.12, 0.1],
        [0.1, 0.8, 0.15],
        [0.12, 0.15, 0.85],
        [0.9, 0.85, 0.1],
        [0.85, 0.1, 0.8],
        [0.1, 0.8, 0.8],
        [0.95, 0.45, 0.1],
        [0.5, 0.5, 0.5],
    ];
    from_rgb_fn(w, h, |u, v| {
        let col = (u * 4.0) as usize % 4;
        let row = (v * 2.0) as usize % 2;
        let c = patches[row * 4 + col];
        // exposure sweeps two decades left to right within each patch
        let e = 0.2 * 100.0f64.powf((u * 4.0).fract());
        [c[0] * e, c[1] * e, c[2] * e]
    })
}

/// Achromatic exposure ramp over five decades.
pub fn gray_ramp(w: usize, h: usize) -> ImagePlanar {
    from_rgb_fn(w, h, |u, _| {
        let y = 0.001 * 100000.0f64.powf(u);
        [y, y, y]
    })
}

/// Constant image at the given linear RGB value.
pub fn constant_rgb(w: usize, h: usize, rgb: [f64; 3]) -> ImagePlanar {
    from_rgb_fn(w, h, move |_, _| rgb)
}

/// Display-referred LCh sweep with chroma pushed past the sRGB boundary;
/// returns XYZ with white Y = 100. Exercises chroma compression and clipping
/// without any tone mapping.
pub fn oversaturated_sweep(w: usize, h: usize) -> ImagePlanar {
    let white = white_xyz(&SRGB, 100.0);
    let mut x = Vec::with_capacity(w * h);
    let mut y = Vec::with_capacity(w * h);
    let mut z = Vec::with_capacity(w * h);
    for py in 0..h {
        for px in 0..w {
            let u = px as f64 / (w - 1).max(1) as f64;
            let v = py as f64 / (h - 1).max(1) as f64;
            let color = LchColor::new(15.0 + 80.0 * v, 160.0 * u, (u * 360.0 * 3.0) % 360.0);
            let xyz = lch_to_xyz(&color, white);
            x.push(xyz[0]);
            y.push(xyz[1]);
            z.push(xyz[2]);
        }
    }
    ImagePlanar::xyz(
        Plane::from_vec(w, h, x),
        Plane::from_vec(w, h, y),
        Plane::from_vec(w, h, z),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenes_are_finite_and_hdr() {
        for (name, img) in [
            ("sunset", sunset(64, 48)),
            ("neon_night", neon_night(64, 48)),
            ("window_room", window_room(64, 48)),
            ("stained_glass", stained_glass(64, 48)),
            ("color_checker_hdr", color_checker_hdr(64, 48)),
            ("gray_ramp", gray_ramp(64, 8)),
        ] {
            assert!(img.is_finite(), "{name} has non-finite samples");
            let ymax = img.channel("Y").max_value();
            let ymin = img.channel("Y").min_value();
            assert!(ymax > 0.0, "{name} is black");
            assert!(ymin >= 0.0, "{name} has negative luminance");
        }
        // dynamic range sanity for the scene generators used as HDR stand-ins
        for (name, img, decades) in [
            ("sunset", sunset(128, 96), 3.0),
            ("neon_night", neon_night(128, 96), 3.0),
            ("window_room", window_room(128, 96), 2.5),
        ] {
            let y = img.channel("Y");
            let mut lo = f64::INFINITY;
            for &v in &y.data {
                if v > 0.0 {
                    lo = lo.min(v);
                }
            }
            let range = (y.max_value() / lo).log10();
            assert!(range >= decades, "{name} spans only {range:.2} decades");
        }
    }

    #[test]
    fn scenes_are_deterministic() {
        let a = sunset(32, 32);
        let b = sunset(32, 32);
        assert_eq!(a, b);
    }
}
