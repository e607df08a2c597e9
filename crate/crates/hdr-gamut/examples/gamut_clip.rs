//! The three clipping trade-offs on the same out-of-gamut image: chroma-only
//! desaturates bright pixels, lightness-only darkens them, the interpolated
//! middle ground balances both.
//!
//! Run: cargo run --release --example gamut_clip

use hdr_gamut::clip::{clip_image, ClipMode, ClipPolicy};
use hdr_gamut::colorspace::{white_xyz, SRGB};
use hdr_gamut::gamut::build_target_boundary;
use hdr_gamut::metrics::oog_fraction;
use hdr_gamut::pipeline::xyz_image_to_lch;
use hdr_gamut::synth;

fn main() {
    let boundary = build_target_boundary(&SRGB, 512).expect("valid primaries");
    let white = white_xyz(&SRGB, 100.0);
    let img = xyz_image_to_lch(&synth::oversaturated_sweep(512, 256), white);
    println!("out-of-gamut before clipping: {:.2}%\n", 100.0 * oog_fraction(&img, &boundary));

    for (name, mode) in [
        ("chroma-only", ClipMode::ChromaOnly),
        ("lightness-only", ClipMode::LightnessOnly),
        ("interpolated t=0.5", ClipMode::Interpolated),
    ] {
        let policy = ClipPolicy { mode, weight: 0.5 };
        let (out, report) = clip_image(&img, &boundary, &policy);
        println!("{name}:");
        println!("  moved {} of {} pixels", report.pixels_moved, report.pixel_count);
        println!(
            "  chroma shift mean {:.2} max {:.2}; lightness shift mean {:.2} max {:.2}",
            report.mean_chroma_shift,
            report.max_chroma_shift,
            report.mean_lightness_shift,
            report.max_lightness_shift
        );
        println!("  out-of-gamut after: {:.4}%\n", 100.0 * oog_fraction(&out, &boundary));
    }
}
