//! Cusp-aligned lightness compression: the LCh-native alternative to a
//! separate tone mapping operator. Prints the fitted per-slice curve
//! parameters and a tone-curve table for one slice.
//!
//! Run: cargo run --release --example cusp_lightness

use hdr_gamut::colorspace::{white_xyz, SRGB};
use hdr_gamut::gamut::build_target_boundary;
use hdr_gamut::pipeline::{anchor_log_average, xyz_image_to_lch};
use hdr_gamut::synth;
use hdr_gamut::tone::{cusp_aligned_tmo, sample_tone_curve, CompressionCurve};

fn main() {
    let boundary = build_target_boundary(&SRGB, 512).expect("valid primaries");
    let white = white_xyz(&SRGB, 100.0);

    let hdr = anchor_log_average(&synth::window_room(512, 384));
    let lch = xyz_image_to_lch(&hdr, white);
    println!(
        "anchored HDR lightness range: {:.2} .. {:.2}",
        lch.channel("L").min_value(),
        lch.channel("L").max_value()
    );

    let (compressed, params) = cusp_aligned_tmo(&lch, &boundary, 0.99, CompressionCurve::Log1p, false);
    println!(
        "compressed lightness range: {:.2} .. {:.2}\n",
        compressed.channel("L").min_value(),
        compressed.channel("L").max_value()
    );

    println!("fitted parameters (every 45 degrees):");
    println!("hue  overshoot_top  l_mid  ceiling");
    for bin in (0..360).step_by(45) {
        let p = &params[bin];
        println!("{bin:>3}  {:>13.2}  {:>5.2}  {:>7.2}", p.overshoot_top, p.l_mid, p.ceiling);
    }

    let bin = 220;
    let p = &params[bin];
    println!("\ntone curve for hue slice {bin} (achromatic vs at-cusp chroma):");
    println!("input_l  out_c0  out_cusp");
    let top = p.ceiling + p.overshoot_top.max(1.0);
    let at_zero = sample_tone_curve(p, 0.0, top, 9);
    let at_cusp = sample_tone_curve(p, p.cusp_chroma, top, 9);
    for (a, b) in at_zero.iter().zip(&at_cusp) {
        println!("{:>7.2}  {:>6.2}  {:>8.2}", a.0, a.1, b.1);
    }
}
