//! Compare hue-specific and global chroma compression on an oversaturated
//! image: per-hue scale factors, the global cusp ratio, and the out-of-gamut
//! fraction each method leaves for the clipping stage.
//!
//! Run: cargo run --release --example chroma_compression

use hdr_gamut::chroma::{
    apply_global, apply_hue_specific, compute_scale_vector, global_scale, select_percentile,
    PercentilePolicy, ScaleVector,
};
use hdr_gamut::colorspace::SRGB;
use hdr_gamut::gamut::{build_source_gamut, build_target_boundary};
use hdr_gamut::imaging::decompose_divide;
use hdr_gamut::metrics::oog_fraction;
use hdr_gamut::pipeline::xyz_image_to_lch;
use hdr_gamut::{colorspace::white_xyz, synth};

fn main() {
    let boundary = build_target_boundary(&SRGB, 512).expect("valid primaries");
    let white = white_xyz(&SRGB, 100.0);

    let img = xyz_image_to_lch(&synth::oversaturated_sweep(512, 256), white);
    println!("out-of-gamut before compression: {:.2}%", 100.0 * oog_fraction(&img, &boundary));

    let policy = PercentilePolicy::default();
    let pct = select_percentile(&img, &boundary, &policy);
    println!("spread heuristic picked percentile {pct}");

    // both methods compress the bilateral base layer of the chroma channel
    let decomposed = decompose_divide(img.channel("C"));
    let mut base_img = img.clone();
    base_img.replace_channel("C", decomposed.base);

    let raw = compute_scale_vector(&base_img, &boundary, pct, 0.1);
    let sv = ScaleVector::from_raw(raw, 0.1);
    let hue_specific = apply_hue_specific(&img, &sv.smoothed);
    println!(
        "hue-specific: max scale {:.2}, out-of-gamut after: {:.2}%",
        sv.smoothed.iter().copied().fold(f64::MIN, f64::max),
        100.0 * oog_fraction(&hue_specific, &boundary)
    );

    let src = build_source_gamut(&base_img, pct);
    let global = apply_global(&img, &src, &boundary);
    println!(
        "global: cusp-ratio scale {:.4}, out-of-gamut after: {:.2}%",
        global_scale(&src, &boundary),
        100.0 * oog_fraction(&global, &boundary)
    );

    println!("\nper-hue scale factors (every 30 degrees):");
    println!("hue  raw   smoothed");
    for i in (0..360).step_by(30) {
        println!("{i:>3}  {:>4.2}  {:>7.3}", sv.raw[i], sv.smoothed[i]);
    }
}
