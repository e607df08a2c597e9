//! Tone map a procedural HDR scene with the photographic operator and write
//! the (uncorrected) result as PNG.
//!
//! Run: cargo run --release --example tone_map

use hdr_gamut::codec::save_png_srgb;
use hdr_gamut::colorspace::SRGB;
use hdr_gamut::synth;
use hdr_gamut::tone::photographic_tmo;

fn main() {
    let hdr = synth::sunset(640, 480);
    let y = hdr.channel("Y");
    println!(
        "input luminance range: {:.4} .. {:.1}",
        y.data.iter().copied().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min),
        y.max_value()
    );

    let mapped = photographic_tmo(&hdr, 0.18).expect("scene has light");
    println!("tone-mapped max Y: {:.6}", mapped.channel("Y").max_value());

    let out = std::path::Path::new("tone_map.png");
    save_png_srgb(out, &mapped, &SRGB).expect("write png");
    println!("wrote {} (note the oversaturated look; see full_pipeline)", out.display());
}
