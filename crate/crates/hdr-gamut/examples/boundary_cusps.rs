//! Build the sRGB gamut boundary and print its cusp table.
//!
//! Run: cargo run --release --example boundary_cusps

use hdr_gamut::colorspace::SRGB;
use hdr_gamut::gamut::build_target_boundary;

fn main() {
    let boundary = build_target_boundary(&SRGB, 512).expect("valid sRGB primaries");

    println!("hue  cusp_chroma  cusp_lightness");
    for slice in boundary.slices().iter().step_by(15) {
        println!(
            "{:>3}  {:>11.3}  {:>14.3}",
            slice.hue, slice.cusp_chroma, slice.cusp_lightness
        );
    }

    let widest = boundary
        .slices()
        .iter()
        .max_by(|a, b| a.cusp_chroma.total_cmp(&b.cusp_chroma))
        .unwrap();
    println!(
        "\nwidest slice: hue {} with cusp chroma {:.2} at lightness {:.2}",
        widest.hue, widest.cusp_chroma, widest.cusp_lightness
    );

    // boundary queries
    for l in [10.0, 30.0, 53.0, 75.0, 95.0] {
        let c = boundary.max_chroma_at(40.0, l).unwrap();
        println!("max chroma at hue 40, L {l:>4.1}: {c:.2}");
    }
}
