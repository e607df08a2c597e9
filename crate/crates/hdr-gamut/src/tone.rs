//! Luminance and lightness compression.
//!
//! Two routes to a display-referred lightness range: the global photographic
//! operator applied on luminance in XYZ, or cusp-aligned lightness
//! compression which works directly on the LCh lightness channel with the
//! same base/detail machinery as the chroma stage.

use crate::error::{Error, Result};
use crate::gamut::{hue_bin, GamutBoundary, SourceGamut, HUE_BINS};
use crate::imaging::{decompose_divide, ImagePlanar, Plane};

/// Nonlinear compression applied above the split lightness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompressionCurve {
    /// F(x) = ln(1 + x). Parameter-free, concave, F(0) = 0.
    #[default]
    Log1p,
    /// F(x) = sqrt(x).
    Sqrt,
}

impl CompressionCurve {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CompressionCurve::Log1p => x.max(0.0).ln_1p(),
            CompressionCurve::Sqrt => x.max(0.0).sqrt(),
        }
    }
}

/// Tone mapper selection for the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToneMapper {
    /// Global photographic operator on luminance, `key` is the exposure
    /// parameter (commonly 0.18).
    Photographic { key: f64 },
    /// Cusp-aligned lightness compression in LCh. `global_sg` uses one
    /// image-wide overshoot pair instead of per-slice overshoots.
    CuspAligned { curve: CompressionCurve, global_sg: bool },
}

impl Default for ToneMapper {
    fn default() -> Self {
        ToneMapper::Photographic { key: 0.18 }
    }
}

/// Global photographic luminance compression.
///
/// The curve runs on Y only; per-pixel chromaticities are untouched. The
/// result is normalized so the maximum Y is exactly 100.
pub fn photographic_tmo(img: &ImagePlanar, key: f64) -> Result<ImagePlanar> {
    assert!(key > 0.0, "photographic key must be positive");
    let y_plane = img.channel("Y");

    // geometric mean over positive luminances keeps the operator exactly
    // invariant to uniform exposure scaling
    let mut log_sum = 0.0;
    let mut positive = 0usize;
    for &y in &y_plane.data {
        if y > 0.0 {
            log_sum += y.ln();
            positive += 1;
        }
    }
    if positive == 0 {
        return Err(Error::BlackImage);
    }
    let log_avg = (log_sum / positive as f64).exp();
    let exposure = key / log_avg;

    let scaled: Vec<f64> = y_plane.data.iter().map(|&y| (y.max(0.0)) * exposure).collect();
    let l_white = scaled.iter().copied().fold(0.0f64, f64::max);
    let lw2 = l_white * l_white;

    let x_plane = img.channel("X");
    let z_plane = img.channel("Z");
    let n = y_plane.len();
    let mut out_x = vec![0.0; n];
    let mut out_y = vec![0.0; n];
    let mut out_z = vec![0.0; n];
    let mut max_y = 0.0f64;
    for i in 0..n {
        let y = y_plane.data[i];
        if y <= 0.0 {
            continue;
        }
        let lm = scaled[i];
        let ld = lm * (1.0 + lm / lw2) / (1.0 + lm);
        // replacing Y and converting back through Yxy is a per-pixel
        // uniform scale of XYZ by ld / Y
        let f = ld / y;
        out_x[i] = x_plane.data[i] * f;
        out_y[i] = ld;
        out_z[i] = z_plane.data[i] * f;
        max_y = max_y.max(ld);
    }

    let norm = 100.0 / max_y;
    for i in 0..n {
        out_x[i] *= norm;
        out_y[i] *= norm;
        out_z[i] *= norm;
    }

    let (w, h) = (img.width(), img.height());
    Ok(ImagePlanar::xyz(
        Plane::from_vec(w, h, out_x),
        Plane::from_vec(w, h, out_y),
        Plane::from_vec(w, h, out_z),
    ))
}

/// Per-hue-slice parameters of the cusp-aligned lightness curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightnessCurveParams {
    /// Maximum source overshoot above the destination slice ceiling.
    pub overshoot_top: f64,
    /// Maximum source undershoot below the destination slice floor.
    pub overshoot_bottom: f64,
    /// Split lightness between the linear bottom ramp and the nonlinear top.
    pub l_mid: f64,
    /// Normalization `F(ceiling + overshoot_top - l_mid)`; zero means the
    /// top branch is the identity.
    pub top_norm: f64,
    /// Destination slice lightness ceiling (cusp lightness).
    pub ceiling: f64,
    /// Destination slice lightness floor.
    pub floor: f64,
    /// Destination slice cusp chroma, used by the chroma-dependent weight.
    pub cusp_chroma: f64,
    pub curve: CompressionCurve,
}

impl LightnessCurveParams {
    /// Identity parameters for a destination slice (no compression).
    pub fn identity(ceiling: f64, floor: f64, cusp_chroma: f64, curve: CompressionCurve) -> Self {
        LightnessCurveParams {
            overshoot_top: 0.0,
            overshoot_bottom: 0.0,
            l_mid: ceiling,
            top_norm: 0.0,
            ceiling,
            floor,
            cusp_chroma,
            curve,
        }
    }
}

/// Fit curve parameters from explicit overshoots.
pub fn fit_lightness_params_with(
    dst: &GamutBoundary,
    bin: usize,
    overshoot_top: f64,
    overshoot_bottom: f64,
    curve: CompressionCurve,
) -> LightnessCurveParams {
    let slice = &dst.slices()[bin];
    let ceiling = slice.lightness_ceiling();
    let floor = slice.lightness_floor();
    let (sg_t, sg_b) = (overshoot_top.max(0.0), overshoot_bottom.max(0.0));
    let l_mid = if sg_t + sg_b == 0.0 {
        ceiling
    } else {
        floor + (ceiling - floor) * sg_b / (sg_t + sg_b)
    };
    let arg = ceiling + sg_t - l_mid;
    let top_norm = if arg > 0.0 { curve.eval(arg) } else { 0.0 };
    LightnessCurveParams {
        overshoot_top: sg_t,
        overshoot_bottom: sg_b,
        l_mid,
        top_norm,
        ceiling,
        floor,
        cusp_chroma: slice.cusp_chroma,
        curve,
    }
}

/// Fit curve parameters for one hue slice from source-gamut lightness
/// statistics. An empty source slice yields identity parameters.
pub fn fit_lightness_params(
    src: &SourceGamut,
    dst: &GamutBoundary,
    bin: usize,
    curve: CompressionCurve,
) -> LightnessCurveParams {
    let slice = &dst.slices()[bin];
    match src.slices()[bin] {
        None => LightnessCurveParams::identity(
            slice.lightness_ceiling(),
            slice.lightness_floor(),
            slice.cusp_chroma,
            curve,
        ),
        Some(s) => {
            let sg_t = (s.l_max - slice.lightness_ceiling()).max(0.0);
            let sg_b = (slice.lightness_floor() - s.l_min).max(0.0);
            fit_lightness_params_with(dst, bin, sg_t, sg_b, curve)
        }
    }
}

/// Evaluate the composite lightness curve at lightness `l` with pixel
/// chroma `c`.
///
/// Above the split a nonlinear curve compresses toward a ceiling that is
/// interpolated between the slice cusp lightness (achromatic pixels) and 100
/// (chromatic pixels); below the split a linear ramp maps
/// `[floor - overshoot_bottom, l_mid]` onto `[floor, l_mid]`. High-chroma,
/// high-lightness pixels may land above the slice boundary and are handled
/// by the clipping stage.
#[inline]
pub fn compress_lightness(l: f64, c: f64, params: &LightnessCurveParams) -> f64 {
    if l > params.l_mid {
        if params.top_norm <= 0.0 {
            return l;
        }
        let w = c / (c + params.cusp_chroma);
        let target = (1.0 - w) * (params.ceiling - params.l_mid) + w * (100.0 - params.l_mid);
        let slope = target / params.top_norm;
        params.l_mid + slope * params.curve.eval(l - params.l_mid)
    } else {
        let span = params.l_mid - params.floor;
        let denom = span + params.overshoot_bottom;
        if denom <= 0.0 {
            return l;
        }
        params.floor + span / denom * (l - (params.floor - params.overshoot_bottom))
    }
}

/// Samples of the per-slice tone curve: `(input lightness, output lightness)`
/// pairs at the given pixel chroma.
pub fn sample_tone_curve(
    params: &LightnessCurveParams,
    c: f64,
    l_max: f64,
    samples: usize,
) -> Vec<(f64, f64)> {
    (0..samples)
        .map(|i| {
            let l = l_max * i as f64 / (samples - 1) as f64;
            (l, compress_lightness(l, c, params))
        })
        .collect()
}

/// Cusp-aligned lightness compression of an HDR LCh image.
///
/// The lightness channel is split into bilateral base and detail; curve
/// parameters are fitted per hue slice from the base layer at `pct`, the
/// base is compressed, and detail re-injected multiplicatively. Returns the
/// compressed image and the fitted per-slice parameters.
pub fn cusp_aligned_tmo(
    img: &ImagePlanar,
    dst: &GamutBoundary,
    pct: f64,
    curve: CompressionCurve,
    global_sg: bool,
) -> (ImagePlanar, Vec<LightnessCurveParams>) {
    let decomposed = decompose_divide(img.channel("L"));

    let mut base_img = img.clone();
    base_img.replace_channel("L", decomposed.base.clone());
    let src = crate::gamut::build_source_gamut(&base_img, pct);

    let mut params: Vec<LightnessCurveParams> = (0..HUE_BINS)
        .map(|bin| fit_lightness_params(&src, dst, bin, curve))
        .collect();

    if global_sg {
        let sg_t = params.iter().map(|p| p.overshoot_top).fold(0.0, f64::max);
        let sg_b = params.iter().map(|p| p.overshoot_bottom).fold(0.0, f64::max);
        params = (0..HUE_BINS)
            .map(|bin| fit_lightness_params_with(dst, bin, sg_t, sg_b, curve))
            .collect();
    }

    let h_plane = img.channel("h");
    let c_plane = img.channel("C");
    let n = h_plane.len();
    let mut out_l = vec![0.0; n];
    for i in 0..n {
        let p = &params[hue_bin(h_plane.data[i])];
        let compressed = compress_lightness(decomposed.base.data[i], c_plane.data[i], p);
        out_l[i] = compressed * decomposed.detail.data[i];
    }

    let mut out = img.clone();
    out.replace_channel("L", Plane::from_vec(img.width(), img.height(), out_l));
    (out, params)
}
