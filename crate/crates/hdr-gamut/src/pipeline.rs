//! The full workflow: tone mapping, chroma compression, gamut clipping,
//! output encoding, and diagnostics.
//!
//! Stage order: the HDR input is tone mapped, converted to LCh (or the other
//! way around on the cusp-aligned path), chroma is compressed against the
//! target boundary, residual out-of-gamut pixels are clipped, and the result
//! is encoded to an sRGB PNG. Hue is written once, at the first LCh
//! conversion, and never again.

use std::path::{Path, PathBuf};

use crate::chroma::{
    apply_global, apply_hue_specific, compute_scale_vector, global_scale, select_percentile,
    out_of_gamut_mask, PercentilePolicy, ScaleVector, DEFAULT_INCREMENT,
};
use crate::clip::{clip_image, ClipPolicy, ClipReport};
use crate::codec::{
    load_hdr, save_false_color_png, save_mask_png, save_png_srgb, write_text_file,
};
use crate::colorspace::{lch_to_xyz, white_xyz, xyz_to_lch, Chromaticities, LchColor, SRGB};
use crate::error::{Error, Result};
use crate::gamut::{build_source_gamut, build_target_boundary, GamutBoundary};
use crate::imaging::{decompose_divide, ImagePlanar, Plane};
use crate::metrics::{hue_diff_image, oog_fraction, HueDiffReport};
use crate::tone::{
    cusp_aligned_tmo, photographic_tmo, sample_tone_curve, LightnessCurveParams, ToneMapper,
};

/// Chroma compression method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChromaMethod {
    #[default]
    HueSpecific,
    Global,
    None,
}

/// How HDR lightness is anchored before LAB conversion on the cusp-aligned
/// path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HdrAnchor {
    /// Scale the input so the log-average luminance lands at L* = 50.
    #[default]
    LogAverageL50,
}

/// Everything `run_pipeline` needs.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub tmo: ToneMapper,
    pub chroma: ChromaMethod,
    /// `None` disables the clipping stage.
    pub clip: Option<ClipPolicy>,
    pub policy: PercentilePolicy,
    /// Target gamut primaries and white point.
    pub target: Chromaticities,
    pub anchor: HdrAnchor,
    /// Directory for diagnostic dumps; `None` disables them.
    pub diagnostics_dir: Option<PathBuf>,
    /// Grid increment for the hue-specific scale search.
    pub scale_increment: f64,
    /// Samples per cube edge for the target boundary.
    pub boundary_samples: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::new(),
            output: PathBuf::new(),
            tmo: ToneMapper::default(),
            chroma: ChromaMethod::default(),
            clip: Some(ClipPolicy::default()),
            policy: PercentilePolicy::default(),
            target: SRGB,
            anchor: HdrAnchor::default(),
            diagnostics_dir: None,
            scale_increment: DEFAULT_INCREMENT,
            boundary_samples: 512,
        }
    }
}

/// Results and diagnostics of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Display-referred XYZ of the final image (white Y = 100).
    pub final_xyz: ImagePlanar,
    /// Final image in LCh.
    pub final_lch: ImagePlanar,
    /// The image at the first LCh conversion (after the tone stage); its hue
    /// plane is the reference the pipeline must carry through unchanged.
    pub initial_lch: ImagePlanar,
    /// Tone-mapped, uncorrected XYZ: the hue-difference baseline.
    pub baseline_xyz: ImagePlanar,
    pub boundary: GamutBoundary,
    pub oog_after_tone: f64,
    pub oog_after_chroma: f64,
    pub oog_final: f64,
    /// Percentile chosen by the spread heuristic for the chroma stage.
    pub percentile_used: f64,
    pub scale_vector: Option<ScaleVector>,
    pub global_scale: Option<f64>,
    pub clip_report: Option<ClipReport>,
    pub tone_params: Option<Vec<LightnessCurveParams>>,
    pub hue_diff: HueDiffReport,
}

/// Convert an XYZ image to LCh relative to `white`.
pub fn xyz_image_to_lch(img: &ImagePlanar, white: [f64; 3]) -> ImagePlanar {
    let x = img.channel("X");
    let y = img.channel("Y");
    let z = img.channel("Z");
    let n = x.len();
    let mut l = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    for i in 0..n {
        let v = xyz_to_lch([x.data[i], y.data[i], z.data[i]], white);
        l.push(v.l);
        c.push(v.c);
        h.push(v.h);
    }
    let (w, ht) = (img.width(), img.height());
    ImagePlanar::lch(
        Plane::from_vec(w, ht, l),
        Plane::from_vec(w, ht, c),
        Plane::from_vec(w, ht, h),
    )
}

/// Convert an LCh image back to XYZ relative to `white`.
pub fn lch_image_to_xyz(img: &ImagePlanar, white: [f64; 3]) -> ImagePlanar {
    let l = img.channel("L");
    let c = img.channel("C");
    let h = img.channel("h");
    let n = l.len();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for i in 0..n {
        let v = lch_to_xyz(&LchColor { l: l.data[i], c: c.data[i], h: h.data[i] }, white);
        x.push(v[0]);
        y.push(v[1]);
        z.push(v[2]);
    }
    let (w, ht) = (img.width(), img.height());
    ImagePlanar::xyz(
        Plane::from_vec(w, ht, x),
        Plane::from_vec(w, ht, y),
        Plane::from_vec(w, ht, z),
    )
}

// Y/Yn ratio that maps to L* = 50: ((50+16)/116)^3.
const ANCHOR_RATIO_L50: f64 = (66.0 / 116.0) * (66.0 / 116.0) * (66.0 / 116.0);

/// Scale an HDR XYZ image so the log-average luminance converts to L* = 50
/// against a white of Y = 100. All-black images are returned unchanged.
pub fn anchor_log_average(img: &ImagePlanar) -> ImagePlanar {
    let y = img.channel("Y");
    let mut log_sum = 0.0;
    let mut positive = 0usize;
    for &v in &y.data {
        if v > 0.0 {
            log_sum += v.ln();
            positive += 1;
        }
    }
    if positive == 0 {
        return img.clone();
    }
    let log_avg = (log_sum / positive as f64).exp();
    let scale = ANCHOR_RATIO_L50 * 100.0 / log_avg;
    let mut out = img.clone();
    for ch in ["X", "Y", "Z"] {
        let plane = out.channel_mut(ch);
        for v in &mut plane.data {
            *v *= scale;
        }
    }
    out
}

/// Run all processing stages on an XYZ image already in memory.
pub fn process_xyz(cfg: &PipelineConfig, img: &ImagePlanar) -> Result<PipelineOutput> {
    let boundary = build_target_boundary(&cfg.target, cfg.boundary_samples)
        .map_err(|e| e.in_stage("boundary"))?;
    let white = white_xyz(&cfg.target, 100.0);

    // tone stage
    let (lch, baseline_xyz, tone_params) = match cfg.tmo {
        ToneMapper::Photographic { key } => {
            let has_light = img.channel("Y").data.iter().any(|&y| y > 0.0);
            let tm = if has_light {
                photographic_tmo(img, key).map_err(|e| e.in_stage("tone"))?
            } else {
                // an all-black image is already display-referred
                img.clone()
            };
            let lch = xyz_image_to_lch(&tm, white);
            (lch, tm, None)
        }
        ToneMapper::CuspAligned { curve, global_sg } => {
            let anchored = match cfg.anchor {
                HdrAnchor::LogAverageL50 => anchor_log_average(img),
            };
            let lch_hdr = xyz_image_to_lch(&anchored, white);
            let pct = select_percentile(&lch_hdr, &boundary, &cfg.policy);
            let (lch, params) = cusp_aligned_tmo(&lch_hdr, &boundary, pct, curve, global_sg);
            let baseline = lch_image_to_xyz(&lch, white);
            (lch, baseline, Some(params))
        }
    };

    let initial_lch = lch.clone();
    let oog_after_tone = oog_fraction(&lch, &boundary);

    // chroma stage
    let mut scale_vector = None;
    let mut gscale = None;
    let mut percentile_used = 1.0;
    let lch = match cfg.chroma {
        ChromaMethod::HueSpecific => {
            let pct = select_percentile(&lch, &boundary, &cfg.policy);
            percentile_used = pct;
            let decomposed = decompose_divide(lch.channel("C"));
            let mut base_img = lch.clone();
            base_img.replace_channel("C", decomposed.base);
            let raw = compute_scale_vector(&base_img, &boundary, pct, cfg.scale_increment);
            let sv = ScaleVector::from_raw(raw, cfg.scale_increment);
            let out = apply_hue_specific(&lch, &sv.smoothed);
            scale_vector = Some(sv);
            out
        }
        ChromaMethod::Global => {
            let pct = select_percentile(&lch, &boundary, &cfg.policy);
            percentile_used = pct;
            let decomposed = decompose_divide(lch.channel("C"));
            let mut base_img = lch.clone();
            base_img.replace_channel("C", decomposed.base);
            let src = build_source_gamut(&base_img, pct);
            gscale = Some(global_scale(&src, &boundary));
            apply_global(&lch, &src, &boundary)
        }
        ChromaMethod::None => lch,
    };
    let oog_after_chroma = oog_fraction(&lch, &boundary);

    // clipping stage
    let (lch, clip_report) = match &cfg.clip {
        Some(policy) => {
            let (out, report) = clip_image(&lch, &boundary, policy);
            (out, Some(report))
        }
        None => (lch, None),
    };
    let oog_final = oog_fraction(&lch, &boundary);

    let final_xyz = lch_image_to_xyz(&lch, white);
    let mut hue_diff = hue_diff_image(&baseline_xyz, &final_xyz, white)
        .map_err(|e| e.in_stage("metrics"))?;
    hue_diff.oog_fraction_before = oog_after_tone;
    hue_diff.oog_fraction_after = oog_final;

    Ok(PipelineOutput {
        final_xyz,
        final_lch: lch,
        initial_lch,
        baseline_xyz,
        boundary,
        oog_after_tone,
        oog_after_chroma,
        oog_final,
        percentile_used,
        scale_vector,
        global_scale: gscale,
        clip_report,
        tone_params,
        hue_diff,
    })
}

/// Load the input, run every stage, write the PNG and any diagnostics.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    validate(cfg)?;
    // input files carry sRGB primaries regardless of the target gamut
    let img = load_hdr(&cfg.input, &SRGB).map_err(|e| e.in_stage("load"))?;
    let out = process_xyz(cfg, &img)?;
    save_png_srgb(&cfg.output, &out.final_xyz, &cfg.target).map_err(|e| e.in_stage("save"))?;
    if let Some(dir) = &cfg.diagnostics_dir {
        write_diagnostics(dir, cfg, &out).map_err(|e| e.in_stage("diagnostics"))?;
    }
    Ok(out)
}

fn validate(cfg: &PipelineConfig) -> Result<()> {
    if cfg.input.as_os_str().is_empty() {
        return Err(Error::Config("missing input path".into()));
    }
    if cfg.output.as_os_str().is_empty() {
        return Err(Error::Config("missing output path".into()));
    }
    if let Some(clip) = &cfg.clip {
        if !(0.0..=1.0).contains(&clip.weight) {
            return Err(Error::Config(format!("clip weight {} outside [0,1]", clip.weight)));
        }
    }
    if cfg.scale_increment <= 0.0 {
        return Err(Error::Config("scale increment must be positive".into()));
    }
    if cfg.boundary_samples < 64 {
        return Err(Error::Config("boundary needs at least 64 samples per edge".into()));
    }
    Ok(())
}

fn write_diagnostics(dir: &Path, cfg: &PipelineConfig, out: &PipelineOutput) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    write_text_file(&dir.join("boundary.txt"), |buf| out.boundary.write_cusp_table(buf))?;

    let before = out_of_gamut_mask(&out.initial_lch, &out.boundary);
    save_mask_png(&dir.join("oog_before.png"), &before)?;
    let after = out_of_gamut_mask(&out.final_lch, &out.boundary);
    save_mask_png(&dir.join("oog_after.png"), &after)?;

    if let Some(sv) = &out.scale_vector {
        write_text_file(&dir.join("scale_vector.txt"), |buf| sv.write_table(buf))?;
    }
    if let Some(report) = &out.clip_report {
        write_text_file(&dir.join("clip_report.txt"), |buf| report.write_text(buf))?;
        save_mask_png(&dir.join("clip_moved.png"), &report.moved)?;
    }
    if let Some(params) = &out.tone_params {
        write_text_file(&dir.join("tone_curves.txt"), |buf| {
            use std::io::Write;
            writeln!(buf, "# hue chroma input_l output_l")?;
            for bin in (0..params.len()).step_by(30) {
                let p = &params[bin];
                let l_max = p.ceiling + p.overshoot_top.max(1.0);
                for c in [0.0, p.cusp_chroma] {
                    for (li, lo) in sample_tone_curve(p, c, l_max, 65) {
                        writeln!(buf, "{bin} {c:.2} {li:.4} {lo:.4}")?;
                    }
                }
            }
            Ok(())
        })?;
    }

    save_false_color_png(&dir.join("delta_h.png"), &out.hue_diff.map, 30.0)?;

    write_text_file(&dir.join("metrics.txt"), |buf| {
        use std::io::Write;
        out.hue_diff.write_text(buf)?;
        writeln!(buf, "oog_after_tone {:.6}", out.oog_after_tone)?;
        writeln!(buf, "oog_after_chroma {:.6}", out.oog_after_chroma)?;
        writeln!(buf, "oog_final {:.6}", out.oog_final)?;
        writeln!(buf, "percentile_used {:.4}", out.percentile_used)?;
        if let Some(s) = out.global_scale {
            writeln!(buf, "global_scale {s:.6}")?;
        }
        writeln!(buf, "chroma_method {:?}", cfg.chroma)?;
        Ok(())
    })
}

/// Export the cusp table of a target gamut (the `boundary` subcommand).
pub fn export_boundary(target: &Chromaticities, samples: usize, out_path: &Path) -> Result<()> {
    let boundary = build_target_boundary(target, samples)?;
    write_text_file(out_path, |buf| boundary.write_cusp_table(buf))
}

/// Hue-difference report between two display-referred images (the `metrics`
/// subcommand). Raw HDR inputs with luminance above 100 are exposure
/// normalized so their maximum Y is 100; both images must share dimensions.
pub fn run_metrics(
    reference: &Path,
    test: &Path,
    target: &Chromaticities,
) -> Result<HueDiffReport> {
    let normalize = |mut img: ImagePlanar| -> ImagePlanar {
        let max_y = img.channel("Y").max_value();
        if max_y > 100.0 {
            let s = 100.0 / max_y;
            for ch in ["X", "Y", "Z"] {
                for v in &mut img.channel_mut(ch).data {
                    *v *= s;
                }
            }
        }
        img
    };
    let ref_img = normalize(crate::codec::load_image_xyz(reference, &SRGB)?);
    let test_img = normalize(crate::codec::load_image_xyz(test, &SRGB)?);

    let white = white_xyz(target, 100.0);
    let mut report = hue_diff_image(&ref_img, &test_img, white)?;
    let boundary = build_target_boundary(target, 256)?;
    report.oog_fraction_before = oog_fraction(&xyz_image_to_lch(&ref_img, white), &boundary);
    report.oog_fraction_after = oog_fraction(&xyz_image_to_lch(&test_img, white), &boundary);
    Ok(report)
}

/// Parse a gamut file: four `x y` lines for red, green, blue, white.
pub fn parse_gamut_file(path: &Path) -> Result<Chromaticities> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad chromaticity value: {t}")))
            })
            .collect::<Result<_>>()?;
        if nums.len() != 2 {
            return Err(Error::Config(format!("expected two values per line, got: {line}")));
        }
        pairs.push(crate::colorspace::Xy { x: nums[0], y: nums[1] });
    }
    if pairs.len() != 4 {
        return Err(Error::Config(format!(
            "gamut file needs 4 lines (r, g, b, w), found {}",
            pairs.len()
        )));
    }
    Ok(Chromaticities { red: pairs[0], green: pairs[1], blue: pairs[2], white: pairs[3] })
}
