use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hdr_gamut::chroma::PercentilePolicy;
use hdr_gamut::clip::{ClipMode, ClipPolicy};
use hdr_gamut::colorspace::{Chromaticities, SRGB};
use hdr_gamut::pipeline::{
    export_boundary, parse_gamut_file, run_metrics, run_pipeline, ChromaMethod, HdrAnchor,
    PipelineConfig,
};
use hdr_gamut::tone::{CompressionCurve, ToneMapper};
use hdr_gamut::Error;

#[derive(Parser)]
#[command(name = "hdr-gamut", about = "HDR tone and gamut management", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TmoArg {
    Photographic,
    Cusp,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChromaArg {
    HueSpecific,
    Global,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClipArg {
    Interp,
    Chroma,
    Lightness,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnchorArg {
    Logavg50,
}

#[derive(Subcommand)]
enum Command {
    /// Tone map an HDR image and fit it to the target gamut.
    Map {
        /// Input image (Radiance .hdr or .pfm).
        #[arg(long)]
        input: PathBuf,
        /// Output PNG.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "photographic")]
        tmo: TmoArg,
        /// Photographic operator key value.
        #[arg(long, default_value_t = 0.18)]
        key: f64,
        #[arg(long, value_enum, default_value = "hue-specific")]
        chroma: ChromaArg,
        #[arg(long, value_enum, default_value = "interp")]
        clip: ClipArg,
        /// Interpolation weight toward the lightness-clip target.
        #[arg(long, default_value_t = 0.5)]
        clip_weight: f64,
        /// "srgb" or a chromaticities file (x y per line: r, g, b, w).
        #[arg(long, default_value = "srgb")]
        target: String,
        /// HDR exposure anchor for the cusp tone mapper.
        #[arg(long, value_enum, default_value = "logavg50")]
        anchor: AnchorArg,
        /// Use one image-wide overshoot pair instead of per-slice values
        /// (cusp tone mapper only).
        #[arg(long)]
        global_sg: bool,
        /// Directory for diagnostic dumps.
        #[arg(long)]
        diag: Option<PathBuf>,
    },
    /// Export the per-hue cusp table of a target gamut.
    Boundary {
        #[arg(long, default_value = "srgb")]
        target: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Hue-difference report between two display-referred images.
    Metrics {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, default_value = "srgb")]
        target: String,
    },
}

fn resolve_target(name: &str) -> Result<Chromaticities, Error> {
    if name.eq_ignore_ascii_case("srgb") {
        Ok(SRGB)
    } else {
        parse_gamut_file(std::path::Path::new(name))
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Map {
            input,
            output,
            tmo,
            key,
            chroma,
            clip,
            clip_weight,
            target,
            anchor,
            global_sg,
            diag,
        } => {
            if key <= 0.0 {
                return Err(Error::Config(format!("key must be positive, got {key}")));
            }
            let cfg = PipelineConfig {
                input,
                output,
                tmo: match tmo {
                    TmoArg::Photographic => ToneMapper::Photographic { key },
                    TmoArg::Cusp => ToneMapper::CuspAligned {
                        curve: CompressionCurve::Log1p,
                        global_sg,
                    },
                },
                chroma: match chroma {
                    ChromaArg::HueSpecific => ChromaMethod::HueSpecific,
                    ChromaArg::Global => ChromaMethod::Global,
                    ChromaArg::None => ChromaMethod::None,
                },
                clip: match clip {
                    ClipArg::Interp => {
                        Some(ClipPolicy { mode: ClipMode::Interpolated, weight: clip_weight })
                    }
                    ClipArg::Chroma => {
                        Some(ClipPolicy { mode: ClipMode::ChromaOnly, weight: clip_weight })
                    }
                    ClipArg::Lightness => {
                        Some(ClipPolicy { mode: ClipMode::LightnessOnly, weight: clip_weight })
                    }
                    ClipArg::None => None,
                },
                policy: PercentilePolicy::default(),
                target: resolve_target(&target)?,
                anchor: match anchor {
                    AnchorArg::Logavg50 => HdrAnchor::LogAverageL50,
                },
                diagnostics_dir: diag,
                ..Default::default()
            };
            let out = run_pipeline(&cfg)?;
            println!(
                "out-of-gamut: {:.4}% after tone, {:.4}% after chroma, {:.4}% final",
                out.oog_after_tone * 100.0,
                out.oog_after_chroma * 100.0,
                out.oog_final * 100.0
            );
            println!(
                "mean hue difference vs tone-mapped baseline: {:.4} deg",
                out.hue_diff.mean
            );
            Ok(())
        }
        Command::Boundary { target, out, samples } => {
            export_boundary(&resolve_target(&target)?, samples, &out)
        }
        Command::Metrics { reference, test, target } => {
            let report = run_metrics(&reference, &test, &resolve_target(&target)?)?;
            let mut buf = Vec::new();
            report.write_text(&mut buf).expect("write to vec");
            print!("{}", String::from_utf8_lossy(&buf));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
