//! Command-line front end: convert scene and SVG inputs to LaTeX picture
//! code, lint picture source, render SVG previews, and measure round-trip
//! fidelity.
//!
//! Exit codes: 0 success, 1 semantic failure (lint errors, strict-mode
//! diagnostics, fidelity threshold exceeded), 2 operational failure (I/O,
//! unreadable or malformed input).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use texpic::emit::{emit_scene, CircleMode, EmitError, EmitOptions, LineMode};
use texpic::fidelity::{flatten_scene, hausdorff, render_preview};
use texpic::parse::{doc_to_scene, parse_and_lint, parse_picture};
use texpic::scene::{normalize, parse_scene_text, scene_bbox};
use texpic::svg::{import_svg, ImportOptions, SvgError};
use texpic::{FlattenPolicy, Scene64};

#[derive(Parser)]
#[command(
    name = "texpic",
    version,
    about = "Compile vector scenes to LaTeX picture-environment code and back"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a .scene or .svg input to picture code.
    Convert(ConvertArgs),
    /// Parse and lint picture source; print diagnostics to stderr.
    Check { input: PathBuf },
    /// Render any input (.tex, .scene, .svg) to an SVG preview.
    Render(RenderArgs),
    /// Convert, reparse and measure the geometric round-trip distance.
    Roundtrip(RoundtripArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Scene,
    Svg,
    Tex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LineModeArg {
    Qbezier,
    NativeWhenExact,
}

impl From<LineModeArg> for LineMode {
    fn from(v: LineModeArg) -> Self {
        match v {
            LineModeArg::Qbezier => LineMode::QbezierAlways,
            LineModeArg::NativeWhenExact => LineMode::NativeWhenExact,
        }
    }
}

/// `native` or `quads:N` with `N >= 4`.
fn parse_circle_mode(s: &str) -> Result<CircleMode, String> {
    if s == "native" {
        return Ok(CircleMode::Native);
    }
    if let Some(n) = s.strip_prefix("quads:") {
        let n: usize = n.parse().map_err(|_| format!("bad arc count `{n}`"))?;
        if n < 4 {
            return Err("circle lowering needs at least 4 arcs".into());
        }
        return Ok(CircleMode::Quads(n));
    }
    Err(format!("expected `native` or `quads:N`, got `{s}`"))
}

fn parse_t_step(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad number `{s}`"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err("t-step must be in (0, 1]".into())
    }
}

fn parse_scale(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad number `{s}`"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("scale must be finite and positive".into())
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Override the input kind inferred from the file extension.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// SVG user units per picture unit.
    #[arg(long, value_parser = parse_scale, default_value = "1.0")]
    scale: f64,
    /// Fail on unsupported input or out-of-box geometry instead of skipping.
    #[arg(long)]
    strict: bool,
    /// Stroke emission strategy.
    #[arg(long, value_enum, default_value = "qbezier")]
    line_mode: LineModeArg,
    /// Circle emission strategy: `native` or `quads:N`.
    #[arg(long, value_parser = parse_circle_mode, default_value = "native")]
    circle_mode: CircleMode,
}

impl CommonArgs {
    fn emit_options(&self) -> EmitOptions<f64> {
        EmitOptions {
            line_mode: self.line_mode.into(),
            circle_mode: self.circle_mode,
            strict: self.strict,
            ..EmitOptions::default()
        }
    }
}

#[derive(Args)]
struct ConvertArgs {
    input: PathBuf,
    /// Output path; standard output when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Prepend `\setlength{\unitlength}{...}` with this length.
    #[arg(long)]
    unitlength: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RenderArgs {
    input: PathBuf,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RoundtripArgs {
    input: PathBuf,
    /// Largest acceptable Hausdorff distance in picture units.
    #[arg(long, default_value = "1.5")]
    max_distance: f64,
    /// Flattening parameter step for the comparison.
    #[arg(long, value_parser = parse_t_step, default_value = "0.01")]
    t_step: f64,
    #[command(flatten)]
    common: CommonArgs,
}

/// Failure carrying its exit code: 1 semantic, 2 operational.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn semantic(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn operational(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Convert(args) => convert(&args),
        Command::Check { input } => check(&input),
        Command::Render(args) => render(&args),
        Command::Roundtrip(args) => roundtrip(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("texpic: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::operational(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::operational(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn input_kind(path: &Path, override_kind: Option<FormatArg>) -> Result<FormatArg, Failure> {
    if let Some(kind) = override_kind {
        return Ok(kind);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("scene") => Ok(FormatArg::Scene),
        Some("svg") => Ok(FormatArg::Svg),
        Some("tex") => Ok(FormatArg::Tex),
        other => Err(Failure::operational(format!(
            "cannot infer input kind from extension {:?}; pass --format",
            other.unwrap_or("")
        ))),
    }
}

/// Loads a scene from any input kind, printing SVG import warnings to
/// stderr.
fn load_scene(path: &Path, kind: FormatArg, common: &CommonArgs) -> Result<Scene64, Failure> {
    let text = read_input(path)?;
    match kind {
        FormatArg::Scene => parse_scene_text(&text)
            .map_err(|e| Failure::operational(format!("{}: {e}", path.display()))),
        FormatArg::Svg => {
            let opts = ImportOptions {
                scale: common.scale,
                strict: common.strict,
            };
            match import_svg(&text, &opts) {
                Ok((scene, diags)) => {
                    for d in &diags {
                        eprintln!("{d}");
                    }
                    Ok(scene)
                }
                Err(SvgError::Unsupported(m)) => {
                    Err(Failure::semantic(format!("{}: {m}", path.display())))
                }
                Err(SvgError::Malformed(m)) => {
                    Err(Failure::operational(format!("{}: {m}", path.display())))
                }
            }
        }
        FormatArg::Tex => {
            let (doc, diags) = parse_and_lint::<f64>(&text)
                .map_err(|e| Failure::operational(format!("{}: {e}", path.display())))?;
            let errors: Vec<_> = diags.iter().filter(|d| d.is_error()).collect();
            if !errors.is_empty() {
                for d in &errors {
                    eprintln!("{}", d.render(&text));
                }
                return Err(Failure::semantic("picture source has lint errors"));
            }
            doc_to_scene(&doc).map_err(|e| Failure::semantic(e.to_string()))
        }
    }
}

fn emit_failure(e: EmitError) -> Failure {
    match e {
        EmitError::NotNormalized => Failure::semantic(e.to_string()),
        other => Failure::operational(other.to_string()),
    }
}

fn convert(args: &ConvertArgs) -> Result<u8, Failure> {
    let kind = input_kind(&args.input, args.common.format)?;
    if matches!(kind, FormatArg::Tex) {
        return Err(Failure::operational(
            "convert expects a .scene or .svg input",
        ));
    }
    let scene = load_scene(&args.input, kind, &args.common)?;
    let code = emit_scene(&scene, &args.common.emit_options()).map_err(emit_failure)?;
    let mut out = String::new();
    if let Some(unit) = &args.unitlength {
        out.push_str(&format!("\\setlength{{\\unitlength}}{{{unit}}}\n"));
    }
    out.push_str(&code);
    write_output(args.output.as_ref(), &out)?;
    Ok(0)
}

fn check(input: &Path) -> Result<u8, Failure> {
    let text = read_input(input)?;
    let (_, diags) = parse_and_lint::<f64>(&text)
        .map_err(|e| Failure::operational(format!("{}: {e}", input.display())))?;
    for d in &diags {
        eprintln!("{}", d.render(&text));
    }
    Ok(if diags.iter().any(|d| d.is_error()) {
        1
    } else {
        0
    })
}

fn render(args: &RenderArgs) -> Result<u8, Failure> {
    let kind = input_kind(&args.input, args.common.format)?;
    let scene = load_scene(&args.input, kind, &args.common)?;
    let bbox = scene_bbox(&scene).map_err(|e| Failure::operational(e.to_string()))?;
    let canvas_height = bbox.max.y.max(0.0).ceil();
    let svg =
        render_preview(&scene, canvas_height).map_err(|e| Failure::operational(e.to_string()))?;
    write_output(args.output.as_ref(), &svg)?;
    Ok(0)
}

fn roundtrip(args: &RoundtripArgs) -> Result<u8, Failure> {
    let kind = input_kind(&args.input, args.common.format)?;
    if matches!(kind, FormatArg::Tex) {
        return Err(Failure::operational(
            "roundtrip expects a .scene or .svg input",
        ));
    }
    let scene = load_scene(&args.input, kind, &args.common)?;
    let code = emit_scene(&scene, &args.common.emit_options()).map_err(emit_failure)?;
    let (doc, _) = parse_picture::<f64>(&code)
        .map_err(|e| Failure::operational(format!("internal reparse failed: {e}")))?;
    let reparsed = doc_to_scene(&doc)
        .map_err(|e| Failure::operational(format!("internal reparse failed: {e}")))?;
    // The emitter normalizes, so compare in the normalized frame.
    let (normalized, _, _) = normalize(&scene).map_err(|e| Failure::operational(e.to_string()))?;
    let policy = FlattenPolicy {
        t_step: args.t_step,
        circle_segments: 100,
    };
    let distance = hausdorff(
        &flatten_scene(&normalized, &policy),
        &flatten_scene(&reparsed, &policy),
        0.5,
    )
    .map_err(|e| Failure::operational(e.to_string()))?;
    println!("{distance:.6}");
    Ok(if distance <= args.max_distance { 0 } else { 1 })
}
