//! Compile vector scenes (or an SVG subset) into LaTeX `picture`-environment
//! source, parse and lint such source, and verify round-trip fidelity
//! geometrically.
//!
//! The pipeline, end to end:
//!
//! ```text
//! .scene / .svg --> Scene --> emit_scene --> picture code
//!                     ^                          |
//!                     +---- doc_to_scene <-- parse_picture
//! ```
//!
//! The picture environment draws native lines and vectors only at coprime
//! integer slopes bounded by 6 (lines) and 4 (vectors). The emitter
//! therefore defaults to writing every stroke as a degenerate `\qbezier`
//! through collinear control points, which renders at any slope; native
//! commands are opt-in for exactly representable strokes. Scenes are
//! auto-cropped, and screen-space inputs (SVG) are mirrored vertically into
//! the picture's bottom-left Y-up frame on import.
//!
//! All geometry is generic over the [`Scalar`] floating-point type; the
//! aliases below fix `f64` for the common case.

pub mod curves;
pub mod diag;
pub mod emit;
pub mod fidelity;
pub mod parse;
pub mod scalar;
pub mod scene;
pub mod slope;
pub mod svg;

pub use scalar::Scalar;

pub use curves::{ArrowStyle, FlattenPolicy, Polyline};
pub use diag::{Diagnostic, Rule, Severity, Span};
pub use emit::{emit_primitive, emit_scene, CircleMode, EmitError, EmitOptions, LineMode};
pub use fidelity::{flatten_scene, hausdorff, render_preview, FidelityError};
pub use parse::{
    doc_to_scene, lint, parse_and_lint, parse_picture, DocError, ParseError, PictureDoc,
};
pub use scene::{
    flip_vertical, normalize, parse_scene_text, scene_bbox, translate, BoundingBox, CanvasFrame,
    Point, Primitive, Scene, SceneError, SceneParseError,
};
pub use slope::{
    line_length_arg, rationalize_slope, reduce_direction, validate_slope, SlopeError, SlopeKind,
    SlopePair,
};
pub use svg::{import_svg, parse_path_data, ImportOptions, SvgError};

/// Default scalar for the command-line pipeline.
pub type DefaultScalar = f64;

pub type Point64 = scene::Point<f64>;
pub type Scene64 = scene::Scene<f64>;
pub type BoundingBox64 = scene::BoundingBox<f64>;
pub type Polyline64 = curves::Polyline<f64>;
pub type PictureDoc64 = parse::PictureDoc<f64>;
pub type EmitOptions64 = emit::EmitOptions<f64>;
