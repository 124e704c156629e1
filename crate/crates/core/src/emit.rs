//! Converts a scene into LaTeX picture-environment source: coordinate
//! rounding, native-line versus degenerate-qbezier strategy selection,
//! arrow and rectangle lowering, crop header and deterministic formatting.
//!
//! Output grammar (ASCII, LF line endings):
//!
//! ```text
//! \begin{picture}(W,H)
//! \qbezier(x1,y1)(x2,y2)(x3,y3)
//! \put(x,y){\line(a,b){l}}
//! \put(x,y){\vector(a,b){l}}
//! \put(x,y){\circle{d}}
//! \put(x,y){\circle*{d}}
//! \put(x,y){TEXT}
//! \end{picture}
//! ```

use std::fmt;

use thiserror::Error;

use crate::curves::{arrowhead, circle_as_quads, rect_as_segments, segment_as_quad, ArrowStyle};
use crate::scalar::{cast, Scalar};
use crate::scene::{check_label_text, normalize, Point, Primitive, Scene, SceneError};
use crate::slope::{projection_length, rationalize_slope, SlopeKind, SlopePair};

/// How straight strokes are written.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LineMode {
    /// Every stroke becomes a degenerate `\qbezier`, which renders any slope.
    #[default]
    QbezierAlways,
    /// Use native `\line`/`\vector` when the slope is exactly representable
    /// within its bound, the endpoints are integer-valued and the length
    /// argument is at least 1; otherwise fall back to `\qbezier`.
    NativeWhenExact,
}

/// How circles are written.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CircleMode {
    /// Native `\circle{d}` / `\circle*{d}`.
    #[default]
    Native,
    /// Lower to this many quadratic arcs (at least 4). The outline is
    /// emitted; a fill flag is only representable natively.
    Quads(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmitOptions<T> {
    pub line_mode: LineMode,
    pub circle_mode: CircleMode,
    pub arrow_style: ArrowStyle<T>,
    /// Maximum angular error (radians) a native line may carry.
    pub exactness_tolerance: T,
    /// Refuse primitives whose anchor geometry has negative coordinates.
    pub strict: bool,
}

impl<T: Scalar> Default for EmitOptions<T> {
    fn default() -> Self {
        EmitOptions {
            line_mode: LineMode::default(),
            circle_mode: CircleMode::default(),
            arrow_style: ArrowStyle::default(),
            exactness_tolerance: cast(1e-9),
            strict: false,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EmitError {
    #[error("scene contains no primitives")]
    EmptyScene,
    #[error("scene contains a non-finite coordinate")]
    NonFinite,
    #[error("strict mode: anchor geometry extends below the origin")]
    NotNormalized,
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("arrowed segment has no direction")]
    ZeroDirection,
    #[error("coordinate does not fit an integer argument")]
    CoordinateOverflow,
    #[error("invalid emit options: {0}")]
    InvalidOptions(String),
}

impl From<SceneError> for EmitError {
    fn from(_: SceneError) -> Self {
        EmitError::EmptyScene
    }
}

/// Body of a `\put`.
#[derive(Clone, Debug, PartialEq)]
pub enum InnerCommand {
    Line { a: i64, b: i64, len: i64 },
    Vector { a: i64, b: i64, len: i64 },
    Circle { diameter: i64, filled: bool },
    Text(String),
}

/// One emitted picture command.
#[derive(Clone, Debug, PartialEq)]
pub enum PictureCommand {
    Put {
        x: i64,
        y: i64,
        inner: InnerCommand,
    },
    Qbezier {
        x1: i64,
        y1: i64,
        x2: i64,
        y2: i64,
        x3: i64,
        y3: i64,
    },
}

impl fmt::Display for InnerCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InnerCommand::Line { a, b, len } => write!(f, "\\line({a},{b}){{{len}}}"),
            InnerCommand::Vector { a, b, len } => write!(f, "\\vector({a},{b}){{{len}}}"),
            InnerCommand::Circle {
                diameter,
                filled: false,
            } => write!(f, "\\circle{{{diameter}}}"),
            InnerCommand::Circle {
                diameter,
                filled: true,
            } => write!(f, "\\circle*{{{diameter}}}"),
            InnerCommand::Text(text) => f.write_str(text),
        }
    }
}

impl fmt::Display for PictureCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PictureCommand::Put { x, y, inner } => write!(f, "\\put({x},{y}){{{inner}}}"),
            PictureCommand::Qbezier {
                x1,
                y1,
                x2,
                y2,
                x3,
                y3,
            } => write!(f, "\\qbezier({x1},{y1})({x2},{y2})({x3},{y3})"),
        }
    }
}

/// Rounds half away from zero to an integer coordinate.
///
/// Panics if `v` is not finite or does not fit in `i64`; the emitter
/// validates its inputs before calling this.
pub fn round_coord<T: Scalar>(v: T) -> i64 {
    v.round()
        .to_i64()
        .expect("coordinate not representable as an integer")
}

fn round_checked<T: Scalar>(v: T) -> Result<i64, EmitError> {
    v.round().to_i64().ok_or(EmitError::CoordinateOverflow)
}

fn round_point<T: Scalar>(p: Point<T>) -> Result<(i64, i64), EmitError> {
    Ok((round_checked(p.x)?, round_checked(p.y)?))
}

fn qbezier_cmd<T: Scalar>(
    p0: Point<T>,
    c: Point<T>,
    p1: Point<T>,
) -> Result<PictureCommand, EmitError> {
    let (x1, y1) = round_point(p0)?;
    let (x2, y2) = round_point(c)?;
    let (x3, y3) = round_point(p1)?;
    Ok(PictureCommand::Qbezier {
        x1,
        y1,
        x2,
        y2,
        x3,
        y3,
    })
}

fn is_integer_valued<T: Scalar>(v: T) -> bool {
    (v - v.round()).abs() <= cast(1e-9)
}

/// Finds the native pair for `p0 -> p1` under `kind` if the stroke qualifies:
/// integer endpoints, slope error within tolerance, length argument >= 1.
fn native_pair<T: Scalar>(
    p0: Point<T>,
    p1: Point<T>,
    kind: SlopeKind,
    tolerance: T,
) -> Option<(SlopePair, i64)> {
    if ![p0.x, p0.y, p1.x, p1.y]
        .iter()
        .all(|v| is_integer_valued(*v))
    {
        return None;
    }
    let (pair, err) = rationalize_slope(p1.x - p0.x, p1.y - p0.y, kind).ok()?;
    if err > tolerance {
        return None;
    }
    let len = projection_length(p0, p1, pair);
    (len >= 1).then_some((pair, len))
}

/// One stroke as either a native `\line` or a degenerate `\qbezier`.
fn stroke_command<T: Scalar>(
    p0: Point<T>,
    p1: Point<T>,
    opts: &EmitOptions<T>,
) -> Result<PictureCommand, EmitError> {
    if opts.line_mode == LineMode::NativeWhenExact {
        if let Some((pair, len)) = native_pair(p0, p1, SlopeKind::Line, opts.exactness_tolerance) {
            let (x, y) = round_point(p0)?;
            return Ok(PictureCommand::Put {
                x,
                y,
                inner: InnerCommand::Line {
                    a: pair.a(),
                    b: pair.b(),
                    len,
                },
            });
        }
    }
    let (q0, c, q1) = segment_as_quad(p0, p1);
    qbezier_cmd(q0, c, q1)
}

/// Two barb strokes as degenerate qbeziers, left barb first.
fn barb_commands<T: Scalar>(
    tip: Point<T>,
    direction: (T, T),
    style: &ArrowStyle<T>,
) -> Result<Vec<PictureCommand>, EmitError> {
    let (left, right) = arrowhead(tip, direction, style).map_err(|_| EmitError::ZeroDirection)?;
    Ok(vec![
        qbezier_cmd(tip, tip.midpoint(left), left)?,
        qbezier_cmd(tip, tip.midpoint(right), right)?,
    ])
}

/// Lowers one primitive to picture commands.
///
/// Expects picture-space input (Y up). The scene-level entry point
/// [`emit_scene`] normalizes first; in strict mode a primitive whose anchor
/// geometry has negative coordinates is refused instead.
pub fn emit_primitive<T: Scalar>(
    prim: &Primitive<T>,
    opts: &EmitOptions<T>,
) -> Result<Vec<PictureCommand>, EmitError> {
    if !prim.is_finite() {
        return Err(EmitError::NonFinite);
    }
    if opts.strict && has_negative_anchor(prim) {
        return Err(EmitError::NotNormalized);
    }
    match prim {
        Primitive::Label { anchor, text } => {
            check_label_text(text).map_err(EmitError::InvalidLabel)?;
            let (x, y) = round_point(*anchor)?;
            Ok(vec![PictureCommand::Put {
                x,
                y,
                inner: InnerCommand::Text(text.clone()),
            }])
        }
        Primitive::Circle {
            center,
            diameter,
            filled,
        } => match opts.circle_mode {
            CircleMode::Native => {
                let (x, y) = round_point(*center)?;
                Ok(vec![PictureCommand::Put {
                    x,
                    y,
                    inner: InnerCommand::Circle {
                        diameter: round_checked(*diameter)?,
                        filled: *filled,
                    },
                }])
            }
            CircleMode::Quads(n_arcs) => {
                if n_arcs < 4 {
                    return Err(EmitError::InvalidOptions(format!(
                        "circle lowering needs at least 4 arcs, got {n_arcs}"
                    )));
                }
                circle_as_quads(*center, *diameter, n_arcs)
                    .into_iter()
                    .map(|(p0, c, p1)| qbezier_cmd(p0, c, p1))
                    .collect()
            }
        },
        Primitive::QuadBezier { p0, c, p1 } => Ok(vec![qbezier_cmd(*p0, *c, *p1)?]),
        Primitive::Segment {
            p0,
            p1,
            arrow: false,
        } => Ok(vec![stroke_command(*p0, *p1, opts)?]),
        Primitive::Segment {
            p0,
            p1,
            arrow: true,
        } => {
            let direction = (p1.x - p0.x, p1.y - p0.y);
            if direction.0 == T::zero() && direction.1 == T::zero() {
                return Err(EmitError::ZeroDirection);
            }
            if opts.line_mode == LineMode::NativeWhenExact {
                if let Some((pair, len)) =
                    native_pair(*p0, *p1, SlopeKind::Vector, opts.exactness_tolerance)
                {
                    let (x, y) = round_point(*p0)?;
                    return Ok(vec![PictureCommand::Put {
                        x,
                        y,
                        inner: InnerCommand::Vector {
                            a: pair.a(),
                            b: pair.b(),
                            len,
                        },
                    }]);
                }
            }
            let mut cmds = vec![stroke_command(*p0, *p1, opts)?];
            cmds.extend(barb_commands(*p1, direction, &opts.arrow_style)?);
            Ok(cmds)
        }
        Primitive::Rectangle {
            corner,
            width,
            height,
        } => rect_as_segments(*corner, *width, *height)
            .into_iter()
            .map(|(p0, p1)| stroke_command(p0, p1, opts))
            .collect(),
    }
}

fn has_negative_anchor<T: Scalar>(prim: &Primitive<T>) -> bool {
    let eps = -cast::<T>(1e-9);
    let below = |p: &Point<T>| p.x < eps || p.y < eps;
    match prim {
        Primitive::Segment { p0, p1, .. } => below(p0) || below(p1),
        Primitive::Rectangle { corner, .. } => below(corner),
        Primitive::Circle {
            center, diameter, ..
        } => {
            let r = *diameter / (T::one() + T::one());
            center.x - r < eps || center.y - r < eps
        }
        Primitive::QuadBezier { p0, c, p1 } => below(p0) || below(c) || below(p1),
        Primitive::Label { anchor, .. } => below(anchor),
    }
}

/// Compiles a whole scene to picture source.
///
/// The scene is auto-cropped first (see [`normalize`]); the header declares
/// the rounded-up crop dimensions and commands follow in scene insertion
/// order, one per line. The output is a deterministic function of the scene
/// and options.
pub fn emit_scene<T: Scalar>(scene: &Scene<T>, opts: &EmitOptions<T>) -> Result<String, EmitError> {
    if scene.is_empty() {
        return Err(EmitError::EmptyScene);
    }
    if !scene.primitives.iter().all(Primitive::is_finite) {
        return Err(EmitError::NonFinite);
    }
    let (scene, width, height) = normalize(scene)?;
    let w = round_checked(width.ceil())?;
    let h = round_checked(height.ceil())?;
    let mut out = String::new();
    out.push_str(&format!("\\begin{{picture}}({w},{h})\n"));
    for prim in &scene.primitives {
        for cmd in emit_primitive(prim, opts)? {
            out.push_str(&cmd.to_string());
            out.push('\n');
        }
    }
    out.push_str("\\end{picture}\n");
    Ok(out)
}
