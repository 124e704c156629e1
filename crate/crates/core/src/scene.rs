//! Scene model in picture coordinates (origin bottom left, Y up) and the
//! geometric transforms applied before emission.
//!
//! All types are immutable values and all operations are pure functions, so
//! everything here is safe to use concurrently. Coordinates stay real-valued;
//! rounding to integers happens only in the emitter.

use std::ops::{Add, Mul, Sub};

use thiserror::Error;

use crate::scalar::Scalar;

/// A point in picture units (1 unit = 1 `\unitlength`).
///
/// Coordinates must be finite; the scene-file and SVG importers reject
/// non-finite input and the transforms preserve finiteness.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn midpoint(self, other: Self) -> Self {
        let two = T::one() + T::one();
        Point::new((self.x + other.x) / two, (self.y + other.y) / two)
    }

    pub fn distance(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Point<T>;
    fn add(self, rhs: Self) -> Self {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Point<T>;
    fn sub(self, rhs: Self) -> Self {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Point<T>;
    fn mul(self, rhs: T) -> Self {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

/// Screen-space offsets of a drawing canvas with a top-left origin.
///
/// `to_picture` is the one-shot conversion from screen points into picture
/// space: shift by the left edge, mirror vertically around the top edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanvasFrame<T> {
    pub canv_left: T,
    pub canv_top: T,
}

impl<T: Scalar> CanvasFrame<T> {
    pub fn new(canv_left: T, canv_top: T) -> Self {
        CanvasFrame {
            canv_left,
            canv_top,
        }
    }

    pub fn to_picture(&self, p: Point<T>) -> Point<T> {
        Point::new(p.x - self.canv_left, self.canv_top - p.y)
    }
}

/// A drawing primitive in picture space.
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive<T> {
    /// Straight stroke; `arrow` draws a head at `p1`. An arrowed segment
    /// needs a direction, so `p0 != p1` when `arrow` is set.
    Segment {
        p0: Point<T>,
        p1: Point<T>,
        arrow: bool,
    },
    /// Axis-aligned rectangle; `corner` is the minimum corner.
    Rectangle {
        corner: Point<T>,
        width: T,
        height: T,
    },
    Circle {
        center: Point<T>,
        diameter: T,
        filled: bool,
    },
    QuadBezier {
        p0: Point<T>,
        c: Point<T>,
        p1: Point<T>,
    },
    /// Text anchored at a point. The text must be non-empty and free of
    /// unescaped `}` at the top nesting level.
    Label { anchor: Point<T>, text: String },
}

impl<T: Scalar> Primitive<T> {
    /// Anchor geometry: the points that define the primitive's bounding box.
    /// Arrowhead barbs are generated at emission and deliberately excluded.
    fn anchor_points(&self) -> Vec<Point<T>> {
        match self {
            Primitive::Segment { p0, p1, .. } => vec![*p0, *p1],
            Primitive::Rectangle {
                corner,
                width,
                height,
            } => vec![*corner, Point::new(corner.x + *width, corner.y + *height)],
            Primitive::Circle {
                center, diameter, ..
            } => {
                let r = *diameter / (T::one() + T::one());
                vec![
                    Point::new(center.x - r, center.y - r),
                    Point::new(center.x + r, center.y + r),
                ]
            }
            Primitive::QuadBezier { p0, c, p1 } => vec![*p0, *c, *p1],
            Primitive::Label { anchor, .. } => vec![*anchor],
        }
    }

    fn map_points(&self, f: impl Fn(Point<T>) -> Point<T>) -> Primitive<T> {
        match self {
            Primitive::Segment { p0, p1, arrow } => Primitive::Segment {
                p0: f(*p0),
                p1: f(*p1),
                arrow: *arrow,
            },
            Primitive::Rectangle {
                corner,
                width,
                height,
            } => Primitive::Rectangle {
                corner: f(*corner),
                width: *width,
                height: *height,
            },
            Primitive::Circle {
                center,
                diameter,
                filled,
            } => Primitive::Circle {
                center: f(*center),
                diameter: *diameter,
                filled: *filled,
            },
            Primitive::QuadBezier { p0, c, p1 } => Primitive::QuadBezier {
                p0: f(*p0),
                c: f(*c),
                p1: f(*p1),
            },
            Primitive::Label { anchor, text } => Primitive::Label {
                anchor: f(*anchor),
                text: text.clone(),
            },
        }
    }

    pub fn is_finite(&self) -> bool {
        self.anchor_points().iter().all(Point::is_finite)
    }
}

/// Ordered sequence of primitives. Insertion order is preserved by every
/// transform and is the emission order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scene<T> {
    pub primitives: Vec<Primitive<T>>,
}

impl<T: Scalar> Scene<T> {
    pub fn new(primitives: Vec<Primitive<T>>) -> Self {
        Scene { primitives }
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }
}

/// Axis-aligned box with `min.x <= max.x` and `min.y <= max.y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox<T> {
    pub min: Point<T>,
    pub max: Point<T>,
}

impl<T: Scalar> BoundingBox<T> {
    fn at(p: Point<T>) -> Self {
        BoundingBox { min: p, max: p }
    }

    fn include(&mut self, p: Point<T>) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SceneError {
    #[error("scene contains no primitives")]
    EmptyScene,
}

/// Tight bounding box over the scene's anchor geometry: segment endpoints,
/// rectangle corners, Bezier control hulls, circle extents and label anchors.
/// Arrowhead barbs are not part of the box; LaTeX tolerates the overshoot.
pub fn scene_bbox<T: Scalar>(scene: &Scene<T>) -> Result<BoundingBox<T>, SceneError> {
    let mut bbox: Option<BoundingBox<T>> = None;
    for prim in &scene.primitives {
        for p in prim.anchor_points() {
            match &mut bbox {
                None => bbox = Some(BoundingBox::at(p)),
                Some(b) => b.include(p),
            }
        }
    }
    bbox.ok_or(SceneError::EmptyScene)
}

/// Translates every primitive by `(dx, dy)`.
pub fn translate<T: Scalar>(scene: &Scene<T>, dx: T, dy: T) -> Scene<T> {
    Scene::new(
        scene
            .primitives
            .iter()
            .map(|p| p.map_points(|pt| Point::new(pt.x + dx, pt.y + dy)))
            .collect(),
    )
}

/// Auto-crop: translates the scene so surplus margin is removed and returns
/// the picture dimensions.
///
/// Only positive margin is cropped — the shift per axis is `-max(0, min)`.
/// Geometry already left of or below the origin keeps its coordinates; it
/// draws outside the picture box, which LaTeX permits, and the box keeps
/// covering `[0, max]`. For scenes with a non-negative bounding box this is
/// exactly the translation of the minimum corner to the origin.
pub fn normalize<T: Scalar>(scene: &Scene<T>) -> Result<(Scene<T>, T, T), SceneError> {
    let bbox = scene_bbox(scene)?;
    let dx = -bbox.min.x.max(T::zero());
    let dy = -bbox.min.y.max(T::zero());
    let shifted = translate(scene, dx, dy);
    Ok((shifted, bbox.max.x + dx, bbox.max.y + dy))
}

/// Mirrors the scene vertically: every point `(x, y)` maps to
/// `(x, canv_top - y)`. Order and arrow flags are preserved, and applying
/// the flip twice with the same `canv_top` is the identity (the transform
/// performs one subtraction per coordinate and nothing else).
pub fn flip_vertical<T: Scalar>(scene: &Scene<T>, canv_top: T) -> Scene<T> {
    Scene::new(
        scene
            .primitives
            .iter()
            .map(|prim| match prim {
                // A rectangle stays corner-canonical: the flipped minimum
                // corner is the old corner raised by the height.
                Primitive::Rectangle {
                    corner,
                    width,
                    height,
                } => Primitive::Rectangle {
                    corner: Point::new(corner.x, canv_top - corner.y - *height),
                    width: *width,
                    height: *height,
                },
                other => other.map_points(|p| Point::new(p.x, canv_top - p.y)),
            })
            .collect(),
    )
}

/// Checks label text: non-empty, no unescaped `}` at the top nesting level,
/// braces balanced, at most one nesting level.
pub(crate) fn check_label_text(text: &str) -> Result<(), String> {
    if text.is_empty() {
        return Err("label text is empty".into());
    }
    let mut depth: i32 = 0;
    let mut escaped = false;
    for ch in text.chars() {
        if escaped {
            escaped = false;
            continue;
        }
        match ch {
            '\\' => escaped = true,
            '{' => {
                depth += 1;
                if depth > 1 {
                    return Err("label text nests braces deeper than one level".into());
                }
            }
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return Err("label text has an unescaped `}` at the top level".into());
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("label text has an unclosed `{`".into());
    }
    Ok(())
}

/// Scene-file parse failure with its 1-based line number.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct SceneParseError {
    pub line: usize,
    pub message: String,
}

impl SceneParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        SceneParseError {
            line,
            message: message.into(),
        }
    }
}

/// Parses the line-oriented scene format, one primitive per line:
///
/// ```text
/// segment x0 y0 x1 y1
/// vector  x0 y0 x1 y1
/// rect    x y w h
/// circle  cx cy d [filled]
/// qbezier x0 y0 cx cy x1 y1
/// label   x y text-to-end-of-line
/// ```
///
/// Decimal reals are accepted everywhere. Blank lines and lines whose first
/// non-whitespace character is `#` are skipped; there are no inline comments,
/// so label text may contain `#`.
pub fn parse_scene_text<T: Scalar>(text: &str) -> Result<Scene<T>, SceneParseError> {
    let mut primitives = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (word, rest) = match line.split_once(char::is_whitespace) {
            Some((w, r)) => (w, r.trim_start()),
            None => (line, ""),
        };
        match word {
            "segment" | "vector" => {
                let v = parse_reals::<T>(rest, 4, lineno)?;
                let p0 = Point::new(v[0], v[1]);
                let p1 = Point::new(v[2], v[3]);
                let arrow = word == "vector";
                if arrow && p0 == p1 {
                    return Err(SceneParseError::new(
                        lineno,
                        "vector endpoints coincide; a vector needs a direction",
                    ));
                }
                primitives.push(Primitive::Segment { p0, p1, arrow });
            }
            "rect" => {
                let v = parse_reals::<T>(rest, 4, lineno)?;
                if v[2] < T::zero() || v[3] < T::zero() {
                    return Err(SceneParseError::new(lineno, "rect width/height negative"));
                }
                primitives.push(Primitive::Rectangle {
                    corner: Point::new(v[0], v[1]),
                    width: v[2],
                    height: v[3],
                });
            }
            "circle" => {
                let mut fields: Vec<&str> = rest.split_whitespace().collect();
                let filled = fields.last() == Some(&"filled");
                if filled {
                    fields.pop();
                }
                let joined = fields.join(" ");
                let v = parse_reals::<T>(&joined, 3, lineno)?;
                if v[2] <= T::zero() {
                    return Err(SceneParseError::new(lineno, "circle diameter must be > 0"));
                }
                primitives.push(Primitive::Circle {
                    center: Point::new(v[0], v[1]),
                    diameter: v[2],
                    filled,
                });
            }
            "qbezier" => {
                let v = parse_reals::<T>(rest, 6, lineno)?;
                primitives.push(Primitive::QuadBezier {
                    p0: Point::new(v[0], v[1]),
                    c: Point::new(v[2], v[3]),
                    p1: Point::new(v[4], v[5]),
                });
            }
            "label" => {
                let mut parts = rest.splitn(3, char::is_whitespace);
                let x = parts.next().unwrap_or("");
                let y = parts.next().unwrap_or("");
                let text = parts.next().unwrap_or("").to_string();
                let x = parse_real::<T>(x, lineno)?;
                let y = parse_real::<T>(y, lineno)?;
                check_label_text(&text).map_err(|m| SceneParseError::new(lineno, m))?;
                primitives.push(Primitive::Label {
                    anchor: Point::new(x, y),
                    text,
                });
            }
            other => {
                return Err(SceneParseError::new(
                    lineno,
                    format!("unknown primitive `{other}`"),
                ));
            }
        }
    }
    Ok(Scene::new(primitives))
}

fn parse_real<T: Scalar>(token: &str, lineno: usize) -> Result<T, SceneParseError> {
    let v: f64 = token
        .parse()
        .map_err(|_| SceneParseError::new(lineno, format!("bad number `{token}`")))?;
    if !v.is_finite() {
        return Err(SceneParseError::new(lineno, "coordinate is not finite"));
    }
    T::from_f64(v).ok_or_else(|| SceneParseError::new(lineno, "coordinate out of range"))
}

fn parse_reals<T: Scalar>(rest: &str, n: usize, lineno: usize) -> Result<Vec<T>, SceneParseError> {
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    if tokens.len() != n {
        return Err(SceneParseError::new(
            lineno,
            format!("expected {n} numbers, found {}", tokens.len()),
        ));
    }
    tokens.iter().map(|t| parse_real(t, lineno)).collect()
}
