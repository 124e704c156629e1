//! Parses picture-environment source into an AST, lints it against the
//! slope constraints, and reconstructs a scene for round-trip and fidelity
//! checks.
//!
//! The accepted grammar is a superset of the emitter's output: arbitrary
//! whitespace between tokens, text outside the picture environment (ignored),
//! decimal reals where LaTeX accepts them. Slope and length arguments must be
//! integers; non-integer values are warned about (W02) and rounded.

use thiserror::Error;

use crate::diag::{Diagnostic, Rule, Span};
use crate::emit::{InnerCommand, PictureCommand};
use crate::scalar::{cast, Scalar};
use crate::scene::{Point, Primitive, Scene};
use crate::slope::{validate_slope, SlopeKind};

/// A parsed command with its source span.
#[derive(Clone, Debug, PartialEq)]
pub struct Spanned<C> {
    pub node: C,
    pub span: Span,
}

/// Parsed picture environment: declared dimensions, optional origin offset
/// and the command list in source order with non-overlapping spans.
#[derive(Clone, Debug, PartialEq)]
pub struct PictureDoc<T> {
    pub width: T,
    pub height: T,
    /// Lower-left reference coordinates from the optional second argument
    /// of `\begin{picture}`; applied as a translation when reconstructing.
    pub origin: Option<(T, T)>,
    pub commands: Vec<Spanned<PictureCommand>>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing \\begin{{picture}} header")]
    MissingHeader,
    #[error("malformed picture header: {0}")]
    MalformedHeader(String),
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DocError {
    #[error("document has {} lint error(s)", .0.len())]
    LintFailed(Vec<Diagnostic>),
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, pos: usize) -> Self {
        Cursor { text, pos }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    /// Macro name after a `\`, e.g. `qbezier`.
    fn read_macro_name(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_alphabetic() {
                self.pos += 1;
            } else {
                break;
            }
        }
        &self.text[start..self.pos]
    }

    /// Decimal real: optional sign, digits with an optional fraction part.
    /// Exponents are not LaTeX syntax and are rejected.
    fn read_number(&mut self) -> Option<(f64, Span)> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut p = self.pos;
        if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
            p += 1;
        }
        let digits_from = p;
        while p < bytes.len() && bytes[p].is_ascii_digit() {
            p += 1;
        }
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            while p < bytes.len() && bytes[p].is_ascii_digit() {
                p += 1;
            }
        }
        if p == digits_from || &self.text[digits_from..p] == "." {
            return None;
        }
        let value: f64 = self.text[start..p].parse().ok()?;
        self.pos = p;
        Some((value, Span::new(start, p)))
    }

    fn skip_to_line_end(&mut self) {
        while let Some(b) = self.peek() {
            self.pos += 1;
            if b == b'\n' {
                break;
            }
        }
    }
}

/// Rounds a parsed real coordinate with the emitter's convention.
fn round_f64(v: f64) -> i64 {
    v.round() as i64
}

fn is_integral(v: f64) -> bool {
    (v - v.round()).abs() <= 1e-9
}

/// `( num , num )` group; returns the two values.
fn read_pair(cur: &mut Cursor) -> Option<(f64, f64, Span, Span)> {
    cur.skip_ws();
    if !cur.eat(b'(') {
        return None;
    }
    let (a, sa) = cur.read_number()?;
    cur.skip_ws();
    if !cur.eat(b',') {
        return None;
    }
    let (b, sb) = cur.read_number()?;
    cur.skip_ws();
    if !cur.eat(b')') {
        return None;
    }
    Some((a, b, sa, sb))
}

/// `{ num }` group.
fn read_braced_number(cur: &mut Cursor) -> Option<(f64, Span)> {
    cur.skip_ws();
    if !cur.eat(b'{') {
        return None;
    }
    let (v, span) = cur.read_number()?;
    cur.skip_ws();
    if !cur.eat(b'}') {
        return None;
    }
    Some((v, span))
}

/// Raw `\put` body text up to the matching brace. The opening `{` has been
/// consumed. Fails for nesting deeper than one level or an unterminated body.
fn read_body_text<'a>(cur: &mut Cursor<'a>) -> Result<&'a str, &'static str> {
    let start = cur.pos;
    let bytes = cur.text.as_bytes();
    let mut depth: i32 = 0;
    let mut p = cur.pos;
    while p < bytes.len() {
        match bytes[p] {
            b'\\' => p += 1,
            b'{' => {
                depth += 1;
                if depth > 1 {
                    return Err("label text nests braces deeper than one level");
                }
            }
            b'}' => {
                if depth == 0 {
                    let body = &cur.text[start..p];
                    cur.pos = p + 1;
                    return Ok(body);
                }
                depth -= 1;
            }
            _ => {}
        }
        p += 1;
    }
    Err("unterminated put body")
}

/// Emits a W02 when a slope or length argument is not an integer.
fn integral_arg(v: f64, span: Span, what: &str, diags: &mut Vec<Diagnostic>) -> i64 {
    if !is_integral(v) {
        diags.push(
            Diagnostic::new(
                Rule::NonIntegerArg,
                format!(
                    "{what} argument {v} is not an integer; rounded to {}",
                    round_f64(v)
                ),
            )
            .with_span(span),
        );
    }
    round_f64(v)
}

/// Parses picture source into a document plus parse-stage diagnostics.
///
/// Text before `\begin{picture}` and after `\end{picture}` is ignored.
/// Unrecognized or malformed commands produce an E04 diagnostic and are
/// skipped. A missing or malformed header is fatal.
pub fn parse_picture<T: Scalar>(
    text: &str,
) -> Result<(PictureDoc<T>, Vec<Diagnostic>), ParseError> {
    let header_at = text
        .find("\\begin{picture}")
        .ok_or(ParseError::MissingHeader)?;
    let mut cur = Cursor::new(text, header_at + "\\begin{picture}".len());
    let (w, h, _, _) = read_pair(&mut cur)
        .ok_or_else(|| ParseError::MalformedHeader("expected `(width,height)`".into()))?;
    let checkpoint = cur.pos;
    let origin = match read_pair(&mut cur) {
        Some((x, y, _, _)) => Some((cast::<T>(x), cast::<T>(y))),
        None => {
            cur.pos = checkpoint;
            None
        }
    };

    let mut commands = Vec::new();
    let mut diags = Vec::new();
    loop {
        cur.skip_ws();
        if cur.at_end() {
            diags.push(
                Diagnostic::new(Rule::Syntax, "missing \\end{picture}")
                    .with_span(Span::new(text.len(), text.len())),
            );
            break;
        }
        if cur.eat_str("\\end{picture}") {
            break;
        }
        let cmd_start = cur.pos;
        if !cur.eat(b'\\') {
            diags.push(
                Diagnostic::new(Rule::Syntax, "unexpected input inside picture environment")
                    .with_span(Span::new(cmd_start, cmd_start + 1)),
            );
            cur.skip_to_line_end();
            continue;
        }
        let name = cur.read_macro_name();
        match name {
            "qbezier" => match parse_qbezier(&mut cur) {
                Some(cmd) => commands.push(Spanned {
                    node: cmd,
                    span: Span::new(cmd_start, cur.pos),
                }),
                None => {
                    diags.push(
                        Diagnostic::new(Rule::Syntax, "malformed \\qbezier command")
                            .with_span(Span::new(cmd_start, cur.pos)),
                    );
                    cur.skip_to_line_end();
                }
            },
            "put" => match parse_put(&mut cur, &mut diags) {
                Ok(cmd) => commands.push(Spanned {
                    node: cmd,
                    span: Span::new(cmd_start, cur.pos),
                }),
                Err(message) => {
                    diags.push(
                        Diagnostic::new(Rule::Syntax, message)
                            .with_span(Span::new(cmd_start, cur.pos)),
                    );
                    cur.skip_to_line_end();
                }
            },
            other => {
                diags.push(
                    Diagnostic::new(Rule::Syntax, format!("unrecognized command \\{other}"))
                        .with_span(Span::new(cmd_start, cur.pos)),
                );
                cur.skip_to_line_end();
            }
        }
    }

    Ok((
        PictureDoc {
            width: cast::<T>(w),
            height: cast::<T>(h),
            origin,
            commands,
        },
        diags,
    ))
}

fn parse_qbezier(cur: &mut Cursor) -> Option<PictureCommand> {
    let (x1, y1, _, _) = read_pair(cur)?;
    let (x2, y2, _, _) = read_pair(cur)?;
    let (x3, y3, _, _) = read_pair(cur)?;
    Some(PictureCommand::Qbezier {
        x1: round_f64(x1),
        y1: round_f64(y1),
        x2: round_f64(x2),
        y2: round_f64(y2),
        x3: round_f64(x3),
        y3: round_f64(y3),
    })
}

fn parse_put(cur: &mut Cursor, diags: &mut Vec<Diagnostic>) -> Result<PictureCommand, String> {
    let (x, y, _, _) = read_pair(cur).ok_or("malformed \\put coordinates")?;
    cur.skip_ws();
    if !cur.eat(b'{') {
        return Err("\\put body must be braced".into());
    }
    let body_start = cur.pos;
    // Whitespace before a native inner command is tolerated; raw label text
    // keeps its leading whitespace.
    cur.skip_ws();
    let inner = if cur.eat_str("\\line") {
        parse_slope_body(cur, diags, "line").map(|(a, b, len)| InnerCommand::Line { a, b, len })?
    } else if cur.eat_str("\\vector") {
        parse_slope_body(cur, diags, "vector").map(|(a, b, len)| InnerCommand::Vector {
            a,
            b,
            len,
        })?
    } else if cur.eat_str("\\circle") {
        let filled = cur.eat(b'*');
        let (d, _) = read_braced_number(cur).ok_or("malformed \\circle diameter")?;
        cur.skip_ws();
        if !cur.eat(b'}') {
            return Err("unterminated \\put body".into());
        }
        InnerCommand::Circle {
            diameter: round_f64(d),
            filled,
        }
    } else {
        cur.pos = body_start;
        let body = read_body_text(cur).map_err(|e| e.to_string())?;
        InnerCommand::Text(body.to_string())
    };
    Ok(PictureCommand::Put {
        x: round_f64(x),
        y: round_f64(y),
        inner,
    })
}

fn parse_slope_body(
    cur: &mut Cursor,
    diags: &mut Vec<Diagnostic>,
    what: &str,
) -> Result<(i64, i64, i64), String> {
    let (a, b, sa, sb) = read_pair(cur).ok_or(format!("malformed \\{what} slope pair"))?;
    let (len, sl) = read_braced_number(cur).ok_or(format!("malformed \\{what} length argument"))?;
    cur.skip_ws();
    if !cur.eat(b'}') {
        return Err("unterminated \\put body".into());
    }
    let a = integral_arg(a, sa, "slope", diags);
    let b = integral_arg(b, sb, "slope", diags);
    let len = integral_arg(len, sl, "length", diags);
    Ok((a, b, len))
}

/// Lints a parsed document: slope rules for every native line and vector,
/// plus W01 for put anchors outside the declared box. Qbezier control points
/// legitimately leave the box (arrowhead overshoot) and are exempt.
pub fn lint<T: Scalar>(doc: &PictureDoc<T>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let (x0, y0) = doc.origin.unwrap_or((T::zero(), T::zero()));
    for cmd in &doc.commands {
        if let PictureCommand::Put { x, y, inner } = &cmd.node {
            let kind = match inner {
                InnerCommand::Line { a, b, .. } => Some((SlopeKind::Line, *a, *b)),
                InnerCommand::Vector { a, b, .. } => Some((SlopeKind::Vector, *a, *b)),
                _ => None,
            };
            if let Some((kind, a, b)) = kind {
                out.extend(
                    validate_slope(a, b, kind)
                        .into_iter()
                        .map(|d| d.with_span(cmd.span)),
                );
            }
            let px = cast::<T>(*x as f64);
            let py = cast::<T>(*y as f64);
            if px < x0 || px > x0 + doc.width || py < y0 || py > y0 + doc.height {
                out.push(
                    Diagnostic::new(
                        Rule::OutsideBox,
                        format!("anchor ({x},{y}) lies outside the picture box"),
                    )
                    .with_span(cmd.span),
                );
            }
        }
    }
    out
}

/// Convenience wrapper: parse, then lint, returning all diagnostics together.
pub fn parse_and_lint<T: Scalar>(
    text: &str,
) -> Result<(PictureDoc<T>, Vec<Diagnostic>), ParseError> {
    let (doc, mut diags) = parse_picture::<T>(text)?;
    diags.extend(lint(&doc));
    Ok((doc, diags))
}

/// Collinearity threshold for recognizing degenerate qbeziers: triangle area
/// normalized by chord length. Integer inputs make true collinearity exact;
/// the threshold only guards hand-written files.
const COLLINEAR_EPS: f64 = 1e-6;

/// Reconstructs a scene from a lint-clean document.
///
/// Collinear qbeziers come back as segments, native lines and vectors as
/// segments with the endpoint rebuilt from the slope pair and length, and
/// the optional picture origin is applied as a translation. Fails when the
/// document has lint errors.
pub fn doc_to_scene<T: Scalar>(doc: &PictureDoc<T>) -> Result<Scene<T>, DocError> {
    let errors: Vec<Diagnostic> = lint(doc).into_iter().filter(|d| d.is_error()).collect();
    if !errors.is_empty() {
        return Err(DocError::LintFailed(errors));
    }
    let (ox, oy) = doc.origin.unwrap_or((T::zero(), T::zero()));
    let shift =
        move |x: i64, y: i64| Point::new(cast::<T>(x as f64) - ox, cast::<T>(y as f64) - oy);
    let mut primitives = Vec::new();
    for cmd in &doc.commands {
        match &cmd.node {
            PictureCommand::Qbezier {
                x1,
                y1,
                x2,
                y2,
                x3,
                y3,
            } => {
                let p0 = shift(*x1, *y1);
                let c = shift(*x2, *y2);
                let p1 = shift(*x3, *y3);
                primitives.push(classify_qbezier(p0, c, p1));
            }
            PictureCommand::Put { x, y, inner } => {
                let anchor = shift(*x, *y);
                match inner {
                    InnerCommand::Line { a, b, len } | InnerCommand::Vector { a, b, len } => {
                        let arrow = matches!(inner, InnerCommand::Vector { .. });
                        let scale = if *a != 0 {
                            cast::<T>(*len as f64) / cast::<T>(a.abs() as f64)
                        } else {
                            cast::<T>(*len as f64) / cast::<T>(b.abs() as f64)
                        };
                        let p1 = Point::new(
                            anchor.x + cast::<T>(*a as f64) * scale,
                            anchor.y + cast::<T>(*b as f64) * scale,
                        );
                        primitives.push(Primitive::Segment {
                            p0: anchor,
                            p1,
                            // A zero-length vector has no representable
                            // direction; keep the geometry, drop the head.
                            arrow: arrow && *len > 0,
                        });
                    }
                    InnerCommand::Circle { diameter, filled } => {
                        primitives.push(Primitive::Circle {
                            center: anchor,
                            diameter: cast::<T>(*diameter as f64),
                            filled: *filled,
                        });
                    }
                    InnerCommand::Text(text) => {
                        primitives.push(Primitive::Label {
                            anchor,
                            text: text.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(Scene::new(primitives))
}

fn classify_qbezier<T: Scalar>(p0: Point<T>, c: Point<T>, p1: Point<T>) -> Primitive<T> {
    let chord = p0.distance(p1);
    if chord < cast(1e-12) {
        // Degenerate chord: a point if the control agrees, else a loop.
        if p0.distance(c) < cast(1e-9) {
            return Primitive::Segment {
                p0,
                p1,
                arrow: false,
            };
        }
        return Primitive::QuadBezier { p0, c, p1 };
    }
    let cross = (c.x - p0.x) * (p1.y - p0.y) - (c.y - p0.y) * (p1.x - p0.x);
    let two = T::one() + T::one();
    let area_over_chord = cross.abs() / (two * chord);
    if area_over_chord <= cast(COLLINEAR_EPS) {
        Primitive::Segment {
            p0,
            p1,
            arrow: false,
        }
    } else {
        Primitive::QuadBezier { p0, c, p1 }
    }
}
