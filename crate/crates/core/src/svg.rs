//! Imports an SVG subset into a scene, applying the screen-to-picture
//! vertical flip: SVG shares the top-left Y-down convention, picture space
//! is bottom-left Y-up.
//!
//! Supported elements: `line` (with an optional `marker-end` arrow), `rect`,
//! `circle`, `text`, and `path` with absolute/relative `M`, `L`, `Q`, `Z`
//! data. Everything else is skipped with a W03 warning, or refused in strict
//! mode. `transform` attributes are rejected; cubic path segments are
//! rejected rather than degree-reduced, since the emission pipeline is
//! strictly quadratic.

use thiserror::Error;

use crate::diag::{Diagnostic, Rule};
use crate::scalar::{cast, Scalar};
use crate::scene::{flip_vertical, translate, Point, Primitive, Scene};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SvgError {
    #[error("malformed SVG: {0}")]
    Malformed(String),
    #[error("unsupported SVG feature: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImportOptions<T> {
    /// SVG user units to picture units.
    pub scale: T,
    /// Fail on unsupported content instead of skipping it.
    pub strict: bool,
}

impl<T: Scalar> Default for ImportOptions<T> {
    fn default() -> Self {
        ImportOptions {
            scale: T::one(),
            strict: false,
        }
    }
}

/// Elements that structure the document without drawing anything.
const NON_RENDERING: &[&str] = &["defs", "marker", "title", "desc", "metadata", "style"];

/// Imports SVG text into a scene plus any import warnings.
///
/// Coordinates are translated by the viewBox offset, scaled by
/// `opts.scale`, then flipped vertically with the scaled viewBox height as
/// the mirror line.
pub fn import_svg<T: Scalar>(
    text: &str,
    opts: &ImportOptions<T>,
) -> Result<(Scene<T>, Vec<Diagnostic>), SvgError> {
    if !(opts.scale.is_finite() && opts.scale > T::zero()) {
        return Err(SvgError::Malformed(
            "scale must be finite and positive".into(),
        ));
    }
    let doc = roxmltree::Document::parse(text).map_err(|e| SvgError::Malformed(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err(SvgError::Malformed(format!(
            "root element is <{}>, expected <svg>",
            root.tag_name().name()
        )));
    }

    let (min_x, min_y, height) = document_frame::<T>(&root)?;

    let mut importer = Importer {
        opts,
        primitives: Vec::new(),
        diags: Vec::new(),
    };
    for child in root.children().filter(roxmltree::Node::is_element) {
        importer.element(&child)?;
    }
    let Importer {
        primitives, diags, ..
    } = importer;

    // Shift out the viewBox offset, scale, then mirror vertically.
    let scene = translate(&Scene::new(primitives), -min_x, -min_y);
    let scene = scale_scene(&scene, opts.scale);
    let scene = flip_vertical(&scene, height * opts.scale);
    Ok((scene, diags))
}

/// viewBox offset and height; viewBox wins over width/height attributes.
fn document_frame<T: Scalar>(root: &roxmltree::Node) -> Result<(T, T, T), SvgError> {
    if let Some(vb) = root.attribute("viewBox") {
        let nums: Vec<f64> = vb
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| SvgError::Malformed(format!("bad viewBox `{vb}`")))?;
        if nums.len() != 4 || !nums.iter().all(|v| v.is_finite()) || nums[3] < 0.0 {
            return Err(SvgError::Malformed(format!("bad viewBox `{vb}`")));
        }
        return Ok((cast(nums[0]), cast(nums[1]), cast(nums[3])));
    }
    let height = root
        .attribute("height")
        .ok_or_else(|| SvgError::Malformed("missing viewBox and width/height".into()))?;
    root.attribute("width")
        .ok_or_else(|| SvgError::Malformed("missing viewBox and width/height".into()))?;
    let h = parse_length(height)
        .ok_or_else(|| SvgError::Malformed(format!("bad height `{height}`")))?;
    Ok((T::zero(), T::zero(), cast(h)))
}

/// Numeric prefix of a length attribute; the unit suffix is ignored
/// (`--scale` handles unit conversion).
fn parse_length(s: &str) -> Option<f64> {
    let end = s
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '+' || c == '-'))
        .unwrap_or(s.len());
    let v: f64 = s[..end].parse().ok()?;
    v.is_finite().then_some(v)
}

fn scale_scene<T: Scalar>(scene: &Scene<T>, scale: T) -> Scene<T> {
    if scale == T::one() {
        return scene.clone();
    }
    Scene::new(
        scene
            .primitives
            .iter()
            .map(|prim| match prim {
                Primitive::Segment { p0, p1, arrow } => Primitive::Segment {
                    p0: *p0 * scale,
                    p1: *p1 * scale,
                    arrow: *arrow,
                },
                Primitive::Rectangle {
                    corner,
                    width,
                    height,
                } => Primitive::Rectangle {
                    corner: *corner * scale,
                    width: *width * scale,
                    height: *height * scale,
                },
                Primitive::Circle {
                    center,
                    diameter,
                    filled,
                } => Primitive::Circle {
                    center: *center * scale,
                    diameter: *diameter * scale,
                    filled: *filled,
                },
                Primitive::QuadBezier { p0, c, p1 } => Primitive::QuadBezier {
                    p0: *p0 * scale,
                    c: *c * scale,
                    p1: *p1 * scale,
                },
                Primitive::Label { anchor, text } => Primitive::Label {
                    anchor: *anchor * scale,
                    text: text.clone(),
                },
            })
            .collect(),
    )
}

struct Importer<'o, T> {
    opts: &'o ImportOptions<T>,
    primitives: Vec<Primitive<T>>,
    diags: Vec<Diagnostic>,
}

impl<T: Scalar> Importer<'_, T> {
    fn skip(&mut self, what: String) -> Result<(), SvgError> {
        if self.opts.strict {
            return Err(SvgError::Unsupported(what));
        }
        self.diags.push(Diagnostic::new(
            Rule::Unsupported,
            format!("{what}; skipped"),
        ));
        Ok(())
    }

    fn element(&mut self, node: &roxmltree::Node) -> Result<(), SvgError> {
        let name = node.tag_name().name();
        if NON_RENDERING.contains(&name) {
            return Ok(());
        }
        if node.has_attribute("transform") {
            return self.skip(format!("<{name}> carries a transform attribute"));
        }
        match name {
            "g" | "svg" => {
                for child in node.children().filter(roxmltree::Node::is_element) {
                    self.element(&child)?;
                }
                Ok(())
            }
            "line" => {
                let p0 = Point::new(self.coord(node, "x1"), self.coord(node, "y1"));
                let p1 = Point::new(self.coord(node, "x2"), self.coord(node, "y2"));
                let arrow = node.has_attribute("marker-end");
                if arrow && p0 == p1 {
                    return self.skip("<line> with marker-end has zero length".into());
                }
                self.primitives.push(Primitive::Segment { p0, p1, arrow });
                Ok(())
            }
            "rect" => {
                let corner = Point::new(self.coord(node, "x"), self.coord(node, "y"));
                let width = self.coord(node, "width");
                let height = self.coord(node, "height");
                if width < T::zero() || height < T::zero() {
                    return self.skip("<rect> with negative size".into());
                }
                self.primitives.push(Primitive::Rectangle {
                    corner,
                    width,
                    height,
                });
                Ok(())
            }
            "circle" => {
                let center = Point::new(self.coord(node, "cx"), self.coord(node, "cy"));
                let r = self.coord(node, "r");
                if r <= T::zero() {
                    return self.skip("<circle> without a positive radius".into());
                }
                let filled = matches!(node.attribute("fill"), Some(f) if f != "none");
                self.primitives.push(Primitive::Circle {
                    center,
                    diameter: r + r,
                    filled,
                });
                Ok(())
            }
            "text" => {
                let anchor = Point::new(self.coord(node, "x"), self.coord(node, "y"));
                let text: String = node
                    .descendants()
                    .filter(roxmltree::Node::is_text)
                    .filter_map(|n| n.text())
                    .collect::<String>()
                    .trim()
                    .to_string();
                if text.is_empty() {
                    return self.skip("<text> with no content".into());
                }
                self.primitives.push(Primitive::Label { anchor, text });
                Ok(())
            }
            "path" => {
                let d = node.attribute("d").unwrap_or("");
                if d.trim().is_empty() {
                    return self.skip("<path> without data".into());
                }
                match parse_path_data::<T>(d) {
                    Ok(parts) => {
                        self.primitives.extend(parts);
                        Ok(())
                    }
                    Err(SvgError::Malformed(m)) | Err(SvgError::Unsupported(m)) => {
                        self.skip(format!("<path> {m}"))
                    }
                }
            }
            other => self.skip(format!("unsupported element <{other}>")),
        }
    }

    fn coord(&self, node: &roxmltree::Node, attr: &str) -> T {
        node.attribute(attr)
            .and_then(parse_length)
            .map(cast)
            .unwrap_or_else(T::zero)
    }
}

/// Parses path data with commands `M/m`, `L/l`, `Q/q`, `Z/z` (with implicit
/// repetition) into segments and quadratic curves in SVG coordinates; the
/// vertical flip happens in [`import_svg`]. Unknown command letters (`C`,
/// `A`, ...) are malformed input by design.
pub fn parse_path_data<T: Scalar>(d: &str) -> Result<Vec<Primitive<T>>, SvgError> {
    let mut lexer = PathLexer { d, pos: 0 };
    let mut out = Vec::new();
    let mut cur = Point::new(T::zero(), T::zero());
    let mut subpath_start = cur;
    let mut command: Option<u8> = None;
    let mut any = false;

    loop {
        lexer.skip_separators();
        let Some(next) = lexer.peek() else { break };
        if next.is_ascii_alphabetic() {
            lexer.pos += 1;
            match next {
                b'M' | b'm' | b'L' | b'l' | b'Q' | b'q' => command = Some(next),
                b'Z' | b'z' => {
                    if !any {
                        return Err(SvgError::Malformed("close before any subpath".into()));
                    }
                    if cur != subpath_start {
                        out.push(Primitive::Segment {
                            p0: cur,
                            p1: subpath_start,
                            arrow: false,
                        });
                    }
                    cur = subpath_start;
                    // A number may not follow a close directly.
                    command = None;
                    continue;
                }
                other => {
                    return Err(SvgError::Malformed(format!(
                        "unsupported path command `{}`",
                        other as char
                    )));
                }
            }
        } else if command.is_none() {
            return Err(SvgError::Malformed(
                "path data does not start with a command".into(),
            ));
        }

        let cmd = command.ok_or_else(|| SvgError::Malformed("number after close".into()))?;
        let relative = cmd.is_ascii_lowercase();
        match cmd {
            b'M' | b'm' => {
                let p = lexer.point::<T>(relative, cur, !any && relative)?;
                cur = p;
                subpath_start = p;
                any = true;
                // Further pairs are implicit linetos.
                command = Some(if relative { b'l' } else { b'L' });
            }
            b'L' | b'l' => {
                let p = lexer.point::<T>(relative, cur, false)?;
                out.push(Primitive::Segment {
                    p0: cur,
                    p1: p,
                    arrow: false,
                });
                cur = p;
                any = true;
            }
            b'Q' | b'q' => {
                let c = lexer.point::<T>(relative, cur, false)?;
                let p = lexer.point::<T>(relative, cur, false)?;
                out.push(Primitive::QuadBezier { p0: cur, c, p1: p });
                cur = p;
                any = true;
            }
            _ => unreachable!(),
        }
    }
    Ok(out)
}

struct PathLexer<'a> {
    d: &'a str,
    pos: usize,
}

impl PathLexer<'_> {
    fn peek(&self) -> Option<u8> {
        self.d.as_bytes().get(self.pos).copied()
    }

    fn skip_separators(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() || b == b',' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<f64, SvgError> {
        self.skip_separators();
        let start = self.pos;
        let bytes = self.d.as_bytes();
        let mut p = self.pos;
        if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
            p += 1;
        }
        while p < bytes.len() && (bytes[p].is_ascii_digit() || bytes[p] == b'.') {
            p += 1;
        }
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if q < bytes.len() && bytes[q].is_ascii_digit() {
                p = q;
                while p < bytes.len() && bytes[p].is_ascii_digit() {
                    p += 1;
                }
            }
        }
        let token = &self.d[start..p];
        let v: f64 = token
            .parse()
            .map_err(|_| SvgError::Malformed(format!("bad number `{token}` in path data")))?;
        if !v.is_finite() {
            return Err(SvgError::Malformed("non-finite number in path data".into()));
        }
        self.pos = p;
        Ok(v)
    }

    /// Next coordinate pair; `force_absolute` covers the SVG rule that a
    /// leading `m` is treated as an absolute moveto.
    fn point<T: Scalar>(
        &mut self,
        relative: bool,
        cur: Point<T>,
        force_absolute: bool,
    ) -> Result<Point<T>, SvgError> {
        let x = cast::<T>(self.number()?);
        let y = cast::<T>(self.number()?);
        if relative && !force_absolute {
            Ok(Point::new(cur.x + x, cur.y + y))
        } else {
            Ok(Point::new(x, y))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn import(text: &str) -> (Scene<f64>, Vec<Diagnostic>) {
        import_svg(text, &ImportOptions::default()).unwrap()
    }

    #[test]
    fn line_is_flipped_into_picture_space() {
        let (scene, diags) = import(
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 215 283">
                 <line x1="0" y1="269" x2="209" y2="269"/>
               </svg>"#,
        );
        assert!(diags.is_empty());
        assert_eq!(
            scene.primitives[0],
            Primitive::Segment {
                p0: Point::new(0.0, 14.0),
                p1: Point::new(209.0, 14.0),
                arrow: false
            }
        );
    }

    #[test]
    fn circle_is_flipped_and_doubled() {
        let (scene, _) =
            import(r#"<svg viewBox="0 0 215 283"><circle cx="64" cy="91" r="19"/></svg>"#);
        assert_eq!(
            scene.primitives[0],
            Primitive::Circle {
                center: Point::new(64.0, 192.0),
                diameter: 38.0,
                filled: false
            }
        );
    }

    #[test]
    fn circle_fill_attribute() {
        let (scene, _) = import(
            r#"<svg viewBox="0 0 10 10">
                 <circle cx="5" cy="5" r="2" fill="black"/>
                 <circle cx="5" cy="5" r="2" fill="none"/>
               </svg>"#,
        );
        assert!(matches!(
            scene.primitives[0],
            Primitive::Circle { filled: true, .. }
        ));
        assert!(matches!(
            scene.primitives[1],
            Primitive::Circle { filled: false, .. }
        ));
    }

    #[test]
    fn empty_svg_is_empty_scene() {
        let (scene, diags) = import(r#"<svg viewBox="0 0 10 10"/>"#);
        assert!(scene.is_empty());
        assert!(diags.is_empty());
    }

    #[test]
    fn rect_corner_becomes_bottom_left() {
        let (scene, _) = import(
            r#"<svg viewBox="0 0 100 100"><rect x="10" y="20" width="30" height="40"/></svg>"#,
        );
        assert_eq!(
            scene.primitives[0],
            Primitive::Rectangle {
                corner: Point::new(10.0, 40.0),
                width: 30.0,
                height: 40.0
            }
        );
    }

    #[test]
    fn marker_end_makes_an_arrow() {
        let (scene, _) = import(
            r#"<svg viewBox="0 0 100 100">
                 <line x1="0" y1="50" x2="60" y2="50" marker-end="url(#arrow)"/>
               </svg>"#,
        );
        assert!(matches!(
            scene.primitives[0],
            Primitive::Segment { arrow: true, .. }
        ));
    }

    #[test]
    fn text_imports_anchor_and_content() {
        let (scene, _) = import(r#"<svg viewBox="0 0 100 100"><text x="10" y="30">V</text></svg>"#);
        assert_eq!(
            scene.primitives[0],
            Primitive::Label {
                anchor: Point::new(10.0, 70.0),
                text: "V".into()
            }
        );
    }

    #[test]
    fn unsupported_element_warns_or_fails() {
        let text = r#"<svg viewBox="0 0 10 10"><ellipse cx="5" cy="5" rx="2" ry="1"/></svg>"#;
        let (scene, diags) = import(text);
        assert!(scene.is_empty());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, Rule::Unsupported);
        let strict = ImportOptions {
            strict: true,
            ..ImportOptions::default()
        };
        assert!(matches!(
            import_svg::<f64>(text, &strict).unwrap_err(),
            SvgError::Unsupported(_)
        ));
    }

    #[test]
    fn transform_attribute_is_rejected() {
        let (scene, diags) = import(
            r#"<svg viewBox="0 0 10 10"><g transform="scale(2)"><line x1="0" y1="0" x2="1" y2="1"/></g></svg>"#,
        );
        assert!(scene.is_empty());
        assert_eq!(diags.len(), 1);
    }

    #[test]
    fn groups_pass_children_through() {
        let (scene, diags) =
            import(r#"<svg viewBox="0 0 10 10"><g><line x1="0" y1="0" x2="1" y2="1"/></g></svg>"#);
        assert!(diags.is_empty());
        assert_eq!(scene.len(), 1);
    }

    #[test]
    fn malformed_xml_and_missing_dims() {
        assert!(matches!(
            import_svg::<f64>("<svg", &ImportOptions::default()),
            Err(SvgError::Malformed(_))
        ));
        assert!(matches!(
            import_svg::<f64>("<svg/>", &ImportOptions::default()),
            Err(SvgError::Malformed(_))
        ));
        assert!(matches!(
            import_svg::<f64>("<div/>", &ImportOptions::default()),
            Err(SvgError::Malformed(_))
        ));
    }

    #[test]
    fn width_height_fallback_and_units() {
        let (scene, _) = import_svg::<f64>(
            r#"<svg width="100px" height="50px"><text x="1" y="2">a</text></svg>"#,
            &ImportOptions::default(),
        )
        .unwrap();
        assert_eq!(
            scene.primitives[0],
            Primitive::Label {
                anchor: Point::new(1.0, 48.0),
                text: "a".into()
            }
        );
    }

    #[test]
    fn viewbox_offset_translates() {
        let (scene, _) =
            import(r#"<svg viewBox="10 20 100 50"><text x="10" y="70">a</text></svg>"#);
        // (10-10, 70-20) = (0, 50), flipped in a 50-high box -> (0, 0).
        assert_eq!(
            scene.primitives[0],
            Primitive::Label {
                anchor: Point::new(0.0, 0.0),
                text: "a".into()
            }
        );
    }

    #[test]
    fn scale_applies_before_flip() {
        let opts = ImportOptions {
            scale: 2.0,
            ..ImportOptions::default()
        };
        let (scene, _) = import_svg::<f64>(
            r#"<svg viewBox="0 0 100 100"><text x="10" y="30">a</text></svg>"#,
            &opts,
        )
        .unwrap();
        assert_eq!(
            scene.primitives[0],
            Primitive::Label {
                anchor: Point::new(20.0, 140.0),
                text: "a".into()
            }
        );
    }

    #[test]
    fn path_triangle_with_close() {
        let parts = parse_path_data::<f64>("M 0 0 L 10 0 L 10 5 Z").unwrap();
        assert_eq!(parts.len(), 3);
        assert_eq!(
            parts[2],
            Primitive::Segment {
                p0: Point::new(10.0, 5.0),
                p1: Point::new(0.0, 0.0),
                arrow: false
            }
        );
    }

    #[test]
    fn path_quadratic() {
        let parts = parse_path_data::<f64>("M 0 0 Q 5 10 10 0").unwrap();
        assert_eq!(
            parts[0],
            Primitive::QuadBezier {
                p0: Point::new(0.0, 0.0),
                c: Point::new(5.0, 10.0),
                p1: Point::new(10.0, 0.0)
            }
        );
    }

    #[test]
    fn path_relative_accumulation() {
        let parts = parse_path_data::<f64>("m 1 1 l 2 0").unwrap();
        assert_eq!(
            parts[0],
            Primitive::Segment {
                p0: Point::new(1.0, 1.0),
                p1: Point::new(3.0, 1.0),
                arrow: false
            }
        );
    }

    #[test]
    fn path_implicit_repetition() {
        // Pairs after a moveto are implicit linetos.
        let parts = parse_path_data::<f64>("M 0 0 10 0 10 5").unwrap();
        assert_eq!(parts.len(), 2);
        // Repeated quadratic pairs.
        let parts = parse_path_data::<f64>("M 0 0 Q 1 1 2 0 3 -1 4 0").unwrap();
        assert_eq!(parts.len(), 2);
    }

    #[test]
    fn path_commas_and_exponents() {
        let parts = parse_path_data::<f64>("M0,0L1e1,5.5").unwrap();
        assert_eq!(
            parts[0],
            Primitive::Segment {
                p0: Point::new(0.0, 0.0),
                p1: Point::new(10.0, 5.5),
                arrow: false
            }
        );
    }

    #[test]
    fn path_rejects_unsupported_and_garbage() {
        assert!(matches!(
            parse_path_data::<f64>("M 0 0 C 1 1 2 2 3 3"),
            Err(SvgError::Malformed(_))
        ));
        assert!(matches!(
            parse_path_data::<f64>("10 20"),
            Err(SvgError::Malformed(_))
        ));
        assert!(matches!(
            parse_path_data::<f64>("M 0"),
            Err(SvgError::Malformed(_))
        ));
        assert!(matches!(
            parse_path_data::<f64>("Z"),
            Err(SvgError::Malformed(_))
        ));
    }

    #[test]
    fn cubic_path_in_document_warns_non_strict() {
        let (scene, diags) =
            import(r#"<svg viewBox="0 0 10 10"><path d="M 0 0 C 1 1 2 2 3 3"/></svg>"#);
        assert!(scene.is_empty());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].rule, Rule::Unsupported);
    }
}
